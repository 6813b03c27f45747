//! One damped propagator value against the free closed form, then the same
//! point pair on a cone with cone angle larger than a full turn.

use std::f64::consts::PI;

use conic_spectral::cone::Cone;
use conic_spectral::cross_section::CrossSection;
use conic_spectral::kernels::PointPair;
use conic_spectral::propagator::{free_kernel, schrodinger_kernel, PropagatorRequest};

fn main() -> conic_spectral::Result<()> {
    let pair = PointPair::new(0.2, 0.15, 1.0);
    let flat = Cone::product(3, CrossSection::round_sphere(2, 60)?)?;
    let req = PropagatorRequest::new(0.5, pair, 1e-3);
    let v = schrodinger_kernel(&flat, &req, 60)?;
    println!("R³: {:.10} vs closed {:.10}", v.value, free_kernel(3, 0.5, 1e-3, pair.distance()));
    let wide = Cone::product(3, CrossSection::circle(2.0 * PI * 1.2, 60)?)?;
    let w = schrodinger_kernel(&wide, &PropagatorRequest::new(0.3, pair, 1e-3), 60)?;
    println!("circle cone: {:.10} (eps-halving estimate {:.1e})", w.value, w.error_estimate);
    Ok(())
}
