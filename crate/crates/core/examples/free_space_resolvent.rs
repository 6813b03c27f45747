//! The cone over the round sphere `S²` is `R³`: its mode-summed outgoing
//! resolvent must be `e^{iλd}/(4πd)`. Equal radii are avoided: there the
//! mode sum converges only like the Legendre series of a point mass.

use std::f64::consts::PI;

use conic_spectral::cone::Cone;
use conic_spectral::cross_section::CrossSection;
use conic_spectral::kernels::{PointPair, Sign};
use num_complex::Complex64;

fn main() -> conic_spectral::Result<()> {
    let cone = Cone::product(3, CrossSection::round_sphere(2, 40)?)?;
    for &lambda in &[0.8, 2.2] {
        for &(x, xp, gamma) in &[(0.3, 1.8, 0.5), (0.9, 3.4, 2.5), (1.0, 1.6, PI / 3.0)] {
            let pair = PointPair::new(x, xp, gamma);
            let d = pair.distance();
            let closed = Complex64::from_polar(1.0, lambda * d) / (4.0 * PI * d);
            let sum = cone.resolvent(lambda, pair, 40, Sign::Out)?;
            println!(
                "λ={lambda} d={d:.4}: mode sum {sum:.10}, closed {closed:.10}, rel err {:.1e}",
                (sum - closed).norm() / closed.norm()
            );
        }
    }
    Ok(())
}
