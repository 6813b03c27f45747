//! Discrete `L²_t L⁶` norm of evolved Gaussian bumps; the ratio to `‖f‖₂`
//! should not depend on the width.

use conic_spectral::cone::Cone;
use conic_spectral::cross_section::CrossSection;
use conic_spectral::propagator::*;

fn main() -> conic_spectral::Result<()> {
    let cone = Cone::product(3, CrossSection::round_sphere(2, 40)?)?;
    let spec = StrichartzSpec::new(2.0, 6.0, 3, cone.stability())?;
    let times = strichartz_time_grid(1);
    for w in [0.3, 0.4, 0.5] {
        let ev = RadialEvolution::new(&cone, RadialBump::gaussian(w), EvolutionGrid::default())?;
        let norm = strichartz_norm(&ev, &spec, &times)?;
        let unitarity = ev.unitarity(&[0.5, 1.0])?;
        println!("width {w}: C = {:.5}, ‖u(t)‖ ratios {unitarity:.8?}", norm / ev.damped_norm());
    }
    println!("loss exponent for n=3, q=2, e=1: {:.6}", loss_exponent(3, 2.0, 1.0));
    Ok(())
}
