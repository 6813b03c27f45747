//! Growth of the normalized spectral-measure kernel in λ on the flat cone
//! and on a warped one with stability constant 0.2.

use conic_spectral::cone::Cone;
use conic_spectral::cross_section::{ConformalProfile, CrossSection};
use conic_spectral::propagator::geometric;
use conic_spectral::radial::{growth_exponent_fit, SamplePolicy};

fn main() -> conic_spectral::Result<()> {
    let lambdas = geometric(4.0, 64.0, 8);
    let flat = Cone::product(3, CrossSection::round_sphere(2, 40)?)?;
    let warped = Cone::new(3, CrossSection::round_sphere(2, 40)?, ConformalProfile::exponential(0.2, 0.5)?)?;
    for (name, cone) in [("flat", &flat), ("warped", &warped)] {
        let fit = growth_exponent_fit(cone, &lambdas, &SamplePolicy::default(), 40)?;
        println!(
            "{name}: slope {:.4}, allowed n-1+e/2 = {:.2}",
            fit.slope,
            cone.n() as f64 - 1.0 + 0.5 * cone.stability()
        );
    }
    Ok(())
}
