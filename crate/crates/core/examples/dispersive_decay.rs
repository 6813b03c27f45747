//! Fitted decay exponent of the damped Schrödinger kernel on `R³` written
//! as a cone. Expect α close to −3/2.

use conic_spectral::cone::Cone;
use conic_spectral::cross_section::CrossSection;
use conic_spectral::propagator::{dispersive_fit, DispersiveConfig};

fn main() -> conic_spectral::Result<()> {
    let cone = Cone::product(3, CrossSection::round_sphere(2, 60)?)?;
    let fit = dispersive_fit(&cone, &DispersiveConfig::standard(&cone))?;
    for (t, s) in fit.times.iter().zip(&fit.sup) {
        println!("t={t:.4}  sup|K|={s:.6e}");
    }
    println!("fitted alpha {:.4}, eps-halving change {:.1e}", fit.alpha, fit.eps_sensitivity());
    Ok(())
}
