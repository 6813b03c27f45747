//! Distances on cones and points of the geometric Legendrian.

use std::f64::consts::PI;

use conic_spectral::cross_section::CrossSection;
use conic_spectral::geometry::*;

fn main() -> conic_spectral::Result<()> {
    let s2 = CrossSection::round_sphere(2, 1)?;
    let a = ConePoint::new(1.0, CrossPoint::spherical(0.0, 0.0));
    let b = ConePoint::new(1.0, CrossPoint::spherical(PI / 2.0, 0.0));
    println!("R³ distance between orthogonal unit vectors: {:.15}", cone_distance(&s2, &a, &b)?);

    // cone angle 3π: rays more than π apart only meet through the tip
    let wide = CrossSection::circle(3.0 * PI, 1)?;
    for angle in [0.5 * PI, 1.2 * PI] {
        let z = ConePoint::new(1.0, CrossPoint::Angle(0.0));
        let w = ConePoint::new(2.0, CrossPoint::Angle(angle));
        println!(
            "angle {:.2}π: distance {:.6}, geometric {}",
            angle / PI,
            cone_distance(&wide, &z, &w)?,
            is_geometric(&wide, &z.y, &w.y)?
        );
    }

    let y0 = CrossPoint::spherical(0.7, 0.3);
    let dir = [0.7f64.cos() * 0.3f64.cos(), 0.7f64.cos() * 0.3f64.sin(), -0.7f64.sin()];
    for s in [0.3, 1.0, 2.5] {
        let f = flow_point(&s2, &y0, &dir, s, 1.2)?;
        println!("s={s}: tau {:.4}, rho {:.4}, tau²+|mu|² = {:.15}", f.tau, f.rho_tilde, f.tau * f.tau + f.mu_norm * f.mu_norm);
    }
    Ok(())
}
