//! Cylinder functions across regimes: values, the Wronskian `2/(πx)` and the
//! large-argument Hankel expansion.

use std::f64::consts::PI;

use conic_spectral::bessel::{cylinder, hankel1, hankel1_asymptotic};

fn main() -> conic_spectral::Result<()> {
    println!("{:>6} {:>8} {:>22} {:>22} {:>10}", "nu", "x", "J", "Y", "W err");
    for &(nu, x) in &[(0.0, 1.0), (0.5, 0.01), (2.5, 10.0), (10.0, 1.0), (40.0, 8.0), (60.0, 199.0)] {
        let c = cylinder(nu, x)?;
        let w = 2.0 / (PI * x);
        println!("{nu:>6} {x:>8} {:>22.15e} {:>22.15e} {:>10.1e}", c.j, c.y, (c.wronskian() - w).abs() / w);
    }
    let exact = hankel1(2.0, 50.0)?;
    for terms in 0..=4 {
        let approx = hankel1_asymptotic(2.0, 50.0, terms)?;
        println!("H1_2(50) with {terms} terms: rel err {:.2e}", (approx - exact).norm() / exact.norm());
    }
    Ok(())
}
