//! A cone of either kind behind one interface, so that propagator and fit
//! harnesses take their spectral measure from the closed-form mode sums or
//! from the radial ODE solver interchangeably.

use num_complex::Complex64;

use crate::cross_section::{stability_constant, ConformalProfile, CrossSection};
use crate::error::Result;
use crate::kernels::{bessel_j_modes, PointPair, ProductCone, Sign};
use crate::radial::NonProductCone;

#[derive(Debug, Clone)]
pub enum Cone {
    Product(ProductCone),
    NonProduct(NonProductCone),
}

impl Cone {
    /// Product cone when `profile` is constant, otherwise the radial model.
    pub fn new(n: usize, cs: CrossSection, profile: ConformalProfile) -> Result<Self> {
        if profile.is_product() {
            Ok(Cone::Product(ProductCone::new(n, cs)?))
        } else {
            Ok(Cone::NonProduct(NonProductCone::new(n, cs, profile)?))
        }
    }

    pub fn product(n: usize, cs: CrossSection) -> Result<Self> {
        Ok(Cone::Product(ProductCone::new(n, cs)?))
    }

    pub fn n(&self) -> usize {
        match self {
            Cone::Product(c) => c.n(),
            Cone::NonProduct(c) => c.n(),
        }
    }

    pub fn cross_section(&self) -> &CrossSection {
        match self {
            Cone::Product(c) => c.cross_section(),
            Cone::NonProduct(c) => c.cross_section(),
        }
    }

    pub fn profile(&self) -> ConformalProfile {
        match self {
            Cone::Product(_) => ConformalProfile::product(),
            Cone::NonProduct(c) => *c.profile(),
        }
    }

    /// Stability constant `𝐞 = sup x·e(x)`; zero for the product cone.
    pub fn stability(&self) -> f64 {
        match self {
            Cone::Product(_) => 0.0,
            Cone::NonProduct(c) => stability_constant(c.n(), c.profile())
                .expect("checked when the cone was built")
                .value
                .max(0.0),
        }
    }

    /// Radial volume density `x^{n−1} a(x)^{n−1}`.
    pub fn radial_density(&self, x: f64) -> f64 {
        (x * self.profile().a(x)).powi(self.n() as i32 - 1)
    }

    /// `φ_j(x_k)` for ascending `radii`, with the spectral measure
    /// `dE(λ; z, z′) = Σ_j Π_j(γ) φ_j(x) φ_j(x′)`.
    pub fn mode_profiles(&self, lambda: f64, radii: &[f64], modes: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            Cone::Product(c) => {
                let half = 0.5 * (c.n() as f64 - 2.0);
                let orders = &c.orders()[..modes.min(c.orders().len())];
                let mut out = vec![Vec::with_capacity(radii.len()); orders.len()];
                for &x in radii {
                    let js = bessel_j_modes(orders, lambda * x)?;
                    let scale = lambda.sqrt() * x.powf(-half);
                    for (row, jv) in out.iter_mut().zip(js) {
                        row.push(scale * jv);
                    }
                }
                Ok(out)
            }
            Cone::NonProduct(c) => c.mode_profiles(lambda, radii, modes),
        }
    }

    /// Spectral measure kernel at one point pair.
    pub fn spectral_measure(&self, lambda: f64, pair: PointPair, modes: usize) -> Result<f64> {
        match self {
            Cone::Product(c) => Ok(c.spectral_measure(lambda, pair, modes)?.value.re),
            Cone::NonProduct(c) => Ok(c.assemble(lambda, pair, modes)?.1),
        }
    }

    /// Outgoing or incoming resolvent kernel at one point pair.
    pub fn resolvent(&self, lambda: f64, pair: PointPair, modes: usize, sign: Sign) -> Result<Complex64> {
        match self {
            Cone::Product(c) => Ok(c.resolvent(lambda, pair, modes, sign)?.value),
            Cone::NonProduct(c) => {
                let out = c.assemble(lambda, pair, modes)?.0;
                Ok(match sign {
                    Sign::Out => out,
                    Sign::In => out.conj(),
                })
            }
        }
    }
}
