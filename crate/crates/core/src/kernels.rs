//! Resolvent and spectral-measure kernels of the product cone as mode sums
//! of Bessel and Hankel functions.
//!
//! Kernels act on scalar functions against the Riemannian density. Points
//! are encoded by their radii and the link distance `γ` between them.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::bessel::{bessel_j, bessel_j_ladder, cylinder, MAX_ORDER};
use crate::cross_section::{mode_constants, CrossSection};
use crate::error::{Error, Result};
use crate::geometry::cone_distance_from_angle;

/// Default number of retained modes.
pub const DEFAULT_MODES: usize = 40;
/// Pairs with `λ·d` below this are flagged as diagonal.
pub const DIAGONAL_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    ResolventOut,
    ResolventIn,
    SpectralMeasure,
    Propagator,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::ResolventOut => "resolvent_out",
            KernelKind::ResolventIn => "resolvent_in",
            KernelKind::SpectralMeasure => "spectral_measure",
            KernelKind::Propagator => "propagator",
        }
    }
}

/// Outgoing (`H¹`) or incoming (`H²`) boundary value of the resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Out,
    In,
}

/// Two cone points `(x, y)`, `(x′, y′)` with link distance `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPair {
    pub x: f64,
    pub x_prime: f64,
    pub gamma: f64,
}

impl PointPair {
    pub fn new(x: f64, x_prime: f64, gamma: f64) -> Self {
        Self { x, x_prime, gamma }
    }

    pub fn swapped(self) -> Self {
        Self {
            x: self.x_prime,
            x_prime: self.x,
            gamma: self.gamma,
        }
    }

    /// Product-cone distance.
    pub fn distance(&self) -> f64 {
        cone_distance_from_angle(self.x, self.x_prime, self.gamma)
    }

    fn validate(&self) -> Result<()> {
        if !(self.x > 0.0 && self.x_prime > 0.0) || !self.x.is_finite() || !self.x_prime.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radii must be positive and finite, got x={}, x'={}",
                self.x, self.x_prime
            )));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "link distance {} must be non-negative",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Validates radii and that `gamma` does not exceed the diameter of `cs`.
    pub(crate) fn validate_on(&self, cs: &CrossSection) -> Result<()> {
        self.validate()?;
        if self.gamma > cs.diameter() * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "link distance {} exceeds the cross-section diameter {}",
                self.gamma,
                cs.diameter()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub lambda: f64,
    pub pair: PointPair,
    pub value: Complex64,
    pub kind: KernelKind,
    /// `λ·d < 0.05`: the mode sum does not converge to the kernel there.
    pub diagonal: bool,
    /// Largest of the last two mode terms relative to `Σ|terms|`.
    pub tail: f64,
}

/// The product cone `(0,∞) × Y` with metric `dx² + x²h₀` in dimension `n`.
#[derive(Debug, Clone)]
pub struct ProductCone {
    n: usize,
    cs: CrossSection,
    nu: Vec<f64>,
}

impl ProductCone {
    pub fn new(n: usize, cs: CrossSection) -> Result<Self> {
        let nu = mode_constants(n, &cs)?.nu;
        Ok(Self { n, cs, nu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cross_section(&self) -> &CrossSection {
        &self.cs
    }

    /// Bessel orders `ν_j` of all retained modes.
    pub fn orders(&self) -> &[f64] {
        &self.nu
    }

    fn check_modes(&self, modes: usize) -> Result<()> {
        if modes == 0 || modes > self.nu.len() {
            return Err(Error::InvalidParameter(format!(
                "mode count {modes} must lie in 1..={}",
                self.nu.len()
            )));
        }
        if self.nu[modes - 1] > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                func: "kernels",
                order: self.nu[modes - 1],
                max: MAX_ORDER,
            });
        }
        Ok(())
    }

    /// `(xx′)^{−(n−2)/2}`.
    fn density_factor(&self, pair: &PointPair) -> f64 {
        (pair.x * pair.x_prime).powf(-0.5 * (self.n as f64 - 2.0))
    }

    /// `(iπ/2)(xx′)^{−(n−2)/2} Σ_{j<J} Π_j(γ) J_{ν_j}(λx_<) H_{ν_j}(λx_>)`
    /// with `H = H¹` outgoing and `H = H²` incoming.
    pub fn resolvent(&self, lambda: f64, pair: PointPair, modes: usize, sign: Sign) -> Result<KernelSample> {
        check_lambda(lambda)?;
        pair.validate_on(&self.cs)?;
        self.check_modes(modes)?;
        let (lo, hi) = (pair.x.min(pair.x_prime), pair.x.max(pair.x_prime));
        let proj = self.cs.projection_kernels(modes, pair.gamma);
        let mut terms = Vec::with_capacity(modes);
        for (j, &nu) in self.nu[..modes].iter().enumerate() {
            let jv = bessel_j(nu, lambda * lo)?;
            if jv == 0.0 || proj[j] == 0.0 {
                terms.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let h = cylinder(nu, lambda * hi)?.h1();
            let t = proj[j] * jv * h;
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::Domain {
                    func: "kernels::resolvent",
                    detail: format!("mode {j} overflows at λx_> = {}", lambda * hi),
                });
            }
            terms.push(t);
        }
        let sum: Complex64 = terms.iter().sum();
        let out = Complex64::new(0.0, 0.5 * PI) * self.density_factor(&pair) * sum;
        let (value, kind) = match sign {
            Sign::Out => (out, KernelKind::ResolventOut),
            Sign::In => (out.conj(), KernelKind::ResolventIn),
        };
        let abs: Vec<f64> = terms.iter().map(|t| t.norm()).collect();
        Ok(KernelSample {
            lambda,
            pair,
            value,
            kind,
            diagonal: lambda * pair.distance() < DIAGONAL_THRESHOLD,
            tail: tail_ratio(&abs),
        })
    }

    /// The individual mode terms `λ(xx′)^{−(n−2)/2} Π_j J_{ν_j}(λx) J_{ν_j}(λx′)`.
    pub fn spectral_measure_terms(&self, lambda: f64, pair: PointPair, modes: usize) -> Result<Vec<f64>> {
        check_lambda(lambda)?;
        pair.validate_on(&self.cs)?;
        self.check_modes(modes)?;
        let proj = self.cs.projection_kernels(modes, pair.gamma);
        let ja = bessel_j_modes(&self.nu[..modes], lambda * pair.x)?;
        let jb = bessel_j_modes(&self.nu[..modes], lambda * pair.x_prime)?;
        let scale = lambda * self.density_factor(&pair);
        // ja·jb first keeps the kernel bitwise symmetric in z ↔ z′
        Ok((0..modes).map(|j| scale * proj[j] * (ja[j] * jb[j])).collect())
    }

    /// `dE(λ; z, z′) = λ(xx′)^{−(n−2)/2} Σ_{j<J} Π_j(γ) J_{ν_j}(λx) J_{ν_j}(λx′)`.
    pub fn spectral_measure(&self, lambda: f64, pair: PointPair, modes: usize) -> Result<KernelSample> {
        let terms = self.spectral_measure_terms(lambda, pair, modes)?;
        let value: f64 = terms.iter().sum();
        let abs: Vec<f64> = terms.iter().map(|t| t.abs()).collect();
        Ok(KernelSample {
            lambda,
            pair,
            value: Complex64::new(value, 0.0),
            kind: KernelKind::SpectralMeasure,
            diagonal: lambda * pair.distance() < DIAGONAL_THRESHOLD,
            tail: tail_ratio(&abs),
        })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "spectral parameter must be positive, got {lambda}"
        )));
    }
    Ok(())
}

fn tail_ratio(abs: &[f64]) -> f64 {
    let total: f64 = abs.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let k = abs.len().saturating_sub(2);
    abs[k..].iter().fold(0.0f64, |m, v| m.max(*v)) / total
}

/// `J_{ν_j}(x)` for every order in `orders`; uses one downward recurrence
/// when the orders are unit spaced.
pub fn bessel_j_modes(orders: &[f64], x: f64) -> Result<Vec<f64>> {
    if orders.is_empty() {
        return Ok(Vec::new());
    }
    let unit_spaced = orders
        .iter()
        .enumerate()
        .all(|(k, &nu)| (nu - orders[0] - k as f64).abs() < 1e-12);
    if unit_spaced {
        bessel_j_ladder(orders[0], orders.len(), x)
    } else {
        orders.iter().map(|&nu| bessel_j(nu, x)).collect()
    }
}

/// Outgoing or incoming resolvent kernel of the product cone.
pub fn resolvent_kernel(
    n: usize,
    cs: &CrossSection,
    lambda: f64,
    pair: PointPair,
    modes: usize,
    sign: Sign,
) -> Result<KernelSample> {
    ProductCone::new(n, cs.clone())?.resolvent(lambda, pair, modes, sign)
}

/// Spectral measure kernel of the product cone.
pub fn spectral_measure_kernel(
    n: usize,
    cs: &CrossSection,
    lambda: f64,
    pair: PointPair,
    modes: usize,
) -> Result<KernelSample> {
    ProductCone::new(n, cs.clone())?.spectral_measure(lambda, pair, modes)
}

/// `|dE|·(1+λd)^{(n−1)/2}·λ^{−(n−1)}·(xx′)^{(n−1)/2}`: the spectral measure
/// in the half-density trivialization, divided by its predicted amplitude.
pub fn amplitude_ratio(n: usize, lambda: f64, measure: f64, pair: &PointPair, distance: f64) -> f64 {
    let h = 0.5 * (n as f64 - 1.0);
    measure.abs()
        * (1.0 + lambda * distance).powf(h)
        * lambda.powf(-(n as f64 - 1.0))
        * (pair.x * pair.x_prime).powf(h)
}

/// Writes samples as CSV with columns `λ, x, y_gamma, x′, value_re,
/// value_im, kind`. Floats use a fixed 17-digit exponent format.
pub fn write_csv<W: Write>(out: &mut W, samples: &[KernelSample]) -> io::Result<()> {
    writeln!(out, "lambda,x,y_gamma,x_prime,value_re,value_im,kind")?;
    for s in samples {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.lambda,
            s.pair.x,
            s.pair.gamma,
            s.pair.x_prime,
            s.value.re,
            s.value.im,
            s.kind.as_str()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r3() -> ProductCone {
        ProductCone::new(3, CrossSection::round_sphere(2, 40).unwrap()).unwrap()
    }

    #[test]
    fn single_mode_closed_form() {
        let s = r3()
            .resolvent(1.0, PointPair::new(1.0, 1.0, 0.3), 1, Sign::Out)
            .unwrap();
        // (iπ/2)(1/4π)·J_{1/2}(1)·H¹_{1/2}(1) with J = √(2/π) sin 1, H¹ = −i√(2/π) e^{i}
        let want = 1f64.sin() / (4.0 * PI) * Complex64::from_polar(1.0, 1.0);
        assert!((s.value - want).norm() < 1e-14);
    }

    #[test]
    fn incoming_is_conjugate() {
        let c = r3();
        let p = PointPair::new(0.5, 1.5, 1.0);
        let a = c.resolvent(2.0, p, 40, Sign::Out).unwrap();
        let b = c.resolvent(2.0, p, 40, Sign::In).unwrap();
        assert_eq!(a.value.conj(), b.value);
        assert_eq!(b.kind, KernelKind::ResolventIn);
    }

    #[test]
    fn flags_diagonal_pairs() {
        let s = r3().resolvent(1.0, PointPair::new(1.0, 1.0, 0.0), 40, Sign::Out).unwrap();
        assert!(s.diagonal);
        assert!(!r3().resolvent(1.0, PointPair::new(1.0, 2.0, 0.0), 40, Sign::Out).unwrap().diagonal);
    }

    #[test]
    fn rejects_bad_input() {
        let c = r3();
        assert!(c.resolvent(0.0, PointPair::new(1.0, 1.0, 0.0), 1, Sign::Out).is_err());
        assert!(c.resolvent(1.0, PointPair::new(-1.0, 1.0, 0.0), 1, Sign::Out).is_err());
        assert!(c.resolvent(1.0, PointPair::new(1.0, 1.0, 4.0), 1, Sign::Out).is_err());
        assert!(c.spectral_measure(1.0, PointPair::new(1.0, 1.0, 0.0), 41).is_err());
    }

    #[test]
    fn ladder_and_direct_orders_agree() {
        let orders: Vec<f64> = (0..10).map(|k| 0.5 + k as f64).collect();
        let ladder = bessel_j_modes(&orders, 3.3).unwrap();
        for (nu, v) in orders.iter().zip(&ladder) {
            assert!((bessel_j(*nu, 3.3).unwrap() - v).abs() < 1e-13);
        }
    }

    #[test]
    fn csv_layout() {
        let s = r3().spectral_measure(1.0, PointPair::new(1.0, 2.0, 0.5), 10).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &[s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "lambda,x,y_gamma,x_prime,value_re,value_im,kind");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 7);
        assert_eq!(row[6], "spectral_measure");
    }
}
