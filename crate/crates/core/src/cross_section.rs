//! Spectral data of the cone's cross-section and the mode constants derived
//! from it, plus the conformal profiles `a(x)` of non-product cones.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

/// Closed-form model cross-sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossSectionKind {
    /// Circle of the given circumference.
    Circle { length: f64 },
    /// Unit round sphere `Sᵐ`.
    RoundSphere { dim: usize },
}

/// The first `J` distinct eigenvalues `σ_j²` of the cross-section Laplacian
/// together with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    kind: CrossSectionKind,
    eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl CrossSection {
    /// Builds the truncated spectrum (`build_spectrum`).
    pub fn new(kind: CrossSectionKind, modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter(
                "cross-section truncation J must be at least 1".into(),
            ));
        }
        let (eigenvalues, multiplicities) = match kind {
            CrossSectionKind::Circle { length } => {
                if !(length > 0.0) || !length.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "circle length must be positive, got {length}"
                    )));
                }
                (0..modes)
                    .map(|k| {
                        let s = 2.0 * PI * k as f64 / length;
                        (s * s, if k == 0 { 1 } else { 2 })
                    })
                    .unzip()
            }
            CrossSectionKind::RoundSphere { dim } => {
                if dim == 0 {
                    return Err(Error::InvalidParameter(
                        "sphere dimension must be at least 1".into(),
                    ));
                }
                if dim == 1 {
                    return Self::new(CrossSectionKind::Circle { length: 2.0 * PI }, modes)
                        .map(|cs| Self { kind, ..cs });
                }
                (0..modes)
                    .map(|l| {
                        let lf = l as f64;
                        (lf * (lf + dim as f64 - 1.0), sphere_multiplicity(dim, l))
                    })
                    .unzip()
            }
        };
        Ok(Self {
            kind,
            eigenvalues,
            multiplicities,
        })
    }

    pub fn circle(length: f64, modes: usize) -> Result<Self> {
        Self::new(CrossSectionKind::Circle { length }, modes)
    }

    pub fn round_sphere(dim: usize, modes: usize) -> Result<Self> {
        Self::new(CrossSectionKind::RoundSphere { dim }, modes)
    }

    pub fn kind(&self) -> CrossSectionKind {
        self.kind
    }

    /// Number of distinct eigenvalues retained.
    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Dimension of the cross-section manifold.
    pub fn dim(&self) -> usize {
        match self.kind {
            CrossSectionKind::Circle { .. } => 1,
            CrossSectionKind::RoundSphere { dim } => dim,
        }
    }

    pub fn volume(&self) -> f64 {
        match self.kind {
            CrossSectionKind::Circle { length } => length,
            CrossSectionKind::RoundSphere { dim } => sphere_volume(dim),
        }
    }

    /// Diameter of the cross-section: `L/2` for a circle, `π` for a sphere.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            CrossSectionKind::Circle { length } => 0.5 * length,
            CrossSectionKind::RoundSphere { .. } => PI,
        }
    }

    /// Kernel of the projection onto the `j`-th eigenspace at two points a
    /// geodesic distance `gamma` apart.
    pub fn projection_kernel(&self, j: usize, gamma: f64) -> Result<f64> {
        if j >= self.modes() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.modes(),
            });
        }
        Ok(self.projection_kernels(j + 1, gamma)[j])
    }

    /// Projection kernels for all `j < count` at distance `gamma`.
    pub fn projection_kernels(&self, count: usize, gamma: f64) -> Vec<f64> {
        let count = count.min(self.modes());
        match self.kind {
            CrossSectionKind::Circle { length } => circle_kernels(length, count, gamma),
            CrossSectionKind::RoundSphere { dim: 1 } => circle_kernels(2.0 * PI, count, gamma),
            CrossSectionKind::RoundSphere { dim } => sphere_kernels(dim, count, gamma),
        }
    }
}

fn circle_kernels(length: f64, count: usize, gamma: f64) -> Vec<f64> {
    (0..count)
        .map(|k| {
            if k == 0 {
                1.0 / length
            } else {
                2.0 / length * (2.0 * PI * k as f64 * gamma / length).cos()
            }
        })
        .collect()
}

/// `(2l+m−1)/((m−1)|Sᵐ|) · C_l^{(m−1)/2}(cos γ)` by the Gegenbauer recurrence.
fn sphere_kernels(dim: usize, count: usize, gamma: f64) -> Vec<f64> {
    let m = dim as f64;
    let alpha = 0.5 * (m - 1.0);
    let t = gamma.cos();
    let vol = sphere_volume(dim);
    let mut out = Vec::with_capacity(count);
    let (mut c_prev, mut c_cur) = (0.0, 1.0);
    for l in 0..count {
        let lf = l as f64;
        if l == 1 {
            c_prev = c_cur;
            c_cur = 2.0 * alpha * t;
        } else if l > 1 {
            let next = (2.0 * t * (lf + alpha - 1.0) * c_cur - (lf + 2.0 * alpha - 2.0) * c_prev) / lf;
            c_prev = c_cur;
            c_cur = next;
        }
        out.push((2.0 * lf + m - 1.0) / ((m - 1.0) * vol) * c_cur);
    }
    out
}

/// `(2l+m−1)(l+m−2)! / (l!(m−1)!)`.
fn sphere_multiplicity(dim: usize, l: usize) -> usize {
    if l == 0 {
        return 1;
    }
    let m = dim as f64;
    let lf = l as f64;
    let log = ln_gamma(lf + m - 1.0) - ln_gamma(lf + 1.0) - ln_gamma(m);
    ((2.0 * lf + m - 1.0) * log.exp()).round() as usize
}

pub fn sphere_volume(dim: usize) -> f64 {
    let k = (dim + 1) as f64 * 0.5;
    2.0 * PI.powf(k) / gamma(k)
}

/// Bessel orders `ν_j` and the imaginary parts of the indicial roots.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeConstants {
    pub n: usize,
    pub nu: Vec<f64>,
    pub indicial_im: Vec<f64>,
}

/// `ν_j = √((n/2−1)² + σ_j²)` and `Im λ_j = √((1−n/2)² + σ_j²)`.
pub fn mode_constants(n: usize, cs: &CrossSection) -> Result<ModeConstants> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cone dimension must be at least 3, got {n}"
        )));
    }
    let half = n as f64 / 2.0;
    let nu = cs
        .eigenvalues()
        .iter()
        .map(|s2| ((half - 1.0).powi(2) + s2).sqrt())
        .collect();
    let indicial_im = cs
        .eigenvalues()
        .iter()
        .map(|s2| ((1.0 - half).powi(2) + s2).sqrt())
        .collect();
    Ok(ModeConstants { n, nu, indicial_im })
}

/// Named analytic families for the conformal factor `a(x)`, frozen at
/// `a_inf = a(x_match)` beyond the matching radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileFamily {
    /// `a ≡ 1`: the product cone.
    Constant,
    /// `a(x) = exp(c·x)`.
    Exponential { rate: f64 },
    /// `a(x) = 1 + A·(3t² − 2t³)`, `t = x / x_match`; C¹ at both ends.
    Smoothstep { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalProfile {
    family: ProfileFamily,
    x_match: f64,
}

impl ConformalProfile {
    pub fn new(family: ProfileFamily, x_match: f64) -> Result<Self> {
        if !(x_match > 0.0) || !x_match.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "matching radius must be positive, got {x_match}"
            )));
        }
        match family {
            ProfileFamily::Constant => {}
            ProfileFamily::Exponential { rate } => {
                if !rate.is_finite() {
                    return Err(Error::InvalidParameter("exponential rate must be finite".into()));
                }
            }
            ProfileFamily::Smoothstep { amplitude } => {
                if !(amplitude > -1.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "smoothstep amplitude must exceed -1, got {amplitude}"
                    )));
                }
            }
        }
        Ok(Self { family, x_match })
    }

    pub fn product() -> Self {
        Self {
            family: ProfileFamily::Constant,
            x_match: 1.0,
        }
    }

    pub fn exponential(rate: f64, x_match: f64) -> Result<Self> {
        Self::new(ProfileFamily::Exponential { rate }, x_match)
    }

    pub fn family(&self) -> ProfileFamily {
        self.family
    }

    pub fn x_match(&self) -> f64 {
        self.x_match
    }

    pub fn is_product(&self) -> bool {
        match self.family {
            ProfileFamily::Constant => true,
            ProfileFamily::Exponential { rate } => rate == 0.0,
            ProfileFamily::Smoothstep { amplitude } => amplitude == 0.0,
        }
    }

    /// `(a, a′, a″)` at `x ≥ 0`. Beyond `x_match` the derivatives vanish.
    pub fn derivatives(&self, x: f64) -> (f64, f64, f64) {
        let xc = x.min(self.x_match);
        let inside = x < self.x_match;
        let (a, ap, app) = match self.family {
            ProfileFamily::Constant => (1.0, 0.0, 0.0),
            ProfileFamily::Exponential { rate } => {
                let a = (rate * xc).exp();
                (a, rate * a, rate * rate * a)
            }
            ProfileFamily::Smoothstep { amplitude } => {
                let t = xc / self.x_match;
                let xm = self.x_match;
                (
                    1.0 + amplitude * t * t * (3.0 - 2.0 * t),
                    amplitude * 6.0 * t * (1.0 - t) / xm,
                    amplitude * (6.0 - 12.0 * t) / (xm * xm),
                )
            }
        };
        if inside {
            (a, ap, app)
        } else {
            (a, 0.0, 0.0)
        }
    }

    pub fn a(&self, x: f64) -> f64 {
        self.derivatives(x).0
    }

    pub fn a_inf(&self) -> f64 {
        self.a(self.x_match)
    }

    /// Error function `e(x) = (n−1) a′(x)/a(x)`.
    pub fn error_function(&self, n: usize, x: f64) -> f64 {
        let (a, ap, _) = self.derivatives(x);
        (n as f64 - 1.0) * ap / a
    }
}

/// Result of [`stability_constant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstant {
    /// `sup_{x ∈ [0, x_match]} x·e(x)`.
    pub value: f64,
    /// Where the supremum is attained on the finest grid.
    pub argmax: f64,
}

/// Grid search for `sup x·e(x)` with three refinement levels, the finest
/// at step `x_match/4096`. Rejects profiles with a value `≥ n−1`.
pub fn stability_constant(n: usize, profile: &ConformalProfile) -> Result<StabilityConstant> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cone dimension must be at least 3, got {n}"
        )));
    }
    let xm = profile.x_match();
    let f = |x: f64| x * profile.error_function(n, x);
    let (mut lo, mut hi) = (0.0, xm);
    let mut best = (f(0.0), 0.0);
    for step_div in [64.0, 512.0, 4096.0] {
        let h = xm / step_div;
        let steps = ((hi - lo) / h).round() as usize;
        for i in 0..=steps {
            let x = (lo + i as f64 * h).min(xm);
            // evaluate just inside the matching radius at the right end
            let v = if x >= xm { f(xm * (1.0 - 1e-15)) } else { f(x) };
            if v > best.0 {
                best = (v, x);
            }
        }
        lo = (best.1 - h).max(0.0);
        hi = (best.1 + h).min(xm);
    }
    let limit = n as f64 - 1.0;
    if best.0 >= limit {
        return Err(Error::StabilityViolation {
            value: best.0,
            limit,
        });
    }
    Ok(StabilityConstant {
        value: best.0,
        argmax: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_spectrum() {
        let cs = CrossSection::circle(2.0 * PI, 3).unwrap();
        assert_eq!(cs.eigenvalues(), &[0.0, 1.0, 4.0]);
        assert_eq!(cs.multiplicities(), &[1, 2, 2]);
    }

    #[test]
    fn two_sphere_spectrum() {
        let cs = CrossSection::round_sphere(2, 3).unwrap();
        assert_eq!(cs.eigenvalues(), &[0.0, 2.0, 6.0]);
        assert_eq!(cs.multiplicities(), &[1, 3, 5]);
    }

    #[test]
    fn one_sphere_is_unit_circle() {
        let a = CrossSection::round_sphere(1, 6).unwrap();
        let b = CrossSection::circle(2.0 * PI, 6).unwrap();
        assert_eq!(a.eigenvalues(), b.eigenvalues());
        assert_eq!(a.multiplicities(), b.multiplicities());
    }

    #[test]
    fn higher_sphere_multiplicities() {
        // S³: (l+1)²
        let cs = CrossSection::round_sphere(3, 6).unwrap();
        for (l, &m) in cs.multiplicities().iter().enumerate() {
            assert_eq!(m, (l + 1) * (l + 1));
        }
    }

    #[test]
    fn invalid_spectra() {
        assert!(CrossSection::circle(0.0, 3).is_err());
        assert!(CrossSection::circle(-1.0, 3).is_err());
        assert!(CrossSection::circle(1.0, 0).is_err());
        assert!(CrossSection::round_sphere(0, 3).is_err());
    }

    #[test]
    fn projection_kernel_values() {
        let s2 = CrossSection::round_sphere(2, 4).unwrap();
        assert!((s2.projection_kernel(0, 1.234).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((s2.projection_kernel(1, 0.0).unwrap() - 3.0 / (4.0 * PI)).abs() < 1e-15);
        let c = CrossSection::circle(2.0 * PI, 3).unwrap();
        assert!(c.projection_kernel(1, PI / 2.0).unwrap().abs() < 1e-16);
        assert!(matches!(
            s2.projection_kernel(4, 0.0),
            Err(Error::IndexOutOfRange { index: 4, len: 4 })
        ));
    }

    #[test]
    fn projection_trace_is_multiplicity() {
        for cs in [
            CrossSection::round_sphere(2, 8).unwrap(),
            CrossSection::round_sphere(4, 8).unwrap(),
            CrossSection::circle(3.0, 8).unwrap(),
        ] {
            let k = cs.projection_kernels(8, 0.0);
            for (j, v) in k.iter().enumerate() {
                let m = cs.multiplicities()[j] as f64;
                assert!((v * cs.volume() - m).abs() < 1e-10 * m);
            }
        }
    }

    #[test]
    fn mode_constants_three_dimensional() {
        let cs = CrossSection::round_sphere(2, 5).unwrap();
        let mc = mode_constants(3, &cs).unwrap();
        for (l, (&nu, &im)) in mc.nu.iter().zip(&mc.indicial_im).enumerate() {
            assert!((nu - (l as f64 + 0.5)).abs() < 1e-14);
            assert_eq!(nu, im);
        }
        assert!(mode_constants(2, &cs).is_err());
    }

    #[test]
    fn mode_constants_four_dimensional_ground_state() {
        let cs = CrossSection::circle(2.0 * PI, 4).unwrap();
        let mc = mode_constants(4, &cs).unwrap();
        assert_eq!(mc.nu[0], 1.0);
        assert!(mc.nu.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn stability_of_product_profile_is_zero() {
        let s = stability_constant(3, &ConformalProfile::product()).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn stability_of_exponential_profiles() {
        let p = ConformalProfile::exponential(0.1, 1.0).unwrap();
        assert!((p.error_function(3, 0.4) - 0.2).abs() < 1e-15);
        let s = stability_constant(3, &p).unwrap();
        assert!((s.value - 0.2).abs() < 1e-12);
        assert!((s.argmax - 1.0).abs() < 1e-12);

        let p = ConformalProfile::exponential(-0.1, 1.0).unwrap();
        let s = stability_constant(3, &p).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn stability_violation_rejected() {
        let p = ConformalProfile::exponential(1.5, 1.0).unwrap();
        assert!(matches!(
            stability_constant(3, &p),
            Err(Error::StabilityViolation { .. })
        ));
    }

    #[test]
    fn smoothstep_sup_found_in_interior() {
        // x·e(x) = 2·x·a′/a peaks strictly inside (0, x_match)
        let p = ConformalProfile::new(ProfileFamily::Smoothstep { amplitude: 0.3 }, 1.0).unwrap();
        let s = stability_constant(3, &p).unwrap();
        let brute = (0..=200_000)
            .map(|i| {
                let x = i as f64 / 200_000.0;
                x * p.error_function(3, x.min(1.0 - 1e-15))
            })
            .fold(f64::MIN, f64::max);
        assert!(s.argmax > 0.1 && s.argmax < 0.99);
        assert!((s.value - brute).abs() < 1e-6, "{} vs {brute}", s.value);
    }

    #[test]
    fn profile_invariants() {
        let p = ConformalProfile::exponential(0.3, 0.5).unwrap();
        assert_eq!(p.a(0.0), 1.0);
        assert_eq!(p.a(0.7), p.a_inf());
        assert_eq!(p.error_function(3, 0.7), 0.0);
        assert!(ConformalProfile::new(ProfileFamily::Smoothstep { amplitude: -1.0 }, 1.0).is_err());
        assert!(ConformalProfile::exponential(0.1, 0.0).is_err());
    }
}
