//! Per-mode radial Green functions of conformally perturbed cones
//! `dx² + x²a(x)²h₀`, by numerical integration of the separated ODE.
//!
//! For the eigenvalue `σ²` of `h₀` the radial operator is
//!
//! ```text
//! L u = −u″ − ((n−1)/x + e(x)) u′ + σ²/(a²x²) u,   e = (n−1)a′/a,
//! ```
//!
//! symmetric with respect to `w(x) dx`, `w = x^{n−1}a^{n−1}`. Beyond the
//! matching radius `a ≡ a_inf` and the outgoing solution is the exact
//! Hankel function `x^{−(n−2)/2} H¹_{ν̃}(λx)`.
//!
//! Regular solutions are normalized so that beyond the matching radius
//! `u_reg = 2 Re(c h₊)` with `|c| = 1`; the mode's spectral measure is then
//! `λ u_reg(x) u_reg(x′) / (4 a_inf^{n−1})`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bessel::{cylinder, MAX_ORDER};
use crate::cone::Cone;
use crate::cross_section::{ConformalProfile, CrossSection};
use crate::error::{Error, Result};
use crate::kernels::PointPair;
use crate::ode::Dopri5;

/// Relative tolerance of every radial integration.
pub const RTOL: f64 = 1e-9;
/// Largest accepted relative drift of the weighted Wronskian.
pub const MAX_DRIFT: f64 = 1e-6;

/// One separated mode `L − λ²` of the radial operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOperatorSpec {
    pub n: usize,
    pub sigma2: f64,
    pub profile: ConformalProfile,
    pub lambda: f64,
}

impl RadialOperatorSpec {
    pub fn new(n: usize, sigma2: f64, profile: ConformalProfile, lambda: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "cone dimension must be at least 3, got {n}"
            )));
        }
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!("σ² must be non-negative, got {sigma2}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("λ must be positive, got {lambda}")));
        }
        let spec = Self {
            n,
            sigma2,
            profile,
            lambda,
        };
        let order = spec.nu().max(spec.nu_outer());
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge {
                func: "radial::solve_pair",
                order,
                max: MAX_ORDER,
            });
        }
        Ok(spec)
    }

    fn half(&self) -> f64 {
        0.5 * (self.n as f64 - 2.0)
    }

    /// Bessel order at the tip, `√((n/2−1)² + σ²)`.
    pub fn nu(&self) -> f64 {
        (self.half().powi(2) + self.sigma2).sqrt()
    }

    /// Bessel order beyond the matching radius, `√((n/2−1)² + σ²/a_inf²)`.
    pub fn nu_outer(&self) -> f64 {
        (self.half().powi(2) + self.sigma2 / self.profile.a_inf().powi(2)).sqrt()
    }

    /// Frobenius exponent `ν − (n−2)/2` of the regular solution.
    pub fn exponent(&self) -> f64 {
        self.nu() - self.half()
    }

    pub fn weight(&self, x: f64) -> f64 {
        (x * self.profile.a(x)).powi(self.n as i32 - 1)
    }

    /// `(p, q)` with `L u = −u″ − p u′ + q u`; `inside` selects the
    /// one-sided limit at the matching radius.
    fn coefficients(&self, x: f64, inside: bool) -> (f64, f64) {
        let (a, ap, _) = self.side_derivatives(x, inside);
        let nm1 = self.n as f64 - 1.0;
        (nm1 / x + nm1 * ap / a, self.sigma2 / (a * a * x * x))
    }

    fn side_derivatives(&self, x: f64, inside: bool) -> (f64, f64, f64) {
        let xm = self.profile.x_match();
        if inside {
            self.profile.derivatives(x.min(xm * (1.0 - 1e-15)))
        } else {
            self.profile.derivatives(x.max(xm))
        }
    }

    /// `(L − λ²)u` from values of `u, u′, u″`.
    pub fn residual(&self, x: f64, u: Complex64, up: Complex64, upp: Complex64) -> Complex64 {
        let (p, q) = self.coefficients(x, x < self.profile.x_match());
        -upp - p * up + (q - self.lambda * self.lambda) * u
    }

    /// `h₊ = x^{−(n−2)/2} H¹_{ν̃}(λx)` and its derivative, for `x ≥ x_match`.
    fn outgoing_exact(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let ev = cylinder(self.nu_outer(), self.lambda * x)?;
        let pw = x.powf(-self.half());
        let h = ev.h1();
        let hp = self.lambda * ev.h1_prime() - self.half() / x * h;
        Ok((pw * h, pw * hp))
    }

    /// Frobenius data `(1, c₁, c₂)` of `v = u/x^s` at the tip.
    fn frobenius(&self) -> (f64, f64) {
        let nm1 = self.n as f64 - 1.0;
        let (_, a1, a2) = self.profile.derivatives(0.0);
        let s = self.exponent();
        let big_a = 2.0 * self.nu() + 1.0;
        let e0 = nm1 * a1;
        let e1 = nm1 * (a2 - a1 * a1);
        let g0 = 2.0 * self.sigma2 * a1;
        let g1 = -self.sigma2 * (3.0 * a1 * a1 - a2);
        let c1 = -(e0 * s + g0) / big_a;
        let c2 = -(e0 * c1 + e1 * s + g1 + self.lambda.powi(2) + (e0 * s + g0) * c1) / (2.0 * (big_a + 1.0));
        (c1, c2)
    }

    /// Regular solution `(u, u′)` at ascending `stops`, started at `x0`.
    fn regular_at(&self, stops: &[f64], x0: f64) -> Result<Vec<(f64, f64)>> {
        let xm = self.profile.x_match();
        let s = self.exponent();
        let lam2 = self.lambda * self.lambda;
        let nm1 = self.n as f64 - 1.0;
        let big_a = 2.0 * self.nu() + 1.0;
        let rhs = |inside: bool| {
            move |x: f64, y: &[f64; 2]| {
                let (a, ap, _) = self.side_derivatives(x, inside);
                let e = nm1 * ap / a;
                let g = self.sigma2 * (1.0 - 1.0 / (a * a));
                let w = -(big_a / x + e) * y[1] - (e * s / x + g / (x * x) + lam2) * y[0];
                [y[1], w]
            }
        };
        let (c1, c2) = self.frobenius();
        let v0 = [1.0 + x0 * (c1 + x0 * c2), c1 + 2.0 * c2 * x0];
        let ode = Dopri5::with_rtol(RTOL);

        let mut inner: Vec<f64> = stops.iter().copied().filter(|&x| x < xm).collect();
        inner.push(xm);
        let vin = ode.solve("radial::solve_pair", rhs(true), x0, v0, &inner)?;
        let at_match = *vin.last().expect("matching radius is a stop");

        let to_u = |x: f64, v: &[f64; 2]| {
            let sc = (x / xm).powf(s);
            (sc * v[0], sc * (v[1] + s * v[0] / x))
        };
        let (um, upm) = to_u(xm, &at_match);
        let (h, hp) = self.outgoing_exact(xm)?;
        // c = (u h̄′ − u′ h̄) / (h h̄′ − h′ h̄); the denominator is the closed-form
        // Wronskian −4i x^{−(n−2)}/(πx), which cannot overflow
        let denom = Complex64::new(0.0, -4.0 * xm.powf(-2.0 * self.half()) / (PI * xm));
        let c = (um * hp.conj() - upm * h.conj()) / denom;
        let norm = c.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::IntegrationFailure {
                op: "radial::solve_pair",
                detail: format!("regular solution degenerate at the matching radius (|c| = {norm})"),
            });
        }
        let phase = c / norm;
        let mut vin_iter = vin.iter();
        let mut out = Vec::with_capacity(stops.len());
        for &x in stops {
            if x < xm {
                let (u, up) = to_u(x, vin_iter.next().expect("one state per stop"));
                out.push((u / norm, up / norm));
            } else {
                // a ≡ a_inf here: u_reg = 2 Re(c h₊) exactly
                let (h, hp) = self.outgoing_exact(x)?;
                out.push((2.0 * (phase * h).re, 2.0 * (phase * hp).re));
            }
        }
        Ok(out)
    }

    /// Outgoing solution `(u, u′)` at `stops` (any order).
    fn outgoing_at(&self, stops: &[f64]) -> Result<Vec<(Complex64, Complex64)>> {
        let xm = self.profile.x_match();
        let lam2 = self.lambda * self.lambda;
        let mut inner: Vec<(usize, f64)> = stops
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, x)| x < xm)
            .collect();
        inner.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut out = vec![(Complex64::default(), Complex64::default()); stops.len()];
        for (i, &x) in stops.iter().enumerate() {
            if x >= xm {
                out[i] = self.outgoing_exact(x)?;
            }
        }
        if inner.is_empty() {
            return Ok(out);
        }
        let (h, hp) = self.outgoing_exact(xm)?;
        let rhs = |x: f64, y: &[f64; 4]| {
            let (p, q) = self.coefficients(x, true);
            let k = q - lam2;
            [y[2], y[3], -p * y[2] + k * y[0], -p * y[3] + k * y[1]]
        };
        let xs: Vec<f64> = inner.iter().map(|p| p.1).collect();
        let states = Dopri5::with_rtol(RTOL).solve("radial::solve_pair", rhs, xm, [h.re, h.im, hp.re, hp.im], &xs)?;
        for ((i, _), y) in inner.iter().zip(states) {
            out[*i] = (Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]));
        }
        Ok(out)
    }

    /// Default starting radius of the regular solution for stops reaching
    /// down to `x_min`.
    fn start_radius(&self, x_min: f64) -> f64 {
        (1e-2 * x_min).min(1e-4 / self.lambda.max(1.0))
    }

    /// `φ(x) = √(λ/(4 a_inf^{n−1})) u_reg(x)` at ascending `radii`; the
    /// mode's spectral measure is `φ(x)φ(x′)`.
    pub fn measure_profile(&self, radii: &[f64]) -> Result<Vec<f64>> {
        let Some(&first) = radii.first() else {
            return Ok(Vec::new());
        };
        let xm = self.profile.x_match();
        let (h, hp) = self.outgoing_exact(xm)?;
        if !(h.norm() < 1e250 && hp.norm().is_finite()) && radii.iter().all(|&x| x <= xm) {
            // evanescent through the whole window: below 1/|h| of the
            // far-field amplitude, which is under the double-precision floor
            return Ok(vec![0.0; radii.len()]);
        }
        let reg = self.regular_at(radii, self.start_radius(first))?;
        let scale = (self.lambda / (4.0 * self.profile.a_inf().powi(self.n as i32 - 1))).sqrt();
        Ok(reg.into_iter().map(|(u, _)| scale * u).collect())
    }
}

/// Regular and outgoing solutions of one mode on a uniform grid.
#[derive(Debug, Clone)]
pub struct RadialSolutionPair {
    pub spec: RadialOperatorSpec,
    pub grid: Vec<f64>,
    pub u_reg: Vec<Complex64>,
    pub u_reg_prime: Vec<Complex64>,
    pub u_out: Vec<Complex64>,
    pub u_out_prime: Vec<Complex64>,
    /// `w(u_reg u_out′ − u_reg′ u_out)` at the node nearest the matching radius.
    pub wronskian: Complex64,
    /// Largest relative deviation of the weighted Wronskian along the grid.
    pub drift: f64,
}

/// Solves one mode on the grid `x_k = k·x_max/grid_size`, `k = 1..=grid_size`.
pub fn solve_pair(spec: &RadialOperatorSpec, x_max: f64, grid_size: usize) -> Result<RadialSolutionPair> {
    if grid_size < 512 {
        return Err(Error::InvalidParameter(format!("grid size {grid_size} below 512")));
    }
    if !(x_max >= spec.profile.x_match()) || !x_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "x_max = {x_max} must reach the matching radius {}",
            spec.profile.x_match()
        )));
    }
    let h = x_max / grid_size as f64;
    let grid: Vec<f64> = (1..=grid_size).map(|k| k as f64 * h).collect();
    let reg = spec.regular_at(&grid, 1e-2 * h)?;
    let out = spec.outgoing_at(&grid)?;
    let u_reg: Vec<Complex64> = reg.iter().map(|r| Complex64::new(r.0, 0.0)).collect();
    let u_reg_prime: Vec<Complex64> = reg.iter().map(|r| Complex64::new(r.1, 0.0)).collect();
    let (u_out, u_out_prime): (Vec<Complex64>, Vec<Complex64>) = out.into_iter().unzip();
    let ws: Vec<Complex64> = grid
        .iter()
        .enumerate()
        .map(|(k, &x)| spec.weight(x) * (u_reg[k] * u_out_prime[k] - u_reg_prime[k] * u_out[k]))
        .collect();
    let k_ref = grid
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - spec.profile.x_match()).abs().total_cmp(&(b.1 - spec.profile.x_match()).abs()))
        .map(|p| p.0)
        .expect("non-empty grid");
    let wronskian = ws[k_ref];
    let drift = ws
        .iter()
        .map(|w| (w - wronskian).norm() / wronskian.norm())
        .fold(0.0, f64::max);
    if !(drift <= MAX_DRIFT) {
        return Err(Error::IntegrationFailure {
            op: "radial::solve_pair",
            detail: format!("Wronskian drift {drift:e} exceeds {MAX_DRIFT:e}"),
        });
    }
    Ok(RadialSolutionPair {
        spec: *spec,
        grid,
        u_reg,
        u_reg_prime,
        u_out,
        u_out_prime,
        wronskian,
        drift,
    })
}

impl RadialSolutionPair {
    fn nearest_node(&self, x: f64) -> Result<usize> {
        let h = self.grid[0];
        let last = *self.grid.last().expect("non-empty grid");
        if !(x >= h * (1.0 - 1e-12) && x <= last * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "x = {x} outside the grid [{h}, {last}]"
            )));
        }
        Ok((((x / h).round() as usize).clamp(1, self.grid.len())) - 1)
    }

    /// Propagates a stored solution from its nearest grid node to `x`.
    fn propagate_from_node(&self, x: f64, u: &[Complex64], up: &[Complex64]) -> Result<(Complex64, Complex64)> {
        let k = self.nearest_node(x)?;
        let x_node = self.grid[k];
        if (x - x_node).abs() <= 1e-14 * x {
            return Ok((u[k], up[k]));
        }
        let spec = &self.spec;
        let xm = spec.profile.x_match();
        let lam2 = spec.lambda * spec.lambda;
        let mut state = [u[k].re, u[k].im, up[k].re, up[k].im];
        let mut from = x_node;
        let mut legs = Vec::new();
        if (x_node - xm) * (x - xm) < 0.0 {
            legs.push(xm);
        }
        legs.push(x);
        for to in legs {
            let inside = from.min(to) < xm;
            let rhs = |t: f64, y: &[f64; 4]| {
                let (p, q) = spec.coefficients(t, inside);
                let kk = q - lam2;
                [y[2], y[3], -p * y[2] + kk * y[0], -p * y[3] + kk * y[1]]
            };
            state = *Dopri5::with_rtol(RTOL)
                .solve("radial::green_mode", rhs, from, state, &[to])?
                .last()
                .expect("one stop");
            from = to;
        }
        Ok((Complex64::new(state[0], state[1]), Complex64::new(state[2], state[3])))
    }

    pub fn regular(&self, x: f64) -> Result<(Complex64, Complex64)> {
        self.propagate_from_node(x, &self.u_reg, &self.u_reg_prime)
    }

    pub fn outgoing(&self, x: f64) -> Result<(Complex64, Complex64)> {
        self.propagate_from_node(x, &self.u_out, &self.u_out_prime)
    }

    /// Least-squares slope of `log|u_reg|` against `log x` on the ten
    /// smallest grid points.
    pub fn frobenius_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .grid
            .iter()
            .zip(&self.u_reg)
            .take(10)
            .map(|(x, u)| (x.ln(), u.norm().ln()))
            .collect();
        least_squares_slope(&pts)
    }
}

/// `G_j(x, x′) = −u_reg(x_<) u_out(x_>) / W` for `(L_j − λ²)G = δ/w`.
pub fn green_mode(pair: &RadialSolutionPair, x: f64, x_prime: f64) -> Result<Complex64> {
    let scale = pair
        .grid
        .iter()
        .enumerate()
        .map(|(k, &g)| pair.spec.weight(g) * (pair.u_reg[k] * pair.u_out_prime[k]).norm())
        .fold(0.0, f64::max);
    if pair.wronskian.norm() < 1e-12 * scale {
        return Err(Error::Resonance {
            op: "radial::green_mode",
            wronskian: pair.wronskian.norm(),
        });
    }
    let (lo, hi) = (x.min(x_prime), x.max(x_prime));
    let (ur, _) = pair.regular(lo)?;
    let (uo, _) = pair.outgoing(hi)?;
    Ok(-ur * uo / pair.wronskian)
}

/// Resolvent and spectral-measure kernels of a conformally perturbed cone.
#[derive(Debug, Clone)]
pub struct NonProductCone {
    n: usize,
    cs: CrossSection,
    profile: ConformalProfile,
}

/// One mode's contributions at a point pair.
#[derive(Debug, Clone, Copy)]
struct ModeTerm {
    green: Complex64,
    measure: f64,
}

impl NonProductCone {
    pub fn new(n: usize, cs: CrossSection, profile: ConformalProfile) -> Result<Self> {
        crate::cross_section::stability_constant(n, &profile)?;
        Ok(Self { n, cs, profile })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cross_section(&self) -> &CrossSection {
        &self.cs
    }

    pub fn profile(&self) -> &ConformalProfile {
        &self.profile
    }

    pub fn mode_spec(&self, j: usize, lambda: f64) -> Result<RadialOperatorSpec> {
        let sigma2 = *self.cs.eigenvalues().get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.cs.modes(),
        })?;
        RadialOperatorSpec::new(self.n, sigma2, self.profile, lambda)
    }

    fn mode_term(&self, j: usize, lambda: f64, pair: &PointPair) -> Result<ModeTerm> {
        let spec = self.mode_spec(j, lambda)?;
        let (lo, hi) = (pair.x.min(pair.x_prime), pair.x.max(pair.x_prime));
        let stops: Vec<f64> = if lo == hi { vec![lo] } else { vec![lo, hi] };
        let reg = spec.regular_at(&stops, spec.start_radius(lo))?;
        let (u_lo, (u_hi, up_hi)) = (reg[0].0, *reg.last().expect("non-empty"));
        let (uo, uop) = spec.outgoing_at(&[hi])?[0];
        let w = spec.weight(hi) * (u_hi * uop - up_hi * uo);
        if w.norm() < 1e-12 * spec.weight(hi) * (u_hi * uop).norm() {
            return Err(Error::Resonance {
                op: "radial::assemble_nonproduct",
                wronskian: w.norm(),
            });
        }
        let green = -u_lo * uo / w;
        let measure = lambda * u_lo * u_hi / (4.0 * self.profile.a_inf().powi(self.n as i32 - 1));
        Ok(ModeTerm { green, measure })
    }

    /// Outgoing resolvent `Σ Π_j(γ) G_j(x, x′)` and spectral measure
    /// `Σ Π_j(γ) dE_j(x, x′)`; modes run in parallel, summed in order.
    pub fn assemble(&self, lambda: f64, pair: PointPair, modes: usize) -> Result<(Complex64, f64)> {
        check_modes(modes, self.cs.modes())?;
        pair.validate_on(&self.cs)?;
        let proj = self.cs.projection_kernels(modes, pair.gamma);
        let terms: Vec<ModeTerm> = (0..modes)
            .into_par_iter()
            .map(|j| self.mode_term(j, lambda, &pair))
            .collect::<Result<_>>()?;
        let mut r = Complex64::default();
        let mut m = 0.0;
        for (p, t) in proj.iter().zip(&terms) {
            r += p * t.green;
            m += p * t.measure;
        }
        Ok((r, m))
    }

    /// `φ_j(x_k)` with `dE_j(x, x′) = φ_j(x) φ_j(x′)`, for ascending radii.
    pub fn mode_profiles(&self, lambda: f64, radii: &[f64], modes: usize) -> Result<Vec<Vec<f64>>> {
        check_modes(modes, self.cs.modes())?;
        (0..modes)
            .map(|j| self.mode_spec(j, lambda)?.measure_profile(radii))
            .collect()
    }
}

fn check_modes(modes: usize, available: usize) -> Result<()> {
    if modes == 0 || modes > available {
        return Err(Error::InvalidParameter(format!(
            "mode count {modes} must lie in 1..={available}"
        )));
    }
    Ok(())
}

/// Outgoing resolvent and spectral measure of a conformally perturbed cone.
pub fn assemble_nonproduct(
    n: usize,
    cs: &CrossSection,
    profile: &ConformalProfile,
    lambda: f64,
    pair: PointPair,
    modes: usize,
) -> Result<(Complex64, f64)> {
    NonProductCone::new(n, cs.clone(), *profile)?.assemble(lambda, pair, modes)
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Sample points for the amplitude-growth fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePolicy {
    pub radii: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Pairs with `γ > π − antipodal_margin` are skipped.
    pub antipodal_margin: f64,
    /// Largest accepted last-mode share of `Σ|terms|`.
    pub truncation_tol: f64,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        Self {
            radii: (1..=6).map(|k| 0.05 * k as f64).collect(),
            // geometric in γ so that λd ≈ 1 is sampled for every λ in [4, 64]
            gammas: std::iter::once(0.0)
                .chain((0..24).map(|k| 0.04 * 70f64.powf(k as f64 / 23.0)))
                .collect(),
            antipodal_margin: 0.2,
            truncation_tol: 1e-6,
        }
    }
}

/// Result of [`growth_exponent_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub lambdas: Vec<f64>,
    /// `S(λ) = max |dE|(1+λd)^{(n−1)/2}(xx′)^{(n−1)/2}` over the samples.
    pub sup: Vec<f64>,
    pub slope: f64,
}

/// Least-squares slope of `log S(λ)` against `log λ`. Distances use the
/// product-cone formula for every cone.
pub fn growth_exponent_fit(cone: &Cone, lambdas: &[f64], policy: &SamplePolicy, modes: usize) -> Result<GrowthFit> {
    if lambdas.len() < 8 {
        return Err(Error::InvalidParameter(format!(
            "growth fit needs at least 8 values of λ, got {}",
            lambdas.len()
        )));
    }
    let mut radii = policy.radii.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let gammas: Vec<f64> = policy
        .gammas
        .iter()
        .copied()
        .filter(|&g| g <= PI - policy.antipodal_margin)
        .collect();
    let n = cone.n();
    let h = 0.5 * (n as f64 - 1.0);
    let proj: Vec<Vec<f64>> = gammas
        .iter()
        .map(|&g| cone.cross_section().projection_kernels(modes, g))
        .collect();
    let sup: Vec<f64> = lambdas
        .par_iter()
        .map(|&lambda| -> Result<f64> {
            let phi = cone.mode_profiles(lambda, &radii, modes)?;
            let mut best = 0.0f64;
            for (a, &x) in radii.iter().enumerate() {
                for (b, &xp) in radii.iter().enumerate().skip(a) {
                    for (g, &gamma) in gammas.iter().enumerate() {
                        let mut total = 0.0;
                        let mut abs = 0.0;
                        for j in 0..modes {
                            let t = proj[g][j] * phi[j][a] * phi[j][b];
                            total += t;
                            abs += t.abs();
                        }
                        let last = (proj[g][modes - 1] * phi[modes - 1][a] * phi[modes - 1][b]).abs();
                        if abs > 0.0 && last > policy.truncation_tol * abs {
                            return Err(Error::Truncation {
                                op: "radial::growth_exponent_fit",
                                detail: format!(
                                    "last mode carries {:.2e} of the sum at λ={lambda}, x={x}, x'={xp}",
                                    last / abs
                                ),
                            });
                        }
                        let pair = PointPair::new(x, xp, gamma);
                        let s = total.abs() * (1.0 + lambda * pair.distance()).powf(h) * (x * xp).powf(h);
                        best = best.max(s);
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let pts: Vec<(f64, f64)> = lambdas.iter().zip(&sup).map(|(l, s)| (l.ln(), s.ln())).collect();
    Ok(GrowthFit {
        lambdas: lambdas.to_vec(),
        sup,
        slope: least_squares_slope(&pts),
    })
}

/// Writes `mode, x, re_u_reg, im_u_reg, re_u_out, im_u_out` rows.
pub fn write_csv<W: Write>(out: &mut W, pairs: &[(usize, &RadialSolutionPair)]) -> io::Result<()> {
    writeln!(out, "mode,x,re_u_reg,im_u_reg,re_u_out,im_u_out")?;
    for (j, p) in pairs {
        for (k, x) in p.grid.iter().enumerate() {
            writeln!(
                out,
                "{j},{x:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.u_reg[k].re, p.u_reg[k].im, p.u_out[k].re, p.u_out[k].im
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_coefficients_of_product_case() {
        // v = Γ(ν+1)(2/λx)^ν J_ν(λx) = 1 − (λx)²/(4(ν+1)) + …
        let spec = RadialOperatorSpec::new(3, 2.0, ConformalProfile::product(), 2.0).unwrap();
        let (c1, c2) = spec.frobenius();
        assert_eq!(c1, 0.0);
        assert!((c2 + 4.0 / (4.0 * 2.5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_large_orders() {
        let r = RadialOperatorSpec::new(3, 61.0 * 62.0, ConformalProfile::product(), 1.0);
        assert!(matches!(r, Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn slope_of_exact_line() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert!((least_squares_slope(&pts) - 2.0).abs() < 1e-15);
    }
}
