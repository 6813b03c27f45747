//! Schrödinger propagator `e^{itΔ} = ∫ e^{itλ²} dE(λ)` on cones, with
//! Gaussian damping `e^{−ελ²}`, and the dispersive and Strichartz
//! measurement harnesses built on it.
//!
//! Point kernels use product integration: `dE` is sampled at Gauss–Legendre
//! nodes of coarse λ-panels and the factor `e^{(it−ε)λ²}χ(λ)` is integrated
//! against the Lagrange basis of each panel on a fine sub-grid resolving the
//! phase. The spectral samples are then shared by every `t`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::kernels::PointPair;
use crate::quadrature::GaussLegendre;
use crate::radial::least_squares_slope;

const ORDER: usize = 8;
/// `e^{−ελ²} = e^{−23}` at the default spectral cutoff.
const DAMPING_EXPONENT: f64 = 23.0;

fn bump_fn(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff, `1` on `[0, 1]`, `0` on `[2, ∞)`.
pub fn chi_low(lambda: f64) -> f64 {
    let a = bump_fn(2.0 - lambda);
    let b = bump_fn(lambda - 1.0);
    a / (a + b)
}

/// `1 − χ_low`, supported in `(1, ∞)`.
pub fn chi_high(lambda: f64) -> f64 {
    let a = bump_fn(2.0 - lambda);
    let b = bump_fn(lambda - 1.0);
    b / (a + b)
}

/// Which spectral part of the propagator to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Full,
    Low,
    High,
}

impl Band {
    pub fn weight(self, lambda: f64) -> f64 {
        match self {
            Band::Full => 1.0,
            Band::Low => chi_low(lambda),
            Band::High => chi_high(lambda),
        }
    }

    fn upper(self, lambda_max: f64) -> f64 {
        match self {
            Band::Low => lambda_max.min(2.0),
            _ => lambda_max,
        }
    }
}

/// Default spectral cutoff `√(23/ε)`.
pub fn default_lambda_max(eps: f64) -> f64 {
    (DAMPING_EXPONENT / eps).sqrt()
}

/// Coarse λ-panels with Gauss–Legendre nodes, and product-integration
/// weights for `e^{(it−ε)λ²}χ(λ)`.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    panels: Vec<(f64, f64)>,
    nodes: Vec<f64>,
    lambda_max: f64,
    reference: Vec<f64>,
    bary: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(lambda_max: f64, panel_width: f64) -> Self {
        let count = (lambda_max / panel_width).ceil().max(1.0) as usize;
        let h = lambda_max / count as f64;
        let panels: Vec<(f64, f64)> = (0..count).map(|k| (k as f64 * h, (k + 1) as f64 * h)).collect();
        let gl = GaussLegendre::new(ORDER);
        let reference: Vec<f64> = gl.on_interval(-1.0, 1.0).map(|(x, _)| x).collect();
        let bary: Vec<f64> = (0..ORDER)
            .map(|k| {
                1.0 / (0..ORDER)
                    .filter(|&m| m != k)
                    .map(|m| reference[k] - reference[m])
                    .product::<f64>()
            })
            .collect();
        let nodes = panels
            .iter()
            .flat_map(|&(a, b)| reference.iter().map(move |r| 0.5 * (a + b) + 0.5 * (b - a) * r).collect::<Vec<_>>())
            .collect();
        Self {
            panels,
            nodes,
            lambda_max,
            reference,
            bary,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn panel_width(&self) -> f64 {
        self.panels[0].1 - self.panels[0].0
    }

    /// Lagrange basis of the reference nodes at `r ∈ [−1, 1]`.
    fn basis(&self, r: f64, out: &mut [f64; ORDER]) {
        if let Some(k) = self.reference.iter().position(|&x| x == r) {
            *out = [0.0; ORDER];
            out[k] = 1.0;
            return;
        }
        let mut total = 0.0;
        for ((o, b), x) in out.iter_mut().zip(&self.bary).zip(&self.reference) {
            *o = b / (r - x);
            total += *o;
        }
        for v in out.iter_mut() {
            *v /= total;
        }
    }

    /// `c_k = ∫ e^{(it−ε)λ²} χ(λ) ℓ_k(λ) dλ` for every node; the fine
    /// sub-step is at most `min(0.5/(|t|λ_max), 0.05)`.
    pub fn weights(&self, t: f64, eps: f64, band: Band) -> Vec<Complex64> {
        let fine_gl = GaussLegendre::new(ORDER);
        let step = if t == 0.0 {
            0.05
        } else {
            (0.5 / (t.abs() * self.lambda_max)).min(0.05)
        };
        let upper = band.upper(self.lambda_max);
        let s = Complex64::new(-eps, t);
        let mut out = vec![Complex64::default(); self.nodes.len()];
        let mut basis = [0.0; ORDER];
        for (p, &(a, b)) in self.panels.iter().enumerate() {
            if a >= upper {
                break;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let slot = &mut out[p * ORDER..(p + 1) * ORDER];
            for (l, w) in fine_gl.composite(a, b, step) {
                let chi = band.weight(l);
                if chi == 0.0 {
                    continue;
                }
                let f = w * chi * (s * l * l).exp();
                self.basis((l - mid) / half, &mut basis);
                for k in 0..ORDER {
                    slot[k] += f * basis[k];
                }
            }
        }
        out
    }
}

/// One propagator kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorRequest {
    pub t: f64,
    pub pair: PointPair,
    pub eps: f64,
    pub lambda_max: f64,
    pub band: Band,
    /// Coarse λ-panel width; at most `0.2/max(x, x′)`.
    pub panel_width: f64,
}

impl PropagatorRequest {
    /// Full band with the default cutoff and panel width.
    pub fn new(t: f64, pair: PointPair, eps: f64) -> Self {
        Self {
            t,
            pair,
            eps,
            lambda_max: default_lambda_max(eps / 2.0),
            band: Band::Full,
            panel_width: 0.2 / pair.x.max(pair.x_prime),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1e-4..=1e-1).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!("ε = {} outside [1e-4, 1e-1]", self.eps)));
        }
        if !(self.lambda_max >= 20.0) {
            return Err(Error::InvalidParameter(format!("λ_max = {} below 20", self.lambda_max)));
        }
        if self.t == 0.0 || !self.t.is_finite() {
            return Err(Error::InvalidParameter("t must be finite and non-zero".into()));
        }
        let limit = 0.2 / self.pair.x.max(self.pair.x_prime);
        if !(self.panel_width > 0.0) || self.panel_width > limit * (1.0 + 1e-12) {
            return Err(Error::Resolution {
                op: "propagator::schrodinger_kernel",
                detail: format!("λ-panel width {} exceeds 0.2/x_max = {limit}", self.panel_width),
            });
        }
        Ok(())
    }
}

/// A damped kernel value with its ε-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorValue {
    pub value: Complex64,
    /// `|K_ε − K_{ε/2}|`.
    pub error_estimate: f64,
    pub eps: f64,
    pub lambda_max: f64,
}

/// `φ_j(λ, x)` at every node of a spectral grid, for fixed radii.
#[derive(Debug, Clone)]
pub struct ModeTable {
    grid: SpectralGrid,
    radii: Vec<f64>,
    modes: usize,
    /// `[node][j · radii + a]`.
    values: Vec<Vec<f64>>,
}

/// Time-integrated mode kernels `A_j(x_a, x_b; t)` for `a ≤ b`.
#[derive(Debug, Clone)]
pub struct ModeKernels {
    radii: usize,
    modes: usize,
    data: Vec<Complex64>,
}

impl ModeKernels {
    fn index(&self, j: usize, a: usize, b: usize) -> usize {
        let (a, b) = (a.min(b), a.max(b));
        (j * self.radii + a) * self.radii + b
    }

    /// `Σ_j Π_j(γ) A_j(x_a, x_b)` for projection values `proj`.
    pub fn kernel(&self, a: usize, b: usize, proj: &[f64]) -> Complex64 {
        (0..self.modes).map(|j| proj[j] * self.data[self.index(j, a, b)]).sum()
    }
}

impl ModeTable {
    /// Samples the cone's mode profiles at every node; `radii` ascending.
    pub fn new(cone: &Cone, radii: &[f64], modes: usize, grid: SpectralGrid) -> Result<Self> {
        let values = grid
            .nodes()
            .par_iter()
            .map(|&l| -> Result<Vec<f64>> {
                let phi = cone.mode_profiles(l, radii, modes)?;
                Ok(phi.into_iter().flatten().collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            radii: radii.to_vec(),
            modes,
            values,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Largest share of the last mode in `Σ_j |φ_j(x)|²` over radii and
    /// nodes where the damping `e^{−ελ²}` exceeds `1e-8`.
    pub fn truncation_share(&self, eps: f64) -> f64 {
        let nr = self.radii.len();
        let mut worst = 0.0f64;
        for (node, row) in self.grid.nodes().iter().zip(&self.values) {
            if (-eps * node * node).exp() < 1e-8 {
                continue;
            }
            for a in 0..nr {
                let total: f64 = (0..self.modes).map(|j| row[j * nr + a].powi(2)).sum();
                if total > 0.0 {
                    worst = worst.max(row[(self.modes - 1) * nr + a].powi(2) / total);
                }
            }
        }
        worst
    }

    /// `A_j(x_a, x_b; t) = ∫ e^{(it−ε)λ²}χ(λ) φ_j(x_a) φ_j(x_b) dλ`.
    pub fn mode_kernels(&self, t: f64, eps: f64, band: Band) -> ModeKernels {
        let weights = self.grid.weights(t, eps, band);
        let nr = self.radii.len();
        let mut data = vec![Complex64::default(); self.modes * nr * nr];
        for (w, row) in weights.iter().zip(&self.values) {
            if *w == Complex64::default() {
                continue;
            }
            for j in 0..self.modes {
                let phi = &row[j * nr..(j + 1) * nr];
                for a in 0..nr {
                    let wa = w * phi[a];
                    let base = (j * nr + a) * nr;
                    for b in a..nr {
                        data[base + b] += wa * phi[b];
                    }
                }
            }
        }
        ModeKernels {
            radii: nr,
            modes: self.modes,
            data,
        }
    }
}

/// `∫₀^{λ_max} e^{(it−ε)λ²} χ(λ) dE(λ; z, z′) dλ` with an ε-halving error
/// estimate.
pub fn schrodinger_kernel(cone: &Cone, req: &PropagatorRequest, modes: usize) -> Result<PropagatorValue> {
    req.validate()?;
    let mut radii = vec![req.pair.x, req.pair.x_prime];
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let table = ModeTable::new(cone, &radii, modes, SpectralGrid::new(req.lambda_max, req.panel_width))?;
    check_truncation(&table, req.eps / 2.0, "propagator::schrodinger_kernel")?;
    let proj = cone.cross_section().projection_kernels(modes, req.pair.gamma);
    let a = radii.iter().position(|&r| r == req.pair.x).expect("radius present");
    let b = radii.iter().position(|&r| r == req.pair.x_prime).expect("radius present");
    let value = table.mode_kernels(req.t, req.eps, req.band).kernel(a, b, &proj);
    let half = table.mode_kernels(req.t, req.eps / 2.0, req.band).kernel(a, b, &proj);
    Ok(PropagatorValue {
        value,
        error_estimate: (value - half).norm(),
        eps: req.eps,
        lambda_max: req.lambda_max,
    })
}

fn check_truncation(table: &ModeTable, eps: f64, op: &'static str) -> Result<()> {
    let share = table.truncation_share(eps);
    if share > 1e-6 {
        return Err(Error::Truncation {
            op,
            detail: format!("last mode carries {share:.2e} of the local spectral density"),
        });
    }
    Ok(())
}

/// `(4π(ε−it))^{−n/2} e^{−d²/(4(ε−it))}`: the damped free kernel on `Rⁿ`.
pub fn free_kernel(n: usize, t: f64, eps: f64, d: f64) -> Complex64 {
    let s = Complex64::new(eps, -t);
    (4.0 * PI * s).powf(-0.5 * n as f64) * (-(d * d) / (4.0 * s)).exp()
}

/// Sample grid and parameters of a dispersive fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveConfig {
    pub radii: Vec<f64>,
    /// Distinct link distances realized by the cross-section sample points.
    pub gammas: Vec<f64>,
    pub times: Vec<f64>,
    pub eps: f64,
    pub modes: usize,
    pub antipodal_margin: f64,
}

impl DispersiveConfig {
    /// 12 radii in `[0.02, 0.25]`, 8 cross-section points spaced by an
    /// eighth of the diameter along a geodesic, 10 geometric times in
    /// `[0.02, 1]`, `ε = 2·10⁻³`, up to 60 modes (40 leave a visible tail at
    /// the outer radius).
    pub fn standard(cone: &Cone) -> Self {
        let diam = cone.cross_section().diameter();
        Self {
            radii: (0..12).map(|k| 0.02 + (0.25 - 0.02) * k as f64 / 11.0).collect(),
            gammas: (0..8).map(|k| diam * k as f64 / 8.0).collect(),
            times: geometric(0.02, 1.0, 10),
            eps: 2e-3,
            modes: cone.cross_section().modes().min(60),
            antipodal_margin: 0.2,
        }
    }
}

/// `count` geometrically spaced values from `a` to `b`.
pub fn geometric(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| a * (b / a).powf(k as f64 / (count - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveFit {
    pub times: Vec<f64>,
    /// `sup |K_ε(t)|` over the sample grid.
    pub sup: Vec<f64>,
    /// The same at `ε/2`.
    pub sup_half_eps: Vec<f64>,
    /// Slope of `log sup` against `log t`.
    pub alpha: f64,
    pub eps: f64,
    pub lambda_max: f64,
    /// `𝐞` of the cone.
    pub stability: f64,
    /// Point pairs entering each supremum.
    pub sample_pairs: usize,
}

impl DispersiveFit {
    /// `sup |K| · t^{n/2+𝐞/4}`.
    pub fn scaled(&self, n: usize) -> Vec<f64> {
        let p = 0.5 * n as f64 + 0.25 * self.stability;
        self.times.iter().zip(&self.sup).map(|(t, s)| s * t.powf(p)).collect()
    }

    /// Largest relative change of `sup` under ε-halving.
    pub fn eps_sensitivity(&self) -> f64 {
        self.sup
            .iter()
            .zip(&self.sup_half_eps)
            .map(|(a, b)| (a - b).abs() / a)
            .fold(0.0, f64::max)
    }

    /// Rows `t, sup_abs, sup_abs_half_eps, alpha` after a comment block
    /// with the run metadata.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "# eps = {:e}", self.eps)?;
        writeln!(out, "# lambda_max = {:.6}", self.lambda_max)?;
        writeln!(out, "# stability = {:.6}", self.stability)?;
        writeln!(out, "# sample_pairs = {}", self.sample_pairs)?;
        writeln!(out, "# fitted_alpha = {:.6}", self.alpha)?;
        writeln!(out, "t,sup_abs,sup_abs_half_eps,alpha")?;
        for ((t, s), h) in self.times.iter().zip(&self.sup).zip(&self.sup_half_eps) {
            writeln!(out, "{t:.16e},{s:.16e},{h:.16e},{:.6}", self.alpha)?;
        }
        Ok(())
    }
}

/// Fits `sup_{z,z′} |K(t; z, z′)| ~ t^α` over the configured grid.
pub fn dispersive_fit(cone: &Cone, cfg: &DispersiveConfig) -> Result<DispersiveFit> {
    if cfg.times.len() < 8 {
        return Err(Error::InvalidParameter(format!(
            "dispersive fit needs at least 8 times, got {}",
            cfg.times.len()
        )));
    }
    let mut radii = cfg.radii.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let x_max = *radii.last().ok_or_else(|| Error::InvalidParameter("no sample radii".into()))?;
    let lambda_max = default_lambda_max(cfg.eps / 2.0);
    let table = ModeTable::new(cone, &radii, cfg.modes, SpectralGrid::new(lambda_max, 0.2 / x_max))?;
    check_truncation(&table, cfg.eps / 2.0, "propagator::dispersive_fit")?;
    let projs: Vec<Vec<f64>> = cfg
        .gammas
        .iter()
        .filter(|&&g| g <= PI - cfg.antipodal_margin)
        .map(|&g| cone.cross_section().projection_kernels(cfg.modes, g))
        .collect();
    let sup_at = |t: f64, eps: f64| {
        let mk = table.mode_kernels(t, eps, Band::Full);
        let mut best = 0.0f64;
        for a in 0..radii.len() {
            for b in a..radii.len() {
                for p in &projs {
                    best = best.max(mk.kernel(a, b, p).norm());
                }
            }
        }
        best
    };
    let pairs: Vec<(f64, f64)> = cfg
        .times
        .par_iter()
        .map(|&t| (sup_at(t, cfg.eps), sup_at(t, cfg.eps / 2.0)))
        .collect();
    let (sup, sup_half_eps): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let pts: Vec<(f64, f64)> = cfg.times.iter().zip(&sup).map(|(t, s)| (t.ln(), s.ln())).collect();
    Ok(DispersiveFit {
        times: cfg.times.clone(),
        sup,
        sup_half_eps,
        alpha: least_squares_slope(&pts),
        eps: cfg.eps,
        lambda_max,
        stability: cone.stability(),
        sample_pairs: radii.len() * (radii.len() + 1) / 2 * projs.len(),
    })
}

/// Low-energy sanity check: `sup_t |K_low(t)|` against the `t`-independent
/// bound `∫₀² sup_{z,z′} |dE(λ)| dλ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowEnergyCheck {
    pub sup_kernel: f64,
    pub bound: f64,
}

pub fn low_energy_check(cone: &Cone, cfg: &DispersiveConfig) -> Result<LowEnergyCheck> {
    let mut radii = cfg.radii.clone();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let x_max = *radii.last().ok_or_else(|| Error::InvalidParameter("no sample radii".into()))?;
    let table = ModeTable::new(cone, &radii, cfg.modes, SpectralGrid::new(2.0, (0.2 / x_max).min(0.25)))?;
    let projs: Vec<Vec<f64>> = cfg
        .gammas
        .iter()
        .filter(|&&g| g <= PI - cfg.antipodal_margin)
        .map(|&g| cone.cross_section().projection_kernels(cfg.modes, g))
        .collect();
    let nr = radii.len();
    // plain Gauss–Legendre weights of the same nodes
    let gl = GaussLegendre::new(ORDER);
    let gl_w: Vec<f64> = gl.composite(0.0, 2.0, table.grid().panel_width()).into_iter().map(|p| p.1).collect();
    let mut bound = 0.0;
    for (w, row) in gl_w.iter().zip(&table.values) {
        let mut best = 0.0f64;
        for a in 0..nr {
            for b in a..nr {
                for p in &projs {
                    let v: f64 = (0..cfg.modes).map(|j| p[j] * row[j * nr + a] * row[j * nr + b]).sum();
                    best = best.max(v.abs());
                }
            }
        }
        bound += w * best;
    }
    let mut sup_kernel = 0.0f64;
    for &t in &cfg.times {
        let mk = table.mode_kernels(t, 0.0, Band::Low);
        for a in 0..nr {
            for b in a..nr {
                for p in &projs {
                    sup_kernel = sup_kernel.max(mk.kernel(a, b, p).norm());
                }
            }
        }
    }
    Ok(LowEnergyCheck { sup_kernel, bound })
}

/// A Schrödinger admissible exponent pair in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrichartzSpec {
    pub q: f64,
    pub r: f64,
    pub n: usize,
    pub stability: f64,
}

impl StrichartzSpec {
    /// Checks `2/q + n/r = n/2`, `q, r ≥ 2`, `(q, r) ≠ (2, ∞)`.
    pub fn new(q: f64, r: f64, n: usize, stability: f64) -> Result<Self> {
        let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
        let balance = 2.0 * inv(q) + n as f64 * inv(r) - 0.5 * n as f64;
        let ok = q >= 2.0 && r >= 2.0 && balance.abs() < 1e-12 && !(q == 2.0 && r.is_infinite());
        if !ok {
            return Err(Error::Inadmissible { q, r, n });
        }
        Ok(Self { q, r, n, stability })
    }

    pub fn loss(&self) -> f64 {
        loss_exponent(self.n, self.q, self.stability)
    }
}

/// `𝐤 = 𝐞 / (q(n + 𝐞/2))`.
pub fn loss_exponent(n: usize, q: f64, stability: f64) -> f64 {
    stability / (q * (n as f64 + 0.5 * stability))
}

/// Radially symmetric initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpKind {
    /// `e^{−(x/w)²}`.
    Gaussian,
    /// `exp(−1/(1−(x/w)²))` for `x < w`.
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBump {
    pub kind: BumpKind,
    pub width: f64,
}

impl RadialBump {
    pub fn gaussian(width: f64) -> Self {
        Self {
            kind: BumpKind::Gaussian,
            width,
        }
    }

    pub fn compact(width: f64) -> Self {
        Self {
            kind: BumpKind::Compact,
            width,
        }
    }

    /// Unnormalized profile.
    pub fn profile(&self, x: f64) -> f64 {
        let s = x / self.width;
        match self.kind {
            BumpKind::Gaussian => (-s * s).exp(),
            BumpKind::Compact => {
                if s < 1.0 {
                    (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Largest spectral cutoff used for this bump. Smooth cones reach the
    /// tail tolerance well below it; the cap binds for kinked profiles.
    fn band_limit(&self) -> f64 {
        match self.kind {
            BumpKind::Gaussian => 12.0 / self.width,
            BumpKind::Compact => 40.0 / self.width,
        }
    }

    /// Radius beyond which the profile is below `1e-16`.
    fn support(&self) -> f64 {
        match self.kind {
            BumpKind::Gaussian => 6.1 * self.width,
            BumpKind::Compact => self.width,
        }
    }
}

/// Discretization of a radial evolution `e^{(it−ε)Δ}f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionGrid {
    pub eps: f64,
    /// Latest time the spatial domain must contain.
    pub t_max: f64,
    /// Divides every quadrature panel width (1 = default).
    pub refinement: f64,
}

impl Default for EvolutionGrid {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            t_max: 1.0,
            refinement: 1.0,
        }
    }
}

/// Share of the transform energy allowed beyond the spectral cutoff.
const TRANSFORM_TAIL: f64 = 1e-10;
const SPECTRAL_SLICES: usize = 8;

/// `e^{(it−ε)Δ}f` for a radial bump, through the ground mode of the cone:
/// `u(t, x) = ∫ e^{(it−ε)λ²} F(λ) φ₀(λ, x) dλ` with the weighted transform
/// `F(λ) = ∫ φ₀(λ, x) f(x) w(x) dx`.
#[derive(Debug, Clone)]
pub struct RadialEvolution {
    eps: f64,
    volume: f64,
    /// Spatial nodes and weights `q_i w(x_i)` of the volume form.
    space: Vec<(f64, f64)>,
    /// Spectral nodes with their plain quadrature weights.
    spectral: Vec<(f64, f64)>,
    transform: Vec<f64>,
    /// `‖f‖₂` before normalization.
    raw_norm: f64,
    /// Share of the transform energy below the spectral cutoff.
    captured: f64,
    cone: Cone,
}

impl RadialEvolution {
    pub fn new(cone: &Cone, bump: RadialBump, grid: EvolutionGrid) -> Result<Self> {
        if !(bump.width > 0.0) || !(grid.refinement >= 1.0) || !(grid.t_max > 0.0) {
            return Err(Error::InvalidParameter(
                "bump width and final time must be positive, refinement at least 1".into(),
            ));
        }
        let volume = cone.cross_section().volume();
        let gl = GaussLegendre::new(ORDER);
        let refine = grid.refinement;
        let support = bump.support();
        let lambda_cap = default_lambda_max(grid.eps).min(60.0 / bump.width);

        let source: Vec<(f64, f64)> = gl
            .composite(0.0, support, (4.0 / lambda_cap).min(0.25 * support) / refine)
            .into_iter()
            .map(|(x, q)| (x, q * cone.radial_density(x)))
            .collect();
        let radii: Vec<f64> = source.iter().map(|p| p.0).collect();
        let raw_norm = (volume * source.iter().map(|&(x, q)| q * bump.profile(x).powi(2)).sum::<f64>()).sqrt();
        let transform_at = |l: f64| -> Result<f64> {
            let phi = cone.mode_profiles(l, &radii, 1)?;
            Ok(source
                .iter()
                .zip(&phi[0])
                .map(|(&(x, q), p)| q * bump.profile(x) * p)
                .sum::<f64>()
                / raw_norm)
        };

        // F oscillates on the scale 1/support: scan it to place the cutoff
        let scan_step = 0.25 / support;
        let scan: Vec<f64> = (1..=(lambda_cap / scan_step).ceil() as usize)
            .map(|k| (k as f64 * scan_step).min(lambda_cap))
            .collect();
        let values = scan.par_iter().map(|&l| transform_at(l)).collect::<Result<Vec<_>>>()?;
        // cut where the remaining transform energy is negligible; a kinked
        // profile only decays algebraically, hence the width-based cap
        let energy: Vec<f64> = values.iter().map(|v| v * v).collect();
        let total: f64 = energy.iter().sum();
        let mut tail = total;
        let mut top_index = energy.len() - 1;
        for (k, e) in energy.iter().enumerate() {
            tail -= e;
            if tail <= TRANSFORM_TAIL * total {
                top_index = (k + 1).min(energy.len() - 1);
                break;
            }
        }
        let lambda_top = scan[top_index].min(bump.band_limit());
        let kept: f64 = scan.iter().zip(&energy).filter(|(l, _)| **l <= lambda_top).map(|p| p.1).sum();
        let captured = kept / total;

        // energy at λ travels at speed 2λ
        let x_far = support + 2.0 * lambda_top * grid.t_max + 2.0;
        let space: Vec<(f64, f64)> = gl
            .composite(0.0, x_far, (4.0 / lambda_top).min(0.25) / refine)
            .into_iter()
            .map(|(x, q)| (x, q * cone.radial_density(x)))
            .collect();
        let spectral = gl.composite(0.0, lambda_top, 4.0 / ((x_far + 2.0 * lambda_top * grid.t_max) * refine));
        let transform = spectral.par_iter().map(|&(l, _)| transform_at(l)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            eps: grid.eps,
            volume,
            space,
            spectral,
            transform,
            raw_norm,
            captured,
            cone: cone.clone(),
        })
    }

    /// `‖e^{−εΔ}f‖₂` from the spectral side, `f` normalized.
    pub fn damped_norm(&self) -> f64 {
        (self.volume
            * self
                .spectral
                .iter()
                .zip(&self.transform)
                .map(|(&(l, w), f)| w * (-2.0 * self.eps * l * l).exp() * f * f)
                .sum::<f64>())
        .sqrt()
    }

    /// `‖f‖₂` of the bump before it was normalized.
    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    /// Share of the bump's spectral energy kept below the cutoff, measured
    /// on the scan grid; `1` up to the tail tolerance for smooth cones.
    pub fn captured_energy(&self) -> f64 {
        self.captured
    }

    /// Spatial quadrature nodes.
    pub fn radii(&self) -> Vec<f64> {
        self.space.iter().map(|p| p.0).collect()
    }

    pub fn spectral_nodes(&self) -> usize {
        self.spectral.len()
    }

    /// `u(t_k, x_i)` on the spatial nodes for every time. The spectral
    /// nodes are split into a fixed number of contiguous slices summed in
    /// order, so results do not depend on the thread count.
    pub fn evolve(&self, times: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        let nt = times.len();
        let radii = self.radii();
        let nx = radii.len();
        let slice = self.spectral.len().div_ceil(SPECTRAL_SLICES).max(1);
        let indices: Vec<usize> = (0..self.spectral.len()).collect();
        let partials = indices
            .par_chunks(slice)
            .map(|ks| -> Result<Vec<Complex64>> {
                let mut acc = vec![Complex64::default(); nt * nx];
                for &k in ks {
                    let (l, w) = self.spectral[k];
                    let amp = w * self.transform[k];
                    if amp == 0.0 {
                        continue;
                    }
                    let phi = self.cone.mode_profiles(l, &radii, 1)?;
                    for (ti, &t) in times.iter().enumerate() {
                        let c = amp * (Complex64::new(-self.eps, t) * l * l).exp();
                        for (slot, p) in acc[ti * nx..(ti + 1) * nx].iter_mut().zip(&phi[0]) {
                            *slot += c * p;
                        }
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut total = vec![Complex64::default(); nt * nx];
        for part in partials {
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        Ok(total.chunks(nx.max(1)).map(|c| c.to_vec()).collect())
    }

    /// `(∫ |u|^r dV)^{1/r}`, or the sup norm for `r = ∞`.
    pub fn lebesgue_norm(&self, u: &[Complex64], r: f64) -> f64 {
        if r.is_infinite() {
            return u.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        (self.volume * self.space.iter().zip(u).map(|(&(_, q), v)| q * v.norm().powf(r)).sum::<f64>()).powf(1.0 / r)
    }

    /// `‖u(t)‖₂ / ‖e^{−εΔ}f‖₂` at each time.
    pub fn unitarity(&self, times: &[f64]) -> Result<Vec<f64>> {
        let reference = self.damped_norm();
        Ok(self
            .evolve(times)?
            .iter()
            .map(|u| self.lebesgue_norm(u, 2.0) / reference)
            .collect())
    }
}

/// Gauss–Legendre time nodes on `[0,0.05]`, `[0.05,0.2]`, `[0.2,0.5]`,
/// `[0.5,1]`, each panel split `refinement` times.
pub fn strichartz_time_grid(refinement: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(ORDER);
    let cuts = [0.0, 0.05, 0.2, 0.5, 1.0];
    cuts.windows(2)
        .flat_map(|c| gl.composite(c[0], c[1], (c[1] - c[0]) / refinement.max(1) as f64))
        .collect()
}

/// Discrete `L^q_t L^r_z` norm of `e^{(it−ε)Δ}f` over `t ∈ (0, 1]`.
pub fn strichartz_norm(evolution: &RadialEvolution, spec: &StrichartzSpec, times: &[(f64, f64)]) -> Result<f64> {
    let ts: Vec<f64> = times.iter().map(|p| p.0).collect();
    let states = evolution.evolve(&ts)?;
    let inner: Vec<f64> = states.iter().map(|u| evolution.lebesgue_norm(u, spec.r)).collect();
    if spec.q.is_infinite() {
        return Ok(inner.into_iter().fold(0.0, f64::max));
    }
    Ok(times
        .iter()
        .zip(&inner)
        .map(|(&(_, w), v)| w * v.powf(spec.q))
        .sum::<f64>()
        .powf(1.0 / spec.q))
}
