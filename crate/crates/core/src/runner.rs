//! Runs a validated [`ExperimentConfig`] and writes its artifacts.
//!
//! Every CSV starts with the resolved config as `#` comments. Output is
//! written from one thread after all computation has finished.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bessel::{bessel_j, bessel_y};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::cross_section::{mode_constants, CrossSectionKind};
use crate::error::Error;
use crate::geometry::{cross_distance, flow_point, CrossPoint};
use crate::indexsets::{parametrix_family, IndexSet};
use crate::kernels::{PointPair, Sign};
use crate::plot::LogLogPlot;
use crate::propagator::{
    dispersive_fit, free_kernel, loss_exponent, schrodinger_kernel, strichartz_norm, strichartz_time_grid,
    DispersiveConfig, EvolutionGrid, PropagatorRequest, RadialBump, RadialEvolution, StrichartzSpec,
};
use crate::radial::{growth_exponent_fit, SamplePolicy};

/// Why a run stopped, mapped onto the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Bad config, bad parameters or an unwritable output directory.
    Config(String),
    /// A numerical method failed; the message names `module::operation`.
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if let Error::Config(m) = e {
            RunError::Config(m)
        } else if e.is_numerical() {
            RunError::Numerical(e.to_string())
        } else {
            RunError::Config(e.to_string())
        }
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub kind: ExperimentKind,
    /// Human-readable result lines, e.g. the fitted exponent.
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Points, fitted slope, x label and y label of a log-log plot.
type PlotData = (Vec<(f64, f64)>, f64, &'static str, &'static str);

/// Artifacts of one experiment before they are written.
struct Artifacts {
    csv: String,
    plot: Option<PlotData>,
    text: Option<String>,
    lines: Vec<String>,
}

/// Runs the experiment and writes `<kind>.csv` (plus `.svg` / `.txt`) into
/// `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> RunResult<RunSummary> {
    let artifacts = match cfg.kind {
        ExperimentKind::Spectrum => spectrum(cfg)?,
        ExperimentKind::ResolventSlice => resolvent_slice(cfg)?,
        ExperimentKind::SpectralMeasure => spectral_measure(cfg)?,
        ExperimentKind::DispersiveFit => dispersive(cfg)?,
        ExperimentKind::Strichartz => strichartz(cfg)?,
        ExperimentKind::IndexSets => index_sets(cfg)?,
        ExperimentKind::FlowSweep => flow_sweep(cfg)?,
    };
    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let formats = cfg.formats()?;
    let stem = cfg.kind.name();
    let mut files = Vec::new();
    let mut write = |name: String, body: &str| -> RunResult<()> {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
        files.push(path);
        Ok(())
    };
    if formats.iter().any(|f| f == "csv") {
        write(format!("{stem}.csv"), &format!("{}{}", cfg.header(), artifacts.csv))?;
    }
    if let (true, Some((points, slope, x_label, y_label))) = (formats.iter().any(|f| f == "svg"), &artifacts.plot) {
        let svg = LogLogPlot {
            title: stem,
            x_label,
            y_label,
            points,
            slope: *slope,
        }
        .render();
        write(format!("{stem}.svg"), &svg)?;
    }
    if let Some(text) = &artifacts.text {
        write(format!("{stem}.txt"), text)?;
    }
    Ok(RunSummary {
        kind: cfg.kind,
        lines: artifacts.lines,
        files,
    })
}

fn io_error(path: &Path, e: std::io::Error) -> RunError {
    RunError::Config(format!("cannot write {}: {e}", path.display()))
}

fn spectrum(cfg: &ExperimentConfig) -> RunResult<Artifacts> {
    let cone = cfg.cone()?;
    let cs = cone.cross_section();
    let mc = mode_constants(cone.n(), cs)?;
    let mut csv = String::from("j,sigma2,multiplicity,nu,im_indicial_root\n");
    for j in 0..cs.modes() {
        let _ = writeln!(
            csv,
            "{j},{:.16e},{},{:.16e},{:.16e}",
            cs.eigenvalues()[j],
            cs.multiplicities()[j],
            mc.nu[j],
            mc.indicial_im[j]
        );
    }
    Ok(Artifacts {
        csv,
        plot: None,
        text: None,
        lines: vec![format!("spectrum: {} modes, nu_0 = {:.6}", cs.modes(), mc.nu[0])],
    })
}

fn resolvent_slice(cfg: &ExperimentConfig) -> RunResult<Artifacts> {
    let cone = cfg.cone()?;
    let modes = cfg.modes()?;
    let x = cfg.get_f64("experiment.x")?;
    let gamma = cfg.get_f64("experiment.gamma")?;
    let sign = if cfg.get("experiment.sign")? == "in" { Sign::In } else { Sign::Out };
    let kind = if sign == Sign::In { "resolvent_in" } else { "resolvent_out" };
    let mut csv = String::from("lambda,x,y_gamma,x_prime,value_re,value_im,kind\n");
    let mut count = 0;
    for lambda in cfg.get_list("experiment.lambdas")? {
        for xp in cfg.get_jittered("experiment.x_primes")? {
            let v = cone.resolvent(lambda, PointPair::new(x, xp, gamma), modes, sign)?;
            let _ = writeln!(csv, "{lambda:.16e},{x:.16e},{gamma:.16e},{xp:.16e},{:.16e},{:.16e},{kind}", v.re, v.im);
            count += 1;
        }
    }
    Ok(Artifacts {
        csv,
        plot: None,
        text: None,
        lines: vec![format!("resolvent-slice: {count} kernel values")],
    })
}

fn spectral_measure(cfg: &ExperimentConfig) -> RunResult<Artifacts> {
    let cone = cfg.cone()?;
    let mut policy = SamplePolicy {
        radii: cfg.get_jittered("experiment.radii")?,
        truncation_tol: cfg.get_f64("experiment.truncation_tol")?,
        ..SamplePolicy::default()
    };
    if cfg.get("experiment.gammas")? != "default" {
        policy.gammas = cfg.get_list("experiment.gammas")?;
    }
    let lambdas = cfg.get_list("experiment.lambdas")?;
    let fit = growth_exponent_fit(&cone, &lambdas, &policy, cfg.modes()?)?;
    let mut csv = String::from("lambda,sup_normalized\n");
    for (l, s) in fit.lambdas.iter().zip(&fit.sup) {
        let _ = writeln!(csv, "{l:.16e},{s:.16e}");
    }
    let n1 = cone.n() as f64 - 1.0;
    let e = cone.stability();
    Ok(Artifacts {
        csv,
        plot: Some((pairs(&fit.lambdas, &fit.sup), fit.slope, "lambda", "normalized sup |dE|")),
        text: None,
        lines: vec![format!(
            "spectral-measure: growth slope = {:.4} (n-1 = {n1}, n-1+e/2 = {:.4})",
            fit.slope,
            n1 + 0.5 * e
        )],
    })
}

fn dispersive(cfg: &ExperimentConfig) -> RunResult<Artifacts> {
    let cone = cfg.cone()?;
    let mut dc = DispersiveConfig::standard(&cone);
    dc.times = cfg.get_list("experiment.times")?;
    dc.eps = cfg.get_f64("experiment.eps")?;
    dc.radii = cfg.get_jittered("experiment.radii")?;
    dc.modes = cfg.modes()?;
    let links = cfg.get_usize("experiment.link_points")?;
    if links == 0 {
        return Err(RunError::Config("experiment.link_points must be positive".into()));
    }
    let diam = cone.cross_section().diameter();
    dc.gammas = (0..links).map(|k| diam * k as f64 / links as f64).collect();
    let fit = dispersive_fit(&cone, &dc)?;
    let mut body = Vec::new();
    fit.write_csv(&mut body)
        .map_err(|e| RunError::Config(format!("csv formatting failed: {e}")))?;
    let n = cone.n();
    let scaled = fit.scaled(n);
    let bound = -0.5 * n as f64 - 0.25 * fit.stability;
    Ok(Artifacts {
        csv: String::from_utf8(body).expect("csv is ascii"),
        plot: Some((pairs(&fit.times, &fit.sup), fit.alpha, "t", "sup |K(t)|")),
        text: None,
        lines: vec![
            format!("dispersive-fit: fitted alpha = {:.4} (bound exponent {bound:.4})", fit.alpha),
            format!(
                "dispersive-fit: sup |K| t^(n/2+e/4) in [{:.4e}, {:.4e}], eps-halving change {:.2e}",
                scaled.iter().cloned().fold(f64::INFINITY, f64::min),
                scaled.iter().cloned().fold(0.0, f64::max),
                fit.eps_sensitivity()
            ),
        ],
    })
}

fn strichartz(cfg: &ExperimentConfig) -> RunResult<Artifacts> {
    let cone = cfg.cone()?;
    let spec = StrichartzSpec::new(
        cfg.get_f64("experiment.q")?,
        cfg.get_f64("experiment.r")?,
        cone.n(),
        cone.stability(),
    )?;
    let refinement = cfg.get_usize("experiment.refinement")?.max(1);
    let grid = EvolutionGrid {
        eps: cfg.get_f64("experiment.eps")?,
        t_max: 1.0,
        refinement: refinement as f64,
    };
    let times = strichartz_time_grid(refinement);
    let compact = cfg.get("experiment.bump")? == "compact";
    let mut csv = String::from("width,norm,damped_l2,captured_energy,loss_exponent\n");
    let mut norms = Vec::new();
    for w in cfg.get_list("experiment.widths")? {
        let bump = if compact { RadialBump::compact(w) } else { RadialBump::gaussian(w) };
        let ev = RadialEvolution::new(&cone, bump, grid)?;
        let norm = strichartz_norm(&ev, &spec, &times)?;
        let _ = writeln!(
            csv,
            "{w:.16e},{norm:.16e},{:.16e},{:.16e},{:.16e}",
            ev.damped_norm(),
            ev.captured_energy(),
            spec.loss()
        );
        norms.push(norm);
    }
    let lo = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().cloned().fold(0.0, f64::max);
    Ok(Artifacts {
        csv,
        plot: None,
        text: None,
        lines: vec![format!(
            "strichartz: (q, r) = ({}, {}) norms in [{lo:.6}, {hi:.6}], spread {:.2}%, loss exponent {:.6}",
            spec.q,
            spec.r,
            100.0 * (hi - lo) / hi,
            spec.loss()
        )],
    })
}

fn index_sets(cfg: &ExperimentConfig) -> RunResult<Artifacts> {
    let cone = cfg.cone()?;
    let cutoff = cfg.get_f64("experiment.cutoff")?;
    let roots = mode_constants(cone.n(), cone.cross_section())?.indicial_im;
    let eb = IndexSet::boundary_spectrum(&roots, cutoff);
    let fam = parametrix_family(&eb);
    let mut csv = String::from("set,exponent,log_power\n");
    let mut text = String::new();
    for (name, set) in [("boundary", &eb), ("hat", &fam.hat), ("check", &fam.check), ("tilde", &fam.tilde)] {
        for &(z, k) in set.pairs() {
            let _ = writeln!(csv, "{name},{z:.12},{k}");
        }
        let _ = write!(text, "[{name}]\n{set}");
    }
    let print = format!(
        "index-sets: inf hat = {}, inf check = {}, inf tilde = {}",
        fam.hat.inf(),
        fam.check.inf(),
        fam.tilde.inf()
    );
    let mut lines = vec![print];
    lines.extend(text.lines().map(str::to_string));
    Ok(Artifacts {
        csv,
        plot: None,
        text: Some(text),
        lines,
    })
}

fn flow_sweep(cfg: &ExperimentConfig) -> RunResult<Artifacts> {
    let cone = cfg.cone()?;
    let cs = cone.cross_section();
    let theta0 = cfg.get_f64("experiment.theta0")?;
    let phi0 = cfg.get_f64("experiment.phi0")?;
    let (y0, direction) = match cs.kind() {
        CrossSectionKind::Circle { .. } => (CrossPoint::Angle(theta0), vec![1.0]),
        CrossSectionKind::RoundSphere { dim: 2 } => {
            let (st, ct) = theta0.sin_cos();
            let (sp, cp) = phi0.sin_cos();
            (CrossPoint::spherical(theta0, phi0), vec![ct * cp, ct * sp, -st])
        }
        CrossSectionKind::RoundSphere { dim } => {
            let mut pole = vec![0.0; dim + 1];
            pole[dim] = 1.0;
            let mut dir = vec![0.0; dim + 1];
            dir[0] = 1.0;
            (CrossPoint::Sphere(pole), dir)
        }
    };
    let mut csv = String::from("s,s_prime,rho_tilde,tau,tau_prime,mu,mu_prime,cross_distance,identity_residual\n");
    let mut worst = 0.0f64;
    for sp in cfg.get_list("experiment.s_prime")? {
        for s in cfg.get_list("experiment.s")? {
            let p = flow_point(cs, &y0, &direction, s, sp)?;
            let d = cross_distance(cs, &y0, &p.y)?;
            let residual = (p.tau * p.tau + p.mu_norm * p.mu_norm - 1.0)
                .abs()
                .max((p.tau_prime.powi(2) + p.mu_prime_norm.powi(2) - 1.0).abs())
                .max((p.rho_tilde - s.sin() / sp.sin()).abs());
            worst = worst.max(residual);
            let _ = writeln!(
                csv,
                "{s:.16e},{sp:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{d:.16e},{residual:.3e}",
                p.rho_tilde, p.tau, p.tau_prime, p.mu_norm, p.mu_prime_norm
            );
        }
    }
    Ok(Artifacts {
        csv,
        plot: None,
        text: None,
        lines: vec![format!("flow-sweep: largest identity residual {worst:.3e}")],
    })
}

fn pairs(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    x.iter().copied().zip(y.iter().copied()).collect()
}

/// Names accepted by [`oracle`].
pub const ORACLES: [&str; 5] = ["free-resolvent", "unit-distance", "free-propagator", "half-integer-bessel", "loss-exponent"];

/// Reference numbers from closed forms, next to the library's values where
/// there is one to compare.
pub fn oracle(name: &str) -> RunResult<String> {
    let mut out = String::new();
    match name {
        "free-resolvent" => {
            let cone = crate::cone::Cone::product(3, crate::cross_section::CrossSection::round_sphere(2, 40)?)?;
            out.push_str("lambda,x,x_prime,gamma,distance,closed_re,closed_im,modesum_re,modesum_im,rel_err\n");
            for &lambda in &[0.8, 1.5, 2.2] {
                for &x in &[0.3, 0.6, 0.9] {
                    for &(xp, gamma) in &[(1.8, 0.5), (2.6, 1.5), (3.4, 2.5)] {
                        let pair = PointPair::new(x, xp, gamma);
                        let d = pair.distance();
                        let closed = num_complex::Complex64::from_polar(1.0, lambda * d) / (4.0 * PI * d);
                        let got = cone.resolvent(lambda, pair, 40, Sign::Out)?;
                        let _ = writeln!(
                            out,
                            "{lambda},{x},{xp},{gamma},{d:.12},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
                            closed.re,
                            closed.im,
                            got.re,
                            got.im,
                            (got - closed).norm() / closed.norm()
                        );
                    }
                }
            }
        }
        "unit-distance" => {
            let v = num_complex::Complex64::from_polar(1.0, 1.0) / (4.0 * PI);
            let _ = writeln!(out, "e^(i)/(4 pi) = {:.10} + {:.10}i", v.re, v.im);
            let _ = writeln!(out, "1/(2 pi^2) = {:.10}", 1.0 / (2.0 * PI * PI));
        }
        "free-propagator" => {
            let cone = crate::cone::Cone::product(3, crate::cross_section::CrossSection::round_sphere(2, 60)?)?;
            let pair = PointPair::new(0.2, 0.15, 1.0);
            for &t in &[0.1, 0.5, 1.0] {
                let closed = free_kernel(3, t, 1e-3, pair.distance());
                let got = schrodinger_kernel(&cone, &PropagatorRequest::new(t, pair, 1e-3), 60)?;
                let _ = writeln!(
                    out,
                    "t = {t}: closed {:.10e} {:+.10e}i, computed {:.10e} {:+.10e}i, eps-halving {:.3e}",
                    closed.re, closed.im, got.value.re, got.value.im, got.error_estimate
                );
            }
            let _ = writeln!(out, "(4 pi t)^(-3/2) at t = 0.5: {:.10}", (2.0 * PI).powf(-1.5));
        }
        "half-integer-bessel" => {
            out.push_str("x,j_half,closed_j_half,y_half,closed_y_half\n");
            for &x in &[0.5, 1.0, 5.0, 20.0] {
                let c = (2.0 / (PI * x)).sqrt();
                let _ = writeln!(
                    out,
                    "{x},{:.15e},{:.15e},{:.15e},{:.15e}",
                    bessel_j(0.5, x)?,
                    c * x.sin(),
                    bessel_y(0.5, x)?,
                    -c * x.cos()
                );
            }
        }
        "loss-exponent" => {
            out.push_str("n,q,stability,loss\n");
            for k in 0..=10 {
                let e = 0.1 * k as f64;
                let _ = writeln!(out, "3,2,{e:.1},{:.12}", loss_exponent(3, 2.0, e));
            }
        }
        other => {
            return Err(RunError::Config(format!(
                "unknown oracle '{other}'; available: {}",
                ORACLES.join(", ")
            )))
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        let numerical: RunError = Error::Resolution {
            op: "propagator::schrodinger_kernel",
            detail: "x".into(),
        }
        .into();
        assert_eq!(numerical.exit_code(), 3);
        assert!(numerical.to_string().contains("propagator::schrodinger_kernel"));
        let bad: RunError = Error::InvalidParameter("x".into()).into();
        assert_eq!(bad.exit_code(), 2);
    }

    #[test]
    fn unknown_oracle_is_a_config_error() {
        assert_eq!(oracle("nope").unwrap_err().exit_code(), 2);
        assert!(oracle("loss-exponent").unwrap().contains("3,2,1.0,0.142857142857"));
    }
}
