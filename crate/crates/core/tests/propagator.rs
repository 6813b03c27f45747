//! Damped Schrödinger kernels against the free closed form, plus the
//! structural checks: time reversal, ε-halving, the group law, unitarity
//! and grid stability of the Strichartz norm.

use std::f64::consts::PI;

use conic_spectral::cone::Cone;
use conic_spectral::cross_section::{ConformalProfile, CrossSection};
use conic_spectral::error::Error;
use conic_spectral::kernels::PointPair;
use conic_spectral::propagator::*;
use conic_spectral::quadrature::GaussLegendre;
use num_complex::Complex64;

fn r3(modes: usize) -> Cone {
    Cone::product(3, CrossSection::round_sphere(2, modes).unwrap()).unwrap()
}

fn exp_cone() -> Cone {
    Cone::new(
        3,
        CrossSection::round_sphere(2, 60).unwrap(),
        ConformalProfile::exponential(0.2, 0.5).unwrap(),
    )
    .unwrap()
}

#[test]
fn free_kernel_closed_form_at_half_time() {
    let cone = r3(60);
    let pair = PointPair::new(0.2, 0.15, 1.0);
    let v = schrodinger_kernel(&cone, &PropagatorRequest::new(0.5, pair, 1e-3), 60).unwrap();
    let want = free_kernel(3, 0.5, 1e-3, pair.distance());
    assert!((v.value - want).norm() <= 0.03 * want.norm(), "{} vs {want}", v.value);
    // the damped oracle is matched far inside the tolerance
    assert!((v.value - want).norm() <= 1e-8 * want.norm());
    // and the modulus tends to (4πt)^{−3/2}
    assert!((v.value.norm() / (2.0 * PI).powf(-1.5) - 1.0).abs() < 0.03);
}

#[test]
fn free_kernel_over_times_and_distances() {
    // ε = 0.05 keeps λ_max·x inside the 60 available modes out to x = 1.5,
    // so distances up to 3 are reachable
    let cone = r3(60);
    for &t in &[0.1, 0.5, 1.0] {
        for &(x, xp, gamma) in &[(0.3, 0.2, 0.5), (1.0, 0.8, 1.2), (1.5, 1.5, PI - 0.2)] {
            let pair = PointPair::new(x, xp, gamma);
            let d = pair.distance();
            assert!(d <= 3.0);
            let v = schrodinger_kernel(&cone, &PropagatorRequest::new(t, pair, 0.05), 60).unwrap();
            let want = free_kernel(3, t, 0.05, d);
            let err = (v.value - want).norm() / want.norm();
            assert!(err <= 0.03, "t={t} d={d}: {err:e}");
        }
    }
}

#[test]
fn time_reversal_conjugates() {
    let cone = r3(60);
    let pair = PointPair::new(0.2, 0.1, 2.0);
    let a = schrodinger_kernel(&cone, &PropagatorRequest::new(0.4, pair, 1e-3), 60).unwrap();
    let b = schrodinger_kernel(&cone, &PropagatorRequest::new(-0.4, pair, 1e-3), 60).unwrap();
    assert!((a.value - b.value.conj()).norm() <= 1e-13 * a.value.norm());
}

#[test]
fn eps_halving_on_wide_circle_cone() {
    let cone = Cone::product(3, CrossSection::circle(2.0 * PI * 1.2, 60).unwrap()).unwrap();
    let pair = PointPair::new(0.2, 0.15, 1.0);
    let v = schrodinger_kernel(&cone, &PropagatorRequest::new(0.3, pair, 1e-3), 60).unwrap();
    assert!(v.error_estimate < 0.01 * v.value.norm(), "{:e}", v.error_estimate / v.value.norm());
}

#[test]
fn coarse_panels_are_rejected() {
    let cone = r3(40);
    let mut req = PropagatorRequest::new(0.3, PointPair::new(0.5, 0.4, 1.0), 1e-3);
    req.panel_width = 1.0;
    assert!(matches!(schrodinger_kernel(&cone, &req, 40), Err(Error::Resolution { .. })));
}

#[test]
fn too_few_modes_are_reported() {
    let cone = r3(40);
    let req = PropagatorRequest::new(0.3, PointPair::new(0.25, 0.2, 1.0), 1e-3);
    assert!(matches!(schrodinger_kernel(&cone, &req, 40), Err(Error::Truncation { .. })));
}

/// `A₀(t; x, y_i) = ∫ e^{(it−ε)λ²} φ₀(λ, x) φ₀(λ, y_i) dλ` for every `y_i`.
fn ground_kernel_row(cone: &Cone, grid: &SpectralGrid, t: f64, eps: f64, x: f64, ys: &[f64]) -> Vec<Complex64> {
    let weights = grid.weights(t, eps, Band::Full);
    let mut row = vec![Complex64::default(); ys.len()];
    for (w, &l) in weights.iter().zip(grid.nodes()) {
        let px = cone.mode_profiles(l, &[x], 1).unwrap()[0][0];
        let py = cone.mode_profiles(l, ys, 1).unwrap();
        for (slot, p) in row.iter_mut().zip(&py[0]) {
            *slot += w * px * p;
        }
    }
    row
}

fn check_group_law(cone: &Cone) {
    let (t1, t2, eps) = (0.15, 0.1, 0.05);
    let (x, xp) = (0.4, 0.7);
    let y_far = 12.0;
    let gl = GaussLegendre::new(8);
    let space: Vec<(f64, f64)> = gl.composite(0.0, y_far, 0.08);
    let ys: Vec<f64> = space.iter().map(|p| p.0).collect();
    let grid = SpectralGrid::new(default_lambda_max(eps), 0.2 / y_far);
    let a = ground_kernel_row(cone, &grid, t1, eps, x, &ys);
    let b = ground_kernel_row(cone, &grid, t2, eps, xp, &ys);
    let composed: Complex64 = space
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(&(y, q), (u, v))| q * cone.radial_density(y) * u * v)
        .sum();
    let direct = ground_kernel_row(cone, &grid, t1 + t2, 2.0 * eps, x, &[xp])[0];
    let err = (composed - direct).norm() / direct.norm();
    assert!(err < 0.05, "composition {composed} vs {direct}: {err:e}");
}

#[test]
fn group_law_product() {
    check_group_law(&r3(40));
}

#[test]
fn group_law_perturbed() {
    check_group_law(&exp_cone());
}

#[test]
fn unitarity_of_radial_evolution() {
    for cone in [r3(40), exp_cone()] {
        let ev = RadialEvolution::new(&cone, RadialBump::gaussian(0.5), EvolutionGrid::default()).unwrap();
        for (t, ratio) in [0.1, 0.5, 1.0].iter().zip(ev.unitarity(&[0.1, 0.5, 1.0]).unwrap()) {
            assert!((ratio - 1.0).abs() < 1e-6, "t={t}: {ratio}");
        }
        assert!(ev.captured_energy() > 1.0 - 1e-6);
    }
}

#[test]
fn strichartz_endpoint_is_the_damped_norm() {
    let cone = r3(40);
    let ev = RadialEvolution::new(&cone, RadialBump::gaussian(0.5), EvolutionGrid::default()).unwrap();
    let spec = StrichartzSpec::new(f64::INFINITY, 2.0, 3, 0.0).unwrap();
    let norm = strichartz_norm(&ev, &spec, &strichartz_time_grid(1)).unwrap();
    // the damping only shrinks the norm: the sup over t is the first node
    assert!((norm - ev.damped_norm()).abs() < 1e-6, "{norm}");
    assert!((norm - 1.0).abs() < 0.02);
}

#[test]
fn strichartz_norm_is_grid_stable() {
    let cone = r3(40);
    let spec = StrichartzSpec::new(2.0, 6.0, 3, 0.0).unwrap();
    let norm = |refinement: usize| {
        let grid = EvolutionGrid {
            refinement: refinement as f64,
            ..Default::default()
        };
        let ev = RadialEvolution::new(&cone, RadialBump::gaussian(0.5), grid).unwrap();
        strichartz_norm(&ev, &spec, &strichartz_time_grid(refinement)).unwrap()
    };
    let (a, b) = (norm(1), norm(2));
    assert!(a.is_finite() && a > 0.0);
    assert!((a - b).abs() < 0.05 * a, "{a} vs {b}");
}

#[test]
fn compact_bump_is_normalized() {
    let cone = r3(40);
    let grid = EvolutionGrid {
        t_max: 0.1,
        ..Default::default()
    };
    let ev = RadialEvolution::new(&cone, RadialBump::compact(1.0), grid).unwrap();
    let u0 = &ev.evolve(&[0.0]).unwrap()[0];
    let ratio = ev.lebesgue_norm(u0, 2.0) / ev.damped_norm();
    assert!((ratio - 1.0).abs() < 1e-6, "{ratio} captured {}", ev.captured_energy());
    assert!(ev.raw_norm() > 0.0);
}

#[test]
fn product_dispersive_exponent() {
    let cone = r3(60);
    let fit = dispersive_fit(&cone, &DispersiveConfig::standard(&cone)).unwrap();
    assert!((fit.alpha + 1.5).abs() <= 0.1, "α = {}", fit.alpha);
    assert!(fit.eps_sensitivity() < 0.02);
    let mut csv = Vec::new();
    fit.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.contains("t,sup_abs,sup_abs_half_eps,alpha\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), fit.times.len() + 1);
}

#[test]
fn dispersive_fit_needs_eight_times() {
    let cone = r3(60);
    let mut cfg = DispersiveConfig::standard(&cone);
    cfg.times = geometric(0.02, 1.0, 5);
    assert!(matches!(dispersive_fit(&cone, &cfg), Err(Error::InvalidParameter(_))));
}

#[test]
fn low_energy_part_is_uniformly_bounded() {
    let cone = r3(60);
    let cfg = DispersiveConfig::standard(&cone);
    let check = low_energy_check(&cone, &cfg).unwrap();
    assert!(check.sup_kernel <= check.bound, "{check:?}");
}
