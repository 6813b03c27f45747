//! Product-cone kernels against the flat-space closed forms in three
//! dimensions, plus structural properties of the mode sums.

use std::f64::consts::PI;

use conic_spectral::bessel::bessel_j;
use conic_spectral::cross_section::CrossSection;
use conic_spectral::kernels::{amplitude_ratio, PointPair, ProductCone, Sign};
use conic_spectral::quadrature::GaussLegendre;
use num_complex::Complex64;
use proptest::prelude::*;

fn r3() -> ProductCone {
    ProductCone::new(3, CrossSection::round_sphere(2, 40).unwrap()).unwrap()
}

/// `e^{iλd}/(4πd)`.
fn free_resolvent(lambda: f64, d: f64) -> Complex64 {
    Complex64::from_polar(1.0, lambda * d) / (4.0 * PI * d)
}

/// `λ² sin(λd)/(2π²λd)`.
fn free_measure(lambda: f64, d: f64) -> f64 {
    let s = if lambda * d == 0.0 { 1.0 } else { (lambda * d).sin() / (lambda * d) };
    lambda * lambda * s / (2.0 * PI * PI)
}

#[test]
fn unit_distance_resolvent() {
    // collinear radii 0.5 and 1.5 are a unit apart; equal radii converge
    // too slowly in the mode index for J = 40
    let s = r3()
        .resolvent(1.0, PointPair::new(0.5, 1.5, 0.0), 40, Sign::Out)
        .unwrap();
    let want = Complex64::new(0.042_995_6, 0.066_961_5);
    assert!((s.value - want).norm() < 1e-6, "{}", s.value);
    assert!((s.value - free_resolvent(1.0, 1.0)).norm() / free_resolvent(1.0, 1.0).norm() < 1e-6);
}

#[test]
fn free_space_resolvent_grid() {
    let cone = r3();
    for &lambda in &[0.8, 1.5, 2.2] {
        for &x in &[0.3, 0.6, 0.9] {
            for &(xp, gamma) in &[(1.8, 0.5), (2.6, 1.5), (3.4, 2.5)] {
                let pair = PointPair::new(x, xp, gamma);
                let d = pair.distance();
                assert!((0.5..=10.0).contains(&(lambda * d)));
                let got = cone.resolvent(lambda, pair, 40, Sign::Out).unwrap().value;
                let want = free_resolvent(lambda, d);
                let err = (got - want).norm() / want.norm();
                assert!(err <= 1e-6, "λ={lambda} x={x} x'={xp} γ={gamma}: {err:e}");
            }
        }
    }
}

#[test]
fn spectral_measure_matches_free_space() {
    let cone = r3();
    for &(lambda, x, xp, gamma) in &[(1.0, 0.5, 1.5, 0.4), (2.0, 1.0, 2.0, 2.0), (4.0, 0.7, 0.9, 1.0)] {
        let pair = PointPair::new(x, xp, gamma);
        let got = cone.spectral_measure(lambda, pair, 40).unwrap().value.re;
        let want = free_measure(lambda, pair.distance());
        assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-3), "{got} vs {want}");
    }
}

#[test]
fn spectral_measure_on_diagonal() {
    let got = r3().spectral_measure(1.0, PointPair::new(0.8, 0.8, 0.0), 40).unwrap();
    assert!(got.diagonal);
    assert!((got.value.re - 1.0 / (2.0 * PI * PI)).abs() < 1e-12);
    assert!((got.value.re - 0.050661).abs() < 1e-6);
}

#[test]
fn spectral_measure_is_twice_imaginary_resolvent() {
    // the measure sums J·J, the resolvent J·H; Stone's formula ties them
    let cone = ProductCone::new(4, CrossSection::round_sphere(3, 30).unwrap()).unwrap();
    for &(lambda, x, xp, gamma) in &[(1.0, 0.4, 1.1, 0.7), (2.5, 1.0, 1.6, 2.2), (0.3, 2.0, 0.5, 0.1)] {
        let pair = PointPair::new(x, xp, gamma);
        let de = cone.spectral_measure(lambda, pair, 30).unwrap().value.re;
        let r = cone.resolvent(lambda, pair, 30, Sign::Out).unwrap().value;
        let via_r = 2.0 * lambda / PI * r.im;
        assert!((de - via_r).abs() <= 1e-9 * de.abs().max(1e-12), "{de} vs {via_r}");
    }
}

#[test]
fn small_lambda_law_of_lowest_mode() {
    // dE ~ C λ^{2ν₀+1−(n−2)} with ν₀ = 1/2, n = 3: slope 1
    let cone = r3();
    let pair = PointPair::new(0.7, 1.3, 0.5);
    let a = cone.spectral_measure(1e-4, pair, 40).unwrap().value.re;
    let b = cone.spectral_measure(2e-4, pair, 40).unwrap().value.re;
    let slope = (b / a).ln() / 2f64.ln();
    assert!((slope - 2.0).abs() < 1e-3, "slope {slope}");
    // the density factor (xx′)^{−1/2} carries λ^{-(n-2)}: slope 2ν₀+1 = 2 in λ overall
}

#[test]
fn mode_tail_decays_like_small_argument_law() {
    let cone = r3();
    let (lambda, x) = (1.0, 0.5);
    let pair = PointPair::new(x, x, 0.0);
    let terms = cone.spectral_measure_terms(lambda, pair, 40).unwrap();
    for j in [5usize, 10, 20] {
        let nu = j as f64 + 0.5;
        let law = (lambda * x / 2.0).powf(nu) / statrs::function::gamma::gamma(nu + 1.0);
        let observed = bessel_j(nu, lambda * x).unwrap();
        assert!((observed / law - 1.0).abs() < 0.05, "j={j}");
        assert!(terms[j] > 0.0 && terms[j] < terms[j - 1]);
    }
}

#[test]
fn circle_cross_section_is_symmetric() {
    let cone = ProductCone::new(3, CrossSection::circle(2.0 * PI * 1.2, 40).unwrap()).unwrap();
    let pair = PointPair::new(0.3, 2.0, 2.0);
    let a = cone.spectral_measure(3.0, pair, 40).unwrap().value;
    let b = cone.spectral_measure(3.0, pair.swapped(), 40).unwrap().value;
    assert_eq!(a, b);
    let ra = cone.resolvent(3.0, pair, 40, Sign::Out).unwrap().value;
    let rb = cone.resolvent(3.0, pair.swapped(), 40, Sign::Out).unwrap().value;
    assert_eq!(ra, rb);
}

#[test]
fn amplitude_ratio_matches_free_closed_form() {
    let cone = r3();
    for &lambda in &[1.0, 5.0, 20.0, 40.0] {
        let pair = PointPair::new(0.5, 0.6, 0.8);
        let d = pair.distance();
        let de = cone.spectral_measure(lambda, pair, 40).unwrap().value.re;
        let ratio = amplitude_ratio(3, lambda, de, &pair, d);
        let closed = ((lambda * d).sin() / (lambda * d)).abs() * (1.0 + lambda * d) * 0.3 / (2.0 * PI * PI);
        assert!((ratio - closed).abs() < 1e-9, "λ={lambda}");
        assert!(ratio <= 0.3 / (PI * PI));
    }
    // on the diagonal at λ = 1 the ratio is the density value x²/(2π²)
    let pair = PointPair::new(1.0, 1.0, 0.0);
    let de = cone.spectral_measure(1.0, pair, 40).unwrap().value.re;
    assert!((amplitude_ratio(3, 1.0, de, &pair, 0.0) - 1.0 / (2.0 * PI * PI)).abs() < 1e-12);
}

/// `(P_Λ f)(x) = x^{−1/2} ∫₀^Λ λ J_{1/2}(λx) F(λ) dλ` for `f = e^{−αx²}`,
/// with `F(λ) = λ^{1/2}(2α)^{−3/2} e^{−λ²/4α}` its weighted Hankel transform.
fn low_pass_gaussian(alpha: f64, cutoff: f64, x: f64) -> f64 {
    let gl = GaussLegendre::new(16);
    gl.composite(0.0, cutoff, 0.25)
        .into_iter()
        .map(|(l, w)| {
            let f_hat = l.sqrt() * (2.0 * alpha).powf(-1.5) * (-l * l / (4.0 * alpha)).exp();
            w * l * bessel_j(0.5, l * x).unwrap() * f_hat
        })
        .sum::<f64>()
        / x.sqrt()
}

#[test]
fn low_pass_reconstruction_converges() {
    let alpha = 50.0;
    let xs: Vec<f64> = (1..=30).map(|k| 0.02 * k as f64).collect();
    let sup_err = |cutoff: f64| {
        xs.iter()
            .map(|&x| (low_pass_gaussian(alpha, cutoff, x) - (-alpha * x * x).exp()).abs())
            .fold(0.0, f64::max)
    };
    let errs: Vec<f64> = [20.0, 30.0, 40.0, 50.0, 60.0].iter().map(|&c| sup_err(c)).collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
    assert!(errs[4] < 1e-6, "{errs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_measure_is_positive_kernel(
        lambda in 0.2f64..8.0,
        pts in prop::collection::vec((0.1f64..3.0, 0.0f64..PI, 0.0f64..2.0 * PI), 2..6),
        weights in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let cone = r3();
        let units: Vec<[f64; 3]> = pts
            .iter()
            .map(|&(_, t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
            .collect();
        let mut quad = 0.0;
        for (a, pa) in pts.iter().enumerate() {
            for (b, pb) in pts.iter().enumerate() {
                let dot: f64 = (0..3).map(|k| units[a][k] * units[b][k]).sum();
                let gamma = dot.clamp(-1.0, 1.0).acos();
                let de = cone
                    .spectral_measure(lambda, PointPair::new(pa.0, pb.0, gamma), 40)
                    .unwrap()
                    .value
                    .re;
                quad += weights[a] * weights[b] * de;
            }
        }
        let scale: f64 = weights[..pts.len()].iter().map(|w| w.abs()).sum();
        prop_assert!(quad >= -1e-9 * scale * scale, "quadratic form {quad}");
    }

    #[test]
    fn resolvent_is_symmetric(
        lambda in 0.1f64..5.0,
        x in 0.1f64..3.0,
        xp in 0.1f64..3.0,
        gamma in 0.0f64..PI,
    ) {
        let cone = r3();
        let p = PointPair::new(x, xp, gamma);
        let a = cone.resolvent(lambda, p, 40, Sign::Out).unwrap().value;
        let b = cone.resolvent(lambda, p.swapped(), 40, Sign::Out).unwrap().value;
        prop_assert_eq!(a, b);
    }
}
