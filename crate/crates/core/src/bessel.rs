//! Cylinder functions `J_ν`, `Y_ν` and `H¹_ν = J_ν + i Y_ν` of real order
//! `0 ≤ ν ≤ 60` and positive real argument.
//!
//! Three regimes are used:
//!
//! * small argument (`x < 2`): the ascending power series for `J_ν`;
//! * large argument (`x ≥ max(30, 2ν²)`): the Hankel asymptotic expansion,
//!   summed until the terms stop decreasing;
//! * otherwise: Temme's series (`x < 2`) or Steed's continued fraction
//!   (`x ≥ 2`) for `Y_μ` with `|μ| ≤ 1/2`, the continued fraction for
//!   `J′_ν / J_ν`, downward recurrence for `J` and the Wronskian to fix the
//!   normalization.
//!
//! The Wronskian `J_ν Y′_ν − J′_ν Y_ν = 2/(πx)` holds to rounding in every
//! regime and is the main self-check in the test-suite.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest order accepted by the evaluators.
pub const MAX_ORDER: f64 = 60.0;

const EPS: f64 = 1.0e-16;
const FPMIN: f64 = 1.0e-300;
const MAXIT: usize = 100_000;
const XMIN: f64 = 2.0;
const RESCALE: f64 = 1.0e250;

/// Values of `J_ν`, `Y_ν` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderEval {
    pub nu: f64,
    pub x: f64,
    pub j: f64,
    pub jp: f64,
    pub y: f64,
    pub yp: f64,
}

impl CylinderEval {
    pub fn h1(&self) -> Complex64 {
        Complex64::new(self.j, self.y)
    }

    pub fn h1_prime(&self) -> Complex64 {
        Complex64::new(self.jp, self.yp)
    }

    /// `J Y′ − J′ Y`, which should equal `2/(πx)`.
    pub fn wronskian(&self) -> f64 {
        self.j * self.yp - self.jp * self.y
    }
}

fn check_order(func: &'static str, nu: f64) -> Result<()> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::Domain {
            func,
            detail: format!("order {nu} must be finite and non-negative"),
        });
    }
    if nu > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            func,
            order: nu,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// `J_ν(x)` for `x ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_order("bessel_j", nu)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            func: "bessel_j",
            detail: format!("argument {x} must be finite and non-negative"),
        });
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x < XMIN {
        return Ok(j_series(nu, x));
    }
    Ok(eval_unchecked(nu, x).j)
}

/// `Y_ν(x)` for `x > 0`.
pub fn bessel_y(nu: f64, x: f64) -> Result<f64> {
    Ok(cylinder_checked("bessel_y", nu, x)?.y)
}

/// `H¹_ν(x) = J_ν(x) + i Y_ν(x)` for `x > 0`.
pub fn hankel1(nu: f64, x: f64) -> Result<Complex64> {
    Ok(cylinder_checked("hankel1", nu, x)?.h1())
}

/// All four values `J, J′, Y, Y′` at `(ν, x)`, `x > 0`.
pub fn cylinder(nu: f64, x: f64) -> Result<CylinderEval> {
    cylinder_checked("cylinder", nu, x)
}

fn cylinder_checked(func: &'static str, nu: f64, x: f64) -> Result<CylinderEval> {
    check_order(func, nu)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            func,
            detail: format!("argument {x} must be finite and positive"),
        });
    }
    Ok(eval_unchecked(nu, x))
}

/// Evaluates the cylinder functions without argument validation.
pub(crate) fn eval_unchecked(nu: f64, x: f64) -> CylinderEval {
    if x >= asymptotic_threshold(nu) {
        let (h, hp) = hankel_expansion(nu, x);
        return CylinderEval {
            nu,
            x,
            j: h.re,
            jp: hp.re,
            y: h.im,
            yp: hp.im,
        };
    }
    let mut eval = temme_steed(nu, x);
    if x < XMIN {
        // The series is free of the scaling issues of the recurrence for
        // tiny arguments; J′ follows from J_{ν+1}.
        let j = j_series(nu, x);
        let j_next = j_series(nu + 1.0, x);
        eval.j = j;
        eval.jp = nu / x * j - j_next;
    }
    eval
}

fn asymptotic_threshold(nu: f64) -> f64 {
    30.0_f64.max(2.0 * nu * nu)
}

/// Ascending series, used for `x < 2` where every term is bounded by
/// `e^{x²/4}` times the leading one.
fn j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let log_lead = nu * half.ln() - ln_gamma(nu + 1.0);
    let lead = log_lead.exp();
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Hankel coefficient `a_k(ν) = ∏_{j=1}^{k} (4ν² − (2j−1)²) / (k! 8^k)`.
pub fn hankel_coefficient(nu: f64, k: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    for j in 1..=k {
        let odd = (2 * j - 1) as f64;
        a *= (mu - odd * odd) / (j as f64 * 8.0);
    }
    a
}

/// Hankel asymptotic expansion truncated after `k_max + 1` terms:
///
/// `H¹_ν(x) ≈ √(2/(πx)) e^{i(x − νπ/2 − π/4)} Σ_{k ≤ K} a_k(ν) (i/x)^k`.
///
/// Valid for `x ≥ max(10, 2ν²)` and `K ≤ 10`.
pub fn hankel1_asymptotic(nu: f64, x: f64, k_max: usize) -> Result<Complex64> {
    check_order("hankel1_asymptotic", nu)?;
    let threshold = 10.0_f64.max(2.0 * nu * nu);
    if !(x >= threshold) || !x.is_finite() {
        return Err(Error::Domain {
            func: "hankel1_asymptotic",
            detail: format!("argument {x} below validity threshold {threshold}"),
        });
    }
    if k_max > 10 {
        return Err(Error::InvalidParameter(format!(
            "hankel1_asymptotic: at most 10 correction terms, got {k_max}"
        )));
    }
    let step = Complex64::new(0.0, 1.0 / x);
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=k_max {
        sum += hankel_coefficient(nu, k) * power;
        power *= step;
    }
    Ok(leading_factor(nu, x) * sum)
}

fn leading_factor(nu: f64, x: f64) -> Complex64 {
    let phase = x - nu * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * Complex64::from_polar(1.0, phase)
}

/// Full asymptotic sum (until terms stop shrinking) and its derivative.
fn hankel_expansion(nu: f64, x: f64) -> (Complex64, Complex64) {
    let mu = 4.0 * nu * nu;
    let i_over_x = Complex64::new(0.0, 1.0 / x);
    let mut term = Complex64::new(1.0, 0.0);
    let mut s = term;
    let mut ds = Complex64::new(0.0, 0.0);
    let mut last = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0) * i_over_x;
        let mag = term.norm();
        if mag > last {
            break;
        }
        s += term;
        ds += -(k as f64) / x * term;
        last = mag;
        if mag < 1e-17 * s.norm() {
            break;
        }
    }
    let lead = leading_factor(nu, x);
    let h = lead * s;
    let hp = h * Complex64::new(-0.5 / x, 1.0) + lead * ds;
    (h, hp)
}

/// Chebyshev evaluation of `Γ₁, Γ₂` for Temme's series, `|μ| ≤ 1/2`.
/// Returns `(Γ₁, Γ₂, 1/Γ(1+μ), 1/Γ(1−μ))`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    const C1: [f64; 7] = [
        -1.142022680371168e0,
        6.5165112670737e-3,
        3.087090173086e-4,
        -3.4706269649e-6,
        6.9437664e-9,
        3.67795e-11,
        -1.356e-13,
    ];
    const C2: [f64; 8] = [
        1.843740587300905e0,
        -7.68528408447867e-2,
        1.2719271366546e-3,
        -4.9717367042e-6,
        -3.31261198e-8,
        2.423096e-10,
        -1.702e-13,
        -1.49e-15,
    ];
    let xx = 8.0 * mu * mu - 1.0;
    let gam1 = chebyshev(&C1, xx);
    let gam2 = chebyshev(&C2, xx);
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

fn chebyshev(c: &[f64], x: f64) -> f64 {
    let (mut d, mut dd) = (0.0, 0.0);
    let x2 = 2.0 * x;
    for &cj in c.iter().skip(1).rev() {
        let sv = d;
        d = x2 * d - dd + cj;
        dd = sv;
    }
    x * d - dd + 0.5 * c[0]
}

/// Temme / Steed evaluation of `J, J′, Y, Y′` for `x > 0`.
fn temme_steed(nu: f64, x: f64) -> CylinderEval {
    let nl = if x < XMIN {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // Continued fraction for f_ν = J′_ν / J_ν.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    // Downward recurrence from ν to μ with arbitrary normalization.
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl;
    let mut rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > RESCALE {
            rjl /= RESCALE;
            rjpl /= RESCALE;
            rjl1 /= RESCALE;
            rjp1 /= RESCALE;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, rymup, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS {
            1.0
        } else {
            pimu2.sin() / pimu2
        };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                break;
            }
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // Steed's CF2 for p + iq = (J′_μ + iY′_μ)/(J_μ + iY_μ).
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        for i in 2..MAXIT {
            a += (2 * (i - 1)) as f64;
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                break;
            }
        }
        let gam = (p - f) / q;
        let mut mu_val = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            mu_val = -mu_val;
        }
        rjmu = mu_val;
        rymu = rjmu * gam;
        rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }
    let _ = rymup;

    let scale = rjmu / rjl;
    let j = rjl1 * scale;
    let jp = rjp1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    CylinderEval {
        nu,
        x,
        j,
        jp,
        y: rymu,
        yp: nu * xi * rymu - ry1,
    }
}

/// `J_{ν₀+k}(x)` for `k = 0..count`, by downward recurrence from two
/// directly evaluated top orders.
pub fn bessel_j_ladder(nu0: f64, count: usize, x: f64) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let top = nu0 + (count - 1) as f64;
    check_order("bessel_j_ladder", nu0)?;
    check_order("bessel_j_ladder", top)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            func: "bessel_j_ladder",
            detail: format!("argument {x} must be finite and non-negative"),
        });
    }
    let mut out = vec![0.0; count];
    if x == 0.0 {
        if nu0 == 0.0 {
            out[0] = 1.0;
        }
        return Ok(out);
    }
    if count == 1 {
        out[0] = bessel_j(nu0, x)?;
        return Ok(out);
    }
    let (j_top, j_below) = if x < XMIN {
        (j_series(top, x), j_series(top - 1.0, x))
    } else {
        let ev = eval_unchecked(top, x);
        (ev.j, top / x * ev.j + ev.jp)
    };
    if j_top == 0.0 && j_below == 0.0 {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = bessel_j(nu0 + k as f64, x)?;
        }
        return Ok(out);
    }
    out[count - 1] = j_top;
    out[count - 2] = j_below;
    for k in (0..count - 2).rev() {
        let order = nu0 + (k + 1) as f64;
        out[k] = 2.0 * order / x * out[k + 1] - out[k + 2];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(2.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn half_order_closed_form() {
        let x = FRAC_PI_2;
        let j = bessel_j(0.5, x).unwrap();
        assert!((j - 2.0 / PI).abs() < 1e-14);
        let y = bessel_y(0.5, x).unwrap();
        assert!(y.abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(bessel_j(-1.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_j(1.0, -1.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_y(1.0, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(
            bessel_j(60.5, 1.0),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn hankel_coefficients_vanish_for_half_integers() {
        assert_eq!(hankel_coefficient(0.5, 1), 0.0);
        assert_eq!(hankel_coefficient(1.5, 2), 0.0);
        assert_eq!(hankel_coefficient(3.0, 0), 1.0);
        // a_1(1) = 3/8
        assert!((hankel_coefficient(1.0, 1) - 0.375).abs() < 1e-16);
    }

    #[test]
    fn asymptotic_leading_term() {
        let (nu, x) = (1.7, 40.0);
        let lead = hankel1_asymptotic(nu, x, 0).unwrap();
        let want = (2.0 / (PI * x)).sqrt()
            * Complex64::from_polar(1.0, x - nu * FRAC_PI_2 - FRAC_PI_4);
        assert!((lead - want).norm() < 1e-15);
        assert!(hankel1_asymptotic(1.0, 5.0, 2).is_err());
        assert!(hankel1_asymptotic(4.0, 20.0, 2).is_err());
        assert!(hankel1_asymptotic(1.0, 20.0, 11).is_err());
    }

    #[test]
    fn ladder_matches_direct_calls() {
        for &x in &[0.3, 1.9, 2.5, 17.0, 45.0] {
            let ladder = bessel_j_ladder(0.5, 40, x).unwrap();
            for (k, v) in ladder.iter().enumerate() {
                let direct = bessel_j(0.5 + k as f64, x).unwrap();
                assert!(
                    (v - direct).abs() <= 1e-12 * direct.abs() + 1e-14,
                    "k={k} x={x}: {v} vs {direct}"
                );
            }
        }
    }
}
