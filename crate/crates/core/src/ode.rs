//! Adaptive Dormand–Prince 5(4) integration of real first-order systems.
//!
//! Steps are clamped to land exactly on each requested stop; there is no
//! dense output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus the embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    /// Components below `floor · ‖y‖∞` are measured against that floor.
    pub floor: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            floor: 1e-3,
            max_steps: 1_000_000,
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn inf_norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

impl Dopri5 {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            ..Self::default()
        }
    }

    /// Integrates `y′ = f(x, y)` from `(x0, y0)` through `stops`, which
    /// must be monotone in the direction of integration. Returns the state
    /// at every stop.
    pub fn solve<const N: usize, F>(&self, op: &'static str, f: F, x0: f64, y0: [f64; N], stops: &[f64]) -> Result<Vec<[f64; N]>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut out = Vec::with_capacity(stops.len());
        let Some(&last) = stops.last() else {
            return Ok(out);
        };
        let dir = if last >= x0 { 1.0 } else { -1.0 };
        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y);
        let mut h = self.initial_step(x, &y, &k1, (last - x0).abs());
        let mut steps = 0usize;
        for &stop in stops {
            if (stop - x) * dir < 0.0 {
                return Err(Error::IntegrationFailure {
                    op,
                    detail: format!("stops not monotone at {stop}"),
                });
            }
            while (stop - x) * dir > 0.0 {
                steps += 1;
                if steps > self.max_steps {
                    return Err(Error::IntegrationFailure {
                        op,
                        detail: format!("step limit reached at x = {x}"),
                    });
                }
                let remaining = (stop - x).abs();
                let hit = h >= remaining * (1.0 - 1e-12);
                let step = if hit { remaining } else { h };
                let hs = dir * step;
                let k2 = f(x + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
                let k3 = f(x + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(x + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = f(
                    x + C5 * hs,
                    &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                );
                let xe = if hit { stop } else { x + hs };
                let k6 = f(
                    xe,
                    &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                );
                let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                let k7 = f(xe, &y_new);
                let err_vec = axpy(
                    &[0.0; N],
                    hs,
                    &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                );
                let floor = self.floor * inf_norm(&y).max(inf_norm(&y_new));
                let mut err = 0.0f64;
                for i in 0..N {
                    let sc = self.rtol * (y[i].abs().max(y_new[i].abs()) + floor);
                    let r = if sc > 0.0 { err_vec[i].abs() / sc } else { 0.0 };
                    err = err.max(r);
                }
                if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                    return Err(Error::IntegrationFailure {
                        op,
                        detail: format!("non-finite state near x = {x}"),
                    });
                }
                if err <= 1.0 {
                    x = xe;
                    y = y_new;
                    k1 = k7;
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // a clamped final step says nothing about the natural size
                    if !hit || grow < 1.0 {
                        h = step * grow;
                    }
                } else {
                    h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                    if h <= 1e-15 * x.abs().max(1e-300) {
                        return Err(Error::IntegrationFailure {
                            op,
                            detail: format!("step size underflow at x = {x}"),
                        });
                    }
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    fn initial_step<const N: usize>(&self, x: f64, y: &[f64; N], dy: &[f64; N], span: f64) -> f64 {
        let d0 = inf_norm(y);
        let d1 = inf_norm(dy);
        let guess = if d0 > 0.0 && d1 > 0.0 { 0.01 * d0 / d1 } else { 1e-6 * span };
        let local = if x != 0.0 { 0.1 * x.abs() } else { span };
        guess.min(local).min(span).max(1e-12 * span)
    }
}
