//! Distances on the cone, the geometric/diffractive split and sampled points
//! of the geometric Legendrian.

use std::f64::consts::PI;

use crate::cross_section::{CrossSection, CrossSectionKind};
use crate::error::{Error, Result};

/// A point of the cross-section: an angle on a circle, or a unit vector in
/// `R^{m+1}` on the round sphere `Sᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub enum CrossPoint {
    Angle(f64),
    Sphere(Vec<f64>),
}

impl CrossPoint {
    /// Point of `S²` from polar angle `theta` and azimuth `phi`.
    pub fn spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        CrossPoint::Sphere(vec![st * cp, st * sp, ct])
    }

    /// Normalized sphere point from arbitrary non-zero coordinates.
    pub fn unit(coords: &[f64]) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("sphere point must be non-zero".into()));
        }
        Ok(CrossPoint::Sphere(coords.iter().map(|c| c / norm).collect()))
    }
}

/// `(x, y)` with `x ≥ 0`; `x = 0` is the tip whatever `y` is.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint {
    pub x: f64,
    pub y: CrossPoint,
}

impl ConePoint {
    pub fn new(x: f64, y: CrossPoint) -> Self {
        Self { x, y }
    }

    pub fn is_tip(&self) -> bool {
        self.x == 0.0
    }
}

fn validate_point(cs: &CrossSection, y: &CrossPoint) -> Result<()> {
    match (cs.kind(), y) {
        (CrossSectionKind::Circle { .. }, CrossPoint::Angle(a)) if a.is_finite() => Ok(()),
        (CrossSectionKind::RoundSphere { dim: 1 }, CrossPoint::Angle(a)) if a.is_finite() => Ok(()),
        (CrossSectionKind::RoundSphere { dim }, CrossPoint::Sphere(v)) if v.len() == dim + 1 => {
            let n2: f64 = v.iter().map(|c| c * c).sum();
            if (n2 - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "sphere point has squared norm {n2}, expected 1"
                )));
            }
            Ok(())
        }
        _ => Err(Error::InvalidParameter(format!(
            "point {y:?} does not lie on cross-section {:?}",
            cs.kind()
        ))),
    }
}

/// Geodesic distance in `(Y, h₀)`; in `[0, L/2]` on a circle of length `L`
/// and in `[0, π]` on a sphere.
pub fn cross_distance(cs: &CrossSection, y: &CrossPoint, y_prime: &CrossPoint) -> Result<f64> {
    validate_point(cs, y)?;
    validate_point(cs, y_prime)?;
    Ok(match (y, y_prime) {
        (CrossPoint::Angle(a), CrossPoint::Angle(b)) => {
            let length = match cs.kind() {
                CrossSectionKind::Circle { length } => length,
                CrossSectionKind::RoundSphere { .. } => 2.0 * PI,
            };
            let d = (a - b).rem_euclid(length);
            d.min(length - d)
        }
        (CrossPoint::Sphere(u), CrossPoint::Sphere(v)) => sphere_angle(u, v),
        _ => unreachable!("validated above"),
    })
}

/// Angle between unit vectors, accurate for nearly equal and nearly
/// antipodal pairs.
fn sphere_angle(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let perp: f64 = u
        .iter()
        .zip(v)
        .map(|(a, b)| (b - dot * a).powi(2))
        .sum::<f64>()
        .sqrt();
    perp.atan2(dot)
}

/// Distance on the product cone with link distance `gamma`: the law of
/// cosines when `gamma < π`, otherwise the path `x + x′` through the tip.
pub fn cone_distance_from_angle(x: f64, x_prime: f64, gamma: f64) -> f64 {
    if gamma >= PI {
        return x + x_prime;
    }
    let s = (0.5 * gamma).sin();
    ((x - x_prime).powi(2) + 4.0 * x * x_prime * s * s).sqrt()
}

pub fn cone_distance(cs: &CrossSection, z: &ConePoint, z_prime: &ConePoint) -> Result<f64> {
    if !(z.x >= 0.0) || !(z_prime.x >= 0.0) {
        return Err(Error::InvalidParameter("radial coordinates must be non-negative".into()));
    }
    let gamma = cross_distance(cs, &z.y, &z_prime.y)?;
    Ok(cone_distance_from_angle(z.x, z_prime.x, gamma))
}

/// True when a geodesic between the two rays misses the tip.
pub fn is_geometric(cs: &CrossSection, y: &CrossPoint, y_prime: &CrossPoint) -> Result<bool> {
    Ok(cross_distance(cs, y, y_prime)? < PI)
}

/// A point of the geometric Legendrian in `(s, s′)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPoint {
    pub s: f64,
    pub s_prime: f64,
    pub rho_tilde: f64,
    pub tau: f64,
    pub tau_prime: f64,
    pub mu_norm: f64,
    pub mu_prime_norm: f64,
    pub y: CrossPoint,
    pub y_prime: CrossPoint,
}

/// Evaluates the closed-form flow: `τ = −cos s`, `τ′ = cos s′`,
/// `ρ̃ = sin s / sin s′`, `|μ| = sin s`, `|μ′| = sin s′`, with `y(s)` and
/// `y′(s′)` on the unit-speed geodesic from `(y₀, μ̂₀)`.
///
/// `direction` is a sign (one entry) on a circle, or a tangent vector at
/// `y₀` on a sphere.
pub fn flow_point(
    cs: &CrossSection,
    y0: &CrossPoint,
    direction: &[f64],
    s: f64,
    s_prime: f64,
) -> Result<FlowPoint> {
    validate_point(cs, y0)?;
    for v in [s, s_prime] {
        if !(0.0..=PI).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "flow parameters must lie in [0, π], got {v}"
            )));
        }
    }
    let sin_sp = s_prime.sin();
    if sin_sp.abs() < 1e-300 || s_prime == 0.0 || s_prime == PI {
        return Err(Error::Domain {
            func: "flow_point",
            detail: format!("projective coordinate singular at s' = {s_prime}"),
        });
    }
    let along = geodesic(cs, y0, direction)?;
    Ok(FlowPoint {
        s,
        s_prime,
        rho_tilde: s.sin() / sin_sp,
        tau: -s.cos(),
        tau_prime: s_prime.cos(),
        mu_norm: s.sin(),
        mu_prime_norm: sin_sp,
        y: along(s),
        y_prime: along(s_prime),
    })
}

fn geodesic(
    cs: &CrossSection,
    y0: &CrossPoint,
    direction: &[f64],
) -> Result<Box<dyn Fn(f64) -> CrossPoint>> {
    match y0 {
        CrossPoint::Angle(theta0) => {
            let sign = match direction {
                [d] if *d != 0.0 => d.signum(),
                _ => {
                    return Err(Error::InvalidParameter(
                        "circle direction must be a single non-zero sign".into(),
                    ))
                }
            };
            let length = match cs.kind() {
                CrossSectionKind::Circle { length } => length,
                CrossSectionKind::RoundSphere { .. } => 2.0 * PI,
            };
            let theta0 = *theta0;
            Ok(Box::new(move |s| {
                CrossPoint::Angle((theta0 + sign * s).rem_euclid(length))
            }))
        }
        CrossPoint::Sphere(p) => {
            if direction.len() != p.len() {
                return Err(Error::InvalidParameter(
                    "sphere direction must have the ambient dimension".into(),
                ));
            }
            let dot: f64 = p.iter().zip(direction).map(|(a, b)| a * b).sum();
            let tangent: Vec<f64> = direction.iter().zip(p).map(|(d, a)| d - dot * a).collect();
            let norm = tangent.iter().map(|c| c * c).sum::<f64>().sqrt();
            if !(norm > 1e-12) {
                return Err(Error::InvalidParameter(
                    "sphere direction has no tangential component".into(),
                ));
            }
            let tangent: Vec<f64> = tangent.iter().map(|c| c / norm).collect();
            let p = p.clone();
            Ok(Box::new(move |s| {
                let (sn, cs) = s.sin_cos();
                CrossPoint::Sphere(p.iter().zip(&tangent).map(|(a, t)| cs * a + sn * t).collect())
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> CrossSection {
        CrossSection::round_sphere(2, 1).unwrap()
    }

    #[test]
    fn sphere_distances() {
        let cs = s2();
        let a = CrossPoint::spherical(0.3, 1.0);
        let b = CrossPoint::spherical(PI - 0.3, 1.0 + PI);
        assert!((cross_distance(&cs, &a, &b).unwrap() - PI).abs() < 1e-12);
        assert_eq!(cross_distance(&cs, &a, &a).unwrap(), 0.0);
        assert!(!is_geometric(&cs, &a, &b).unwrap());
        assert!(is_geometric(&cs, &a, &a).unwrap());
    }

    #[test]
    fn long_circle_distances() {
        let cs = CrossSection::circle(4.0 * PI, 1).unwrap();
        let d = cross_distance(&cs, &CrossPoint::Angle(0.0), &CrossPoint::Angle(PI)).unwrap();
        assert!((d - PI).abs() < 1e-15);
        assert!(!is_geometric(&cs, &CrossPoint::Angle(0.0), &CrossPoint::Angle(3.5)).unwrap());
        assert!(is_geometric(&cs, &CrossPoint::Angle(0.0), &CrossPoint::Angle(3.0)).unwrap());
        let d = cross_distance(&cs, &CrossPoint::Angle(0.5), &CrossPoint::Angle(4.0 * PI - 0.5)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cone_distance_special_cases() {
        assert!((cone_distance_from_angle(1.0, 2.5, 0.0) - 1.5).abs() < 1e-15);
        assert!((cone_distance_from_angle(3.0, 4.0, PI / 2.0) - 5.0).abs() < 1e-14);
        assert_eq!(cone_distance_from_angle(1.0, 2.0, 3.5), 3.0);
        let below = cone_distance_from_angle(1.0, 2.0, PI * (1.0 - 1e-12));
        assert!((below - 3.0).abs() < 1e-10);
    }

    #[test]
    fn mismatched_point_rejected() {
        let cs = s2();
        assert!(cross_distance(&cs, &CrossPoint::Angle(0.0), &CrossPoint::spherical(0.0, 0.0)).is_err());
        assert!(cross_distance(&cs, &CrossPoint::Sphere(vec![1.0, 1.0, 0.0]), &CrossPoint::spherical(0.0, 0.0)).is_err());
    }

    #[test]
    fn flow_point_identities() {
        let cs = s2();
        let y0 = CrossPoint::spherical(0.4, 0.2);
        let fp = flow_point(&cs, &y0, &[0.0, 0.0, 1.0], 1.0, 2.0).unwrap();
        assert!((fp.tau * fp.tau + fp.mu_norm * fp.mu_norm - 1.0).abs() < 1e-15);
        assert!((fp.rho_tilde - 1f64.sin() / 2f64.sin()).abs() < 1e-15);
        // both ends lie on one unit-speed geodesic
        assert!((cross_distance(&cs, &fp.y, &fp.y_prime).unwrap() - 1.0).abs() < 1e-12);
        assert!((cross_distance(&cs, &y0, &fp.y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flow_point_diagonal_and_left_face() {
        let cs = CrossSection::circle(2.0 * PI, 1).unwrap();
        let y0 = CrossPoint::Angle(0.0);
        let fp = flow_point(&cs, &y0, &[1.0], 0.8, 0.8).unwrap();
        assert_eq!(fp.rho_tilde, 1.0);
        assert_eq!(fp.tau, -fp.tau_prime);
        assert_eq!(fp.y, fp.y_prime);

        let fp = flow_point(&cs, &y0, &[1.0], 1e-9, 1.2).unwrap();
        assert!(fp.rho_tilde < 1e-8);
        assert!((fp.tau + 1.0).abs() < 1e-15);
        assert!(fp.mu_norm < 1e-8);
    }

    #[test]
    fn flow_point_singular_coordinate() {
        let cs = CrossSection::circle(2.0 * PI, 1).unwrap();
        let err = flow_point(&cs, &CrossPoint::Angle(0.0), &[1.0], 0.5, 0.0);
        assert!(matches!(err, Err(Error::Domain { .. })));
    }
}
