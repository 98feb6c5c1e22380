//! Pseudo-hyperbolic and hyperbolic metrics on the ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, CONE};

/// Above this value of `rho` the hyperbolic distance is reported as
/// saturated instead of being computed.
pub const RHO_SATURATION: f64 = 1.0 - 1e-15;

/// `atanh(RHO_SATURATION)`, the value reported for saturated distances.
pub fn beta_cap() -> f64 {
    RHO_SATURATION.atanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub rho: f64,
    pub beta: f64,
    /// `rho` was too close to 1 for `beta` to be meaningful; `beta` is capped.
    pub saturated: bool,
}

impl MetricValue {
    pub fn from_rho(rho: f64) -> Self {
        if rho >= RHO_SATURATION {
            Self { rho, beta: beta_cap(), saturated: true }
        } else {
            Self { rho, beta: rho.atanh(), saturated: false }
        }
    }
}

/// `rho(x, y) = ||phi_x(y)||`.
///
/// Evaluated through `1 - rho^2 = (1 - ||x||^2)(1 - ||y||^2) / |1 - <x, y>|^2`,
/// rearranged so that the numerator of `rho^2` is a sum of nonnegative terms:
/// with `d = y - x` split into its components along and orthogonal to `x`,
/// `rho^2 |1 - <x,y>|^2 = ||d_par||^2 + (1 - ||x||^2) ||d_perp||^2`.
/// This avoids the cancellation of the textbook radicand near the diagonal.
pub fn pseudo_hyperbolic(x: &Point, y: &Point) -> Result<f64> {
    check_pair(x, y)?;
    Ok(rho_unchecked(x, y))
}

pub(crate) fn rho_unchecked(x: &Point, y: &Point) -> f64 {
    let d = y - x;
    let nx2 = x.norm_sq();
    let (par2, perp2) = if nx2 == 0.0 {
        (d.norm_sq(), 0.0)
    } else {
        let par = x.scale(d.inner(x) / nx2);
        let perp = &d - &par;
        (par.norm_sq(), perp.norm_sq())
    };
    let denom = (CONE - x.inner(y)).norm_sqr();
    let rho2 = ((par2 + (1.0 - nx2) * perp2) / denom).max(0.0);
    rho2.sqrt()
}

/// The textbook radicand form, `sqrt(max(0, 1 - (1-|x|^2)(1-|y|^2)/|1-<x,y>|^2))`.
/// Kept as an independent route for cross-checks.
pub fn pseudo_hyperbolic_closed_form(x: &Point, y: &Point) -> Result<f64> {
    check_pair(x, y)?;
    let denom = (CONE - x.inner(y)).norm_sqr();
    let radicand = 1.0 - x.defect() * y.defect() / denom;
    Ok(radicand.max(0.0).sqrt())
}

/// `beta(x, y) = atanh(rho(x, y))`, capped at [`beta_cap`] near the boundary.
pub fn hyperbolic(x: &Point, y: &Point) -> Result<f64> {
    Ok(metric(x, y)?.beta)
}

pub fn metric(x: &Point, y: &Point) -> Result<MetricValue> {
    Ok(MetricValue::from_rho(pseudo_hyperbolic(x, y)?))
}

/// Scalar pseudo-hyperbolic distance on the disk, `|z - w| / |1 - conj(z) w|`.
pub fn disk_rho(z: num_complex::Complex64, w: num_complex::Complex64) -> f64 {
    (z - w).norm() / (CONE - z.conj() * w).norm()
}

fn check_pair(x: &Point, y: &Point) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    x.ensure_interior("first argument")?;
    y.ensure_interior("second argument")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::c;

    fn p(v: &[(f64, f64)]) -> Point {
        Point::new(v.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn distance_to_origin_is_norm() {
        let x = p(&[(0.3, -0.2), (0.1, 0.5)]);
        let r = pseudo_hyperbolic(&x, &Point::zeros(2)).unwrap();
        assert!((r - x.norm()).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_pair() {
        let x = p(&[(0.5, 0.0), (0.0, 0.0)]);
        let y = p(&[(0.0, 0.0), (0.5, 0.0)]);
        let r = pseudo_hyperbolic(&x, &y).unwrap();
        assert!((r - 0.4375f64.sqrt()).abs() < 1e-15);
        assert!((r - 0.661438).abs() < 1e-6);
        let b = hyperbolic(&x, &y).unwrap();
        assert!((b - 0.795365).abs() < 1e-6);
    }

    #[test]
    fn scalar_pair_matches_disk() {
        let x = p(&[(0.5, 0.0)]);
        let y = p(&[(-0.5, 0.0)]);
        assert!((pseudo_hyperbolic(&x, &y).unwrap() - 0.8).abs() < 1e-15);
        assert!((disk_rho(c(0.5, 0.0), c(-0.5, 0.0)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_examples() {
        let x = p(&[(0.5, 0.0), (0.0, 0.0)]);
        assert_eq!(hyperbolic(&x, &x).unwrap(), 0.0);
        let b = hyperbolic(&x, &Point::zeros(2)).unwrap();
        assert!((b - 0.549306).abs() < 1e-6);
    }

    #[test]
    fn saturation_is_flagged() {
        let m = MetricValue::from_rho(1.0 - 1e-17);
        assert!(m.saturated);
        assert!(m.beta.is_finite());
        assert!(!MetricValue::from_rho(0.5).saturated);
    }

    #[test]
    fn rejects_boundary_points() {
        let x = p(&[(1.0, 0.0)]);
        assert!(pseudo_hyperbolic(&x, &Point::zeros(1)).is_err());
    }

    #[test]
    fn stable_form_agrees_with_radicand_form() {
        let x = p(&[(0.3, 0.1), (-0.2, 0.4)]);
        let y = p(&[(-0.5, 0.2), (0.1, 0.1)]);
        let a = pseudo_hyperbolic(&x, &y).unwrap();
        let b = pseudo_hyperbolic_closed_form(&x, &y).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
