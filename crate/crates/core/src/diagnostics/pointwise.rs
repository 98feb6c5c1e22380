//! Pointwise quantities of a symbol: Schwarz–Pick slacks, the boundary
//! quotients `q1`, `q2`, and the ξ-direction estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, C64};
use crate::symbols::SymbolMap;

/// Below this defect `1 - |phi(z)|^2` the quotients are formed in log space.
pub const LOG_SPACE_DEFECT: f64 = 1e-12;

/// Slacks (right-hand side minus left-hand side) of the four Schwarz–Pick
/// inequalities at one point. Skipped entries carry slack 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzPickResiduals {
    /// `|<Rphi, phi>| <= |z| |phi| (1 - |phi|^2) / (1 - |z|^2)`
    pub sch2: f64,
    /// `(1 - |z|^2)/|z| |Rphi| + |phi|^2 |<Rphi/|Rphi|, phi/|phi|>|^2 <= 1`
    pub sl2: f64,
    /// `|Rphi| <= 2 (1 - |phi|^2)^(1/2) / (1 - |z|^2)`
    pub sch3: f64,
    /// `|phi(z)| <= |z|` (origin-fixing maps only)
    pub sch1: f64,
    pub skipped_sch2: bool,
    pub skipped_sl2: bool,
    pub skipped_sch1: bool,
}

impl SchwarzPickResiduals {
    pub fn min_slack(&self) -> f64 {
        self.sch2.min(self.sl2).min(self.sch3).min(self.sch1)
    }

    pub fn named(&self) -> [(&'static str, f64, bool); 4] {
        [
            ("sch2", self.sch2, self.skipped_sch2),
            ("sl2", self.sl2, self.skipped_sl2),
            ("sch3", self.sch3, false),
            ("sch1", self.sch1, self.skipped_sch1),
        ]
    }
}

pub fn schwarz_pick_residuals(phi: &SymbolMap, z: &Point) -> Result<SchwarzPickResiduals> {
    let w = phi.eval(z)?;
    let r = phi.radial(z)?;
    Ok(residuals_from(phi.fixes_origin(), z, &w, &r))
}

pub(crate) fn residuals_from(fixes_origin: bool, z: &Point, w: &Point, r: &Point) -> SchwarzPickResiduals {
    let (zn, wn, rn) = (z.norm(), w.norm(), r.norm());
    let (dz, dw) = (z.defect(), w.defect());
    let degenerate_phi = wn == 0.0;
    let sch2 = if degenerate_phi { 0.0 } else { zn * wn * dw / dz - r.inner(w).norm() };
    let sl2 = if degenerate_phi || zn == 0.0 {
        0.0
    } else {
        let angle = if rn > 0.0 { (r.inner(w) / (rn * wn)).norm_sqr() } else { 0.0 };
        1.0 - (dz / zn * rn + wn * wn * angle)
    };
    let sch3 = 2.0 * dw.max(0.0).sqrt() / dz - rn;
    let sch1 = if fixes_origin { zn - wn } else { 0.0 };
    SchwarzPickResiduals {
        sch2,
        sl2,
        sch3,
        sch1,
        skipped_sch2: degenerate_phi,
        skipped_sl2: degenerate_phi || zn == 0.0,
        skipped_sch1: !fixes_origin,
    }
}

/// `num / (1 - |w|^2)^power`, via logarithms once the defect is tiny.
fn over_defect(num: f64, w: &Point, power: f64) -> Result<f64> {
    let dw = w.defect();
    if dw <= 0.0 {
        return Err(Error::OutsideBall { what: "symbol value", norm: w.norm() });
    }
    if num == 0.0 {
        return Ok(0.0);
    }
    if dw < LOG_SPACE_DEFECT {
        Ok((num.ln() - power * dw.ln()).exp())
    } else {
        Ok(num / dw.powf(power))
    }
}

pub(crate) fn q1_from(z: &Point, w: &Point, r: &Point) -> Result<f64> {
    over_defect(z.defect() * r.norm(), w, 0.5)
}

pub(crate) fn q2_from(z: &Point, w: &Point, r: &Point) -> Result<f64> {
    over_defect(z.defect() * w.inner(r).norm(), w, 1.0)
}

/// `(1 - |z|^2) |Rphi(z)| / sqrt(1 - |phi(z)|^2)`
pub fn q1(phi: &SymbolMap, z: &Point) -> Result<f64> {
    q1_from(z, &phi.eval(z)?, &phi.radial(z)?)
}

/// `(1 - |z|^2) |<phi(z), Rphi(z)>| / (1 - |phi(z)|^2)`
pub fn q2(phi: &SymbolMap, z: &Point) -> Result<f64> {
    q2_from(z, &phi.eval(z)?, &phi.radial(z)?)
}

/// `(1 - |z|^2) sqrt((1 - |phi|^2)|Rphi|^2 + |<Rphi, phi>|^2) / (1 - |phi|^2)`, which
/// bounds `(1 - |z|^2)|R(f ∘ phi)(z)|` for `|f|_inv <= 1` and never exceeds `sqrt 5`.
pub fn sqrt5_quantity(phi: &SymbolMap, z: &Point) -> Result<f64> {
    let (w, r) = (phi.eval(z)?, phi.radial(z)?);
    let a = q1_from(z, &w, &r)?;
    let b = q2_from(z, &w, &r)?;
    Ok(a.hypot(b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiDirection {
    pub xi: Point,
    pub eta: Point,
    /// `|<Rphi, xi>|` minus the lower bound
    /// `sqrt(1 - |phi|^2) |Rphi| - (1 + sqrt(1 - |phi|^2)/|phi|) |<Rphi, phi>|`.
    pub slack: f64,
    /// `eta` was chosen by the basis fallback because `Rphi` is parallel to `phi`.
    pub fallback: bool,
}

/// `xi = phi(z) + sqrt(1 - |phi(z)|^2) eta` with `eta` the normalized part of
/// `Rphi(z)` orthogonal to `phi(z)`; when that part vanishes, the first basis
/// vector not parallel to `phi(z)`, orthogonalized.
pub fn xi_direction(phi: &SymbolMap, z: &Point) -> Result<XiDirection> {
    let w = phi.eval(z)?;
    let r = phi.radial(z)?;
    xi_from(&w, &r)
}

pub(crate) fn xi_from(w: &Point, r: &Point) -> Result<XiDirection> {
    let wn2 = w.norm_sq();
    if wn2 == 0.0 {
        return Err(Error::Degenerate("phi(z) = 0".into()));
    }
    let orth = |v: &Point| v.axpy(-(v.inner(w) / wn2), w);
    let from_r = orth(r);
    let (eta, fallback) = match from_r.normalized().filter(|_| from_r.norm() > 1e-14 * r.norm().max(1e-300)) {
        Some(e) => (e, false),
        None => {
            let n = w.dim();
            let e = (0..n)
                .map(|k| orth(&Point::basis(n, k)))
                .find(|v| v.norm() > 1e-8)
                .and_then(|v| v.normalized())
                .ok_or_else(|| Error::Degenerate("phi(z) spans the whole space (n = 1)".into()))?;
            (e, true)
        }
    };
    let s = w.defect().max(0.0).sqrt();
    let xi = w.axpy(C64::new(s, 0.0), &eta);
    let rw = r.inner(w).norm();
    let bound = s * r.norm() - (1.0 + s / wn2.sqrt()) * rw;
    let slack = r.inner(&xi).norm() - bound;
    Ok(XiDirection { xi, eta, slack, fallback })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::c;
    use crate::symbols::{build_symbol, SymbolSpec};

    #[test]
    fn identity_quotients() {
        let id = build_symbol(&SymbolSpec::Identity, 3).unwrap();
        let z = Point::new(vec![c(0.3, 0.1), c(0.0, -0.5), c(0.2, 0.2)]).unwrap();
        let r2 = z.norm_sq();
        assert!((q2(&id, &z).unwrap() - r2).abs() < 1e-15);
        assert!((q1(&id, &z).unwrap() - z.norm() * (1.0 - r2).sqrt()).abs() < 1e-15);
        let sp = schwarz_pick_residuals(&id, &z).unwrap();
        assert!(sp.sch2.abs() < 1e-15);
        assert!(sp.min_slack() >= -1e-15);
    }

    #[test]
    fn constant_has_zero_quotients() {
        let k = build_symbol(&SymbolSpec::Constant { c: vec![c(0.2, 0.1)] }, 2).unwrap();
        let z = Point::from_real(&[0.4, 0.3]).unwrap();
        assert_eq!(q1(&k, &z).unwrap(), 0.0);
        assert_eq!(q2(&k, &z).unwrap(), 0.0);
        assert!(schwarz_pick_residuals(&k, &z).unwrap().min_slack() >= 0.0);
    }

    #[test]
    fn log_space_agrees_with_direct_form() {
        let z = Point::from_real(&[1.0 - 1e-13]).unwrap();
        let w = z.clone();
        let r = z.clone();
        let direct = z.defect() * w.inner(&r).norm() / w.defect();
        assert!((q2_from(&z, &w, &r).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn xi_orthogonal_example() {
        let w = Point::basis(2, 0).scale_real(0.6);
        let r = Point::basis(2, 1).scale_real(0.3);
        let x = xi_from(&w, &r).unwrap();
        assert!((x.xi.norm() - 1.0).abs() < 1e-15);
        assert!((x.xi.inner(&w).re - 0.36).abs() < 1e-15);
        assert!(x.xi.distance(&Point::from_real(&[0.6, 0.8]).unwrap()) < 1e-15);
        assert!(x.slack >= -1e-12);
    }

    #[test]
    fn xi_parallel_uses_fallback() {
        let w = Point::from_real(&[0.3, 0.4]).unwrap();
        let x = xi_from(&w, &w.scale_real(2.0)).unwrap();
        assert!(x.fallback);
        assert!(x.eta.inner(&w).norm() < 1e-15);
        assert!(x.slack >= -1e-12);
        let one = Point::from_real(&[0.5]).unwrap();
        assert!(matches!(xi_from(&one, &one), Err(Error::Degenerate(_))));
    }
}
