//! Declarative symbol families and their construction.
//!
//! Complex numbers serialize as `[re, im]`. Indices in family formulas are
//! 1-based as in the usual notation; storage is 0-based.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ScalarMap, SymbolMap};
use crate::error::{Error, Result};
use crate::mobius::MobiusAutomorphism;
use crate::point::{Point, C64, CONE, CZERO};
use crate::sampling::{seeded, stratified_radius};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SymbolSpec {
    /// `phi_m(z) = <z, xi_m>`; give either explicit `xi` vectors or `scales`
    /// for the orthogonal system `xi_m = c_m e_m`.
    Linear {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        xi: Option<Vec<Vec<C64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scales: Option<Vec<f64>>,
    },
    /// `phi(z) = sum_k F_k(z_k) e_k`; coordinates beyond `maps` are sent to 0.
    Diagonal { maps: Vec<ScalarSpec> },
    /// `phi_k(z) = z_k^k`.
    Power,
    /// Block sums `phi_k = sum_{j in block k} z_j^(2k)` or `psi_k = (sum_{j in block k} z_j^2)^k`,
    /// with blocks `(n_{k-1}, n_k]`; `blocks` lists the `n_k` (default `2^k` capped by `n`).
    BlockPower {
        #[serde(default)]
        variant: BlockVariant,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blocks: Option<Vec<usize>>,
    },
    /// `phi_m(z) = prod_{j=m}^{2m} z_j` for every `m` with `2m <= n`.
    ProductCom1,
    Automorphism { a: Vec<C64> },
    Identity,
    Constant { c: Vec<C64> },
    /// Polynomial components, one term list per output coordinate.
    Custom { components: Vec<Vec<TermSpec>> },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockVariant {
    #[default]
    Phi,
    Psi,
}

/// Scalar self-maps of the disk fixing 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarSpec {
    /// `λ^m`, `m >= 1`.
    Power { m: u32 },
    /// `c λ^m`, `|c| <= 1`, `m >= 1`.
    ScaledPower { c: C64, m: u32 },
    /// `λ (λ - a) / (1 - conj(a) λ)`, `|a| < 1`.
    Blaschke { a: C64 },
    Zero,
}

/// `coeff * prod z_k^e` with 0-based coordinate indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: C64,
    #[serde(default)]
    pub exponents: Vec<(usize, u32)>,
}

impl SymbolSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear { .. } => "linear",
            Self::Diagonal { .. } => "diagonal",
            Self::Power => "power",
            Self::BlockPower { variant: BlockVariant::Phi, .. } => "block_power_phi",
            Self::BlockPower { variant: BlockVariant::Psi, .. } => "block_power_psi",
            Self::ProductCom1 => "product_com1",
            Self::Automorphism { .. } => "automorphism",
            Self::Identity => "identity",
            Self::Constant { .. } => "constant",
            Self::Custom { .. } => "custom",
        }
    }
}

impl ScalarSpec {
    pub fn build(&self) -> Result<ScalarMap> {
        let bad = |reason: String| Error::InvalidSpec { family: "diagonal".into(), reason };
        Ok(match *self {
            Self::Power { m } => {
                if m == 0 {
                    return Err(bad("F_k(0) = 0 requires exponent m >= 1".into()));
                }
                ScalarMap::new(format!("λ^{m}"), move |l| l.powu(m))
                    .with_derivative(move |l| l.powu(m - 1) * m as f64)
                    .with_sup_bound(1.0)
            }
            Self::ScaledPower { c, m } => {
                if m == 0 {
                    return Err(bad("F_k(0) = 0 requires exponent m >= 1".into()));
                }
                if c.norm() > 1.0 {
                    return Err(bad(format!("F_k must map the disk into itself, |c| = {} > 1", c.norm())));
                }
                ScalarMap::new(format!("{c} λ^{m}"), move |l| c * l.powu(m))
                    .with_derivative(move |l| c * l.powu(m - 1) * m as f64)
                    .with_sup_bound(c.norm())
            }
            Self::Blaschke { a } => {
                if a.norm() >= 1.0 {
                    return Err(bad(format!("Blaschke parameter |a| = {} must be < 1", a.norm())));
                }
                let b = move |l: C64| (l - a) / (CONE - a.conj() * l);
                ScalarMap::new(format!("λ (λ - {a}) / (1 - conj(a) λ)"), move |l| l * b(l))
                    .with_derivative(move |l| {
                        let d = CONE - a.conj() * l;
                        b(l) + l * (1.0 - a.norm_sqr()) / (d * d)
                    })
                    .with_sup_bound(1.0)
            }
            Self::Zero => ScalarMap::new("0", |_| CZERO).with_derivative(|_| CZERO).with_sup_bound(0.0),
        })
    }
}

fn invalid(family: &str, reason: impl Into<String>) -> Error {
    Error::InvalidSpec { family: family.into(), reason: reason.into() }
}

fn padded(family: &str, what: &str, v: &[C64], n: usize) -> Result<Point> {
    if v.len() > n {
        return Err(invalid(family, format!("{what} has {} coordinates but n = {n}", v.len())));
    }
    let mut coords = v.to_vec();
    coords.resize(n, CZERO);
    Point::new(coords).map_err(|_| invalid(family, format!("{what} is not finite")))
}

fn point(coords: Vec<C64>) -> Point {
    Point::new(coords).unwrap_or_else(|_| Point::zeros(0))
}

/// Default block ends `n_k = 2^k`, the last one capped at `n`.
pub fn default_blocks(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        let end = (1usize << k).min(n);
        out.push(end);
        if end == n {
            return out;
        }
        k += 1;
    }
}

/// `sum_{m=1}^{M} (m+1)^-(m+1)`, the certified bound on `sup |phi|^2` for
/// `product_com1` with `M` components.
pub fn product_com1_sup_sq_bound(components: usize) -> f64 {
    (1..=components).map(|m| ((m + 1) as f64).powi(-(m as i32 + 1))).sum()
}

/// Largest singular value of the matrix with rows `conj(xi_m)`, i.e. `sup_{|z|<=1} |phi(z)|`
/// for the linear family.
pub fn linear_operator_norm(xi: &[Point]) -> f64 {
    if xi.is_empty() {
        return 0.0;
    }
    let n = xi[0].dim();
    let m = DMatrix::<C64>::from_fn(xi.len(), n, |i, j| xi[i][j].conj());
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn build_symbol(spec: &SymbolSpec, n: usize) -> Result<SymbolMap> {
    let family = spec.name();
    if n == 0 {
        return Err(invalid(family, "dimension must be positive"));
    }
    let basis: Vec<Point> = (0..n).map(|k| Point::basis(n, k)).collect();
    let map = match spec {
        SymbolSpec::Identity => SymbolMap::from_parts(n, family.into(), Arc::new(|z: &Point| z.clone()), None, true)?
            .with_radial(|z: &Point| z.clone())
            .with_seeds(basis),
        SymbolSpec::Constant { c } => {
            let c = padded(family, "c", c, n)?;
            if c.norm() >= 1.0 {
                return Err(invalid(family, format!("constant must lie in the ball, |c| = {}", c.norm())));
            }
            let bound = c.norm();
            let fixes = c.is_zero();
            let ce = c.clone();
            SymbolMap::from_parts(n, family.into(), Arc::new(move |_: &Point| ce.clone()), None, fixes)?
                .with_radial(move |_: &Point| Point::zeros(n))
                .with_sup_norm_bound(bound)
                .with_active_components(if fixes { 0 } else { n })
                .with_seeds(basis)
        }
        SymbolSpec::Automorphism { a } => {
            let a = padded(family, "a", a, n)?;
            let m = MobiusAutomorphism::new(a.clone()).map_err(|e| invalid(family, e.to_string()))?;
            let mut seeds = Vec::new();
            if let Some(u) = a.normalized() {
                seeds.push(u.clone());
                seeds.push(-&u);
            }
            seeds.extend(basis);
            SymbolMap::from_parts(n, family.into(), Arc::new(move |z: &Point| m.apply_unchecked(z)), None, a.is_zero())?
                .with_seeds(seeds)
        }
        SymbolSpec::Power => {
            let eval = move |z: &Point| point(z.coords().iter().enumerate().map(|(k, w)| w.powu(k as u32 + 1)).collect());
            SymbolMap::from_parts(n, family.into(), Arc::new(eval), None, true)?
                .with_radial(move |z: &Point| {
                    point(z.coords().iter().enumerate().map(|(k, w)| w.powu(k as u32 + 1) * (k + 1) as f64).collect())
                })
                .with_seeds(basis)
        }
        SymbolSpec::BlockPower { variant, blocks } => {
            let ends = blocks.clone().unwrap_or_else(|| default_blocks(n));
            let mut prev = 0;
            for &e in &ends {
                if e <= prev {
                    return Err(invalid(family, "block ends n_k must be strictly increasing and positive"));
                }
                if e > n {
                    return Err(invalid(family, format!("block end n_k = {e} exceeds n = {n}")));
                }
                prev = e;
            }
            let ranges: Vec<(usize, usize)> =
                ends.iter().scan(0, |start, &e| { let r = (*start, e); *start = e; Some(r) }).collect();
            let kcount = ranges.len();
            let variant = *variant;
            let rg = ranges.clone();
            let component = move |z: &Point, k: usize| -> C64 {
                let (s, e) = rg[k];
                let p = 2 * (k as u32 + 1);
                match variant {
                    BlockVariant::Phi => z.coords()[s..e].iter().map(|w| w.powu(p)).sum(),
                    BlockVariant::Psi => z.coords()[s..e].iter().map(|w| w * w).sum::<C64>().powu(k as u32 + 1),
                }
            };
            let comp = Arc::new(component);
            let (c1, c2) = (comp.clone(), comp);
            let eval = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for (k, o) in out.iter_mut().enumerate().take(kcount) {
                    *o = c1(z, k);
                }
                point(out)
            };
            let radial = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for (k, o) in out.iter_mut().enumerate().take(kcount) {
                    *o = c2(z, k) * (2 * (k + 1)) as f64;
                }
                point(out)
            };
            let mut seeds = Vec::new();
            for &(s, e) in &ranges {
                seeds.push(Point::basis(n, s));
                let mut v = Point::zeros(n);
                for j in s..e {
                    v[j] = CONE;
                }
                seeds.extend(v.normalized());
            }
            SymbolMap::from_parts(n, family.into(), Arc::new(eval), None, true)?
                .with_radial(radial)
                .with_active_components(kcount)
                .with_seeds(seeds)
        }
        SymbolSpec::ProductCom1 => {
            let mcount = n / 2;
            if mcount == 0 {
                return Err(invalid(family, "needs n >= 2 (component m uses coordinates m..=2m)"));
            }
            // component m (1-based) multiplies coordinates m..=2m (1-based)
            let prod = |z: &Point, m: usize| -> C64 { z.coords()[m - 1..2 * m].iter().product() };
            let eval = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for m in 1..=mcount {
                    out[m - 1] = prod(z, m);
                }
                point(out)
            };
            let radial = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for m in 1..=mcount {
                    out[m - 1] = prod(z, m) * (m + 1) as f64;
                }
                point(out)
            };
            let mut seeds = Vec::new();
            for m in 1..=mcount {
                let mut v = Point::zeros(n);
                for j in m - 1..2 * m {
                    v[j] = CONE;
                }
                seeds.extend(v.normalized());
            }
            SymbolMap::from_parts(n, family.into(), Arc::new(eval), None, true)?
                .with_radial(radial)
                .with_sup_norm_bound(product_com1_sup_sq_bound(mcount).sqrt())
                .with_active_components(mcount)
                .with_seeds(seeds)
        }
        SymbolSpec::Linear { xi, scales } => {
            let xi: Vec<Point> = match (xi, scales) {
                (Some(_), Some(_)) => return Err(invalid(family, "give either xi or scales, not both")),
                (None, None) => return Err(invalid(family, "missing xi or scales")),
                (Some(xi), None) => xi.iter().map(|v| padded(family, "xi_m", v, n)).collect::<Result<_>>()?,
                (None, Some(s)) => s.iter().enumerate().map(|(k, &c)| Point::basis(n.max(k + 1), k).scale_real(c)).collect(),
            };
            if xi.len() > n {
                return Err(invalid(family, format!("{} vectors xi_m but only n = {n} output coordinates", xi.len())));
            }
            for v in &xi {
                if v.norm() > 1.0 + 1e-12 {
                    return Err(invalid(family, format!("xi_m must lie in the closed ball, |xi_m| = {}", v.norm())));
                }
            }
            let sigma = linear_operator_norm(&xi);
            if sigma > 1.0 + 1e-12 {
                return Err(invalid(
                    family,
                    format!("sup_(|z|<=1) sum_m |<z, xi_m>|^2 <= 1 violated: largest singular value {sigma}"),
                ));
            }
            check_linear_constraint(&xi, n)?;
            let count = xi.len();
            let xs = Arc::new(xi.clone());
            let eval = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for (o, x) in out.iter_mut().zip(xs.iter()) {
                    *o = z.inner(x);
                }
                point(out)
            };
            let ev = Arc::new(eval);
            let er = ev.clone();
            let seeds: Vec<Point> = xi.iter().filter_map(|x| x.normalized()).chain(basis).collect();
            SymbolMap::from_parts(n, family.into(), ev, None, true)?
                .with_radial(move |z: &Point| er(z))
                .with_sup_norm_bound(sigma.min(1.0))
                .with_active_components(count)
                .with_seeds(seeds)
        }
        SymbolSpec::Diagonal { maps } => {
            if maps.len() > n {
                return Err(invalid(family, format!("{} maps F_k but n = {n}", maps.len())));
            }
            let fs: Vec<ScalarMap> = maps.iter().map(ScalarSpec::build).collect::<Result<_>>()?;
            check_disk_maps(&fs)?;
            let bound = fs.iter().map(|f| f.sup_bound()).try_fold(0.0f64, |acc, b| b.map(|b| acc.max(b)));
            let count = fs.len();
            let fs = Arc::new(fs);
            let (fe, fr) = (fs.clone(), fs);
            let eval = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for (k, f) in fe.iter().enumerate() {
                    out[k] = f.value(z[k]);
                }
                point(out)
            };
            let radial = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for (k, f) in fr.iter().enumerate() {
                    out[k] = f.derivative(z[k]) * z[k];
                }
                point(out)
            };
            let mut map = SymbolMap::from_parts(n, family.into(), Arc::new(eval), None, true)?
                .with_radial(radial)
                .with_active_components(count)
                .with_seeds(basis);
            if let Some(b) = bound.filter(|&b| b < 1.0) {
                map = map.with_sup_norm_bound(b);
            }
            map
        }
        SymbolSpec::Custom { components } => {
            if components.len() > n {
                return Err(invalid(family, format!("{} components but n = {n}", components.len())));
            }
            for t in components.iter().flatten() {
                if let Some(&(k, _)) = t.exponents.iter().find(|e| e.0 >= n) {
                    return Err(invalid(family, format!("term uses coordinate {k} >= n = {n}")));
                }
            }
            let terms = Arc::new(components.clone());
            let tr = terms.clone();
            let term_value = |t: &TermSpec, z: &Point| -> C64 {
                t.exponents.iter().fold(t.coeff, |acc, &(k, e)| acc * z[k].powu(e))
            };
            let eval = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for (o, comp) in out.iter_mut().zip(terms.iter()) {
                    *o = comp.iter().map(|t| term_value(t, z)).sum();
                }
                point(out)
            };
            // each monomial is homogeneous, so R(term) = degree * term
            let radial = move |z: &Point| {
                let mut out = vec![CZERO; n];
                for (o, comp) in out.iter_mut().zip(tr.iter()) {
                    *o = comp
                        .iter()
                        .map(|t| term_value(t, z) * t.exponents.iter().map(|e| e.1).sum::<u32>() as f64)
                        .sum();
                }
                point(out)
            };
            let fixes = components.iter().flatten().all(|t| t.exponents.iter().any(|e| e.1 > 0) || t.coeff == CZERO);
            SymbolMap::from_parts(n, family.into(), Arc::new(eval), None, fixes)?
                .with_radial(radial)
                .with_active_components(components.len())
                .with_seeds(basis)
        }
    };
    Ok(map.with_spec(spec.clone()))
}

/// Sampled form of `sum_m |<z, xi_m>|^2 <= 1` over unit `z`.
fn check_linear_constraint(xi: &[Point], n: usize) -> Result<()> {
    let mut rng = seeded(0x51);
    for _ in 0..256 {
        let z = crate::sampling::unit_direction(&mut rng, n);
        let s: f64 = xi.iter().map(|x| z.inner(x).norm_sqr()).sum();
        if s > 1.0 + 1e-12 {
            return Err(invalid("linear", format!("sum_m |<z, xi_m>|^2 = {s} > 1 at a unit z")));
        }
    }
    Ok(())
}

/// `F(0) = 0` and `|F| < 1` on sampled disk points.
fn check_disk_maps(fs: &[ScalarMap]) -> Result<()> {
    let mut rng = seeded(0xd15c);
    for (k, f) in fs.iter().enumerate() {
        if f.value(CZERO).norm() > 1e-14 {
            return Err(invalid("diagonal", format!("F_{} does not fix 0", k + 1)));
        }
        for i in 0..256 {
            let l = C64::from_polar(stratified_radius(&mut rng, 30), i as f64 * 0.731);
            if f.value(l).norm() >= 1.0 {
                return Err(invalid("diagonal", format!("F_{} leaves the disk at λ = {l}", k + 1)));
            }
        }
    }
    Ok(())
}
