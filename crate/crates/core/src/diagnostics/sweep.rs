//! Binned boundary sweeps.
//!
//! Every sweep evaluates a (key, value) pair on a stratified candidate set,
//! sorts the values into the bins `[1 - 2^-j, 1 - 2^-(j+1))` of the key, and
//! polishes the best candidates of each bin with the key constrained to it.

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pointwise::{q1_from, q2_from};
use super::{BinEstimate, CriterionEstimate, CriterionName, TrendConfig};
use crate::error::{Error, Result};
use crate::optimize::compass_max;
use crate::point::{Point, C64};
use crate::sampling::{bin_index, boundary_bins, seeded, stratified_point};
use crate::search::{direction_set, polish, sup_search, SearchBudget, SupResult};
use crate::symbols::{restrict_component, ScalarMap, SymbolMap};

/// Radii per bin in the deterministic part of the candidate set.
pub const RADII_PER_BIN: usize = 4;
/// Extra depth used when the key is `|phi(z)|` rather than `|z|`: reaching a
/// bin of `|phi(z)|` may need `z` much closer to the sphere.
pub const EXTRA_DEPTH: u32 = 8;
const MAX_T: f64 = 38.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Bins of `|phi(z)|`.
    Phi,
    /// Bins of `|z|`.
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Q1,
    Q2,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Q1 => "q1",
            Self::Q2 => "q2",
        }
    }
}

/// Default budget for binned sweeps: fewer directions and shorter polishes
/// than a global supremum search, since every bin is polished separately.
pub fn default_sweep_budget() -> SearchBudget {
    SearchBudget { samples: 32, depth: 18, starts: 2, polish_evals: 600, seed: 0x5eed }
}

/// `(key, value, |phi(z)|)` at a point; `None` marks an unusable point.
type KeyedValue = Option<(f64, f64, f64)>;

fn radii(depth: u32, extra: u32) -> Vec<f64> {
    let steps = (depth + extra) as usize * RADII_PER_BIN;
    (0..steps)
        .map(|i| i as f64 / RADII_PER_BIN as f64)
        .filter(|&t| t <= MAX_T)
        .map(|t| 1.0 - (-t * std::f64::consts::LN_2).exp())
        .collect()
}

fn binned_sweep<E>(n: usize, eval: &E, seeds: &[Point], budget: &SearchBudget, extra: u32) -> Result<Vec<BinEstimate>>
where
    E: Fn(&Point) -> Result<KeyedValue> + Sync,
{
    let bins = budget.depth;
    let dirs = direction_set(n, seeds, budget.samples, budget.seed);
    let mut candidates: Vec<Point> = vec![Point::zeros(n)];
    for r in radii(bins, extra).into_iter().skip(1) {
        candidates.extend(dirs.iter().map(|d| d.scale_real(r)));
    }
    let mut rng = seeded(budget.seed ^ 0xb1a5);
    for _ in 0..budget.samples * bins as usize {
        candidates.push(stratified_point(&mut rng, n, bins + extra));
    }
    let values: Vec<KeyedValue> = candidates.par_iter().map(eval).collect::<Result<_>>()?;

    let mut per_bin: Vec<Vec<(usize, f64)>> = vec![Vec::new(); bins as usize];
    for (i, v) in values.iter().enumerate() {
        if let Some((key, value, _)) = v {
            if let (Some(j), true) = (bin_index(*key, bins), value.is_finite()) {
                per_bin[j].push((i, *value));
            }
        }
    }
    boundary_bins(bins)
        .into_par_iter()
        .zip(per_bin.into_par_iter())
        .enumerate()
        .map(|(j, ((low, high), mut hits))| {
            if hits.is_empty() {
                return Ok(BinEstimate::empty(low, high));
            }
            hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let samples = hits.len();
            let (mut best_i, mut best_v) = (hits[0].0, hits[0].1);
            let mut best_x = candidates[best_i].clone();
            if budget.starts > 0 {
                let in_bin = |x: &Point| -> Result<Option<f64>> {
                    Ok(eval(x).ok().flatten().filter(|(k, _, _)| bin_index(*k, bins) == Some(j)).map(|(_, v, _)| v))
                };
                for &(i, v) in hits.iter().take(budget.starts) {
                    let (x, pv, _) = polish(&in_bin, &candidates[i], v, budget.polish_evals);
                    if pv > best_v {
                        best_v = pv;
                        best_x = x;
                        best_i = usize::MAX;
                    }
                }
            }
            let phi_norm = if best_i == usize::MAX {
                eval(&best_x)?.map(|t| t.2)
            } else {
                values[best_i].map(|t| t.2)
            };
            Ok(BinEstimate {
                low,
                high,
                sup: Some(best_v),
                witness_norm: Some(best_x.norm()),
                witness: Some(best_x),
                witness_phi_norm: phi_norm,
                samples,
            })
        })
        .collect()
}

/// True when a proven bound `sup |phi| <= b` keeps the range out of the last two bins.
fn certified_out_of_top(bound: Option<f64>, bins: u32) -> bool {
    match bound {
        Some(b) if bins >= 2 => b < 1.0 - 0.5f64.powi(bins as i32 - 2),
        Some(b) => b < 1.0,
        None => false,
    }
}

fn quotient(q: Quantity, z: &Point, w: &Point, r: &Point) -> Option<f64> {
    match q {
        Quantity::Q1 => q1_from(z, w, r),
        Quantity::Q2 => q2_from(z, w, r),
    }
    .ok()
}

/// Sweep of `q1` or `q2`, binned by `|phi(z)|` or by `|z|`.
pub fn boundary_sweep(
    phi: &SymbolMap,
    quantity: Quantity,
    mode: SweepMode,
    budget: &SearchBudget,
    trend: &TrendConfig,
) -> Result<CriterionEstimate> {
    let name = match (quantity, mode) {
        (Quantity::Q1, SweepMode::Phi) => CriterionName::C1,
        (Quantity::Q2, SweepMode::Phi) => CriterionName::C2,
        (Quantity::Q1, SweepMode::Z) => CriterionName::C1Prime,
        (Quantity::Q2, SweepMode::Z) => CriterionName::C11,
    };
    let eval = |z: &Point| -> Result<KeyedValue> {
        let w = phi.eval(z)?;
        let r = phi.radial(z)?;
        let key = match mode {
            SweepMode::Phi => w.norm(),
            SweepMode::Z => z.norm(),
        };
        Ok(quotient(quantity, z, &w, &r).map(|v| (key, v, w.norm())))
    };
    let extra = if mode == SweepMode::Phi { EXTRA_DEPTH } else { 0 };
    let bins = binned_sweep(phi.dim(), &eval, phi.seed_directions(), budget, extra)?;
    let label = format!("{}_{}", quantity.as_str(), if mode == SweepMode::Phi { "phi" } else { "z" });
    if mode == SweepMode::Phi && certified_out_of_top(phi.sup_norm_bound(), budget.depth) {
        return Ok(CriterionEstimate::certified_vacuous(name, label, bins));
    }
    Ok(CriterionEstimate::from_bins(name, label, bins, trend))
}

/// `(1 - |z|^2) |Rphi(z)|` binned by `|z|`; tends to 0 exactly when `phi`
/// lies in the little Bloch space.
pub fn b0_membership(phi: &SymbolMap, budget: &SearchBudget, trend: &TrendConfig) -> Result<CriterionEstimate> {
    let eval = |z: &Point| -> Result<KeyedValue> {
        let w = phi.eval(z)?;
        let r = phi.radial(z)?;
        Ok(Some((z.norm(), z.defect() * r.norm(), w.norm())))
    };
    let bins = binned_sweep(phi.dim(), &eval, phi.seed_directions(), budget, 0)?;
    Ok(CriterionEstimate::from_bins(CriterionName::B0Membership, "b0", bins, trend))
}

fn component_seeds(phi: &SymbolMap, k: usize) -> Vec<Point> {
    let mut seeds = vec![Point::basis(phi.dim(), k)];
    seeds.extend(phi.seed_directions().iter().cloned());
    seeds
}

fn component_ratio(z: &Point, wk: C64, rk: C64) -> Option<f64> {
    let d = 1.0 - wk.norm_sqr();
    (d > 0.0).then(|| z.defect() * rk.norm() / d)
}

/// `A_k = sup_z (1 - |z|^2) |R phi_k(z)| / (1 - |phi_k(z)|^2)` (0-based `k`).
pub fn component_criterion(phi: &SymbolMap, k: usize, budget: &SearchBudget) -> Result<Option<SupResult>> {
    if k >= phi.dim() {
        return Err(Error::Index { index: k, len: phi.dim() });
    }
    let obj = |z: &Point| -> Result<Option<f64>> {
        let w = phi.eval(z)?;
        let r = phi.radial(z)?;
        Ok(component_ratio(z, w[k], r[k]))
    };
    sup_search(phi.dim(), &obj, budget, &component_seeds(phi, k), None)
}

/// Components examined by the cross-component sweep: all of them up to `cap`,
/// otherwise the first four and the last `cap - 4`.
pub fn component_indices(active: usize, cap: usize) -> Vec<usize> {
    if active <= cap {
        return (0..active).collect();
    }
    let head = cap.min(4);
    (0..head).chain(active - (cap - head)..active).collect()
}

/// `A_k` across components; the trend is read off the two highest indices.
/// Each entry is stored as a bin `[k, k + 1)` with 1-based `k`.
pub fn component_sweep(
    phi: &SymbolMap,
    budget: &SearchBudget,
    trend: &TrendConfig,
    cap: usize,
) -> Result<CriterionEstimate> {
    let idx = component_indices(phi.active_components(), cap);
    let results: Vec<(usize, Option<SupResult>)> = idx
        .par_iter()
        .map(|&k| Ok((k, component_criterion(phi, k, budget)?)))
        .collect::<Result<_>>()?;
    let bins = results
        .into_iter()
        .map(|(k, res)| {
            let (low, high) = ((k + 1) as f64, (k + 2) as f64);
            match res {
                None => BinEstimate::empty(low, high),
                Some(r) => BinEstimate {
                    low,
                    high,
                    sup: Some(r.value),
                    witness_norm: Some(r.argmax.norm()),
                    witness_phi_norm: phi.eval(&r.argmax).ok().map(|w| w.norm()),
                    witness: Some(r.argmax),
                    samples: r.evaluations,
                },
            }
        })
        .collect();
    Ok(CriterionEstimate::from_bins(CriterionName::C3, "a_k", bins, trend))
}

/// `(1 - |z|^2) |R phi_k(z)| / (1 - |phi_k(z)|^2)` binned by `|phi_k(z)|`.
pub fn component_boundary_sweep(
    phi: &SymbolMap,
    k: usize,
    budget: &SearchBudget,
    trend: &TrendConfig,
) -> Result<CriterionEstimate> {
    if k >= phi.dim() {
        return Err(Error::Index { index: k, len: phi.dim() });
    }
    let eval = |z: &Point| -> Result<KeyedValue> {
        let w = phi.eval(z)?;
        let r = phi.radial(z)?;
        Ok(component_ratio(z, w[k], r[k]).map(|v| (w[k].norm(), v, w.norm())))
    };
    let bins = binned_sweep(phi.dim(), &eval, &component_seeds(phi, k), budget, EXTRA_DEPTH)?;
    let label = format!("k={}", k + 1);
    if certified_out_of_top(phi.sup_norm_bound(), budget.depth) {
        return Ok(CriterionEstimate::certified_vacuous(CriterionName::C3Prime, label, bins));
    }
    Ok(CriterionEstimate::from_bins(CriterionName::C3Prime, label, bins, trend))
}

/// `(1 - |λ|^2) |F'(λ)| / (1 - |F(λ)|^2)` binned by `|F(λ)|`. Witnesses are
/// one-dimensional points holding `λ`.
pub fn scalar_criterion(f: &ScalarMap, budget: &SearchBudget, trend: &TrendConfig) -> Result<CriterionEstimate> {
    let bins = budget.depth;
    let eval = |lambda: C64| -> KeyedValue {
        let m = lambda.norm();
        if m >= 1.0 {
            return None;
        }
        let v = f.value(lambda);
        let d = 1.0 - v.norm_sqr();
        if !(d > 0.0) || !v.is_finite() {
            return None;
        }
        let val = (1.0 - m * m) * f.derivative(lambda).norm() / d;
        val.is_finite().then_some((v.norm(), val, v.norm()))
    };
    let angles = budget.samples.max(1);
    let mut rng = seeded(budget.seed ^ 0x5ca1);
    let offset: f64 = rng.random::<f64>();
    let mut candidates: Vec<C64> = vec![C64::new(0.0, 0.0)];
    for r in radii(bins, EXTRA_DEPTH).into_iter().skip(1) {
        candidates.push(C64::new(r, 0.0));
        for a in 0..angles {
            let theta = std::f64::consts::TAU * (a as f64 + offset) / angles as f64;
            candidates.push(C64::from_polar(r, theta));
        }
    }
    let values: Vec<KeyedValue> = candidates.par_iter().map(|&l| eval(l)).collect();
    let mut per_bin: Vec<Vec<(usize, f64)>> = vec![Vec::new(); bins as usize];
    for (i, v) in values.iter().enumerate() {
        if let Some((key, value, _)) = v {
            if let Some(j) = bin_index(*key, bins) {
                per_bin[j].push((i, *value));
            }
        }
    }
    let est: Vec<BinEstimate> = boundary_bins(bins)
        .into_par_iter()
        .zip(per_bin.into_par_iter())
        .enumerate()
        .map(|(j, ((low, high), mut hits))| {
            if hits.is_empty() {
                return BinEstimate::empty(low, high);
            }
            hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let samples = hits.len();
            let (mut best_l, mut best_v) = (candidates[hits[0].0], hits[0].1);
            for &(i, v) in hits.iter().take(budget.starts) {
                let l0 = candidates[i];
                let step = 0.25 * (1.0 - l0.norm());
                let (x, pv) = compass_max(
                    |x: &[f64]| {
                        eval(C64::new(x[0], x[1]))
                            .filter(|(k, _, _)| bin_index(*k, bins) == Some(j))
                            .map(|t| t.1)
                    },
                    &[l0.re, l0.im],
                    step,
                    step * 1e-7,
                    budget.polish_evals,
                );
                if pv > best_v.max(v) {
                    best_v = pv;
                    best_l = C64::new(x[0], x[1]);
                }
            }
            let witness = Point::new(vec![best_l]).ok();
            BinEstimate {
                low,
                high,
                sup: Some(best_v),
                witness_norm: Some(best_l.norm()),
                witness_phi_norm: Some(f.value(best_l).norm()),
                witness,
                samples,
            }
        })
        .collect();
    let label = f.label().to_string();
    if certified_out_of_top(f.sup_bound(), bins) {
        return Ok(CriterionEstimate::certified_vacuous(CriterionName::C4, label, est));
    }
    Ok(CriterionEstimate::from_bins(CriterionName::C4, label, est, trend))
}

/// Index pairs `(k, l)` (0-based) for the restricted-component criterion: the
/// diagonal over `components`, for each of them the coordinate `l` on which
/// `|phi_k(e_l / 2)|` is largest, then `random` off-diagonal pairs.
pub fn c4_pairs(phi: &SymbolMap, components: &[usize], random: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let n = phi.dim();
    let mut pairs: Vec<(usize, usize)> = components.iter().map(|&k| (k, k)).collect();
    let probes: Vec<Point> = (0..n).map(|l| phi.eval(&Point::basis(n, l).scale_real(0.5))).collect::<Result<_>>()?;
    for &k in components {
        let best = (0..n).max_by(|&a, &b| probes[a][k].norm().total_cmp(&probes[b][k].norm()).then(b.cmp(&a)));
        if let Some(l) = best.filter(|&l| probes[l][k].norm() > 0.0) {
            if !pairs.contains(&(k, l)) {
                pairs.push((k, l));
            }
        }
    }
    if n < 2 || components.is_empty() {
        return Ok(pairs);
    }
    let mut rng = seeded(seed ^ 0xc4);
    for _ in 0..random {
        let k = *components.choose(&mut rng).expect("non-empty");
        let mut l = rng.random_range(0..n - 1);
        if l >= k {
            l += 1;
        }
        pairs.push((k, l));
    }
    Ok(pairs)
}

/// The restricted-component criterion on each pair.
pub fn c4_sweep(
    phi: &SymbolMap,
    pairs: &[(usize, usize)],
    budget: &SearchBudget,
    trend: &TrendConfig,
) -> Result<Vec<CriterionEstimate>> {
    pairs
        .par_iter()
        .map(|&(k, l)| scalar_criterion(&restrict_component(phi, k, l)?, budget, trend))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Trend;
    use crate::symbols::{build_symbol, SymbolSpec};

    fn fast() -> SearchBudget {
        SearchBudget { samples: 12, depth: 16, starts: 1, polish_evals: 200, seed: 3 }
    }

    #[test]
    fn identity_q2_bounded_q1_vanishes() {
        let id = build_symbol(&SymbolSpec::Identity, 4).unwrap();
        let t = TrendConfig::default();
        let q2 = boundary_sweep(&id, Quantity::Q2, SweepMode::Phi, &fast(), &t).unwrap();
        assert_eq!(q2.trend, Trend::BoundedAway);
        assert!(q2.limit_estimate > 0.99 && q2.limit_estimate <= 1.0);
        let q1 = boundary_sweep(&id, Quantity::Q1, SweepMode::Phi, &fast(), &t).unwrap();
        assert_eq!(q1.trend, Trend::ToZero);
        assert!(!q1.vacuous);
        for b in &q2.per_bin {
            assert!(b.sup.unwrap() <= b.high * b.high + 1e-12);
        }
    }

    #[test]
    fn product_family_is_vacuous_in_phi_mode() {
        let p = build_symbol(&SymbolSpec::ProductCom1, 8).unwrap();
        let e = boundary_sweep(&p, Quantity::Q2, SweepMode::Phi, &fast(), &TrendConfig::default()).unwrap();
        assert!(e.vacuous);
        assert_eq!(e.trend, Trend::ToZero);
        assert!(e.empty_bins.contains(&15));
    }

    #[test]
    fn power_components_do_not_decay() {
        let p = build_symbol(&SymbolSpec::Power, 6).unwrap();
        for k in 0..6 {
            let a = component_criterion(&p, k, &fast()).unwrap().unwrap().value;
            let kk = (k + 1) as f64;
            assert!(a >= (1.0 - 1.0 / kk).powf(kk / 2.0), "A_{} = {a}", k + 1);
            assert!(a <= 1.0 + 1e-9);
        }
        let c3 = component_sweep(&p, &fast(), &TrendConfig::default(), 16).unwrap();
        assert_eq!(c3.trend, Trend::BoundedAway);
        assert_eq!(c3.per_bin.len(), 6);
    }

    #[test]
    fn scalar_power_limit_is_one() {
        for k in [1u32, 3, 8] {
            let f = ScalarMap::new("l^2k", move |l: C64| l.powu(2 * k))
                .with_derivative(move |l: C64| l.powu(2 * k - 1) * (2 * k) as f64);
            let e = scalar_criterion(&f, &fast(), &TrendConfig::default()).unwrap();
            assert!(e.limit_estimate >= 0.9 && e.limit_estimate <= 1.0 + 1e-9, "{}", e.limit_estimate);
            assert_eq!(e.trend, Trend::BoundedAway);
        }
    }

    #[test]
    fn scalar_zero_map_is_vacuous() {
        let f = ScalarMap::new("0", |_| C64::new(0.0, 0.0));
        let e = scalar_criterion(&f, &fast(), &TrendConfig::default()).unwrap();
        assert!(e.vacuous);
    }

    #[test]
    fn pairs_and_indices() {
        assert_eq!(component_indices(5, 8), vec![0, 1, 2, 3, 4]);
        assert_eq!(component_indices(20, 8), vec![0, 1, 2, 3, 16, 17, 18, 19]);
        let power = build_symbol(&SymbolSpec::Power, 6).unwrap();
        let p = c4_pairs(&power, &[0, 1], 10, 1).unwrap();
        assert_eq!(p.len(), 12);
        assert!(p[2..].iter().all(|&(k, l)| k != l && l < 6 && k < 2));
        let block = build_symbol(&SymbolSpec::BlockPower { variant: Default::default(), blocks: None }, 8).unwrap();
        let p = c4_pairs(&block, &[0, 1, 2], 0, 1).unwrap();
        assert_eq!(p, vec![(0, 0), (1, 1), (2, 2), (1, 2), (2, 4)]);
    }

    #[test]
    fn b0_for_identity_and_power() {
        let id = build_symbol(&SymbolSpec::Identity, 3).unwrap();
        let e = b0_membership(&id, &fast(), &TrendConfig::default()).unwrap();
        assert_eq!(e.trend, Trend::ToZero);
    }
}
