//! Bloch semi-norm estimates, evaluation-functional bounds and the Lipschitz
//! constant for gradients on shrunken balls.
//!
//! All semi-norm values are lower bounds: suprema found by [`sup_search`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holo::{gradient, invariant_gradient, AnalyticFunction, QuadratureConfig};
use crate::metric::hyperbolic;
use crate::optimize::compass_max;
use crate::point::Point;
use crate::sampling::{radius_schedule, seeded, stratified_point};
use crate::search::{direction_set, sup_search, SearchBudget, MAX_RADIUS};

/// `1 + sqrt(31) / 2`: upper constant relating the invariant and derivative semi-norms.
pub fn seminorm_equivalence() -> f64 {
    1.0 + 31f64.sqrt() / 2.0
}

/// Offset used for near-coincident pairs in the metric-ratio search.
pub const NEAR_PAIR_OFFSET: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    /// `sup (1 - |x|^2) |f'(x)|`
    Derivative,
    /// `sup |∇̃f(x)|`
    Invariant,
    /// `sup (1 - |x|^2) |Rf(x)|`
    Radial,
    /// `sup |f(x) - f(y)| / beta(x, y)`
    MetricRatio,
}

impl SeminormKind {
    pub const ALL: [SeminormKind; 4] = [Self::Derivative, Self::Invariant, Self::Radial, Self::MetricRatio];
}

#[derive(Debug, Clone, PartialEq)]
pub enum Argmax {
    Point(Point),
    Pair(Point, Point),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormEstimate {
    pub kind: SeminormKind,
    pub value: f64,
    pub argmax: Argmax,
    pub budget: SearchBudget,
}

impl SeminormEstimate {
    /// Recomputes the objective at the recorded maximizer.
    pub fn reevaluate(&self, f: &AnalyticFunction, q: &QuadratureConfig) -> Result<f64> {
        match &self.argmax {
            Argmax::Point(x) => pointwise_objective(f, self.kind, x, q),
            Argmax::Pair(x, y) => metric_ratio(f, x, y),
        }
    }
}

/// The pointwise quantity whose supremum is the semi-norm of the given kind.
/// `MetricRatio` has no pointwise form and is rejected.
pub fn pointwise_objective(f: &AnalyticFunction, kind: SeminormKind, x: &Point, q: &QuadratureConfig) -> Result<f64> {
    match kind {
        SeminormKind::Derivative => Ok(x.defect() * gradient(f, x, q)?.norm()),
        SeminormKind::Invariant => Ok(invariant_gradient(f, x, q)?.norm()),
        SeminormKind::Radial => Ok(x.defect() * x.pairing(&gradient(f, x, q)?).norm()),
        SeminormKind::MetricRatio => Err(Error::Degenerate("metric ratio needs a pair of points".into())),
    }
}

/// `|f(x) - f(y)| / beta(x, y)`; errors when `x = y`.
pub fn metric_ratio(f: &AnalyticFunction, x: &Point, y: &Point) -> Result<f64> {
    let b = hyperbolic(x, y)?;
    if b == 0.0 {
        return Err(Error::Degenerate("metric ratio at coincident points".into()));
    }
    Ok((f.try_value(x)? - f.try_value(y)?).norm() / b)
}

pub fn estimate_seminorm(f: &AnalyticFunction, kind: SeminormKind, budget: &SearchBudget) -> Result<SeminormEstimate> {
    estimate_seminorm_with(f, kind, budget, &QuadratureConfig::default())
}

pub fn estimate_seminorm_with(
    f: &AnalyticFunction,
    kind: SeminormKind,
    budget: &SearchBudget,
    q: &QuadratureConfig,
) -> Result<SeminormEstimate> {
    if budget.samples == 0 {
        return Err(Error::Parameter { name: "samples", value: 0.0, range: ">= 1" });
    }
    if kind == SeminormKind::MetricRatio {
        return estimate_metric_ratio(f, budget);
    }
    let n = f.dim();
    let seeds = seed_directions(f, q)?;
    let objective = |x: &Point| -> Result<Option<f64>> { pointwise_objective(f, kind, x, q).map(Some) };
    let res = sup_search(n, &objective, budget, &seeds, None)?.expect("objective is feasible at the origin");
    Ok(SeminormEstimate { kind, value: res.value, argmax: Argmax::Point(res.argmax), budget: *budget })
}

/// Basis vectors (up to 16) and the direction of `conj ∇f(0)`.
fn seed_directions(f: &AnalyticFunction, q: &QuadratureConfig) -> Result<Vec<Point>> {
    let n = f.dim();
    let mut seeds: Vec<Point> = (0..n.min(16)).map(|k| Point::basis(n, k)).collect();
    let g0 = gradient(f, &Point::zeros(n), q)?;
    if g0.norm() > 0.0 {
        seeds.push(g0.conj());
    }
    Ok(seeds)
}

fn estimate_metric_ratio(f: &AnalyticFunction, budget: &SearchBudget) -> Result<SeminormEstimate> {
    let n = f.dim();
    let q = QuadratureConfig::default();
    let dirs = direction_set(n, &seed_directions(f, &q)?, budget.samples, budget.seed);
    let offsets = direction_set(n, &[], budget.samples, budget.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut pairs: Vec<(Point, Point)> = Vec::new();
    for &r in &radius_schedule(budget.depth) {
        for (d, o) in dirs.iter().zip(offsets.iter().cycle()) {
            let x = d.scale_real(r);
            let h = NEAR_PAIR_OFFSET.min(0.5 * (1.0 - r));
            pairs.push((x.clone(), &x + &o.scale_real(h)));
        }
    }
    let mut rng = seeded(budget.seed.wrapping_add(1));
    for _ in 0..budget.samples * (budget.depth as usize + 1) {
        pairs.push((stratified_point(&mut rng, n, budget.depth), stratified_point(&mut rng, n, budget.depth)));
    }
    let values: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|(x, y)| match metric_ratio(f, x, y) {
            Ok(v) => Ok(Some(v)),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut ranked: Vec<(usize, f64)> = values.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let Some(&(i0, v0)) = ranked.first() else {
        return Err(Error::Degenerate("no admissible pair sampled".into()));
    };
    let mut best = (pairs[i0].clone(), v0);
    ranked.truncate(budget.starts);
    let polished: Vec<((Point, Point), f64)> = ranked
        .par_iter()
        .map(|&(i, v)| polish_pair(f, &pairs[i], v, budget.polish_evals))
        .collect();
    for (p, v) in polished {
        if v > best.1 {
            best = (p, v);
        }
    }
    let ((x, y), value) = best;
    Ok(SeminormEstimate { kind: SeminormKind::MetricRatio, value, argmax: Argmax::Pair(x, y), budget: *budget })
}

fn polish_pair(f: &AnalyticFunction, start: &(Point, Point), v0: f64, max_evals: usize) -> ((Point, Point), f64) {
    let n = f.dim();
    let split = |v: &[f64]| (Point::from_real_pairs(&v[..2 * n]), Point::from_real_pairs(&v[2 * n..]));
    let objective = |v: &[f64]| {
        let (x, y) = split(v);
        if x.norm() >= MAX_RADIUS || y.norm() >= MAX_RADIUS {
            return None;
        }
        metric_ratio(f, &x, &y).ok().filter(|r| r.is_finite())
    };
    let mut v = start.0.to_real();
    v.extend(start.1.to_real());
    let gap = start.0.distance(&start.1);
    let margin = 1.0 - start.0.norm().max(start.1.norm());
    let step0 = (0.25 * margin).min(gap).max(1e-9);
    let (xv, val) = compass_max(objective, &v, step0, step0 * 1e-6, max_evals);
    if val > v0 {
        (split(&xv), val)
    } else {
        (start.clone(), v0)
    }
}

/// Norm bound `|δ_x| <= L_x` for point evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalBound {
    pub x: Point,
    pub l_x: f64,
}

pub fn eval_bound(x: &Point) -> Result<EvalBound> {
    x.ensure_interior("evaluation point")?;
    let r = x.norm();
    let l_x = r.atanh().max(1.0);
    Ok(EvalBound { x: x.clone(), l_x })
}

/// Right-hand side of the growth estimate `|f(x) - f(0)| <= (|f|_B / 2) log((1 + |x|) / (1 - |x|))`.
pub fn growth_bound(bloch_norm: f64, x: &Point) -> f64 {
    bloch_norm * x.norm().atanh()
}

/// Lipschitz constant for `x -> ∇f(x)` on the ball of radius `delta`,
/// relative to `|f|_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzConstant {
    pub delta: f64,
    pub value: f64,
    /// Set for `delta > 0.999`, where the constant is huge and of little use.
    pub flagged: bool,
}

pub const LIPSCHITZ_FLAG_DELTA: f64 = 0.999;

/// `C_δ = (1/ε) (1 + sqrt(31)/2) C'_δ` with `ε = (1 - δ)/2` and
/// `C'_δ = 1 / (1 - 4(1 + δ) / (4 + (1 + δ)^2))`. Accepts `0 <= delta < 1`;
/// `delta = 0` is the limiting value at the centre.
pub fn lipschitz_constant(delta: f64) -> Result<LipschitzConstant> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Parameter { name: "delta", value: delta, range: "[0, 1)" });
    }
    let eps = (1.0 - delta) / 2.0;
    let t = 1.0 + delta;
    let c_prime = 1.0 / (1.0 - 4.0 * t / (4.0 + t * t));
    let value = seminorm_equivalence() * c_prime / eps;
    Ok(LipschitzConstant { delta, value, flagged: delta > LIPSCHITZ_FLAG_DELTA })
}

/// Slack of `|y·∇f(x) - y'·∇f(x')| <= C_δ |f|_B (|x - x'| + ε |y - y'|)`.
pub fn lipschitz_slack(
    f: &AnalyticFunction,
    bloch_norm: f64,
    delta: f64,
    (x, y): (&Point, &Point),
    (xp, yp): (&Point, &Point),
    q: &QuadratureConfig,
) -> Result<f64> {
    let c = lipschitz_constant(delta)?.value;
    let lhs = (y.pairing(&gradient(f, x, q)?) - yp.pairing(&gradient(f, xp, q)?)).norm();
    let eps = (1.0 - delta) / 2.0;
    Ok(c * bloch_norm * (x.distance(xp) + eps * y.distance(yp)) - lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::{constant, identity_1d, linear};
    use crate::point::c;

    fn unit_u(n: usize) -> Point {
        let mut u = Point::zeros(n);
        u[0] = c(0.6, 0.0);
        u[n - 1] = c(0.0, 0.8);
        u
    }

    #[test]
    fn linear_functional_estimates() {
        let f = linear(&unit_u(3));
        let b = SearchBudget::default();
        let d = estimate_seminorm(&f, SeminormKind::Derivative, &b).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        let r = estimate_seminorm(&f, SeminormKind::Radial, &b).unwrap();
        let exact = 2.0 / (3.0 * 3f64.sqrt());
        assert!(r.value <= exact + 1e-12 && exact - r.value < 1e-6, "{}", r.value);
        let q = QuadratureConfig::default();
        assert!((r.reevaluate(&f, &q).unwrap() - r.value).abs() < 1e-9);
    }

    #[test]
    fn constant_is_zero_for_every_kind() {
        let f = constant(2, c(0.3, -1.0));
        let b = SearchBudget { samples: 4, depth: 6, ..Default::default() };
        for kind in SeminormKind::ALL {
            assert_eq!(estimate_seminorm(&f, kind, &b).unwrap().value, 0.0, "{kind:?}");
        }
    }

    #[test]
    fn metric_ratio_tracks_invariant_in_one_dimension() {
        let f = identity_1d();
        let b = SearchBudget::default();
        let inv = estimate_seminorm(&f, SeminormKind::Invariant, &b).unwrap().value;
        let mr = estimate_seminorm(&f, SeminormKind::MetricRatio, &b).unwrap();
        assert!((inv - 1.0).abs() < 1e-12);
        assert!(mr.value <= 1.0 + 1e-9 && mr.value > 0.95, "{}", mr.value);
    }

    #[test]
    fn zero_samples_rejected() {
        let b = SearchBudget { samples: 0, ..Default::default() };
        assert!(estimate_seminorm(&identity_1d(), SeminormKind::Derivative, &b).is_err());
    }

    #[test]
    fn eval_bound_examples() {
        assert_eq!(eval_bound(&Point::zeros(3)).unwrap().l_x, 1.0);
        let t = Point::from_real(&[1f64.tanh(), 0.0]).unwrap();
        assert!((eval_bound(&t).unwrap().l_x - 1.0).abs() < 1e-12);
        let x = Point::from_real(&[0.0, 0.9]).unwrap();
        assert!((eval_bound(&x).unwrap().l_x - 0.5 * 19f64.ln()).abs() < 1e-12);
        assert!((0.5 * 19f64.ln() - 1.47222).abs() < 1e-5);
        assert!(eval_bound(&Point::from_real(&[1.0]).unwrap()).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let half = lipschitz_constant(0.5).unwrap();
        assert!((half.value - 4.0 * seminorm_equivalence() * 25.0).abs() < 1e-9);
        assert!((half.value - 378.39).abs() < 5e-3);
        let zero = lipschitz_constant(0.0).unwrap();
        assert!((zero.value - 37.84).abs() < 5e-3);
        assert!(lipschitz_constant(0.9995).unwrap().flagged);
        assert!(!half.flagged);
        assert!(lipschitz_constant(1.0).is_err());
        assert!(lipschitz_constant(-0.1).is_err());
    }
}
