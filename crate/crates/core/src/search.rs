//! Stratified supremum search over the ball.
//!
//! Candidates are the products of the radius schedule `1 - 2^-j`
//! (`j = 0..=depth`) with a direction set made of caller-supplied seed
//! directions followed by seeded random directions. The best candidates are
//! then polished: a golden-section search along their ray, a compass search
//! in real coordinates, and a final ray search.
//!
//! The direction list is generated as a prefix-stable stream, so a larger
//! budget evaluates a superset of the candidates of a smaller one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optimize::{compass_max, golden_section_max};
use crate::point::Point;
use crate::sampling::{radius_schedule, seeded, sparse_direction, unit_direction};

/// Largest radius the polish steps may move to.
pub const MAX_RADIUS: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Random directions per radius (in addition to seed directions).
    pub samples: usize,
    /// Radii `1 - 2^-j` for `j = 0..=depth`.
    pub depth: u32,
    /// Number of best candidates that get polished; 0 disables polishing, which
    /// makes the result exactly monotone in `samples` and `depth`.
    pub starts: usize,
    /// Objective evaluations allowed per compass polish.
    pub polish_evals: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { samples: 48, depth: 16, starts: 4, polish_evals: 3000, seed: 0x5eed }
    }
}

impl SearchBudget {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Result of a supremum search. `value` is attained at `argmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupResult {
    pub value: f64,
    pub argmax: Point,
    pub evaluations: usize,
}

/// Objective: `Ok(None)` marks an infeasible point, `Err` aborts the search.
pub trait Objective: Sync {
    fn eval(&self, x: &Point) -> Result<Option<f64>>;
}

impl<F> Objective for F
where
    F: Fn(&Point) -> Result<Option<f64>> + Sync,
{
    fn eval(&self, x: &Point) -> Result<Option<f64>> {
        self(x)
    }
}

/// Direction list: unit-normalized seeds, then `samples` seeded random directions
/// (every third one sparse).
pub fn direction_set(n: usize, seeds: &[Point], samples: usize, seed: u64) -> Vec<Point> {
    let mut dirs: Vec<Point> = seeds.iter().filter_map(|s| s.normalized()).collect();
    let mut rng = seeded(seed);
    for i in 0..samples {
        dirs.push(if i % 3 == 2 { sparse_direction(&mut rng, n, 2) } else { unit_direction(&mut rng, n) });
    }
    dirs
}

pub fn sup_search<O: Objective + ?Sized>(
    n: usize,
    objective: &O,
    budget: &SearchBudget,
    seeds: &[Point],
    radii: Option<&[f64]>,
) -> Result<Option<SupResult>> {
    let schedule;
    let radii = match radii {
        Some(r) => r,
        None => {
            schedule = radius_schedule(budget.depth);
            &schedule
        }
    };
    let dirs = direction_set(n, seeds, budget.samples, budget.seed);
    let mut candidates: Vec<Point> = Vec::new();
    for &r in radii {
        if r == 0.0 {
            candidates.push(Point::zeros(n));
            continue;
        }
        candidates.extend(dirs.iter().map(|d| d.scale_real(r)));
    }
    let values: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|x| objective.eval(x))
        .collect::<Result<Vec<_>>>()?;
    let mut evaluations = candidates.len();
    let mut ranked: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.filter(|v| v.is_finite()).map(|v| (i, v)))
        .collect();
    if ranked.is_empty() {
        return Ok(None);
    }
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    if budget.starts == 0 {
        let (i, value) = ranked[0];
        return Ok(Some(SupResult { value, argmax: candidates[i].clone(), evaluations }));
    }
    ranked.truncate(budget.starts);

    let polished: Vec<(Point, f64, usize)> = ranked
        .par_iter()
        .map(|&(i, v)| polish(objective, &candidates[i], v, budget.polish_evals))
        .collect();
    let mut best: Option<(Point, f64)> = None;
    for (p, v, e) in polished {
        evaluations += e;
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((p, v));
        }
    }
    let (argmax, value) = best.expect("at least one start");
    Ok(Some(SupResult { value, argmax, evaluations }))
}

fn feasible_value<O: Objective + ?Sized>(objective: &O, x: &Point) -> Option<f64> {
    if x.norm() >= MAX_RADIUS {
        return None;
    }
    objective.eval(x).ok().flatten().filter(|v| v.is_finite())
}

/// Local polish from a feasible start. Never returns a value below `v0`.
pub fn polish<O: Objective + ?Sized>(objective: &O, x0: &Point, v0: f64, max_evals: usize) -> (Point, f64, usize) {
    let mut best = (x0.clone(), v0);
    let mut evals = 0;
    let ray = |best: &mut (Point, f64), evals: &mut usize| {
        let Some(dir) = best.0.normalized() else { return };
        let r0 = best.0.norm();
        // bracket around the current radius, in the defect variable
        let lo = (r0 - 0.5 * (1.0 - r0)).max(0.0);
        let hi = (r0 + 0.5 * (1.0 - r0)).min(MAX_RADIUS);
        let (t, v) = golden_section_max(|t| feasible_value(objective, &dir.scale_real(t)), lo, hi, 60);
        *evals += 62;
        if v > best.1 {
            *best = (dir.scale_real(t), v);
        }
    };
    ray(&mut best, &mut evals);
    if max_evals > 0 {
        let r = best.0.norm();
        let step0 = (0.25 * (1.0 - r)).max(1e-9);
        let (x, v) = compass_max(
            |v: &[f64]| feasible_value(objective, &Point::from_real_pairs(v)),
            &best.0.to_real(),
            step0,
            step0 * 1e-7,
            max_evals,
        );
        evals += max_evals;
        if v > best.1 {
            best = (Point::from_real_pairs(&x), v);
        }
        ray(&mut best, &mut evals);
    }
    (best.0, best.1, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_radial_maximum_of_linear_profile() {
        // (1 - |x|^2) |x_1|: maximum 2 / (3 sqrt 3) at x = e_1 / sqrt 3
        let n = 4;
        let obj = |x: &Point| -> Result<Option<f64>> { Ok(Some(x.defect() * x[0].norm())) };
        let res = sup_search(n, &obj, &SearchBudget::default(), &[], None).unwrap().unwrap();
        let exact = 2.0 / (3.0 * 3f64.sqrt());
        assert!(res.value <= exact + 1e-15);
        assert!(exact - res.value < 1e-6, "{}", res.value);
        assert_eq!(obj(&res.argmax).unwrap().unwrap(), res.value);
    }

    #[test]
    fn seeds_come_first_and_stream_is_prefix_stable() {
        let seeds = vec![Point::basis(3, 1).scale_real(2.0)];
        let a = direction_set(3, &seeds, 5, 9);
        let b = direction_set(3, &seeds, 9, 9);
        assert_eq!(a[0], Point::basis(3, 1));
        assert_eq!(&b[..a.len()], &a[..]);
    }

    #[test]
    fn infeasible_everywhere_gives_none() {
        let obj = |_: &Point| -> Result<Option<f64>> { Ok(None) };
        assert!(sup_search(2, &obj, &SearchBudget::default(), &[], None).unwrap().is_none());
    }
}
