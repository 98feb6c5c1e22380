use blochball_core::bloch::{
    estimate_seminorm_with, growth_bound, lipschitz_slack, seminorm_equivalence, EvalBound, SeminormKind,
};
use blochball_core::holo::{
    coordinate_product, directional_derivative, gradient, identity_1d, invariant_gradient,
    invariant_gradient_by_composition, invariant_gradient_norm, linear, monomial, monomial_bloch_norm,
    quadrature_gradient, radial_boundary_integral, radial_derivative, random_polynomial,
};
use blochball_core::sampling::{seeded, stratified_radius, unit_direction, SampleRng};
use blochball_core::{eval_bound, AnalyticFunction, Point, QuadratureConfig, C64};
use rand::Rng;
use serde_json::json;

use super::point_json;
use crate::check::{rel_err, worst_case, Ctx, Outcome};
use crate::config::Suite;

fn sample(rng: &mut SampleRng, n: usize, depth: u32) -> Point {
    unit_direction(rng, n).scale_real(stratified_radius(rng, depth))
}

fn poly(rng: &mut SampleRng, n: usize) -> AnalyticFunction {
    let terms = rng.random_range(1..=6);
    random_polynomial(rng, n, 4, terms)
}

/// Functions with analytically known Bloch semi-norm.
fn known_bloch(rng: &mut SampleRng, n: usize) -> (AnalyticFunction, f64) {
    match rng.random_range(0..3) {
        0 => {
            let u = unit_direction(rng, n).scale_real(rng.random_range(0.1..1.0));
            let b = u.norm();
            (linear(&u), b)
        }
        _ => {
            let m = rng.random_range(1..=6);
            (monomial(n, rng.random_range(0..n), m), monomial_bloch_norm(m))
        }
    }
}

pub fn gradients(ctx: &mut Ctx) {
    ctx.check("gradients.analytic_vs_quadrature", 1e-9, |e| {
        worst_case(e.seed, e.heavy(), e.tol, |rng| {
            let (f, x) = (poly(rng, e.n), sample(rng, e.n, 12));
            let exact = f.analytic_gradient(&x).expect("polynomials carry gradients");
            let approx = quadrature_gradient(&f, &x, &e.quad)?;
            Ok((approx.distance(&exact) / exact.norm().max(1.0), json!({"f": f.label(), "x": point_json(&x)})))
        })
    });
    ctx.check("gradients.quadrature_order", 1e-12, |e| {
        let (q32, q64) = (QuadratureConfig::with_nodes(32).map_err(|e| e.to_string())?, QuadratureConfig::default());
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (f, x, u) = (poly(rng, e.n), sample(rng, e.n, 8), unit_direction(rng, e.n));
            let a = directional_derivative(&f, &x, &u, &q32)?;
            let b = directional_derivative(&f, &x, &u, &q64)?;
            Ok(((a - b).norm() / b.norm().max(1.0), json!({"f": f.label(), "x": point_json(&x), "u": point_json(&u)})))
        })
    });
    ctx.check("gradients.transpose_vs_direct", 1e-7, |e| {
        worst_case(e.seed, e.heavy(), e.tol, |rng| {
            let (f, x) = (poly(rng, e.n), sample(rng, e.n, 12));
            let a = invariant_gradient(&f, &x, &e.quad)?;
            let b = invariant_gradient_by_composition(&f, &x, &e.quad)?;
            Ok((a.distance(&b) / a.norm().max(1.0), json!({"f": f.label(), "x": point_json(&x)})))
        })
    });
    ctx.check("gradients.closed_form_norm", 1e-6, |e| {
        worst_case(e.seed, e.heavy(), e.tol, |rng| {
            let (f, x) = (poly(rng, e.n), sample(rng, e.n, 12));
            let closed = invariant_gradient_norm(&f, &x, &e.quad)?;
            let direct = invariant_gradient_by_composition(&f, &x, &e.quad)?.norm();
            Ok((rel_err(closed, direct), json!({"f": f.label(), "x": point_json(&x), "closed": closed, "direct": direct})))
        })
    });
    ctx.check("gradients.identity_remark", 1e-8, |e| {
        worst_case(e.seed, e.heavy(), e.tol, |rng| {
            let f = poly(rng, e.n);
            let x = unit_direction(rng, e.n).scale_real(stratified_radius(rng, 12).max(1e-3));
            let g = gradient(&f, &x, &e.quad)?;
            let t = invariant_gradient_by_composition(&f, &x, &e.quad)?;
            let s = x.defect().sqrt();
            let lhs = &g.scale_real(s * s) + &t.scale_real(s);
            let rhs = x.conj().scale(x.pairing(&t) * (s - 1.0) / x.norm_sq());
            let res = lhs.distance(&rhs) / g.norm().max(1.0);
            Ok((res, json!({"f": f.label(), "x": point_json(&x)})))
        })
    });
    ctx.check("gradients.boundary_integral", 1e-8, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let f = poly(rng, e.n);
            let x = unit_direction(rng, e.n).scale_real(rng.random_range(1e-3..0.75));
            let lhs = radial_boundary_integral(&f, &x, e.quad.nodes)?;
            let rhs = radial_derivative(&f, &x, &e.quad)? * x.defect();
            Ok(((lhs - rhs).norm() / rhs.norm().max(1.0), json!({"f": f.label(), "x": point_json(&x)})))
        })
    });
}

pub fn seminorms(ctx: &mut Ctx) {
    let budget = ctx.cfg.budget(Suite::Seminorms);
    ctx.check("seminorms.linear_derivative", 1e-3, |e| {
        let u = unit_direction(&mut seeded(e.seed), e.n);
        let est = estimate_seminorm_with(&linear(&u), SeminormKind::Derivative, &budget.with_seed(e.seed), &e.quad)
            .map_err(|e| e.to_string())?;
        Ok(Outcome::within(est.value, 1.0 - e.tol, 1.0 + 1e-12, Some(json!({"u": point_json(&u)})), "estimate"))
    });
    ctx.check("seminorms.linear_radial", 1e-2, |e| {
        let u = unit_direction(&mut seeded(e.seed), e.n);
        let oracle = 2.0 / (3.0 * 3f64.sqrt());
        let est = estimate_seminorm_with(&linear(&u), SeminormKind::Radial, &budget.with_seed(e.seed), &e.quad)
            .map_err(|e| e.to_string())?;
        Ok(Outcome::within(est.value, oracle * (1.0 - e.tol), oracle * (1.0 + e.tol), Some(json!({"u": point_json(&u), "oracle": oracle})), "estimate"))
    });
    ctx.check("seminorms.pointwise_ordering", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (f, x) = (poly(rng, e.n), sample(rng, e.n, 30));
            let lhs = x.defect() * gradient(&f, &x, &e.quad)?.norm();
            let rhs = invariant_gradient(&f, &x, &e.quad)?.norm();
            Ok((lhs - rhs, json!({"f": f.label(), "x": point_json(&x)})))
        })
    });
    ctx.check("seminorms.equivalence_upper", 1e-6, |e| {
        let c = seminorm_equivalence();
        worst_case(e.seed, e.searches(), e.tol, |rng| {
            let (f, b) = known_bloch(rng, e.n);
            let est = estimate_seminorm_with(&f, SeminormKind::Invariant, &budget.with_seed(rng.random()), &e.quad)?;
            Ok((est.value - c * b, json!({"f": f.label(), "bloch": b, "invariant_estimate": est.value})))
        })
    });
    ctx.check("seminorms.metric_ratio_1d", 5e-2, |e| {
        let f = identity_1d();
        let b = budget.with_seed(e.seed);
        let ratio = estimate_seminorm_with(&f, SeminormKind::MetricRatio, &b, &e.quad).map_err(|e| e.to_string())?;
        let inv = estimate_seminorm_with(&f, SeminormKind::Invariant, &b, &e.quad).map_err(|e| e.to_string())?;
        let err = (ratio.value - inv.value).abs() / inv.value;
        Ok(Outcome::from_slack(
            e.tol - err,
            Some(json!({"metric_ratio": ratio.value, "invariant": inv.value})),
            format!("relative gap {err:.3e} (tol {:.0e})", e.tol),
        ))
    });
    ctx.check("seminorms.evaluation_bound", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let u = unit_direction(rng, e.n).scale_real(rng.random_range(0.0..1.0));
            let c0 = C64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..std::f64::consts::TAU));
            let x = sample(rng, e.n, 30);
            let fx = x.inner(&u) + c0;
            let EvalBound { l_x, .. } = eval_bound(&x)?;
            Ok((fx.norm() - l_x * (c0.norm() + u.norm()), json!({"u": point_json(&u), "c": [c0.re, c0.im], "x": point_json(&x)})))
        })
    });
    ctx.check("seminorms.growth_bound", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (f, b) = known_bloch(rng, e.n);
            let x = sample(rng, e.n, 30);
            let lhs = (f.value(&x) - f.value(&Point::zeros(e.n))).norm();
            Ok((lhs - growth_bound(b, &x), json!({"f": f.label(), "x": point_json(&x)})))
        })
    });
    ctx.check("seminorms.lipschitz", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (f, b) = known_bloch(rng, e.n);
            let delta = rng.random_range(0.0..0.99);
            let x = unit_direction(rng, e.n).scale_real(delta * rng.random::<f64>());
            let xp = unit_direction(rng, e.n).scale_real(delta * rng.random::<f64>());
            let (y, yp) = (unit_direction(rng, e.n), unit_direction(rng, e.n));
            let slack = lipschitz_slack(&f, b, delta, (&x, &y), (&xp, &yp), &e.quad)?;
            Ok((-slack, json!({"f": f.label(), "delta": delta, "x": point_json(&x), "x'": point_json(&xp)})))
        })
    });
    ctx.check("seminorms.sup_norm_bound", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let f = if e.n >= 2 && rng.random_bool(0.5) {
                let k = rng.random_range(2..=e.n.min(5));
                coordinate_product(e.n, &(0..k).collect::<Vec<_>>())
            } else {
                monomial(e.n, rng.random_range(0..e.n), rng.random_range(1..=6))
            };
            let sup = f.known().sup.expect("bounded family");
            let x = sample(rng, e.n, 30);
            let lhs = x.defect() * gradient(&f, &x, &e.quad)?.norm();
            Ok((lhs - sup, json!({"f": f.label(), "x": point_json(&x)})))
        })
    });
    ctx.check("seminorms.argmax_reevaluation", 1e-9, |e| {
        let f = poly(&mut seeded(e.seed), e.n);
        let mut worst: f64 = 0.0;
        for kind in SeminormKind::ALL {
            let est = estimate_seminorm_with(&f, kind, &budget.with_seed(e.seed), &e.quad).map_err(|e| e.to_string())?;
            worst = worst.max((est.reevaluate(&f, &e.quad).map_err(|e| e.to_string())? - est.value).abs());
        }
        Ok(Outcome::from_slack(e.tol - worst, Some(json!({"f": f.label()})), format!("largest re-evaluation gap {worst:.3e}")))
    });
}
