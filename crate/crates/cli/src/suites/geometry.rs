use blochball_core::metric::{hyperbolic, pseudo_hyperbolic};
use blochball_core::sampling::{stratified_radius, unit_direction, SampleRng};
use blochball_core::{mobius_apply, DerivativeAt, MobiusAutomorphism, Point, C64};
use rand::Rng;
use serde_json::json;

use super::point_json;
use crate::check::{worst_case, Ctx};

const ONE: C64 = C64::new(1.0, 0.0);

/// Direction times a radius with substantial mass near `|x| = 1 - 2^-depth`.
fn sample(rng: &mut SampleRng, n: usize, depth: u32) -> Point {
    unit_direction(rng, n).scale_real(stratified_radius(rng, depth))
}

fn parameter(rng: &mut SampleRng, n: usize) -> Point {
    let r: f64 = rng.random::<f64>() * 0.95;
    unit_direction(rng, n).scale_real(r)
}

/// A second point that is close to `x` a quarter of the time.
fn partner(rng: &mut SampleRng, x: &Point, depth: u32) -> Point {
    if rng.random_bool(0.25) {
        let h = 10f64.powf(-rng.random_range(2.0..8.0)) * (1.0 - x.norm());
        let y = x + &unit_direction(rng, x.dim()).scale_real(h);
        if y.is_interior() {
            return y;
        }
    }
    sample(rng, x.dim(), depth)
}

pub fn mobius(ctx: &mut Ctx) {
    ctx.check("mobius.involution", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (a, x) = (parameter(rng, e.n), sample(rng, e.n, 20));
            let m = MobiusAutomorphism::new(a.clone())?;
            let back = m.apply(&m.apply(&x)?)?;
            Ok((back.distance(&x), json!({"a": point_json(&a), "x": point_json(&x)})))
        })
    });
    ctx.check("mobius.swap_origin", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let a = parameter(rng, e.n);
            let img = mobius_apply(&a, &Point::zeros(e.n))?;
            Ok((img.distance(&a), json!({"a": point_json(&a)})))
        })
    });
    ctx.check("mobius.swap_parameter", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let a = parameter(rng, e.n);
            Ok((mobius_apply(&a, &a)?.norm(), json!({"a": point_json(&a)})))
        })
    });
    ctx.check("mobius.derivative_inverse", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let a = parameter(rng, e.n);
            let y = unit_direction(rng, e.n);
            let m = MobiusAutomorphism::new(a.clone())?;
            let (d0, da) = (m.derivative(DerivativeAt::Origin), m.derivative(DerivativeAt::FixedA));
            let round = da.apply(&d0.apply(&y));
            Ok((round.distance(&y), json!({"a": point_json(&a), "y": point_json(&y)})))
        })
    });
    ctx.check("mobius.kernel_identity", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (a, x, y) = (parameter(rng, e.n), sample(rng, e.n, 12), sample(rng, e.n, 12));
            let m = MobiusAutomorphism::new(a.clone())?;
            let (px, py) = (m.apply(&x)?, m.apply(&y)?);
            let lhs = ONE - px.inner(&py);
            let rhs = (1.0 - a.norm_sq()) * (ONE - x.inner(&y)) / ((ONE - x.inner(&a)) * (ONE - a.inner(&y)));
            let err = (lhs - rhs).norm() / rhs.norm().max(1.0);
            Ok((err, json!({"a": point_json(&a), "x": point_json(&x), "y": point_json(&y)})))
        })
    });
    ctx.check("mobius.ball_preservation", 0.0, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (a, x) = (parameter(rng, e.n), sample(rng, e.n, 30));
            let img = mobius_apply(&a, &x)?;
            Ok((img.norm() - 1.0, json!({"a": point_json(&a), "x": point_json(&x), "norm": img.norm()})))
        })
    });
}

fn rho(x: &Point, y: &Point) -> blochball_core::Result<f64> {
    pseudo_hyperbolic(x, y)
}

pub fn metrics(ctx: &mut Ctx) {
    ctx.check("metrics.closed_form", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let x = sample(rng, e.n, 16);
            let y = partner(rng, &x, 16);
            let direct = mobius_apply(&x, &y)?.norm();
            let closed = rho(&x, &y)?;
            Ok(((direct - closed).abs(), json!({"x": point_json(&x), "y": point_json(&y), "direct": direct, "closed": closed})))
        })
    });
    ctx.check("metrics.disk_oracle", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let z = C64::from_polar(stratified_radius(rng, 20), rng.random::<f64>() * std::f64::consts::TAU);
            let w = C64::from_polar(stratified_radius(rng, 20), rng.random::<f64>() * std::f64::consts::TAU);
            let u = unit_direction(rng, e.n);
            let oracle = (z - w).norm() / (ONE - z.conj() * w).norm();
            let got = rho(&u.scale(z), &u.scale(w))?;
            Ok(((got - oracle).abs(), json!({"z": [z.re, z.im], "w": [w.re, w.im], "oracle": oracle, "got": got})))
        })
    });
    ctx.check("metrics.mobius_invariance", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (a, x) = (parameter(rng, e.n), sample(rng, e.n, 12));
            let y = partner(rng, &x, 12);
            let m = MobiusAutomorphism::new(a.clone())?;
            let moved = rho(&m.apply(&x)?, &m.apply(&y)?)?;
            let base = rho(&x, &y)?;
            Ok(((moved - base).abs(), json!({"a": point_json(&a), "x": point_json(&x), "y": point_json(&y)})))
        })
    });
    ctx.check("metrics.sharpened_triangle", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (x, u) = (sample(rng, e.n, 16), sample(rng, e.n, 16));
            let y = partner(rng, &x, 16);
            let (a, b) = (rho(&x, &u)?, rho(&u, &y)?);
            let err = rho(&x, &y)? - (a + b) / (1.0 + a * b);
            Ok((err, json!({"x": point_json(&x), "u": point_json(&u), "y": point_json(&y)})))
        })
    });
    ctx.check("metrics.quotient_bound", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let x = sample(rng, e.n, 16);
            let y = partner(rng, &x, 16);
            let err = rho(&x, &y)? - x.distance(&y) / (ONE - x.inner(&y)).norm();
            Ok((err, json!({"x": point_json(&x), "y": point_json(&y)})))
        })
    });
    ctx.check("metrics.hyperbolic_triangle", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (x, u, y) = (sample(rng, e.n, 16), sample(rng, e.n, 16), sample(rng, e.n, 16));
            let err = hyperbolic(&x, &y)? - hyperbolic(&x, &u)? - hyperbolic(&u, &y)?;
            Ok((err, json!({"x": point_json(&x), "u": point_json(&u), "y": point_json(&y)})))
        })
    });
    ctx.check("metrics.outer_chain", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let x = sample(rng, e.n, 16);
            let y = partner(rng, &x, 16);
            let r = rho(&x, &y)?;
            let err = (0.5 * x.distance(&y) - r).max(r - hyperbolic(&x, &y)?);
            Ok((err, json!({"x": point_json(&x), "y": point_json(&y)})))
        })
    });
    ctx.check("metrics.functional_lower_bound", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let x = sample(rng, e.n, 16);
            let y = partner(rng, &x, 16);
            let u = unit_direction(rng, e.n);
            let err = (x.inner(&u) - y.inner(&u)).norm() - hyperbolic(&x, &y)?;
            Ok((err, json!({"x": point_json(&x), "y": point_json(&y), "u": point_json(&u)})))
        })
    });
}
