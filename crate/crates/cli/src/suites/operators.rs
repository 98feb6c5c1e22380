use blochball_core::diagnostics::{schwarz_pick_residuals, sqrt5_quantity, xi_direction};
use blochball_core::holo::{invariant_gradient, radial_derivative, unit_ball_test_family};
use blochball_core::sampling::{stratified_point, unit_direction, SampleRng};
use blochball_core::symbols::chain_rule_radial;
use blochball_core::{pullback, Error, Point, SymbolMap};
use rand::Rng;
use serde_json::{json, Value};

use super::{all_symbols, point_json};
use crate::check::{worst_case, Ctx, Outcome};

const SQRT5: f64 = 2.236_067_977_499_79;

/// Deepest boundary layer probed by the pointwise symbol checks.
const DEPTH: u32 = 20;

fn pick<'a>(rng: &mut SampleRng, symbols: &'a [(String, SymbolMap)]) -> &'a (String, SymbolMap) {
    &symbols[rng.random_range(0..symbols.len())]
}

fn witness(name: &str, z: &Point) -> Value {
    json!({"symbol": name, "z": point_json(z)})
}

pub fn schwarz_pick(ctx: &mut Ctx) {
    let symbols = all_symbols(ctx.cfg);
    let fixing: Vec<(String, SymbolMap)> = symbols.iter().filter(|s| s.1.fixes_origin()).cloned().collect();
    ctx.check("schwarz_pick.ball_preservation", 0.0, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (name, phi) = pick(rng, &symbols);
            let z = stratified_point(rng, e.n, 30);
            Ok((phi.eval(&z)?.norm() - 1.0, witness(name, &z)))
        })
    });
    for (id, slot) in [("schwarz_pick.sch1", 3), ("schwarz_pick.sch2", 0), ("schwarz_pick.sl2", 1), ("schwarz_pick.sch3", 2)] {
        let pool = if slot == 3 { &fixing } else { &symbols };
        ctx.check(id, 1e-9, |e| {
            if pool.is_empty() {
                return Ok(Outcome::vacuous("no origin-fixing symbol"));
            }
            worst_case(e.seed, e.samples(), e.tol, |rng| {
                let (name, phi) = pick(rng, pool);
                let z = stratified_point(rng, e.n, DEPTH);
                let (_, slack, skipped) = schwarz_pick_residuals(phi, &z)?.named()[slot];
                let err = if skipped { f64::NEG_INFINITY } else { -slack };
                Ok((err, witness(name, &z)))
            })
        });
    }
    ctx.check("schwarz_pick.xi_direction", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (name, phi) = pick(rng, &symbols);
            let z = stratified_point(rng, e.n, DEPTH);
            if phi.eval(&z)?.norm() < 1e-6 {
                return Ok((f64::NEG_INFINITY, Value::Null));
            }
            match xi_direction(phi, &z) {
                Ok(x) => Ok((-x.slack, witness(name, &z))),
                Err(Error::Degenerate(_)) => Ok((f64::NEG_INFINITY, Value::Null)),
                Err(err) => Err(err),
            }
        })
    });
}

pub fn boundedness(ctx: &mut Ctx) {
    let symbols = all_symbols(ctx.cfg);
    ctx.check("boundedness.sqrt5", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (name, phi) = pick(rng, &symbols);
            let family = unit_ball_test_family(e.n, &unit_direction(rng, e.n));
            let f = &family[rng.random_range(0..family.len())];
            let z = stratified_point(rng, e.n, 24);
            let (w, r) = (phi.eval(&z)?, phi.radial(&z)?);
            let g = f.analytic_gradient(&w).expect("test family carries gradients");
            let v = z.defect() * r.pairing(&g).norm();
            Ok((v - SQRT5, json!({"symbol": name, "f": f.label(), "z": point_json(&z), "value": v})))
        })
    });
    ctx.check("boundedness.sqrt5_envelope", 1e-9, |e| {
        worst_case(e.seed, e.samples(), e.tol, |rng| {
            let (name, phi) = pick(rng, &symbols);
            let z = stratified_point(rng, e.n, 24);
            Ok((sqrt5_quantity(phi, &z)? - SQRT5, witness(name, &z)))
        })
    });
    ctx.check("boundedness.chain_rule", 1e-7, |e| {
        worst_case(e.seed, e.heavy() / 4 + 1, e.tol, |rng| {
            let (name, phi) = pick(rng, &symbols);
            let family = unit_ball_test_family(e.n, &unit_direction(rng, e.n));
            let f = &family[rng.random_range(0..family.len())];
            let z = stratified_point(rng, e.n, 12);
            let via_chain = chain_rule_radial(phi, f, &z, &e.quad)?;
            let direct = radial_derivative(&pullback(phi, f)?, &z, &e.quad)?;
            let err = (via_chain - direct).norm() / direct.norm().max(1.0);
            Ok((err, json!({"symbol": name, "f": f.label(), "z": point_json(&z)})))
        })
    });
    let fixing: Vec<(String, SymbolMap)> = symbols.iter().filter(|s| s.1.fixes_origin()).cloned().collect();
    ctx.check("boundedness.norm_contraction", 1e-6, |e| {
        if fixing.is_empty() {
            return Ok(Outcome::vacuous("no origin-fixing symbol"));
        }
        worst_case(e.seed, e.heavy() / 4 + 1, e.tol, |rng| {
            let (name, phi) = pick(rng, &fixing);
            let family = unit_ball_test_family(e.n, &unit_direction(rng, e.n));
            let f = &family[rng.random_range(0..family.len())];
            let x = stratified_point(rng, e.n, 16);
            let v = invariant_gradient(&pullback(phi, f)?, &x, &e.quad)?.norm();
            Ok((v - 1.0, json!({"symbol": name, "f": f.label(), "x": point_json(&x), "value": v})))
        })
    });
}
