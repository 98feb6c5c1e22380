use blochball_core::diagnostics::{
    b0_membership, boundary_sweep, compactness_proxy, compactness_report, component_criterion, component_sweep,
    scalar_criterion, ProxyMode, Quantity, ReportConfig, SweepMode, Trend, Verdict,
};
use blochball_core::symbols::{BlockVariant, ScalarSpec};
use blochball_core::{bloch::lipschitz_constant, build_symbol, ScalarMap, SymbolMap, SymbolSpec, C64};
use serde_json::json;

use super::{builtin_symbols, config_symbols};
use crate::check::{Ctx, Env, Outcome, SweepRecord};
use crate::config::Suite;

fn diag(e: &Env) -> ReportConfig {
    e.cfg.diagnostics.clone().with_seed(e.seed)
}

fn err(e: blochball_core::Error) -> String {
    e.to_string()
}

fn symbol(spec: &SymbolSpec, n: usize) -> Result<SymbolMap, String> {
    build_symbol(spec, n).map_err(err)
}

fn trend_str(t: Trend) -> &'static str {
    match t {
        Trend::ToZero => "to_zero",
        Trend::BoundedAway => "bounded_away",
        Trend::Inconclusive => "inconclusive",
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::NoncompactNecessaryViolated => "noncompact_necessary_violated",
        Verdict::CompactSufficient => "compact_sufficient",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Built-in and configured symbols of the linear family.
fn linear_symbols(e: &Env) -> Vec<(String, SymbolMap)> {
    let mut v: Vec<(String, SymbolMap)> =
        builtin_symbols(e.n).into_iter().filter(|s| s.0.starts_with("linear")).collect();
    v.extend(config_symbols(e.cfg).into_iter().filter(|s| s.0.starts_with("linear")));
    v
}

fn small_range_diagonal(n: usize) -> Result<SymbolMap, String> {
    let spec = SymbolSpec::Diagonal {
        maps: vec![
            ScalarSpec::ScaledPower { c: C64::new(0.5, 0.0), m: 1 },
            ScalarSpec::ScaledPower { c: C64::new(0.0, 0.25), m: 2 },
        ],
    };
    symbol(&spec, n)
}

pub fn necessity(ctx: &mut Ctx) {
    ctx.check("necessity.b0_linear", 0.0, |e| {
        let d = diag(e);
        let mut conds = Vec::new();
        let mut sweeps = Vec::new();
        for (name, phi) in linear_symbols(e) {
            let est = b0_membership(&phi, &d.sweep, &d.trend).map_err(err)?;
            conds.push((est.trend == Trend::ToZero, format!("{name}: b0 trend {}", trend_str(est.trend))));
            sweeps.push(SweepRecord::from_estimate(&name, &est));
        }
        Ok(Outcome::all(&conds, None).with_sweeps(sweeps))
    });
    ctx.check("necessity.b0_mode_agreement", 0.0, |e| {
        let d = diag(e);
        let mut pool = linear_symbols(e);
        pool.extend(builtin_symbols(e.n).into_iter().filter(|s| s.0 == "identity" || s.0 == "diagonal"));
        let mut conds = Vec::new();
        for (name, phi) in pool.iter().filter(|s| s.1.fixes_origin()) {
            for q in [Quantity::Q1, Quantity::Q2] {
                let a = boundary_sweep(phi, q, SweepMode::Phi, &d.sweep, &d.trend).map_err(err)?;
                let b = boundary_sweep(phi, q, SweepMode::Z, &d.sweep, &d.trend).map_err(err)?;
                conds.push((
                    a.trend == b.trend,
                    format!("{name} {}: phi-mode {} / z-mode {}", q.as_str(), trend_str(a.trend), trend_str(b.trend)),
                ));
            }
        }
        Ok(Outcome::all(&conds, None))
    });
    ctx.check("necessity.unit_xi", 0.0, |e| {
        let d = diag(e);
        let mut conds = Vec::new();
        let mut sweeps = Vec::new();
        for (name, phi) in builtin_symbols(e.n).into_iter().filter(|s| s.0.starts_with("linear")) {
            let est = boundary_sweep(&phi, Quantity::Q2, SweepMode::Phi, &d.sweep, &d.trend).map_err(err)?;
            conds.push((est.trend == Trend::BoundedAway, format!("{name}: q2 trend {}, limit {:.4}", trend_str(est.trend), est.limit_estimate)));
            sweeps.push(SweepRecord::from_estimate(&name, &est));
        }
        Ok(Outcome::all(&conds, None).with_sweeps(sweeps))
    });
    ctx.check("necessity.constant_components", 0.0, |e| {
        let d = diag(e);
        let phi = symbol(&SymbolSpec::Constant { c: vec![C64::new(0.3, 0.0), C64::new(0.0, -0.2)] }, e.n)?;
        let mut worst: f64 = 0.0;
        for k in 0..e.n.min(d.component_cap) {
            if let Some(r) = component_criterion(&phi, k, &d.component).map_err(err)? {
                worst = worst.max(r.value);
            }
        }
        let b0 = b0_membership(&phi, &d.sweep, &d.trend).map_err(err)?;
        Ok(Outcome::all(
            &[
                (worst == 0.0, format!("largest component criterion {worst:e}")),
                (b0.trend == Trend::ToZero, format!("b0 trend {}", trend_str(b0.trend))),
            ],
            None,
        ))
    });
}

/// `sum_{j >= 2} j^-j`, summed until the terms underflow.
fn product_series() -> f64 {
    (2..200).map(|j: i32| (j as f64).powi(-j)).sum()
}

pub fn sufficiency(ctx: &mut Ctx) {
    ctx.check("sufficiency.product_sup_bound", 1e-6, |e| {
        if e.n < 2 {
            return Ok(Outcome::skip("needs n >= 2"));
        }
        let phi = symbol(&SymbolSpec::ProductCom1, e.n)?;
        let oracle = product_series();
        let Some(bound) = phi.sup_norm_bound() else {
            return Ok(Outcome::fail("no certified sup-norm bound"));
        };
        let sq = bound * bound;
        Ok(Outcome::from_slack(
            oracle + e.tol - sq,
            Some(json!({"certified_sup_sq": sq, "oracle": oracle})),
            format!("certified |phi|_inf^2 = {sq:.7} vs series {oracle:.7}"),
        ))
    });
    ctx.check("sufficiency.small_range", 0.0, |e| {
        let d = diag(e);
        let mut conds = Vec::new();
        let cases = [
            ("diagonal_small", small_range_diagonal(e.n)?),
            ("constant", symbol(&SymbolSpec::Constant { c: vec![C64::new(0.2, 0.1); e.n.min(4)] }, e.n)?),
        ];
        for (name, phi) in cases {
            let v = compactness_report(&phi, &d).map_err(err)?;
            conds.push((v.verdict == Verdict::CompactSufficient, format!("{name}: {}", verdict_str(v.verdict))));
        }
        Ok(Outcome::all(&conds, None))
    });
    ctx.check("sufficiency.lipschitz_constant", 1e-12, |e| {
        let k = 1.0 + 31f64.sqrt() / 2.0;
        let mut worst: f64 = 0.0;
        for (delta, oracle) in [(0.0, 2.0 * k * 5.0), (0.5, 4.0 * k * 25.0)] {
            let got = lipschitz_constant(delta).map_err(err)?.value;
            worst = worst.max((got - oracle).abs() / oracle);
        }
        Ok(Outcome::from_slack(e.tol - worst, None, format!("largest relative gap {worst:.3e} at delta in {{0, 0.5}}")))
    });
}

pub fn examples(ctx: &mut Ctx) {
    let budget = ctx.cfg.budget(Suite::Examples);
    ctx.check("examples.identity_q1", 0.0, |e| {
        let d = diag(e);
        let id = symbol(&SymbolSpec::Identity, e.n)?;
        let est = boundary_sweep(&id, Quantity::Q1, SweepMode::Phi, &d.sweep, &d.trend).map_err(err)?;
        let rec = SweepRecord::from_estimate("identity", &est);
        Ok(Outcome::all(&[(est.trend == Trend::ToZero, format!("q1 trend {}", trend_str(est.trend)))], None).with_sweeps(vec![rec]))
    });
    ctx.check("examples.identity_q2", 0.02, |e| {
        let d = diag(e);
        let id = symbol(&SymbolSpec::Identity, e.n)?;
        let est = boundary_sweep(&id, Quantity::Q2, SweepMode::Phi, &d.sweep, &d.trend).map_err(err)?;
        let mut worst: f64 = 0.0;
        for b in est.per_bin.iter() {
            if let Some(s) = b.sup {
                let profile = b.high * b.high;
                worst = worst.max((s - profile).abs() / profile);
            }
        }
        let rec = SweepRecord::from_estimate("identity", &est);
        Ok(Outcome::all(
            &[
                (worst <= e.tol, format!("largest relative gap to |z|^2 profile {worst:.3e}")),
                (est.trend == Trend::BoundedAway, format!("q2 trend {}", trend_str(est.trend))),
                ((est.limit_estimate - 1.0).abs() <= e.tol, format!("limit {:.6}", est.limit_estimate)),
            ],
            None,
        )
        .with_sweeps(vec![rec]))
    });
    ctx.check("examples.identity_verdict", 0.0, |e| {
        let v = compactness_report(&symbol(&SymbolSpec::Identity, e.n)?, &diag(e)).map_err(err)?;
        Ok(Outcome::all(&[(v.verdict == Verdict::NoncompactNecessaryViolated, verdict_str(v.verdict).into())], None))
    });
    ctx.check("examples.power_components", 1e-9, |e| {
        let p = symbol(&SymbolSpec::Power, e.n)?;
        let mut slack = f64::INFINITY;
        let mut rows = Vec::new();
        for k in 1..=e.n.min(20) {
            let a = component_criterion(&p, k - 1, &budget.with_seed(e.sub_seed(&k.to_string()))).map_err(err)?.map_or(0.0, |r| r.value);
            let lower = (1.0 - 1.0 / k as f64).powf(k as f64 / 2.0);
            slack = slack.min(a - lower + e.tol);
            rows.push(json!({"k": k, "a_k": a, "lower": lower}));
        }
        Ok(Outcome::from_slack(slack, Some(json!(rows)), format!("A_k - (1 - 1/k)^(k/2) for k <= {}", e.n.min(20))))
    });
    ctx.check("examples.power_verdict", 0.0, |e| {
        let d = diag(e);
        let p = symbol(&SymbolSpec::Power, e.n)?;
        let c3 = component_sweep(&p, &d.component, &d.trend, d.component_cap).map_err(err)?;
        let v = compactness_report(&p, &d).map_err(err)?;
        Ok(Outcome::all(
            &[
                (c3.trend == Trend::BoundedAway, format!("c3 trend {}, limit {:.4}", trend_str(c3.trend), c3.limit_estimate)),
                (v.verdict == Verdict::NoncompactNecessaryViolated, verdict_str(v.verdict).into()),
            ],
            None,
        )
        .with_sweeps(vec![SweepRecord::from_estimate("power", &c3)]))
    });
    ctx.check("examples.block_power_scalar", 1e-9, |e| {
        let d = diag(e);
        let blocks = blochball_core::symbols::default_blocks(e.n).len().max(1);
        let mut conds = Vec::new();
        for k in 1..=blocks as u32 {
            let f = ScalarMap::new(format!("lambda^{}", 2 * k), move |l: C64| l.powu(2 * k))
                .with_derivative(move |l: C64| l.powu(2 * k - 1) * (2 * k) as f64);
            let est = scalar_criterion(&f, &d.scalar, &d.trend).map_err(err)?;
            let lim = est.limit_estimate;
            conds.push(((0.9..=1.0 + e.tol).contains(&lim), format!("{}: limit {lim:.5}", f.label())));
        }
        Ok(Outcome::all(&conds, None))
    });
    ctx.check("examples.block_power_verdict", 0.0, |e| {
        if e.n < 2 {
            return Ok(Outcome::skip("needs n >= 2"));
        }
        let d = diag(e);
        let mut conds = Vec::new();
        for variant in [BlockVariant::Phi, BlockVariant::Psi] {
            let spec = SymbolSpec::BlockPower { variant, blocks: None };
            let v = compactness_report(&symbol(&spec, e.n)?, &d).map_err(err)?;
            conds.push((v.verdict == Verdict::NoncompactNecessaryViolated, format!("{}: {}", spec.name(), verdict_str(v.verdict))));
        }
        Ok(Outcome::all(&conds, None))
    });
    ctx.check("examples.product_com1", 1e-6, |e| {
        if e.n < 4 {
            return Ok(Outcome::skip("needs n >= 4"));
        }
        let d = diag(e);
        let phi = symbol(&SymbolSpec::ProductCom1, e.n)?;
        let sq = phi.sup_norm_bound().map_or(f64::INFINITY, |b| b * b);
        let v = compactness_report(&phi, &d).map_err(err)?;
        let mut conds = vec![
            (sq <= 0.2913 + e.tol, format!("certified |phi|_inf^2 = {sq:.7}")),
            (v.verdict == Verdict::CompactSufficient, verdict_str(v.verdict).into()),
        ];
        for m in [e.n / 2, e.n] {
            let p = compactness_proxy(&symbol(&SymbolSpec::ProductCom1, m)?, ProxyMode::WholeBall, 1.0, &d.proxy).map_err(err)?;
            conds.push((p.consistent, format!("whole-ball proxy at n = {m}: {}", if p.consistent { "consistent" } else { "inconsistent" })));
        }
        Ok(Outcome::all(&conds, None))
    });
}
