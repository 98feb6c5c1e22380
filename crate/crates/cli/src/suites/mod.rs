//! Verification suites. Every suite draws from its own seed, derived from the
//! run seed and the suite name, so suites can be added or dropped without
//! perturbing the others.

mod calculus;
mod compactness;
mod geometry;
mod operators;

use std::time::Instant;

use blochball_core::symbols::{BlockVariant, ScalarSpec};
use blochball_core::{build_symbol, Point, SymbolMap, SymbolSpec, C64};
use rayon::prelude::*;

use crate::check::{Ctx, Outcome, Status, SuiteReport};
use crate::config::{RunConfig, Suite};

pub struct CheckInfo {
    pub suite: &'static str,
    pub id: &'static str,
    pub anchor: &'static str,
}

const fn c(suite: &'static str, id: &'static str, anchor: &'static str) -> CheckInfo {
    CheckInfo { suite, id, anchor }
}

/// Id of the check appended by `inject_failure`.
pub const INJECTED: &str = "injected_failure";

pub static CHECKS: &[CheckInfo] = &[
    c("mobius", "mobius.involution", "phi_a(phi_a(x)) = x"),
    c("mobius", "mobius.swap_origin", "phi_a(0) = a"),
    c("mobius", "mobius.swap_parameter", "phi_a(a) = 0"),
    c("mobius", "mobius.derivative_inverse", "phi_a'(a) phi_a'(0) = I, with phi_a'(0) = -s_a^2 P_a - s_a Q_a"),
    c("mobius", "mobius.kernel_identity", "1 - <phi_a x, phi_a y> = (1 - |a|^2)(1 - <x,y>) / ((1 - <x,a>)(1 - <a,y>))"),
    c("mobius", "mobius.ball_preservation", "|phi_a(x)| < 1 for |x| < 1"),
    c("metrics", "metrics.closed_form", "|phi_x(y)|^2 = 1 - (1 - |x|^2)(1 - |y|^2) / |1 - <x,y>|^2"),
    c("metrics", "metrics.disk_oracle", "on a complex line rho(z, w) = |z - w| / |1 - conj(z) w|"),
    c("metrics", "metrics.mobius_invariance", "rho(phi_a x, phi_a y) = rho(x, y)"),
    c("metrics", "metrics.sharpened_triangle", "rho(x,y) <= (rho(x,u) + rho(u,y)) / (1 + rho(x,u) rho(u,y))"),
    c("metrics", "metrics.quotient_bound", "rho(x,y) <= |x - y| / |1 - <x,y>|"),
    c("metrics", "metrics.hyperbolic_triangle", "beta(x,y) <= beta(x,u) + beta(u,y), beta = atanh rho"),
    c("metrics", "metrics.outer_chain", "|x - y| / 2 <= rho(x,y) <= beta(x,y)"),
    c("metrics", "metrics.functional_lower_bound", "|f(x) - f(y)| <= beta(x,y) when |f|_inv <= 1"),
    c("gradients", "gradients.analytic_vs_quadrature", "contour-quadrature gradient equals the analytic gradient"),
    c("gradients", "gradients.quadrature_order", "32 and 64 contour nodes give the same derivative"),
    c("gradients", "gradients.transpose_vs_direct", "invariant gradient = grad(f o phi_x)(0) = phi_x'(0)^T grad f(x)"),
    c("gradients", "gradients.closed_form_norm", "|invgrad f(x)| = sup_w |<grad f(x), conj w>| (1-|x|^2) / sqrt((1-|x|^2)|w|^2 + |<w,x>|^2)"),
    c("gradients", "gradients.identity_remark", "s^2 grad f(x) + s invgrad f(x) = (s - 1) <x, conj invgrad f(x)> conj(x) / |x|^2, s^2 = 1 - |x|^2"),
    c("gradients", "gradients.boundary_integral", "(1 - |x|^2) Rf(x) = (-1 / 2 pi i) int_{|t|=1} f(phi_x(t x)) dt / t^2"),
    c("seminorms", "seminorms.linear_derivative", "sup (1 - |x|^2)|f'(x)| = 1 for f = <z,u>, |u| = 1"),
    c("seminorms", "seminorms.linear_radial", "sup (1 - |x|^2)|Rf(x)| = 2 / (3 sqrt 3) for f = <z,u>, |u| = 1"),
    c("seminorms", "seminorms.pointwise_ordering", "(1 - |x|^2)|grad f(x)| <= |invgrad f(x)|"),
    c("seminorms", "seminorms.equivalence_upper", "|f|_inv <= (1 + sqrt(31)/2) |f|_B"),
    c("seminorms", "seminorms.metric_ratio_1d", "sup |f(x) - f(y)| / beta(x,y) = |f|_inv on the disk, f = identity"),
    c("seminorms", "seminorms.evaluation_bound", "|f(x)| <= L_x (|f(0)| + |f|_inv), L_x = max(atanh|x|, 1)"),
    c("seminorms", "seminorms.growth_bound", "|f(x) - f(0)| <= (|f|_B / 2) log((1 + |x|) / (1 - |x|))"),
    c("seminorms", "seminorms.lipschitz", "|y.grad f(x) - y'.grad f(x')| <= C_delta |f|_B (|x - x'| + eps |y - y'|) on the delta-ball"),
    c("seminorms", "seminorms.sup_norm_bound", "(1 - |x|^2)|grad f(x)| <= sup |f|"),
    c("seminorms", "seminorms.argmax_reevaluation", "each semi-norm estimate is attained at its recorded maximizer"),
    c("schwarz_pick", "schwarz_pick.ball_preservation", "|phi(z)| < 1 for every built-in symbol"),
    c("schwarz_pick", "schwarz_pick.sch1", "|phi(z)| <= |z| when phi(0) = 0"),
    c("schwarz_pick", "schwarz_pick.sch2", "|<Rphi(z), phi(z)>| <= |z| |phi(z)| (1 - |phi(z)|^2) / (1 - |z|^2)"),
    c("schwarz_pick", "schwarz_pick.sl2", "(1 - |z|^2) |Rphi(z)| / |z| + |phi|^2 cos^2(Rphi, phi) <= 1"),
    c("schwarz_pick", "schwarz_pick.sch3", "|Rphi(z)| <= 2 sqrt(1 - |phi(z)|^2) / (1 - |z|^2)"),
    c("schwarz_pick", "schwarz_pick.xi_direction", "|<Rphi, xi>| >= sqrt(1 - |phi|^2)|Rphi| - (1 + sqrt(1 - |phi|^2)/|phi|) |<Rphi, phi>|"),
    c("boundedness", "boundedness.sqrt5", "(1 - |z|^2)|R(f o phi)(z)| <= sqrt 5 when |f|_inv <= 1"),
    c("boundedness", "boundedness.sqrt5_envelope", "the symbol-only envelope of (1 - |z|^2)|R(f o phi)(z)| stays below sqrt 5"),
    c("boundedness", "boundedness.chain_rule", "R(f o phi)(z) = <grad f(phi(z)), conj Rphi(z)>"),
    c("boundedness", "boundedness.norm_contraction", "phi(0) = 0 and |f|_inv <= 1 give |invgrad(f o phi)(x)| <= 1"),
    c("necessity", "necessity.b0_linear", "linear symbols <z, xi_m> lie in B_0: (1 - |z|^2)|Rphi(z)| -> 0"),
    c("necessity", "necessity.b0_mode_agreement", "for phi in B_0 with phi(0) = 0 the limits in |phi(z)| -> 1 and |z| -> 1 agree"),
    c("necessity", "necessity.unit_xi", "a unit vector among the xi_m forces the q2 limit away from 0"),
    c("necessity", "necessity.constant_components", "a constant symbol has vanishing component criteria"),
    c("sufficiency", "sufficiency.product_sup_bound", "sum_m sup|phi_m|^2 <= sum_m (m+1)^-(m+1) for prod_{j=m}^{2m} z_j"),
    c("sufficiency", "sufficiency.small_range", "a diagonal symbol with range inside a smaller ball is compact"),
    c("sufficiency", "sufficiency.lipschitz_constant", "C_delta = (1/eps)(1 + sqrt(31)/2) / (1 - 4(1+delta)/(4 + (1+delta)^2)), eps = (1-delta)/2"),
    c("examples", "examples.identity_q1", "phi(z) = z satisfies the q1 condition"),
    c("examples", "examples.identity_q2", "phi(z) = z fails the q2 condition: q2(z) = |z|^2 -> 1"),
    c("examples", "examples.identity_verdict", "C_phi for phi(z) = z is not compact"),
    c("examples", "examples.power_components", "phi_k(z) = z_k^k has A_k >= (1 - 1/k)^(k/2)"),
    c("examples", "examples.power_verdict", "phi_k(z) = z_k^k: the component limit stays away from 0, C_phi is not compact"),
    c("examples", "examples.block_power_scalar", "lambda^(2k) has limit 1 in the scalar criterion"),
    c("examples", "examples.block_power_verdict", "the block-power symbols phi and psi give non-compact operators"),
    c("examples", "examples.product_com1", "phi_m(z) = prod_{j=m}^{2m} z_j yields a compact operator"),
    c("any", INJECTED, "exit-code contract probe: always fails"),
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// The built-in symbol families at dimension `n`; families that do not fit are left out.
pub fn builtin_symbols(n: usize) -> Vec<(String, SymbolMap)> {
    let mut a = vec![C64::new(0.0, 0.0); n];
    a[0] = C64::new(0.3, -0.4);
    if n > 1 {
        a[1] = C64::new(0.0, 0.2);
    }
    let specs = vec![
        SymbolSpec::Identity,
        SymbolSpec::Power,
        SymbolSpec::BlockPower { variant: BlockVariant::Phi, blocks: None },
        SymbolSpec::BlockPower { variant: BlockVariant::Psi, blocks: None },
        SymbolSpec::ProductCom1,
        SymbolSpec::Linear { xi: None, scales: Some((0..n).map(|k| 0.8f64.powi(k as i32)).collect()) },
        SymbolSpec::Linear { xi: Some(rotated_orthonormal(n)), scales: None },
        SymbolSpec::Diagonal {
            maps: vec![
                ScalarSpec::Blaschke { a: C64::new(0.5, 0.1) },
                ScalarSpec::ScaledPower { c: C64::new(0.0, 0.9), m: 3 },
                ScalarSpec::Power { m: 2 },
            ],
        },
        SymbolSpec::Automorphism { a },
        SymbolSpec::Constant { c: vec![C64::new(0.2, 0.1); n.min(4)] },
    ];
    let mut out = Vec::new();
    for spec in specs {
        if let Ok(map) = build_symbol(&spec, n) {
            let mut name = spec.name().to_string();
            if matches!(&spec, SymbolSpec::Linear { xi: Some(_), .. }) {
                name.push_str("_orthonormal");
            }
            out.push((name, map));
        }
    }
    out
}

/// An orthonormal system mixing neighbouring coordinates, so that the
/// linear family is exercised off the standard basis.
fn rotated_orthonormal(n: usize) -> Vec<Vec<C64>> {
    let (cs, sn) = (0.6, 0.8);
    (0..n)
        .map(|m| {
            let mut v = vec![C64::new(0.0, 0.0); n];
            if m + 1 < n && m % 2 == 0 {
                v[m] = C64::new(cs, 0.0);
                v[m + 1] = C64::new(0.0, sn);
            } else if m % 2 == 1 {
                v[m - 1] = C64::new(sn, 0.0);
                v[m] = C64::new(0.0, -cs);
            } else {
                v[m] = C64::new(1.0, 0.0);
            }
            v
        })
        .collect()
}

/// Extra symbols from the config, named by family and position.
pub fn config_symbols(cfg: &RunConfig) -> Vec<(String, SymbolMap)> {
    cfg.symbols
        .iter()
        .enumerate()
        .filter_map(|(i, s)| build_symbol(s, cfg.dimension).ok().map(|m| (format!("{}_{i}", s.name()), m)))
        .collect()
}

/// Built-in and configured symbols.
pub fn all_symbols(cfg: &RunConfig) -> Vec<(String, SymbolMap)> {
    let mut v = builtin_symbols(cfg.dimension);
    v.extend(config_symbols(cfg));
    v
}

pub fn point_json(p: &Point) -> serde_json::Value {
    serde_json::to_value(p).unwrap_or(serde_json::Value::Null)
}

/// Runs one suite. Individual check failures, errors and panics are recorded,
/// never propagated.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> SuiteReport {
    let start = Instant::now();
    let mut ctx = Ctx::new(cfg, suite);
    match suite {
        Suite::Mobius => geometry::mobius(&mut ctx),
        Suite::Metrics => geometry::metrics(&mut ctx),
        Suite::Gradients => calculus::gradients(&mut ctx),
        Suite::Seminorms => calculus::seminorms(&mut ctx),
        Suite::SchwarzPick => operators::schwarz_pick(&mut ctx),
        Suite::Boundedness => operators::boundedness(&mut ctx),
        Suite::Necessity => compactness::necessity(&mut ctx),
        Suite::Sufficiency => compactness::sufficiency(&mut ctx),
        Suite::Examples => compactness::examples(&mut ctx),
    }
    ctx.finish(cfg.include_timing.then(|| start.elapsed().as_secs_f64()))
}

/// Runs the configured suites, possibly concurrently, and returns their
/// reports ordered by suite name.
pub fn run_suites(cfg: &RunConfig) -> Vec<SuiteReport> {
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let mut reports: Vec<SuiteReport> = suites.par_iter().map(|&s| run_suite(cfg, s)).collect();
    if cfg.inject_failure {
        if let Some(first) = reports.first_mut() {
            let anchor = CHECKS.iter().find(|c| c.id == INJECTED).map_or("", |c| c.anchor);
            first.checks.push(crate::check::CheckRecord {
                id: INJECTED.into(),
                anchor: anchor.into(),
                status: Status::Fail,
                witness: None,
                slack: Some(-1.0),
                detail: Outcome::fail("injected by configuration").detail,
                wall_time: None,
            });
        }
    }
    reports
}

/// Nonzero iff some check failed.
pub fn exit_code(reports: &[SuiteReport]) -> i32 {
    i32::from(reports.iter().any(|r| r.checks.iter().any(|c| c.status == Status::Fail)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_consistent() {
        let ids = check_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len(), "duplicate check id");
        for c in CHECKS {
            assert!(c.suite == "any" || c.id.starts_with(&format!("{}.", c.suite)), "{}", c.id);
            assert!(c.suite == "any" || c.suite.parse::<Suite>().is_ok());
            assert!(!c.anchor.is_empty());
        }
    }

    #[test]
    fn builtins_cover_every_family() {
        let names: Vec<String> = builtin_symbols(16).into_iter().map(|s| s.0).collect();
        for f in ["identity", "power", "block_power_phi", "block_power_psi", "product_com1", "linear", "linear_orthonormal", "diagonal", "automorphism", "constant"] {
            assert!(names.iter().any(|n| n == f), "{f}");
        }
        assert!(builtin_symbols(1).len() >= 5);
    }

    #[test]
    fn orthonormal_system() {
        for n in [1, 2, 5, 8] {
            let v = rotated_orthonormal(n);
            for i in 0..n {
                for j in 0..n {
                    let ip: C64 = (0..n).map(|k| v[i][k] * v[j][k].conj()).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - want).norm() < 1e-12, "n={n} {i} {j}");
                }
            }
        }
    }
}
