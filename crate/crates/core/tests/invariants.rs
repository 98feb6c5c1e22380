use blochball_core::diagnostics::{schwarz_pick_residuals, sqrt5_quantity, xi_direction};
use blochball_core::holo::{
    gradient, invariant_gradient, invariant_gradient_by_composition, quadrature_gradient, radial_derivative,
    random_polynomial,
};
use blochball_core::metric::{disk_rho, hyperbolic, pseudo_hyperbolic};
use blochball_core::sampling::seeded;
use blochball_core::symbols::{chain_rule_radial, ScalarSpec};
use blochball_core::{build_symbol, pullback, MobiusAutomorphism, Point, QuadratureConfig, SymbolSpec, C64};
use proptest::prelude::*;

fn point(n: usize, max_r: f64) -> impl Strategy<Value = Point> {
    (prop::collection::vec(-1.0f64..1.0, 2 * n), 0.0..max_r).prop_map(move |(v, r)| {
        let p = Point::from_real_pairs(&v);
        match p.normalized() {
            Some(u) => u.scale_real(r),
            None => Point::zeros(n),
        }
    })
}

fn symbols(n: usize) -> Vec<SymbolSpec> {
    let mut a = vec![C64::new(0.0, 0.0); n];
    a[0] = C64::new(0.3, -0.4);
    if n > 1 {
        a[1] = C64::new(0.0, 0.2);
    }
    vec![
        SymbolSpec::Identity,
        SymbolSpec::Power,
        SymbolSpec::ProductCom1,
        SymbolSpec::Automorphism { a },
        SymbolSpec::Linear { xi: None, scales: Some((0..n).map(|k| 1.0 / (k + 1) as f64).collect()) },
        SymbolSpec::Diagonal {
            maps: vec![ScalarSpec::Blaschke { a: C64::new(0.5, 0.1) }, ScalarSpec::ScaledPower { c: C64::new(0.0, 0.9), m: 3 }],
        },
        SymbolSpec::BlockPower { variant: Default::default(), blocks: None },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_is_an_involution(a in point(5, 0.95), x in point(5, 0.999)) {
        let m = MobiusAutomorphism::new(a.clone()).unwrap();
        let back = m.apply(&m.apply(&x).unwrap()).unwrap();
        prop_assert!(back.distance(&x) < 1e-9, "{}", back.distance(&x));
        prop_assert!(m.apply(&Point::zeros(5)).unwrap().distance(&a) < 1e-14);
        prop_assert!(m.apply(&a).unwrap().norm() < 1e-12);
    }

    #[test]
    fn mobius_kernel_identity(a in point(4, 0.9), x in point(4, 0.9), y in point(4, 0.9)) {
        // 1 - <phi x, phi y> = (1 - |a|^2)(1 - <x, y>) / ((1 - <x, a>)(1 - <a, y>))
        let m = MobiusAutomorphism::new(a.clone()).unwrap();
        let (px, py) = (m.apply(&x).unwrap(), m.apply(&y).unwrap());
        let one = C64::new(1.0, 0.0);
        let lhs = one - px.inner(&py);
        let rhs = (1.0 - a.norm_sq()) * (one - x.inner(&y)) / ((one - x.inner(&a)) * (one - a.inner(&y)));
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn metric_axioms(a in point(3, 0.9), x in point(3, 0.99), y in point(3, 0.99), w in point(3, 0.99)) {
        let rho = pseudo_hyperbolic(&x, &y).unwrap();
        prop_assert!((0.0..1.0).contains(&rho) || rho == 1.0);
        prop_assert!((rho - pseudo_hyperbolic(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(pseudo_hyperbolic(&x, &x).unwrap() < 1e-7);
        let m = MobiusAutomorphism::new(a).unwrap();
        let moved = pseudo_hyperbolic(&m.apply(&x).unwrap(), &m.apply(&y).unwrap()).unwrap();
        prop_assert!((moved - rho).abs() < 1e-9, "{moved} vs {rho}");
        let (bxy, bxw, bwy) = (hyperbolic(&x, &y).unwrap(), hyperbolic(&x, &w).unwrap(), hyperbolic(&w, &y).unwrap());
        prop_assert!(bxy <= bxw + bwy + 1e-9);
    }

    #[test]
    fn metric_matches_disk_formula(x in point(1, 0.999), y in point(1, 0.999)) {
        let (z, w) = (x[0], y[0]);
        let oracle = (z - w).norm() / (C64::new(1.0, 0.0) - z * w.conj()).norm();
        prop_assert!((pseudo_hyperbolic(&x, &y).unwrap() - oracle).abs() < 1e-12);
        prop_assert!((disk_rho(z, w) - oracle).abs() < 1e-12);
    }

    #[test]
    fn quadrature_gradient_matches_analytic(seed in 0u64..1000, x in point(3, 0.95)) {
        let f = random_polynomial(&mut seeded(seed), 3, 4, 6);
        let q = QuadratureConfig::default();
        let exact = f.analytic_gradient(&x).unwrap();
        let approx = quadrature_gradient(&f, &x, &q).unwrap();
        prop_assert!(approx.distance(&exact) < 1e-9 * (1.0 + exact.norm()));
    }

    #[test]
    fn invariant_gradient_two_ways(seed in 0u64..1000, x in point(3, 0.9)) {
        let f = random_polynomial(&mut seeded(seed), 3, 3, 5);
        let q = QuadratureConfig::default();
        let a = invariant_gradient(&f, &x, &q).unwrap();
        let b = invariant_gradient_by_composition(&f, &x, &q).unwrap();
        prop_assert!(a.distance(&b) < 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn chain_rule_for_pullbacks(seed in 0u64..500, z in point(4, 0.9), which in 0usize..7) {
        let phi = build_symbol(&symbols(4)[which], 4).unwrap();
        let f = random_polynomial(&mut seeded(seed), 4, 3, 4);
        let q = QuadratureConfig::default();
        let via_chain = chain_rule_radial(&phi, &f, &z, &q).unwrap();
        let direct = radial_derivative(&pullback(&phi, &f).unwrap(), &z, &q).unwrap();
        prop_assert!((via_chain - direct).norm() < 1e-8 * (1.0 + direct.norm()));
        let g = gradient(&f, &phi.eval(&z).unwrap(), &q).unwrap();
        prop_assert!(g.all_finite());
    }

    #[test]
    fn schwarz_pick_holds_for_every_family(z in point(6, 0.9999), which in 0usize..7) {
        let phi = build_symbol(&symbols(6)[which], 6).unwrap();
        let sp = schwarz_pick_residuals(&phi, &z).unwrap();
        for (name, slack, _) in sp.named() {
            prop_assert!(slack >= -1e-9, "{} {name} = {slack}", phi.family());
        }
        let s5 = sqrt5_quantity(&phi, &z).unwrap();
        prop_assert!(s5 <= 5f64.sqrt() + 1e-9);
    }

    #[test]
    fn xi_lower_bound(z in point(5, 0.999), which in 0usize..7) {
        let phi = build_symbol(&symbols(5)[which], 5).unwrap();
        if phi.eval(&z).unwrap().norm() > 1e-6 {
            let x = xi_direction(&phi, &z).unwrap();
            prop_assert!((x.xi.norm() - 1.0).abs() < 1e-9);
            prop_assert!(x.slack >= -1e-9, "{}", x.slack);
        }
    }
}

#[test]
fn analytic_radials_match_quadrature() {
    let mut rng = seeded(11);
    for spec in symbols(5) {
        let phi = build_symbol(&spec, 5).unwrap();
        for _ in 0..20 {
            let z = blochball_core::sampling::ball_point(&mut rng, 5, 0.95);
            let a = phi.radial(&z).unwrap();
            let b = phi.radial_by_quadrature(&z).unwrap();
            assert!(a.distance(&b) < 1e-9 * (1.0 + a.norm()), "{}", phi.family());
        }
    }
}
