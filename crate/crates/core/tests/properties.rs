//! Property tests for the structural invariants: parse/print round trip,
//! grid refinement monotonicity, classification scale invariance, norm
//! homogeneity, budget soundness, truncation minimality, componentwise
//! verdicts.

use proptest::prelude::*;
use wapprox::*;

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-10.0..10.0f64).prop_map(Expr::Const),
        Just(Expr::Var),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (
                inner.clone(),
                prop::sample::select(vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0])
            )
                .prop_map(|(a, e)| Expr::Pow(Box::new(a), e)),
            inner.clone().prop_map(|a| Expr::Abs(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Sign(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Sin(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Cos(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Exp(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Log(Box::new(a))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Min(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Max(Box::new(a), Box::new(b))),
        ]
    })
}

fn arb_func() -> impl Strategy<Value = FuncExpr> {
    (
        arb_expr(),
        prop::collection::vec(((-1.0..1.0f64), (-5.0..5.0f64)), 0..3),
    )
        .prop_map(|(root, ov)| FuncExpr::with_overrides(root, ov))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_print_round_trip(f in arb_func()) {
        let printed = f.to_string();
        let reparsed = parse_expr(&printed)
            .unwrap_or_else(|e| panic!("reparse of `{printed}` failed: {e}"));
        for t in [-1.0, -0.6, -0.1234, 0.0, 0.37, 0.5, 0.99] {
            let a = f.eval(t).ok();
            let b = reparsed.eval(t).ok();
            prop_assert_eq!(a, b, "mismatch at {} for `{}`", t, printed);
        }
        // exact at the override points themselves
        for &(p, v) in f.overrides() {
            prop_assert_eq!(reparsed.eval(p).ok(), Some(v), "override at {} lost", p);
        }
    }

    #[test]
    fn eval_is_pure(f in arb_func(), t in -1.0..1.0f64) {
        prop_assert_eq!(f.eval(t).ok(), f.eval(t).ok());
    }

    #[test]
    fn grid_refinement_only_adds_points(
        n in 2usize..64,
        levels in 0usize..10,
        frac in 0.05..0.95f64,
    ) {
        let i = Interval::new(-1.0, 1.0).unwrap();
        let a = -1.0 + 2.0 * frac;
        let coarse = make_grid(i, n, GridScheme::RefinedNear { delta0: 0.25, levels }, &[a]).unwrap();
        let fine = make_grid(i, n, GridScheme::RefinedNear { delta0: 0.25, levels: levels + 1 }, &[a]).unwrap();
        for p in coarse.points() {
            prop_assert!(fine.points().contains(p), "lost point {}", p);
        }
        // sampled values at shared points are unchanged (same evaluator)
        let f = parse_expr("x^2 - x").unwrap();
        let sc = sample(&f, &coarse).unwrap();
        let sf = sample(&f, &fine).unwrap();
        for (p, v) in coarse.points().iter().zip(&sc.values) {
            let idx = fine.points().iter().position(|q| q == p).unwrap();
            prop_assert_eq!(*v, sf.values[idx]);
        }
    }

    #[test]
    fn budget_soundness_finite(eps in 0.001..10.0f64, n in 1usize..32) {
        let b = allocate_budgets(eps, &FunctionDim::Finite, n);
        let q: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((q - eps).abs() <= 1e-12 * eps);
    }

    #[test]
    fn truncation_minimal_and_monotone(
        c in 0.1..10.0f64,
        r in 0.05..0.95f64,
        eps in 0.001..1.0f64,
    ) {
        let cert = TailCertificate::new(c, r).unwrap();
        let n = choose_truncation(&cert, 0, eps);
        prop_assert!(cert.tail_l2_bound(n) <= eps);
        if n > 0 {
            prop_assert!(cert.tail_l2_bound(n - 1) > eps);
        }
        let n_looser = choose_truncation(&cert, 0, eps * 2.0);
        prop_assert!(n_looser <= n);
    }
}

proptest! {
    // classification runs full cascades; keep the case count modest
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classification_is_scale_invariant(c in 0.2..5.0f64) {
        let i = Interval::new(-1.0, 1.0).unwrap();
        let params = EssLimitParams::default();
        let th = Thresholds::default();
        for (w_text, point) in [
            ("abs(x)^0.5", 0.0),
            ("abs(sin(1/x)) @ {0: 0}", 0.0),
            ("1/abs(x) @ {0: 1}", 0.0),
            ("1 + 0*x", 0.0),
            ("abs(x)", 0.5),
        ] {
            let base_expr = parse_expr(w_text).unwrap();
            let scaled_expr = FuncExpr::with_overrides(
                Expr::Mul(Box::new(Expr::Const(c)), Box::new(base_expr.root.clone())),
                base_expr
                    .overrides()
                    .iter()
                    .map(|&(p, v)| (p, c * v))
                    .collect(),
            );
            let w = ScalarWeight::new(base_expr, i, vec![point]).unwrap();
            let scaled = ScalarWeight::new(scaled_expr, i, vec![point]).unwrap();
            let base = classify_point(&w, point, &params, &th).unwrap();
            let scl = classify_point(&scaled, point, &params, &th).unwrap();
            prop_assert_eq!(
                base.left.map(|s| s.class),
                scl.left.map(|s| s.class),
                "left class changed under c={} for {}", c, w_text
            );
            prop_assert_eq!(
                base.right.map(|s| s.class),
                scl.right.map(|s| s.class),
                "right class changed under c={} for {}", c, w_text
            );
        }
    }

    #[test]
    fn vector_verdict_is_componentwise_conjunction(pick in prop::collection::vec(0usize..4, 1..4)) {
        let i = Interval::new(-1.0, 1.0).unwrap();
        let params = EssLimitParams::default();
        let th = Thresholds::default();
        let fixtures = [
            ("abs(x)", "1 + 0*x", vec![]),
            ("sign(x) @ {0: 0}", "1 + 0*x", vec![]),
            ("sign(x) @ {0: 0}", "abs(x)", vec![0.0]),
            ("x^2 @ {0: 0}", "abs(x)^0.5", vec![0.0]),
        ];
        let mut fs = Vec::new();
        let mut ws = Vec::new();
        let mut scalar_members = Vec::new();
        for &k in &pick {
            let (f_text, w_text, ref declared) = fixtures[k];
            let f = parse_expr(f_text).unwrap();
            let w = ScalarWeight::new(parse_expr(w_text).unwrap(), i, declared.clone()).unwrap();
            let report = classify_weight(&w, &params, &th).unwrap();
            let v = check_scalar_membership(&f, &w, &report, 1e-3, &params, &th).unwrap();
            scalar_members.push(v.member);
            fs.push(f);
            ws.push(w);
        }
        let vw = VectorWeight::finite(ws);
        let vv = check_vector_membership(&fs, &vw, 1e-3, &params, &th).unwrap();
        prop_assert_eq!(vv.member, scalar_members.iter().all(|&m| m));
        for (cv, &m) in vv.component_verdicts.iter().zip(&scalar_members) {
            prop_assert_eq!(cv.member, m);
        }
    }
}

#[test]
fn chebyshev_reproduces_random_polynomials() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let i = Interval::new(-1.0, 1.0).unwrap();
    for _ in 0..20 {
        let deg = rng.gen_range(0..=8usize);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let text = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| format!("{c}*x^{k}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let f = parse_expr(&text).unwrap();
        let p = chebyshev_interp(&f, i, deg.max(1)).unwrap();
        for k in 0..=1000 {
            let x = -1.0 + 2.0 * k as f64 / 1000.0;
            let want = f.eval(x).unwrap();
            assert!(
                (p.eval(x) - want).abs() < 1e-10,
                "deg {deg} at {x}: {} vs {want}",
                p.eval(x)
            );
        }
    }
}

#[test]
fn weighted_error_is_homogeneous() {
    let i = Interval::new(-1.0, 1.0).unwrap();
    let f = parse_expr("sin(3*x) + x^2").unwrap();
    let w = ScalarWeight::new(parse_expr("abs(x)").unwrap(), i, vec![0.0]).unwrap();
    let p = chebyshev_interp(&f, i, 4).unwrap();
    let g = make_grid(i, 1001, GridScheme::Uniform, &[]).unwrap();
    let base = weighted_sup_error(&f, &p, &w, &g).unwrap();
    for c in [-3.0f64, 0.5] {
        let cf = parse_expr(&format!("{c}*(sin(3*x) + x^2)")).unwrap();
        let cp = Polynomial::new(
            i,
            p.basis(),
            p.coeffs().iter().map(|&x| c * x).collect(),
        )
        .unwrap();
        let scaled = weighted_sup_error(&cf, &cp, &w, &g).unwrap();
        let want = c.abs() * base;
        assert!(
            (scaled - want).abs() <= 1e-12 * want.max(1.0),
            "c={c}: {scaled} vs {want}"
        );
    }
}

#[test]
fn weighted_vanishing_scales_with_the_weight() {
    // passing at weight w implies passing at c*w for c in (0, 1]; the
    // measured value scales exactly for a power-of-two c
    let i = Interval::new(-1.0, 1.0).unwrap();
    let params = EssLimitParams::default();
    let th = Thresholds::default();
    let f = parse_expr("sign(x) @ {0: 0}").unwrap();
    let w = ScalarWeight::new(parse_expr("abs(x)").unwrap(), i, vec![0.0]).unwrap();
    let wh = ScalarWeight::new(parse_expr("0.5*abs(x)").unwrap(), i, vec![0.0]).unwrap();
    let rep = classify_weight(&w, &params, &th).unwrap();
    let rep_h = classify_weight(&wh, &params, &th).unwrap();
    let v = check_scalar_membership(&f, &w, &rep, 1e-3, &params, &th).unwrap();
    let vh = check_scalar_membership(&f, &wh, &rep_h, 1e-3, &params, &th).unwrap();
    assert!(v.member && vh.member);
    let m = |v: &MembershipVerdict| -> Vec<(f64, f64)> {
        v.conditions
            .iter()
            .filter(|c| c.kind == ConditionKind::WeightedVanishing)
            .map(|c| (c.point, c.measured))
            .collect()
    };
    for ((p1, m1), (p2, m2)) in m(&v).iter().zip(m(&vh).iter()) {
        assert_eq!(p1, p2);
        assert_eq!(*m2, 0.5 * *m1, "exact halving for c = 0.5");
    }
}

#[test]
fn verdicts_are_deterministic() {
    let i = Interval::new(-1.0, 1.0).unwrap();
    let params = EssLimitParams::default();
    let th = Thresholds::default();
    let f = parse_expr("abs(x)^-0.25 @ {0: 0}").unwrap();
    let w = ScalarWeight::new(parse_expr("abs(x)^0.5").unwrap(), i, vec![0.0]).unwrap();
    let rep = classify_weight(&w, &params, &th).unwrap();
    let a = check_scalar_membership(&f, &w, &rep, 1e-3, &params, &th).unwrap();
    let b = check_scalar_membership(&f, &w, &rep, 1e-3, &params, &th).unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_partition_is_exclusive() {
    let i = Interval::new(-1.0, 1.0).unwrap();
    let params = EssLimitParams::default();
    let th = Thresholds::default();
    for (w_text, declared) in [
        ("abs(x)*abs(x - 0.5)", vec![0.0, 0.5]),
        ("abs(sin(1/x)) @ {0: 0}", vec![0.0]),
        ("1 + 0*x", vec![]),
    ] {
        let w = ScalarWeight::new(parse_expr(w_text).unwrap(), i, declared).unwrap();
        let r = classify_weight(&w, &params, &th).unwrap();
        for side in [Side::Right, Side::Left] {
            let (reg, sing): (Vec<f64>, Vec<f64>) = match side {
                Side::Right => (r.r_plus(), r.s_plus_all()),
                Side::Left => (r.r_minus(), r.s_minus_all()),
            };
            for p in &sing {
                assert!(!reg.contains(p), "{w_text}: {p} both regular and singular");
            }
            let t: usize = (1..=3).map(|k| match side {
                Side::Right => r.s_plus(k).len(),
                Side::Left => r.s_minus(k).len(),
            }).sum();
            assert_eq!(t, sing.len(), "{w_text}: type partition covers S");
        }
    }
}

#[test]
fn stagnation_scales_with_jump_and_weight_floor() {
    // jump height 2 at 0.3 against a flat weight 0.5: every sweep error
    // stays above 0.9 * m * J / 2 = 0.9 * 0.5 * 1
    let i = Interval::new(-1.0, 1.0).unwrap();
    let f = parse_expr("sign(x - 0.3) @ {0.3: 0}").unwrap();
    let w = ScalarWeight::new(parse_expr("0.5 + 0*x").unwrap(), i, vec![]).unwrap();
    let opts = ApproxOpts {
        max_degree: 64,
        ..ApproxOpts::default()
    };
    match approx_scalar_weighted(&f, &w, 0.1, &opts) {
        Err(ApproxError::MaxDegreeExceeded { sweep_trace, .. }) => {
            for (n, e) in &sweep_trace {
                assert!(*e >= 0.45, "degree {n}: error {e} below 0.9*m*J/2");
            }
        }
        other => panic!("expected stagnation, got {other:?}"),
    }
}
