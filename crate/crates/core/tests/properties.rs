//! Randomized invariants across modules.

use proptest::prelude::*;
use vcalc_core::calculus::check_continuity_at;
use vcalc_core::{
    check_uniform_continuity, derivative_at, diff_expr, eval_real, integrate, is_infinitesimal, near,
    parse_expr, taylor_expand, DomainDescriptor, Expr, Func, InfinitesimalFamily, LaurentPolynomial,
    Scalar, Settings, Verdict, VirtualNumber,
};

fn rat() -> impl Strategy<Value = Scalar> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| Scalar::ratio(p, q))
}

/// Exact series with exponents in -3..=4, optionally split by parity.
fn vnum() -> impl Strategy<Value = VirtualNumber> {
    (
        prop::collection::vec((-3i32..=4, rat()), 1..5),
        prop::collection::vec((-3i32..=4, rat()), 0..3),
        any::<bool>(),
    )
        .prop_map(|(a, b, split)| {
            let p = VirtualNumber::series(LaurentPolynomial::new(a, None));
            if split {
                let q = VirtualNumber::series(LaurentPolynomial::new(b, None));
                &p + &q.alternate_sign()
            } else {
                p
            }
        })
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-5i64..=5).prop_map(Expr::int),
        rat().prop_map(Expr::Const),
        Just(Expr::Var),
        Just(Expr::Pi),
        Just(Expr::Del),
        Just(Expr::Inf),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
            inner.clone().prop_map(|a| -a),
            (inner.clone(), -3i32..=3).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
            (inner.clone(), 0usize..6).prop_map(|(a, i)| Expr::call(Func::ALL[i], a)),
            inner.clone().prop_map(|a| Expr::Alt(Box::new(a))),
        ]
    })
}

/// Smooth real functions with a symbolic derivative.
fn smooth() -> impl Strategy<Value = Expr> {
    let atoms = ["x", "x^2", "x^3 - 2*x", "sin(x)", "cos(x)", "exp(x)", "sqrt(x^2 + 1)", "1/(x^2 + 2)"];
    (0..atoms.len(), 0..atoms.len(), rat(), rat()).prop_map(move |(i, j, a, b)| {
        let f = parse_expr(atoms[i]).unwrap();
        let g = parse_expr(atoms[j]).unwrap();
        Expr::Const(a) * f + Expr::Const(b) * g
    })
}

fn s() -> Settings {
    Settings::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_commutative_and_associative(a in vnum(), b in vnum(), c in vnum()) {
        prop_assert!((&a + &b).series_eq(&(&b + &a)));
        prop_assert!((&(&a + &b) + &c).series_eq(&(&a + &(&b + &c))));
        prop_assert!((&a - &a).series_eq(&VirtualNumber::zero()));
    }

    #[test]
    fn multiplication_distributes(a in vnum(), b in vnum(), c in vnum()) {
        prop_assert!((&a * &b).series_eq(&(&b * &a)));
        prop_assert!((&a * &(&b + &c)).series_eq(&(&(&a * &b) + &(&a * &c))));
    }

    #[test]
    fn inverse_times_value_is_one_up_to_truncation(a in vnum()) {
        if let Ok(inv) = a.inv(16) {
            let prod = &a * &inv;
            prop_assert!(near(&prod, &VirtualNumber::one(), &s()).holds(), "{} * {} = {}", a, inv, prod);
        }
    }

    #[test]
    fn series_samples_match_sequence_tier(a in vnum(), b in vnum()) {
        let series = &a * &b;
        let seq = &VirtualNumber::seq(a.to_seq()) * &VirtualNumber::seq(b.to_seq());
        for n in [64u64, 65, 1000, 1001] {
            let (x, y) = (series.sample(n).unwrap(), seq.sample(n).unwrap());
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "n = {}: {} vs {}", n, x, y);
        }
    }

    #[test]
    fn printing_round_trips(e in expr()) {
        let p1 = parse_expr(&e.to_string()).unwrap();
        let text = p1.to_string();
        let p2 = parse_expr(&text).unwrap();
        prop_assert_eq!(&p1, &p2);
        prop_assert_eq!(text, p2.to_string());
    }

    #[test]
    fn derivative_matches_symbolic_oracle(f in smooth(), k in -24i32..=24) {
        let x = k as f64 / 8.0;
        let r = derivative_at(&f, x, &InfinitesimalFamily::default(), &s()).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Holds);
        let oracle = eval_real(&diff_expr(&f).unwrap(), x).unwrap();
        prop_assert!((r.value.unwrap() - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
    }

    #[test]
    fn taylor_remainder_order_is_exact(k in 0usize..4, n in 1u32..6, x in -2i32..=2) {
        let f = parse_expr(["exp(x)", "sin(x)", "cos(x)", "x^4 - x"][k]).unwrap();
        let t = taylor_expand(&f, x as f64 / 2.0, n, &s()).unwrap();
        prop_assert!(t.remainder.holds());
        prop_assert!(t.remainder_valuation.unwrap_or(i32::MAX) >= n as i32 + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integral_is_linear_and_antisymmetric(f in smooth(), g in smooth(), a in rat(), lo in -4i32..0, hi in 1i32..4) {
        let (lo, hi) = (lo as f64 / 2.0, hi as f64 / 2.0);
        let set = s();
        let i = |h: &Expr, a: f64, b: f64| integrate(h, a, b, &set).unwrap().value.unwrap();
        let combo = Expr::Const(a.clone()) * f.clone() + g.clone();
        let lhs = i(&combo, lo, hi);
        let rhs = a.to_f64() * i(&f, lo, hi) + i(&g, lo, hi);
        prop_assert!((lhs - rhs).abs() <= 1e-6, "{} vs {}", lhs, rhs);
        prop_assert_eq!(i(&f, lo, hi), -i(&f, hi, lo));
        let mid = (lo + hi) / 2.0;
        prop_assert!((i(&f, lo, mid) + i(&f, mid, hi) - i(&f, lo, hi)).abs() <= 1e-6);
    }
}

#[test]
fn uniform_continuity_implies_pointwise_on_the_grid() {
    let set = s();
    for (src, dom) in [("cos(x)", "R"), ("x^2", "[0,10]"), ("sqrt(x^2 + 1)", "[-3,3]")] {
        let f = parse_expr(src).unwrap();
        let d: DomainDescriptor = dom.parse().unwrap();
        let r = check_uniform_continuity(&f, &d, &set).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{src} on {dom}");
        for comp in d.components() {
            let (l, h) = (comp.lo.value.max(-32.0), comp.hi.value.min(32.0));
            for j in 0..64 {
                let x = l + (j as f64 + 0.5) * (h - l) / 64.0;
                assert!(check_continuity_at(&f, x, &set).unwrap().holds(), "{src} at {x}");
            }
        }
    }
}

#[test]
fn infinitesimal_thresholds_on_the_sequence_tier() {
    let set = s();
    let seq = |f: fn(f64) -> f64| VirtualNumber::seq(vcalc_core::SequenceGen::total("t", move |n| f(n as f64)));
    assert_eq!(is_infinitesimal(&seq(|n| 1.0 / n), &set).verdict, Verdict::Holds);
    assert_eq!(is_infinitesimal(&seq(|n| 40.0 / n.sqrt()), &set).verdict, Verdict::Holds);
    assert_eq!(is_infinitesimal(&seq(|n| n.sin()), &set).verdict, Verdict::Fails);
    assert_eq!(is_infinitesimal(&seq(|n| 0.5 + 1.0 / n), &set).verdict, Verdict::Fails);
}
