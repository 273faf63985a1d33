//! Acceptance suite: one PASS/FAIL line per criterion, each with a pinned
//! tolerance and a wall-clock budget. Exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use vcalc_core::{
    check_differentiable_at, check_uniform_continuity, derivative_at, eval_virtual, ftc_check,
    geom_measure, integrate, leading_order, near, parse_expr, props, sine_quotient_check,
    standard_part, taylor_expand, DomainDescriptor, Error, Expr, GeomKind, InfinitesimalFamily,
    LaurentPolynomial, Scalar, Schedule, Settings, Verdict, VirtualNumber,
};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ev(src: &str) -> VirtualNumber {
    eval_virtual(&parse_expr(src).expect("parses"), &Settings::default()).expect("evaluates")
}

fn poly(terms: &[(i32, i64)]) -> VirtualNumber {
    VirtualNumber::series(LaurentPolynomial::new(
        terms.iter().map(|(k, c)| (*k, Scalar::int(*c))),
        None,
    ))
}

fn exact_identities() -> Check {
    let cases = [
        ("(inf + del)^2", poly(&[(-2, 1), (0, 2), (2, 1)])),
        ("del * inf", poly(&[(0, 1)])),
        ("inf - (1 + del)*inf", poly(&[(0, -1)])),
        ("((5 + del)^2 - 25)/del", poly(&[(0, 10), (1, 1)])),
    ];
    for (src, want) in cases {
        let got = ev(src);
        ensure(!got.is_approximate(), format!("{src} is approximate"))?;
        ensure(got.series_eq(&want), format!("{src} = {got}, want {want}"))?;
    }
    Ok("4 identities, exact".into())
}

fn proximity_goldens() -> Check {
    let s = Settings::default();
    let q = ev("(2*inf^3 + 4*inf^2 - 1)/(inf^3 - 5)");
    let st = standard_part(&q, &s).map_err(|e| e.to_string())?;
    ensure(st.is_exact() && st == Scalar::int(2), format!("standard part {st}"))?;
    let (a, b) = (ev("inf"), ev("sqrt(inf^2 + 1)"));
    ensure(near(&a, &b, &s).holds(), "inf not near sqrt(inf^2+1)")?;
    let d = leading_order(&(&a - &b)).map_err(|e| e.to_string())?;
    let v = d.valuation_even.min(d.valuation_odd).unwrap_or(i32::MAX);
    ensure(v >= 1, format!("difference valuation {v}"))?;
    Ok(format!("st = 2 exact; valuation {v} >= 1"))
}

fn sine_of_inf_pi() -> Check {
    let v = ev("sin(inf*pi)");
    let mut worst: f64 = 0.0;
    for &n in Schedule::new(14).indices().iter().filter(|&&n| n <= 10_000) {
        let x = v.sample(n).map_err(|e| e.to_string())?;
        ensure(x.abs() <= 1e-9 * n as f64, format!("|sin(n pi)| = {x} at n = {n}"))?;
        worst = worst.max(x.abs() / n as f64);
    }
    Ok(format!("max |a_n|/n = {worst:.1e} <= 1e-9"))
}

fn derivatives() -> Check {
    let s = Settings::default();
    let fam = InfinitesimalFamily::default();
    let sin = parse_expr("sin(x)").unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..32 {
        let x = -3.0 + 6.0 * i as f64 / 31.0;
        let r = derivative_at(&sin, x, &fam, &s).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Holds, format!("sin' at {x}: {}", r.verdict))?;
        let err = (r.value.unwrap_or(f64::NAN) - x.cos()).abs();
        ensure(err <= 1e-12, format!("sin' at {x} off by {err}"))?;
        worst = worst.max(err);
    }
    let abs = parse_expr("abs(x)").unwrap();
    ensure(
        matches!(derivative_at(&abs, 0.0, &fam, &s), Err(Error::NotDerivable { .. })),
        "abs derivable at 0",
    )?;
    let wiggle = Expr::patch(parse_expr("x^2*sin(1/x)").unwrap(), Scalar::zero(), Scalar::zero());
    let r = derivative_at(&wiggle, 0.0, &fam, &s).map_err(|e| e.to_string())?;
    let m = r.value.unwrap_or(f64::NAN);
    ensure(m.abs() <= 1e-6, format!("x^2 sin(1/x) derivative at 0 = {m}"))?;
    let d = check_differentiable_at(&wiggle, 0.0, &s).map_err(|e| e.to_string())?;
    ensure(d.verdict == Verdict::Fails, format!("x^2 sin(1/x) differentiable: {}", d.verdict))?;
    Ok(format!("max |sin' - cos| = {worst:.1e}; abs NotDerivable; wiggle m = {m:.1e}, Fails"))
}

fn sine_quotient() -> Check {
    let s = Settings::default();
    let del = VirtualNumber::del();
    for (name, eps) in [
        ("del", del.clone()),
        ("(+-)del", del.alternate_sign()),
        ("del^3", del.powi(3, s.trunc).unwrap()),
    ] {
        let d = sine_quotient_check(&eps, &s).map_err(|e| e.to_string())?;
        ensure(d.holds(), format!("{name}: {}", d.verdict))?;
    }
    Ok("del, (+-)del, del^3".into())
}

fn taylor() -> Check {
    let s = Settings::default();
    let exp = parse_expr("exp(x)").unwrap();
    for n in 1..=6 {
        let t = taylor_expand(&exp, 0.0, n, &s).map_err(|e| e.to_string())?;
        let v = t.remainder_valuation.unwrap_or(i32::MAX);
        ensure(v >= n as i32 + 1 && t.remainder.holds(), format!("n = {n}: valuation {v}"))?;
    }
    Ok("remainder valuation >= n+1 for n = 1..6".into())
}

fn integration() -> Check {
    let s = Settings::default();
    let r = integrate(&parse_expr("x^2").unwrap(), 0.0, 1.0, &s).map_err(|e| e.to_string())?;
    let v = r.value.unwrap_or(f64::NAN);
    ensure((v - 1.0 / 3.0).abs() <= 1e-6, format!("int x^2 = {v}"))?;
    ensure(r.verdict == Verdict::Holds, format!("verdict {}", r.verdict))?;
    ensure(r.per_scheme.len() == 4 && r.per_scheme.iter().all(|t| t.verdict.holds()), "a scheme disagrees")?;
    let back = integrate(&parse_expr("x").unwrap(), 1.0, 0.0, &s).map_err(|e| e.to_string())?;
    let b = back.value.unwrap_or(f64::NAN);
    ensure((b + 0.5).abs() <= 1e-12, format!("int_1^0 x = {b}"))?;
    let same = integrate(&parse_expr("exp(x)").unwrap(), 0.7, 0.7, &s).map_err(|e| e.to_string())?;
    ensure(same.value == Some(0.0) && same.verdict.holds(), "int_a^a != 0")?;
    Ok(format!("int x^2 = {v:.9}; int_1^0 x = {b}; int_a^a = 0"))
}

fn ftc() -> Check {
    let r = ftc_check(&parse_expr("exp(x)").unwrap(), 0.0, 0.5, &Settings::default()).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Holds, format!("verdict {}", r.verdict))?;
    ensure(r.ratio <= 1e-3, format!("ratio {}", r.ratio))?;
    Ok(format!("ratio {:.1e} at n = {}", r.ratio, r.depth))
}

fn geometry() -> Check {
    let s = Settings::default();
    let arc = geom_measure(GeomKind::ArcLength, &parse_expr("x").unwrap(), 0.0, 1.0, &s)
        .map_err(|e| e.to_string())?
        .value
        .unwrap_or(f64::NAN);
    ensure((arc - 2f64.sqrt()).abs() <= 1e-9, format!("arc length {arc}"))?;
    let h = 1e-6;
    let sphere = geom_measure(GeomKind::SurfaceRevolution, &parse_expr("sqrt(1 - x^2)").unwrap(), -1.0 + h, 1.0 - h, &s)
        .map_err(|e| e.to_string())?
        .value
        .unwrap_or(f64::NAN);
    ensure((sphere - 4.0 * PI * (1.0 - h)).abs() <= 1e-4, format!("sphere {sphere}"))?;
    let suite = props::run_suite("geometry", &s).map_err(|e| e.to_string())?;
    for c in suite.checks.iter().filter(|c| c.expect_failure) {
        ensure(c.ok, format!("{} did not fail", c.name))?;
    }
    Ok(format!("arc {arc:.12}; sphere {sphere:.6}; both wrong formulas Fail"))
}

fn proposition_suites() -> Check {
    let s = Settings::default();
    let mut total = 0;
    for suite in ["finitude", "proximity", "confront", "continuity", "derivation-rules"] {
        let r = props::run_suite(suite, &s).map_err(|e| e.to_string())?;
        for c in &r.checks {
            ensure(c.ok, format!("{suite}/{}: {:?}", c.name, c.counterexample))?;
            ensure(c.expect_failure || c.instances >= 200, format!("{suite}/{}: {} instances", c.name, c.instances))?;
            total += 1;
        }
    }
    let counter = props::run_suite("proximity", &s).map_err(|e| e.to_string())?;
    ensure(counter.checks.iter().any(|c| c.expect_failure && c.ok), "product counterexample not detected")?;
    Ok(format!("{total} propositions x 200 instances; counterexample detected"))
}

fn uniform_continuity() -> Check {
    let s = Settings::default();
    let real_line = DomainDescriptor::real_line();
    let cos = check_uniform_continuity(&parse_expr("cos(x)").unwrap(), &real_line, &s).map_err(|e| e.to_string())?;
    ensure(cos.verdict == Verdict::Holds, format!("cos: {}", cos.label()))?;
    let sq = parse_expr("x^2").unwrap();
    let r = check_uniform_continuity(&sq, &real_line, &s).map_err(|e| e.to_string())?;
    let gap = r.witness.as_ref().map_or(0.0, |w| w.gap);
    ensure(r.verdict == Verdict::Fails && gap >= 2.0 - 1e-3, format!("x^2 on R: {} gap {gap}", r.label()))?;
    let ten: DomainDescriptor = "[0,10]".parse().map_err(|e: Error| e.to_string())?;
    let b = check_uniform_continuity(&sq, &ten, &s).map_err(|e| e.to_string())?;
    ensure(b.verdict == Verdict::Holds, format!("x^2 on [0,10]: {}", b.label()))?;
    Ok(format!("cos {}; x^2 on R Fails (gap {gap:.4}); x^2 on [0,10] {}", cos.label(), b.label()))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Check); 11] = [
        ("exact identities", 1, exact_identities),
        ("proximity goldens", 1, proximity_goldens),
        ("sin(inf pi)", 1, sine_of_inf_pi),
        ("derivatives", 5, derivatives),
        ("sine quotient", 1, sine_quotient),
        ("taylor remainder", 1, taylor),
        ("integration", 10, integration),
        ("ftc negligibility", 30, ftc),
        ("geometry", 10, geometry),
        ("proposition suites", 60, proposition_suites),
        ("uniform continuity", 5, uniform_continuity),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "{tag} {:>2} {name:<20} {:>8.3}s / {budget}s  {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
