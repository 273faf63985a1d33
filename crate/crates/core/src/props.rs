//! Named property suites over randomized series-tier instances: finitude
//! closure, proximity, the confront theorem, continuity of combinations,
//! derivation rules, the fundamental theorem and the geometry formulas.
//!
//! A check marked `expect_failure` passes only when every instance fails;
//! these are known counterexamples the engine must detect.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{check_continuity_at, derivative_at, InfinitesimalFamily};
use crate::classify::{
    cmp_reals, confront, is_finite, is_infinite, is_infinitesimal, near, RealsSide,
};
use crate::error::{Error, Result};
use crate::integrate::{element_check, ftc_check, geom_measure, Element, GeomKind};
use crate::laurent::LaurentPolynomial;
use crate::realfun::{eval_real, parse_expr, Expr};
use crate::scalar::Scalar;
use crate::settings::Settings;
use crate::verdict::{Decision, Verdict};
use crate::vnum::VirtualNumber;

pub const SUITES: [&str; 7] = [
    "finitude",
    "proximity",
    "confront",
    "continuity",
    "derivation-rules",
    "ftc",
    "geometry",
];

/// Randomized instances per proposition.
pub const INSTANCES: usize = 200;
/// Instances for the suites that integrate numerically.
pub const INTEGRAL_INSTANCES: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropCheck {
    pub name: String,
    pub instances: usize,
    pub passed: usize,
    pub expect_failure: bool,
    pub ok: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub ok: bool,
    pub checks: Vec<PropCheck>,
}

enum Outcome {
    Pass,
    Fail(String),
}

fn verdict_is(d: &Decision, want: Verdict, what: impl FnOnce() -> String) -> Outcome {
    if d.verdict == want {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("{} (got {})", what(), d.verdict))
    }
}

fn holds(d: &Decision, what: impl FnOnce() -> String) -> Outcome {
    verdict_is(d, Verdict::Holds, what)
}

fn run_check(
    name: &str,
    n: usize,
    rng: &mut ChaCha8Rng,
    expect_failure: bool,
    mut instance: impl FnMut(&mut ChaCha8Rng) -> Result<Outcome>,
) -> Result<PropCheck> {
    let mut passed = 0;
    let mut counterexample = None;
    for _ in 0..n {
        match instance(rng)? {
            Outcome::Pass => passed += 1,
            Outcome::Fail(c) => {
                counterexample.get_or_insert(c);
            }
        }
    }
    Ok(PropCheck {
        name: name.to_string(),
        instances: n,
        passed,
        expect_failure,
        ok: passed == n,
        counterexample,
    })
}

// ---- generators ------------------------------------------------------------

fn rational(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let r = rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Random exact series with terms in `lo..=hi` and a nonzero leading term.
fn series(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> LaurentPolynomial {
    let mut terms = vec![(lo, nonzero_rational(rng))];
    for k in lo + 1..=hi {
        if rng.gen_bool(0.6) {
            terms.push((k, rational(rng)));
        }
    }
    LaurentPolynomial::new(terms, None)
}

fn maybe_parity(rng: &mut ChaCha8Rng, v: VirtualNumber) -> VirtualNumber {
    if rng.gen_bool(0.3) {
        v.alternate_sign()
    } else {
        v
    }
}

fn real(rng: &mut ChaCha8Rng) -> VirtualNumber {
    VirtualNumber::real(rational(rng))
}

fn nonzero_real(rng: &mut ChaCha8Rng) -> VirtualNumber {
    VirtualNumber::real(nonzero_rational(rng))
}

fn infinitesimal(rng: &mut ChaCha8Rng) -> VirtualNumber {
    let lo = rng.gen_range(1..=3);
    let v = VirtualNumber::series(series(rng, lo, lo + 2));
    maybe_parity(rng, v)
}

fn finite(rng: &mut ChaCha8Rng) -> VirtualNumber {
    &real(rng) + &infinitesimal(rng)
}

fn above_reals(rng: &mut ChaCha8Rng) -> VirtualNumber {
    let k = rng.gen_range(1..=3);
    let lead = VirtualNumber::monomial(Scalar::int(rng.gen_range(1..=5)), -k);
    let rest = VirtualNumber::series(series(rng, 1 - k, 2));
    &lead + &rest
}

fn infinite(rng: &mut ChaCha8Rng) -> VirtualNumber {
    match rng.gen_range(0..3) {
        0 => above_reals(rng),
        1 => -above_reals(rng),
        _ => &above_reals(rng).alternate_sign() + &finite(rng),
    }
}

// ---- suites ----------------------------------------------------------------

fn finitude(rng: &mut ChaCha8Rng, n: usize, s: &Settings) -> Result<Vec<PropCheck>> {
    let above = |v: &VirtualNumber| cmp_reals(v, s).0 == RealsSide::AboveR;
    let below = |v: &VirtualNumber| cmp_reals(v, s).0 == RealsSide::BelowR;
    Ok(vec![
        run_check("real nonzero is not infinitesimal; reals are finite", n, rng, false, |r| {
            let x = nonzero_real(r);
            let d = is_infinitesimal(&x, s).not().and(is_finite(&x, s));
            Ok(holds(&d, || format!("x = {x}")))
        })?,
        run_check("infinitesimal + infinitesimal is infinitesimal", n, rng, false, |r| {
            let (a, b) = (infinitesimal(r), infinitesimal(r));
            Ok(holds(&is_infinitesimal(&(&a + &b), s), || format!("{a} ; {b}")))
        })?,
        run_check("infinitesimal * finite is infinitesimal", n, rng, false, |r| {
            let (a, l) = (infinitesimal(r), finite(r));
            Ok(holds(&is_infinitesimal(&(&a * &l), s), || format!("{a} ; {l}")))
        })?,
        run_check("inverse of an infinitesimal is infinite", n, rng, false, |r| {
            let a = infinitesimal(r);
            let inv = a.inv(s.trunc)?;
            Ok(holds(&is_infinite(&inv, s), || format!("{a}")))
        })?,
        run_check("finite + finite and finite * finite are finite", n, rng, false, |r| {
            let (a, b) = (finite(r), finite(r));
            let d = is_finite(&(&a + &b), s).and(is_finite(&(&a * &b), s));
            Ok(holds(&d, || format!("{a} ; {b}")))
        })?,
        run_check("infinite + finite is infinite", n, rng, false, |r| {
            let (w, l) = (infinite(r), finite(r));
            Ok(holds(&is_infinite(&(&w + &l), s), || format!("{w} ; {l}")))
        })?,
        run_check("infinite * nonzero real is infinite", n, rng, false, |r| {
            let (w, x) = (infinite(r), nonzero_real(r));
            Ok(holds(&is_infinite(&(&w * &x), s), || format!("{w} ; {x}")))
        })?,
        run_check("beyond the reals: invertible with infinitesimal inverse", n, rng, false, |r| {
            let w = if r.gen_bool(0.5) { above_reals(r) } else { -above_reals(r) };
            let inv = w.inv(s.trunc)?;
            Ok(holds(&is_infinitesimal(&inv, s), || format!("{w}")))
        })?,
        run_check(">R + >R and >R * >R are >R", n, rng, false, |r| {
            let (w, p) = (above_reals(r), above_reals(r));
            let ok = above(&(&w + &p)) && above(&(&w * &p));
            Ok(if ok { Outcome::Pass } else { Outcome::Fail(format!("{w} ; {p}")) })
        })?,
        run_check("<R + <R is <R and <R * <R is >R", n, rng, false, |r| {
            let (w, p) = (-above_reals(r), -above_reals(r));
            let ok = below(&(&w + &p)) && above(&(&w * &p));
            Ok(if ok { Outcome::Pass } else { Outcome::Fail(format!("{w} ; {p}")) })
        })?,
        run_check(">R * <R is <R", n, rng, false, |r| {
            let (w, p) = (above_reals(r), -above_reals(r));
            let ok = below(&(&w * &p));
            Ok(if ok { Outcome::Pass } else { Outcome::Fail(format!("{w} ; {p}")) })
        })?,
    ])
}

fn proximity(rng: &mut ChaCha8Rng, n: usize, s: &Settings) -> Result<Vec<PropCheck>> {
    let any = |r: &mut ChaCha8Rng| match r.gen_range(0..3) {
        0 => infinitesimal(r),
        1 => finite(r),
        _ => infinite(r),
    };
    let same_class = |a: &VirtualNumber, b: &VirtualNumber| {
        is_infinitesimal(a, s).verdict == is_infinitesimal(b, s).verdict
            && is_finite(a, s).verdict == is_finite(b, s).verdict
            && is_infinite(a, s).verdict == is_infinite(b, s).verdict
    };
    Ok(vec![
        run_check("near is reflexive and symmetric", n, rng, false, |r| {
            let a = any(r);
            let b = &a + &infinitesimal(r);
            let d = near(&a, &a, s).and(near(&a, &b, s)).and(near(&b, &a, s));
            Ok(holds(&d, || format!("{a} ; {b}")))
        })?,
        run_check("near is transitive", n, rng, false, |r| {
            let a = any(r);
            let b = &a + &infinitesimal(r);
            let c = &b + &infinitesimal(r);
            Ok(holds(&near(&a, &c, s), || format!("{a} ; {b} ; {c}")))
        })?,
        run_check("near values share their finitude class", n, rng, false, |r| {
            let a = any(r);
            let b = &a + &infinitesimal(r);
            Ok(if same_class(&a, &b) { Outcome::Pass } else { Outcome::Fail(format!("{a} ; {b}")) })
        })?,
        run_check("distinct reals are not near", n, rng, false, |r| {
            let x = real(r);
            let y = &x + &nonzero_real(r);
            Ok(verdict_is(&near(&x, &y, s), Verdict::Fails, || format!("{x} ; {y}")))
        })?,
        run_check("addition preserves proximity", n, rng, false, |r| {
            let (a1, b1) = (any(r), any(r));
            let (a2, b2) = (&a1 + &infinitesimal(r), &b1 + &infinitesimal(r));
            Ok(holds(&near(&(&a1 + &b1), &(&a2 + &b2), s), || format!("{a1} ; {b1}")))
        })?,
        run_check("multiplication of finite values preserves proximity", n, rng, false, |r| {
            let (l1, m1) = (finite(r), finite(r));
            let (l2, m2) = (&l1 + &infinitesimal(r), &m1 + &infinitesimal(r));
            Ok(holds(&near(&(&l1 * &m1), &(&l2 * &m2), s), || format!("{l1} ; {m1}")))
        })?,
        run_check("infinite factor breaks product proximity", 1, rng, true, |_| {
            let one = VirtualNumber::one();
            let l2 = &one + &VirtualNumber::del();
            let mu = VirtualNumber::infty();
            // 1*inf - (1+del)*inf = -1
            let d = near(&(&one * &mu), &(&l2 * &mu), s);
            Ok(verdict_is(&d, Verdict::Fails, || "lambda2 = 1 + del, mu = inf".into()))
        })?,
        run_check("reciprocal preserves proximity to a nonzero real", n, rng, false, |r| {
            let x = nonzero_real(r);
            let a = &x + &infinitesimal(r);
            let d = near(&a.inv(s.trunc)?, &x.inv(s.trunc)?, s);
            Ok(holds(&d, || format!("x = {x}, alpha = {a}")))
        })?,
        run_check("quotient preserves proximity", n, rng, false, |r| {
            let (x, y) = (nonzero_real(r), real(r));
            let (a, b) = (&x + &infinitesimal(r), &y + &infinitesimal(r));
            let d = near(&b.div(&a, s.trunc)?, &y.div(&x, s.trunc)?, s);
            Ok(holds(&d, || format!("{b} / {a}")))
        })?,
    ])
}

fn confront_suite(rng: &mut ChaCha8Rng, n: usize, s: &Settings) -> Result<Vec<PropCheck>> {
    Ok(vec![run_check("between two near values is near both", n, rng, false, |r| {
        let x = if r.gen_bool(0.2) { infinite(r) } else { finite(r) };
        let a = &x + &infinitesimal(r);
        let c = &x + &infinitesimal(r);
        let t = Scalar::ratio(r.gen_range(0..=8), 8);
        let b = &a + &(&c - &a).scale(&t);
        match confront(&a, &b, &c, s) {
            Ok(d) => Ok(holds(&d.and(near(&b, &c, s)), || format!("{a} ; {b} ; {c}"))),
            Err(Error::PremiseNotMet(v)) => Ok(Outcome::Fail(format!("premise {v}: {a} ; {b} ; {c}"))),
            Err(e) => Err(e),
        }
    })?])
}

const ATOMS: [&str; 9] = [
    "x",
    "x^2",
    "x^3 - x",
    "sin(x)",
    "cos(x)",
    "exp(x)",
    "sqrt(x^2 + 1)",
    "1/(x^2 + 1)",
    "ln(x^2 + 1)",
];

fn smooth(rng: &mut ChaCha8Rng) -> Expr {
    let atom = parse_expr(ATOMS[rng.gen_range(0..ATOMS.len())]).expect("corpus parses");
    let c = Expr::Const(nonzero_rational(rng));
    let d = Expr::Const(rational(rng));
    c * atom + d
}

fn point(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-32..=32) as f64 / 16.0
}

/// `g` with `|g(x)| ≥ 1/2`.
fn away_from_zero(rng: &mut ChaCha8Rng, x: f64) -> Expr {
    loop {
        let g = smooth(rng);
        if eval_real(&g, x).is_ok_and(|v| v.abs() >= 0.5) {
            return g;
        }
    }
}

fn continuity(rng: &mut ChaCha8Rng, n: usize, s: &Settings) -> Result<Vec<PropCheck>> {
    let combo = |name: &str, rng: &mut ChaCha8Rng, build: fn(Expr, Expr) -> Expr, nonzero_g: bool| {
        run_check(name, n, rng, false, |r| {
            let x = point(r);
            let f = smooth(r);
            let g = if nonzero_g { away_from_zero(r, x) } else { smooth(r) };
            let premise = check_continuity_at(&f, x, s)?.and(check_continuity_at(&g, x, s)?);
            if !premise.holds() {
                return Ok(Outcome::Fail(format!("premise {} for {f} ; {g} at {x}", premise.verdict)));
            }
            let h = build(f.clone(), g.clone());
            Ok(holds(&check_continuity_at(&h, x, s)?, || format!("{h} at {x}")))
        })
    };
    Ok(vec![
        combo("sum of continuous functions is continuous", rng, |f, g| f + g, false)?,
        combo("product of continuous functions is continuous", rng, |f, g| f * g, false)?,
        combo("quotient by a nonvanishing continuous function is continuous", rng, |f, g| f / g, true)?,
        combo("composite of continuous functions is continuous", rng, |f, g| g.compose(&f), false)?,
    ])
}

fn derivation_rules(rng: &mut ChaCha8Rng, n: usize, s: &Settings) -> Result<Vec<PropCheck>> {
    let fam = InfinitesimalFamily::default();
    let deriv = |f: &Expr, x: f64| -> Result<f64> {
        derivative_at(f, x, &fam, s)?
            .value
            .ok_or_else(|| Error::InvalidArgument(format!("no derivative for {f}")))
    };
    let close = |got: f64, want: f64| (got - want).abs() <= 1e-9 * want.abs().max(1.0);
    let report = |ok: bool, what: String| if ok { Outcome::Pass } else { Outcome::Fail(what) };
    Ok(vec![
        run_check("sum rule", n, rng, false, |r| {
            let (x, f, g) = (point(r), smooth(r), smooth(r));
            let (got, want) = (deriv(&(f.clone() + g.clone()), x)?, deriv(&f, x)? + deriv(&g, x)?);
            Ok(report(close(got, want), format!("({f}) + ({g}) at {x}: {got} vs {want}")))
        })?,
        run_check("product rule", n, rng, false, |r| {
            let (x, f, g) = (point(r), smooth(r), smooth(r));
            let got = deriv(&(f.clone() * g.clone()), x)?;
            let want = deriv(&f, x)? * eval_real(&g, x)? + eval_real(&f, x)? * deriv(&g, x)?;
            Ok(report(close(got, want), format!("({f}) * ({g}) at {x}: {got} vs {want}")))
        })?,
        run_check("reciprocal rule", n, rng, false, |r| {
            let x = point(r);
            let g = away_from_zero(r, x);
            let got = deriv(&(Expr::int(1) / g.clone()), x)?;
            let want = -deriv(&g, x)? / eval_real(&g, x)?.powi(2);
            Ok(report(close(got, want), format!("1/({g}) at {x}: {got} vs {want}")))
        })?,
    ])
}

fn ftc_suite(rng: &mut ChaCha8Rng, n: usize, s: &Settings) -> Result<Vec<PropCheck>> {
    Ok(vec![
        run_check("increment of the integral is f(x)dx up to a negligible error", n, rng, false, |r| {
            let f = smooth(r);
            let (a, x) = (point(r), point(r));
            let rep = ftc_check(&f, a, x, s)?;
            Ok(if rep.verdict.holds() && rep.ratio <= 1e-3 {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("{f} from {a} at {x}: {} ratio {}", rep.verdict, rep.ratio))
            })
        })?,
        run_check("constant integrand has no error", 1, rng, false, |_| {
            let rep = ftc_check(&Expr::int(3), 0.0, 1.0, s)?;
            Ok(if rep.verdict.holds() && rep.ratio < 1e-12 {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("ratio {}", rep.ratio))
            })
        })?,
    ])
}

fn geometry(rng: &mut ChaCha8Rng, n: usize, s: &Settings) -> Result<Vec<PropCheck>> {
    let line = |r: &mut ChaCha8Rng| (rng_ratio(r), rng_ratio(r));
    Ok(vec![
        run_check("arc length of a line segment", n, rng, false, |r| {
            let (m, c) = line(r);
            let f = parse_expr(&format!("{m}*x + {c}"))?;
            let v = geom_measure(GeomKind::ArcLength, &f, 0.0, 2.0, s)?.value.unwrap_or(f64::NAN);
            let want = 2.0 * (1.0 + m * m).sqrt();
            Ok(if (v - want).abs() < 1e-9 { Outcome::Pass } else { Outcome::Fail(format!("{f}: {v}")) })
        })?,
        run_check("area under a constant and volume of a cylinder", n, rng, false, |r| {
            let k = r.gen_range(1..=9) as f64;
            let f = Expr::int(k as i64);
            let area = geom_measure(GeomKind::Area, &f, -1.0, 3.0, s)?.value.unwrap_or(f64::NAN);
            let vol = geom_measure(GeomKind::VolumeRevolution, &f, -1.0, 3.0, s)?.value.unwrap_or(f64::NAN);
            let ok = (area - 4.0 * k).abs() < 1e-9 && (vol - 4.0 * std::f64::consts::PI * k * k).abs() < 1e-7;
            Ok(if ok { Outcome::Pass } else { Outcome::Fail(format!("k = {k}: {area}, {vol}")) })
        })?,
        run_check("sphere surface with inset endpoints", 1, rng, false, |_| {
            let h = 1e-6;
            let f = parse_expr("sqrt(1 - x^2)")?;
            let v = geom_measure(GeomKind::SurfaceRevolution, &f, -1.0 + h, 1.0 - h, s)?
                .value
                .unwrap_or(f64::NAN);
            let want = 4.0 * std::f64::consts::PI * (1.0 - h);
            Ok(if (v - want).abs() < 1e-4 { Outcome::Pass } else { Outcome::Fail(format!("{v}")) })
        })?,
        run_check("length element dl = dx is not negligible", 1, rng, true, |_| {
            let rep = element_check(&Expr::x(), 0.5, Element::NaiveLength, s)?;
            Ok(verdict_is(&Decision::exact(rep.verdict), Verdict::Fails, || "f = x".into()))
        })?,
        run_check("surface element ds = 2 pi f dx is not negligible", 1, rng, true, |_| {
            let f = parse_expr("x + 1")?;
            let rep = element_check(&f, 0.5, Element::NaiveSurface, s)?;
            Ok(verdict_is(&Decision::exact(rep.verdict), Verdict::Fails, || "f = x + 1".into()))
        })?,
    ])
}

fn rng_ratio(r: &mut ChaCha8Rng) -> f64 {
    r.gen_range(-8..=8) as f64 / 4.0
}

/// Runs one suite with `instances` random draws per proposition.
pub fn run_suite_with(name: &str, instances: usize, settings: &Settings) -> Result<SuiteReport> {
    let idx = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed.wrapping_add(idx as u64 * 0x9e37_79b9));
    let checks = match name {
        "finitude" => finitude(&mut rng, instances, settings)?,
        "proximity" => proximity(&mut rng, instances, settings)?,
        "confront" => confront_suite(&mut rng, instances, settings)?,
        "continuity" => continuity(&mut rng, instances, settings)?,
        "derivation-rules" => derivation_rules(&mut rng, instances, settings)?,
        "ftc" => ftc_suite(&mut rng, instances.min(INTEGRAL_INSTANCES), settings)?,
        _ => geometry(&mut rng, instances.min(INTEGRAL_INSTANCES), settings)?,
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        ok: checks.iter().all(|c| c.ok),
        checks,
    })
}

pub fn run_suite(name: &str, settings: &Settings) -> Result<SuiteReport> {
    run_suite_with(name, INSTANCES, settings)
}

/// `"all"` or a single suite name.
pub fn run_props(which: &str, settings: &Settings) -> Result<Vec<SuiteReport>> {
    if which == "all" {
        SUITES.iter().map(|s| run_suite(s, settings)).collect()
    } else {
        Ok(vec![run_suite(which, settings)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", &Settings::default()), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn small_runs_pass() {
        for suite in SUITES {
            let r = run_suite_with(suite, 10, &Settings::default()).unwrap();
            for c in &r.checks {
                assert!(c.ok, "{suite}: {c:?}");
            }
        }
    }
}
