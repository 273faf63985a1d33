//! One handler per verb. Each returns the text rendering, the JSON payload
//! and the exit code together so the REPL and one-shot paths share them.

use serde_json::{json, Value};
use vcalc_core::{
    check_differentiable_at, check_uniform_continuity, classify, cmp_reals, compare_magnitude,
    derivative_at, eval_const, eval_virtual, ftc_check, geom_measure, in_order_of, integrate, near,
    negligible, parse_expr, props::run_props, standard_part, taylor_expand, DomainDescriptor,
    Error, Expr, FinitudeClass, GeomKind, InfinitesimalFamily, IntegralReport, Scalar, Settings,
    Verdict, VirtualNumber,
};

use crate::Command;

pub struct Outcome {
    pub text: String,
    pub payload: Value,
    pub exit: u8,
}

impl Outcome {
    fn new(text: String, payload: Value, verdict: Verdict) -> Self {
        Outcome {
            text,
            payload,
            exit: if verdict.fails() { 1 } else { 0 },
        }
    }

    fn error(e: &Error) -> Self {
        Outcome {
            text: e.to_string(),
            payload: json!({ "error": e.to_string() }),
            exit: 2,
        }
    }

    pub fn is_error(&self) -> bool {
        self.exit == 2
    }
}

pub fn run(cmd: &Command, s: &Settings) -> Outcome {
    let r = match cmd {
        Command::Eval { expr } => eval_cmd(expr, s),
        Command::Classify { expr } => classify_cmd(expr, s),
        Command::Near { a, b } => near_cmd(a, b, s),
        Command::Order { b, a } => order_cmd(b, a, s),
        Command::Deriv { f, x } => deriv_cmd(f, x, s),
        Command::Taylor { f, x, n } => taylor_cmd(f, x, *n, s),
        Command::Integrate { f, a, b } => integrate_cmd(f, a, b, s),
        Command::Uc { f, domain } => uc_cmd(f, domain, s),
        Command::Geom { kind, f, a, b } => geom_cmd(kind, f, a, b, s),
        Command::Ftc { f, a, x } => ftc_cmd(f, a, x, s),
        Command::Props { suite } => props_cmd(suite, s),
        Command::Repl => Err(Error::InvalidArgument("the REPL cannot be nested".into())),
    };
    r.unwrap_or_else(|e| Outcome::error(&e))
}

/// Fixed-point with up to 12 decimals for moderate magnitudes, scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x != 0.0 && !(1e-4..1e12).contains(&x.abs()) {
        return format!("{x:.6e}");
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn fmt_scalar(c: &Scalar) -> String {
    if c.is_exact() {
        c.to_string()
    } else {
        fmt_num(c.to_f64())
    }
}

fn value(src: &str, s: &Settings) -> Result<VirtualNumber, Error> {
    eval_virtual(&parse_expr(src)?, s)
}

/// A real argument written as a constant expression (`0.5`, `-pi/2`, ...).
fn real_arg(src: &str) -> Result<f64, Error> {
    let e = parse_expr(src)?;
    if e.is_virtual() {
        return Err(Error::NotReal(src.into()));
    }
    eval_const(&e)
}

fn function(src: &str) -> Result<Expr, Error> {
    parse_expr(src)
}

fn eval_cmd(src: &str, s: &Settings) -> Result<Outcome, Error> {
    let v = value(src, s)?;
    let (note, sp) = match standard_part(&v, s) {
        Ok(c) => (format!("≈ {}", fmt_scalar(&c)), Some(c)),
        Err(Error::NoStandardPart(Verdict::Fails)) => ("no standard part".into(), None),
        Err(Error::NoStandardPart(_)) => ("standard part undecided".into(), None),
        Err(e) => return Err(e),
    };
    let payload = json!({
        "value": v.to_string(),
        "tier": if v.is_series() { "series" } else { "sequence" },
        "approximate": v.is_approximate(),
        "standard_part": sp.as_ref().map(|c| c.to_string()),
        "standard_part_f64": sp.as_ref().map(|c| c.to_f64()),
    });
    Ok(Outcome::new(format!("{v}  ({note})"), payload, Verdict::Holds))
}

fn classify_cmd(src: &str, s: &Settings) -> Result<Outcome, Error> {
    let v = value(src, s)?;
    let c = classify(&v, s);
    let (side, _) = cmp_reals(&v, s);
    let mut text = match c.tag {
        Some(FinitudeClass::Infinitesimal) => "infinitesimal; finite".to_string(),
        Some(FinitudeClass::FiniteNonInfinitesimal) => "finite; not infinitesimal".to_string(),
        Some(FinitudeClass::InfiniteAboveR) => "infinite; > R".to_string(),
        Some(FinitudeClass::InfiniteBelowR) => "infinite; < R".to_string(),
        Some(FinitudeClass::InfiniteOscillating) => "infinite; not > R; not < R".to_string(),
        None => "undecided".to_string(),
    };
    if c.depth > 0 {
        text.push_str(&format!("  (sampled to n = {})", c.depth));
    }
    let payload = json!({
        "value": v.to_string(),
        "classification": c,
        "side": side,
        "text": text,
    });
    Ok(Outcome::new(text, payload, Verdict::Holds))
}

fn near_cmd(a: &str, b: &str, s: &Settings) -> Result<Outcome, Error> {
    let (x, y) = (value(a, s)?, value(b, s)?);
    let d = near(&x, &y, s);
    let diff = &x - &y;
    let text = format!("near: {}\ndifference: {diff}", d.verdict);
    let payload = json!({ "decision": d, "difference": diff.to_string() });
    Ok(Outcome::new(text, payload, d.verdict))
}

fn order_cmd(b: &str, a: &str, s: &Settings) -> Result<Outcome, Error> {
    let (x, y) = (value(b, s)?, value(a, s)?);
    let big_o = in_order_of(&x, &y, s)?;
    let small = negligible(&x, &y, s)?;
    let (mag, _) = compare_magnitude(&x, &y, s)?;
    let text = format!(
        "in O(a): {}\nnegligible: {}\nmagnitude: {mag:?}",
        big_o.verdict, small.verdict
    );
    let payload = json!({ "in_order_of": big_o, "negligible": small, "magnitude": mag });
    Ok(Outcome::new(text, payload, big_o.verdict))
}

fn deriv_cmd(f: &str, x: &str, s: &Settings) -> Result<Outcome, Error> {
    let (f, x) = (function(f)?, real_arg(x)?);
    let report = match derivative_at(&f, x, &InfinitesimalFamily::default(), s) {
        Ok(r) => r,
        Err(Error::NotDerivable { report, .. }) => {
            let mut text = format!("not derivable at {}", fmt_num(x));
            for p in &report.per_probe {
                let q = match (&p.text, &p.error) {
                    (Some(t), _) => t.clone(),
                    (None, Some(e)) => e.clone(),
                    (None, None) => "no standard part".into(),
                };
                text.push_str(&format!("\n  {:<8} {q}", p.probe));
            }
            let payload = json!({ "derivative": *report, "differentiable": Value::Null });
            return Ok(Outcome::new(text, payload, Verdict::Fails));
        }
        Err(e) => return Err(e),
    };
    let shown = report
        .value_text
        .clone()
        .or(report.value.map(fmt_num))
        .unwrap_or_else(|| "?".into());
    let mut text = format!("f'({}) = {shown}  ({})", fmt_num(x), report.verdict);
    let diff = check_differentiable_at(&f, x, s);
    let diff_json = match &diff {
        Ok(d) => {
            text.push_str(&format!("\ndifferentiable: {}", d.verdict));
            json!(d)
        }
        Err(e) => {
            text.push_str(&format!("\ndifferentiable: not checked ({e})"));
            Value::Null
        }
    };
    let verdict = report.verdict;
    let payload = json!({ "derivative": report, "differentiable": diff_json });
    Ok(Outcome::new(text, payload, verdict))
}

fn taylor_cmd(f: &str, x: &str, n: u32, s: &Settings) -> Result<Outcome, Error> {
    let (f, x) = (function(f)?, real_arg(x)?);
    let r = taylor_expand(&f, x, n, s)?;
    let mut terms = Vec::new();
    for (k, c) in r.coeffs_text.iter().enumerate() {
        if c == "0" {
            continue;
        }
        let h = if k == 1 { "h".to_string() } else { format!("h^{k}") };
        terms.push(match c.as_str() {
            _ if k == 0 => c.clone(),
            "1" => h,
            "-1" => format!("-{h}"),
            _ => format!("({c})*{h}"),
        });
    }
    if terms.is_empty() {
        terms.push("0".into());
    }
    let val = r
        .remainder_valuation
        .map_or_else(|| "none (exact)".into(), |v| v.to_string());
    let text = format!(
        "f({} + h) = {} + O(h^{})\nremainder valuation: {val}  ({})",
        fmt_num(x),
        terms.join(" + "),
        n + 1,
        r.remainder.verdict
    );
    let verdict = r.remainder.verdict;
    Ok(Outcome::new(text, json!(r), verdict))
}

fn integral_text(r: &IntegralReport) -> String {
    let value = r.value.map_or_else(|| "no value".into(), fmt_num);
    let mut text = format!("{value}  ({}, {} cells, spread {:.1e})", r.verdict, r.depth, r.spread);
    for t in &r.per_scheme {
        let last = t.tail.last().map_or_else(|| "-".into(), |v| fmt_num(*v));
        text.push_str(&format!("\n  {:<12} {last:<18} {}", t.scheme, t.verdict));
    }
    text
}

fn integrate_cmd(f: &str, a: &str, b: &str, s: &Settings) -> Result<Outcome, Error> {
    let r = integrate(&function(f)?, real_arg(a)?, real_arg(b)?, s)?;
    Ok(Outcome::new(integral_text(&r), json!(r), r.verdict))
}

fn uc_cmd(f: &str, domain: &str, s: &Settings) -> Result<Outcome, Error> {
    let dom: DomainDescriptor = domain.parse()?;
    let r = check_uniform_continuity(&function(f)?, &dom, s)?;
    let mut text = format!("uniformly continuous on {dom}: {}", r.label());
    if let Some(w) = &r.witness {
        text.push_str(&format!("\nwitness: {} at n = {}, gap {}", w.family, w.index, fmt_num(w.gap)));
    }
    Ok(Outcome::new(text, json!(r), r.verdict))
}

fn geom_cmd(kind: &str, f: &str, a: &str, b: &str, s: &Settings) -> Result<Outcome, Error> {
    let kind: GeomKind = kind.parse()?;
    let r = geom_measure(kind, &function(f)?, real_arg(a)?, real_arg(b)?, s)?;
    let payload = json!({ "kind": kind, "integral": r });
    Ok(Outcome::new(integral_text(&r), payload, r.verdict))
}

fn ftc_cmd(f: &str, a: &str, x: &str, s: &Settings) -> Result<Outcome, Error> {
    let r = ftc_check(&function(f)?, real_arg(a)?, real_arg(x)?, s)?;
    let integral = r.integral.map_or_else(|| "no value".into(), fmt_num);
    let text = format!(
        "ds - f(x)dx negligible at {}: {}\nratio {:.3e} at n = {}\ns(x) = {integral}",
        fmt_num(r.x),
        r.verdict,
        r.ratio,
        r.depth
    );
    Ok(Outcome::new(text, json!(r), r.verdict))
}

fn props_cmd(suite: &str, s: &Settings) -> Result<Outcome, Error> {
    let reports = run_props(suite, s)?;
    let mut lines = Vec::new();
    let (mut total, mut failed) = (0, 0);
    for r in &reports {
        for c in &r.checks {
            total += 1;
            let status = if c.ok { "PASS" } else { "FAIL" };
            let mut line = format!("{status}  {}/{}  {}/{}", r.suite, c.name, c.passed, c.instances);
            if c.expect_failure {
                line.push_str("  (expected failure)");
            }
            if !c.ok {
                failed += 1;
                if let Some(cx) = &c.counterexample {
                    line.push_str(&format!("\n      counterexample: {cx}"));
                }
            }
            lines.push(line);
        }
    }
    lines.push(format!("props: {total} checks, {failed} failed"));
    let verdict = Verdict::from_bool(failed == 0);
    Ok(Outcome::new(lines.join("\n"), json!(reports), verdict))
}
