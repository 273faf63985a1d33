//! Derivatives as standard parts of infinitesimal quotients, differentiability,
//! Taylor expansion with a checked remainder order, and continuity testers.
//!
//! Quantifying over every neighbour of a point is not computable, so each
//! tester ranges over a fixed probe family (plus a sequence-tier probe where
//! noted). A derivative is reported as holding when every probe agrees and,
//! when a symbolic derivative exists, that oracle agrees too.

use serde::Serialize;

use crate::classify::{near, neighbour, standard_part};
use crate::domain::{DomainDescriptor, Interval};
use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::realfun::{diff_expr, eval_real, extend_apply, Expr, Func};
use crate::scalar::Scalar;
use crate::settings::Settings;
use crate::verdict::{Decision, Verdict};
use crate::vnum::{rel_ext, Relation, VirtualNumber};

/// Gap threshold for uniform-continuity failures.
pub const UC_GAP: f64 = 1e-3;
/// Grid points per component swept by the uniform-continuity tester.
pub const UC_GRID: usize = 64;
const UC_TAIL: usize = 5;
/// Agreement band for standard parts read off sampled quotients.
pub const SAMPLED_AGREEMENT: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Probe {
    pub name: String,
    pub value: VirtualNumber,
}

/// Invertible infinitesimal increments used as `dx`.
#[derive(Clone, Debug)]
pub struct InfinitesimalFamily {
    probes: Vec<Probe>,
}

impl Default for InfinitesimalFamily {
    /// ∂, ∂², −∂, ±∂ and (3/2)∂.
    fn default() -> Self {
        let del = VirtualNumber::del();
        let probes = vec![
            ("del", del.clone()),
            ("del^2", &del * &del),
            ("-del", -&del),
            ("(+-)del", del.alternate_sign()),
            ("3/2*del", del.scale(&Scalar::ratio(3, 2))),
        ];
        InfinitesimalFamily {
            probes: probes
                .into_iter()
                .map(|(n, v)| Probe {
                    name: n.to_string(),
                    value: v,
                })
                .collect(),
        }
    }
}

impl InfinitesimalFamily {
    /// Every member must be a neighbour of zero.
    pub fn new(probes: Vec<Probe>, settings: &Settings) -> Result<Self> {
        for p in &probes {
            let d = neighbour(&p.value, &VirtualNumber::zero(), settings);
            if !d.holds() {
                return Err(Error::InvalidArgument(format!(
                    "probe {} is not a neighbour of zero ({})",
                    p.name, d.verdict
                )));
            }
        }
        Ok(InfinitesimalFamily { probes })
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeQuotient {
    pub probe: String,
    /// Standard part of the quotient, if it has one.
    pub standard_part: Option<f64>,
    /// Exact rendering of the standard part.
    pub text: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub x: f64,
    pub value: Option<f64>,
    pub value_text: Option<String>,
    pub per_probe: Vec<ProbeQuotient>,
    pub verdict: Verdict,
    /// `f'(x)` from the symbolic derivative, when one exists.
    pub oracle_value: Option<f64>,
    pub oracle_confirmed: bool,
}

fn real(x: f64) -> VirtualNumber {
    VirtualNumber::real(Scalar::from_f64_lossless(x))
}

fn agree(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    if a.is_exact() && b.is_exact() {
        return a == b;
    }
    let (x, y) = (a.to_f64(), b.to_f64());
    (x - y).abs() <= tol * 1f64.max(x.abs()).max(y.abs())
}

/// Defined at `x` and at both neighbours `x ± ∂`.
fn interior_to_domain(f: &Expr, x: f64, settings: &Settings) -> Result<()> {
    let xv = real(x);
    let not_interior = || Error::NotInterior { x };
    match extend_apply(f, &xv, settings) {
        Ok(_) => {}
        Err(Error::Domain { .. }) => return Err(not_interior()),
        Err(e) => return Err(e),
    }
    for side in [VirtualNumber::del(), -VirtualNumber::del()] {
        let v = match extend_apply(f, &(&xv + &side), settings) {
            Ok(v) => v,
            Err(Error::Domain { .. }) => return Err(not_interior()),
            Err(e) => return Err(e),
        };
        if !v.is_series() {
            let sched = settings.schedule();
            if sched.tail(8).iter().any(|&n| v.sample(n).is_err()) {
                return Err(not_interior());
            }
        }
    }
    Ok(())
}

/// The derivative of `f` at `x` as the common standard part of
/// `(f(x+dx) - f(x))/dx` over the probe family.
pub fn derivative_at(
    f: &Expr,
    x: f64,
    family: &InfinitesimalFamily,
    settings: &Settings,
) -> Result<DerivativeReport> {
    interior_to_domain(f, x, settings)?;
    let xv = real(x);
    let fx = extend_apply(f, &xv, settings)?;
    let mut per_probe = Vec::new();
    let mut parts: Vec<Option<Scalar>> = Vec::new();
    let mut sampled = false;
    for p in family.probes() {
        let q = extend_apply(f, &(&xv + &p.value), settings)
            .and_then(|fy| (&fy - &fx).div(&p.value, settings.trunc))
            .and_then(|q| {
                sampled |= !q.is_series();
                standard_part(&q, settings)
            });
        match q {
            Ok(s) => {
                per_probe.push(ProbeQuotient {
                    probe: p.name.clone(),
                    standard_part: Some(s.to_f64()),
                    text: Some(s.to_string()),
                    error: None,
                });
                parts.push(Some(s));
            }
            Err(e) => {
                per_probe.push(ProbeQuotient {
                    probe: p.name.clone(),
                    standard_part: None,
                    text: None,
                    error: Some(e.to_string()),
                });
                parts.push(None);
            }
        }
    }
    let oracle_value = diff_expr(f).ok().and_then(|df| eval_real(&df, x).ok());
    let first = parts.first().cloned().flatten();
    let band = if sampled { SAMPLED_AGREEMENT.max(settings.tol) } else { settings.tol };
    let consistent = match &first {
        Some(m) => parts
            .iter()
            .all(|p| p.as_ref().is_some_and(|s| agree(s, m, band))),
        None => false,
    };
    let mut report = DerivativeReport {
        x,
        value: first.as_ref().map(Scalar::to_f64),
        value_text: first.as_ref().map(Scalar::to_string),
        per_probe,
        verdict: Verdict::Fails,
        oracle_value,
        oracle_confirmed: false,
    };
    if !consistent {
        report.value = None;
        report.value_text = None;
        return Err(Error::NotDerivable {
            x,
            report: Box::new(report),
        });
    }
    let m = first.expect("consistent implies a value");
    report.verdict = match oracle_value {
        Some(o) => {
            report.oracle_confirmed = agree(&m, &Scalar::approx(o), settings.tol);
            Verdict::from_bool(report.oracle_confirmed)
        }
        None => Verdict::Holds,
    };
    Ok(report)
}

/// `f` at `x` is near `f(x)` for every probe, plus a sequence-tier `±∂`.
pub fn check_continuity_at(f: &Expr, x: f64, settings: &Settings) -> Result<Decision> {
    let xv = real(x);
    let fx = extend_apply(f, &xv, settings)?;
    let family = InfinitesimalFamily::default();
    let seq_probe = VirtualNumber::seq(VirtualNumber::del().alternate_sign().to_seq());
    let mut d = Decision::exact(Verdict::Holds);
    for eps in family.probes().iter().map(|p| &p.value).chain([&seq_probe]) {
        match extend_apply(f, &(&xv + eps), settings) {
            Ok(fy) => d = d.and(near(&fy, &fx, settings)),
            // a probe outside the domain is not a point of the extension
            Err(Error::Domain { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(d)
}

/// Derivable at `x` with a derivative that is continuous at `x`, checked by
/// two-point quotients near `f'(x)` and by continuity of the symbolic
/// derivative. Without a symbolic derivative a `Holds` is capped at unknown.
pub fn check_differentiable_at(f: &Expr, x: f64, settings: &Settings) -> Result<Decision> {
    let report = match derivative_at(f, x, &InfinitesimalFamily::default(), settings) {
        Ok(r) => r,
        Err(Error::NotDerivable { .. }) => return Ok(Decision::exact(Verdict::Fails)),
        Err(e) => return Err(e),
    };
    if report.verdict.fails() {
        return Ok(Decision::exact(Verdict::Fails));
    }
    let m = match (&report.value_text, report.value) {
        (Some(t), _) if !t.contains('.') => crate::realfun::parse_expr(t)
            .ok()
            .and_then(|e| match e {
                Expr::Const(c) => Some(c),
                _ => None,
            })
            .unwrap_or_else(|| Scalar::approx(report.value.unwrap_or(0.0))),
        (_, v) => Scalar::approx(v.unwrap_or(0.0)),
    };
    let mv = VirtualNumber::real(m);
    let xv = real(x);
    let del = VirtualNumber::del();
    let del2 = &del * &del;
    let mut pairs = vec![
        (&xv + &del, &(&xv + &del) + &del2),
        (&xv - &del, &(&xv - &del) - &del2),
        (&xv + &del.alternate_sign(), &(&xv + &del.alternate_sign()) + &del2),
        (&xv + &del.scale(&Scalar::ratio(3, 2)), &xv - &del),
        (&xv + &del2, &xv + &del),
    ];
    // constructive witness for the lemma: β = α + ∂^(T/2)
    let alpha = &xv + &del;
    if extend_apply(f, &alpha, settings).is_ok_and(|v| v.is_series()) {
        let k = (settings.trunc / 2).max(2);
        pairs.push((alpha.clone(), &alpha + &VirtualNumber::monomial(Scalar::one(), k)));
    }
    let mut two_point = Decision::exact(Verdict::Holds);
    for (a, b) in &pairs {
        let q = extend_apply(f, a, settings).and_then(|fa| {
            let fb = extend_apply(f, b, settings)?;
            (&fa - &fb).div(&(a - b), settings.trunc)
        });
        let d = match q {
            Ok(q) => near(&q, &mv, settings),
            Err(Error::Domain { .. }) => Decision::exact(Verdict::Fails),
            Err(e) => return Err(e),
        };
        two_point = two_point.and(d);
    }
    match diff_expr(f) {
        Ok(df) => {
            let cont = match check_continuity_at(&df, x, settings) {
                Ok(d) => d,
                Err(Error::Domain { .. }) => Decision::exact(Verdict::Fails),
                Err(e) => return Err(e),
            };
            Ok(two_point.and(cont))
        }
        Err(Error::NonSmoothNode(_)) => Ok(Decision {
            verdict: two_point.verdict.cap_at_unknown(),
            ..two_point
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaylorReport {
    pub x: f64,
    pub order: u32,
    /// `c_k = f^(k)(x)/k!`, k = 0..=order.
    pub coeffs: Vec<f64>,
    pub coeffs_text: Vec<String>,
    /// Lower bound on the valuation of `f(x+∂) - Σ c_k ∂^k`.
    pub remainder_valuation: Option<i32>,
    pub remainder_exact_zero: bool,
    pub remainder: Decision,
}

/// Coefficients by repeated symbolic differentiation, and the exact check
/// that the remainder `f(x+∂) - Σ c_k ∂^k` lies in `O(∂^(n+1))`.
pub fn taylor_expand(f: &Expr, x: f64, n: u32, settings: &Settings) -> Result<TaylorReport> {
    interior_to_domain(f, x, settings)?;
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut d = f.clone();
    let mut fact = Scalar::one();
    for k in 0..=n {
        if k > 0 {
            d = diff_expr(&d)?;
            fact = &fact * &Scalar::int(k as i64);
        }
        let v = Scalar::from_f64_lossless(eval_real(&d, x)?);
        coeffs.push(&v / &fact);
    }
    let poly = LaurentPolynomial::new(
        coeffs.iter().enumerate().map(|(k, c)| (k as i32, c.clone())),
        None,
    );
    let lifted = extend_apply(f, &(&real(x) + &VirtualNumber::del()), settings)?;
    let rem = &lifted - &VirtualNumber::series(poly);
    let (valuation, exact_zero, verdict) = match rem.branches() {
        Some((e, o)) => {
            let lb = |p: &LaurentPolynomial| p.order_lower_bound().map(|v| v as i32);
            let low = match (lb(e), lb(o)) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, None) => a,
                (None, b) => b,
            };
            let known = |p: &LaurentPolynomial| p.leading().is_some() || p.is_exact();
            let target = n as i32 + 1;
            let verdict = match low {
                None => Verdict::Holds,
                Some(v) if v >= target => Verdict::Holds,
                Some(_) if known(e) && known(o) => Verdict::Fails,
                Some(_) => Verdict::UnknownAtDepth,
            };
            (low, e.is_exact_zero() && o.is_exact_zero(), verdict)
        }
        None => (None, false, Verdict::UnknownAtDepth),
    };
    Ok(TaylorReport {
        x,
        order: n,
        coeffs: coeffs.iter().map(Scalar::to_f64).collect(),
        coeffs_text: coeffs.iter().map(Scalar::to_string).collect(),
        remainder_valuation: valuation,
        remainder_exact_zero: exact_zero,
        remainder: Decision::exact(verdict),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UcWitness {
    /// The sweep `a_n`; the partner point is `a_n + 1/n`.
    pub family: String,
    pub gap: f64,
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformReport {
    pub verdict: Verdict,
    pub depth: u64,
    pub families: usize,
    pub witness: Option<UcWitness>,
}

impl UniformReport {
    /// `HoldsToDepth(n)`, `Fails` or `UnknownAtDepth`.
    pub fn label(&self) -> String {
        match self.verdict {
            Verdict::Holds => format!("HoldsToDepth({})", self.depth),
            v => v.to_string(),
        }
    }
}

type Sweep = (String, Box<dyn Fn(u64) -> f64>);

fn sweeps(c: &Interval) -> Vec<Sweep> {
    let (l, r) = (c.lo.value, c.hi.value);
    let mut out: Vec<Sweep> = Vec::new();
    let (gl, gr) = (l.max(-32.0).max(r - 64.0), r.min(32.0).min(l + 64.0));
    let (gl, gr) = if gl < gr { (gl, gr) } else { (l, r) };
    for j in 0..UC_GRID {
        let a = gl + (j as f64 + 0.5) * (gr - gl) / UC_GRID as f64;
        out.push((format!("a_n = {a}"), Box::new(move |_| a)));
    }
    if l.is_finite() {
        out.push((format!("a_n = {l} + 1/n"), Box::new(move |n| l + 1.0 / n as f64)));
    } else {
        let base = r.min(0.0);
        out.push((format!("a_n = {base} - n"), Box::new(move |n| base - n as f64)));
    }
    if r.is_finite() {
        out.push((format!("a_n = {r} - 2/n"), Box::new(move |n| r - 2.0 / n as f64)));
    } else {
        let base = l.max(0.0);
        out.push((format!("a_n = {base} + n"), Box::new(move |n| base + n as f64)));
    }
    out
}

/// Semidecides uniform continuity on `A` through neighbour pairs
/// `(a_n, a_n + 1/n)`. Fails when some sweep keeps a gap above [`UC_GAP`]
/// at each of the last five schedule points without decaying.
pub fn check_uniform_continuity(f: &Expr, a: &DomainDescriptor, settings: &Settings) -> Result<UniformReport> {
    let sched = settings.schedule();
    let idx = sched.tail(UC_TAIL);
    let mut families = 0;
    let mut worst: Option<UcWitness> = None;
    for comp in a.components() {
        for (name, gen) in sweeps(comp) {
            families += 1;
            let mut gaps = Vec::with_capacity(idx.len());
            for &n in idx {
                let x = gen(n);
                let y = x + 1.0 / n as f64;
                if !comp.contains(x) || !comp.contains(y) {
                    gaps.push(0.0);
                    continue;
                }
                let g = (eval_real(f, y)? - eval_real(f, x)?).abs();
                gaps.push(if g.is_finite() { g } else { f64::MAX });
            }
            let persistent = gaps.len() == UC_TAIL
                && gaps.iter().all(|g| *g > UC_GAP)
                && gaps[UC_TAIL - 1] >= 0.5 * gaps[0];
            if persistent {
                let gap = gaps[UC_TAIL - 1];
                if worst.as_ref().map_or(true, |w| gap > w.gap) {
                    worst = Some(UcWitness {
                        family: name,
                        gap,
                        index: *idx.last().expect("non-empty schedule"),
                    });
                }
            }
        }
    }
    Ok(UniformReport {
        verdict: if worst.is_some() { Verdict::Fails } else { Verdict::Holds },
        depth: sched.max_index(),
        families,
        witness: worst,
    })
}

/// `sin ε / ε ≈ 1`, together with the sandwich `cos ε < sin ε / ε < 1`.
pub fn sine_quotient_check(eps: &VirtualNumber, settings: &Settings) -> Result<Decision> {
    let pre = neighbour(eps, &VirtualNumber::zero(), settings);
    if !pre.holds() {
        return Err(Error::PremiseNotMet(pre.verdict));
    }
    let sin = Expr::call(Func::Sin, Expr::Var);
    let cos = Expr::call(Func::Cos, Expr::Var);
    let q = extend_apply(&sin, eps, settings)?.div(eps, settings.trunc)?;
    let c = extend_apply(&cos, eps, settings)?;
    let one = VirtualNumber::one();
    Ok(near(&q, &one, settings)
        .and(rel_ext(Relation::Lt, &[&c, &q], settings)?)
        .and(rel_ext(Relation::Lt, &[&q, &one], settings)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realfun::parse_expr;

    fn s() -> Settings {
        Settings::default()
    }
    fn fam() -> InfinitesimalFamily {
        InfinitesimalFamily::default()
    }
    fn e(src: &str) -> Expr {
        parse_expr(src).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let r = derivative_at(&e("sin(x)"), 0.0, &fam(), &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.value_text.as_deref(), Some("1"));
        let r = derivative_at(&e("1/x"), 2.0, &fam(), &s()).unwrap();
        assert_eq!(r.value_text.as_deref(), Some("-1/4"));
        assert!(r.oracle_confirmed);
        assert!(matches!(
            derivative_at(&e("abs(x)"), 0.0, &fam(), &s()),
            Err(Error::NotDerivable { .. })
        ));
        assert!(matches!(
            derivative_at(&e("sqrt(x)"), 0.0, &fam(), &s()),
            Err(Error::NotInterior { .. })
        ));
        let r = derivative_at(&e("x^3 - 2*x"), 1.5, &fam(), &s()).unwrap();
        assert!((r.value.unwrap() - (3.0 * 2.25 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn family_members_must_be_neighbours_of_zero() {
        let bad = Probe {
            name: "1".into(),
            value: VirtualNumber::one(),
        };
        assert!(InfinitesimalFamily::new(vec![bad], &s()).is_err());
    }

    #[test]
    fn differentiability() {
        assert!(check_differentiable_at(&e("sin(x)"), 0.3, &s()).unwrap().holds());
        assert!(check_differentiable_at(&e("5"), -2.0, &s()).unwrap().holds());
        assert!(check_differentiable_at(&e("abs(x)"), 0.0, &s()).unwrap().fails());
    }

    #[test]
    fn taylor_examples() {
        let t = taylor_expand(&e("exp(x)"), 0.0, 2, &s()).unwrap();
        assert_eq!(t.coeffs_text, ["1", "1", "1/2"]);
        assert!(t.remainder.holds());
        assert_eq!(t.remainder_valuation, Some(3));
        let t = taylor_expand(&e("sin(x)"), 0.0, 1, &s()).unwrap();
        assert_eq!(t.coeffs, [0.0, 1.0]);
        assert_eq!(t.remainder_valuation, Some(3));
        let t = taylor_expand(&e("4"), 1.0, 3, &s()).unwrap();
        assert!(t.remainder_exact_zero && t.remainder.holds());
    }

    #[test]
    fn continuity_examples() {
        assert!(check_continuity_at(&e("cos(x)"), 1.2, &s()).unwrap().holds());
        assert!(check_continuity_at(&e("1/x"), 0.5, &s()).unwrap().holds());
        let r = check_continuity_at(&e("sin(1/x)"), 0.0, &s()); assert!(r.is_err(), "{r:?}");
    }

    #[test]
    fn uniform_continuity_examples() {
        let r = check_uniform_continuity(&e("cos(x)"), &DomainDescriptor::real_line(), &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let r = check_uniform_continuity(&e("x^2"), &DomainDescriptor::real_line(), &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let w = r.witness.unwrap();
        assert!(w.gap >= 2.0 - 1e-3, "{w:?}");
        let ten: DomainDescriptor = "[0,10]".parse().unwrap();
        let r = check_uniform_continuity(&e("x^2"), &ten, &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let unit: DomainDescriptor = "(0,1)".parse().unwrap();
        assert_eq!(check_uniform_continuity(&e("1/x"), &unit, &s()).unwrap().verdict, Verdict::Fails);
    }

    #[test]
    fn sine_quotients() {
        let del = VirtualNumber::del();
        for eps in [del.clone(), del.alternate_sign(), &(&del * &del) * &del] {
            assert!(sine_quotient_check(&eps, &s()).unwrap().holds(), "{eps}");
        }
        assert!(sine_quotient_check(&VirtualNumber::zero(), &s()).is_err());
    }

    fn wiggle() -> Expr {
        Expr::patch(e("x^2*sin(1/x)"), Scalar::zero(), Scalar::zero())
    }

    #[test]
    fn derivable_but_not_differentiable() {
        let r = derivative_at(&wiggle(), 0.0, &fam(), &s()).unwrap();
        assert!(r.value.unwrap().abs() < 1e-6, "{r:?}");
        assert_eq!(r.oracle_value, None);
        assert!(check_differentiable_at(&wiggle(), 0.0, &s()).unwrap().fails());
        // no symbolic derivative through a patch, so a pass is capped
        let d = check_differentiable_at(&wiggle(), 0.7, &s()).unwrap();
        assert_eq!(d.verdict, Verdict::UnknownAtDepth);
    }
}
