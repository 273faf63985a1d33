//! Applying a real function to a virtual argument.
//!
//! Sequence arguments are mapped pointwise. Series arguments are lifted per
//! parity branch: a branch `p` with standard centre `c` is written
//! `c + ε` with `ε` infinitesimal and each elementary function is replaced by
//! its Taylor series about `c`, cut at the ambient truncation order. `abs`
//! follows the sign of the leading term, and `sqrt` pulls out even powers of
//! ∂ (so `sqrt(inf^2 + 1) = inf*sqrt(1 + del^2)`). Where no Laurent
//! expansion exists (`sin(inf)`, `ln(del)`, `sqrt(del)`) the value falls back
//! to the sequence tier and the fallback is recorded.

use std::cmp::min;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{eval_real, Expr, Func};
use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::scalar::Scalar;
use crate::settings::Settings;
use crate::vnum::{PointFault, SequenceGen, VirtualNumber};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FallbackReason {
    /// The argument has negative valuation (e.g. `sin(inf)`).
    InfiniteArgument,
    /// The standard centre sits on the boundary of the domain (e.g. `ln(del)`).
    CenterOnBoundary,
    /// `sqrt` of a value with odd valuation (e.g. `sqrt(del)`).
    OddValuation,
    /// Nothing is known about the argument below the truncation order.
    UnknownCenter,
    /// A patched point whose argument is neither eventually at nor away from it.
    MixedPatch,
}

/// A node whose value was computed on the sequence tier instead of as a series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fallback {
    pub node: String,
    pub reason: FallbackReason,
}

struct Ctx<'a> {
    alpha: Option<VirtualNumber>,
    trunc: i32,
    notes: &'a mut Vec<Fallback>,
}

fn domain(node: &Expr) -> Error {
    Error::Domain {
        node: node.to_string(),
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, j| acc * BigInt::from(j))
}

fn inv_factorial(k: u32) -> Scalar {
    Scalar::Exact(BigRational::new(BigInt::from(1), factorial(k)))
}

/// Taylor coefficients `f^(k)(c)/k!` for k = 0..=order.
fn taylor_coeffs(func: Func, c: &Scalar, order: u32) -> Vec<Scalar> {
    let at_zero = c.is_exact() && c.is_zero();
    let cf = c.to_f64();
    match func {
        Func::Exp => {
            let base = if at_zero { Scalar::one() } else { Scalar::approx(cf.exp()) };
            (0..=order).map(|k| &base * &inv_factorial(k)).collect()
        }
        Func::Sin | Func::Cos => {
            let (s, co) = if at_zero {
                (Scalar::zero(), Scalar::one())
            } else {
                (Scalar::approx(cf.sin()), Scalar::approx(cf.cos()))
            };
            // derivatives of sin cycle sin, cos, -sin, -cos; cos starts one step later
            let cycle = [s.clone(), co.clone(), -&s, -&co];
            let shift = if func == Func::Cos { 1 } else { 0 };
            (0..=order)
                .map(|k| &cycle[(k as usize + shift) % 4] * &inv_factorial(k))
                .collect()
        }
        Func::Ln => {
            let a0 = if c.is_exact() && c.is_one() {
                Scalar::zero()
            } else {
                Scalar::approx(cf.ln())
            };
            let mut out = vec![a0];
            let c_inv = c.recip().expect("positive centre");
            let mut c_pow = Scalar::one();
            for k in 1..=order {
                c_pow = &c_pow * &c_inv;
                let sign = if k % 2 == 1 { 1 } else { -1 };
                out.push(&c_pow * &Scalar::ratio(sign, k as i64));
            }
            out
        }
        Func::Sqrt => {
            let root = c.sqrt().expect("non-negative centre");
            if order == 0 {
                return vec![root];
            }
            let c_inv = c.recip().expect("positive centre");
            let mut out = Vec::with_capacity(order as usize + 1);
            // binom(1/2, k) built incrementally: b_k = b_{k-1} (1/2 - (k-1)) / k
            let mut binom = Scalar::one();
            let mut c_pow = Scalar::one();
            for k in 0..=order {
                if k > 0 {
                    let j = k as i64 - 1;
                    binom = &binom * &Scalar::ratio(1 - 2 * j, 2 * k as i64);
                    c_pow = &c_pow * &c_inv;
                }
                out.push(&(&root * &binom) * &c_pow);
            }
            out
        }
        Func::Abs => unreachable!("abs is lifted by sign"),
    }
}

/// Taylor lift of `func` about the standard part of `p` (valuation ≥ 0),
/// accurate to absolute order `target`.
fn taylor_lift(func: Func, p: &LaurentPolynomial, target: i32) -> LaurentPolynomial {
    let c = p.coeff(0);
    let eps = p.sub(&LaurentPolynomial::constant(c.clone()));
    let t = min(target, p.trunc().unwrap_or(i32::MAX));
    if eps.is_exact_zero() {
        let a0 = taylor_coeffs(func, &c, 0).remove(0);
        return LaurentPolynomial::constant(a0);
    }
    if t < 0 {
        return LaurentPolynomial::big_o(t);
    }
    let ve = eps.order_lower_bound().expect("nonzero") as i32;
    let order = (t / ve.max(1)) as u32;
    let mut coeffs = taylor_coeffs(func, &c, order);
    // an irrational value at the centre makes the branch approximate anyway
    let eps = if coeffs[0].is_approximate() {
        coeffs.iter_mut().for_each(|a| *a = a.to_approx());
        eps.scale(&Scalar::approx(1.0))
    } else {
        eps
    };
    let mut acc = LaurentPolynomial::constant(coeffs[order as usize].clone());
    for k in (0..order as usize).rev() {
        acc = acc
            .mul(&eps)
            .truncated(t)
            .add(&LaurentPolynomial::constant(coeffs[k].clone()));
    }
    acc.truncated(t)
}

/// Lifts one branch; `Ok(Err(reason))` asks for a sequence-tier fallback.
fn lift_branch(
    func: Func,
    p: &LaurentPolynomial,
    trunc: i32,
    node: &Expr,
) -> Result<std::result::Result<LaurentPolynomial, FallbackReason>> {
    if func == Func::Abs {
        return Ok(Ok(match p.leading() {
            Some((_, c)) if c.signum() < 0 => p.neg(),
            _ => p.clone(),
        }));
    }
    if p.is_exact_zero() {
        return match func {
            Func::Ln => Err(domain(node)),
            _ => Ok(Ok(taylor_lift(func, p, trunc))),
        };
    }
    let Some((v, lead)) = p.leading() else {
        // only a remainder O(∂^(t+1)) is known
        let t = p.trunc().expect("not exact zero");
        return Ok(match func {
            _ if t < 0 => Err(FallbackReason::UnknownCenter),
            Func::Ln | Func::Sqrt => Err(FallbackReason::CenterOnBoundary),
            _ => Ok(taylor_lift(func, p, trunc)),
        });
    };
    if func == Func::Sqrt && v != 0 {
        if v % 2 != 0 {
            return Ok(Err(FallbackReason::OddValuation));
        }
        if lead.signum() < 0 {
            return Err(domain(node));
        }
        let q = p.shift(-v);
        let r = taylor_lift(Func::Sqrt, &q, trunc - v / 2);
        return Ok(Ok(r.shift(v / 2)));
    }
    if v < 0 {
        return Ok(Err(FallbackReason::InfiniteArgument));
    }
    let c = p.coeff(0);
    match func {
        Func::Ln | Func::Sqrt if c.signum() < 0 => Err(domain(node)),
        Func::Ln if c.signum() == 0 => Ok(Err(FallbackReason::CenterOnBoundary)),
        _ => Ok(Ok(taylor_lift(func, p, trunc))),
    }
}

fn pointwise(func: Func, v: &VirtualNumber) -> VirtualNumber {
    v.map_pointwise(func.name(), move |a| func.apply_guarded(a))
}

fn lift(e: &Expr, ctx: &mut Ctx<'_>) -> Result<VirtualNumber> {
    let t = ctx.trunc;
    Ok(match e {
        Expr::Const(c) => VirtualNumber::real(c.clone()),
        Expr::Var => ctx.alpha.clone().ok_or(Error::FreeVariable)?,
        Expr::Pi => VirtualNumber::real(Scalar::approx(std::f64::consts::PI)),
        Expr::E => VirtualNumber::real(Scalar::approx(std::f64::consts::E)),
        Expr::Inf => VirtualNumber::infty(),
        Expr::Del => VirtualNumber::del(),
        Expr::Alt(u) => lift(u, ctx)?.alternate_sign(),
        Expr::AltNeg(u) => lift(u, ctx)?.alternate_sign_neg(),
        Expr::Neg(u) => -&lift(u, ctx)?,
        Expr::Add(a, b) => &lift(a, ctx)? + &lift(b, ctx)?,
        Expr::Sub(a, b) => &lift(a, ctx)? - &lift(b, ctx)?,
        Expr::Mul(a, b) => &lift(a, ctx)? * &lift(b, ctx)?,
        Expr::Div(a, b) => {
            let (x, y) = (lift(a, ctx)?, lift(b, ctx)?);
            x.div(&y, t).map_err(|err| match err {
                Error::NotInvertible(_) if y.as_real().is_some_and(|r| r.is_zero()) => domain(e),
                other => other,
            })?
        }
        Expr::Pow(u, n) => {
            let x = lift(u, ctx)?;
            x.powi(*n, t).map_err(|err| match err {
                Error::NotInvertible(_) if x.as_real().is_some_and(|r| r.is_zero()) => domain(e),
                other => other,
            })?
        }
        Expr::Call(func, u) => {
            let v = lift(u, ctx)?;
            let Some((even, odd)) = v.branches() else {
                return Ok(pointwise(*func, &v));
            };
            let le = lift_branch(*func, even, t, e)?;
            let lo = if even == odd {
                le.clone()
            } else {
                lift_branch(*func, odd, t, e)?
            };
            match (le, lo) {
                (Ok(pe), Ok(po)) => VirtualNumber::parity(pe, po),
                (Err(reason), _) | (_, Err(reason)) => {
                    ctx.notes.push(Fallback {
                        node: e.to_string(),
                        reason,
                    });
                    pointwise(*func, &v)
                }
            }
        }
        Expr::Patch {
            arg,
            body,
            at,
            value,
        } => {
            let u = lift(arg, ctx)?;
            let hole = LaurentPolynomial::constant(at.clone());
            let on_hole = u.branches().map(|(e, o)| {
                let at_hole = |p: &LaurentPolynomial| -> Option<bool> {
                    let d = p.sub(&hole);
                    if d.is_exact_zero() {
                        Some(true)
                    } else if d.has_no_terms() {
                        None
                    } else {
                        Some(false)
                    }
                };
                (at_hole(e), at_hole(o))
            });
            match on_hole {
                Some((Some(true), Some(true))) => VirtualNumber::real(value.clone()),
                Some((Some(false), Some(false))) => {
                    let mut inner = Ctx {
                        alpha: Some(u),
                        trunc: t,
                        notes: &mut *ctx.notes,
                    };
                    lift(body, &mut inner)?
                }
                mixed => {
                    if mixed.is_some() {
                        ctx.notes.push(Fallback {
                            node: e.to_string(),
                            reason: FallbackReason::MixedPatch,
                        });
                    }
                    let g = u.to_seq();
                    let (body, at, value) = ((**body).clone(), at.to_f64(), value.to_f64());
                    let desc = format!("patch({})", g.description());
                    VirtualNumber::seq(SequenceGen::new(desc, move |n| {
                        let x = g.raw(n)?;
                        if x == at {
                            Ok(value)
                        } else {
                            eval_real(&body, x).map_err(|err| PointFault::Domain(err.to_string()))
                        }
                    }))
                }
            }
        }
    })
}

/// `f(α)`, together with the nodes that had to fall back to the sequence tier.
pub fn extend_apply_traced(
    f: &Expr,
    alpha: &VirtualNumber,
    settings: &Settings,
) -> Result<(VirtualNumber, Vec<Fallback>)> {
    let mut notes = Vec::new();
    let mut ctx = Ctx {
        alpha: Some(alpha.clone()),
        trunc: settings.trunc,
        notes: &mut notes,
    };
    let v = lift(f, &mut ctx)?;
    Ok((v, notes))
}

/// The virtual extension of `f` applied to `α`.
pub fn extend_apply(f: &Expr, alpha: &VirtualNumber, settings: &Settings) -> Result<VirtualNumber> {
    extend_apply_traced(f, alpha, settings).map(|(v, _)| v)
}

/// Value of an expression without `x` (it may use `inf`, `del`, `(+-)`, …).
pub fn eval_virtual(f: &Expr, settings: &Settings) -> Result<VirtualNumber> {
    let mut notes = Vec::new();
    let mut ctx = Ctx {
        alpha: None,
        trunc: settings.trunc,
        notes: &mut notes,
    };
    lift(f, &mut ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_finite, near};
    use crate::realfun::parse_expr;

    fn s() -> Settings {
        Settings::default()
    }

    fn at(src: &str, alpha: &VirtualNumber) -> VirtualNumber {
        extend_apply(&parse_expr(src).unwrap(), alpha, &s()).unwrap()
    }

    fn konst(src: &str) -> VirtualNumber {
        eval_virtual(&parse_expr(src).unwrap(), &s()).unwrap()
    }

    #[test]
    fn sine_of_del_matches_factorial_oracle() {
        let v = at("sin(x)", &VirtualNumber::del());
        let (p, _) = v.branches().unwrap();
        assert_eq!(p.trunc(), Some(16));
        // independent oracle: (-1)^j / (2j+1)! computed with integers
        let mut fact: i64 = 1;
        for k in 1..=16i64 {
            fact *= k;
            let want = if k % 2 == 1 {
                let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
                Scalar::ratio(sign, fact)
            } else {
                Scalar::zero()
            };
            assert_eq!(p.coeff(k as i32), want, "coefficient {k}");
        }
        assert!(p.is_approximate() == false);
    }

    #[test]
    fn short_truncation_display() {
        let v = extend_apply(&parse_expr("sin(x)").unwrap(), &VirtualNumber::del(), &s().with_trunc(4)).unwrap();
        assert_eq!(v.to_string(), "del - del^3/6 + O(del^5)");
    }

    #[test]
    fn sqrt_factors_out_even_powers() {
        let v = konst("sqrt(inf^2 + 1)");
        let (p, _) = v.branches().unwrap();
        assert_eq!(p.coeff(-1), Scalar::one());
        assert_eq!(p.coeff(1), Scalar::ratio(1, 2));
        assert_eq!(p.coeff(3), Scalar::ratio(-1, 8));
        assert_eq!(p.coeff(5), Scalar::ratio(1, 16));
        assert!(near(&v, &VirtualNumber::infty(), &s()).holds());
        assert_eq!(konst("sqrt(4*del^2)").to_string(), "2*del");
    }

    #[test]
    fn infinite_arguments_fall_back() {
        let (v, notes) = extend_apply_traced(
            &parse_expr("sin(x)").unwrap(),
            &VirtualNumber::infty(),
            &s(),
        )
        .unwrap();
        assert!(!v.is_series());
        assert_eq!(notes[0].reason, FallbackReason::InfiniteArgument);
        assert!(is_finite(&v, &s()).holds());
        let (_, notes) = extend_apply_traced(&parse_expr("ln(x)").unwrap(), &VirtualNumber::del(), &s()).unwrap();
        assert_eq!(notes[0].reason, FallbackReason::CenterOnBoundary);
    }

    #[test]
    fn domain_errors() {
        let neg = VirtualNumber::int(-2) + VirtualNumber::del();
        assert!(matches!(
            extend_apply(&parse_expr("ln(x)").unwrap(), &neg, &s()),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            extend_apply(&parse_expr("1/x").unwrap(), &VirtualNumber::zero(), &s()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn exact_coefficients_where_possible() {
        let v = at("ln(x)", &(VirtualNumber::one() + VirtualNumber::del()));
        let (p, _) = v.branches().unwrap();
        assert!(!p.is_approximate());
        assert_eq!(p.coeff(2), Scalar::ratio(-1, 2));
        let w = at("exp(x)", &(VirtualNumber::one() + VirtualNumber::del()));
        assert!(w.is_approximate());
        let (q, _) = w.branches().unwrap();
        assert!((q.coeff(2).to_f64() - std::f64::consts::E / 2.0).abs() < 1e-15);
    }

    #[test]
    fn abs_follows_leading_sign() {
        let m = -VirtualNumber::del();
        assert_eq!(at("abs(x)", &m).to_string(), "del");
        let pm = VirtualNumber::del().alternate_sign();
        assert_eq!(at("abs(x)", &pm).to_string(), "del");
    }

    #[test]
    fn parity_branches_lift_separately() {
        let v = at("sin(x)", &VirtualNumber::del().alternate_sign());
        let (e, o) = v.branches().unwrap();
        assert_eq!(e.neg(), *o);
    }

    #[test]
    fn series_agrees_with_pointwise_evaluation() {
        let f = parse_expr("exp(x)*cos(x) + sqrt(x+2) - ln(x+3)/(x+4)").unwrap();
        let alpha = VirtualNumber::real(Scalar::ratio(1, 2)) + VirtualNumber::del().alternate_sign();
        let v = extend_apply(&f, &alpha, &s()).unwrap();
        assert!(v.is_series());
        for n in [64u64, 65, 1024, 1025, 16384] {
            let lhs = v.sample(n).unwrap();
            let rhs = eval_real(&f, alpha.sample(n).unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "n = {n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn patch_picks_value_at_the_hole() {
        let f = Expr::patch(parse_expr("x^2*sin(1/x)").unwrap(), Scalar::zero(), Scalar::zero());
        assert_eq!(extend_apply(&f, &VirtualNumber::zero(), &s()).unwrap().to_string(), "0");
        let v = extend_apply(&f, &VirtualNumber::del(), &s()).unwrap();
        assert!(!v.is_series());
        let n = 1000u64;
        let want = (n as f64).sin() / (n * n) as f64;
        assert!((v.sample(n).unwrap() - want).abs() < 1e-15);
    }
}
