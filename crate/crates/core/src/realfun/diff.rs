//! Symbolic derivative d/dx, with light simplification of 0 and 1 factors.

use super::{Expr, Func};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn as_const(e: &Expr) -> Option<&Scalar> {
    match e {
        Expr::Const(c) => Some(c),
        _ => None,
    }
}

fn is_zero(e: &Expr) -> bool {
    as_const(e).is_some_and(|c| c.is_exact() && c.is_zero())
}

fn is_one(e: &Expr) -> bool {
    as_const(e).is_some_and(|c| c.is_exact() && c.is_one())
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return Expr::Const(x + y);
    }
    a + b
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(u) => *u,
        u => -u,
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return neg(b);
    }
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return Expr::Const(x - y);
    }
    a - b
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return Expr::int(0);
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        return Expr::Const(x * y);
    }
    a * b
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return Expr::int(0);
    }
    if is_one(&b) {
        return a;
    }
    a / b
}

fn pow(u: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::int(1),
        1 => u,
        _ => Expr::Pow(Box::new(u), n),
    }
}

/// d/dx of `f`. `abs` and patched points have no symbolic derivative.
pub fn diff_expr(f: &Expr) -> Result<Expr> {
    Ok(match f {
        Expr::Const(_) | Expr::Pi | Expr::E | Expr::Inf | Expr::Del => Expr::int(0),
        Expr::Var => Expr::int(1),
        Expr::Alt(u) => match diff_expr(u)? {
            d if is_zero(&d) => d,
            d => Expr::Alt(Box::new(d)),
        },
        Expr::AltNeg(u) => match diff_expr(u)? {
            d if is_zero(&d) => d,
            d => Expr::AltNeg(Box::new(d)),
        },
        Expr::Neg(u) => neg(diff_expr(u)?),
        Expr::Add(a, b) => add(diff_expr(a)?, diff_expr(b)?),
        Expr::Sub(a, b) => sub(diff_expr(a)?, diff_expr(b)?),
        Expr::Mul(a, b) => add(
            mul(diff_expr(a)?, (**b).clone()),
            mul((**a).clone(), diff_expr(b)?),
        ),
        Expr::Div(a, b) => {
            let (da, db) = (diff_expr(a)?, diff_expr(b)?);
            if is_zero(&db) {
                div(da, (**b).clone())
            } else {
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), 2),
                )
            }
        }
        Expr::Pow(u, n) => {
            let du = diff_expr(u)?;
            mul(mul(Expr::int(*n as i64), pow((**u).clone(), n - 1)), du)
        }
        Expr::Call(func, u) => {
            let du = diff_expr(u)?;
            let u = (**u).clone();
            let outer = match func {
                Func::Sin => Expr::call(Func::Cos, u),
                Func::Cos => neg(Expr::call(Func::Sin, u)),
                Func::Exp => Expr::call(Func::Exp, u),
                Func::Ln => div(Expr::int(1), u),
                Func::Sqrt => div(Expr::int(1), mul(Expr::int(2), Expr::call(Func::Sqrt, u))),
                Func::Abs => return Err(Error::NonSmoothNode(f.to_string())),
            };
            mul(outer, du)
        }
        Expr::Patch { .. } => return Err(Error::NonSmoothNode(f.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realfun::{eval_real, parse_expr};

    fn d(src: &str) -> String {
        diff_expr(&parse_expr(src).unwrap()).unwrap().to_string()
    }

    #[test]
    fn textbook_rules() {
        assert_eq!(d("sin(x)"), "cos(x)");
        assert_eq!(d("7"), "0");
        assert_eq!(d("x"), "1");
        assert_eq!(d("exp(x)"), "exp(x)");
        assert_eq!(d("x^3"), "3*x^2");
        assert_eq!(d("1/x"), "-1/x^2");
    }

    #[test]
    fn abs_is_rejected() {
        assert!(matches!(
            diff_expr(&parse_expr("abs(x) + 1").unwrap()),
            Err(Error::NonSmoothNode(_))
        ));
    }

    #[test]
    fn matches_central_differences() {
        let h = 1e-6;
        for src in ["sin(x)*exp(x)", "ln(x)/x", "sqrt(x^2 + 1)", "cos(x^2)^3", "x^-2 - 3*x"] {
            let f = parse_expr(src).unwrap();
            let df = diff_expr(&f).unwrap();
            for x in [0.3, 0.9, 1.7] {
                let fd = (eval_real(&f, x + h).unwrap() - eval_real(&f, x - h).unwrap()) / (2.0 * h);
                let sym = eval_real(&df, x).unwrap();
                assert!((fd - sym).abs() < 1e-5, "{src} at {x}: {fd} vs {sym}");
            }
        }
    }
}
