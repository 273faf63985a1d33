//! Real elementary functions of one variable `x`, as expression trees.
//!
//! The same tree is evaluated at reals ([`eval_real`]), differentiated
//! symbolically ([`diff_expr`]) and applied to virtual arguments
//! ([`extend_apply`]). Expressions without `x` double as virtual constants
//! (`inf`, `del`, `(+-)`, …), evaluated by [`eval_virtual`].

mod diff;
mod eval;
mod lift;
mod parse;

use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

pub use diff::diff_expr;
pub use eval::{eval_const, eval_real};
pub use lift::{eval_virtual, extend_apply, extend_apply_traced, Fallback, FallbackReason};
pub use parse::parse_expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Exp, Func::Ln, Func::Sqrt, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
        }
    }

    /// Domain guard: `Some(reason)` when `x` is outside the domain.
    pub fn guard(self, x: f64) -> Option<&'static str> {
        match self {
            Func::Ln if x <= 0.0 => Some("ln of a non-positive number"),
            Func::Sqrt if x < 0.0 => Some("sqrt of a negative number"),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Scalar),
    /// The function variable `x`.
    Var,
    Pi,
    E,
    Inf,
    Del,
    /// `(+-)u`: odd-index values negated.
    Alt(Box<Expr>),
    /// `(-+)u`.
    AltNeg(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
    /// With `u = arg`: `body(u)` when `u ≠ at`, and `value` when `u = at`.
    /// Builds removable-singularity extensions such as x²·sin(1/x) with
    /// f(0) = 0. Not part of the text grammar.
    Patch {
        arg: Box<Expr>,
        body: Arc<Expr>,
        at: Scalar,
        value: Scalar,
    },
}

pub type RealFunction = Expr;

impl Expr {
    pub fn constant(c: Scalar) -> Expr {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Scalar::int(n))
    }

    pub fn x() -> Expr {
        Expr::Var
    }

    pub fn call(f: Func, u: Expr) -> Expr {
        Expr::Call(f, Box::new(u))
    }

    pub fn patch(body: Expr, at: Scalar, value: Scalar) -> Expr {
        Expr::Patch {
            arg: Box::new(Expr::Var),
            body: Arc::new(body),
            at,
            value,
        }
    }

    pub fn has_var(&self) -> bool {
        self.any_node(&|e| matches!(e, Expr::Var))
    }

    /// Contains `inf`, `del` or a sign marker, so it only makes sense virtually.
    pub fn is_virtual(&self) -> bool {
        self.any_node(&|e| matches!(e, Expr::Inf | Expr::Del | Expr::Alt(_) | Expr::AltNeg(_)))
    }

    fn any_node(&self, p: &dyn Fn(&Expr) -> bool) -> bool {
        if p(self) {
            return true;
        }
        match self {
            Expr::Const(_) | Expr::Var | Expr::Pi | Expr::E | Expr::Inf | Expr::Del => false,
            Expr::Alt(u) | Expr::AltNeg(u) | Expr::Neg(u) | Expr::Pow(u, _) | Expr::Call(_, u) => {
                u.any_node(p)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.any_node(p) || b.any_node(p)
            }
            Expr::Patch { arg, body, .. } => arg.any_node(p) || body.any_node(p),
        }
    }

    /// `self ∘ inner`: substitutes `inner` for `x`.
    pub fn compose(&self, inner: &Expr) -> Expr {
        let go = |e: &Expr| Box::new(e.compose(inner));
        match self {
            Expr::Var => inner.clone(),
            Expr::Const(_) | Expr::Pi | Expr::E | Expr::Inf | Expr::Del => self.clone(),
            Expr::Alt(u) => Expr::Alt(go(u)),
            Expr::AltNeg(u) => Expr::AltNeg(go(u)),
            Expr::Neg(u) => Expr::Neg(go(u)),
            Expr::Add(a, b) => Expr::Add(go(a), go(b)),
            Expr::Sub(a, b) => Expr::Sub(go(a), go(b)),
            Expr::Mul(a, b) => Expr::Mul(go(a), go(b)),
            Expr::Div(a, b) => Expr::Div(go(a), go(b)),
            Expr::Pow(u, n) => Expr::Pow(go(u), *n),
            Expr::Call(f, u) => Expr::Call(*f, go(u)),
            Expr::Patch {
                arg,
                body,
                at,
                value,
            } => Expr::Patch {
                arg: go(arg),
                body: body.clone(),
                at: at.clone(),
                value: value.clone(),
            },
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Alt(_) | Expr::AltNeg(_) => 4,
            Expr::Const(c) => {
                if c.signum() < 0 {
                    3
                } else if matches!(c, Scalar::Exact(r) if !num_traits::One::is_one(r.denom())) {
                    2
                } else {
                    5
                }
            }
            _ => 5,
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.prec() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints in the input grammar with the fewest parentheses that re-parse
/// to the same tree. Patches print in a `patch(...)` notation that the
/// parser does not accept.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "x"),
            Expr::Pi => write!(f, "pi"),
            Expr::E => write!(f, "e"),
            Expr::Inf => write!(f, "inf"),
            Expr::Del => write!(f, "del"),
            Expr::Alt(u) => {
                write!(f, "(+-)")?;
                write_at(f, u, 4)
            }
            Expr::AltNeg(u) => {
                write!(f, "(-+)")?;
                write_at(f, u, 4)
            }
            Expr::Neg(u) => {
                write!(f, "-")?;
                write_at(f, u, 3)
            }
            Expr::Add(a, b) => {
                write_at(f, a, 1)?;
                write!(f, " + ")?;
                write_at(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_at(f, a, 1)?;
                write!(f, " - ")?;
                write_at(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_at(f, a, 2)?;
                write!(f, "*")?;
                write_at(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_at(f, a, 2)?;
                write!(f, "/")?;
                write_at(f, b, 3)
            }
            Expr::Pow(u, n) => {
                // `^` does not chain in the grammar
                if matches!(**u, Expr::Pow(..)) {
                    write!(f, "({u})")?;
                } else {
                    write_at(f, u, 5)?;
                }
                write!(f, "^{n}")
            }
            Expr::Call(func, u) => write!(f, "{}({u})", func.name()),
            Expr::Patch {
                arg,
                body,
                at,
                value,
            } => write!(f, "patch({body}; x = {at} -> {value})({arg})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "sin(x)^2 + cos(x)^2",
            "((5 + del)^2 - 25)/del",
            "(2*inf^3 + 4*inf^2 - 1)/(inf^3 - 5)",
            "-x^2",
            "(-3)^2",
            "x*(3/2)",
            "3/2*del",
            "2 - -3",
            "x - (1 - x)",
            "x/(2*x)",
            "(+-)inf + (-+)1",
            "(+-)(del + 1)",
            "x^-2",
            "0.25*x + 1e-7",
            "sqrt(inf^2 + 1)",
            "abs(x) - ln(exp(x))",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            let again = parse_expr(&printed).unwrap_or_else(|err| panic!("{printed}: {err}"));
            assert_eq!(again, e, "{src} -> {printed}");
            assert_eq!(again.to_string(), printed);
        }
    }

    #[test]
    fn compose_substitutes_variable() {
        let f = parse_expr("sin(x)").unwrap();
        let g = parse_expr("x^2 + 1").unwrap();
        assert_eq!(f.compose(&g).to_string(), "sin(x^2 + 1)");
    }
}
