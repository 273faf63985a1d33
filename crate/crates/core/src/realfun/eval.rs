use super::{Expr, Func};
use crate::error::{Error, Result};

fn domain(node: &Expr) -> Error {
    Error::Domain {
        node: node.to_string(),
    }
}

fn eval(e: &Expr, x: Option<f64>) -> Result<f64> {
    Ok(match e {
        Expr::Const(c) => c.to_f64(),
        Expr::Var => x.ok_or(Error::FreeVariable)?,
        Expr::Pi => std::f64::consts::PI,
        Expr::E => std::f64::consts::E,
        Expr::Inf | Expr::Del | Expr::Alt(_) | Expr::AltNeg(_) => {
            return Err(Error::NotReal(e.to_string()))
        }
        Expr::Neg(u) => -eval(u, x)?,
        Expr::Add(a, b) => eval(a, x)? + eval(b, x)?,
        Expr::Sub(a, b) => eval(a, x)? - eval(b, x)?,
        Expr::Mul(a, b) => eval(a, x)? * eval(b, x)?,
        Expr::Div(a, b) => {
            let d = eval(b, x)?;
            if d == 0.0 {
                return Err(domain(e));
            }
            eval(a, x)? / d
        }
        Expr::Pow(u, n) => {
            let b = eval(u, x)?;
            if *n < 0 && b == 0.0 {
                return Err(domain(e));
            }
            b.powi(*n)
        }
        Expr::Call(f, u) => {
            let v = eval(u, x)?;
            if f.guard(v).is_some() {
                return Err(domain(e));
            }
            f.apply(v)
        }
        Expr::Patch {
            arg,
            body,
            at,
            value,
        } => {
            let u = eval(arg, x)?;
            if u == at.to_f64() {
                value.to_f64()
            } else {
                eval(body, Some(u))?
            }
        }
    })
}

/// Evaluates at a real point. Virtual constants are rejected with `NotReal`.
pub fn eval_real(f: &Expr, x: f64) -> Result<f64> {
    eval(f, Some(x))
}

/// Evaluates an expression without `x`.
pub fn eval_const(f: &Expr) -> Result<f64> {
    eval(f, None)
}

impl Func {
    /// Evaluation with the domain guard, for pointwise sequence rules.
    pub(crate) fn apply_guarded(self, x: f64) -> std::result::Result<f64, crate::vnum::PointFault> {
        match self.guard(x) {
            Some(reason) => Err(crate::vnum::PointFault::Domain(reason.into())),
            None => Ok(self.apply(x)),
        }
    }
}
