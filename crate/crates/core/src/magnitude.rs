//! Relative finitude: `β ∈ O(α)` when `β/α` is finite, `γ ≪ α` when `γ/α`
//! is infinitesimal, and the leading-order comparison built on them.

use serde::Serialize;

use crate::classify::{is_finite, is_infinitesimal};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::settings::Settings;
use crate::verdict::{Decision, Verdict};
use crate::vnum::{rel_ext, Relation, VirtualNumber};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderProfile {
    pub valuation_even: Option<i32>,
    pub valuation_odd: Option<i32>,
    /// Leading coefficients (even, odd); zero for a zero branch.
    #[serde(serialize_with = "ser_pair")]
    pub leading_coeffs: (Scalar, Scalar),
}

fn ser_pair<S: serde::Serializer>(p: &(Scalar, Scalar), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&p.0.to_string())?;
    t.serialize_element(&p.1.to_string())?;
    t.end()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Magnitude {
    Smaller,
    SameOrder,
    Larger,
    Incomparable,
}

fn require_invertible(a: &VirtualNumber, settings: &Settings) -> Result<()> {
    let d = rel_ext(Relation::Neq, &[a, &VirtualNumber::zero()], settings)?;
    if d.holds() {
        Ok(())
    } else {
        Err(Error::NotInvertible(format!("{a} is not eventually nonzero ({})", d.verdict)))
    }
}

fn quotient(b: &VirtualNumber, a: &VirtualNumber, settings: &Settings) -> Result<VirtualNumber> {
    require_invertible(a, settings)?;
    b.div(a, settings.trunc)
}

/// `β ∈ O(α)`.
pub fn in_order_of(b: &VirtualNumber, a: &VirtualNumber, settings: &Settings) -> Result<Decision> {
    Ok(is_finite(&quotient(b, a, settings)?, settings))
}

/// `γ ≪ α`.
pub fn negligible(g: &VirtualNumber, a: &VirtualNumber, settings: &Settings) -> Result<Decision> {
    Ok(is_infinitesimal(&quotient(g, a, settings)?, settings))
}

pub fn leading_order(a: &VirtualNumber) -> Result<OrderProfile> {
    let (e, o) = a
        .branches()
        .ok_or_else(|| Error::InvalidArgument("leading order needs a series value".into()))?;
    let lead = |p: &crate::laurent::LaurentPolynomial| match p.leading() {
        Some((v, c)) => (Some(v), c.clone()),
        None => (None, Scalar::zero()),
    };
    let ((ve, ce), (vo, co)) = (lead(e), lead(o));
    Ok(OrderProfile {
        valuation_even: ve,
        valuation_odd: vo,
        leading_coeffs: (ce, co),
    })
}

/// Compares `ε` with `δ` through the quotient `ε/δ` and its inverse.
pub fn compare_magnitude(
    e: &VirtualNumber,
    d: &VirtualNumber,
    settings: &Settings,
) -> Result<(Magnitude, Decision)> {
    require_invertible(e, settings)?;
    let q = quotient(e, d, settings)?;
    let q_inv = quotient(d, e, settings)?;
    let small = is_infinitesimal(&q, settings);
    if small.holds() {
        return Ok((Magnitude::Smaller, small));
    }
    let large = is_infinitesimal(&q_inv, settings);
    if large.holds() {
        return Ok((Magnitude::Larger, large));
    }
    let same = is_finite(&q, settings).and(is_finite(&q_inv, settings));
    if same.holds() {
        return Ok((Magnitude::SameOrder, same));
    }
    let all = small.and(large).and(same);
    let verdict = if [small, large, same].iter().all(|x| x.fails()) {
        Verdict::Holds
    } else {
        Verdict::UnknownAtDepth
    };
    Ok((Magnitude::Incomparable, Decision { verdict, ..all }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realfun::{extend_apply, parse_expr};

    fn s() -> Settings {
        Settings::default()
    }
    fn del() -> VirtualNumber {
        VirtualNumber::del()
    }

    #[test]
    fn order_of_examples() {
        let sin_del = extend_apply(&parse_expr("sin(x)").unwrap(), &del(), &s()).unwrap();
        assert!(in_order_of(&sin_del, &del(), &s()).unwrap().holds());
        assert!(in_order_of(&del(), &(&del() * &del()), &s()).unwrap().fails());
        assert!(in_order_of(&del(), &del(), &s()).unwrap().holds());
        assert!(matches!(
            in_order_of(&del(), &VirtualNumber::zero(), &s()),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn negligibility_examples() {
        assert!(negligible(&(&del() * &del()), &del(), &s()).unwrap().holds());
        assert!(negligible(&VirtualNumber::int(7), &VirtualNumber::infty(), &s()).unwrap().holds());
        assert!(negligible(&del(), &del(), &s()).unwrap().fails());
    }

    #[test]
    fn leading_orders() {
        let p = &(&del() * &del()) - &VirtualNumber::monomial(Scalar::int(3), 5);
        let prof = leading_order(&p).unwrap();
        assert_eq!((prof.valuation_even, prof.valuation_odd), (Some(2), Some(2)));
        assert_eq!(prof.leading_coeffs.0, Scalar::one());
        let pm = leading_order(&del().alternate_sign()).unwrap();
        assert_eq!(pm.leading_coeffs, (Scalar::one(), Scalar::int(-1)));
    }

    #[test]
    fn magnitude_comparisons() {
        let sin_del = extend_apply(&parse_expr("sin(x)").unwrap(), &del(), &s()).unwrap();
        let sq = &del() * &del();
        assert_eq!(compare_magnitude(&sq, &del(), &s()).unwrap().0, Magnitude::Smaller);
        assert_eq!(compare_magnitude(&del(), &sq, &s()).unwrap().0, Magnitude::Larger);
        assert_eq!(compare_magnitude(&sin_del, &del(), &s()).unwrap().0, Magnitude::SameOrder);
        assert_eq!(
            compare_magnitude(&del().alternate_sign(), &del(), &s()).unwrap().0,
            Magnitude::SameOrder
        );
        // ∂ on even indices, ∂² on odd ones: neither finite-stable nor infinite-stable
        let mixed = VirtualNumber::parity(
            crate::laurent::LaurentPolynomial::monomial(Scalar::one(), 1),
            crate::laurent::LaurentPolynomial::monomial(Scalar::one(), 2),
        );
        assert_eq!(compare_magnitude(&mixed, &del(), &s()).unwrap().0, Magnitude::Incomparable);
    }
}
