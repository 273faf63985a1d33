//! Truncated Laurent polynomials in the infinitesimal `del` (written ∂).
//!
//! A polynomial is a finite map `exponent -> coefficient` plus an optional
//! truncation order `T`. Exponent `k` stands for ∂^k, so negative exponents are
//! powers of `inf` = 1/∂. When `T` is present every exponent above it is
//! unknown, i.e. the value is the listed terms plus `O(∂^(T+1))`; when absent
//! the polynomial is exact.

use std::cmp::{max, min};
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i32, Scalar>,
    trunc: Option<i32>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(min(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentPolynomial {
    /// Builds a polynomial, dropping zero coefficients and anything past `trunc`.
    pub fn new(terms: impl IntoIterator<Item = (i32, Scalar)>, trunc: Option<i32>) -> Self {
        let mut map: BTreeMap<i32, Scalar> = BTreeMap::new();
        for (k, c) in terms {
            let slot = map.entry(k).or_insert_with(Scalar::zero);
            *slot = &*slot + &c;
        }
        let mut p = LaurentPolynomial { terms: map, trunc };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        let trunc = self.trunc;
        self.terms
            .retain(|k, c| !c.is_zero() && trunc.map_or(true, |t| *k <= t));
    }

    pub fn zero() -> Self {
        LaurentPolynomial {
            terms: BTreeMap::new(),
            trunc: None,
        }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Scalar, exponent: i32) -> Self {
        Self::new([(exponent, c)], None)
    }

    /// `O(∂^(t+1))`: nothing known below order `t + 1`.
    pub fn big_o(t: i32) -> Self {
        LaurentPolynomial {
            terms: BTreeMap::new(),
            trunc: Some(t),
        }
    }

    pub fn trunc(&self) -> Option<i32> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k: i32) -> Scalar {
        self.terms.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Least exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn leading(&self) -> Option<(i32, &Scalar)> {
        self.terms.iter().next().map(|(k, c)| (*k, c))
    }

    /// No known nonzero term. Exact zero when also [`is_exact`](Self::is_exact).
    pub fn has_no_terms(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    /// Smallest exponent the value can possibly involve; `None` for exact zero.
    pub fn order_lower_bound(&self) -> Option<i64> {
        match (self.valuation(), self.trunc) {
            (Some(v), _) => Some(v as i64),
            (None, Some(t)) => Some(t as i64 + 1),
            (None, None) => None,
        }
    }

    pub fn is_approximate(&self) -> bool {
        self.terms.values().any(Scalar::is_approximate)
    }

    /// Caps the truncation order at `t`.
    pub fn truncated(&self, t: i32) -> Self {
        let trunc = Some(self.trunc.map_or(t, |s| min(s, t)));
        let mut p = LaurentPolynomial {
            terms: self.terms.clone(),
            trunc,
        };
        p.normalize();
        p
    }

    /// Multiplies by ∂^k.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            trunc: self.trunc.map(|t| t + k),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() && s.is_exact() {
            return LaurentPolynomial::zero();
        }
        LaurentPolynomial::new(self.terms.iter().map(|(k, c)| (*k, c * s)), self.trunc)
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = min_opt(self.trunc.map(i64::from), other.trunc.map(i64::from));
        LaurentPolynomial::new(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(k, c)| (*k, c.clone())),
            trunc.map(|t| t as i32),
        )
    }

    pub fn neg(&self) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return LaurentPolynomial::zero();
        }
        let lb_a = self.order_lower_bound();
        let lb_b = other.order_lower_bound();
        let from_a = self
            .trunc
            .and_then(|t| lb_b.map(|lb| lb + t as i64));
        let from_b = other
            .trunc
            .and_then(|t| lb_a.map(|lb| lb + t as i64));
        let trunc = min_opt(from_a, from_b).map(|t| t.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
        let mut out: BTreeMap<i32, Scalar> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k = ka + kb;
                if trunc.map_or(false, |t| k > t) {
                    continue;
                }
                let slot = out.entry(k).or_insert_with(Scalar::zero);
                *slot = &*slot + &(ca * cb);
            }
        }
        let mut p = LaurentPolynomial { terms: out, trunc };
        p.normalize();
        p
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = LaurentPolynomial::constant(Scalar::one());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse, expanded to absolute order `ambient_trunc`
    /// (never dropping the leading term). `None` when no leading term is known.
    pub fn inv(&self, ambient_trunc: i32) -> Option<Self> {
        let (v, c) = self.leading()?;
        let c_inv = c.recip()?;
        if self.is_exact() && self.num_terms() == 1 {
            return Some(LaurentPolynomial::monomial(c_inv, -v));
        }
        // p = c ∂^v (1 + r), val(r) >= 1
        let mut t = max(ambient_trunc as i64, -(v as i64));
        if let Some(tp) = self.trunc {
            t = min(t, tp as i64 - 2 * v as i64);
        }
        let rel = (t + v as i64) as i32;
        let r: Vec<Scalar> = (0..=rel).map(|j| &self.coeff(v + j) * &c_inv).collect();
        let mut s: Vec<Scalar> = Vec::with_capacity(rel as usize + 1);
        s.push(Scalar::one());
        for m in 1..=rel as usize {
            let mut acc = Scalar::zero();
            for j in 1..=m {
                if !r[j].is_zero() {
                    acc = &acc + &(&r[j] * &s[m - j]);
                }
            }
            s.push(-acc);
        }
        let terms = s
            .into_iter()
            .enumerate()
            .map(|(m, sm)| (m as i32 - v, &sm * &c_inv));
        Some(LaurentPolynomial::new(terms, Some(t as i32)))
    }

    /// The known terms as an exact polynomial (drops the remainder).
    pub fn known_part(&self) -> Self {
        LaurentPolynomial {
            terms: self.terms.clone(),
            trunc: None,
        }
    }

    /// Value at ∂ = 1/n.
    pub fn eval_at_index(&self, n: u64) -> f64 {
        let x = n as f64;
        self.terms
            .iter()
            .map(|(k, c)| c.to_f64() * x.powi(-k))
            .sum()
    }

    /// Coefficient-wise equality up to the common truncation order.
    pub fn eq_to_trunc(&self, other: &Self) -> bool {
        self.sub(other).has_no_terms()
    }
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && self.eq_to_trunc(other)
    }
}

pub(crate) fn write_power(f: &mut fmt::Formatter<'_>, k: i32) -> fmt::Result {
    match k {
        0 => Ok(()),
        1 => write!(f, "del"),
        -1 => write!(f, "inf"),
        k if k > 0 => write!(f, "del^{k}"),
        k => write!(f, "inf^{}", -k),
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, k: i32, c: &Scalar, first: bool) -> fmt::Result {
    let neg = c.signum() < 0;
    let mag = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    }
    if k == 0 {
        return write!(f, "{mag}");
    }
    match &mag {
        Scalar::Exact(r) => {
            let (n, d) = (r.numer(), r.denom());
            if !num_traits::One::is_one(n) {
                write!(f, "{n}*")?;
            }
            write_power(f, k)?;
            if !num_traits::One::is_one(d) {
                write!(f, "/{d}")?;
            }
            Ok(())
        }
        Scalar::Approx(_) => {
            write!(f, "{mag}*")?;
            write_power(f, k)
        }
    }
}

/// Normal form: terms by increasing exponent (so `inf` powers first), then
/// the `O(...)` remainder when truncated. Example: `inf^2 + 2 + del^2`.
impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in &self.terms {
            write_term(f, *k, c, first)?;
            first = false;
        }
        if let Some(t) = self.trunc {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(")?;
            if t + 1 == 0 {
                write!(f, "1")?;
            } else {
                write_power(f, t + 1)?;
            }
            write!(f, ")")?;
        } else if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
