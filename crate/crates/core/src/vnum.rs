//! Virtual numbers: classes of real sequences identified up to agreement at
//! all but finitely many indices.
//!
//! Two carriers are used. The series tier stores one truncated Laurent
//! polynomial in ∂ = ⟨1, 1/2, 1/3, …⟩ per index parity, which covers every
//! ∂-expansion plus the `±`/`∓` constructs; relations on it are decided
//! exactly from leading terms. The sequence tier stores a pure index rule and
//! decides relations by sampling, so its verdicts may be `UnknownAtDepth`.
//! Mixing the tiers coerces series values into sequences, never the reverse.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::scalar::{Scalar, APPROX_TOL};
use crate::settings::{Schedule, Settings};
use crate::verdict::{Decision, Verdict};

/// Why a sequence has no value at some index.
#[derive(Clone, Debug, PartialEq)]
pub enum PointFault {
    Zero,
    Domain(String),
}

pub type SeqRule = Arc<dyn Fn(u64) -> std::result::Result<f64, PointFault> + Send + Sync>;

/// A deterministic index rule `n -> a_n` (n ≥ 1). Rules must be pure.
#[derive(Clone)]
pub struct SequenceGen {
    rule: SeqRule,
    description: String,
}

impl SequenceGen {
    pub fn new<F>(description: impl Into<String>, rule: F) -> Self
    where
        F: Fn(u64) -> std::result::Result<f64, PointFault> + Send + Sync + 'static,
    {
        SequenceGen {
            rule: Arc::new(rule),
            description: description.into(),
        }
    }

    /// A rule that is defined everywhere.
    pub fn total<F>(description: impl Into<String>, rule: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        Self::new(description, move |n| Ok(rule(n)))
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn at(&self, n: u64) -> Result<f64> {
        assert!(n >= 1, "sequence indices start at 1");
        (self.rule)(n).map_err(|fault| match fault {
            PointFault::Zero => Error::PointwiseZero { index: n },
            PointFault::Domain(reason) => Error::PointUndefined { index: n, reason },
        })
    }

    pub(crate) fn raw(&self, n: u64) -> std::result::Result<f64, PointFault> {
        (self.rule)(n)
    }
}

impl fmt::Debug for SequenceGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SequenceGen({})", self.description)
    }
}

#[derive(Clone, Debug)]
pub enum VirtualNumber {
    /// Values at even and odd indices; parity-free values have equal branches.
    Series {
        even: LaurentPolynomial,
        odd: LaurentPolynomial,
    },
    Seq(SequenceGen),
}

/// Extended ("barred") relations between virtual numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    /// `Between(a, b, c)`: b lies between a and c at (almost) every index.
    Between,
}

impl Relation {
    pub fn arity(self) -> usize {
        if self == Relation::Between {
            3
        } else {
            2
        }
    }

    fn on_reals(self, v: &[f64]) -> bool {
        let scale = |a: f64, b: f64| APPROX_TOL * 1f64.max(a.abs()).max(b.abs());
        let cmp = |a: f64, b: f64| -> i32 {
            let d = b - a;
            if d.abs() <= scale(a, b) {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        };
        match self {
            Relation::Between => {
                let (s1, s2) = (cmp(v[0], v[1]), cmp(v[1], v[2]));
                (s1 >= 0 && s2 >= 0) || (s1 <= 0 && s2 <= 0)
            }
            _ => self.from_sign(cmp(v[0], v[1])),
        }
    }

    /// Truth of the binary relation given sign(b - a).
    fn from_sign(self, s: i32) -> bool {
        match self {
            Relation::Eq => s == 0,
            Relation::Neq => s != 0,
            Relation::Lt => s > 0,
            Relation::Le => s >= 0,
            Relation::Gt => s < 0,
            Relation::Ge => s <= 0,
            Relation::Between => unreachable!("ternary"),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "eq",
            Relation::Neq => "neq",
            Relation::Lt => "lt",
            Relation::Le => "le",
            Relation::Gt => "gt",
            Relation::Ge => "ge",
            Relation::Between => "between",
        })
    }
}

/// Eventual sign of a branch: `None` when nothing is known below the truncation.
pub(crate) fn branch_sign(p: &LaurentPolynomial) -> Option<i32> {
    match p.leading() {
        Some((_, c)) => Some(c.signum()),
        None if p.is_exact() => Some(0),
        None => None,
    }
}

impl VirtualNumber {
    pub fn series(p: LaurentPolynomial) -> Self {
        VirtualNumber::Series {
            even: p.clone(),
            odd: p,
        }
    }

    pub fn parity(even: LaurentPolynomial, odd: LaurentPolynomial) -> Self {
        VirtualNumber::Series { even, odd }
    }

    pub fn seq(gen: SequenceGen) -> Self {
        VirtualNumber::Seq(gen)
    }

    /// Embeds a real constant.
    pub fn real(x: Scalar) -> Self {
        Self::series(LaurentPolynomial::constant(x))
    }

    pub fn int(n: i64) -> Self {
        Self::real(Scalar::int(n))
    }

    pub fn zero() -> Self {
        Self::series(LaurentPolynomial::zero())
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// ∞ = ⟨1, 2, 3, …⟩.
    pub fn infty() -> Self {
        Self::series(LaurentPolynomial::monomial(Scalar::one(), -1))
    }

    /// ∂ = 1/∞ = ⟨1, 1/2, 1/3, …⟩.
    pub fn del() -> Self {
        Self::series(LaurentPolynomial::monomial(Scalar::one(), 1))
    }

    /// `c·∂^k` for any integer k.
    pub fn monomial(c: Scalar, k: i32) -> Self {
        Self::series(LaurentPolynomial::monomial(c, k))
    }

    pub fn is_series(&self) -> bool {
        matches!(self, VirtualNumber::Series { .. })
    }

    pub fn branches(&self) -> Option<(&LaurentPolynomial, &LaurentPolynomial)> {
        match self {
            VirtualNumber::Series { even, odd } => Some((even, odd)),
            VirtualNumber::Seq(_) => None,
        }
    }

    /// Both branches equal, i.e. an ordinary ∂-expansion.
    pub fn is_parity_free(&self) -> bool {
        match self {
            VirtualNumber::Series { even, odd } => even == odd,
            VirtualNumber::Seq(_) => false,
        }
    }

    pub fn is_approximate(&self) -> bool {
        match self {
            VirtualNumber::Series { even, odd } => even.is_approximate() || odd.is_approximate(),
            VirtualNumber::Seq(_) => true,
        }
    }

    /// The real value when this is a plain real constant on the series tier.
    pub fn as_real(&self) -> Option<Scalar> {
        let (even, odd) = self.branches()?;
        if even != odd || !even.is_exact() {
            return None;
        }
        match even.num_terms() {
            0 => Some(Scalar::zero()),
            1 if even.valuation() == Some(0) => Some(even.coeff(0)),
            _ => None,
        }
    }

    fn map_branches(&self, f: impl Fn(&LaurentPolynomial) -> LaurentPolynomial) -> Option<Self> {
        self.branches().map(|(e, o)| VirtualNumber::Series {
            even: f(e),
            odd: f(o),
        })
    }

    /// Value of the representative sequence at index `n` (∂ = 1/n on the
    /// branch matching the parity of `n`).
    pub fn sample(&self, n: u64) -> Result<f64> {
        match self {
            VirtualNumber::Series { even, odd } => {
                assert!(n >= 1, "sequence indices start at 1");
                Ok(if n % 2 == 0 { even } else { odd }.eval_at_index(n))
            }
            VirtualNumber::Seq(g) => g.at(n),
        }
    }

    pub(crate) fn sample_raw(&self, n: u64) -> std::result::Result<f64, PointFault> {
        match self {
            VirtualNumber::Series { even, odd } => {
                Ok(if n % 2 == 0 { even } else { odd }.eval_at_index(n))
            }
            VirtualNumber::Seq(g) => g.raw(n),
        }
    }

    /// Coerces to the sequence tier (total for series values).
    pub fn to_seq(&self) -> SequenceGen {
        match self {
            VirtualNumber::Seq(g) => g.clone(),
            VirtualNumber::Series { .. } => {
                let this = self.clone();
                SequenceGen::new(this.to_string(), move |n| this.sample_raw(n))
            }
        }
    }

    fn seq_binary(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(f64, f64) -> std::result::Result<f64, PointFault> + Send + Sync + 'static,
    ) -> Self {
        let (a, b) = (self.to_seq(), other.to_seq());
        let desc = format!("({}) {} ({})", a.description(), op, b.description());
        VirtualNumber::Seq(SequenceGen::new(desc, move |n| f(a.raw(n)?, b.raw(n)?)))
    }

    /// Applies a real function pointwise, producing a sequence-tier value.
    pub fn map_pointwise(
        &self,
        name: &str,
        f: impl Fn(f64) -> std::result::Result<f64, PointFault> + Send + Sync + 'static,
    ) -> Self {
        let a = self.to_seq();
        let desc = format!("{}({})", name, a.description());
        VirtualNumber::Seq(SequenceGen::new(desc, move |n| f(a.raw(n)?)))
    }

    /// `±α`: values at odd indices negated, even indices kept.
    pub fn alternate_sign(&self) -> Self {
        match self {
            VirtualNumber::Series { even, odd } => VirtualNumber::Series {
                even: even.clone(),
                odd: odd.neg(),
            },
            VirtualNumber::Seq(g) => {
                let g = g.clone();
                let desc = format!("(+-)({})", g.description());
                VirtualNumber::Seq(SequenceGen::new(desc, move |n| {
                    let v = g.raw(n)?;
                    Ok(if n % 2 == 1 { -v } else { v })
                }))
            }
        }
    }

    /// `∓α = -(±α)`.
    pub fn alternate_sign_neg(&self) -> Self {
        -self.alternate_sign()
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (
                VirtualNumber::Series { even: e1, odd: o1 },
                VirtualNumber::Series { even: e2, odd: o2 },
            ) => VirtualNumber::Series {
                even: e1.add(e2),
                odd: o1.add(o2),
            },
            _ => self.seq_binary(other, "+", |a, b| Ok(a + b)),
        }
    }

    pub fn neg(&self) -> Self {
        self.map_branches(LaurentPolynomial::neg)
            .unwrap_or_else(|| self.map_pointwise("-", |a| Ok(-a)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        match (self, other) {
            (VirtualNumber::Series { .. }, VirtualNumber::Series { .. }) => self.add(&other.neg()),
            _ => self.seq_binary(other, "-", |a, b| Ok(a - b)),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (
                VirtualNumber::Series { even: e1, odd: o1 },
                VirtualNumber::Series { even: e2, odd: o2 },
            ) => VirtualNumber::Series {
                even: e1.mul(e2),
                odd: o1.mul(o2),
            },
            _ => self.seq_binary(other, "*", |a, b| Ok(a * b)),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.mul(&VirtualNumber::real(s.clone()))
    }

    /// Multiplicative inverse. Series values need a known nonzero leading term
    /// on both branches; sequence values are inverted pointwise, and a zero
    /// met while sampling surfaces as [`Error::PointwiseZero`] then.
    pub fn inv(&self, trunc: i32) -> Result<Self> {
        match self {
            VirtualNumber::Series { even, odd } => {
                let inv_branch = |p: &LaurentPolynomial, which: &str| {
                    p.inv(trunc).ok_or_else(|| {
                        if p.is_exact_zero() {
                            Error::NotInvertible(format!("{which} branch is zero"))
                        } else {
                            Error::NotInvertible(format!(
                                "{which} branch vanishes up to truncation ({p})"
                            ))
                        }
                    })
                };
                let e = inv_branch(even, "even")?;
                let o = if even == odd { e.clone() } else { inv_branch(odd, "odd")? };
                Ok(VirtualNumber::Series { even: e, odd: o })
            }
            VirtualNumber::Seq(_) => Ok(self.map_pointwise("1/", |a| {
                if a == 0.0 {
                    Err(PointFault::Zero)
                } else {
                    Ok(1.0 / a)
                }
            })),
        }
    }

    pub fn div(&self, other: &Self, trunc: i32) -> Result<Self> {
        match (self, other) {
            (VirtualNumber::Series { .. }, VirtualNumber::Series { .. }) => {
                Ok(self.mul(&other.inv(trunc)?))
            }
            _ => Ok(self.seq_binary(other, "/", |a, b| {
                if b == 0.0 {
                    Err(PointFault::Zero)
                } else {
                    Ok(a / b)
                }
            })),
        }
    }

    pub fn powi(&self, n: i32, trunc: i32) -> Result<Self> {
        if n < 0 {
            return self.inv(trunc)?.powi(-n, trunc);
        }
        Ok(match self {
            VirtualNumber::Series { even, odd } => VirtualNumber::Series {
                even: even.powi(n as u32),
                odd: if even == odd {
                    even.powi(n as u32)
                } else {
                    odd.powi(n as u32)
                },
            },
            VirtualNumber::Seq(_) => self.map_pointwise(&format!("^{n}"), move |a| Ok(a.powi(n))),
        })
    }

    /// Equality on the series tier, modulo each branch's truncation.
    pub fn series_eq(&self, other: &Self) -> bool {
        match (self.branches(), other.branches()) {
            (Some((e1, o1)), Some((e2, o2))) => e1.eq_to_trunc(e2) && o1.eq_to_trunc(o2),
            _ => false,
        }
    }
}

/// Decides an extended relation under eventual (cofinite) semantics.
///
/// Series values are decided exactly: each parity branch of every difference
/// has an eventually constant sign, so the relation is eventually true or
/// eventually false on each branch. Sequence values are sampled on the
/// schedule, escalating depth while the tail is inconclusive.
pub fn rel_ext(rel: Relation, args: &[&VirtualNumber], settings: &Settings) -> Result<Decision> {
    if args.len() != rel.arity() {
        return Err(Error::Arity {
            rel: rel.to_string(),
            expected: rel.arity(),
            got: args.len(),
        });
    }
    if args.iter().all(|a| a.is_series()) {
        return Ok(rel_series(rel, args));
    }
    Ok(escalate(settings, |sched| rel_sampled(rel, args, sched)))
}

fn rel_series(rel: Relation, args: &[&VirtualNumber]) -> Decision {
    let branch = |pick: fn(&VirtualNumber) -> &LaurentPolynomial| -> Option<bool> {
        let ps: Vec<&LaurentPolynomial> = args.iter().map(|a| pick(a)).collect();
        match rel {
            Relation::Between => {
                let s1 = branch_sign(&ps[1].sub(ps[0]))?;
                let s2 = branch_sign(&ps[2].sub(ps[1]))?;
                Some((s1 >= 0 && s2 >= 0) || (s1 <= 0 && s2 <= 0))
            }
            _ => Some(rel.from_sign(branch_sign(&ps[1].sub(ps[0]))?)),
        }
    };
    let even = branch(|v| v.branches().expect("series").0);
    let odd = branch(|v| v.branches().expect("series").1);
    let verdict = match (even, odd) {
        (Some(true), Some(true)) => Verdict::Holds,
        (Some(false), _) | (_, Some(false)) => Verdict::Fails,
        _ => Verdict::UnknownAtDepth,
    };
    Decision::exact(verdict)
}

/// Number of trailing schedule points inspected by sampled relations.
const RELATION_TAIL: usize = 8;

fn rel_sampled(rel: Relation, args: &[&VirtualNumber], sched: &Schedule) -> Decision {
    let tail = sched.tail(RELATION_TAIL);
    let mut truth: Vec<(u64, Option<bool>)> = Vec::with_capacity(tail.len());
    for &n in tail {
        let vals: std::result::Result<Vec<f64>, _> = args.iter().map(|a| a.sample_raw(n)).collect();
        truth.push((n, vals.ok().map(|v| rel.on_reals(&v))));
    }
    let depth = sched.max_index();
    let witness = truth
        .iter()
        .rev()
        .find(|(_, t)| *t == Some(false))
        .map(|(n, _)| *n);
    if truth.iter().all(|(_, t)| *t == Some(true)) {
        return Decision::sampled(Verdict::Holds, depth, None);
    }
    // Persistent failure on one parity class: false at its last two indices.
    let persistent = [0u64, 1].iter().any(|parity| {
        let last_two: Vec<Option<bool>> = truth
            .iter()
            .rev()
            .filter(|(n, _)| n % 2 == *parity)
            .take(2)
            .map(|(_, t)| *t)
            .collect();
        last_two.len() == 2 && last_two.iter().all(|t| *t == Some(false))
    });
    let verdict = if persistent {
        Verdict::Fails
    } else {
        Verdict::UnknownAtDepth
    };
    Decision::sampled(verdict, depth, witness)
}

/// Re-runs a sampled decision on deeper schedules while it is inconclusive.
pub(crate) fn escalate(settings: &Settings, mut decide: impl FnMut(&Schedule) -> Decision) -> Decision {
    let mut last = None;
    for d in settings.depth_ladder() {
        let dec = decide(&Schedule::new(d));
        if !dec.verdict.is_unknown() {
            return dec;
        }
        last = Some(dec);
    }
    last.expect("depth ladder is never empty")
}

impl Add for &VirtualNumber {
    type Output = VirtualNumber;
    fn add(self, rhs: &VirtualNumber) -> VirtualNumber {
        VirtualNumber::add(self, rhs)
    }
}

impl Sub for &VirtualNumber {
    type Output = VirtualNumber;
    fn sub(self, rhs: &VirtualNumber) -> VirtualNumber {
        VirtualNumber::sub(self, rhs)
    }
}

impl Mul for &VirtualNumber {
    type Output = VirtualNumber;
    fn mul(self, rhs: &VirtualNumber) -> VirtualNumber {
        VirtualNumber::mul(self, rhs)
    }
}

impl Neg for &VirtualNumber {
    type Output = VirtualNumber;
    fn neg(self) -> VirtualNumber {
        VirtualNumber::neg(self)
    }
}

impl Add for VirtualNumber {
    type Output = VirtualNumber;
    fn add(self, rhs: VirtualNumber) -> VirtualNumber {
        VirtualNumber::add(&self, &rhs)
    }
}

impl Sub for VirtualNumber {
    type Output = VirtualNumber;
    fn sub(self, rhs: VirtualNumber) -> VirtualNumber {
        VirtualNumber::sub(&self, &rhs)
    }
}

impl Mul for VirtualNumber {
    type Output = VirtualNumber;
    fn mul(self, rhs: VirtualNumber) -> VirtualNumber {
        VirtualNumber::mul(&self, &rhs)
    }
}

impl Neg for VirtualNumber {
    type Output = VirtualNumber;
    fn neg(self) -> VirtualNumber {
        VirtualNumber::neg(&self)
    }
}

impl From<i64> for VirtualNumber {
    fn from(n: i64) -> Self {
        VirtualNumber::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> Settings {
        Settings::default()
    }
    fn inf() -> VirtualNumber {
        VirtualNumber::infty()
    }
    fn del() -> VirtualNumber {
        VirtualNumber::del()
    }
    fn n(k: i64) -> VirtualNumber {
        VirtualNumber::int(k)
    }
    fn pm1() -> VirtualNumber {
        n(1).alternate_sign()
    }

    #[test]
    fn del_times_inf_is_one() {
        assert!((&del() * &inf()).series_eq(&n(1)));
    }

    #[test]
    fn square_of_inf_plus_del() {
        let a = &inf() + &del();
        let lhs = &a * &a;
        let rhs = &(&(&inf() * &inf()) + &n(2)) + &(&del() * &del());
        assert!(lhs.series_eq(&rhs));
    }

    #[test]
    fn alternate_sign_branches_and_involution() {
        let (e, o) = pm1().branches().map(|(e, o)| (e.clone(), o.clone())).unwrap();
        assert_eq!(e.coeff(0), Scalar::one());
        assert_eq!(o.coeff(0), Scalar::int(-1));
        assert!(pm1().alternate_sign().series_eq(&n(1)));
        let sum = &pm1() + &n(1).alternate_sign_neg();
        assert!(sum.series_eq(&VirtualNumber::zero()));
    }

    #[test]
    fn inverse_cases() {
        assert!(inf().inv(16).unwrap().series_eq(&del()));
        assert!(matches!(VirtualNumber::zero().inv(16), Err(Error::NotInvertible(_))));
        assert!(pm1().inv(16).unwrap().series_eq(&pm1()));
    }

    #[test]
    fn samples() {
        assert_eq!(del().sample(4).unwrap(), 0.25);
        assert_eq!((&inf() * &inf()).sample(3).unwrap(), 9.0);
        assert_eq!(pm1().sample(3).unwrap(), -1.0);
        assert_eq!(pm1().sample(4).unwrap(), 1.0);
    }

    #[test]
    fn barred_relations_from_section_two() {
        let two = n(2);
        let lt = rel_ext(Relation::Lt, &[&(&two - &del()), &two], &s()).unwrap();
        assert_eq!(lt.verdict, Verdict::Holds);
        let gt = rel_ext(Relation::Gt, &[&(&inf() + &n(1)), &inf()], &s()).unwrap();
        assert_eq!(gt.verdict, Verdict::Holds);
        let le = rel_ext(Relation::Le, &[&pm1(), &VirtualNumber::zero()], &s()).unwrap();
        assert_eq!(le.verdict, Verdict::Fails);
        let mp1 = n(1).alternate_sign_neg();
        let btw = rel_ext(Relation::Between, &[&pm1(), &VirtualNumber::zero(), &mp1], &s()).unwrap();
        assert_eq!(btw.verdict, Verdict::Holds);
        assert_eq!(btw.depth, 0);
    }

    #[test]
    fn sampled_relations() {
        let seq_pm1 = VirtualNumber::seq(pm1().to_seq());
        let le = rel_ext(Relation::Le, &[&seq_pm1, &VirtualNumber::zero()], &s()).unwrap();
        assert_eq!(le.verdict, Verdict::Fails);
        assert!(le.witness.is_some());
        let seq_del = VirtualNumber::seq(del().to_seq());
        let lt = rel_ext(Relation::Lt, &[&VirtualNumber::zero(), &seq_del], &s()).unwrap();
        assert_eq!(lt.verdict, Verdict::Holds);
        assert_eq!(lt.depth, (1 << 14) + 1);
    }

    #[test]
    fn arity_is_checked() {
        assert!(matches!(
            rel_ext(Relation::Between, &[&n(1), &n(2)], &s()),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn mixed_tier_coerces_to_sequence() {
        let seq = VirtualNumber::seq(SequenceGen::total("n", |n| n as f64));
        let sum = &seq + &del();
        assert!(!sum.is_series());
        assert_eq!(sum.sample(4).unwrap(), 4.25);
    }

    #[test]
    fn pointwise_zero_reported_at_sampling() {
        let seq = VirtualNumber::seq(SequenceGen::total("n-1", |n| n as f64 - 1.0));
        let inv = seq.inv(16).unwrap();
        assert!(matches!(inv.sample(1), Err(Error::PointwiseZero { index: 1 })));
        assert_eq!(inv.sample(3).unwrap(), 0.5);
    }
}
