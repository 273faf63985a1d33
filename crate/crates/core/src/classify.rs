//! Absolute finitude, proximity, neighbourliness and standard parts.
//!
//! On the series tier every predicate is decided exactly from the branch
//! valuations. On the sequence tier the predicates are calibrated tail
//! heuristics over the sampling schedule, re-run on deeper schedules while
//! inconclusive; the thresholds are the `pub const`s below.

use serde::Serialize;

use crate::domain::DomainDescriptor;
use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;
use crate::scalar::Scalar;
use crate::settings::{Schedule, Settings};
use crate::verdict::{Decision, Verdict};
use crate::vnum::{escalate, rel_ext, Relation, VirtualNumber};

/// Infinitesimal: final |sample| must fall below this (with a decreasing tail).
pub const DECAY_CEILING: f64 = 1e-6;
/// Not infinitesimal: the tail stays above this.
pub const PERSIST_FLOOR: f64 = 1e-3;
/// Envelope ratio per doubling of the index. Shrinking by at least this much
/// twice in a row reads as power-law decay (infinitesimal); keeping more than
/// this much of a tail above [`PERSIST_FLOOR`] reads as not infinitesimal.
pub const DECAY_RATE: f64 = 0.75;
/// Samples at or below this are treated as zero.
pub const ZERO_FLOOR: f64 = 1e-12;
/// Infinite: the tail exceeds this and keeps growing.
pub const GROWTH_CEILING: f64 = 1e9;
/// Standard part: last five samples within this of their mean.
pub const STD_SPREAD: f64 = 1e-6;
/// Standard part: mean drift between the two final windows.
pub const STD_DRIFT: f64 = 1e-8;

const TAIL: usize = 4;
const DECAY_TAIL: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FinitudeClass {
    Infinitesimal,
    FiniteNonInfinitesimal,
    InfiniteAboveR,
    InfiniteBelowR,
    InfiniteOscillating,
}

impl FinitudeClass {
    pub fn is_finite(self) -> bool {
        matches!(self, FinitudeClass::Infinitesimal | FinitudeClass::FiniteNonInfinitesimal)
    }
}

/// Flat classification record; `tag` is `None` when the verdict is unknown.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub tag: Option<FinitudeClass>,
    pub verdict: Verdict,
    pub depth: u64,
    pub witness: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RealsSide {
    AboveR,
    BelowR,
    Neither,
}

/// Decay test on the absolute values of a tail, oldest first. The last six
/// values are read as three pairs (the schedule's `2^k, 2^k+1`, or three
/// refinement steps); each pair contributes its maximum as an envelope.
pub(crate) fn decay_verdict(tail: &[f64], floor: f64) -> Verdict {
    if tail.len() < DECAY_TAIL || tail.iter().any(|v| !v.is_finite()) {
        return Verdict::UnknownAtDepth;
    }
    let t = &tail[tail.len() - DECAY_TAIL..];
    if t.iter().all(|v| *v <= floor) {
        return Verdict::Holds;
    }
    let env: Vec<f64> = t.chunks(2).map(|p| p[0].max(p[1])).collect();
    let (e0, e1, e2) = (env[0], env[1], env[2]);
    let last = t[DECAY_TAIL - 1];
    if (e2 < e1 || e2 <= floor) && last < DECAY_CEILING {
        return Verdict::Holds;
    }
    if e1 <= DECAY_RATE * e0 && e2 <= DECAY_RATE * e1 {
        return Verdict::Holds;
    }
    if e2 > DECAY_RATE * e1 && t.iter().all(|v| *v > PERSIST_FLOOR) {
        return Verdict::Fails;
    }
    Verdict::UnknownAtDepth
}

/// Absolute samples at the given indices; `None` if any point is undefined.
fn abs_samples(a: &VirtualNumber, idx: &[u64]) -> Option<Vec<f64>> {
    idx.iter()
        .map(|&n| a.sample_raw(n).ok().map(f64::abs))
        .collect()
}

fn branch_val_at_least(p: &LaurentPolynomial, k: i32) -> Option<bool> {
    match p.leading() {
        Some((v, _)) => Some(v >= k),
        None => match p.trunc() {
            None => Some(true),
            Some(t) if t + 1 >= k => Some(true),
            Some(_) => None,
        },
    }
}

fn series_val_at_least(a: &VirtualNumber, k: i32) -> Option<Decision> {
    let (e, o) = a.branches()?;
    let verdict = match (branch_val_at_least(e, k), branch_val_at_least(o, k)) {
        (Some(true), Some(true)) => Verdict::Holds,
        (Some(false), _) | (_, Some(false)) => Verdict::Fails,
        _ => Verdict::UnknownAtDepth,
    };
    Some(Decision::exact(verdict))
}

fn infinitesimal_at(a: &VirtualNumber, sched: &Schedule) -> Decision {
    let idx = sched.tail(DECAY_TAIL);
    let depth = sched.max_index();
    match abs_samples(a, idx) {
        Some(tail) => {
            let v = decay_verdict(&tail, ZERO_FLOOR);
            let witness = if v.fails() { idx.last().copied() } else { None };
            Decision::sampled(v, depth, witness)
        }
        None => Decision::sampled(Verdict::UnknownAtDepth, depth, None),
    }
}

pub fn is_infinitesimal(a: &VirtualNumber, settings: &Settings) -> Decision {
    series_val_at_least(a, 1)
        .unwrap_or_else(|| escalate(settings, |s| infinitesimal_at(a, s)))
}

fn finite_at(a: &VirtualNumber, sched: &Schedule) -> Decision {
    let all = sched.indices();
    let depth = sched.max_index();
    let Some(vals) = abs_samples(a, all) else {
        return Decision::sampled(Verdict::UnknownAtDepth, depth, None);
    };
    if vals.iter().any(|v| !v.is_finite()) {
        return Decision::sampled(Verdict::UnknownAtDepth, depth, None);
    }
    let split = vals.len().saturating_sub(TAIL);
    let (head, tail) = vals.split_at(split);
    let growing = tail.windows(2).all(|w| w[1] >= w[0]);
    if growing && tail.iter().all(|v| *v > GROWTH_CEILING) {
        return Decision::sampled(Verdict::Fails, depth, all.last().copied());
    }
    let head_max = head.iter().cloned().fold(0.0, f64::max);
    let tail_max = tail.iter().cloned().fold(0.0, f64::max);
    let strictly_up = tail.windows(2).all(|w| w[1] > w[0]);
    if tail_max <= 2.0 * head_max + 1.0 && tail_max < GROWTH_CEILING && !strictly_up {
        return Decision::sampled(Verdict::Holds, depth, None);
    }
    Decision::sampled(Verdict::UnknownAtDepth, depth, None)
}

pub fn is_finite(a: &VirtualNumber, settings: &Settings) -> Decision {
    series_val_at_least(a, 0).unwrap_or_else(|| escalate(settings, |s| finite_at(a, s)))
}

pub fn is_infinite(a: &VirtualNumber, settings: &Settings) -> Decision {
    is_finite(a, settings).not()
}

/// Where an infinite value sits relative to the reals. Finite values are
/// `Neither`; the decision records how firmly the side is known.
pub fn cmp_reals(a: &VirtualNumber, settings: &Settings) -> (RealsSide, Decision) {
    if let Some((e, o)) = a.branches() {
        let side_of = |p: &LaurentPolynomial| -> Option<i32> {
            match p.leading() {
                Some((v, c)) if v < 0 => Some(c.signum()),
                Some(_) => Some(0),
                None => match p.trunc() {
                    Some(t) if t + 1 < 0 => None,
                    _ => Some(0),
                },
            }
        };
        return match (side_of(e), side_of(o)) {
            (Some(1), Some(1)) => (RealsSide::AboveR, Decision::exact(Verdict::Holds)),
            (Some(-1), Some(-1)) => (RealsSide::BelowR, Decision::exact(Verdict::Holds)),
            (Some(_), Some(_)) => (RealsSide::Neither, Decision::exact(Verdict::Holds)),
            _ => (RealsSide::Neither, Decision::exact(Verdict::UnknownAtDepth)),
        };
    }
    let fin = is_finite(a, settings);
    match fin.verdict {
        Verdict::Holds => (RealsSide::Neither, fin),
        Verdict::UnknownAtDepth => (RealsSide::Neither, fin),
        Verdict::Fails => {
            let sched = Schedule::new(settings.depth.max((fin.depth as f64).log2() as u32));
            let signs: Option<Vec<f64>> = sched
                .tail(8)
                .iter()
                .map(|&n| a.sample_raw(n).ok())
                .collect();
            let side = match signs {
                Some(v) if v.iter().all(|x| *x > 0.0) => RealsSide::AboveR,
                Some(v) if v.iter().all(|x| *x < 0.0) => RealsSide::BelowR,
                _ => RealsSide::Neither,
            };
            (side, Decision::sampled(Verdict::Holds, fin.depth, None))
        }
    }
}

pub fn classify(a: &VirtualNumber, settings: &Settings) -> Classification {
    let fin = is_finite(a, settings);
    let (tag, d) = match fin.verdict {
        Verdict::Holds => {
            let inf = is_infinitesimal(a, settings);
            let tag = match inf.verdict {
                Verdict::Holds => Some(FinitudeClass::Infinitesimal),
                Verdict::Fails => Some(FinitudeClass::FiniteNonInfinitesimal),
                Verdict::UnknownAtDepth => None,
            };
            let d = Decision {
                verdict: if tag.is_some() { Verdict::Holds } else { Verdict::UnknownAtDepth },
                depth: fin.depth.max(inf.depth),
                witness: None,
            };
            (tag, d)
        }
        Verdict::Fails => {
            let (side, d) = cmp_reals(a, settings);
            let tag = match side {
                RealsSide::AboveR => FinitudeClass::InfiniteAboveR,
                RealsSide::BelowR => FinitudeClass::InfiniteBelowR,
                RealsSide::Neither => FinitudeClass::InfiniteOscillating,
            };
            (Some(tag), Decision { depth: d.depth.max(fin.depth), ..d })
        }
        Verdict::UnknownAtDepth => (None, fin),
    };
    Classification {
        tag,
        verdict: d.verdict,
        depth: d.depth,
        witness: fin.witness,
    }
}

/// Proximity `α ≈ β`: the difference is infinitesimal.
pub fn near(a: &VirtualNumber, b: &VirtualNumber, settings: &Settings) -> Decision {
    is_infinitesimal(&(a - b), settings)
}

/// Neighbourliness `α ~ β`: near and eventually different.
pub fn neighbour(a: &VirtualNumber, b: &VirtualNumber, settings: &Settings) -> Decision {
    let ne = rel_ext(Relation::Neq, &[a, b], settings).expect("binary relation");
    near(a, b, settings).and(ne)
}

fn std_part_at(a: &VirtualNumber, sched: &Schedule) -> (Decision, Option<f64>) {
    let idx = sched.tail(6);
    let depth = sched.max_index();
    let vals: Option<Vec<f64>> = idx.iter().map(|&n| a.sample_raw(n).ok()).collect();
    let unknown = (Decision::sampled(Verdict::UnknownAtDepth, depth, None), None);
    let Some(vals) = vals else { return unknown };
    if vals.len() < 6 || vals.iter().any(|v| !v.is_finite()) {
        return unknown;
    }
    let mean = |w: &[f64]| w.iter().sum::<f64>() / w.len() as f64;
    let (prev, last) = (&vals[..5], &vals[1..]);
    let m = mean(last);
    let tight = last.iter().all(|v| (v - m).abs() <= STD_SPREAD);
    let stable = (m - mean(prev)).abs() <= STD_DRIFT;
    if tight && stable {
        (Decision::sampled(Verdict::Holds, depth, None), Some(vals[5]))
    } else {
        unknown
    }
}

/// The real infinitely close to `α`. Sequence values report their final
/// sampled value once the tail has settled.
pub fn standard_part(a: &VirtualNumber, settings: &Settings) -> Result<Scalar> {
    if let Some((e, o)) = a.branches() {
        let centre = |p: &LaurentPolynomial| -> Result<Scalar> {
            match branch_val_at_least(p, 0) {
                Some(true) => {}
                Some(false) => return Err(Error::NoStandardPart(Verdict::Fails)),
                None => return Err(Error::NoStandardPart(Verdict::UnknownAtDepth)),
            }
            if p.trunc().is_some_and(|t| t < 0) {
                return Err(Error::NoStandardPart(Verdict::UnknownAtDepth));
            }
            Ok(p.coeff(0))
        };
        let (ce, co) = (centre(e)?, centre(o)?);
        return if ce == co {
            Ok(ce)
        } else {
            Err(Error::NoStandardPart(Verdict::Fails))
        };
    }
    let mut found = None;
    let d = escalate(settings, |s| {
        let (d, v) = std_part_at(a, s);
        found = v;
        d
    });
    match (d.verdict, found) {
        (Verdict::Holds, Some(v)) => Ok(Scalar::approx(v)),
        _ => {
            let fin = is_finite(a, settings);
            Err(Error::NoStandardPart(if fin.fails() {
                Verdict::Fails
            } else {
                Verdict::UnknownAtDepth
            }))
        }
    }
}

/// `β` lies between `α` and `γ`.
pub fn between(b: &VirtualNumber, a: &VirtualNumber, c: &VirtualNumber, settings: &Settings) -> Decision {
    rel_ext(Relation::Between, &[a, b, c], settings).expect("ternary relation")
}

/// Confront theorem: if `β` is between `α` and `γ` and `α ≈ γ`, then
/// `α ≈ β`. Returns the decision on the conclusion, or `PremiseNotMet`.
pub fn confront(
    a: &VirtualNumber,
    b: &VirtualNumber,
    c: &VirtualNumber,
    settings: &Settings,
) -> Result<Decision> {
    let premise = between(b, a, c, settings).and(near(a, c, settings));
    if !premise.holds() {
        return Err(Error::PremiseNotMet(premise.verdict));
    }
    Ok(near(a, b, settings))
}

/// `x` is interior to `B`: `x` and both neighbours `x ± ∂` lie in `B`.
pub fn is_interior_point(x: f64, b: &DomainDescriptor, settings: &Settings) -> Decision {
    if !b.contains(x) {
        return Decision::exact(Verdict::Fails);
    }
    let xv = VirtualNumber::real(Scalar::from_f64_lossless(x));
    let del = VirtualNumber::del();
    b.contains_virtual(&(&xv + &del), settings)
        .and(b.contains_virtual(&(&xv - &del), settings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vnum::SequenceGen;

    fn s() -> Settings {
        Settings::default()
    }
    fn del() -> VirtualNumber {
        VirtualNumber::del()
    }
    fn inf() -> VirtualNumber {
        VirtualNumber::infty()
    }
    fn seq(desc: &str, f: fn(u64) -> f64) -> VirtualNumber {
        VirtualNumber::seq(SequenceGen::total(desc, f))
    }

    #[test]
    fn series_finitude() {
        let pm1 = VirtualNumber::one().alternate_sign();
        assert!(is_infinitesimal(&del(), &s()).holds());
        assert!(is_infinitesimal(&del().alternate_sign(), &s()).holds());
        assert!(is_infinitesimal(&VirtualNumber::int(3), &s()).fails());
        assert!(is_finite(&pm1, &s()).holds());
        assert!(is_infinite(&inf().alternate_sign(), &s()).holds());
        assert!(is_infinitesimal(&VirtualNumber::zero(), &s()).holds());
    }

    #[test]
    fn reals_sides() {
        assert_eq!(cmp_reals(&inf(), &s()).0, RealsSide::AboveR);
        assert_eq!(cmp_reals(&-inf(), &s()).0, RealsSide::BelowR);
        assert_eq!(cmp_reals(&inf().alternate_sign(), &s()).0, RealsSide::Neither);
        assert_eq!(cmp_reals(&VirtualNumber::int(7), &s()).0, RealsSide::Neither);
    }

    #[test]
    fn sequence_heuristics() {
        let recip = seq("1/n", |n| 1.0 / n as f64);
        let d = is_infinitesimal(&recip, &s());
        assert!(d.holds());
        assert!(d.depth > 1 << 14, "needed escalation, depth {}", d.depth);
        assert!(is_infinitesimal(&seq("sin n", |n| (n as f64).sin()), &s()).fails());
        assert!(is_finite(&seq("sin n", |n| (n as f64).sin()), &s()).holds());
        assert!(is_finite(&seq("n", |n| n as f64), &s()).fails());
        let osc = seq("(-1)^n n", |n| if n % 2 == 0 { n as f64 } else { -(n as f64) });
        assert_eq!(classify(&osc, &s()).tag, Some(FinitudeClass::InfiniteOscillating));
        assert_eq!(classify(&seq("n", |n| n as f64), &s()).tag, Some(FinitudeClass::InfiniteAboveR));
    }

    #[test]
    fn proximity_examples() {
        let ten = VirtualNumber::int(10);
        assert!(near(&(&ten + &del()), &ten, &s()).holds());
        assert!(near(&inf(), &(&inf() * &inf()), &s()).fails());
        assert!(neighbour(&del(), &VirtualNumber::zero(), &s()).holds());
        assert!(neighbour(&ten, &ten, &s()).fails());
        assert!(neighbour(&del(), &(&del() * &del()), &s()).holds());
    }

    #[test]
    fn standard_parts() {
        let ten = VirtualNumber::int(10);
        assert_eq!(standard_part(&(&ten + &del()), &s()).unwrap(), Scalar::int(10));
        assert!(matches!(
            standard_part(&VirtualNumber::one().alternate_sign(), &s()),
            Err(Error::NoStandardPart(Verdict::Fails))
        ));
        assert!(standard_part(&inf(), &s()).is_err());
        let conv = seq("2 + 1/n", |n| 2.0 + 1.0 / n as f64);
        let v = standard_part(&conv, &s()).unwrap().to_f64();
        assert!((v - 2.0).abs() < 1e-6);
        let alt = seq("(-1)^n", |n| if n % 2 == 0 { 1.0 } else { -1.0 });
        assert!(standard_part(&alt, &s()).is_err());
    }

    #[test]
    fn between_and_confront() {
        let pm1 = VirtualNumber::one().alternate_sign();
        let mp1 = VirtualNumber::one().alternate_sign_neg();
        assert!(between(&VirtualNumber::zero(), &pm1, &mp1, &s()).holds());
        let x = VirtualNumber::int(4) + del();
        assert!(confront(&x, &x, &x, &s()).unwrap().holds());
        assert!(matches!(
            confront(&VirtualNumber::zero(), &VirtualNumber::int(5), &VirtualNumber::int(1), &s()),
            Err(Error::PremiseNotMet(_))
        ));
    }

    #[test]
    fn interior_points() {
        let unit: DomainDescriptor = "[0,1]".parse().unwrap();
        assert!(is_interior_point(0.5, &unit, &s()).holds());
        assert!(is_interior_point(0.0, &unit, &s()).fails());
        let two: DomainDescriptor = "(-1,1)U(2,3)".parse().unwrap();
        assert!(is_interior_point(0.0, &two, &s()).holds());
        assert!(is_interior_point(1.5, &two, &s()).fails());
        let glued: DomainDescriptor = "(0,1]U(1,2)".parse().unwrap();
        assert!(is_interior_point(1.0, &glued, &s()).holds());
    }
}
