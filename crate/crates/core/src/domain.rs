//! Subsets of the real line given as finite unions of intervals.
//!
//! Textual form: components separated by `U`, each `R` or an interval with
//! `[`/`(` and `]`/`)` brackets, e.g. `[0,1]`, `(-1,1)U(2,3)`, `[0,inf)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::settings::Settings;
use crate::verdict::Decision;
use crate::vnum::{rel_ext, Relation, VirtualNumber};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Endpoint {
    pub value: f64,
    pub closed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Result<Self> {
        let iv = Interval {
            lo: Endpoint {
                value: lo,
                closed: lo_closed,
            },
            hi: Endpoint {
                value: hi,
                closed: hi_closed,
            },
        };
        iv.validate()?;
        Ok(iv)
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, true, hi, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, false, hi, false)
    }

    pub fn real_line() -> Self {
        Interval {
            lo: Endpoint {
                value: f64::NEG_INFINITY,
                closed: false,
            },
            hi: Endpoint {
                value: f64::INFINITY,
                closed: false,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.lo.value, self.hi.value);
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::UnsupportedSet("NaN endpoint".into()));
        }
        if (lo.is_infinite() && self.lo.closed) || (hi.is_infinite() && self.hi.closed) {
            return Err(Error::UnsupportedSet("infinite endpoints must be open".into()));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo >= hi {
            return Err(Error::UnsupportedSet(format!("empty or reversed interval {self}")));
        }
        Ok(())
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.value.is_finite() && self.hi.value.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo.closed { x >= self.lo.value } else { x > self.lo.value };
        let below = if self.hi.closed { x <= self.hi.value } else { x < self.hi.value };
        above && below
    }

    /// Eventual membership of a virtual number.
    pub fn contains_virtual(&self, a: &VirtualNumber, settings: &Settings) -> Decision {
        let mut d = Decision::exact(crate::verdict::Verdict::Holds);
        if self.lo.value.is_finite() {
            let lo = VirtualNumber::real(Scalar::from_f64_lossless(self.lo.value));
            let rel = if self.lo.closed { Relation::Le } else { Relation::Lt };
            d = d.and(rel_ext(rel, &[&lo, a], settings).expect("binary relation"));
        }
        if self.hi.value.is_finite() {
            let hi = VirtualNumber::real(Scalar::from_f64_lossless(self.hi.value));
            let rel = if self.hi.closed { Relation::Le } else { Relation::Lt };
            d = d.and(rel_ext(rel, &[a, &hi], settings).expect("binary relation"));
        }
        d
    }
}

fn write_bound(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x == f64::INFINITY {
        write!(f, "inf")
    } else if x == f64::NEG_INFINITY {
        write!(f, "-inf")
    } else {
        write!(f, "{x}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.lo.value.is_finite() && !self.hi.value.is_finite() && self.lo.value < 0.0 {
            return write!(f, "R");
        }
        write!(f, "{}", if self.lo.closed { '[' } else { '(' })?;
        write_bound(f, self.lo.value)?;
        write!(f, ",")?;
        write_bound(f, self.hi.value)?;
        write!(f, "{}", if self.hi.closed { ']' } else { ')' })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainDescriptor {
    components: Vec<Interval>,
}

impl DomainDescriptor {
    pub fn new(components: Vec<Interval>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::UnsupportedSet("empty union".into()));
        }
        for c in &components {
            c.validate()?;
        }
        Ok(DomainDescriptor { components })
    }

    pub fn real_line() -> Self {
        DomainDescriptor {
            components: vec![Interval::real_line()],
        }
    }

    pub fn interval(iv: Interval) -> Self {
        DomainDescriptor {
            components: vec![iv],
        }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn contains(&self, x: f64) -> bool {
        self.components.iter().any(|c| c.contains(x))
    }

    pub fn contains_virtual(&self, a: &VirtualNumber, settings: &Settings) -> Decision {
        self.components
            .iter()
            .map(|c| c.contains_virtual(a, settings))
            .reduce(Decision::or)
            .expect("non-empty union")
    }
}

impl fmt::Display for DomainDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "U")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn parse_bound(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "∞" | "+∞" => Ok(f64::INFINITY),
        "-inf" | "-∞" => Ok(f64::NEG_INFINITY),
        "pi" => Ok(std::f64::consts::PI),
        "-pi" => Ok(-std::f64::consts::PI),
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::UnsupportedSet(format!("bad endpoint `{t}`"))),
    }
}

fn parse_component(s: &str) -> Result<Interval> {
    let t = s.trim();
    if t == "R" {
        return Ok(Interval::real_line());
    }
    let bad = || Error::UnsupportedSet(format!("bad interval `{t}`"));
    let lo_closed = match t.chars().next() {
        Some('[') => true,
        Some('(') => false,
        _ => return Err(bad()),
    };
    let hi_closed = match t.chars().last() {
        Some(']') => true,
        Some(')') => false,
        _ => return Err(bad()),
    };
    if t.len() < 2 {
        return Err(bad());
    }
    let inner = &t[1..t.len() - 1];
    let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
    Interval::new(parse_bound(lo)?, lo_closed, parse_bound(hi)?, hi_closed)
}

impl FromStr for DomainDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['U', '∪']).collect();
        let comps = parts
            .into_iter()
            .map(parse_component)
            .collect::<Result<Vec<_>>>()?;
        DomainDescriptor::new(comps)
    }
}
