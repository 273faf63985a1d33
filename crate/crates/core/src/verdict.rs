//! Three-valued outcomes for predicates that are only semidecidable on
//! sampled sequences.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    UnknownAtDepth,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn fails(self) -> bool {
        self == Verdict::Fails
    }

    pub fn is_unknown(self) -> bool {
        self == Verdict::UnknownAtDepth
    }

    /// Kleene conjunction.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
            _ => Verdict::UnknownAtDepth,
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Holds, _) | (_, Verdict::Holds) => Verdict::Holds,
            (Verdict::Fails, Verdict::Fails) => Verdict::Fails,
            _ => Verdict::UnknownAtDepth,
        }
    }

    pub fn not(self) -> Verdict {
        match self {
            Verdict::Holds => Verdict::Fails,
            Verdict::Fails => Verdict::Holds,
            Verdict::UnknownAtDepth => Verdict::UnknownAtDepth,
        }
    }

    /// Downgrades `Holds` to `UnknownAtDepth`, leaving the others alone.
    pub fn cap_at_unknown(self) -> Verdict {
        if self == Verdict::Holds {
            Verdict::UnknownAtDepth
        } else {
            self
        }
    }

    pub fn all(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
        vs.into_iter().fold(Verdict::Holds, Verdict::and)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "Holds",
            Verdict::Fails => "Fails",
            Verdict::UnknownAtDepth => "UnknownAtDepth",
        })
    }
}

/// A verdict together with the evidence behind it.
///
/// `depth` is the largest index sampled (0 on the exact series tier) and
/// `witness` an index where the pointwise relation failed, when one was seen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub depth: u64,
    pub witness: Option<u64>,
}

impl Decision {
    pub fn exact(verdict: Verdict) -> Self {
        Decision {
            verdict,
            depth: 0,
            witness: None,
        }
    }

    pub fn sampled(verdict: Verdict, depth: u64, witness: Option<u64>) -> Self {
        Decision {
            verdict,
            depth,
            witness,
        }
    }

    pub fn and(self, other: Decision) -> Decision {
        Decision {
            verdict: self.verdict.and(other.verdict),
            depth: self.depth.max(other.depth),
            witness: self.witness.or(other.witness),
        }
    }

    pub fn or(self, other: Decision) -> Decision {
        Decision {
            verdict: self.verdict.or(other.verdict),
            depth: self.depth.max(other.depth),
            witness: if self.verdict.holds() || other.verdict.holds() {
                None
            } else {
                self.witness.or(other.witness)
            },
        }
    }

    pub fn not(self) -> Decision {
        Decision {
            verdict: self.verdict.not(),
            ..self
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }

    pub fn fails(&self) -> bool {
        self.verdict.fails()
    }
}
