//! Textual normal form of virtual numbers.
//!
//! Parity-free series print as their ∂-expansion (`inf^2 + 2 + del^2`).
//! A series whose branches differ is split as `s + (+-)a` with
//! `s = (even + odd)/2` and `a = (even - odd)/2`, so `±1` prints as `(+-)1`
//! and `∓∂` as `(-+)del`. The remainder, if any, is printed once at the end.
//! Sequence-tier values print as `seq[description]`; they are not readable back.

use std::fmt;

use crate::laurent::LaurentPolynomial;
use crate::scalar::Scalar;
use crate::vnum::VirtualNumber;

impl fmt::Display for VirtualNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VirtualNumber::Seq(g) => write!(f, "seq[{}]", g.description()),
            VirtualNumber::Series { even, odd } => {
                if even == odd {
                    return write!(f, "{even}");
                }
                write_parity(f, even, odd)
            }
        }
    }
}

fn write_parity(
    f: &mut fmt::Formatter<'_>,
    even: &LaurentPolynomial,
    odd: &LaurentPolynomial,
) -> fmt::Result {
    let half = Scalar::ratio(1, 2);
    let trunc = match (even.trunc(), odd.trunc()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    };
    let sym = even.add(odd).scale(&half).known_part();
    let mut alt = even.sub(odd).scale(&half).known_part();
    if let Some(t) = trunc {
        alt = alt.truncated(t).known_part();
    }
    let sym = match trunc {
        Some(t) => sym.truncated(t).known_part(),
        None => sym,
    };

    let mut wrote = false;
    if !sym.has_no_terms() {
        write!(f, "{sym}")?;
        wrote = true;
    }
    if let Some((_, lead)) = alt.leading() {
        let (marker, body) = if lead.signum() < 0 {
            ("(-+)", alt.neg())
        } else {
            ("(+-)", alt)
        };
        if wrote {
            write!(f, " + ")?;
        }
        if body.num_terms() == 1 {
            write!(f, "{marker}{body}")?;
        } else {
            write!(f, "{marker}({body})")?;
        }
        wrote = true;
    }
    if let Some(t) = trunc {
        if wrote {
            write!(f, " + ")?;
        }
        write!(f, "{}", LaurentPolynomial::big_o(t))?;
    } else if !wrote {
        write!(f, "0")?;
    }
    Ok(())
}
