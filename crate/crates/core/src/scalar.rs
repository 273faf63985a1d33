//! Real coefficients: exact rationals or approximate binary floats.
//!
//! Exactness is contagious in one direction only: any operation touching an
//! approximate operand produces an approximate result. Approximate values carry
//! no error bound; every comparison that involves one uses [`APPROX_TOL`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Absolute tolerance for comparisons involving approximate scalars.
pub const APPROX_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn approx(x: f64) -> Self {
        Scalar::Approx(x)
    }

    /// Exact when `x` is a multiple of 1/1024 of moderate size, approximate otherwise.
    pub fn from_f64_lossless(x: f64) -> Self {
        if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
            Scalar::int(x as i64)
        } else if x.is_finite() && (x * 1024.0).fract() == 0.0 && x.abs() < 9.0e12 {
            Scalar::ratio((x * 1024.0) as i64, 1024)
        } else {
            Scalar::Approx(x)
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_approximate(&self) -> bool {
        !self.is_exact()
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Approx(x) => *x,
        }
    }

    /// Sign under the tolerance policy: approximate values within
    /// [`APPROX_TOL`] of zero have sign zero.
    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Scalar::Approx(x) => {
                if *x > APPROX_TOL {
                    1
                } else if *x < -APPROX_TOL {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Approx(x) => (x - 1.0).abs() <= APPROX_TOL,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; `None` for (tolerance-)zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Exact(r) => Scalar::Exact(r.recip()),
            Scalar::Approx(x) => Scalar::Approx(1.0 / x),
        })
    }

    pub fn powi(&self, n: i32) -> Option<Self> {
        if n < 0 {
            return self.recip().and_then(|r| r.powi(-n));
        }
        Some(match self {
            Scalar::Exact(r) => Scalar::Exact(num_traits::pow(r.clone(), n as usize)),
            Scalar::Approx(x) => Scalar::Approx(x.powi(n)),
        })
    }

    /// Square root, exact when the argument is a rational perfect square.
    pub fn sqrt(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        match self {
            Scalar::Exact(r) => {
                let (n, d) = (r.numer(), r.denom());
                let (sn, sd) = (n.sqrt(), d.sqrt());
                if &(&sn * &sn) == n && &(&sd * &sd) == d {
                    Some(Scalar::Exact(BigRational::new(sn, sd)))
                } else {
                    Some(Scalar::Approx(rational_to_f64(r).sqrt()))
                }
            }
            Scalar::Approx(x) => Some(Scalar::Approx(x.max(0.0).sqrt())),
        }
    }

    /// Equality under the tolerance policy.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        (self - other).is_zero()
    }

    /// Total comparison under the tolerance policy.
    pub fn cmp_tol(&self, other: &Scalar) -> Ordering {
        match (self - other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    /// Rounds an exact value to an approximate one; identity on approximate values.
    pub fn to_approx(&self) -> Self {
        Scalar::Approx(self.to_f64())
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Huge numerator/denominator: scale both down before dividing.
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.approx_eq(other),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Approx(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                &self $op &rhs
            }
        }
        impl<'b> $trait<&'b Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl<'a, 'b> Div<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero; callers guard with [`Scalar::recip`].
    fn div(self, rhs: &'b Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Approx(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Exact scalars print as `p` or `p/q`; approximate ones in shortest
/// round-trip decimal form, always with a decimal point or exponent so the
/// reader can tell them apart.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(x) => write!(f, "{}", format_approx(*x)),
        }
    }
}

pub(crate) fn format_approx(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}
