use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
///
/// Values whose numerator and denominator fit in `i64` use a machine-word
/// representation with `i128` intermediates; everything else is a
/// `BigRational`. The representation is canonical, so equality and hashing
/// are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rat(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rat {
    /// `n / d` with `d > 0`, reduced here.
    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d > 0);
        if n == 0 {
            return Rat::zero();
        }
        let g = gcd128(n.unsigned_abs(), d as u128) as i128;
        let (n, d) = (n / g, d / g);
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            ))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn zero() -> Self {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(Repr::Small(n, 1))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (n, d) = if den < 0 {
            (-(num as i128), -(den as i128))
        } else {
            (num as i128, den as i128)
        };
        Rat::from_i128(n, d)
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        Rat::from_big(BigRational::new(num, den))
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(0, _) => panic!("reciprocal of zero"),
            Repr::Small(n, d) => {
                let (n, d) = (*n as i128, *d as i128);
                if n < 0 {
                    Rat::from_i128(-d, -n)
                } else {
                    Rat::from_i128(d, n)
                }
            }
            Repr::Big(r) => Rat::from_big(r.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn add_ref(&self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, 1), Repr::Small(c, 1)) => Rat::from_i128(*a as i128 + *c as i128, 1),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Rat::from_i128(a * d + c * b, b * d)
            }
            _ => Rat::from_big(self.to_big() + rhs.to_big()),
        }
    }

    fn mul_ref(&self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rat::zero(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * rhs.to_big()),
        }
    }

    fn neg_ref(&self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat::from_i128(-(*n as i128), *d as i128),
            Repr::Big(r) => Rat::from_big(-r),
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat::from_big(r)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_big(BigRational::from_integer(n))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRatError {
    #[error("malformed rational {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-canonical rational {given:?} (expected {canonical:?})")]
    NonCanonical { given: String, canonical: String },
}

impl Rat {
    /// Parses `"p"` or `"p/q"` and rejects anything that is not already in
    /// canonical form (lowest terms, positive denominator, no `+`, no
    /// leading zeros).
    pub fn parse_canonical(s: &str) -> Result<Self, ParseRatError> {
        let r: Rat = s.parse()?;
        let canonical = r.to_string();
        if canonical != s {
            return Err(ParseRatError::NonCanonical {
                given: s.to_string(),
                canonical,
            });
        }
        Ok(r)
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let malformed = || ParseRatError::Malformed(s.to_string());
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| malformed())?;
        let den: BigInt = den.parse().map_err(|_| malformed())?;
        if den.is_zero() {
            return Err(ParseRatError::ZeroDenominator(s.to_string()));
        }
        Ok(Rat::from_bigints(num, den))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rat::parse_canonical(&s).map_err(serde::de::Error::custom)
    }
}

fn sub_ref(a: &Rat, b: &Rat) -> Rat {
    a.add_ref(&b.neg_ref())
}

fn div_ref(a: &Rat, b: &Rat) -> Rat {
    a.mul_ref(&b.recip())
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $f:expr) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $f(self, rhs)
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                $f(&self, rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                $f(self, &rhs)
            }
        }
        impl $assign_trait<&Rat> for Rat {
            fn $assign_method(&mut self, rhs: &Rat) {
                *self = $f(self, rhs);
            }
        }
        impl $assign_trait<Rat> for Rat {
            fn $assign_method(&mut self, rhs: Rat) {
                *self = $f(self, &rhs);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign, Rat::add_ref);
forward_binop!(Sub, sub, SubAssign, sub_assign, sub_ref);
forward_binop!(Mul, mul, MulAssign, mul_assign, Rat::mul_ref);

impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        div_ref(self, rhs)
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        div_ref(&self, &rhs)
    }
}

impl Div<&Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        div_ref(&self, rhs)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        self.neg_ref()
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        self.neg_ref()
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_canonical() {
        assert_eq!(Rat::new(4, -6).to_string(), "-2/3");
        assert_eq!(Rat::new(6, 3).to_string(), "2");
        assert_eq!(Rat::zero().to_string(), "0");
    }

    #[test]
    fn parse_rejects_non_canonical() {
        assert_eq!(Rat::parse_canonical("-2/3").unwrap(), Rat::new(-2, 3));
        assert_eq!(Rat::parse_canonical("7").unwrap(), Rat::from_int(7));
        assert!(matches!(
            Rat::parse_canonical("2/4"),
            Err(ParseRatError::NonCanonical { .. })
        ));
        assert!(matches!(
            Rat::parse_canonical("1/1"),
            Err(ParseRatError::NonCanonical { .. })
        ));
        assert!(matches!(
            Rat::parse_canonical("1/0"),
            Err(ParseRatError::ZeroDenominator(_))
        ));
        assert!(Rat::parse_canonical("x").is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = Rat::new(-5, 12);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "\"-5/12\"");
        let back: Rat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sq = &big * &big;
        assert_eq!(sq.numer(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let sum = &big + &Rat::one();
        assert_eq!(sum.to_string(), "9223372036854775808");
        assert_eq!(&sum - &Rat::one(), big);
        assert_eq!(
            Rat::from_int(i64::MIN).abs().to_string(),
            "9223372036854775808"
        );
        assert_eq!(Rat::new(i64::MIN, -1).to_string(), "9223372036854775808");
    }

    #[test]
    fn ordering_and_arithmetic() {
        let a = Rat::new(1, 3);
        let b = Rat::new(-2, 7);
        assert!(b < a);
        assert_eq!(&a + &b, Rat::new(1, 21));
        assert_eq!(&a * &b, Rat::new(-2, 21));
        assert_eq!(&a / &b, Rat::new(-7, 6));
        assert_eq!(b.recip(), Rat::new(-7, 2));
        let huge = &Rat::from_int(i64::MAX) * &Rat::from_int(3);
        assert!(huge > a && -&huge < b);
        let mut acc = Rat::zero();
        acc += &a;
        acc -= Rat::one();
        acc *= Rat::from_int(3);
        assert_eq!(acc, Rat::from_int(-2));
    }
}
