//! Exact rational numbers with a machine-word fast path.
//!
//! Desk-scale probability computations stay within `i64` numerators and
//! denominators almost all the time, so values are kept as `Ratio<i64>` and
//! promoted to arbitrary precision only when an operation overflows. The
//! representation is canonical: a value that fits the small form is never
//! stored in the big form, so derived equality and hashing agree with
//! numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone)]
pub enum Exact {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseExactError(pub String);

impl Exact {
    pub fn new(numer: i64, denom: i64) -> Self {
        Exact::Small(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        Exact::Small(Ratio::from_integer(n))
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Exact::Small(Ratio::new_raw(n, d)),
            _ => Exact::Big(Box::new(r)),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Exact::Small(r) => Ratio::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Exact::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Exact::Small(r) => BigInt::from(*r.numer()),
            Exact::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Exact::Small(r) => BigInt::from(*r.denom()),
            Exact::Big(b) => b.denom().clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exact::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Exact::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Exact value of a finite float, via its shortest decimal rendering.
    /// `0.1` becomes `1/10`, not the binary expansion of the nearest double.
    pub fn from_f64_decimal(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        format!("{x:?}").parse().ok()
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Exact::Small(r) => *r.numer() < 0,
            Exact::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn binary(
        &self,
        other: &Self,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Exact::Small(a), Exact::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                return Exact::Small(r);
            }
        }
        Exact::from_big(big(self.to_big(), other.to_big()))
    }
}

impl Default for Exact {
    fn default() -> Self {
        Exact::zero()
    }
}

impl Zero for Exact {
    fn zero() -> Self {
        Exact::Small(Ratio::zero())
    }
    fn is_zero(&self) -> bool {
        matches!(self, Exact::Small(r) if r.is_zero())
    }
}

impl One for Exact {
    fn one() -> Self {
        Exact::Small(Ratio::one())
    }
}

impl PartialEq for Exact {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Exact::Small(a), Exact::Small(b)) => a == b,
            (Exact::Big(a), Exact::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Exact {}

impl Hash for Exact {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Exact::Small(r) => {
                0u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Exact::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exact::Small(a), Exact::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        match self {
            Exact::Small(r) if *r.numer() != i64::MIN => Exact::Small(-r),
            other => Exact::from_big(-other.to_big()),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $checked:ident, $op:tt) => {
        impl<'a> $trait<&'a Exact> for &'a Exact {
            type Output = Exact;
            fn $method(self, rhs: &'a Exact) -> Exact {
                self.binary(rhs, |a, b| a.$checked(b), |a, b| a $op b)
            }
        }
        impl<'a> $trait<&'a Exact> for Exact {
            type Output = Exact;
            fn $method(self, rhs: &'a Exact) -> Exact {
                (&self).$method(rhs)
            }
        }
        impl $trait<Exact> for Exact {
            type Output = Exact;
            fn $method(self, rhs: Exact) -> Exact {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $assign_trait<&'a Exact> for Exact {
            fn $assign_method(&mut self, rhs: &'a Exact) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $assign_trait<Exact> for Exact {
            fn $assign_method(&mut self, rhs: Exact) {
                *self = (&*self).$method(&rhs);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign, checked_add, +);
forward_binop!(Sub, sub, SubAssign, sub_assign, checked_sub, -);
forward_binop!(Mul, mul, MulAssign, mul_assign, checked_mul, *);
forward_binop!(Div, div, DivAssign, div_assign, checked_div, /);

impl Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Exact> for Exact {
    fn sum<I: Iterator<Item = &'a Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Exact {
    fn from(n: i64) -> Self {
        Exact::from_integer(n)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exact::Small(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exact::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exact::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Exact::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `p/q`, integers, and decimals with an optional exponent
/// (`0.125`, `-3`, `2.5e-3`).
impl FromStr for Exact {
    type Err = ParseExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseExactError(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Exact::from_big(BigRational::new(n, d)));
        }
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let all_digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = all_digits.parse().map_err(|_| err())?;
        if negative {
            numer = -numer;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Exact::from_big(value))
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExactVisitor;

        impl Visitor<'_> for ExactVisitor {
            type Value = Exact;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a string (\"3/8\", \"0.375\") or a number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact::from_big(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
                Exact::from_f64_decimal(v).ok_or_else(|| E::custom("non-finite number"))
            }
        }

        deserializer.deserialize_any(ExactVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Exact {
        s.parse().unwrap()
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(q("3/6"), Exact::new(1, 2));
        assert_eq!(q("0.125"), Exact::new(1, 8));
        assert_eq!(q("-2.5e-1"), Exact::new(-1, 4));
        assert_eq!(q("7"), Exact::from_integer(7));
        assert_eq!(q("1e3"), Exact::from_integer(1000));
        assert!("1/0".parse::<Exact>().is_err());
        assert!("abc".parse::<Exact>().is_err());
        assert!(".".parse::<Exact>().is_err());
    }

    #[test]
    fn float_literals_keep_their_decimal_value() {
        assert_eq!(Exact::from_f64_decimal(0.1).unwrap(), Exact::new(1, 10));
        assert_eq!(Exact::from_f64_decimal(0.9).unwrap().to_string(), "9/10");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Exact::from_integer(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq, Exact::Big(_)));
        let back = &sq / &big;
        assert!(matches!(back, Exact::Small(_)));
        assert_eq!(back, big);
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "1", "-3/7", "123456789012345678901234567891/2"] {
            assert_eq!(q(s).to_string(), s);
        }
    }

    proptest! {
        #[test]
        fn arithmetic_matches_bigrational(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = Exact::new(a, b);
            let y = Exact::new(c, d);
            let bx = BigRational::new(a.into(), b.into());
            let by = BigRational::new(c.into(), d.into());
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        }
    }
}
