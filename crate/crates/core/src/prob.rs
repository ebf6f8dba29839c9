//! Scalar abstraction shared by every numeric routine: exact rationals for
//! correctness work, `f64` for large searches and sampling.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::exact::Exact;

/// Float keys keep this many decimal digits per coordinate.
pub const FLOAT_KEY_DIGITS: i32 = 12;
/// Maximum L∞ distance tolerated between two float beliefs sharing a key.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Prob:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + AddAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    /// Canonical, hashable identity of a value (exact in rational mode,
    /// quantized in float mode).
    type Key: Ord + Hash + Clone + Debug + Send + Sync;

    /// Arithmetic is exact: equal keys imply equal values and comparisons
    /// need no tolerance.
    const EXACT: bool;
    const MODE: &'static str;

    fn from_exact(x: &Exact) -> Self;
    fn to_f64(&self) -> f64;
    fn key(&self) -> Self::Key;
    fn abs_diff(&self, other: &Self) -> Self;
    /// Zero for exact arithmetic, [`FLOAT_TOLERANCE`] otherwise.
    fn tolerance() -> Self;
    /// Reads a value written by `Display` in either arithmetic.
    fn parse_value(text: &str) -> Option<Self>;

    fn product(a: &Self, b: &Self) -> Self {
        a.clone() * b
    }
}

impl Prob for Exact {
    type Key = Exact;
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn from_exact(x: &Exact) -> Self {
        x.clone()
    }
    fn to_f64(&self) -> f64 {
        Exact::to_f64(self)
    }
    fn key(&self) -> Exact {
        self.clone()
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self.clone() - other.clone()).abs()
    }
    fn tolerance() -> Self {
        Exact::zero()
    }
    fn parse_value(text: &str) -> Option<Self> {
        text.parse().ok()
    }
    fn product(a: &Self, b: &Self) -> Self {
        a * b
    }
}

impl Prob for f64 {
    type Key = i64;
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_exact(x: &Exact) -> Self {
        x.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn key(&self) -> i64 {
        (self * 10f64.powi(FLOAT_KEY_DIGITS)).round() as i64
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }
    fn parse_value(text: &str) -> Option<Self> {
        text.parse().ok().or_else(|| text.parse::<Exact>().ok().map(|x| x.to_f64()))
    }
}

/// Key of a probability vector.
pub fn vec_key<S: Prob>(v: &[S]) -> Vec<S::Key> {
    v.iter().map(Prob::key).collect()
}

pub fn sum<S: Prob>(v: &[S]) -> S {
    let mut acc = S::zero();
    for x in v {
        acc += x;
    }
    acc
}

/// L∞ distance between two equally sized vectors.
pub fn linf<S: Prob>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut worst = S::zero();
    for (x, y) in a.iter().zip(b) {
        let d = x.abs_diff(y);
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Divides every entry by the total. `None` when the total is zero.
pub fn normalized<S: Prob>(v: &[S]) -> Option<Vec<S>> {
    let total = sum(v);
    if total.is_zero() {
        return None;
    }
    Some(v.iter().map(|x| x.clone() / total.clone()).collect())
}

pub fn convert<S: Prob>(v: &[Exact]) -> Vec<S> {
    v.iter().map(S::from_exact).collect()
}
