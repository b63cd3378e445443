//! Finite words of partial quotients and the exact arithmetic attached to
//! them: continuants, values, and the Euclidean inverse.

use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, SignedScalar};
use crate::Rational;

/// Words longer than this are multiplied out as a balanced product tree.
pub const SPLIT_THRESHOLD: usize = 4096;

/// A finite sequence of positive partial quotients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CfWord(Vec<u64>);

impl CfWord {
    pub fn new(quotients: Vec<u64>) -> Result<Self> {
        if let Some(pos) = quotients.iter().position(|&a| a == 0) {
            return Err(Error::ZeroQuotient(pos));
        }
        Ok(Self(quotients))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    /// The reversal `w_m ... w_1`.
    pub fn mirror(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        Self(v)
    }

    pub fn is_palindrome(&self) -> bool {
        is_palindrome(&self.0)
    }

    pub fn concat(&self, other: &CfWord) -> Self {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Self(v)
    }

    pub fn push(&mut self, a: u64) -> Result<()> {
        if a == 0 {
            return Err(Error::ZeroQuotient(self.0.len()));
        }
        self.0.push(a);
        Ok(())
    }

    pub fn prefix(&self, n: usize) -> Self {
        Self(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `W^x`: `W` repeated `floor(x)` times followed by the prefix of `W`
    /// of length `ceil((x - floor(x)) |W|)`.
    pub fn power(&self, x: &Rational) -> Result<Self> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        if !x.is_positive() {
            return Err(Error::InvalidArgument(format!("word power exponent must be positive, got {x}")));
        }
        let whole = x.floor().to_integer();
        let frac = x - x.floor();
        let tail = (frac * Rational::from_integer(BigInt::from(self.len()))).ceil().to_integer();
        let whole: usize = whole
            .try_into()
            .map_err(|_| Error::InvalidArgument(format!("word power exponent {x} too large")))?;
        let tail: usize = tail.try_into().unwrap_or(0);
        let mut v = Vec::with_capacity(whole * self.len() + tail);
        for _ in 0..whole {
            v.extend_from_slice(&self.0);
        }
        v.extend_from_slice(&self.0[..tail]);
        Ok(Self(v))
    }

    /// `K_m(w_1, ..., w_m)`, with `K_0 = 1`.
    pub fn continuant<T: Scalar>(&self) -> T {
        continuant(&self.0)
    }

    /// Exact value of `[0; w_1, ..., w_m]` in lowest terms.
    pub fn value(&self) -> Result<Rational> {
        rational_of_word(self)
    }
}

impl Deref for CfWord {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl TryFrom<Vec<u64>> for CfWord {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CfWord> for Vec<u64> {
    fn from(w: CfWord) -> Self {
        w.0
    }
}

impl fmt::Display for CfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn is_palindrome(w: &[u64]) -> bool {
    w.iter().eq(w.iter().rev())
}

/// The matrix `prod [[a_i, 1], [1, 0]]`, laid out row-major as
/// `[K(w), K(w without last), K(w without first), K(w without both ends)]`.
pub fn continuant_matrix<T: Scalar>(w: &[u64]) -> [T; 4] {
    if w.len() > SPLIT_THRESHOLD {
        let (l, r) = w.split_at(w.len() / 2);
        let left = continuant_matrix::<T>(l);
        let right = continuant_matrix::<T>(r);
        return mat_mul(&left, &right);
    }
    let mut m = [T::one(), T::zero(), T::zero(), T::one()];
    for &a in w {
        let a = T::from(a);
        let [m00, m01, m10, m11] = m;
        m = [m00.clone() * a.clone() + m01, m00, m10.clone() * a + m11, m10];
    }
    m
}

fn mat_mul<T: Scalar>(x: &[T; 4], y: &[T; 4]) -> [T; 4] {
    [
        x[0].clone() * y[0].clone() + x[1].clone() * y[2].clone(),
        x[0].clone() * y[1].clone() + x[1].clone() * y[3].clone(),
        x[2].clone() * y[0].clone() + x[3].clone() * y[2].clone(),
        x[2].clone() * y[1].clone() + x[3].clone() * y[3].clone(),
    ]
}

/// `K_m(a_1, ..., a_m)`: the denominator of `[0; a_1, ..., a_m]`.
pub fn continuant<T: Scalar>(w: &[u64]) -> T {
    if w.len() > SPLIT_THRESHOLD {
        let [k, ..] = continuant_matrix::<T>(w);
        return k;
    }
    let (mut prev, mut cur) = (T::zero(), T::one());
    for &a in w {
        let next = T::from(a) * cur.clone() + prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Exact value `[0; w_1, ..., w_m] = K_{m-1}(w_2..w_m) / K_m(w_1..w_m)`.
pub fn rational_of_word(w: &CfWord) -> Result<Rational> {
    rational_of_word_in::<BigInt>(w)
}

/// [`rational_of_word`] over an arbitrary signed scalar.
pub fn rational_of_word_in<T: SignedScalar>(w: &CfWord) -> Result<Ratio<T>> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let [q, _, p, _] = continuant_matrix::<T>(w);
    Ok(Ratio::new(p, q))
}

/// Canonical word of a rational in `(0, 1)` via the Euclidean algorithm.
/// The last quotient is at least 2 whenever the word has length at least 2.
pub fn cf_of_rational(num: &BigInt, den: &BigInt) -> Result<CfWord> {
    if !den.is_positive() || num.is_negative() {
        return Err(Error::InvalidArgument(format!("expected nonnegative numerator and positive denominator, got {num}/{den}")));
    }
    let g = num.gcd(den);
    if num.is_zero() || num >= den {
        return Err(Error::OutOfUnitInterval(format!("{num}/{den}")));
    }
    let (mut a, mut b) = (den / &g, num / &g);
    let mut out = Vec::new();
    while !b.is_zero() {
        let (q, r) = a.div_rem(&b);
        out.push(q.try_into().map_err(|_| Error::InvalidArgument("partial quotient exceeds u64".into()))?);
        a = b;
        b = r;
    }
    Ok(CfWord(out))
}

/// Checks `K(w_1..w_{m-1}) / K(w_1..w_m) = [0; w_m, ..., w_1]` as rationals.
pub fn mirror_ratio_identity(w: &CfWord) -> Result<bool> {
    mirror_ratio_identity_in::<BigInt>(w)
}

pub fn mirror_ratio_identity_in<T: SignedScalar>(w: &CfWord) -> Result<bool> {
    if w.len() < 2 {
        return Err(Error::InvalidArgument("mirror identity needs a word of length at least 2".into()));
    }
    let prev: T = continuant(&w[..w.len() - 1]);
    let full: T = continuant(w);
    let lhs = Ratio::new(prev, full);
    // fold the mirrored word from its far end, independently of the continuant path
    let mirrored = w.mirror();
    let mut value: Ratio<T> = Ratio::zero();
    for &a in mirrored.iter().rev() {
        value = (Ratio::from_integer(T::from(a)) + value).recip();
    }
    Ok(lhs == value)
}
