//! Closed intervals with exact rational endpoints.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::SignedScalar;

/// `[lo, hi]` with `lo <= hi`. Every operation returns an interval that
/// contains all values reachable from its inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatInterval<T: SignedScalar> {
    lo: Ratio<T>,
    hi: Ratio<T>,
}

impl<T: SignedScalar> RatInterval<T> {
    pub fn new(lo: Ratio<T>, hi: Ratio<T>) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("interval endpoints out of order: {lo} > {hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// Builds the interval spanned by two points in either order.
    pub fn spanning(a: Ratio<T>, b: Ratio<T>) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn point(x: Ratio<T>) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Ratio<T> {
        &self.lo
    }

    pub fn hi(&self) -> &Ratio<T> {
        &self.hi
    }

    pub fn into_bounds(self) -> (Ratio<T>, Ratio<T>) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Ratio<T> {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> Ratio<T> {
        (self.lo.clone() + self.hi.clone()) / Ratio::from_integer(T::from(2))
    }

    pub fn contains(&self, x: &Ratio<T>) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Ratio::zero())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Interval of `|x|` for `x` in `self`.
    pub fn abs(&self) -> Self {
        if self.lo >= Ratio::zero() {
            self.clone()
        } else if self.hi <= Ratio::zero() {
            -self.clone()
        } else {
            Self {
                lo: Ratio::zero(),
                hi: self.hi.clone().max(-self.lo.clone()),
            }
        }
    }

    pub fn scale(&self, k: &Ratio<T>) -> Self {
        Self::spanning(self.lo.clone() * k.clone(), self.hi.clone() * k.clone())
    }

    pub fn shift(&self, k: &Ratio<T>) -> Self {
        Self {
            lo: self.lo.clone() + k.clone(),
            hi: self.hi.clone() + k.clone(),
        }
    }

    /// `[lo^n, hi^n]`-style power for nonnegative intervals.
    pub fn pow_nonneg(&self, n: u32) -> Result<Self> {
        if self.lo < Ratio::zero() {
            return Err(Error::InvalidArgument("pow_nonneg on an interval with negative part".into()));
        }
        Ok(Self {
            lo: num_traits::pow(self.lo.clone(), n as usize),
            hi: num_traits::pow(self.hi.clone(), n as usize),
        })
    }

    /// Three-way comparison against a point: `Less` when the whole interval
    /// lies below `x`, `Greater` when above, `None` when `x` is inside.
    pub fn compare_point(&self, x: &Ratio<T>) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Enclosure of the distance to the nearest integer, or `None` when the
    /// interval meets a half-integer (the nearest integer is ambiguous there).
    pub fn nearest_integer_distance(&self) -> Option<Self> {
        let two = T::from(2);
        let half = Ratio::new(T::one(), two.clone());
        let base = self.lo.floor();
        let lower_half = base.clone() + half.clone();
        if self.hi < lower_half {
            // [lo, hi] within [k, k + 1/2)
            return Some(Self {
                lo: self.lo.clone() - base.clone(),
                hi: self.hi.clone() - base,
            });
        }
        if self.lo <= lower_half {
            return None;
        }
        let next = base.clone() + Ratio::one();
        let upper_half = next.clone() + half;
        if self.hi <= next {
            return Some(Self {
                lo: next.clone() - self.hi.clone(),
                hi: next - self.lo.clone(),
            });
        }
        if self.hi < upper_half {
            // straddles the integer `next`
            let left = next.clone() - self.lo.clone();
            let right = self.hi.clone() - next;
            return Some(Self {
                lo: Ratio::zero(),
                hi: left.max(right),
            });
        }
        None
    }

    /// Widens the endpoints to dyadic rationals with `bits` fractional bits.
    pub fn round_outward(&self, bits: u32) -> Self {
        let scale = num_traits::pow(T::from(2), bits as usize);
        let lo_num = (self.lo.clone() * Ratio::from_integer(scale.clone())).floor().to_integer();
        let hi_num = (self.hi.clone() * Ratio::from_integer(scale.clone())).ceil().to_integer();
        Self {
            lo: Ratio::new(lo_num, scale.clone()),
            hi: Ratio::new(hi_num, scale),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo > Ratio::zero()
    }

    /// Image under `x -> (a x + b) / (c x + d)`; fails when the denominator
    /// vanishes somewhere on the interval.
    pub fn mobius_image(&self, a: &T, b: &T, c: &T, d: &T) -> Result<Self> {
        let den_at = |x: &Ratio<T>| x.clone() * Ratio::from_integer(c.clone()) + Ratio::from_integer(d.clone());
        let dl = den_at(&self.lo);
        let dh = den_at(&self.hi);
        if dl.is_zero() || dh.is_zero() || dl.is_positive() != dh.is_positive() {
            return Err(Error::Pole(format!("denominator changes sign on [{}, {}]", self.lo, self.hi)));
        }
        let num_at = |x: &Ratio<T>| x.clone() * Ratio::from_integer(a.clone()) + Ratio::from_integer(b.clone());
        Ok(Self::spanning(num_at(&self.lo) / dl, num_at(&self.hi) / dh))
    }
}

impl<T: SignedScalar> Add for RatInterval<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
}

impl<T: SignedScalar> Sub for RatInterval<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { lo: self.lo - rhs.hi, hi: self.hi - rhs.lo }
    }
}

impl<T: SignedScalar> Neg for RatInterval<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { lo: -self.hi, hi: -self.lo }
    }
}

impl<T: SignedScalar> Mul for RatInterval<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let zero = Ratio::zero();
        if self.lo >= zero && rhs.lo >= zero {
            return Self { lo: self.lo * rhs.lo, hi: self.hi * rhs.hi };
        }
        let products = [
            self.lo.clone() * rhs.lo.clone(),
            self.lo.clone() * rhs.hi.clone(),
            self.hi.clone() * rhs.lo.clone(),
            self.hi * rhs.hi,
        ];
        let lo = products.iter().min().cloned().unwrap_or_default();
        let hi = products.iter().max().cloned().unwrap_or_default();
        Self { lo, hi }
    }
}

impl<T: SignedScalar> fmt::Display for RatInterval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Floor of a rational as an integer.
pub fn floor_int<T: SignedScalar>(x: &Ratio<T>) -> T {
    x.numer().div_floor(x.denom())
}
