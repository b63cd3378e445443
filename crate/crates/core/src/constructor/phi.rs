use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::log2::log2_bounds;
use crate::Rational;

/// Approximation functions `phi` from a closed catalog. Each member has
/// `phi(1) = 1`, is non-increasing, tends to 0, and `q phi(q) -> infinity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiFunction {
    /// `phi(q) = q^(-eps)` with `0 < eps < 1`.
    Power(Rational),
    /// `phi(q) = 1 / (1 + log2 q)`.
    InverseLog,
}

impl PhiFunction {
    pub fn power(eps: Rational) -> Result<Self> {
        if !eps.is_positive() || eps >= Rational::one() {
            return Err(Error::InvalidArgument(format!("power exponent must lie in (0, 1), got {eps}")));
        }
        Ok(Self::Power(eps))
    }

    /// Rigorous `(lower, upper)` bounds of `phi(q)` at a positive integer.
    pub fn bounds(&self, q: &BigInt, bits: u32) -> Result<(Rational, Rational)> {
        if !q.is_positive() {
            return Err(Error::InvalidArgument(format!("phi is defined on positive integers, got {q}")));
        }
        match self {
            Self::Power(eps) => {
                let a = exponent_u32(eps.numer())?;
                let b = exponent_u32(eps.denom())?;
                // q^(-a/b) = 2^k / (q^a 2^(bk))^(1/b)
                let k = bits as usize;
                let x: BigUint = num_traits::pow(q.magnitude().clone(), a as usize) << (b as usize * k);
                let r = x.nth_root(b);
                let scale = BigInt::one() << k;
                let upper = Rational::new(scale.clone(), BigInt::from(r.clone()));
                if num_traits::pow(r.clone(), b as usize) == x {
                    return Ok((upper.clone(), upper));
                }
                let lower = Rational::new(scale, BigInt::from(r + 1u32));
                Ok((lower, upper))
            }
            Self::InverseLog => {
                let (lo, hi) = log2_bounds(q.magnitude(), bits);
                let one = Rational::one();
                Ok(((one.clone() + hi).recip(), (one + lo).recip()))
            }
        }
    }

    /// Smallest `e >= 0` with `phi(2^(e/2)) <= rhs`, decided exactly.
    pub fn min_sqrt2_exponent(&self, rhs: &Rational) -> Result<BigUint> {
        if !rhs.is_positive() {
            return Err(Error::InvalidArgument("phi never reaches a non-positive value".into()));
        }
        if rhs >= &Rational::one() {
            return Ok(BigUint::zero());
        }
        match self {
            Self::Power(_) => {
                let holds = |e: u64| self.le_at_sqrt2_power(e, rhs);
                let mut hi = 1u64;
                while !holds(hi)? {
                    hi = hi.checked_mul(2).ok_or(Error::ScheduleOverflow(0))?;
                }
                let mut lo = hi / 2;
                // invariant: holds(hi), !holds(lo) or lo == 0
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if holds(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if lo == 0 && holds(0)? {
                    return Ok(BigUint::zero());
                }
                Ok(BigUint::from(hi))
            }
            Self::InverseLog => {
                // 2 / (e + 2) <= u / v  <=>  e >= 2v/u - 2
                let bound = Rational::from_integer(BigInt::from(2)) / rhs - Rational::from_integer(BigInt::from(2));
                let e = bound.ceil().to_integer();
                Ok(if e.is_negative() { BigUint::zero() } else { e.magnitude().clone() })
            }
        }
    }

    /// Whether `phi(2^(e/2)) <= rhs`, decided with exact integer arithmetic.
    pub fn le_at_sqrt2_power(&self, e: u64, rhs: &Rational) -> Result<bool> {
        if !rhs.is_positive() {
            return Ok(false);
        }
        match self {
            Self::Power(eps) => {
                // 2^(-a e / 2b) <= u/v  <=>  v^(2b) <= u^(2b) 2^(a e)
                let a = exponent_u32(eps.numer())?;
                let b = exponent_u32(eps.denom())? as usize;
                let u = rhs.numer().magnitude();
                let v = rhs.denom().magnitude();
                let shift = (a as u64).checked_mul(e).ok_or(Error::ScheduleOverflow(0))?;
                let lhs = num_traits::pow(v.clone(), 2 * b);
                let rhs_val = num_traits::pow(u.clone(), 2 * b) << shift as usize;
                Ok(lhs <= rhs_val)
            }
            Self::InverseLog => {
                let value = Rational::new(BigInt::from(2), BigInt::from(e) + 2);
                Ok(&value <= rhs)
            }
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

fn exponent_u32(x: &BigInt) -> Result<u32> {
    u32::try_from(x.magnitude().clone()).map_err(|_| Error::InvalidArgument(format!("exponent component {x} too large")))
}

impl fmt::Display for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(eps) => write!(f, "power({eps})"),
            Self::InverseLog => f.write_str("inverse_log"),
        }
    }
}

impl FromStr for PhiFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inverse_log" {
            return Ok(Self::InverseLog);
        }
        if let Some(inner) = s.strip_prefix("power(").and_then(|r| r.strip_suffix(')')) {
            return Self::power(parse_rational(inner)?);
        }
        Err(Error::Parse(format!("unknown phi {s:?}; expected power(p/q) or inverse_log")))
    }
}

/// Parses `p/q` or an integer. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected a rational p/q, got {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
