//! Rigorous rational enclosures of binary logarithms, computed with integer
//! arithmetic only.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Encloses `log2(k)` for `k >= 1` in an interval of width at most
/// `2^-frac_bits` (occasionally wider when a squaring step lands too close to
/// 2 to decide a bit; the result is always valid).
pub fn log2_bounds(k: &BigUint, frac_bits: u32) -> (Rational, Rational) {
    assert!(!k.is_zero(), "log2 of zero");
    let e = k.bits() - 1;
    if k.count_ones() == 1 {
        let exact = Rational::from_integer(BigInt::from(e));
        return (exact.clone(), exact);
    }
    let guard = 2 * frac_bits as u64 + 64;
    // y = k / 2^e in [1, 2), held as fixed point over 2^guard
    let (mut lo, mut hi) = if e >= guard {
        let shifted = k >> (e - guard) as usize;
        let exact = (&shifted << (e - guard) as usize) == *k;
        (shifted.clone(), if exact { shifted } else { shifted + 1u32 })
    } else {
        let v = k << (guard - e) as usize;
        (v.clone(), v)
    };
    let one = BigUint::one() << guard as usize;
    let two = &one << 1usize;
    let mut bits = BigUint::zero();
    let mut determined = 0u32;
    for _ in 0..frac_bits {
        lo = (&lo * &lo) >> guard as usize;
        let sq = &hi * &hi;
        let (q, r) = sq.div_rem(&one);
        hi = if r.is_zero() { q } else { q + 1u32 };
        if lo >= two {
            bits = (bits << 1usize) + 1u32;
            lo >>= 1usize;
            hi = (&hi + 1u32) >> 1usize;
        } else if hi < two {
            bits <<= 1usize;
        } else {
            break;
        }
        determined += 1;
    }
    let denom = BigInt::one() << determined as usize;
    let base = BigInt::from(e) * &denom;
    let lo_num = base + BigInt::from(bits);
    let hi_num = &lo_num + 1;
    (Rational::new(lo_num, denom.clone()), Rational::new(hi_num, denom))
}

/// Exact comparison of a rational `x` with `log2(k)` for an integer `k >= 1`.
///
/// Uses the identity `x <= log2 k  <=>  2^u <= k^v` for `x = u/v` when the
/// powers are small, otherwise refines [`log2_bounds`] until decided. Equality
/// only happens when `k` is a power of two, which is detected exactly.
pub fn cmp_with_log2(x: &Rational, k: u64) -> Ordering {
    assert!(k >= 1, "log2 of zero");
    if k.is_power_of_two() {
        let exact = Rational::from_integer(BigInt::from(k.trailing_zeros()));
        return x.cmp(&exact);
    }
    if !x.is_positive() {
        // log2 k > 0 for k >= 2
        return Ordering::Less;
    }
    let u = x.numer().magnitude().clone();
    let v = x.denom().magnitude().clone();
    let log_k = 64 - k.leading_zeros() as u64;
    let cost = v.clone() * BigUint::from(log_k);
    if u.bits() <= 20 && cost <= BigUint::from(1u64 << 20) && v.bits() <= 32 {
        let u = u.to_u64_digits().first().copied().unwrap_or(0);
        let v = v.to_u64_digits().first().copied().unwrap_or(0);
        let lhs = BigUint::one() << u as usize;
        let rhs = num_traits::pow(BigUint::from(k), v as usize);
        return lhs.cmp(&rhs);
    }
    let kb = BigUint::from(k);
    let mut bits = 64;
    loop {
        let (lo, hi) = log2_bounds(&kb, bits);
        if x < &lo {
            return Ordering::Less;
        }
        if x > &hi {
            return Ordering::Greater;
        }
        bits *= 2;
        assert!(bits <= 1 << 20, "log2 comparison failed to separate {x} from log2({k})");
    }
}

/// Rational bounds on `log2(n)` for a positive rational `n`.
pub fn log2_bounds_rational(n: &Rational, frac_bits: u32) -> (Rational, Rational) {
    let (nl, nh) = log2_bounds(n.numer().magnitude(), frac_bits);
    let (dl, dh) = log2_bounds(n.denom().magnitude(), frac_bits);
    (nl - dh, nh - dl)
}
