//! Block-length schedules `(n_j)` and their running totals
//! `m_j = n_1 + ... + n_j + (j - 1)`.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::phi::PhiFunction;
use crate::error::{Error, Result};
use crate::log2::{cmp_with_log2, log2_bounds};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleRule {
    /// Each `n_j` (`j >= 2`) minimal with
    /// `phi(2^((m_j - 1)/2)) <= (1/4) (M+3)^(-2(m_{j-1}+1))`.
    MinimalPhi { phi: PhiFunction, bound: u64 },
    /// `n_{j+1} = ceil(ratio * n_j)`.
    Geometric { ratio: Rational },
    /// A caller-supplied finite list.
    Explicit(Vec<u64>),
}

/// A lazily extended schedule with `n_1 = 1` (explicit lists excepted).
#[derive(Debug)]
pub struct Schedule {
    rule: ScheduleRule,
    terms: Mutex<Vec<u64>>,
}

impl Schedule {
    pub fn new(rule: ScheduleRule) -> Result<Self> {
        let terms = match &rule {
            ScheduleRule::Explicit(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidArgument("explicit schedule is empty".into()));
                }
                if let Some(pos) = list.iter().position(|&n| n == 0) {
                    return Err(Error::InvalidArgument(format!("schedule term {} is zero", pos + 1)));
                }
                list.clone()
            }
            ScheduleRule::Geometric { ratio } if ratio <= &Rational::one() => {
                return Err(Error::InvalidArgument(format!("geometric ratio must exceed 1, got {ratio}")));
            }
            _ => vec![1],
        };
        Ok(Self { rule, terms: Mutex::new(terms) })
    }

    pub fn rule(&self) -> &ScheduleRule {
        &self.rule
    }

    /// Number of terms available, `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        match &self.rule {
            ScheduleRule::Explicit(list) => Some(list.len()),
            _ => None,
        }
    }

    /// `n_j`, 1-based.
    pub fn n(&self, j: usize) -> Result<u64> {
        Ok(self.terms(j)?[j - 1])
    }

    /// `m_j`, 1-based.
    pub fn m(&self, j: usize) -> Result<u64> {
        let terms = self.terms(j)?;
        running_total(&terms[..j]).ok_or(Error::ScheduleOverflow(j))
    }

    /// `n_1 .. n_count`.
    pub fn terms(&self, count: usize) -> Result<Vec<u64>> {
        if count == 0 {
            return Err(Error::ScheduleIndex { index: 0, available: 0 });
        }
        let mut terms = self.terms.lock().unwrap_or_else(|p| p.into_inner());
        while terms.len() < count {
            let j = terms.len() + 1;
            let next = match &self.rule {
                ScheduleRule::Explicit(list) => {
                    return Err(Error::ScheduleIndex { index: count, available: list.len() });
                }
                ScheduleRule::Geometric { ratio } => {
                    let prev = Rational::from_integer(BigInt::from(terms[j - 2]));
                    (ratio * prev).ceil().to_integer().to_u64().ok_or(Error::ScheduleOverflow(j))?
                }
                ScheduleRule::MinimalPhi { phi, bound } => {
                    let m_prev = running_total(&terms).ok_or(Error::ScheduleOverflow(j))?;
                    minimal_phi_term(phi, *bound, m_prev).map_err(|e| match e {
                        Error::ScheduleOverflow(_) => Error::ScheduleOverflow(j),
                        other => other,
                    })?
                }
            };
            terms.push(next);
        }
        Ok(terms[..count].to_vec())
    }
}

fn running_total(terms: &[u64]) -> Option<u64> {
    let sum = terms.iter().try_fold(0u64, |acc, &n| acc.checked_add(n))?;
    sum.checked_add(terms.len() as u64 - 1)
}

/// Right-hand side `(1/4) (M+3)^(-2(m_prev+1))`.
pub fn minimal_phi_rhs(bound: u64, m_prev: u64) -> Rational {
    let base = BigInt::from(bound + 3);
    let denom = num_traits::pow(base, 2 * (m_prev as usize + 1)) * 4;
    Rational::new(BigInt::one(), denom)
}

/// Whether `n` satisfies the minimal-phi condition after `m_prev`.
pub fn minimal_phi_holds(phi: &PhiFunction, bound: u64, m_prev: u64, n: u64) -> Result<bool> {
    let m = m_prev + n + 1;
    phi.le_at_sqrt2_power(m - 1, &minimal_phi_rhs(bound, m_prev))
}

fn minimal_phi_term(phi: &PhiFunction, bound: u64, m_prev: u64) -> Result<u64> {
    let e = phi.min_sqrt2_exponent(&minimal_phi_rhs(bound, m_prev))?;
    let e = e.to_u64().ok_or(Error::ScheduleOverflow(0))?;
    // m_j - 1 = m_prev + n_j >= e
    Ok(e.saturating_sub(m_prev).max(1))
}

/// Whether `2^((m_prev + n)/2) >= (2 (M+3)^(m_prev+1))^(2/eps)`, the
/// sufficient growth condition for the power-law bound at block `j`.
pub fn growth_condition_holds(n: u64, m_prev: u64, bound: u64, eps: &Rational) -> bool {
    // divide exponents: (eps (m_prev + n) - 4) / (4 (m_prev + 1)) >= log2(M+3)
    let lhs = (eps * Rational::from_integer(BigInt::from(m_prev + n)) - Rational::from_integer(BigInt::from(4)))
        / Rational::from_integer(BigInt::from(4 * (m_prev + 1)));
    cmp_with_log2(&lhs, bound + 3).is_ge()
}

/// Smallest `n` satisfying [`growth_condition_holds`].
pub fn required_growth(m_prev: u64, bound: u64, eps: &Rational) -> u64 {
    let (lo, _) = log2_bounds(&(bound + 3).into(), 32);
    // n >= (4 (m_prev+1) L + 4) / eps - m_prev
    let estimate = (Rational::from_integer(BigInt::from(4 * (m_prev + 1))) * lo + Rational::from_integer(BigInt::from(4))) / eps
        - Rational::from_integer(BigInt::from(m_prev));
    let mut n = estimate.floor().to_integer();
    if n.is_negative() || n < BigInt::one() {
        n = BigInt::one();
    }
    let mut n = n.to_u64().unwrap_or(u64::MAX);
    while n > 1 && growth_condition_holds(n - 1, m_prev, bound, eps) {
        n -= 1;
    }
    while !growth_condition_holds(n, m_prev, bound, eps) {
        n += 1;
    }
    n
}

/// Rational enclosure of `4 log2(M+3) / eps`.
pub fn growth_threshold(bound: u64, eps: &Rational) -> (Rational, Rational) {
    let (lo, hi) = log2_bounds(&(bound + 3).into(), 40);
    let k = Rational::from_integer(BigInt::from(4)) / eps;
    (&k * lo, k * hi)
}

/// Whether `ratio > 4 log2(M+3) / eps`, decided exactly.
pub fn ratio_exceeds_threshold(ratio: &Rational, bound: u64, eps: &Rational) -> bool {
    let scaled = ratio * eps / Rational::from_integer(BigInt::from(4));
    cmp_with_log2(&scaled, bound + 3).is_gt()
}

/// Outcome of checking the growth condition on finitely many terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthReport {
    /// Number of terms examined.
    pub checked: usize,
    /// First index `j0 >= 2` from which every examined term satisfies the
    /// condition; `None` when the last examined term fails.
    pub burn_in: Option<usize>,
    /// First failing index, if any.
    pub first_violation: Option<usize>,
    /// Per-index `(j, n_j, required n_j)`.
    pub rows: Vec<(usize, u64, u64)>,
}

pub fn check_growth(schedule: &Schedule, count: usize, bound: u64, eps: &Rational) -> Result<GrowthReport> {
    let terms = schedule.terms(count)?;
    let mut rows = Vec::new();
    let mut first_violation = None;
    let mut last_violation = None;
    for j in 2..=count {
        let m_prev = running_total(&terms[..j - 1]).ok_or(Error::ScheduleOverflow(j))?;
        let n = terms[j - 1];
        let required = required_growth(m_prev, bound, eps);
        if n < required {
            first_violation.get_or_insert(j);
            last_violation = Some(j);
        }
        rows.push((j, n, required));
    }
    let burn_in = match last_violation {
        None => Some(2),
        Some(j) if j < count => Some(j + 1),
        Some(_) => None,
    };
    Ok(GrowthReport { checked: count, burn_in, first_violation, rows })
}
