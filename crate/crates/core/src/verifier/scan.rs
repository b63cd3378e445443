//! Finite scans: small integer relations and `q^2` product minima.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::littlewood::q2_products;
use crate::cf::CfStream;
use crate::error::{Error, Result};
use crate::{Interval, Rational};

/// Rigorous lower bound on `|A alpha + B beta + C|` for one triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleBound {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    #[serde(serialize_with = "ser_rational")]
    pub lower: Rational,
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RelationOutcome {
    /// Every triple with entries bounded by `H` stays away from zero.
    NoRelation {
        #[serde(serialize_with = "ser_rational")]
        min_lower: Rational,
        argmin: (i64, i64, i64),
        triples: Vec<TripleBound>,
    },
    /// Triples whose enclosure still contains 0 at the refinement cap
    /// (`exact` when the value is provably 0).
    Candidate { triples: Vec<(i64, i64, i64)>, exact: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationWitness {
    pub h: u32,
    pub checked: usize,
    pub depth: usize,
    #[serde(flatten)]
    pub outcome: RelationOutcome,
}

/// Triples `(A, B, C) != 0` with entries in `[-H, H]`, one per sign class
/// (first nonzero entry positive).
fn canonical_triples(h: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for a in -h..=h {
        for b in -h..=h {
            for c in -h..=h {
                let first = [a, b, c].into_iter().find(|&v| v != 0);
                if matches!(first, Some(v) if v > 0) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

fn distance_to_point(iv: &Interval, x: &Rational) -> Rational {
    if iv.contains(x) {
        Rational::zero()
    } else if iv.hi() < x {
        x - iv.hi()
    } else {
        iv.lo() - x
    }
}

/// Searches for `A alpha + B beta + C = 0` with `|A|, |B|, |C| <= H`. The
/// enclosures are refined until each has width at most `width` and no
/// triple's interval contains 0, or until `max_depth`.
pub fn independence_scan(alpha: &CfStream, beta: &CfStream, h: u32, width: &Rational, max_depth: usize) -> Result<RelationWitness> {
    if h == 0 {
        return Err(Error::InvalidArgument("H must be at least 1".into()));
    }
    if !width.is_positive() {
        return Err(Error::InvalidArgument("width must be positive".into()));
    }
    let triples = canonical_triples(h as i64);
    let same = alpha.same_as(beta);
    let mut cache: HashMap<usize, (Interval, Interval)> = HashMap::new();
    let mut enclosures = |depth: usize| -> Result<(Interval, Interval)> {
        if let Some(e) = cache.get(&depth) {
            return Ok(e.clone());
        }
        let ea = alpha.enclosure_or_value(depth)?.0;
        let eb = if same { ea.clone() } else { beta.enclosure_or_value(depth)?.0 };
        cache.insert(depth, (ea.clone(), eb.clone()));
        Ok((ea, eb))
    };

    let mut bounds = Vec::with_capacity(triples.len());
    let mut candidates = Vec::new();
    let mut exact = true;
    let mut deepest = 0;
    for &(a, b, c) in &triples {
        let ra = Rational::from_integer(BigInt::from(a));
        let rb = Rational::from_integer(BigInt::from(b));
        let target = Rational::from_integer(BigInt::from(-c));
        let mut depth = 8.min(max_depth.max(2));
        loop {
            let value = if same {
                // (A + B) alpha: exact when A + B = 0
                let coeff = &ra + &rb;
                if coeff.is_zero() {
                    Interval::point(Rational::zero())
                } else {
                    enclosures(depth)?.0.scale(&coeff)
                }
            } else if a == 0 && b == 0 {
                Interval::point(Rational::zero())
            } else {
                let (ea, eb) = enclosures(depth)?;
                ea.scale(&ra) + eb.scale(&rb)
            };
            let lower = distance_to_point(&value, &target);
            let is_point = value.width().is_zero();
            if lower.is_positive() && (value.width() <= *width || is_point) {
                deepest = deepest.max(depth);
                bounds.push(TripleBound { a, b, c, lower });
                break;
            }
            if is_point || depth >= max_depth {
                deepest = deepest.max(depth);
                exact &= is_point;
                candidates.push((a, b, c));
                break;
            }
            depth = (depth * 2).min(max_depth);
        }
    }
    let outcome = if candidates.is_empty() {
        let best = bounds.iter().min_by(|x, y| x.lower.cmp(&y.lower)).expect("at least one triple");
        RelationOutcome::NoRelation { min_lower: best.lower.clone(), argmin: (best.a, best.b, best.c), triples: bounds }
    } else {
        RelationOutcome::Candidate { triples: candidates, exact }
    };
    Ok(RelationWitness { h, checked: triples.len(), depth: deepest, outcome })
}

/// Minimum of `q^2 ||q alpha|| ||q beta||` over `1 <= q <= Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundReport {
    pub big_q: u64,
    /// The `q` with the smallest upper endpoint.
    pub argmin: u64,
    #[serde(serialize_with = "ser_interval")]
    pub value_at_argmin: Interval,
    /// `[min lo, min hi]` over all `q`, which encloses the true minimum.
    #[serde(serialize_with = "ser_interval")]
    pub minimum: Interval,
}

fn ser_interval<S: serde::Serializer>(x: &Interval, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Interval", 2)?;
    st.serialize_field("lo", &format!("{}/{}", x.lo().numer(), x.lo().denom()))?;
    st.serialize_field("hi", &format!("{}/{}", x.hi().numer(), x.hi().denom()))?;
    st.end()
}

pub fn lower_bound_scan(alpha: &CfStream, beta: &CfStream, big_q: u64) -> Result<LowerBoundReport> {
    let rows = q2_products(alpha, beta, big_q)?;
    let (argmin, at) = rows.iter().min_by(|x, y| x.1.hi().cmp(y.1.hi())).cloned().expect("Q >= 1");
    let min_lo = rows.iter().map(|(_, iv)| iv.lo().clone()).min().expect("Q >= 1");
    let minimum = Interval::new(min_lo, at.hi().clone())?;
    Ok(LowerBoundReport { big_q, argmin, value_at_argmin: at, minimum })
}

/// Whether `q` is a Fibonacci number (used for reporting and tests).
pub fn is_fibonacci(q: u64) -> bool {
    let is_square = |x: u128| {
        let r = x.sqrt();
        r * r == x
    };
    let x = 5 * (q as u128) * (q as u128);
    is_square(x + 4) || is_square(x - 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_are_canonical() {
        let t = canonical_triples(1);
        assert_eq!(t.len(), 13);
        assert!(t.contains(&(1, -1, 0)));
        assert!(!t.contains(&(-1, 1, 0)));
        assert_eq!(canonical_triples(5).len(), (11 * 11 * 11 - 1) / 2);
    }

    #[test]
    fn self_pair_has_exact_relation() {
        let a: CfStream = "0; | (1)".parse().unwrap();
        let w = independence_scan(&a, &a, 2, &Rational::new(1.into(), 1000.into()), 64).unwrap();
        match w.outcome {
            RelationOutcome::Candidate { triples, exact } => {
                assert!(triples.contains(&(1, -1, 0)));
                assert!(exact);
                assert!(triples.iter().all(|&(a, b, c)| a + b == 0 && c == 0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn independent_quadratics_at_small_height() {
        // sqrt2 - 1 and (sqrt5 - 1)/2 are independent over Q together with 1
        let a: CfStream = "0; | (2)".parse().unwrap();
        let b: CfStream = "0; | (1)".parse().unwrap();
        let w = independence_scan(&a, &b, 3, &Rational::new(1.into(), 1000.into()), 256).unwrap();
        match w.outcome {
            RelationOutcome::NoRelation { min_lower, triples, .. } => {
                assert!(min_lower.is_positive());
                assert_eq!(triples.len(), w.checked);
                let constant = triples.iter().find(|t| t.a == 0 && t.b == 0 && t.c == 1).unwrap();
                assert_eq!(constant.lower, Rational::from_integer(1.into()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lower_bound_minimizer_is_fibonacci() {
        let g: CfStream = "0; | (1)".parse().unwrap();
        let rep = lower_bound_scan(&g, &g, 100).unwrap();
        assert!(is_fibonacci(rep.argmin), "{}", rep.argmin);
        assert!(rep.minimum.is_positive());
        assert!(is_fibonacci(89) && !is_fibonacci(90));
    }

    #[test]
    fn q_one_included() {
        let a: CfStream = "0; | (2)".parse().unwrap();
        let rep = lower_bound_scan(&a, &a, 1).unwrap();
        assert_eq!(rep.argmin, 1);
    }
}
