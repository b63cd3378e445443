//! Littlewood products and certification of constructed pairs.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::certificate::{Bound, Certificate, Depths, Link, Provenance, Verdict};
use crate::cf::{mirror_ratio_identity, rational_of_word, refine_depth, CfStream, Step};
use crate::constructor::{ConstructionRecord, TheoremTag};
use crate::error::{Error, Result};
use crate::{Interval, Rational};

/// `q ||q alpha|| ||q beta||` with width at most `width`.
pub fn littlewood_product(q: &BigInt, alpha: &CfStream, beta: &CfStream, width: &Rational) -> Result<Interval> {
    littlewood_product_with_depths(q, alpha, beta, width).map(|(iv, _)| iv)
}

/// [`littlewood_product`] together with the depths used for each factor.
pub fn littlewood_product_with_depths(q: &BigInt, alpha: &CfStream, beta: &CfStream, width: &Rational) -> Result<(Interval, Depths)> {
    let qq = Rational::from_integer(q.clone());
    // each norm is at most 1/2, so factor widths of width/(2q) suffice
    let target = width / (&qq * Rational::from_integer(BigInt::from(2)));
    let (na, da) = alpha.norm_dist_with(q, &target, None)?;
    let (nb, db) = beta.norm_dist_with(q, &target, None)?;
    Ok(((na * nb).scale(&qq), Depths { alpha: da, beta: db }))
}

/// `q_n ||q_n alpha||` for the first `count` convergent denominators.
pub fn baseline_check(alpha: &CfStream, count: usize) -> Result<Vec<(BigInt, Interval)>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    for conv in alpha.convergents::<BigInt>(count)? {
        let qq = Rational::from_integer(conv.q.clone());
        let target = Rational::new(BigInt::one(), &conv.q * BigInt::from(1u64 << 20));
        let d = alpha.norm_dist(&conv.q, &target)?;
        out.push((conv.q, d.scale(&qq)));
    }
    Ok(out)
}

/// Target width as a fraction of the bound, halved on indeterminate
/// verdicts up to `max_halvings` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthPolicy {
    pub divisor: u32,
    pub max_halvings: u32,
}

impl Default for WidthPolicy {
    fn default() -> Self {
        Self { divisor: 8, max_halvings: 6 }
    }
}

/// Certifies `q ||q alpha|| ||q beta|| <= 1/(q phi(q))` at `q = s_{m_j}` for
/// each `j` in `js`, where `s_k` are the convergent denominators of `beta`.
///
/// Each certificate carries the chain links: the mirror relation, the
/// prefix bound `||s alpha|| <= s / q_{n_j}^2`, the final comparison
/// `s / q_{n_j}^2 <= bound`, and the separation
/// `|s alpha - s_{m_j - 1}| >= s / ((M+5)^3 q_{n_j}^2)`.
pub fn certify_construction(rec: &ConstructionRecord, js: RangeInclusive<usize>, policy: &WidthPolicy) -> Result<Vec<Certificate>> {
    if rec.theorem() == TheoremTag::Palindromic {
        return Err(Error::InvalidArgument("certification applies to T1, T2 and T3 constructions".into()));
    }
    if *js.start() < 2 {
        return Err(Error::InvalidArgument(format!("certificates start at j = 2, got j = {}", js.start())));
    }
    if let Some(avail) = rec.schedule().available() {
        if *js.end() > avail {
            return Err(Error::ScheduleIndex { index: *js.end(), available: avail });
        }
    }
    let phi = rec.phi().cloned().ok_or_else(|| Error::InvalidArgument("construction has no approximation function".into()))?;
    let burn_in = match rec.eps() {
        Some(_) => {
            let count = rec.schedule().available().unwrap_or(*js.end() + 3).min(*js.end() + 3);
            rec.growth_report(count)?.map(|g| g.burn_in)
        }
        None => None,
    };
    let mut out = Vec::new();
    for j in js {
        let mut cert = certify_one(rec, j, &phi, policy)?;
        cert.advisory = match burn_in {
            Some(Some(b)) => j < b,
            Some(None) => true,
            None => false,
        };
        out.push(cert);
    }
    Ok(out)
}

fn certify_one(rec: &ConstructionRecord, j: usize, phi: &crate::constructor::PhiFunction, policy: &WidthPolicy) -> Result<Certificate> {
    let m = usize::try_from(rec.m(j)?).map_err(|_| Error::ScheduleOverflow(j))?;
    let alpha = rec.block_alpha(j);
    let beta = rec.beta();
    let mut links = Vec::new();

    // mirror relation: s_{m-1}/s_m = [0; b_m, ..., b_1] = [0; a_1..a_{n_j}, t_{j-1}, ...]
    let prefix = beta.prefix(m)?;
    let expected = rec.expected_prefix(j)?;
    let block = rec.block_prefix(j)?;
    let mirrored = prefix.mirror();
    let structural = prefix == expected && mirrored[..block.len()] == block[..] && mirrored.get(block.len()) == Some(&rec.t(j - 1)?);
    let [s, s_prev, _, _] = beta.convergent_matrix::<BigInt>(m)?;
    let ratio_ok = mirror_ratio_identity(&prefix)? && rational_of_word(&mirrored)? == Rational::new(s_prev.clone(), s.clone());
    links.push(Link::check(
        "mirror",
        structural && ratio_ok,
        format!("beta prefix of length {m} mirrors to a_1..a_{{{}}} t_{} ...", block.len(), j - 1),
    ));

    let q_n = crate::cf::continuant::<BigInt>(&block);
    let q_n2 = &q_n * &q_n;
    let prefix_bound = Rational::new(s.clone(), q_n2.clone());
    let bound = Bound::inverse_q_phi(&s, phi)?;
    let bound_lo = bound.lower_approx()?;

    let mut width = bound_lo.clone() / Rational::from_integer(BigInt::from(policy.divisor.max(1)));
    let mut halvings = 0;
    let mut best: Option<(Interval, Depths)> = None;
    let (product, depths) = loop {
        let (product, depths) = match littlewood_product_with_depths(&s, alpha, beta, &width) {
            Ok(r) => r,
            // keep the last enclosure, or fall back to 0 <= q ||q a|| ||q b|| <= q/4
            Err(Error::RefinementCap { depth, .. }) => break best.unwrap_or_else(|| {
                (Interval::new(Rational::zero(), Rational::new(s.clone(), BigInt::from(4))).expect("ordered"), Depths { alpha: depth, beta: depth })
            }),
            Err(e) => return Err(e),
        };
        if bound.verdict(&product) != Verdict::Indeterminate || halvings >= policy.max_halvings {
            break (product, depths);
        }
        best = Some((product, depths));
        width /= Rational::from_integer(BigInt::from(2));
        halvings += 1;
    };

    let target = &prefix_bound / Rational::from_integer(BigInt::from(1u64 << 10));
    links.push(capped_link("prefix", alpha.norm_dist(&s, &target), |norm_alpha| {
        Link::new(
            "prefix",
            Bound::Exact(prefix_bound.clone()).verdict(&norm_alpha),
            format!("||s alpha|| <= s / q_n^2 with q_n = {q_n}; ||s alpha|| in [{}, {}]", norm_alpha.lo(), norm_alpha.hi()),
        )
    })?);
    let beta_width = Rational::new(BigInt::one(), &s * BigInt::from(1u64 << 10));
    links.push(capped_link("beta_factor", beta.norm_dist(&s, &beta_width), |norm_beta| {
        let s_beta = norm_beta.scale(&Rational::from_integer(s.clone()));
        Link::new(
            "beta_factor",
            Bound::Exact(Rational::one()).verdict(&s_beta),
            format!("s ||s beta|| <= 1; s ||s beta|| in [{}, {}]", s_beta.lo(), s_beta.hi()),
        )
    })?);
    let final_link = match bound.compare(&prefix_bound) {
        Some(o) if o.is_le() => Verdict::Pass,
        Some(_) => Verdict::Fail,
        None => Verdict::Indeterminate,
    };
    links.push(Link::new("final", final_link, format!("s / q_n^2 <= {bound}")));

    // separation: |s alpha - s_{m-1}| >= s / ((M+5)^3 q_n^2)
    let m5 = BigInt::from(rec.bound() + 5);
    let floor = Rational::new(s.clone(), num_traits::pow(m5, 3) * &q_n2);
    let sep = separation(alpha, &s, &s_prev, &floor, m)?;
    links.push(sep);

    let mut cert = Certificate::new(
        &rec.theorem().to_string(),
        &s,
        &product,
        &bound,
        Provenance::Construction { theorem: rec.theorem().to_string(), j, m: m as u64 },
        depths,
    );
    cert.links = links;
    Ok(cert)
}

/// A link from an enclosure, indeterminate when refinement hit its cap.
fn capped_link(name: &str, enclosure: Result<Interval>, link: impl FnOnce(Interval) -> Link) -> Result<Link> {
    match enclosure {
        Ok(iv) => Ok(link(iv)),
        Err(Error::RefinementCap { depth, .. }) => Ok(Link::new(name, Verdict::Indeterminate, format!("undecided at depth {depth}"))),
        Err(e) => Err(e),
    }
}

fn separation(alpha: &CfStream, s: &BigInt, s_prev: &BigInt, floor: &Rational, start: usize) -> Result<Link> {
    let scale = Rational::from_integer(s.clone());
    let shift = Rational::from_integer(-s_prev.clone());
    let cap = start + 16 * s.bits() as usize + 256;
    let result = refine_depth(start.max(2), cap, "separation", |depth| {
        let (enc, _) = alpha.enclosure_or_value(depth)?;
        let diff = enc.scale(&scale).shift(&shift).abs();
        if diff.lo() >= floor {
            Ok(Step::Done(Link::check("separation", true, format!("|s alpha - s_(m-1)| >= {}", diff.lo()))))
        } else if diff.hi() < floor {
            Ok(Step::Done(Link::check("separation", false, format!("|s alpha - s_(m-1)| <= {}", diff.hi()))))
        } else {
            Ok(Step::Deeper)
        }
    });
    match result {
        Ok(link) => Ok(link),
        Err(Error::RefinementCap { depth, .. }) => Ok(Link::new("separation", Verdict::Indeterminate, format!("undecided at depth {depth}"))),
        Err(e) => Err(e),
    }
}

/// `q^2 ||q alpha|| ||q beta||` enclosures for `q = 1..=big_q`.
pub fn q2_products(alpha: &CfStream, beta: &CfStream, big_q: u64) -> Result<Vec<(u64, Interval)>> {
    if big_q == 0 {
        return Err(Error::InvalidArgument("Q must be at least 1".into()));
    }
    let q_bits = 64 - big_q.leading_zeros() as usize;
    let start = 4 * q_bits + 8;
    let cap = start * 64;
    refine_depth(start, cap, "q^2 product scan", |depth| {
        let (ea, _) = alpha.enclosure_or_value(depth)?;
        let (eb, _) = beta.enclosure_or_value(depth)?;
        let mut rows = Vec::with_capacity(big_q as usize);
        for q in 1..=big_q {
            let qq = Rational::from_integer(BigInt::from(q));
            let (Some(na), Some(nb)) = (ea.scale(&qq).nearest_integer_distance(), eb.scale(&qq).nearest_integer_distance()) else {
                return Ok(Step::Deeper);
            };
            let value = (na * nb).scale(&(&qq * &qq));
            let exact_zero = value.hi().is_zero();
            if !exact_zero && (!value.is_positive() || value.width() * Rational::from_integer(BigInt::from(16)) > *value.hi()) {
                return Ok(Step::Deeper);
            }
            rows.push((q, value));
        }
        Ok(Step::Done(rows))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructor::{build_beta_thm2, GrowthSpec, MarkerRule};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn golden_product_at_five() {
        let g: CfStream = "0; | (1)".parse().unwrap();
        let iv = littlewood_product(&BigInt::from(5), &g, &g, &r(1, 1_000_000)).unwrap();
        // ||5 phi|| = (5 sqrt5 - 11)/2 = 0.0901699...; 5 * that^2 = 0.0406530...
        assert!(iv.width() <= r(1, 1_000_000));
        assert!(iv.lo() > &r(406_529, 10_000_000) && iv.hi() < &r(406_531, 10_000_000), "{iv}");
    }

    #[test]
    fn q_one_is_product_of_distances() {
        let a: CfStream = "0; | (2)".parse().unwrap();
        let b: CfStream = "0; | (1)".parse().unwrap();
        let iv = littlewood_product(&BigInt::one(), &a, &b, &r(1, 1000)).unwrap();
        // (sqrt2 - 1)(1 - (sqrt5-1)/2) = 0.41421 * 0.38197 = 0.15822
        assert!(iv.contains(&r(15822, 100_000)) || (iv.lo() > &r(1582, 10_000) && iv.hi() < &r(1583, 10_000)), "{iv}");
    }

    #[test]
    fn baseline_values() {
        let g: CfStream = "0; | (1)".parse().unwrap();
        let rows = baseline_check(&g, 20).unwrap();
        assert!(rows.iter().all(|(_, iv)| iv.is_positive() && iv.hi() < &Rational::one()));
        for (_, iv) in &rows[4..] {
            assert!(iv.lo() >= &r(44, 100) && iv.hi() <= &r(45, 100), "{iv}");
        }
        let s: CfStream = "0; | (2)".parse().unwrap();
        let rows = baseline_check(&s, 20).unwrap();
        for (_, iv) in &rows[4..] {
            assert!(iv.lo() >= &r(35, 100) && iv.hi() <= &r(36, 100), "{iv}");
        }
    }

    #[test]
    fn thm2_certificates_at_two_and_three() {
        let rec = build_beta_thm2("0; | (2)".parse().unwrap(), 2, r(1, 2), MarkerRule::Constant(3), GrowthSpec::Ratio(r(19, 1))).unwrap();
        let certs = certify_construction(&rec, 2..=3, &WidthPolicy::default()).unwrap();
        assert_eq!(certs.len(), 2);
        for c in &certs {
            assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
            assert!(c.links_pass(), "{:?}", c.links);
            assert!(c.advisory);
        }
    }

    #[test]
    fn fibonacci_minimizer() {
        let g: CfStream = "0; | (1)".parse().unwrap();
        let rows = q2_products(&g, &g, 100).unwrap();
        let (q, _) = rows.iter().min_by(|a, b| a.1.hi().cmp(b.1.hi())).unwrap();
        assert!([1u64, 2, 3, 5, 8, 13, 21, 34, 55, 89].contains(q));
    }
}
