//! Certificates for the Möbius-pair witnesses.
//!
//! The implied constants of the asymptotic statements are not explicit, so
//! each batch reports its own constant: the smallest integer above every
//! normalized value in the batch. Dual-form witnesses are advisory.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::certificate::{Bound, Certificate, Depths, Link, Provenance, Verdict};
use crate::homography::{DualWitness, PalindromeWitness, Thm6Row};
use crate::Rational;

/// `floor(max) + 1`, or 1 for an empty batch.
fn batch_constant<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.map(|v| v.floor().to_integer()).max().unwrap_or_else(BigInt::zero) + BigInt::one()
}

fn depths(d: usize) -> Depths {
    Depths { alpha: d, beta: d }
}

fn prefix_link(w: &PalindromeWitness) -> Link {
    Link::check("prefix", w.prefix_bound_holds, format!("||Q' alpha|| <= Q'/q^2 at Q' = {}", w.q_prime))
}

/// Certifies `R^2 ||R alpha|| ||R beta|| <= C` for each row, as
/// `R ||R alpha|| ||R beta|| <= C / R`, with `C` the batch constant.
pub fn thm6_certificates(rows: &[Thm6Row]) -> (BigInt, Vec<Certificate>) {
    let c = batch_constant(rows.iter().map(|r| r.value.hi()));
    let certs = rows
        .iter()
        .map(|row| {
            let w = &row.witness;
            let bound = Bound::Exact(Rational::new(c.clone(), row.q.clone()));
            let mut cert = Certificate::new("thm6", &row.q, &w.product, &bound, Provenance::Witness { kind: "thm6".into(), index: row.length }, depths(w.depth));
            cert.links.push(prefix_link(w));
            cert.links.push(Link::new("q2_product", bound.verdict(&w.product), format!("q^2 product in [{}, {}], constant {c}", row.value.lo(), row.value.hi())));
            cert
        })
        .collect();
    (c, certs)
}

/// Certifies `R ||R alpha|| ||R beta|| <= C q_s^3 / q_{s+2r}` with `C` the
/// batch constant over the witnesses' chain constants.
pub fn thm5_certificates(witnesses: &[PalindromeWitness]) -> (BigInt, Vec<Certificate>) {
    let c = batch_constant(witnesses.iter().map(|w| &w.chain_constant));
    let cc = Rational::from_integer(c.clone());
    let certs = witnesses
        .iter()
        .enumerate()
        .map(|(k, w)| {
            // C q_s^3 / q_{s+2r} = C product_hi / chain_constant
            let bound = if w.chain_constant.is_zero() { Rational::zero() } else { &cc * w.product.hi() / &w.chain_constant };
            let mut cert = Certificate::new(
                "thm5",
                &w.r_value,
                &w.product,
                &Bound::Exact(bound),
                Provenance::Witness { kind: "thm5".into(), index: k + 1 },
                depths(w.depth),
            );
            cert.links.push(prefix_link(w));
            cert
        })
        .collect();
    (c, certs)
}

/// Advisory certificates for `max(|A|,1) max(|B|,1) ||A alpha + B beta|| <= 1`,
/// with a link recording whether the product decreased from the previous
/// witness.
pub fn thm4_certificates(witnesses: &[DualWitness]) -> Vec<Certificate> {
    let one = Bound::Exact(Rational::one());
    let mut prev: Option<&Rational> = None;
    witnesses
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let mut cert = Certificate::new("thm4", &w.a, &w.product, &one, Provenance::Witness { kind: "thm4".into(), index: k + 1 }, depths(w.depth));
            cert.advisory = true;
            let detail = format!("A = {}, B = {}, C = {}, r = {}", w.a, w.b, w.c, w.r);
            cert.links.push(match prev {
                Some(p) => Link::check("decreasing", w.product.hi() < p, detail),
                None => Link::new("decreasing", Verdict::Pass, detail),
            });
            prev = Some(w.product.hi());
            cert
        })
        .collect()
}
