//! Witnesses for pairs related by a rational Möbius map.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::mobius::Mobius;
use crate::cf::{continuant, continuant_matrix, is_palindrome, refine_depth, CfStream, CfWord, Step};
use crate::error::{Error, Result};
use crate::{Interval, Rational};

/// Relative precision requested from enclosures: `width <= hi / 16`.
const REL_DEN: u32 = 16;

fn precise(iv: &Interval) -> bool {
    if iv.width().is_zero() {
        return true;
    }
    iv.is_positive() && iv.width() * Rational::from_integer(BigInt::from(REL_DEN)) <= *iv.hi()
}

fn depth_cap(start: usize, q: &BigInt) -> usize {
    start + 8 * q.bits() as usize + 256
}

/// Rigorous `||q y||` with `y = m(x)`, `x` the value of `alpha`, to relative
/// precision; also returns the depth used. `None` for `m` means `y = x`.
pub fn image_norm(alpha: &CfStream, q: &BigInt, m: Option<&Mobius<BigInt>>, start: usize) -> Result<(Interval, usize)> {
    let start = start.max(2 * q.bits() as usize / 3 + 2);
    let scale = Rational::from_integer(q.clone());
    refine_depth(start, depth_cap(start, q), "Möbius image norm", |depth| {
        let (enc, used) = alpha.enclosure_or_value(depth)?;
        let image = match m {
            None => enc,
            Some(m) => match enc.mobius_image(&m.a, &m.b, &m.c, &m.d) {
                Ok(iv) => iv,
                Err(Error::Pole(_)) if enc.width() > Rational::zero() => return Ok(Step::Deeper),
                Err(e) => return Err(e),
            },
        };
        match image.scale(&scale).nearest_integer_distance() {
            Some(d) if precise(&d) => Ok(Step::Done((d, used))),
            _ => Ok(Step::Deeper),
        }
    })
}

/// Rough `log2` of a positive rational, for reporting only.
pub fn approx_log2(x: &Rational) -> f64 {
    fn log2_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        let shift = bits.saturating_sub(60);
        let top: BigInt = n >> shift as usize;
        let top = top.to_string().parse::<f64>().unwrap_or(1.0);
        top.log2() + shift as f64
    }
    if !x.is_positive() {
        return f64::NEG_INFINITY;
    }
    log2_int(x.numer()) - log2_int(x.denom())
}

/// Measured exponent `log(value) / log(q)`.
pub fn measured_exponent(value: &Rational, q: &BigInt) -> Option<f64> {
    if !value.is_positive() || q <= &BigInt::one() {
        return None;
    }
    Some(approx_log2(value) / approx_log2(&Rational::from_integer(q.clone())))
}

/// Dual-form witness `(A, B, C)` from a repetition `U U^x` at the start of
/// `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualWitness {
    /// `r = |U|`.
    pub r: usize,
    /// Length of the validated prefix `U U^x`.
    pub prefix_len: usize,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    /// `||A alpha + B beta||`.
    pub norm: Interval,
    /// `max(|A|,1) max(|B|,1) ||A alpha + B beta||`.
    pub product: Interval,
    /// `|q_{r-1} alpha^2 + (q_r - p_{r-1}) alpha - p_r|`.
    pub residual: Interval,
    /// `residual_hi * q_L^2 / q_r` with `L = prefix_len`.
    pub residual_constant: Rational,
    /// `log(product_hi) / log(q_r)`, for reporting.
    pub exponent: Option<f64>,
    pub depth: usize,
}

fn check_prefix(alpha: &CfStream, expected: &CfWord, what: &str) -> Result<()> {
    let got = alpha.prefix(expected.len())?;
    if &got != expected {
        let at = got.iter().zip(expected.iter()).position(|(a, b)| a != b).unwrap_or(0);
        return Err(Error::PrefixMismatch(format!("alpha does not begin with {what}: first difference at index {}", at + 1)));
    }
    Ok(())
}

/// Witness built from `alpha = [0; U, U^x, ...]` and `beta = m(alpha)`.
pub fn thm4_witness(alpha: &CfStream, u: &CfWord, x: &Rational, m: &Mobius<BigInt>) -> Result<DualWitness> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let delta = m.det();
    if delta.is_zero() {
        return Err(Error::SingularMap);
    }
    let expected = u.concat(&u.power(x)?);
    check_prefix(alpha, &expected, "[U, U^x]")?;
    let r = u.len();
    let [q_r, q_r1, p_r, p_r1] = continuant_matrix::<BigInt>(u);
    let (a, b, c, d) = (&m.a, &m.b, &m.c, &m.d);
    let sign = BigInt::from(delta.signum());
    let big_d = (&q_r - &p_r1) * c - &q_r1 * d;
    let wa = delta.abs() * &q_r1;
    let wb = &sign * (d * &big_d + c * c * &p_r);
    let wc = &sign * (b * &big_d + a * c * &p_r);

    // A alpha + B beta - C = |delta| c Q(alpha) / (c alpha + d)
    let quad = |x: &Interval| -> Interval {
        let lin = x.scale(&Rational::from_integer(&q_r - &p_r1));
        let sq = x.clone() * x.clone();
        (sq.scale(&Rational::from_integer(q_r1.clone())) + lin).shift(&Rational::from_integer(-p_r.clone()))
    };
    let coeff = Rational::from_integer(delta.abs() * c);
    let start = expected.len() + 2;
    let cap = depth_cap(start, &(&q_r * &q_r * &q_r));
    let (norm, residual, depth) = refine_depth(start, cap, "dual-form witness", |depth| {
        let (enc, used) = alpha.enclosure_or_value(depth)?;
        let q = quad(&enc);
        let den = enc.scale(&Rational::from_integer(c.clone())).shift(&Rational::from_integer(d.clone()));
        if den.contains_zero() {
            return Ok(Step::Deeper);
        }
        let inv = Interval::spanning(den.lo().recip(), den.hi().recip());
        let diff = (q.clone() * inv).scale(&coeff);
        let residual = q.abs();
        let Some(norm) = diff.nearest_integer_distance() else {
            return Ok(Step::Deeper);
        };
        if precise(&norm) && precise(&residual) {
            Ok(Step::Done((norm, residual, used)))
        } else {
            Ok(Step::Deeper)
        }
    })?;
    let weight = Rational::from_integer(wa.abs().max(BigInt::one()) * wb.abs().max(BigInt::one()));
    let product = norm.scale(&weight);
    let q_l = continuant::<BigInt>(&expected);
    let residual_constant = residual.hi() * Rational::new(&q_l * &q_l, q_r.clone());
    let exponent = measured_exponent(product.hi(), &q_r);
    Ok(DualWitness {
        r,
        prefix_len: expected.len(),
        a: wa,
        b: wb,
        c: wc,
        norm,
        product,
        residual,
        residual_constant,
        exponent,
        depth,
    })
}

/// Witness from a palindromic word `W = V U Ū V̄`: the denominator
/// `R = |c P' + d Q'|` where `P'/Q' = [0; W]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PalindromeWitness {
    /// `s = |V|`.
    pub s: usize,
    /// `r = |U|` (for a bare palindrome prefix, its length `l` with `s = 0`).
    pub r: usize,
    /// `Q' = K(W)`.
    pub q_prime: BigInt,
    /// `P' = Q_k`, the denominator of the last convergent to `[0; W]`.
    pub q_k: BigInt,
    pub r_value: BigInt,
    pub norm_alpha: Interval,
    pub norm_beta: Interval,
    /// `R ||R alpha|| ||R beta||`.
    pub product: Interval,
    /// `R^2 ||R alpha|| ||R beta||`.
    pub q2_product: Interval,
    /// `||Q' alpha||`.
    pub norm_q_prime: Interval,
    /// `||Q' alpha|| <= Q' / q_{|validated prefix|}^2`.
    pub prefix_bound_holds: bool,
    /// `product_hi * q_{s+2r} / q_s^3`.
    pub chain_constant: Rational,
    pub depth: usize,
}

fn palindrome_witness(alpha: &CfStream, w: &CfWord, validated: usize, s: usize, r: usize, m: &Mobius<BigInt>) -> Result<PalindromeWitness> {
    debug_assert!(w.is_palindrome());
    let [q_prime, q_k, p_prime, _] = continuant_matrix::<BigInt>(w);
    if p_prime != q_k {
        return Err(Error::Degenerate(format!("numerator {p_prime} differs from Q_k {q_k} for a palindrome")));
    }
    let r_value = (&m.c * &p_prime + &m.d * &q_prime).abs();
    if r_value.is_zero() {
        return Err(Error::Degenerate("R = |c P' + d Q'| vanishes".into()));
    }
    let start = validated + 2;
    let (norm_alpha, d1) = image_norm(alpha, &r_value, None, start)?;
    let (norm_beta, d2) = image_norm(alpha, &r_value, Some(m), start)?;
    let (norm_q_prime, d3) = image_norm(alpha, &q_prime, None, start)?;
    let rr = Rational::from_integer(r_value.clone());
    let product = (norm_alpha.clone() * norm_beta.clone()).scale(&rr);
    let q2_product = product.scale(&rr);
    let q_prefix = alpha.convergent::<BigInt>(validated)?.q;
    let prefix_bound_holds = *norm_q_prime.hi() <= Rational::new(q_prime.clone(), &q_prefix * &q_prefix);
    let q_s = if s == 0 { BigInt::one() } else { alpha.convergent::<BigInt>(s)?.q };
    let q_s2r = alpha.convergent::<BigInt>(s + 2 * r.min(validated))?.q;
    let chain_constant = product.hi() * Rational::new(q_s2r, num_traits::pow(q_s, 3));
    Ok(PalindromeWitness {
        s,
        r,
        q_prime,
        q_k,
        r_value,
        norm_alpha,
        norm_beta,
        product,
        q2_product,
        norm_q_prime,
        prefix_bound_holds,
        chain_constant,
        depth: d1.max(d2).max(d3),
    })
}

/// Witness for `alpha = [0; V, U, Ū, ...]` and `beta = m(alpha)`; when `x`
/// is given, `|U| >= x |V|` is checked too.
pub fn thm5_witness(alpha: &CfStream, v: &CfWord, u: &CfWord, m: &Mobius<BigInt>, x: Option<&Rational>) -> Result<PalindromeWitness> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    if m.det().is_zero() {
        return Err(Error::SingularMap);
    }
    if let Some(x) = x {
        let lhs = Rational::from_integer(BigInt::from(u.len()));
        if lhs < x * Rational::from_integer(BigInt::from(v.len())) {
            return Err(Error::InvalidArgument(format!("|U| = {} is below x |V| = {} * {}", u.len(), x, v.len())));
        }
    }
    let prefix = v.concat(u).concat(&u.mirror());
    check_prefix(alpha, &prefix, "[V, U, Ū]")?;
    let w = prefix.concat(&v.mirror());
    palindrome_witness(alpha, &w, prefix.len(), v.len(), u.len(), m)
}

/// One row of [`thm6_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct Thm6Row {
    pub length: usize,
    pub q: BigInt,
    /// `q^2 ||q alpha|| ||q beta||`.
    pub value: Interval,
    pub witness: PalindromeWitness,
}

/// Runs the palindrome witness on every listed palindromic prefix length,
/// using the prefix itself as `W`.
pub fn thm6_scan(alpha: &CfStream, lengths: &[usize], m: &Mobius<BigInt>) -> Result<Vec<Thm6Row>> {
    if m.det().is_zero() {
        return Err(Error::SingularMap);
    }
    lengths
        .iter()
        .map(|&len| {
            if len == 0 {
                return Err(Error::EmptyWord);
            }
            let w = alpha.prefix(len)?;
            if !w.is_palindrome() {
                return Err(Error::NotPalindrome(len));
            }
            let witness = palindrome_witness(alpha, &w, len, 0, len.div_ceil(2), m)?;
            Ok(Thm6Row { length: len, q: witness.r_value.clone(), value: witness.q2_product.clone(), witness })
        })
        .collect()
}

/// All `l <= max_len` whose `l`-prefix is a palindrome, ascending. Stops
/// early at the end of a finite stream.
pub fn find_palindromic_prefixes(alpha: &CfStream, max_len: usize) -> Result<Vec<usize>> {
    let mut available = max_len;
    while available > 0 && alpha.is_finite_within(available - 1) {
        available -= 1;
    }
    if available == 0 {
        return Ok(Vec::new());
    }
    let word = alpha.prefix(available)?;
    Ok((1..=available).filter(|&l| is_palindrome(&word[..l])).collect())
}

/// Words `U_1 = seed`, `U_{k+1} = U_k U_k [1]`, each a prefix of the next.
pub fn nested_repetition_words(seed: &CfWord, count: usize) -> Vec<CfWord> {
    let one = CfWord::new(vec![1]).expect("positive");
    let mut out = Vec::with_capacity(count);
    let mut u = seed.clone();
    for _ in 0..count {
        out.push(u.clone());
        u = u.concat(&u).concat(&one);
    }
    out
}

/// The limit of [`nested_repetition_words`]: begins in `[0; U_k, U_k]` for
/// every `k`, and is not eventually periodic.
pub fn nested_repetition_alpha(seed: &CfWord) -> Result<CfStream> {
    if seed.is_empty() {
        return Err(Error::EmptyWord);
    }
    let seed = seed.clone().into_vec();
    let bound = seed.iter().copied().max().unwrap_or(1);
    Ok(CfStream::from_fn(
        move |i| {
            // lengths L_{k+1} = 2 L_k + 1; position i of U_{k+1}
            let mut len = seed.len();
            while len < i {
                len = 2 * len + 1;
            }
            let mut i = i;
            while i > seed.len() {
                let half = (len - 1) / 2;
                if i == len {
                    return Some(1);
                }
                if i > half {
                    i -= half;
                }
                len = half;
            }
            Some(seed[i - 1])
        },
        Some(bound),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mob(a: i64, b: i64, c: i64, d: i64) -> Mobius<BigInt> {
        Mobius::new(a.into(), b.into(), c.into(), d.into()).unwrap()
    }

    fn w(v: &[u64]) -> CfWord {
        CfWord::new(v.to_vec()).unwrap()
    }

    #[test]
    fn nested_repetition_matches_words() {
        let seed = w(&[1, 2]);
        let words = nested_repetition_words(&seed, 5);
        assert_eq!(words.iter().map(|u| u.len()).collect::<Vec<_>>(), vec![2, 5, 11, 23, 47]);
        let alpha = nested_repetition_alpha(&seed).unwrap();
        let last = &words[4];
        assert_eq!(&alpha.prefix(last.len()).unwrap(), last);
        for u in &words[..4] {
            assert_eq!(alpha.prefix(2 * u.len()).unwrap(), u.concat(u));
        }
    }

    #[test]
    fn thm4_formula_satisfies_the_identity() {
        // exact check on rationals: A x + B m(x) - C = |delta| c Q(x) / (c x + d)
        let u = w(&[1, 2, 1, 1, 2]);
        let [q_r, q_r1, p_r, p_r1] = continuant_matrix::<BigInt>(&u);
        for m in [mob(0, 1, 1, 0), mob(2, 1, 3, 5), mob(1, -2, -3, 1), mob(4, 0, 1, 2)] {
            let delta = m.det();
            let sign = BigInt::from(delta.signum());
            let big_d = (&q_r - &p_r1) * &m.c - &q_r1 * &m.d;
            let a = delta.abs() * &q_r1;
            let b = &sign * (&m.d * &big_d + &m.c * &m.c * &p_r);
            let c = &sign * (&m.b * &big_d + &m.a * &m.c * &p_r);
            for x in [Rational::new(3.into(), 7.into()), Rational::new(5.into(), 11.into())] {
                let lhs = Rational::from_integer(a.clone()) * &x + Rational::from_integer(b.clone()) * m.apply(&x).unwrap()
                    - Rational::from_integer(c.clone());
                let quad = Rational::from_integer(q_r1.clone()) * &x * &x + Rational::from_integer(&q_r - &p_r1) * &x
                    - Rational::from_integer(p_r.clone());
                let rhs = Rational::from_integer(delta.abs() * &m.c) * quad
                    / (Rational::from_integer(m.c.clone()) * &x + Rational::from_integer(m.d.clone()));
                assert_eq!(lhs, rhs, "map {m}");
            }
        }
    }

    #[test]
    fn thm4_products_decrease() {
        let seed = w(&[1, 2]);
        let alpha = nested_repetition_alpha(&seed).unwrap();
        let one = Rational::one();
        let m = mob(0, 1, 1, 0);
        let his: Vec<Rational> = nested_repetition_words(&seed, 4)
            .iter()
            .map(|u| thm4_witness(&alpha, u, &one, &m).unwrap().product.hi().clone())
            .collect();
        assert!(his.windows(2).all(|p| p[1] < p[0]), "{his:?}");
    }

    #[test]
    fn thm4_direct_evaluation_agrees() {
        let seed = w(&[1, 2]);
        let alpha = nested_repetition_alpha(&seed).unwrap();
        let m = mob(2, 1, 1, 3);
        let u = &nested_repetition_words(&seed, 3)[2];
        let wit = thm4_witness(&alpha, u, &Rational::one(), &m).unwrap();
        let enc = alpha.enclosure(400).unwrap();
        let beta = enc.mobius_image(&m.a, &m.b, &m.c, &m.d).unwrap();
        let direct = (enc.scale(&Rational::from_integer(wit.a.clone())) + beta.scale(&Rational::from_integer(wit.b.clone())))
            .nearest_integer_distance()
            .unwrap();
        assert!(direct.intersects(&wit.norm), "{direct} vs {}", wit.norm);
    }

    #[test]
    fn thm4_identity_map_gives_zero() {
        let seed = w(&[1, 2]);
        let alpha = nested_repetition_alpha(&seed).unwrap();
        let wit = thm4_witness(&alpha, &seed, &Rational::one(), &Mobius::identity()).unwrap();
        assert!(wit.norm.hi().is_zero());
        assert_eq!(&wit.a + &wit.b, BigInt::zero());
    }

    #[test]
    fn thm4_rejects_wrong_prefix() {
        let alpha: CfStream = "0; | (1,2)".parse().unwrap();
        assert!(matches!(
            thm4_witness(&alpha, &w(&[2, 1]), &Rational::one(), &mob(0, 1, 1, 0)),
            Err(Error::PrefixMismatch(_))
        ));
    }

    #[test]
    fn thm5_identity_uses_q_prime() {
        let alpha: CfStream = "0; 3 | (1,2,2,1)".parse().unwrap();
        let wit = thm5_witness(&alpha, &w(&[3]), &w(&[1, 2]), &Mobius::identity(), None).unwrap();
        assert_eq!(wit.r_value, wit.q_prime);
        assert!(wit.prefix_bound_holds);
        assert!(thm5_witness(&alpha, &w(&[3]), &w(&[1, 2]), &Mobius::identity(), Some(&Rational::from_integer(3.into()))).is_err());
        assert!(thm5_witness(&alpha, &w(&[1]), &w(&[1, 2]), &Mobius::identity(), None).is_err());
    }

    #[test]
    fn thm6_on_constant_streams() {
        let golden: CfStream = "0; | (1)".parse().unwrap();
        let rows = thm6_scan(&golden, &[2, 4, 6], &mob(0, 1, 1, 0)).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.value.is_positive() && r.value.hi() < &Rational::one()));
        let alpha: CfStream = "0; | (1,2)".parse().unwrap();
        assert_eq!(thm6_scan(&alpha, &[2], &mob(0, 1, 1, 0)), Err(Error::NotPalindrome(2)));
    }

    #[test]
    fn palindromic_prefix_scan() {
        let golden: CfStream = "0; | (1)".parse().unwrap();
        assert_eq!(find_palindromic_prefixes(&golden, 5).unwrap(), vec![1, 2, 3, 4, 5]);
        let alpha: CfStream = "0; | (1,2)".parse().unwrap();
        let found = find_palindromic_prefixes(&alpha, 9).unwrap();
        assert_eq!(found, vec![1, 3, 5, 7, 9]);
        let finite = CfStream::finite(w(&[1, 2, 1]), None).unwrap();
        assert_eq!(find_palindromic_prefixes(&finite, 10).unwrap(), vec![1, 3]);
    }

    #[test]
    fn exponent_reporting() {
        let e = measured_exponent(&Rational::new(1.into(), 1024.into()), &BigInt::from(32)).unwrap();
        assert!((e + 2.0).abs() < 1e-9);
    }
}
