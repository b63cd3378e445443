//! Property suites for the continuant and approximation lemmas.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cf::{continuant, mirror_ratio_identity_in, CfStream, CfWord};
use crate::error::Result;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleSizes {
    pub exhaustive_len: usize,
    pub exhaustive_max: u64,
    pub random_words: usize,
    pub random_len: usize,
    pub random_max: u64,
    pub growth_len: usize,
    pub growth_max: u64,
    pub sandwich_pairs: usize,
    pub sandwich_len: usize,
    pub sandwich_max: u64,
}

impl Default for OracleSizes {
    fn default() -> Self {
        Self {
            exhaustive_len: 6,
            exhaustive_max: 4,
            random_words: 10_000,
            random_len: 12,
            random_max: 5,
            growth_len: 10,
            growth_max: 3,
            sandwich_pairs: 100,
            sandwich_len: 30,
            sandwich_max: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub name: String,
    pub checked: usize,
    /// At most a handful of offending inputs, rendered as text.
    pub counterexamples: Vec<String>,
}

impl OracleResult {
    fn new(name: &str) -> Self {
        Self { name: name.into(), checked: 0, counterexamples: Vec::new() }
    }

    fn record(&mut self, ok: bool, input: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.counterexamples.len() < 8 {
            self.counterexamples.push(input());
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub sizes: OracleSizes,
    pub results: Vec<OracleResult>,
}

impl OracleReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(OracleResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&OracleResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// Every word of length `1..=len` with entries in `1..=max`.
fn all_words(len: usize, max: u64) -> impl Iterator<Item = Vec<u64>> {
    (1..=len).flat_map(move |n| {
        let total = (max as u128).pow(n as u32);
        (0..total).map(move |mut code| {
            let mut w = Vec::with_capacity(n);
            for _ in 0..n {
                w.push((code % max as u128) as u64 + 1);
                code /= max as u128;
            }
            w
        })
    })
}

fn random_word(rng: &mut ChaCha8Rng, len: usize, max: u64) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(1..=max)).collect()
}

fn check_mirror(res: &mut OracleResult, w: &[u64]) {
    if w.len() < 2 {
        return;
    }
    let word = CfWord::new(w.to_vec()).expect("positive entries");
    let ok = mirror_ratio_identity_in::<i128>(&word).unwrap_or(false);
    res.record(ok, || format!("{w:?}"));
}

fn check_symmetry(res: &mut OracleResult, w: &[u64]) {
    let mut rev = w.to_vec();
    rev.reverse();
    let ok = continuant::<u128>(w) == continuant::<u128>(&rev);
    res.record(ok, || format!("{w:?}"));
}

/// `K_k K_{m-k} <= K_m <= 2 K_k K_{m-k}` at every split point.
fn check_splits(res: &mut OracleResult, w: &[u64]) {
    let full = continuant::<u128>(w);
    for k in 1..w.len() {
        let prod = continuant::<u128>(&w[..k]) * continuant::<u128>(&w[k..]);
        res.record(prod <= full && full <= 2 * prod, || format!("{w:?} split at {k}"));
    }
}

/// `2^((n-1)/2) <= K_n <= (M+1)^n`, with `M` the largest entry.
fn check_growth(res: &mut OracleResult, w: &[u64]) {
    let n = w.len() as u32;
    let k = continuant::<u128>(w);
    let m = *w.iter().max().expect("nonempty") as u128;
    let ok = k * k >= 1u128 << (n - 1) && k <= (m + 1).pow(n);
    res.record(ok, || format!("{w:?}"));
}

/// Outcome of one prefix-sharing pair: whether the upper and lower bounds
/// were both confirmed by a rigorous enclosure of `|alpha - beta|`.
fn sandwich_pair(prefix: &[u64], x: u64, y: u64, tail_x: &[u64], tail_y: &[u64], m: u64) -> Result<(bool, bool)> {
    let stream = |next: u64, tail: &[u64]| -> Result<CfStream> {
        let mut pre = prefix.to_vec();
        pre.push(next);
        CfStream::periodic(CfWord::new(pre)?, CfWord::new(tail.to_vec())?, Some(m))
    };
    let a = stream(x, tail_x)?;
    let b = stream(y, tail_y)?;
    let qn: BigInt = continuant(prefix);
    let q2 = Rational::from_integer(&qn * &qn);
    let upper = q2.recip();
    let lower = Rational::from_integer(BigInt::from((m + 2).pow(3))) * &q2;
    let lower = lower.recip();
    let n = prefix.len();
    let mut depth = n + 4;
    loop {
        let diff = (a.enclosure(depth)? - b.enclosure(depth)?).abs();
        let up_ok = diff.hi() <= &upper;
        let lo_ok = diff.lo() >= &lower;
        if (up_ok && lo_ok) || depth >= n + 512 {
            return Ok((up_ok, lo_ok));
        }
        depth *= 2;
    }
}

/// Runs the exhaustive and randomized suites. Deterministic in `seed`.
pub fn lemma_oracles(seed: u64, sizes: &OracleSizes) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mirror = OracleResult::new("mirror_identity");
    let mut symmetry = OracleResult::new("continuant_symmetry");
    let mut splits = OracleResult::new("quasi_multiplicativity");
    let mut growth = OracleResult::new("continuant_growth");
    let mut upper = OracleResult::new("prefix_upper_bound");
    let mut lower = OracleResult::new("prefix_lower_bound");

    for w in all_words(sizes.exhaustive_len, sizes.exhaustive_max) {
        check_mirror(&mut mirror, &w);
        check_symmetry(&mut symmetry, &w);
        check_splits(&mut splits, &w);
    }
    for _ in 0..sizes.random_words {
        let len = rng.gen_range(1..=sizes.random_len);
        let w = random_word(&mut rng, len, sizes.random_max);
        check_mirror(&mut mirror, &w);
        check_symmetry(&mut symmetry, &w);
        check_splits(&mut splits, &w);
    }
    for w in all_words(sizes.growth_len, sizes.growth_max) {
        check_growth(&mut growth, &w);
    }

    for _ in 0..sizes.sandwich_pairs {
        let m = rng.gen_range(2..=sizes.sandwich_max.max(2));
        let n = rng.gen_range(1..=sizes.sandwich_len);
        let prefix = random_word(&mut rng, n, m);
        let x = rng.gen_range(1..=m);
        let y = loop {
            let y = rng.gen_range(1..=m);
            if y != x {
                break y;
            }
        };
        let len_x = rng.gen_range(1..=4);
        let len_y = rng.gen_range(1..=4);
        let tail_x = random_word(&mut rng, len_x, m);
        let tail_y = random_word(&mut rng, len_y, m);
        let (up, lo) = sandwich_pair(&prefix, x, y, &tail_x, &tail_y, m)?;
        let show = || format!("M={m} prefix={prefix:?} next=({x},{y}) tails=({tail_x:?},{tail_y:?})");
        upper.record(up, show);
        lower.record(lo, show);
    }

    Ok(OracleReport { seed, sizes: sizes.clone(), results: vec![mirror, symmetry, splits, growth, upper, lower] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_enumeration_counts() {
        assert_eq!(all_words(3, 2).count(), 2 + 4 + 8);
        assert!(all_words(2, 3).all(|w| w.iter().all(|&a| (1..=3).contains(&a))));
    }

    #[test]
    fn small_suite_passes() {
        let sizes = OracleSizes {
            exhaustive_len: 4,
            exhaustive_max: 3,
            random_words: 200,
            growth_len: 6,
            sandwich_pairs: 10,
            ..OracleSizes::default()
        };
        let rep = lemma_oracles(7, &sizes).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        assert_eq!(rep.results.len(), 6);
        assert_eq!(rep.get("continuant_growth").unwrap().checked, (1..=6).map(|k| 3usize.pow(k)).sum::<usize>());
    }

    #[test]
    fn sandwich_on_fixed_pair() {
        let (up, lo) = sandwich_pair(&[1, 1, 1], 1, 2, &[1], &[2], 2).unwrap();
        assert!(up && lo);
    }

    #[test]
    fn deterministic_in_seed() {
        let sizes = OracleSizes { exhaustive_len: 2, random_words: 50, growth_len: 3, sandwich_pairs: 3, ..OracleSizes::default() };
        assert_eq!(lemma_oracles(3, &sizes).unwrap(), lemma_oracles(3, &sizes).unwrap());
    }
}
