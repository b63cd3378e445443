//! Assembly of `beta` from mirrored prefixes of `alpha` and markers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed};

use super::markers::{MarkerRule, Markers};
use super::phi::PhiFunction;
use super::schedule::{check_growth, growth_threshold, ratio_exceeds_threshold, GrowthReport, Schedule, ScheduleRule};
use crate::cf::{BlockSource, CfStream, CfWord};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TheoremTag {
    /// Minimal schedule for a general approximation function.
    T1,
    /// Geometric (or explicit) schedule for a power-law function.
    T2,
    /// Round-robin over a finite family of `alpha`s.
    T3,
    /// Palindromic variant of `T2`.
    Palindromic,
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::T1 => "T1",
            Self::T2 => "T2",
            Self::T3 => "T3",
            Self::Palindromic => "palindromic",
        })
    }
}

impl FromStr for TheoremTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T1" | "t1" => Ok(Self::T1),
            "T2" | "t2" => Ok(Self::T2),
            "T3" | "t3" => Ok(Self::T3),
            "palindromic" | "P" | "p" => Ok(Self::Palindromic),
            other => Err(Error::Parse(format!("unknown theorem tag {other:?}; expected T1, T2, T3 or palindromic"))),
        }
    }
}

/// How a power-law construction chooses its block lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrowthSpec {
    /// `n_{j+1} = ceil(ratio n_j)`; the ratio must clear the threshold.
    Ratio(Rational),
    /// A fixed list starting with `n_1 = 1`, checked term by term.
    Explicit(Vec<u64>),
}

/// A constructed `beta` together with everything needed to rebuild and
/// certify it.
#[derive(Clone, Debug)]
pub struct ConstructionRecord {
    theorem: TheoremTag,
    alphas: Vec<CfStream>,
    bound: u64,
    phi: Option<PhiFunction>,
    eps: Option<Rational>,
    growth: Option<GrowthSpec>,
    schedule: Arc<Schedule>,
    markers: Arc<Markers>,
    beta: CfStream,
}

impl ConstructionRecord {
    pub fn theorem(&self) -> TheoremTag {
        self.theorem
    }

    /// The `alpha` of the construction (the first one for `T3`).
    pub fn alpha(&self) -> &CfStream {
        &self.alphas[0]
    }

    pub fn alphas(&self) -> &[CfStream] {
        &self.alphas
    }

    pub fn beta(&self) -> &CfStream {
        &self.beta
    }

    /// The bound `M` on the partial quotients of `alpha`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn phi(&self) -> Option<&PhiFunction> {
        self.phi.as_ref()
    }

    pub fn eps(&self) -> Option<&Rational> {
        self.eps.as_ref()
    }

    pub fn growth_spec(&self) -> Option<&GrowthSpec> {
        self.growth.as_ref()
    }

    pub fn ratio(&self) -> Option<&Rational> {
        match &self.growth {
            Some(GrowthSpec::Ratio(r)) => Some(r),
            _ => None,
        }
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn markers(&self) -> &Markers {
        &self.markers
    }

    pub fn n(&self, j: usize) -> Result<u64> {
        self.schedule.n(j)
    }

    pub fn m(&self, j: usize) -> Result<u64> {
        self.schedule.m(j)
    }

    pub fn t(&self, j: usize) -> Result<u64> {
        self.markers.get(j)
    }

    /// The `alpha` whose prefix fills block `j`.
    pub fn block_alpha(&self, j: usize) -> &CfStream {
        &self.alphas[(j - 1) % self.alphas.len()]
    }

    /// `a_1 ... a_{n_j}` of the `alpha` used by block `j`.
    pub fn block_prefix(&self, j: usize) -> Result<CfWord> {
        self.block_alpha(j).prefix(to_usize(self.n(j)?, j)?)
    }

    /// For `T1`/`T2`/`T3`: the word `b_1 ... b_{m_j}` predicted by the
    /// construction, assembled independently of the stream.
    pub fn expected_prefix(&self, j: usize) -> Result<CfWord> {
        if self.theorem == TheoremTag::Palindromic {
            return self.structural_b(j);
        }
        let mut out = Vec::new();
        for i in 1..=j {
            if i > 1 {
                out.push(self.t(i - 1)?);
            }
            out.extend(self.block_prefix(i)?.mirror().iter());
        }
        CfWord::new(out)
    }

    /// For the palindromic variant: the word `B_j`, which is a prefix of
    /// `beta`.
    pub fn structural_b(&self, j: usize) -> Result<CfWord> {
        let mut b = self.block_prefix(1)?.mirror();
        for i in 2..=j {
            let t = CfWord::new(vec![self.t(i - 1)?])?;
            b = b.concat(&t).concat(&b.mirror()).concat(&self.block_prefix(i)?.mirror());
        }
        Ok(b)
    }

    /// `|B_1|, ..., |B_count|` for the palindromic variant.
    pub fn b_lengths(&self, count: usize) -> Result<Vec<u64>> {
        let terms = self.schedule.terms(count)?;
        let mut out = Vec::with_capacity(count);
        let mut len = 0u64;
        for (i, &n) in terms.iter().enumerate() {
            len = if i == 0 { n } else { len.checked_mul(2).and_then(|x| x.checked_add(1 + n)).ok_or(Error::ScheduleOverflow(i + 1))? };
            out.push(len);
        }
        Ok(out)
    }

    /// Lengths `2|B_j| + 1` of the palindromic prefixes `B_j t_j B̄_j`.
    pub fn palindrome_lengths(&self, count: usize) -> Result<Vec<u64>> {
        Ok(self.b_lengths(count)?.into_iter().map(|l| 2 * l + 1).collect())
    }

    /// Growth-condition report over the first `count` schedule terms, for
    /// power-law constructions.
    pub fn growth_report(&self, count: usize) -> Result<Option<GrowthReport>> {
        match &self.eps {
            Some(eps) => check_growth(&self.schedule, count, self.bound, eps).map(Some),
            None => Ok(None),
        }
    }
}

fn to_usize(n: u64, j: usize) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::ScheduleOverflow(j))
}

struct BetaBlocks {
    alphas: Vec<CfStream>,
    schedule: Arc<Schedule>,
    markers: Arc<Markers>,
    palindromic: bool,
    j: usize,
    b: Vec<u64>,
}

impl BlockSource for BetaBlocks {
    fn next_block(&mut self) -> Result<Option<Vec<u64>>> {
        self.j += 1;
        let j = self.j;
        let n = to_usize(self.schedule.n(j)?, j)?;
        let alpha = &self.alphas[(j - 1) % self.alphas.len()];
        let mirrored = alpha.prefix(n)?.mirror().into_vec();
        if j == 1 {
            if self.palindromic {
                self.b = mirrored.clone();
            }
            return Ok(Some(mirrored));
        }
        let t = self.markers.get(j - 1)?;
        let mut block = vec![t];
        if self.palindromic {
            let b_mirror: Vec<u64> = self.b.iter().rev().copied().collect();
            block.extend_from_slice(&b_mirror);
            block.extend_from_slice(&mirrored);
            self.b.push(t);
            self.b.extend_from_slice(&b_mirror);
            self.b.extend_from_slice(&mirrored);
        } else {
            block.extend_from_slice(&mirrored);
        }
        Ok(Some(block))
    }
}

struct Parts {
    theorem: TheoremTag,
    alphas: Vec<CfStream>,
    bound: u64,
    phi: Option<PhiFunction>,
    eps: Option<Rational>,
    growth: Option<GrowthSpec>,
    rule: ScheduleRule,
    t_rule: MarkerRule,
}

fn assemble(parts: Parts) -> Result<ConstructionRecord> {
    let schedule = Arc::new(Schedule::new(parts.rule)?);
    let markers = Arc::new(Markers::new(parts.t_rule, parts.bound)?);
    let source = BetaBlocks {
        alphas: parts.alphas.clone(),
        schedule: schedule.clone(),
        markers: markers.clone(),
        palindromic: parts.theorem == TheoremTag::Palindromic,
        j: 0,
        b: Vec::new(),
    };
    let beta = CfStream::from_blocks(Box::new(source), Some(parts.bound + 2));
    Ok(ConstructionRecord {
        theorem: parts.theorem,
        alphas: parts.alphas,
        bound: parts.bound,
        phi: parts.phi,
        eps: parts.eps,
        growth: parts.growth,
        schedule,
        markers,
        beta,
    })
}

/// `beta = [0; a_{n_1}..a_1, t_1, a_{n_2}..a_1, t_2, ...]` with the minimal
/// schedule for `phi`.
pub fn build_beta_thm1(alpha: CfStream, phi: PhiFunction, t_rule: MarkerRule) -> Result<ConstructionRecord> {
    let bound = alpha.require_bound()?;
    assemble(Parts {
        theorem: TheoremTag::T1,
        alphas: vec![alpha],
        bound,
        rule: ScheduleRule::MinimalPhi { phi: phi.clone(), bound },
        phi: Some(phi),
        eps: None,
        growth: None,
        t_rule,
    })
}

fn power_law_parts(alpha: &CfStream, bound: u64, eps: &Rational, growth: &GrowthSpec) -> Result<ScheduleRule> {
    if bound < 1 {
        return Err(Error::InvalidArgument("M must be positive".into()));
    }
    let declared = alpha.require_bound()?;
    if declared > bound {
        return Err(Error::MismatchedBounds(format!("alpha is declared with bound {declared} > M = {bound}")));
    }
    if !eps.is_positive() || eps >= &Rational::one() {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    match growth {
        GrowthSpec::Ratio(ratio) => {
            if !ratio_exceeds_threshold(ratio, bound, eps) {
                let (_, hi) = growth_threshold(bound, eps);
                return Err(Error::RatioBelowThreshold {
                    ratio: ratio.to_string(),
                    coefficient: (Rational::from_integer(4.into()) / eps).to_string(),
                    base: bound + 3,
                    eps: eps.to_string(),
                    approx: decimal(&hi, 4),
                });
            }
            Ok(ScheduleRule::Geometric { ratio: ratio.clone() })
        }
        GrowthSpec::Explicit(list) => {
            if list.first() != Some(&1) {
                return Err(Error::InvalidArgument("explicit schedules start with n_1 = 1".into()));
            }
            Ok(ScheduleRule::Explicit(list.clone()))
        }
    }
}

/// Decimal rendering of a positive rational rounded up, for messages only.
pub(crate) fn decimal(x: &Rational, digits: u32) -> String {
    let scale = num_traits::pow(num_bigint::BigInt::from(10), digits as usize);
    let scaled = (x * Rational::from_integer(scale.clone())).ceil().to_integer();
    let (int, frac) = num_integer::Integer::div_rem(&scaled, &scale);
    format!("{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

/// The power-law construction `phi(q) = q^(-eps)` with a geometric or
/// explicit schedule.
pub fn build_beta_thm2(alpha: CfStream, bound: u64, eps: Rational, t_rule: MarkerRule, growth: GrowthSpec) -> Result<ConstructionRecord> {
    let rule = power_law_parts(&alpha, bound, &eps, &growth)?;
    assemble(Parts {
        theorem: TheoremTag::T2,
        alphas: vec![alpha],
        bound,
        phi: Some(PhiFunction::Power(eps.clone())),
        eps: Some(eps),
        growth: Some(growth),
        rule,
        t_rule,
    })
}

/// Round-robin construction over a finite family sharing the bound `M`
/// (the largest declared bound unless given).
pub fn build_beta_thm3(alphas: Vec<CfStream>, phi: PhiFunction, t_rule: MarkerRule, bound: Option<u64>) -> Result<ConstructionRecord> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("the family of alphas is empty".into()));
    }
    let declared = alphas.iter().map(CfStream::require_bound).collect::<Result<Vec<_>>>()?;
    let max = declared.iter().copied().max().unwrap_or(1);
    let bound = match bound {
        Some(m) if m < max => {
            return Err(Error::MismatchedBounds(format!("common bound {m} is below a declared bound {max}")));
        }
        Some(m) => m,
        None => max,
    };
    assemble(Parts {
        theorem: TheoremTag::T3,
        alphas,
        bound,
        rule: ScheduleRule::MinimalPhi { phi: phi.clone(), bound },
        phi: Some(phi),
        eps: None,
        growth: None,
        t_rule,
    })
}

/// `beta = [0; Ā_{n_1}, t_1, B̄_1, Ā_{n_2}, t_2, B̄_2, ...]`, which begins
/// with the palindromes `B_j t_j B̄_j`.
pub fn build_beta_palindromic(alpha: CfStream, bound: u64, eps: Rational, t_rule: MarkerRule, growth: GrowthSpec) -> Result<ConstructionRecord> {
    let rule = power_law_parts(&alpha, bound, &eps, &growth)?;
    assemble(Parts {
        theorem: TheoremTag::Palindromic,
        alphas: vec![alpha],
        bound,
        phi: Some(PhiFunction::Power(eps.clone())),
        eps: Some(eps),
        growth: Some(growth),
        rule,
        t_rule,
    })
}

/// Splits a word at entries exceeding `bound`: returns the blocks and the
/// separating markers.
pub fn decompose_blocks(word: &[u64], bound: u64) -> (Vec<Vec<u64>>, Vec<u64>) {
    let mut blocks = vec![Vec::new()];
    let mut markers = Vec::new();
    for &a in word {
        if a > bound {
            markers.push(a);
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().expect("at least one block").push(a);
        }
    }
    (blocks, markers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt2() -> CfStream {
        "0; | (2)".parse().unwrap()
    }

    fn thm2(t: MarkerRule) -> ConstructionRecord {
        build_beta_thm2(sqrt2(), 2, r(1, 2), t, GrowthSpec::Ratio(r(19, 1))).unwrap()
    }

    #[test]
    fn thm2_schedule_and_prefix() {
        let rec = thm2(MarkerRule::Constant(3));
        assert_eq!(rec.schedule().terms(4).unwrap(), vec![1, 19, 361, 6859]);
        assert_eq!(rec.m(3).unwrap(), 383);
        let beta = rec.beta().prefix(22).unwrap();
        let mut expected = vec![2, 3];
        expected.extend([2; 19]);
        expected.push(3);
        assert_eq!(beta.as_slice(), &expected[..]);
        assert_eq!(rec.expected_prefix(3).unwrap(), rec.beta().prefix(383).unwrap());
        assert_eq!(rec.beta().bound(), Some(4));
    }

    #[test]
    fn ratio_below_threshold_is_rejected() {
        let err = build_beta_thm2(sqrt2(), 2, r(1, 2), MarkerRule::Default, GrowthSpec::Ratio(r(10, 1))).unwrap_err();
        match err {
            Error::RatioBelowThreshold { base, approx, ref coefficient, .. } => {
                assert_eq!(coefficient, "8");
                assert_eq!(base, 5);
                assert!(approx.starts_with("18.57"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn alpha_must_respect_m() {
        let alpha: CfStream = "0; | (3)".parse().unwrap();
        assert!(matches!(
            build_beta_thm2(alpha, 2, r(1, 2), MarkerRule::Default, GrowthSpec::Ratio(r(19, 1))),
            Err(Error::MismatchedBounds(_))
        ));
    }

    #[test]
    fn first_block_is_first_quotient() {
        let alpha: CfStream = "0; | (1,2)".parse().unwrap();
        let rec = build_beta_thm1(alpha, PhiFunction::Power(r(1, 2)), MarkerRule::Default).unwrap();
        assert_eq!(rec.beta().quotient(1).unwrap(), 1);
        assert_eq!(rec.beta().quotient(2).unwrap(), 3);
        // block 2 is the mirror of a_1..a_{n_2}
        let n2 = rec.n(2).unwrap() as usize;
        let block: Vec<u64> = rec.beta().prefix(2 + n2).unwrap()[2..].to_vec();
        let mirror: Vec<u64> = rec.alpha().prefix(n2).unwrap().mirror().into_vec();
        assert_eq!(block, mirror);
    }

    #[test]
    fn different_markers_give_different_betas() {
        let a = thm2(MarkerRule::List(vec![3, 3, 3]));
        let b = thm2(MarkerRule::List(vec![3, 4, 3]));
        let pa = a.beta().prefix(383).unwrap();
        let pb = b.beta().prefix(383).unwrap();
        let diff: Vec<usize> = (0..383).filter(|&i| pa[i] != pb[i]).collect();
        assert_eq!(diff, vec![21]);
    }

    #[test]
    fn thm3_alternates_family_members() {
        let ones: CfStream = "0; | (1)".parse().unwrap();
        let twos: CfStream = "0; | (2)".parse().unwrap();
        let rec = build_beta_thm3(vec![ones.clone(), twos], PhiFunction::Power(r(1, 2)), MarkerRule::Default, None).unwrap();
        assert_eq!(rec.bound(), 2);
        let m3 = rec.m(3).unwrap() as usize;
        let (blocks, markers) = decompose_blocks(&rec.beta().prefix(m3).unwrap(), 2);
        assert_eq!(blocks.len(), 3);
        assert!(markers.iter().all(|&t| t == 3));
        assert!(blocks[0].iter().all(|&a| a == 1));
        assert!(blocks[1].iter().all(|&a| a == 2));
        assert!(blocks[2].iter().all(|&a| a == 1));

        let single = build_beta_thm3(vec![ones.clone()], PhiFunction::Power(r(1, 2)), MarkerRule::Default, None).unwrap();
        let plain = build_beta_thm1(ones, PhiFunction::Power(r(1, 2)), MarkerRule::Default).unwrap();
        assert_eq!(single.beta().prefix(400).unwrap(), plain.beta().prefix(400).unwrap());
    }

    #[test]
    fn thm3_rejects_low_common_bound() {
        let twos: CfStream = "0; | (2)".parse().unwrap();
        assert!(build_beta_thm3(vec![twos], PhiFunction::InverseLog, MarkerRule::Default, Some(1)).is_err());
        assert!(build_beta_thm3(vec![], PhiFunction::InverseLog, MarkerRule::Default, None).is_err());
    }

    #[test]
    fn palindromic_prefixes() {
        let rec = build_beta_palindromic(sqrt2(), 2, r(1, 2), MarkerRule::Default, GrowthSpec::Ratio(r(19, 1))).unwrap();
        assert_eq!(rec.palindrome_lengths(3).unwrap(), vec![3, 45, 813]);
        for (j, len) in rec.palindrome_lengths(3).unwrap().into_iter().enumerate() {
            let p = rec.beta().prefix(len as usize).unwrap();
            assert!(p.is_palindrome(), "j = {}", j + 1);
            let b = rec.structural_b(j + 1).unwrap();
            assert_eq!(&p[..b.len()], b.as_slice());
        }
        // B_2 = Ā_{n_1} t_1 B̄_1 Ā_{n_2}
        let b1 = rec.structural_b(1).unwrap();
        let b2 = rec.structural_b(2).unwrap();
        let expected = b1.concat(&CfWord::new(vec![3]).unwrap()).concat(&b1.mirror()).concat(&rec.block_prefix(2).unwrap().mirror());
        assert_eq!(b2, expected);
    }

    #[test]
    fn explicit_schedule_reports_burn_in() {
        let rec = build_beta_thm2(sqrt2(), 2, r(1, 2), MarkerRule::Default, GrowthSpec::Explicit(vec![1, 19, 361, 6859])).unwrap();
        let report = rec.growth_report(4).unwrap().unwrap();
        assert_eq!(report.burn_in, Some(4));
        assert_eq!(report.first_violation, Some(2));
        assert!(build_beta_thm2(sqrt2(), 2, r(1, 2), MarkerRule::Default, GrowthSpec::Explicit(vec![2, 40])).is_err());
    }

    #[test]
    fn block_decomposition() {
        let (blocks, markers) = decompose_blocks(&[2, 3, 2, 2, 4, 1], 2);
        assert_eq!(blocks, vec![vec![2], vec![2, 2], vec![1]]);
        assert_eq!(markers, vec![3, 4]);
    }

    #[test]
    fn tags_round_trip() {
        for tag in [TheoremTag::T1, TheoremTag::T2, TheoremTag::T3, TheoremTag::Palindromic] {
            assert_eq!(tag.to_string().parse::<TheoremTag>().unwrap(), tag);
        }
    }
}
