//! JSON form of a construction record.

use serde::{Deserialize, Serialize};

use super::build::{build_beta_palindromic, build_beta_thm1, build_beta_thm2, build_beta_thm3, ConstructionRecord, GrowthSpec, TheoremTag};
use super::markers::MarkerRule;
use super::phi::{parse_rational, PhiFunction};
use crate::cf::CfStream;
use crate::error::{Error, Result};
use crate::{Rational, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub n: Vec<u64>,
    pub m: Vec<u64>,
    pub t: Vec<u64>,
}

/// Serialized construction: the request parameters plus the emitted
/// schedule and a prefix of `beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionDoc {
    pub spec_version: String,
    pub theorem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<String>>,
    #[serde(rename = "M")]
    pub bound: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u64>>,
    pub t_rule: String,
    pub schedule: ScheduleDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palindrome_lengths: Option<Vec<u64>>,
    pub beta_prefix: Vec<u64>,
}

fn alpha_text(alpha: &CfStream) -> Result<String> {
    alpha
        .spec_string()
        .ok_or_else(|| Error::InvalidArgument("alpha has no textual form and cannot be serialized".into()))
}

impl ConstructionRecord {
    /// Serializes the record with `terms` schedule terms and the first
    /// `prefix_len` partial quotients of `beta`.
    pub fn to_doc(&self, terms: usize, prefix_len: usize) -> Result<ConstructionDoc> {
        let n = self.schedule().terms(terms)?;
        let m = (1..=terms).map(|j| self.m(j)).collect::<Result<Vec<_>>>()?;
        let t = self.markers().take(terms)?;
        let (alpha, alphas) = if self.theorem() == TheoremTag::T3 {
            (None, Some(self.alphas().iter().map(alpha_text).collect::<Result<Vec<_>>>()?))
        } else {
            (Some(alpha_text(self.alpha())?), None)
        };
        let growth = self.growth_report(terms)?;
        let palindrome_lengths = match self.theorem() {
            TheoremTag::Palindromic => Some(self.palindrome_lengths(terms)?),
            _ => None,
        };
        let n_list = match self.growth_spec() {
            Some(GrowthSpec::Explicit(list)) => Some(list.clone()),
            _ => None,
        };
        Ok(ConstructionDoc {
            spec_version: SCHEMA_VERSION.to_string(),
            theorem: self.theorem().to_string(),
            alpha,
            alphas,
            bound: self.bound(),
            eps: self.eps().map(ToString::to_string),
            phi: self.phi().map(ToString::to_string),
            ratio: self.ratio().map(ToString::to_string),
            n_list,
            t_rule: self.markers().rule().to_string(),
            schedule: ScheduleDoc { n, m, t },
            burn_in: growth.as_ref().and_then(|g| g.burn_in),
            first_violation: growth.as_ref().and_then(|g| g.first_violation),
            palindrome_lengths,
            beta_prefix: self.beta().prefix(prefix_len)?.into_vec(),
        })
    }

    /// Rebuilds a record from its document and checks that the stored
    /// schedule and `beta` prefix are reproduced exactly.
    pub fn from_doc(doc: &ConstructionDoc) -> Result<Self> {
        if doc.spec_version != SCHEMA_VERSION {
            return Err(Error::RecordMismatch(format!("unsupported spec_version {:?}", doc.spec_version)));
        }
        let theorem: TheoremTag = doc.theorem.parse()?;
        let t_rule: MarkerRule = doc.t_rule.parse()?;
        let single_alpha = || -> Result<CfStream> {
            doc.alpha.as_deref().ok_or_else(|| Error::RecordMismatch("missing alpha".into()))?.parse()
        };
        let phi = || -> Result<PhiFunction> { doc.phi.as_deref().ok_or_else(|| Error::RecordMismatch("missing phi".into()))?.parse() };
        let power_law = || -> Result<(Rational, GrowthSpec)> {
            let eps = parse_rational(doc.eps.as_deref().ok_or_else(|| Error::RecordMismatch("missing eps".into()))?)?;
            let growth = match (&doc.ratio, &doc.n_list) {
                (Some(r), None) => GrowthSpec::Ratio(parse_rational(r)?),
                (None, Some(list)) => GrowthSpec::Explicit(list.clone()),
                _ => return Err(Error::RecordMismatch("exactly one of ratio and n_list is required".into())),
            };
            Ok((eps, growth))
        };
        let record = match theorem {
            TheoremTag::T1 => build_beta_thm1(single_alpha()?, phi()?, t_rule)?,
            TheoremTag::T2 => {
                let (eps, growth) = power_law()?;
                build_beta_thm2(single_alpha()?, doc.bound, eps, t_rule, growth)?
            }
            TheoremTag::Palindromic => {
                let (eps, growth) = power_law()?;
                build_beta_palindromic(single_alpha()?, doc.bound, eps, t_rule, growth)?
            }
            TheoremTag::T3 => {
                let texts = doc.alphas.as_ref().ok_or_else(|| Error::RecordMismatch("missing alphas".into()))?;
                let alphas = texts.iter().map(|s| s.parse()).collect::<Result<Vec<CfStream>>>()?;
                build_beta_thm3(alphas, phi()?, t_rule, Some(doc.bound))?
            }
        };
        if record.bound() != doc.bound {
            return Err(Error::RecordMismatch(format!("M = {} but the construction uses {}", doc.bound, record.bound())));
        }
        let rebuilt = record.to_doc(doc.schedule.n.len().max(1), doc.beta_prefix.len())?;
        if rebuilt.schedule != doc.schedule {
            return Err(Error::RecordMismatch("schedule does not match the parameters".into()));
        }
        if rebuilt.beta_prefix != doc.beta_prefix {
            let at = rebuilt.beta_prefix.iter().zip(&doc.beta_prefix).position(|(a, b)| a != b).unwrap_or(0);
            return Err(Error::RecordMismatch(format!("beta prefix differs at index {}", at + 1)));
        }
        if doc.palindrome_lengths.is_some() && rebuilt.palindrome_lengths != doc.palindrome_lengths {
            return Err(Error::RecordMismatch("palindrome lengths do not match".into()));
        }
        Ok(record)
    }
}
