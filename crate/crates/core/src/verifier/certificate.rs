//! Certificates and their JSON-lines store.

use std::cmp::Ordering;
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::constructor::PhiFunction;
use crate::error::{Error, Result};
use crate::{Interval, Rational, SCHEMA_VERSION};

/// Right-hand side of a certified inequality `value <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    /// `q^(-num/den)`, compared exactly through integer powers.
    PowerNeg { q: BigInt, num: u32, den: u32 },
    Exact(Rational),
    /// A bound known only to lie in `[lo, hi]` (for example when it involves
    /// a logarithm).
    Enclosed { lo: Rational, hi: Rational, label: String },
}

impl Bound {
    /// `1 / (q phi(q))`.
    pub fn inverse_q_phi(q: &BigInt, phi: &PhiFunction) -> Result<Self> {
        match phi {
            PhiFunction::Power(eps) => {
                // q^(eps - 1)
                let b = u32::try_from(eps.denom().clone()).map_err(|_| Error::InvalidArgument("eps denominator too large".into()))?;
                let a = u32::try_from(eps.numer().clone()).map_err(|_| Error::InvalidArgument("eps numerator too large".into()))?;
                Ok(Self::PowerNeg { q: q.clone(), num: b - a, den: b })
            }
            PhiFunction::InverseLog => {
                let bits = 2 * q.bits() as u32 + 64;
                let (lo, hi) = phi.bounds(q, bits)?;
                let qq = Rational::from_integer(q.clone());
                Ok(Self::Enclosed { lo: (&qq * hi).recip(), hi: (qq * lo).recip(), label: format!("(1+log2 {q})/{q}") })
            }
        }
    }

    /// `Some(Less | Equal)` when `x <= bound` is certain, `Some(Greater)` when
    /// `x > bound` is certain, `None` when the enclosure of the bound cannot
    /// decide.
    pub fn compare(&self, x: &Rational) -> Option<Ordering> {
        match self {
            Self::Exact(b) => Some(x.cmp(b)),
            Self::PowerNeg { q, num, den } => {
                if !x.is_positive() {
                    return Some(Ordering::Less);
                }
                // x <= q^(-num/den)  <=>  x_n^den q^num <= x_d^den
                let lhs = num_traits::pow(x.numer().clone(), *den as usize) * num_traits::pow(q.clone(), *num as usize);
                let rhs = num_traits::pow(x.denom().clone(), *den as usize);
                Some(lhs.cmp(&rhs))
            }
            Self::Enclosed { lo, hi, .. } => {
                if x <= lo {
                    Some(if x == lo && lo == hi { Ordering::Equal } else { Ordering::Less })
                } else if x > hi {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
        }
    }

    /// A positive rational no larger than the bound, within a factor of
    /// about `1 + 2^-20`.
    pub fn lower_approx(&self) -> Result<Rational> {
        match self {
            Self::Exact(b) => Ok(b.clone()),
            Self::Enclosed { lo, .. } => Ok(lo.clone()),
            Self::PowerNeg { q, num, den } => {
                if *num == 0 {
                    return Ok(Rational::one());
                }
                if num >= den {
                    let whole = num / den;
                    let rest = Self::PowerNeg { q: q.clone(), num: num % den, den: *den }.lower_approx()?;
                    return Ok(rest / Rational::from_integer(num_traits::pow(q.clone(), whole as usize)));
                }
                let phi = PhiFunction::Power(Rational::new(BigInt::from(*num), BigInt::from(*den)));
                Ok(phi.bounds(q, 20 + q.bits() as u32)?.0)
            }
        }
    }

    /// Verdict for an enclosure of the left-hand side.
    pub fn verdict(&self, value: &Interval) -> Verdict {
        if matches!(self.compare(value.hi()), Some(Ordering::Less | Ordering::Equal)) {
            Verdict::Pass
        } else if self.compare(value.lo()) == Some(Ordering::Greater) {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact(b) => write!(f, "{b}"),
            Self::PowerNeg { q, num, den } if *den == 1 => write!(f, "{q}^(-{num})"),
            Self::PowerNeg { q, num, den } => write!(f, "{q}^(-{num}/{den})"),
            Self::Enclosed { lo, hi, label } => write!(f, "{label} in [{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Indeterminate,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Indeterminate => "indeterminate",
            Self::Fail => "fail",
        })
    }
}

/// Where a certified denominator comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Provenance {
    Construction { theorem: String, j: usize, m: u64 },
    Witness { kind: String, index: usize },
    Scan(String),
}

impl Provenance {
    /// Stable sort key.
    pub fn key(&self) -> String {
        match self {
            Self::Construction { theorem, j, .. } => format!("{theorem}:{j:08}"),
            Self::Witness { kind, index } => format!("{kind}:{index:08}"),
            Self::Scan(s) => format!("scan:{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Depths {
    pub alpha: usize,
    pub beta: usize,
}

/// One checked inequality along the certification chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Link {
    pub fn new(name: &str, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), verdict, detail: detail.into() }
    }

    pub fn check(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        Self::new(name, if holds { Verdict::Pass } else { Verdict::Fail }, detail)
    }
}

/// A rigorous verdict for `value <= bound` at one denominator `q`. Field
/// order is the serialized order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub spec_version: String,
    pub kind: String,
    pub q: String,
    pub product_lo: String,
    pub product_hi: String,
    pub bound: String,
    pub verdict: Verdict,
    pub provenance: Provenance,
    pub depths: Depths,
    pub timestamp: u64,
    #[serde(default)]
    pub advisory: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<Link>,
}

fn rational_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses the `"p/q"` strings written into certificates.
pub fn parse_rational_string(s: &str) -> Result<Rational> {
    crate::constructor::parse_rational(s)
}

pub fn unix_timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl Certificate {
    pub fn new(kind: &str, q: &BigInt, product: &Interval, bound: &Bound, provenance: Provenance, depths: Depths) -> Self {
        Self {
            spec_version: SCHEMA_VERSION.to_string(),
            kind: kind.to_string(),
            q: q.to_string(),
            product_lo: rational_string(product.lo()),
            product_hi: rational_string(product.hi()),
            bound: bound.to_string(),
            verdict: bound.verdict(product),
            provenance,
            depths,
            timestamp: unix_timestamp(),
            advisory: false,
            links: Vec::new(),
        }
    }

    pub fn product(&self) -> Result<Interval> {
        Interval::new(parse_rational_string(&self.product_lo)?, parse_rational_string(&self.product_hi)?)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("certificates serialize")
    }

    /// Whether every chain link passed.
    pub fn links_pass(&self) -> bool {
        self.links.iter().all(|l| l.verdict == Verdict::Pass)
    }

    pub fn link(&self, name: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.name == name)
    }
}

/// Worst verdict over the non-advisory certificates, or over all of them
/// when every certificate is advisory. Empty input passes.
pub fn aggregate(certs: &[Certificate]) -> Verdict {
    let binding: Vec<&Certificate> = certs.iter().filter(|c| !c.advisory).collect();
    let pool: Vec<&Certificate> = if binding.is_empty() { certs.iter().collect() } else { binding };
    pool.iter().map(|c| c.verdict).max().unwrap_or(Verdict::Pass)
}

/// Appends certificates to a JSON-lines file, one write per call.
pub fn append_to_store(path: &Path, certs: &[Certificate]) -> Result<()> {
    let mut buf = String::new();
    for c in certs {
        buf.push_str(&c.to_json_line());
        buf.push('\n');
    }
    let io = |e: std::io::Error| Error::InvalidArgument(format!("certificate store {}: {e}", path.display()));
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    file.write_all(buf.as_bytes()).map_err(io)
}

pub fn read_store(path: &Path) -> Result<Vec<Certificate>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("certificate store {}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(format!("certificate line: {e}"))))
        .collect()
}
