use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How the marker sequence `t_1, t_2, ...` is chosen. Every marker must lie
/// in `{M+1, M+2}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum MarkerRule {
    /// `t_j = M + 1` for all `j`.
    #[default]
    Default,
    Constant(u64),
    /// A finite list; asking past its end is an error.
    List(Vec<u64>),
    /// Pseudo-random choice in `{M+1, M+2}` from a ChaCha8 stream.
    Seeded(u64),
}

impl fmt::Display for MarkerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Default => f.write_str("default"),
            Self::Constant(v) => write!(f, "const:{v}"),
            Self::List(list) => {
                let parts: Vec<String> = list.iter().map(u64::to_string).collect();
                write!(f, "list:{}", parts.join(","))
            }
            Self::Seeded(seed) => write!(f, "seeded:{seed}"),
        }
    }
}

impl FromStr for MarkerRule {
    type Err = Error;

    /// Accepts `default`, `const:V` (or a bare integer), `list:V,V,...` and
    /// `seeded:S`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad marker rule {s:?}; expected default, const:V, list:V,.. or seeded:S"));
        let int = |x: &str| x.trim().parse::<u64>().map_err(|_| bad());
        if s == "default" {
            return Ok(Self::Default);
        }
        if let Some(v) = s.strip_prefix("const:") {
            return Ok(Self::Constant(int(v)?));
        }
        if let Some(v) = s.strip_prefix("list:") {
            let list = v.split(',').map(int).collect::<Result<Vec<_>>>()?;
            return Ok(Self::List(list));
        }
        if let Some(v) = s.strip_prefix("seeded:") {
            return Ok(Self::Seeded(int(v)?));
        }
        Ok(Self::Constant(int(s)?))
    }
}

/// A marker sequence bound to a specific `M`.
#[derive(Debug)]
pub struct Markers {
    rule: MarkerRule,
    bound: u64,
    seeded: Mutex<Option<(ChaCha8Rng, Vec<u64>)>>,
}

impl Markers {
    pub fn new(rule: MarkerRule, bound: u64) -> Result<Self> {
        let markers = Self { rule, bound, seeded: Mutex::new(None) };
        match &markers.rule {
            MarkerRule::Constant(v) => markers.check(*v)?,
            MarkerRule::List(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidArgument("marker list is empty".into()));
                }
                for &v in list {
                    markers.check(v)?;
                }
            }
            _ => {}
        }
        Ok(markers)
    }

    pub fn rule(&self) -> &MarkerRule {
        &self.rule
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    fn check(&self, v: u64) -> Result<()> {
        let (lo, hi) = (self.bound + 1, self.bound + 2);
        if v == lo || v == hi {
            Ok(())
        } else {
            Err(Error::InvalidMarker { value: v, lo, hi })
        }
    }

    /// `t_j`, 1-based.
    pub fn get(&self, j: usize) -> Result<u64> {
        assert!(j >= 1, "markers are 1-based");
        match &self.rule {
            MarkerRule::Default => Ok(self.bound + 1),
            MarkerRule::Constant(v) => Ok(*v),
            MarkerRule::List(list) => list.get(j - 1).copied().ok_or(Error::MarkersExhausted(j)),
            MarkerRule::Seeded(seed) => {
                let mut guard = self.seeded.lock().unwrap_or_else(|p| p.into_inner());
                let (rng, cache) = guard.get_or_insert_with(|| (ChaCha8Rng::seed_from_u64(*seed), Vec::new()));
                while cache.len() < j {
                    cache.push(self.bound + 1 + u64::from(rng.gen::<bool>()));
                }
                Ok(cache[j - 1])
            }
        }
    }

    /// `t_1 .. t_count`.
    pub fn take(&self, count: usize) -> Result<Vec<u64>> {
        (1..=count).map(|j| self.get(j)).collect()
    }
}
