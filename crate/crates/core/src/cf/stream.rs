//! Infinite (or finitely specified) continued fractions `[0; a_1, a_2, ...]`
//! with an append-only memoized prefix.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, MutexGuard};

use num_bigint::BigInt;
use num_traits::Signed;

use super::word::{continuant_matrix, CfWord};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::{Interval, Rational};

/// Produces a stream's partial quotients block by block.
pub trait BlockSource: Send {
    /// The next block, or `None` once the stream has ended.
    fn next_block(&mut self) -> Result<Option<Vec<u64>>>;
}

/// The `n`-th convergent `p_n / q_n` of a continued fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent<T> {
    pub index: usize,
    pub p: T,
    pub q: T,
}

type Oracle = Arc<dyn Fn(usize) -> Option<u64> + Send + Sync>;

enum Kind {
    Periodic { pre: CfWord, period: CfWord },
    Finite(CfWord),
    Oracle(Oracle),
    Blocks,
}

struct Memo {
    prefix: Vec<u64>,
    source: Option<Box<dyn BlockSource>>,
    ended: bool,
}

struct Inner {
    kind: Kind,
    bound: Option<u64>,
    memo: Mutex<Memo>,
}

/// A continued fraction `[0; a_1, a_2, ...]` whose partial quotients are
/// produced on demand. Cloning is cheap and clones share the memoized prefix.
#[derive(Clone)]
pub struct CfStream {
    inner: Arc<Inner>,
}

impl CfStream {
    fn from_kind(kind: Kind, bound: Option<u64>, source: Option<Box<dyn BlockSource>>) -> Self {
        Self {
            inner: Arc::new(Inner {
                kind,
                bound,
                memo: Mutex::new(Memo { prefix: Vec::new(), source, ended: false }),
            }),
        }
    }

    /// `[0; pre, period, period, ...]`. Without an explicit bound the largest
    /// entry is used.
    pub fn periodic(pre: CfWord, period: CfWord, bound: Option<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period word of a periodic stream must be nonempty".into()));
        }
        let max = pre.iter().chain(period.iter()).copied().max().unwrap_or(1);
        let bound = check_bound(max, bound)?;
        Ok(Self::from_kind(Kind::Periodic { pre, period }, Some(bound), None))
    }

    /// A finite continued fraction; asking for more quotients than it has is
    /// a [`Error::StreamExhausted`].
    pub fn finite(word: CfWord, bound: Option<u64>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        let max = word.iter().copied().max().unwrap_or(1);
        let bound = check_bound(max, bound)?;
        Ok(Self::from_kind(Kind::Finite(word), Some(bound), None))
    }

    /// Quotients given by an index oracle (1-based); `None` ends the stream.
    pub fn from_fn<F>(oracle: F, bound: Option<u64>) -> Self
    where
        F: Fn(usize) -> Option<u64> + Send + Sync + 'static,
    {
        Self::from_kind(Kind::Oracle(Arc::new(oracle)), bound, None)
    }

    /// Quotients produced by concatenating the blocks of `source`.
    pub fn from_blocks(source: Box<dyn BlockSource>, bound: Option<u64>) -> Self {
        Self::from_kind(Kind::Blocks, bound, Some(source))
    }

    /// Declared partial-quotient bound, if the stream is known to be
    /// badly approximable.
    pub fn bound(&self) -> Option<u64> {
        self.inner.bound
    }

    pub fn require_bound(&self) -> Result<u64> {
        self.inner.bound.ok_or(Error::UndeclaredBound)
    }

    /// True when both streams are known to expand the same number: the same
    /// object, or equal periodic or finite expansions after normalization.
    pub fn same_as(&self, other: &CfStream) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        match (&self.inner.kind, &other.inner.kind) {
            (Kind::Periodic { pre: p1, period: r1 }, Kind::Periodic { pre: p2, period: r2 }) => {
                canonical_periodic(p1.as_slice(), r1.as_slice()) == canonical_periodic(p2.as_slice(), r2.as_slice())
            }
            (Kind::Finite(w1), Kind::Finite(w2)) => canonical_finite(w1.as_slice()) == canonical_finite(w2.as_slice()),
            _ => false,
        }
    }

    /// Text form accepted by [`FromStr`], when the stream has one.
    pub fn spec_string(&self) -> Option<String> {
        let join = |w: &CfWord| w.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let bound = self.inner.bound.map(|m| format!(" M={m}")).unwrap_or_default();
        match &self.inner.kind {
            Kind::Periodic { pre, period } if pre.is_empty() => Some(format!("0; | ({}){bound}", join(period))),
            Kind::Periodic { pre, period } => Some(format!("0; {} | ({}){bound}", join(pre), join(period))),
            Kind::Finite(w) => Some(format!("0; {}{bound}", join(w))),
            _ => None,
        }
    }

    fn lock(&self) -> MutexGuard<'_, Memo> {
        self.inner.memo.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    fn ensure(&self, n: usize) -> Result<MutexGuard<'_, Memo>> {
        let mut memo = self.lock();
        while memo.prefix.len() < n && !memo.ended {
            let start = memo.prefix.len();
            let produced: Option<Vec<u64>> = match &self.inner.kind {
                Kind::Periodic { pre, period } => {
                    let v = (start..n)
                        .map(|i| if i < pre.len() { pre[i] } else { period[(i - pre.len()) % period.len()] })
                        .collect();
                    Some(v)
                }
                Kind::Finite(w) => {
                    if start < w.len() {
                        Some(w[start..w.len().min(n)].to_vec())
                    } else {
                        None
                    }
                }
                Kind::Oracle(f) => f(start + 1).map(|a| vec![a]),
                Kind::Blocks => match memo.source.as_mut() {
                    Some(src) => src.next_block()?,
                    None => None,
                },
            };
            match produced {
                Some(block) => {
                    for (offset, &a) in block.iter().enumerate() {
                        let index = start + offset + 1;
                        if a == 0 {
                            return Err(Error::ZeroQuotient(index));
                        }
                        if let Some(bound) = self.inner.bound {
                            if a > bound {
                                return Err(Error::BoundViolation { index, value: a, bound });
                            }
                        }
                    }
                    memo.prefix.extend_from_slice(&block);
                }
                None => {
                    memo.ended = true;
                    memo.source = None;
                }
            }
        }
        if memo.prefix.len() < n {
            return Err(Error::StreamExhausted { requested: n, available: memo.prefix.len() });
        }
        Ok(memo)
    }

    /// The partial quotient `a_index` (1-based).
    pub fn quotient(&self, index: usize) -> Result<u64> {
        if index == 0 {
            return Err(Error::InvalidArgument("partial quotients are indexed from 1".into()));
        }
        let memo = self.ensure(index)?;
        Ok(memo.prefix[index - 1])
    }

    /// The word `a_1 ... a_n`.
    pub fn prefix(&self, n: usize) -> Result<CfWord> {
        let memo = self.ensure(n)?;
        Ok(CfWord::new(memo.prefix[..n].to_vec()).expect("memoized quotients are positive"))
    }

    /// True when the stream provably has exactly `n` quotients or fewer.
    pub fn is_finite_within(&self, n: usize) -> bool {
        match self.ensure(n + 1) {
            Ok(_) => false,
            Err(Error::StreamExhausted { .. }) => true,
            Err(_) => false,
        }
    }

    /// `[q_n, q_{n-1}, p_n, p_{n-1}]` for the `n`-th convergent.
    pub fn convergent_matrix<T: Scalar>(&self, n: usize) -> Result<[T; 4]> {
        let word = self.prefix(n)?;
        Ok(continuant_matrix::<T>(&word))
    }

    pub fn convergent<T: Scalar>(&self, n: usize) -> Result<Convergent<T>> {
        let [q, _, p, _] = self.convergent_matrix::<T>(n)?;
        Ok(Convergent { index: n, p, q })
    }

    /// `p_1/q_1, ..., p_n/q_n`.
    pub fn convergents<T: Scalar>(&self, n: usize) -> Result<Vec<Convergent<T>>> {
        let word = self.prefix(n)?;
        let (mut p_prev, mut p) = (T::one(), T::zero());
        let (mut q_prev, mut q) = (T::zero(), T::one());
        let mut out = Vec::with_capacity(n);
        for (i, &a) in word.iter().enumerate() {
            let a = T::from(a);
            let p_next = a.clone() * p.clone() + p_prev;
            let q_next = a * q.clone() + q_prev;
            p_prev = p;
            q_prev = q;
            p = p_next;
            q = q_next;
            out.push(Convergent { index: i + 1, p: p.clone(), q: q.clone() });
        }
        Ok(out)
    }

    /// The interval between the convergents of index `depth - 1` and
    /// `depth`, which contains the value of the stream.
    pub fn enclosure(&self, depth: usize) -> Result<Interval> {
        if depth < 2 {
            return Err(Error::InvalidArgument("enclosure depth must be at least 2".into()));
        }
        let [q, q_prev, p, p_prev] = self.convergent_matrix::<BigInt>(depth)?;
        Ok(Interval::spanning(Rational::new(p_prev, q_prev), Rational::new(p, q)))
    }

    /// Like [`CfStream::enclosure`], but a finite stream shorter than `depth`
    /// yields its exact value instead of an exhaustion error.
    pub fn enclosure_or_value(&self, depth: usize) -> Result<(Interval, usize)> {
        match self.enclosure(depth) {
            Ok(iv) => Ok((iv, depth)),
            Err(Error::StreamExhausted { available, .. }) if available >= 1 => {
                let [q, _, p, _] = self.convergent_matrix::<BigInt>(available)?;
                Ok((Interval::point(Rational::new(p, q)), available))
            }
            Err(e) => Err(e),
        }
    }

    /// Rigorous enclosure of `||q x||` where `x` is the value of the stream.
    pub fn norm_dist(&self, q: &BigInt, target_width: &Rational) -> Result<Interval> {
        self.norm_dist_with(q, target_width, None).map(|(iv, _)| iv)
    }

    /// [`CfStream::norm_dist`] with an explicit depth cap; also returns the
    /// depth used. The result has width at most `target_width`, never meets a
    /// half-integer, and excludes 0 whenever the value is irrational.
    pub fn norm_dist_with(&self, q: &BigInt, target_width: &Rational, max_depth: Option<usize>) -> Result<(Interval, usize)> {
        if !q.is_positive() {
            return Err(Error::InvalidArgument(format!("norm_dist needs q >= 1, got {q}")));
        }
        if !target_width.is_positive() {
            return Err(Error::InvalidArgument("target width must be positive".into()));
        }
        let cap = max_depth.unwrap_or_else(|| default_depth_cap(q, target_width));
        let scale = Rational::from_integer(q.clone());
        refine_depth(start_depth(q, target_width), cap, "norm_dist", |depth| {
            let (enc, used) = self.enclosure_or_value(depth)?;
            let exact = enc.width() == Rational::from_integer(BigInt::from(0));
            let Some(dist) = enc.scale(&scale).nearest_integer_distance() else {
                return Ok(Step::Deeper);
            };
            if exact || (dist.width() <= *target_width && dist.is_positive()) {
                Ok(Step::Done((dist, used)))
            } else {
                Ok(Step::Deeper)
            }
        })
    }
}

impl fmt::Debug for CfStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let known = self.lock().prefix.len();
        f.debug_struct("CfStream")
            .field("spec", &self.spec_string())
            .field("bound", &self.inner.bound)
            .field("memoized", &known)
            .finish()
    }
}

fn check_bound(max: u64, bound: Option<u64>) -> Result<u64> {
    match bound {
        Some(m) if m < max => Err(Error::BoundViolation { index: 0, value: max, bound: m }),
        Some(m) => Ok(m),
        None => Ok(max),
    }
}

/// Outcome of one refinement attempt.
pub(crate) enum Step<R> {
    Done(R),
    Deeper,
}

/// Doubles the depth from `start` until `attempt` succeeds, trying `cap`
/// itself last.
pub(crate) fn refine_depth<R>(start: usize, cap: usize, what: &str, mut attempt: impl FnMut(usize) -> Result<Step<R>>) -> Result<R> {
    let mut depth = start.clamp(2, cap.max(2));
    loop {
        if let Step::Done(r) = attempt(depth)? {
            return Ok(r);
        }
        if depth >= cap {
            return Err(Error::RefinementCap { depth, what: what.to_string() });
        }
        depth = (depth * 2).min(cap);
    }
}

fn bits_of_inverse(w: &Rational) -> u64 {
    let inv = w.recip();
    inv.ceil().to_integer().bits()
}

/// Default cap: `10 * bitlen(q)` plus room for the requested width.
pub(crate) fn default_depth_cap(q: &BigInt, target_width: &Rational) -> usize {
    (10 * q.bits() + 4 * bits_of_inverse(target_width) + 64) as usize
}

pub(crate) fn start_depth(q: &BigInt, target_width: &Rational) -> usize {
    (((q.bits() + bits_of_inverse(target_width)) / 4) as usize).max(2)
}

impl fmt::Display for CfStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spec_string() {
            Some(s) => f.write_str(&s),
            None => {
                let memo = self.lock();
                let shown: Vec<String> = memo.prefix.iter().take(12).map(u64::to_string).collect();
                write!(f, "0; {}, ...", shown.join(","))
            }
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad partial quotient {t:?}"))))
        .collect()
}

/// `0; a1,a2,...` (finite), `0; pre | (per)` (periodic), each optionally
/// followed by `M=k`.
impl FromStr for CfStream {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (body, bound) = match text.find("M=") {
            Some(pos) => {
                let m = text[pos + 2..]
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad bound annotation in {text:?}")))?;
                if m == 0 {
                    return Err(Error::Parse("bound must be positive".into()));
                }
                (text[..pos].trim_end_matches([' ', ',', ';']), Some(m))
            }
            None => (text, None),
        };
        let (int_part, rest) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected `0; ...` in {text:?}")))?;
        if int_part.trim() != "0" {
            return Err(Error::Parse(format!("integer part must be 0, found {:?}", int_part.trim())));
        }
        let wrap = |v: Vec<u64>| CfWord::new(v).map_err(|e| Error::Parse(e.to_string()));
        match rest.split_once('|') {
            Some((pre, per)) => {
                let per = per.trim();
                let inner = per
                    .strip_prefix('(')
                    .and_then(|p| p.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("period must be parenthesized, found {per:?}")))?;
                CfStream::periodic(wrap(parse_list(pre)?)?, wrap(parse_list(inner)?)?, bound)
            }
            None => {
                let word = wrap(parse_list(rest)?)?;
                if word.is_empty() {
                    return Err(Error::Parse("no partial quotients given".into()));
                }
                CfStream::finite(word, bound)
            }
        }
    }
}

/// Shortest preperiod and primitive period.
fn canonical_periodic(pre: &[u64], period: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let n = period.len();
    let p = (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| period[i] == period[i - p])).unwrap_or(n);
    let mut pre = pre.to_vec();
    let mut period = period[..p].to_vec();
    while pre.last().is_some_and(|x| Some(x) == period.last()) {
        pre.pop();
        period.rotate_right(1);
    }
    (pre, period)
}

/// `[..., a, 1]` written as `[..., a + 1]`.
fn canonical_finite(w: &[u64]) -> Vec<u64> {
    let mut v = w.to_vec();
    if v.len() >= 2 && v[v.len() - 1] == 1 {
        v.pop();
        *v.last_mut().expect("nonempty") += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(big(n), big(d))
    }

    fn golden() -> CfStream {
        "0; | (1)".parse().unwrap()
    }

    fn silver() -> CfStream {
        "0; | (2)".parse().unwrap()
    }

    #[test]
    fn equal_expansions_are_recognized() {
        let a: CfStream = "0; | (2)".parse().unwrap();
        let b: CfStream = "0; 2 2 | (2, 2)".parse().unwrap();
        let c: CfStream = "0; 1 | (2, 1)".parse().unwrap();
        let d: CfStream = "0; | (1, 2)".parse().unwrap();
        assert!(a.same_as(&b));
        assert!(c.same_as(&d));
        assert!(!a.same_as(&d));
        let f = CfStream::finite(CfWord::new(vec![2, 3, 1]).unwrap(), None).unwrap();
        let g = CfStream::finite(CfWord::new(vec![2, 4]).unwrap(), None).unwrap();
        assert!(f.same_as(&g));
    }

    #[test]
    fn parses_the_text_format() {
        let s: CfStream = "0;|(2)".parse().unwrap();
        assert_eq!(s.bound(), Some(2));
        assert_eq!(s.prefix(4).unwrap().as_slice(), &[2, 2, 2, 2]);
        let t: CfStream = "0; 1,2 | (3, 4) M=5".parse().unwrap();
        assert_eq!(t.prefix(7).unwrap().as_slice(), &[1, 2, 3, 4, 3, 4, 3]);
        assert_eq!(t.bound(), Some(5));
        assert_eq!(t.spec_string().unwrap(), "0; 1,2 | (3,4) M=5");
        let u: CfStream = "0; 3,1,4".parse().unwrap();
        assert_eq!(u.prefix(3).unwrap().as_slice(), &[3, 1, 4]);
        assert!(matches!(u.prefix(4), Err(Error::StreamExhausted { requested: 4, available: 3 })));
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["1; 2", "0 2,3", "0; | ()", "0; | 2", "0; 1,0,2", "0;", "0; | (3) M=2", "0; x"] {
            assert!(bad.parse::<CfStream>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spec_string_round_trips() {
        for text in ["0; | (2) M=2", "0; 1,2 | (1,1,3) M=3", "0; 5,1 M=5"] {
            let s: CfStream = text.parse().unwrap();
            let again: CfStream = s.spec_string().unwrap().parse().unwrap();
            assert_eq!(s.prefix(9).ok(), again.prefix(9).ok());
            assert_eq!(s.spec_string(), again.spec_string());
        }
    }

    #[test]
    fn oracle_streams_check_their_bound() {
        let s = CfStream::from_fn(|i| Some(if i == 5 { 7 } else { 1 }), Some(3));
        assert_eq!(s.quotient(4).unwrap(), 1);
        assert!(matches!(s.quotient(5), Err(Error::BoundViolation { index: 5, value: 7, bound: 3 })));
    }

    #[test]
    fn convergent_examples() {
        let qs: Vec<i128> = golden().convergents::<i128>(5).unwrap().iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8]);
        let pq: Vec<(i128, i128)> = silver().convergents::<i128>(3).unwrap().iter().map(|c| (c.p, c.q)).collect();
        assert_eq!(pq, vec![(1, 2), (2, 5), (5, 12)]);
        let s: CfStream = "0; 7,1 | (2)".parse().unwrap();
        assert_eq!(s.convergent::<i128>(1).unwrap().q, 7);
    }

    #[test]
    fn enclosure_examples() {
        let e = golden().enclosure(5).unwrap();
        assert_eq!(e, Interval::new(q(3, 5), q(5, 8)).unwrap());
        // (sqrt 5 - 1)/2 = 0.6180339887...
        assert!(e.contains(&q(6180339887, 10_000_000_000)));
        let s = silver().enclosure(4).unwrap();
        // sqrt 2 - 1 = 0.41421356237...
        assert!(s.contains(&q(41421356237, 100_000_000_000)));
        assert!(golden().enclosure(1).is_err());
    }

    #[test]
    fn enclosures_are_nested_and_shrink() {
        let s: CfStream = "0; 1,4 | (2,1,3)".parse().unwrap();
        let mut prev = s.enclosure(2).unwrap();
        for d in 3..40 {
            let cur = s.enclosure(d).unwrap();
            assert!(cur.is_subset_of(&prev));
            assert!(cur.width() < prev.width());
            prev = cur;
        }
    }

    #[test]
    fn norm_dist_golden() {
        // ||5 phi|| = (5 sqrt5 - 11)/2 = 0.0901699437...
        let iv = golden().norm_dist(&big(5), &q(1, 1_000_000_000)).unwrap();
        // lo <= x <= hi  <=>  (2 lo + 11)^2 <= 125 <= (2 hi + 11)^2
        let sq = |r: &Rational| {
            let t = r * big(2) + big(11);
            &t * &t
        };
        assert!(sq(iv.lo()) <= q(125, 1) && q(125, 1) <= sq(iv.hi()), "{iv}");
        assert!(iv.width() <= q(1, 1_000_000_000));
    }

    #[test]
    fn norm_dist_at_convergent_denominators() {
        let s = silver();
        let cs = s.convergents::<BigInt>(12).unwrap();
        for n in 1..11 {
            let iv = s.norm_dist(&cs[n - 1].q, &q(1, 1 << 40)).unwrap();
            let q_next = cs[n].q.clone();
            let q_cur = cs[n - 1].q.clone();
            let lower = Rational::new(BigInt::one(), &q_next + &q_cur);
            let upper = Rational::new(BigInt::one(), q_next);
            assert!(iv.is_subset_of(&Interval::new(lower, upper).unwrap()), "n = {n}: {iv}");
        }
    }

    #[test]
    fn norm_dist_at_one_is_the_value() {
        let iv = silver().norm_dist(&big(1), &q(1, 1_000_000)).unwrap();
        assert!(iv.contains(&q(41421356237, 100_000_000_000)));
    }

    #[test]
    fn norm_dist_cap_is_reported() {
        let r = golden().norm_dist_with(&big(3), &q(1, 1 << 60), Some(10));
        assert!(matches!(r, Err(Error::RefinementCap { .. })));
    }

    #[test]
    fn norm_dist_on_rational_streams_is_exact() {
        let s: CfStream = "0; 2,3".parse().unwrap(); // 3/7
        let iv = s.norm_dist(&big(7), &q(1, 100)).unwrap();
        assert_eq!(iv, Interval::point(q(0, 1)));
        let iv = s.norm_dist(&big(2), &q(1, 100)).unwrap();
        assert_eq!(iv, Interval::point(q(1, 7)));
    }
}
