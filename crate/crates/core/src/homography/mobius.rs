use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::{BlockSource, CfStream};
use crate::error::{Error, Result};
use crate::scalar::SignedScalar;

/// `x -> (a x + b) / (c x + d)` with `ad - bc != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mobius<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: SignedScalar> Mobius<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let m = Self { a, b, c, d };
        if m.det().is_zero() {
            return Err(Error::SingularMap);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self { a: T::one(), b: T::zero(), c: T::zero(), d: T::one() }
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    /// `|det| = 1`: the image is equivalent to the input.
    pub fn is_equivalence(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn apply(&self, x: &Ratio<T>) -> Result<Ratio<T>> {
        let num = x.clone() * Ratio::from_integer(self.a.clone()) + Ratio::from_integer(self.b.clone());
        let den = x.clone() * Ratio::from_integer(self.c.clone()) + Ratio::from_integer(self.d.clone());
        if den.is_zero() {
            return Err(Error::Pole(format!("{x} is the pole of {self}")));
        }
        Ok(num / den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&other.a, &other.b, &other.c, &other.d);
        Self {
            a: a.clone() * e.clone() + b.clone() * g.clone(),
            b: a.clone() * f.clone() + b.clone() * h.clone(),
            c: c.clone() * e.clone() + d.clone() * g.clone(),
            d: c.clone() * f.clone() + d.clone() * h.clone(),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Mobius<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl<T: SignedScalar + FromStr> FromStr for Mobius<T> {
    type Err = Error;

    /// Parses `a,b,c,d`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Parse(format!("expected a Möbius map as a,b,c,d, got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let mut v = Vec::with_capacity(4);
        for p in parts {
            v.push(p.parse::<T>().map_err(|_| bad())?);
        }
        let d = v.pop().unwrap();
        let c = v.pop().unwrap();
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        Self::new(a, b, c, d)
    }
}

/// Ingest limit per emitted quotient in [`apply_mobius`].
pub const DEFAULT_INGEST_CAP: usize = 100_000;

/// Homographic transducer over the tail `u = [a_k; a_{k+1}, ...]`, which
/// lies in `(1, inf)` for an infinite input: the output value is
/// `(a u + b) / (c u + d)`.
struct Gosper {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
    input: CfStream,
    pos: usize,
    input_ended: bool,
    done: bool,
    emitted: usize,
    pending: VecDeque<BigInt>,
    cap: usize,
}

impl Gosper {
    fn new(input: CfStream, m: &Mobius<BigInt>, cap: usize) -> Self {
        // x = 1/u, so (A x + B)/(C x + D) = (B u + A)/(D u + C)
        Self {
            a: m.b.clone(),
            b: m.a.clone(),
            c: m.d.clone(),
            d: m.c.clone(),
            input,
            pos: 1,
            input_ended: false,
            done: false,
            emitted: 0,
            pending: VecDeque::new(),
            cap,
        }
    }

    /// The integer `n` with `(n, n + 1)` containing the image of `[1, inf]`.
    fn determined(&self) -> Option<BigInt> {
        let cd = &self.c + &self.d;
        if self.c.is_zero() || cd.is_zero() || self.c.is_positive() != cd.is_positive() {
            return None;
        }
        let x = Ratio::new(self.a.clone(), self.c.clone());
        let y = Ratio::new(&self.a + &self.b, cd);
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let n = lo.floor();
        if lo > n && hi < n.clone() + Ratio::one() {
            Some(n.to_integer())
        } else {
            None
        }
    }

    fn emit(&mut self, n: BigInt) -> BigInt {
        let a = std::mem::take(&mut self.c);
        let b = std::mem::take(&mut self.d);
        self.c = &self.a - &n * &a;
        self.d = &self.b - &n * &b;
        self.a = a;
        self.b = b;
        self.emitted += 1;
        n
    }

    fn next(&mut self) -> Result<Option<BigInt>> {
        let mut ingested = 0usize;
        loop {
            if let Some(n) = self.pending.pop_front() {
                self.emitted += 1;
                return Ok(Some(n));
            }
            if self.done {
                return Ok(None);
            }
            if self.input_ended {
                self.done = true;
                if self.c.is_zero() {
                    if self.emitted == 0 {
                        return Err(Error::Pole("the input is the pole of the map".into()));
                    }
                    continue;
                }
                let (mut num, mut den) = (self.a.clone(), self.c.clone());
                if den.is_negative() {
                    num = -num;
                    den = -den;
                }
                while !den.is_zero() {
                    let (q, r) = num.div_mod_floor(&den);
                    self.pending.push_back(q);
                    num = den;
                    den = r;
                }
                continue;
            }
            if let Some(n) = self.determined() {
                return Ok(Some(self.emit(n)));
            }
            if ingested >= self.cap {
                return Err(Error::RefinementCap {
                    depth: self.pos,
                    what: format!("homographic image undetermined after {ingested} further input quotients"),
                });
            }
            match self.input.quotient(self.pos) {
                Ok(t) => {
                    let t = BigInt::from(t);
                    let a = &self.a * &t + &self.b;
                    let c = &self.c * &t + &self.d;
                    self.b = std::mem::replace(&mut self.a, a);
                    self.d = std::mem::replace(&mut self.c, c);
                    self.pos += 1;
                    ingested += 1;
                }
                Err(Error::StreamExhausted { .. }) => self.input_ended = true,
                Err(e) => return Err(e),
            }
        }
    }
}

impl BlockSource for Gosper {
    fn next_block(&mut self) -> Result<Option<Vec<u64>>> {
        match self.next()? {
            None => Ok(None),
            Some(n) => {
                let v = n
                    .to_u64()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| Error::InvalidArgument(format!("image partial quotient {n} is not a positive u64")))?;
                Ok(Some(vec![v]))
            }
        }
    }
}

/// Continued fraction of `(a x + b)/(c x + d)` where `x` is the value of
/// `input`: returns the integer part and a lazy stream for the fractional
/// part. The fractional stream is empty when the image is an integer.
pub fn apply_mobius(input: &CfStream, m: &Mobius<BigInt>) -> Result<(BigInt, CfStream)> {
    apply_mobius_with_cap(input, m, DEFAULT_INGEST_CAP)
}

pub fn apply_mobius_with_cap(input: &CfStream, m: &Mobius<BigInt>, cap: usize) -> Result<(BigInt, CfStream)> {
    if m.det().is_zero() {
        return Err(Error::SingularMap);
    }
    let mut g = Gosper::new(input.clone(), m, cap);
    let int_part = g.next()?.ok_or_else(|| Error::Pole("the input is the pole of the map".into()))?;
    Ok((int_part, CfStream::from_blocks(Box::new(g), None)))
}
