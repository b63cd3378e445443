//! Exact continued-fraction toolkit for the Littlewood conjecture on pairs of
//! badly approximable numbers.
//!
//! Given `alpha = [0; a_1, a_2, ...]` with bounded partial quotients, the
//! [`constructor`] module builds partners `beta` from mirrored prefixes of
//! `alpha` separated by large markers, and the [`verifier`] module certifies
//! `q ||q alpha|| ||q beta||` bounds at the constructed denominators using
//! rational interval enclosures only. The [`homography`] module covers pairs
//! related by a rational Möbius map.
//!
//! The continuant and interval kernels are generic over an integer
//! [`Scalar`]; the aliases below fix the big-integer instantiation used by
//! the rest of the crate.

pub mod cf;
pub mod constructor;
pub mod error;
pub mod homography;
pub mod interval;
pub mod log2;
pub mod scalar;
pub mod verifier;

use num_bigint::BigInt;
use num_rational::Ratio;

pub use cf::{CfStream, CfWord, Convergent};
pub use error::{Error, Result};
pub use interval::RatInterval;
pub use scalar::{Scalar, SignedScalar};

/// Exact rational over big integers.
pub type Rational = Ratio<BigInt>;
/// Rational interval over big integers.
pub type Interval = RatInterval<BigInt>;
/// Convergent with big-integer numerator and denominator.
pub type BigConvergent = Convergent<BigInt>;
/// Möbius map with big-integer coefficients.
pub type BigMobius = homography::Mobius<BigInt>;

/// Version tag written into every JSON document this crate produces.
pub const SCHEMA_VERSION: &str = "1";
