//! Integer scalars the continuant and interval kernels are generic over.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::Signed;

/// An exact integer type usable as the entries of continuant matrices.
///
/// Machine integers (`u64`, `u128`, `i128`) are fine for short words and
/// exhaustive property sweeps; `BigInt` is the default everywhere else.
pub trait Scalar: Integer + Clone + From<u64> + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Integer + Clone + From<u64> + Debug + Display + Send + Sync + 'static {}

/// A signed [`Scalar`], needed once rationals and intervals come into play.
pub trait SignedScalar: Scalar + Signed {}

impl<T> SignedScalar for T where T: Scalar + Signed {}
