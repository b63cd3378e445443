//! Rational Möbius maps acting on continued fractions, and the witnesses
//! for pairs `(alpha, m(alpha))`.

mod mobius;
mod witness;

pub use mobius::{apply_mobius, apply_mobius_with_cap, Mobius, DEFAULT_INGEST_CAP};
pub use witness::{
    approx_log2, find_palindromic_prefixes, image_norm, measured_exponent, nested_repetition_alpha, nested_repetition_words,
    thm4_witness, thm5_witness, thm6_scan, DualWitness, PalindromeWitness, Thm6Row,
};
