//! Continued-fraction primitives: words, continuants, convergents and
//! rigorous enclosures of stream values.

mod stream;
mod word;

pub use stream::{BlockSource, CfStream, Convergent};
pub(crate) use stream::{refine_depth, Step};
pub use word::{
    cf_of_rational, continuant, continuant_matrix, is_palindrome, mirror_ratio_identity, mirror_ratio_identity_in,
    rational_of_word, rational_of_word_in, CfWord, SPLIT_THRESHOLD,
};
