use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("partial quotients must be positive, found 0 at position {0}")]
    ZeroQuotient(usize),
    #[error("empty word where a nonempty one is required")]
    EmptyWord,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rational {0} is outside the open unit interval")]
    OutOfUnitInterval(String),
    #[error("stream exhausted: requested {requested} partial quotients, only {available} exist")]
    StreamExhausted { requested: usize, available: usize },
    #[error("partial quotient {value} at index {index} exceeds the declared bound {bound}")]
    BoundViolation { index: usize, value: u64, bound: u64 },
    #[error("stream has no declared partial-quotient bound")]
    UndeclaredBound,
    #[error("refinement cap reached at depth {depth}: {what}")]
    RefinementCap { depth: usize, what: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("marker {value} is not in {{{lo}, {hi}}}")]
    InvalidMarker { value: u64, lo: u64, hi: u64 },
    #[error("marker sequence exhausted at index {0}")]
    MarkersExhausted(usize),
    #[error("ratio {ratio} does not exceed the threshold {coefficient}*log2({base}) (about {approx}; 4*log2(M+3)/eps with eps = {eps})")]
    RatioBelowThreshold { ratio: String, coefficient: String, base: u64, eps: String, approx: String },
    #[error("schedule term {index} violates the growth condition: n = {n}, required at least {required}")]
    ScheduleViolation { index: usize, n: u64, required: String },
    #[error("schedule term {0} is beyond addressable length")]
    ScheduleOverflow(usize),
    #[error("schedule index {index} out of range (available: {available})")]
    ScheduleIndex { index: usize, available: usize },
    #[error("bounds of the family are inconsistent: {0}")]
    MismatchedBounds(String),
    #[error("Möbius map has zero determinant")]
    SingularMap,
    #[error("pole of the Möbius map inside the enclosure ({0})")]
    Pole(String),
    #[error("prefix validation failed: {0}")]
    PrefixMismatch(String),
    #[error("degenerate witness: {0}")]
    Degenerate(String),
    #[error("not a palindrome: prefix of length {0}")]
    NotPalindrome(usize),
    #[error("construction record mismatch: {0}")]
    RecordMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case name of the variant, for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroQuotient(_) => "zero_quotient",
            Error::EmptyWord => "empty_word",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::OutOfUnitInterval(_) => "out_of_unit_interval",
            Error::StreamExhausted { .. } => "stream_exhausted",
            Error::BoundViolation { .. } => "bound_violation",
            Error::UndeclaredBound => "undeclared_bound",
            Error::RefinementCap { .. } => "refinement_cap",
            Error::Parse(_) => "parse",
            Error::InvalidMarker { .. } => "invalid_marker",
            Error::MarkersExhausted(_) => "markers_exhausted",
            Error::RatioBelowThreshold { .. } => "ratio_below_threshold",
            Error::ScheduleViolation { .. } => "schedule_violation",
            Error::ScheduleOverflow(_) => "schedule_overflow",
            Error::ScheduleIndex { .. } => "schedule_index",
            Error::MismatchedBounds(_) => "mismatched_bounds",
            Error::SingularMap => "singular_map",
            Error::Pole(_) => "pole",
            Error::PrefixMismatch(_) => "prefix_mismatch",
            Error::Degenerate(_) => "degenerate",
            Error::NotPalindrome(_) => "not_palindrome",
            Error::RecordMismatch(_) => "record_mismatch",
        }
    }
}
