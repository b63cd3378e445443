//! Rigorous products, certificates for constructed pairs, relation scans
//! and the lemma-level property oracles.

mod certificate;
mod littlewood;
mod oracles;
mod scan;
mod witnesses;

pub use certificate::{
    aggregate, append_to_store, parse_rational_string, read_store, unix_timestamp, Bound, Certificate, Depths, Link, Provenance, Verdict,
};
pub use littlewood::{baseline_check, certify_construction, littlewood_product, littlewood_product_with_depths, q2_products, WidthPolicy};
pub use oracles::{lemma_oracles, OracleReport, OracleResult, OracleSizes};
pub use scan::{independence_scan, is_fibonacci, lower_bound_scan, LowerBoundReport, RelationOutcome, RelationWitness, TripleBound};
pub use witnesses::{thm4_certificates, thm5_certificates, thm6_certificates};
