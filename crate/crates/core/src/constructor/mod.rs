//! Construction of the partner number `beta` for a given `alpha`.

mod build;
mod markers;
mod phi;
mod record;
pub mod schedule;

pub use build::{
    build_beta_palindromic, build_beta_thm1, build_beta_thm2, build_beta_thm3, decompose_blocks, ConstructionRecord, GrowthSpec,
    TheoremTag,
};
pub use markers::{MarkerRule, Markers};
pub use phi::{parse_rational, PhiFunction};
pub use record::{ConstructionDoc, ScheduleDoc};
pub use schedule::{GrowthReport, Schedule, ScheduleRule};
