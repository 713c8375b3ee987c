//! School choice under the Boston mechanism and student-proposing deferred
//! acceptance, with synthetic instances, sophisticated-student strategies
//! and benefit metrics.
//!
//! The crate is `no_std` and only needs `alloc`. All randomness comes from
//! caller-supplied generators; [`trial`] seeds ChaCha streams per trial and
//! cell so results are reproducible.

#![no_std]

extern crate alloc;

pub mod geninst;
pub mod mechanisms;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod strategies;
pub mod trial;

pub use mechanisms::{boston, deferred_acceptance, Mechanism};
pub use model::{
    rank_of, validate_matching, Instance, Matching, MatchingViolation, PreferenceList, SchoolId,
    SchoolPriority, StudentId,
};
pub use strategies::{AlterationPlan, StrategyKind};
