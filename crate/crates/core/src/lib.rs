//! Assumption-based truth maintenance with numeric evidential support.
//!
//! The [`atms`] module keeps, for every proposition, the complete set of
//! minimal consistent assumption sets (its *label*) under incremental
//! justification and nogood updates. The [`evidence`] module tags
//! assumptions with evidential mass, compiles support-logic facts and rules
//! into ATMS structures, and reduces labels to `[lower, upper]` support
//! pairs. The [`oracle`] module is an independent brute-force
//! Dempster-Shafer engine over explicit frames used to cross-check the
//! evidence layer.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod atms;
mod error;
pub mod evidence;
pub mod oracle;

pub use atms::{
    AssumptionId, Database, DisjunctionId, EnvId, EvidenceId, Interpretation, JustificationId,
    NodeId, Origin, RuleId,
};
pub use error::{Error, Result};
pub use evidence::{slp_combine, slp_propagate, Evaluation, Reasoner, SupportPair};
