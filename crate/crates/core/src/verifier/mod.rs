//! Brute-force checks: a table-lookup oracle, exhaustive verification with
//! cost measurement, prefix-freeness of message sets, and legality fuzzing.

mod exhaustive;
mod fuzz;
mod oracle;
mod prefix;

pub use exhaustive::{
    exhaustive_verify, sample_verify, Counterexample, VerificationReport, VerifyOptions,
};
pub use fuzz::{audit, determinism_check, legality_fuzz, AuditReport, FuzzReport};
pub use oracle::{oracle_evaluate, random_truth_table};
pub use prefix::{check_prefix_free, message_set, prefix_violation};
