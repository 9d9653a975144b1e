//! XOR multiplexing compilers.
//!
//! Each compiler turns `ℓ` single-instance point-to-point protocols into
//! one board protocol for `ℓ` instances. Messages named by a certificate
//! are merged into one XOR block; every recipient rebuilds the other
//! messages of its block from its own view and strips them off.

mod combine;
mod engine;
mod permute;
mod plan;

pub use combine::{compile_symmetric, multiplex_combine, myopic_combine};
pub use engine::Group;
pub use permute::{check_pattern_robust, permute_protocol};
pub use plan::{
    myopic_payload, predicted_bound, Certificate, CompilationPlan, CompiledProtocol, CompilePath,
};
