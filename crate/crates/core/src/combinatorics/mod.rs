//! Permutations and the combinatorial certificates that license
//! multiplexing.

mod matrix;
mod permutation;
mod triplets;

pub use matrix::{build_matrix_a, check_matrix, filtering_to_multiplexing, MatrixA};
pub use permutation::Permutation;
pub use triplets::{
    is_binding_triplet, is_filtering_set, is_good_triplet, is_multiplexing_set,
    is_repetitive_set, BindingTriplet, Condition, FilteringAnalysis, FilteringTriplet,
    MultiplexTriplet, Verdict, Violation,
};

use crate::error::Result;
use crate::model::RestrictionGraph;

/// `G_π`.
pub fn permute_graph(graph: &RestrictionGraph, pi: &Permutation) -> Result<RestrictionGraph> {
    graph.permuted(pi)
}
