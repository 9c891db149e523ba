//! Balanced configurations of the planar N-body problem.

// Negated float comparisons are deliberate: they treat NaN as failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagrams;
pub mod equations;
pub mod massconds;
pub mod model;
pub mod report;
pub mod solver;
