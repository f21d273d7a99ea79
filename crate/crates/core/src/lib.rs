//! Circle tangency counting, lightplank enumeration and the scaling
//! experiments built on them.
//!
//! A planar circle is handled as the point `(center, radius)` of R³. The
//! modules layer as follows: [`geometry`] holds the predicates, [`families`]
//! generates inputs, [`incidence`] counts tangent pairs, [`planks`] enumerates
//! incomparable lightplanks and their richness, and [`experiments`] compares
//! both sides of the counting inequalities across parameter sweeps.

// Validation rejects NaN through negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod families;
pub mod geometry;
pub mod incidence;
pub mod spatial;
pub mod io;
pub mod planks;
pub mod experiments;
pub mod cli;
