//! Candidate-set conflicts and the zero-round family table.
//!
//! A node of class `i` works with candidate sets of `2^i·τ` colors drawn
//! from its residue-restricted list. The table hands every node type a
//! family of such sets so that adjacent nodes, whose types differ, can
//! never pick families that overlap heavily.

mod bounds;
mod params;
mod predicates;
mod table;

pub use bounds::{binom, bound_d1_d2};
pub use params::{tau_formula, tau_prime_exponent, ConflictParams};
pub use predicates::{mu_g, proximity_count, psi_g_member, residue_restrict, tau_g_conflict};
pub use table::{
    build_cached, build_type_table, cache_key, colex_next, NodeType, Order, Shape, TableCache, TypeTable, DEFAULT_TABLE_CAP,
};
