//! Communication graph, mappings, balance constraint, quotient graph and
//! the objective function.

mod balance;
mod graph;
mod mapping;
mod quotient;

pub use balance::{compute_lmax, parse_epsilon, BalanceSpec, Epsilon};
pub use graph::{Graph, NodeId, Weight};
pub use mapping::{block_weights, objective_j, Mapping};
pub use quotient::{boundary_nodes, build_quotient_graph, is_boundary, QuotientGraph};

