//! Integrated multilevel process mapping.
//!
//! Maps the nodes of a weighted communication graph onto the `k` processing
//! elements of a homogeneous machine hierarchy, minimizing the total
//! communication cost `J = sum C[u][v] * D[pi(u)][pi(v)]` subject to a block
//! weight bound `L_max`. The pipeline coarsens the graph with rated matchings,
//! computes an initial mapping on the coarsest graph by hierarchy-aware
//! multisection, and refines while projecting back to the input graph.
//!
//! ```
//! use procmap::driver::{map_graph, Preset};
//! use procmap::model::{Epsilon, Graph};
//! use procmap::topology::HierarchySpec;
//!
//! let g = Graph::from_edges(4, &[(0, 1, 5), (1, 2, 1), (2, 3, 5)], None).unwrap();
//! let spec = HierarchySpec::parse("2", "1").unwrap();
//! let (mapping, stats) = map_graph(&g, &spec, &Preset::Strong.config(), Epsilon::new(0, 1), 7).unwrap();
//! assert_eq!(mapping.objective(), 2);
//! assert_eq!(stats.objective, 2);
//! ```

pub mod driver;
pub mod error;
pub mod initial;
pub mod model;
pub mod multilevel;
pub mod refinement;
pub mod rng;
pub mod topology;

pub use error::{Error, Result};
pub use model::{Graph, Mapping, NodeId, Weight};
pub use topology::{DistanceOracle, HierarchySpec, OracleVariant, PeDistance, PeId};
