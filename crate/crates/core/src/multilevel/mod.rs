//! Coarsening by rated matchings, contraction, and projection of mappings
//! back through the level stack.

mod contract;
mod matching;
mod rating;

pub use contract::{contract, CoarseLevel};
pub use matching::{gpa_matching, Matching};
pub use rating::{rate_edges, RatedEdge, Rating, RatingDenominator};

use crate::error::{Error, Result};
use crate::model::{BalanceSpec, Graph, Mapping, Weight};
use crate::rng::Rng;
use crate::topology::PeId;

/// Coarsening parameters.
#[derive(Clone, Debug)]
pub struct CoarseningConfig {
    pub rating: RatingDenominator,
    /// Stop once the graph has at most `max(nodes_per_block * k, min_nodes)` nodes.
    pub nodes_per_block: usize,
    pub min_nodes: usize,
    /// A round must shrink the node count by at least this factor (in percent,
    /// `105` = 1.05x), otherwise coarsening stops.
    pub min_shrink_percent: usize,
}

impl Default for CoarseningConfig {
    fn default() -> Self {
        Self {
            rating: RatingDenominator::NodeWeight,
            nodes_per_block: 60,
            min_nodes: 4096,
            min_shrink_percent: 105,
        }
    }
}

impl CoarseningConfig {
    pub fn stop_threshold(&self, k: usize) -> usize {
        (self.nodes_per_block * k).max(self.min_nodes)
    }
}

/// The input graph followed by successively coarser graphs. Level 0 is the
/// input graph.
#[derive(Clone, Debug)]
pub struct MultilevelHierarchy<'g> {
    input: &'g Graph,
    levels: Vec<CoarseLevel>,
}

impl<'g> MultilevelHierarchy<'g> {
    /// Hierarchy consisting of the input graph only.
    pub fn single(input: &'g Graph) -> Self {
        Self {
            input,
            levels: Vec::new(),
        }
    }

    pub fn push(&mut self, level: CoarseLevel) {
        assert_eq!(level.fine_to_coarse.len(), self.coarsest().n());
        self.levels.push(level);
    }

    /// Number of graphs, including the input.
    pub fn depth(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn graph(&self, level: usize) -> &Graph {
        if level == 0 {
            self.input
        } else {
            &self.levels[level - 1].graph
        }
    }

    pub fn coarsest(&self) -> &Graph {
        self.graph(self.depth() - 1)
    }

    pub fn coarsest_level(&self) -> usize {
        self.depth() - 1
    }

    /// Map from nodes of `level` to nodes of `level + 1`.
    pub fn fine_to_coarse(&self, level: usize) -> &[usize] {
        &self.levels[level].fine_to_coarse
    }

    /// Assigns every node of `to_level` the PE of its representative at
    /// `from_level`.
    pub fn project_assignment(
        &self,
        assignment: &[PeId],
        from_level: usize,
        to_level: usize,
    ) -> Result<Vec<PeId>> {
        if from_level >= self.depth() || to_level > from_level {
            return Err(Error::InvalidParameter(format!(
                "cannot project from level {from_level} to level {to_level} in a hierarchy of depth {}",
                self.depth()
            )));
        }
        if assignment.len() != self.graph(from_level).n() {
            return Err(Error::InvalidMapping(format!(
                "assignment has {} entries, level {from_level} has {} nodes",
                assignment.len(),
                self.graph(from_level).n()
            )));
        }
        let mut current = assignment.to_vec();
        for level in (to_level..from_level).rev() {
            current = self
                .fine_to_coarse(level)
                .iter()
                .map(|&c| current[c])
                .collect();
        }
        Ok(current)
    }

    /// Projects a mapping; block weights and `J` carry over unchanged since
    /// contraction preserves both exactly.
    pub fn project_mapping(
        &self,
        mapping: &Mapping,
        from_level: usize,
        to_level: usize,
    ) -> Result<Mapping> {
        let assignment = self.project_assignment(mapping.assignment(), from_level, to_level)?;
        Ok(Mapping::from_parts(
            assignment,
            mapping.block_weights().to_vec(),
            mapping.objective(),
        ))
    }
}

/// Repeats rate, match and contract until the graph is small enough or a
/// round no longer shrinks it sufficiently. No coarse node exceeds `L_max`.
pub fn coarsen<'g>(
    graph: &'g Graph,
    balance: &BalanceSpec,
    config: &CoarseningConfig,
    rng: &mut Rng,
) -> MultilevelHierarchy<'g> {
    let threshold = config.stop_threshold(balance.k);
    let cap: Weight = balance.lmax;
    let mut hierarchy = MultilevelHierarchy::single(graph);
    loop {
        let current = hierarchy.coarsest();
        let n = current.n();
        if n <= threshold {
            break;
        }
        let rated = rate_edges(current, config.rating);
        let matching = gpa_matching(current, &rated, cap, rng);
        let level = contract(current, &matching);
        if level.graph.n() * config.min_shrink_percent > n * 100 {
            break;
        }
        hierarchy.push(level);
    }
    hierarchy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Epsilon;
    use crate::rng::seeded;

    fn grid(w: usize, h: usize) -> Graph {
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let v = y * w + x;
                if x + 1 < w {
                    edges.push((v, v + 1, 1));
                }
                if y + 1 < h {
                    edges.push((v, v + w, 1));
                }
            }
        }
        Graph::from_edges(w * h, &edges, None).unwrap()
    }

    #[test]
    fn small_graph_is_not_coarsened() {
        let g = grid(10, 10);
        let b = BalanceSpec::new(Epsilon::new(3, 100), 4, g.total_node_weight()).unwrap();
        let h = coarsen(&g, &b, &CoarseningConfig::default(), &mut seeded(1));
        assert_eq!(h.depth(), 1);
        let a = vec![0; 100];
        assert_eq!(h.project_assignment(&a, 0, 0).unwrap(), a);
    }

    #[test]
    fn grid_coarsens_below_threshold_and_conserves_weight() {
        let g = grid(64, 64);
        let b = BalanceSpec::new(Epsilon::new(3, 100), 64, g.total_node_weight()).unwrap();
        let cfg = CoarseningConfig {
            min_nodes: 1000,
            ..CoarseningConfig::default()
        };
        let h = coarsen(&g, &b, &cfg, &mut seeded(5));
        assert!(h.depth() > 1);
        assert!(h.coarsest().n() <= cfg.stop_threshold(64));
        for level in 0..h.depth() {
            let gl = h.graph(level);
            assert_eq!(gl.total_node_weight(), 4096);
            assert!(gl.max_node_weight() <= b.lmax);
        }
        let bound = (4096f64.ln() / 1.05f64.ln()).ceil() as usize;
        assert!(h.depth() - 1 <= bound);
    }

    #[test]
    fn projection_errors_on_bad_levels() {
        let g = grid(4, 4);
        let h = MultilevelHierarchy::single(&g);
        assert!(h.project_assignment(&[0; 16], 1, 0).is_err());
        assert!(h.project_assignment(&[0; 3], 0, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let g = grid(40, 40);
        let b = BalanceSpec::new(Epsilon::new(3, 100), 8, g.total_node_weight()).unwrap();
        let cfg = CoarseningConfig {
            min_nodes: 100,
            ..CoarseningConfig::default()
        };
        let h1 = coarsen(&g, &b, &cfg, &mut seeded(9));
        let h2 = coarsen(&g, &b, &cfg, &mut seeded(9));
        assert_eq!(h1.depth(), h2.depth());
        for l in 0..h1.depth() {
            assert_eq!(h1.graph(l), h2.graph(l));
        }
    }
}
