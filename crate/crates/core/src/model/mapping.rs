use super::graph::{Graph, NodeId, Weight};
use crate::error::{Error, Result};
use crate::topology::{PeDistance, PeId};

/// `J = sum over stored arcs (v, u) of w(v, u) * D(pi(v), pi(u))`. Every
/// undirected edge is counted in both directions.
pub fn objective_j<D: PeDistance>(graph: &Graph, assignment: &[PeId], oracle: &D) -> Result<Weight> {
    check_assignment(graph, assignment, oracle.pe_count())?;
    Ok(objective_unchecked(graph, assignment, oracle))
}

fn objective_unchecked<D: PeDistance>(
    graph: &Graph,
    assignment: &[PeId],
    oracle: &D,
) -> Weight {
    (0..graph.n())
        .map(|v| {
            let pv = assignment[v];
            graph
                .neighbors(v)
                .map(|(u, w)| w * oracle.distance(pv, assignment[u]))
                .sum::<Weight>()
        })
        .sum()
}

pub fn block_weights(graph: &Graph, assignment: &[PeId], k: usize) -> Vec<Weight> {
    let mut weights = vec![0; k];
    for (v, &b) in assignment.iter().enumerate() {
        weights[b] += graph.node_weight(v);
    }
    weights
}

fn check_assignment(graph: &Graph, assignment: &[PeId], k: usize) -> Result<()> {
    if assignment.len() != graph.n() {
        return Err(Error::InvalidMapping(format!(
            "assignment covers {} nodes, graph has {}",
            assignment.len(),
            graph.n()
        )));
    }
    if let Some((v, &b)) = assignment.iter().enumerate().find(|(_, &b)| b >= k) {
        return Err(Error::InvalidMapping(format!(
            "node {v} is mapped to PE {b}, but k = {k}"
        )));
    }
    Ok(())
}

/// Assignment of every node to a PE together with cached block weights and
/// the cached objective value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mapping {
    assignment: Vec<PeId>,
    block_weights: Vec<Weight>,
    objective: Weight,
}

impl Mapping {
    pub fn new<D: PeDistance>(graph: &Graph, assignment: Vec<PeId>, oracle: &D) -> Result<Self> {
        let objective = objective_j(graph, &assignment, oracle)?;
        let block_weights = block_weights(graph, &assignment, oracle.pe_count());
        Ok(Self {
            assignment,
            block_weights,
            objective,
        })
    }

    /// Trusted constructor for projections, where the caches are known exactly.
    pub(crate) fn from_parts(
        assignment: Vec<PeId>,
        block_weights: Vec<Weight>,
        objective: Weight,
    ) -> Self {
        Self {
            assignment,
            block_weights,
            objective,
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.block_weights.len()
    }

    #[inline]
    pub fn pe(&self, v: NodeId) -> PeId {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[PeId] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<PeId> {
        self.assignment
    }

    pub fn block_weights(&self) -> &[Weight] {
        &self.block_weights
    }

    #[inline]
    pub fn block_weight(&self, b: PeId) -> Weight {
        self.block_weights[b]
    }

    pub fn max_block_weight(&self) -> Weight {
        self.block_weights.iter().copied().max().unwrap_or(0)
    }

    #[inline]
    pub fn objective(&self) -> Weight {
        self.objective
    }

    /// Moves `v` to PE `to` and returns the gain `g_to(v)`. `J` counts every
    /// edge in both directions, so it drops by twice the gain.
    pub fn move_node<D: PeDistance>(
        &mut self,
        graph: &Graph,
        oracle: &D,
        v: NodeId,
        to: PeId,
    ) -> Weight {
        let from = self.assignment[v];
        let gain = graph
            .neighbors(v)
            .map(|(u, w)| {
                let pu = self.assignment[u];
                w * (oracle.distance(from, pu) - oracle.distance(to, pu))
            })
            .sum::<Weight>();
        self.apply_move(graph, v, to, gain);
        gain
    }

    /// Moves `v` to `to` given its already known gain `g_to(v)`.
    #[inline]
    pub(crate) fn apply_move(&mut self, graph: &Graph, v: NodeId, to: PeId, gain: Weight) {
        let from = self.assignment[v];
        let c = graph.node_weight(v);
        self.block_weights[from] -= c;
        self.block_weights[to] += c;
        self.assignment[v] = to;
        self.objective -= 2 * gain;
    }

    /// Recomputes both caches from scratch and compares them with the stored
    /// values.
    pub fn verify<D: PeDistance>(&self, graph: &Graph, oracle: &D) -> Result<()> {
        let j = objective_j(graph, &self.assignment, oracle)?;
        if j != self.objective {
            return Err(Error::InvalidMapping(format!(
                "cached objective {} differs from recomputed {}",
                self.objective, j
            )));
        }
        if block_weights(graph, &self.assignment, self.k()) != self.block_weights {
            return Err(Error::InvalidMapping("cached block weights are stale".into()));
        }
        Ok(())
    }
}
