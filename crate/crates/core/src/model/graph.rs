//! Undirected weighted communication graph in compressed adjacency form.

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type Weight = i64;

/// Symmetric communication graph. Each undirected edge `{u, v}` is stored as
/// the two arcs `(u, v)` and `(v, u)` carrying the same weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    xadj: Vec<usize>,
    adjncy: Vec<NodeId>,
    adjwgt: Vec<Weight>,
    vwgt: Vec<Weight>,
}

impl Graph {
    /// Builds a graph from CSR arrays, validating symmetry, the absence of
    /// self-loops and parallel edges, and weight signs.
    pub fn from_csr(
        xadj: Vec<usize>,
        adjncy: Vec<NodeId>,
        adjwgt: Vec<Weight>,
        vwgt: Vec<Weight>,
    ) -> Result<Self> {
        let g = Self::from_csr_unchecked(xadj, adjncy, adjwgt, vwgt)?;
        g.validate()?;
        Ok(g)
    }

    /// Shape checks only. Used by contraction, which produces symmetric
    /// output by construction.
    pub(crate) fn from_csr_unchecked(
        xadj: Vec<usize>,
        adjncy: Vec<NodeId>,
        adjwgt: Vec<Weight>,
        vwgt: Vec<Weight>,
    ) -> Result<Self> {
        if xadj.is_empty() || xadj[0] != 0 {
            return Err(Error::InvalidGraph("xadj must start with 0".into()));
        }
        let n = xadj.len() - 1;
        if vwgt.len() != n {
            return Err(Error::InvalidGraph(format!(
                "{} node weights for {} nodes",
                vwgt.len(),
                n
            )));
        }
        if xadj.windows(2).any(|w| w[0] > w[1]) || xadj[n] != adjncy.len() {
            return Err(Error::InvalidGraph("malformed xadj".into()));
        }
        if adjwgt.len() != adjncy.len() {
            return Err(Error::InvalidGraph(format!(
                "{} edge weights for {} arcs",
                adjwgt.len(),
                adjncy.len()
            )));
        }
        Ok(Self {
            xadj,
            adjncy,
            adjwgt,
            vwgt,
        })
    }

    /// Builds a graph from a list of undirected edges, each listed once.
    /// Node weights default to 1.
    pub fn from_edges(
        n: usize,
        edges: &[(NodeId, NodeId, Weight)],
        node_weights: Option<Vec<Weight>>,
    ) -> Result<Self> {
        let mut degree = vec![0usize; n];
        for &(u, v, _) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut xadj = Vec::with_capacity(n + 1);
        xadj.push(0);
        for d in &degree {
            xadj.push(xadj.last().unwrap() + d);
        }
        let mut fill = xadj[..n].to_vec();
        let mut adjncy = vec![0; xadj[n]];
        let mut adjwgt = vec![0; xadj[n]];
        for &(u, v, w) in edges {
            adjncy[fill[u]] = v;
            adjwgt[fill[u]] = w;
            fill[u] += 1;
            adjncy[fill[v]] = u;
            adjwgt[fill[v]] = w;
            fill[v] += 1;
        }
        let vwgt = node_weights.unwrap_or_else(|| vec![1; n]);
        Self::from_csr(xadj, adjncy, adjwgt, vwgt)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if let Some(v) = self.vwgt.iter().position(|&w| w < 0) {
            return Err(Error::InvalidGraph(format!("node {v} has negative weight")));
        }
        let mut arcs = Vec::with_capacity(self.adjncy.len());
        for v in 0..n {
            for (u, w) in self.neighbors(v) {
                if u >= n {
                    return Err(Error::InvalidGraph(format!(
                        "node {v} lists neighbor {u} outside 0..{n}"
                    )));
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop on node {v}")));
                }
                if w <= 0 {
                    return Err(Error::InvalidGraph(format!(
                        "edge ({v}, {u}) has non-positive weight {w}"
                    )));
                }
                arcs.push((v, u, w));
            }
        }
        arcs.sort_unstable();
        if let Some(p) = arcs.windows(2).find(|p| p[0].0 == p[1].0 && p[0].1 == p[1].1) {
            return Err(Error::InvalidGraph(format!(
                "parallel edge ({}, {})",
                p[0].0, p[0].1
            )));
        }
        let mut reversed: Vec<_> = arcs.iter().map(|&(v, u, w)| (u, v, w)).collect();
        reversed.sort_unstable();
        if let Some((a, _)) = arcs.iter().zip(&reversed).find(|(a, b)| a != b) {
            return Err(Error::InvalidGraph(format!(
                "asymmetric adjacency at arc ({}, {}) with weight {}",
                a.0, a.1, a.2
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.vwgt.len()
    }

    /// Number of undirected edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.adjncy.len() / 2
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.adjncy.len()
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }

    #[inline]
    pub fn adjacent(&self, v: NodeId) -> &[NodeId] {
        &self.adjncy[self.xadj[v]..self.xadj[v + 1]]
    }

    #[inline]
    pub fn adjacent_weights(&self, v: NodeId) -> &[Weight] {
        &self.adjwgt[self.xadj[v]..self.xadj[v + 1]]
    }

    /// `(neighbor, edge weight)` pairs of `v`.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, Weight)> + '_ {
        self.adjacent(v)
            .iter()
            .copied()
            .zip(self.adjacent_weights(v).iter().copied())
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Weight)> + '_ {
        (0..self.n()).flat_map(move |v| {
            self.neighbors(v)
                .filter(move |&(u, _)| v < u)
                .map(move |(u, w)| (v, u, w))
        })
    }

    #[inline]
    pub fn node_weight(&self, v: NodeId) -> Weight {
        self.vwgt[v]
    }

    pub fn node_weights(&self) -> &[Weight] {
        &self.vwgt
    }

    pub fn total_node_weight(&self) -> Weight {
        self.vwgt.iter().sum()
    }

    pub fn max_node_weight(&self) -> Weight {
        self.vwgt.iter().copied().max().unwrap_or(0)
    }

    pub fn weighted_degree(&self, v: NodeId) -> Weight {
        self.adjacent_weights(v).iter().sum()
    }

    pub fn total_edge_weight(&self) -> Weight {
        self.adjwgt.iter().sum::<Weight>() / 2
    }

    pub fn xadj(&self) -> &[usize] {
        &self.xadj
    }

    /// Subgraph induced by `nodes`; local id `i` corresponds to `nodes[i]`.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let mut xadj = Vec::with_capacity(nodes.len() + 1);
        xadj.push(0);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        let mut vwgt = Vec::with_capacity(nodes.len());
        for &v in nodes {
            for (u, w) in self.neighbors(v) {
                if local[u] != usize::MAX {
                    adjncy.push(local[u]);
                    adjwgt.push(w);
                }
            }
            xadj.push(adjncy.len());
            vwgt.push(self.vwgt[v]);
        }
        Graph {
            xadj,
            adjncy,
            adjwgt,
            vwgt,
        }
    }
}
