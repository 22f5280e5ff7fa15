use super::graph::{Graph, NodeId, Weight};
use crate::topology::PeId;

/// Graph of blocks: an edge `(i, j)` carries the total weight of all graph
/// edges running between blocks `i` and `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGraph {
    /// Sorted neighbor lists per block.
    adjacency: Vec<Vec<(PeId, Weight)>>,
}

impl QuotientGraph {
    #[inline]
    pub fn k(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, block: PeId) -> &[(PeId, Weight)] {
        &self.adjacency[block]
    }

    pub fn edge_weight(&self, i: PeId, j: PeId) -> Weight {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(b, _)| b)
            .map_or(0, |pos| self.adjacency[i][pos].1)
    }

    /// Each quotient edge once, as `(i, j, weight)` with `i < j`, in
    /// lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (PeId, PeId, Weight)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, nbrs)| {
            nbrs.iter()
                .filter(move |&&(j, _)| i < j)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// The quotient as a communication graph with unit block weights.
    pub fn to_graph(&self) -> Graph {
        let edges: Vec<_> = self.edges().collect();
        Graph::from_edges(self.k(), &edges, None).expect("quotient graphs are simple and symmetric")
    }

    /// Quotient objective `sum_{i,j} w(E_ij) * D(perm[i], perm[j])` over
    /// ordered block pairs, for a block-to-PE assignment `perm`.
    pub fn mapped_cost<D: crate::topology::PeDistance>(&self, perm: &[PeId], oracle: &D) -> Weight {
        self.edges()
            .map(|(i, j, w)| 2 * w * oracle.distance(perm[i], perm[j]))
            .sum()
    }
}

pub fn build_quotient_graph(graph: &Graph, assignment: &[PeId], k: usize) -> QuotientGraph {
    let mut cut: Vec<(PeId, PeId, Weight)> = Vec::new();
    for v in 0..graph.n() {
        let bv = assignment[v];
        for (u, w) in graph.neighbors(v) {
            let bu = assignment[u];
            if bu != bv {
                cut.push((bv, bu, w));
            }
        }
    }
    cut.sort_unstable_by_key(|&(a, b, _)| (a, b));
    let mut adjacency: Vec<Vec<(PeId, Weight)>> = vec![Vec::new(); k];
    for (a, b, w) in cut {
        let list = &mut adjacency[a];
        match list.last_mut() {
            Some(last) if last.0 == b => last.1 += w,
            _ => list.push((b, w)),
        }
    }
    QuotientGraph { adjacency }
}

/// Nodes with at least one neighbor in a different block, in increasing order.
pub fn boundary_nodes(graph: &Graph, assignment: &[PeId]) -> Vec<NodeId> {
    (0..graph.n())
        .filter(|&v| is_boundary(graph, assignment, v))
        .collect()
}

#[inline]
pub fn is_boundary(graph: &Graph, assignment: &[PeId], v: NodeId) -> bool {
    let b = assignment[v];
    graph.adjacent(v).iter().any(|&u| assignment[u] != b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_block_has_no_edges() {
        let g = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1)], None).unwrap();
        let q = build_quotient_graph(&g, &[0, 0, 0], 4);
        assert_eq!(q.k(), 4);
        assert_eq!(q.edge_count(), 0);
        assert!(boundary_nodes(&g, &[0, 0, 0]).is_empty());
    }

    #[test]
    fn single_cut_edge() {
        let g = Graph::from_edges(2, &[(0, 1, 5)], None).unwrap();
        let q = build_quotient_graph(&g, &[0, 1], 2);
        assert_eq!(q.edges().collect::<Vec<_>>(), vec![(0, 1, 5)]);
        assert_eq!(q.edge_weight(1, 0), 5);
        assert_eq!(boundary_nodes(&g, &[0, 1]), vec![0, 1]);
    }

    #[test]
    fn parallel_cut_edges_aggregate() {
        let g = Graph::from_edges(4, &[(0, 2, 1), (1, 3, 2), (0, 1, 9), (2, 3, 4)], None).unwrap();
        let q = build_quotient_graph(&g, &[0, 0, 1, 1], 2);
        assert_eq!(q.edge_weight(0, 1), 3);
        assert_eq!(q.to_graph().m(), 1);
    }
}
