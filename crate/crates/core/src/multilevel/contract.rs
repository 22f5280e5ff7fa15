use super::matching::Matching;
use crate::model::{Graph, NodeId, Weight};

/// One coarsening step: the coarse graph and where each fine node went.
#[derive(Clone, Debug)]
pub struct CoarseLevel {
    pub graph: Graph,
    pub fine_to_coarse: Vec<NodeId>,
}

/// Contracts every matched pair into a single node. Node weights add up and
/// parallel edges merge by summing weights; the matched edge disappears.
/// Coarse ids follow the order in which fine nodes are first seen.
pub fn contract(graph: &Graph, matching: &Matching) -> CoarseLevel {
    let n = graph.n();
    let mut fine_to_coarse = vec![usize::MAX; n];
    let mut members: Vec<(NodeId, Option<NodeId>)> = Vec::new();
    for v in 0..n {
        if fine_to_coarse[v] != usize::MAX {
            continue;
        }
        let id = members.len();
        fine_to_coarse[v] = id;
        let partner = matching.partner(v);
        if let Some(p) = partner {
            fine_to_coarse[p] = id;
        }
        members.push((v, partner));
    }

    let cn = members.len();
    let mut xadj = Vec::with_capacity(cn + 1);
    xadj.push(0);
    let mut adjncy: Vec<NodeId> = Vec::with_capacity(graph.arc_count());
    let mut adjwgt: Vec<Weight> = Vec::with_capacity(graph.arc_count());
    let mut vwgt = Vec::with_capacity(cn);
    let mut slot = vec![usize::MAX; cn];
    for (c, &(a, b)) in members.iter().enumerate() {
        let start = adjncy.len();
        let mut weight = graph.node_weight(a);
        let mut absorb = |v: NodeId, adjncy: &mut Vec<NodeId>, adjwgt: &mut Vec<Weight>| {
            for (u, w) in graph.neighbors(v) {
                let cu = fine_to_coarse[u];
                if cu == c {
                    continue;
                }
                if slot[cu] == usize::MAX {
                    slot[cu] = adjncy.len();
                    adjncy.push(cu);
                    adjwgt.push(w);
                } else {
                    adjwgt[slot[cu]] += w;
                }
            }
        };
        absorb(a, &mut adjncy, &mut adjwgt);
        if let Some(b) = b {
            weight += graph.node_weight(b);
            absorb(b, &mut adjncy, &mut adjwgt);
        }
        for &cu in &adjncy[start..] {
            slot[cu] = usize::MAX;
        }
        xadj.push(adjncy.len());
        vwgt.push(weight);
    }
    let graph = Graph::from_csr_unchecked(xadj, adjncy, adjwgt, vwgt)
        .expect("contraction preserves CSR shape");
    CoarseLevel {
        graph,
        fine_to_coarse,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_collapses() {
        let g = Graph::from_edges(2, &[(0, 1, 3)], None).unwrap();
        let level = contract(&g, &Matching::from_pairs(2, &[(0, 1)]));
        assert_eq!(level.graph.n(), 1);
        assert_eq!(level.graph.m(), 0);
        assert_eq!(level.graph.node_weight(0), 2);
        assert_eq!(level.fine_to_coarse, vec![0, 0]);
    }

    #[test]
    fn path_keeps_outer_edge() {
        let g = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 2)], None).unwrap();
        let level = contract(&g, &Matching::from_pairs(3, &[(0, 1)]));
        assert_eq!(level.graph.n(), 2);
        assert_eq!(level.graph.edges().collect::<Vec<_>>(), vec![(0, 1, 2)]);
    }

    #[test]
    fn parallel_edges_merge() {
        // Square 0-1-2-3-0, contract {0,1} and {2,3}: edges 1-2 and 3-0 merge.
        let g = Graph::from_edges(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 5)], None).unwrap();
        let level = contract(&g, &Matching::from_pairs(4, &[(0, 1), (2, 3)]));
        assert_eq!(level.graph.edges().collect::<Vec<_>>(), vec![(0, 1, 7)]);
        Graph::from_csr(
            level.graph.xadj().to_vec(),
            (0..2).flat_map(|v| level.graph.adjacent(v).to_vec()).collect(),
            (0..2).flat_map(|v| level.graph.adjacent_weights(v).to_vec()).collect(),
            level.graph.node_weights().to_vec(),
        )
        .unwrap();
    }
}
