//! Global Paths Algorithm for approximate maximum-rating matchings.
//!
//! Edges are scanned by decreasing rating and collected into a set of
//! node-disjoint paths and even cycles. Each path or cycle is then matched
//! optimally by dynamic programming, and a final greedy sweep makes the
//! result maximal.

use rand::seq::SliceRandom;

use super::rating::{rating_to_f64, RatedEdge};
use crate::model::{Graph, NodeId, Weight};
use crate::rng::Rng;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    partner: Vec<usize>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Self {
            partner: vec![NONE; n],
        }
    }

    /// Builds a matching from explicit pairs; panics on overlapping pairs.
    pub fn from_pairs(n: usize, pairs: &[(NodeId, NodeId)]) -> Self {
        let mut m = Self::empty(n);
        for &(u, v) in pairs {
            assert!(u != v && m.partner[u] == NONE && m.partner[v] == NONE);
            m.partner[u] = v;
            m.partner[v] = u;
        }
        m
    }

    #[inline]
    pub fn partner(&self, v: NodeId) -> Option<NodeId> {
        let p = self.partner[v];
        (p != NONE).then_some(p)
    }

    #[inline]
    pub fn is_matched(&self, v: NodeId) -> bool {
        self.partner[v] != NONE
    }

    fn join(&mut self, u: NodeId, v: NodeId) {
        self.partner[u] = v;
        self.partner[v] = u;
    }

    /// Matched pairs `(u, v)` with `u < v`.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(u, &p)| p != NONE && u < p)
            .map(|(u, &p)| (u, p))
    }

    pub fn len(&self) -> usize {
        self.pairs().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node_count(&self) -> usize {
        self.partner.len()
    }

    /// Every pair is a graph edge and no node is matched twice.
    pub fn is_valid(&self, graph: &Graph) -> bool {
        self.partner.len() == graph.n()
            && (0..graph.n()).all(|v| match self.partner(v) {
                None => true,
                Some(p) => p != v && self.partner[p] == v && graph.adjacent(v).contains(&p),
            })
    }

    /// No edge whose contraction respects `weight_cap` has two unmatched ends.
    pub fn is_maximal(&self, graph: &Graph, weight_cap: Weight) -> bool {
        graph.edges().all(|(u, v, _)| {
            self.is_matched(u)
                || self.is_matched(v)
                || graph.node_weight(u) + graph.node_weight(v) > weight_cap
        })
    }
}

/// Assembly of paths and cycles with node degree at most two.
struct PathSet {
    /// Path edges per node, as indices into the candidate edge list.
    links: Vec<[usize; 2]>,
    /// For a path endpoint, the opposite endpoint (itself when isolated).
    other_end: Vec<NodeId>,
    /// For a path endpoint, the number of edges on its path.
    length: Vec<usize>,
}

impl PathSet {
    fn new(n: usize) -> Self {
        Self {
            links: vec![[NONE; 2]; n],
            other_end: (0..n).collect(),
            length: vec![0; n],
        }
    }

    #[inline]
    fn degree(&self, v: NodeId) -> usize {
        self.links[v].iter().filter(|&&e| e != NONE).count()
    }

    fn attach(&mut self, v: NodeId, edge: usize) {
        let slot = self.links[v].iter().position(|&e| e == NONE).unwrap();
        self.links[v][slot] = edge;
    }

    /// Tries to add edge `idx = {u, v}`; refuses degree-3 nodes and odd cycles.
    fn try_add(&mut self, idx: usize, u: NodeId, v: NodeId) -> bool {
        if self.degree(u) >= 2 || self.degree(v) >= 2 {
            return false;
        }
        if self.other_end[u] == v {
            // Closing a path of `length` edges yields a cycle of `length + 1`.
            if self.length[u] % 2 == 0 {
                return false;
            }
            self.attach(u, idx);
            self.attach(v, idx);
            return true;
        }
        let a = self.other_end[u];
        let b = self.other_end[v];
        let len = self.length[u] + self.length[v] + 1;
        self.attach(u, idx);
        self.attach(v, idx);
        self.other_end[a] = b;
        self.other_end[b] = a;
        self.length[a] = len;
        self.length[b] = len;
        true
    }
}

/// Maximum-weight selection of pairwise non-adjacent positions on a path of
/// edge weights. Returns the chosen positions.
fn path_dp(weights: &[f64]) -> Vec<usize> {
    let len = weights.len();
    if len == 0 {
        return Vec::new();
    }
    let mut best = vec![0.0f64; len + 1];
    best[1] = weights[0];
    for i in 2..=len {
        best[i] = best[i - 1].max(best[i - 2] + weights[i - 1]);
    }
    let mut chosen = Vec::new();
    let mut i = len;
    while i >= 1 {
        let take = if i == 1 {
            weights[0] > 0.0
        } else {
            best[i - 2] + weights[i - 1] > best[i - 1]
        };
        if take {
            chosen.push(i - 1);
            i = i.saturating_sub(2);
        } else {
            i -= 1;
        }
    }
    chosen
}

fn sum_at(weights: &[f64], positions: &[usize]) -> f64 {
    positions.iter().map(|&p| weights[p]).sum()
}

/// Same as [`path_dp`] for a cycle, where the first and last positions are
/// also adjacent.
fn cycle_dp(weights: &[f64]) -> Vec<usize> {
    let len = weights.len();
    // Without position 0.
    let without: Vec<usize> = path_dp(&weights[1..]).into_iter().map(|p| p + 1).collect();
    // With position 0, excluding its neighbors 1 and len - 1.
    let mut with = vec![0];
    if len > 3 {
        with.extend(path_dp(&weights[2..len - 1]).into_iter().map(|p| p + 2));
    }
    if sum_at(weights, &with) > sum_at(weights, &without) {
        with
    } else {
        without
    }
}

/// Computes a matching with the Global Paths Algorithm. Edges whose
/// contraction would create a node heavier than `weight_cap` are never
/// matched. Rating ties are broken by a seeded shuffle before a stable sort.
pub fn gpa_matching(
    graph: &Graph,
    rated: &[RatedEdge],
    weight_cap: Weight,
    rng: &mut Rng,
) -> Matching {
    let n = graph.n();
    let mut candidates: Vec<&RatedEdge> = rated
        .iter()
        .filter(|e| graph.node_weight(e.u) + graph.node_weight(e.v) <= weight_cap)
        .collect();
    candidates.shuffle(rng);
    candidates.sort_by(|a, b| b.rating.cmp(&a.rating));

    let mut paths = PathSet::new(n);
    for (idx, e) in candidates.iter().enumerate() {
        paths.try_add(idx, e.u, e.v);
    }

    let mut matching = Matching::empty(n);
    let mut visited = vec![false; n];
    let take_sequence = |edges: &[usize], cyclic: bool, matching: &mut Matching| {
        let weights: Vec<f64> = edges
            .iter()
            .map(|&i| rating_to_f64(&candidates[i].rating))
            .collect();
        let chosen = if cyclic {
            cycle_dp(&weights)
        } else {
            path_dp(&weights)
        };
        for p in chosen {
            let e = candidates[edges[p]];
            matching.join(e.u, e.v);
        }
    };

    // Walks along path links starting at `start`, collecting edge indices.
    let walk = |start: NodeId, visited: &mut Vec<bool>| -> Vec<usize> {
        let mut seq = Vec::new();
        let mut prev_edge = NONE;
        let mut v = start;
        visited[v] = true;
        loop {
            let next = paths.links[v]
                .iter()
                .copied()
                .find(|&e| e != NONE && e != prev_edge);
            let Some(e) = next else { break };
            let c = candidates[e];
            let u = if c.u == v { c.v } else { c.u };
            seq.push(e);
            if visited[u] {
                break;
            }
            visited[u] = true;
            prev_edge = e;
            v = u;
        }
        seq
    };

    for v in 0..n {
        if !visited[v] && paths.degree(v) < 2 {
            let seq = walk(v, &mut visited);
            take_sequence(&seq, false, &mut matching);
        }
    }
    for v in 0..n {
        if !visited[v] {
            let seq = walk(v, &mut visited);
            take_sequence(&seq, true, &mut matching);
        }
    }

    for e in &candidates {
        if !matching.is_matched(e.u) && !matching.is_matched(e.v) {
            matching.join(e.u, e.v);
        }
    }
    matching
}

#[cfg(test)]
mod tests {
    use super::super::rating::{rate_edges, Rating, RatingDenominator};
    use super::*;
    use crate::rng::seeded;

    fn rated(edges: &[(NodeId, NodeId, u128)]) -> Vec<RatedEdge> {
        edges
            .iter()
            .map(|&(u, v, r)| RatedEdge {
                u,
                v,
                weight: 1,
                rating: Rating::from_integer(r),
            })
            .collect()
    }

    #[test]
    fn triangle_takes_best_edge() {
        let g = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], None).unwrap();
        let r = rated(&[(0, 1, 2), (1, 2, 3), (0, 2, 1)]);
        let m = gpa_matching(&g, &r, 10, &mut seeded(1));
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::from_edges(5, &[], None).unwrap();
        let m = gpa_matching(&g, &[], 10, &mut seeded(1));
        assert!(m.is_empty());
        assert!(m.is_valid(&g));
    }

    #[test]
    fn path_dp_prefers_outer_edges() {
        // Path a-b-c-d with ratings 2, 3, 2: greedy would take the middle edge.
        let g = Graph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)], None).unwrap();
        let r = rated(&[(0, 1, 2), (1, 2, 3), (2, 3, 2)]);
        let m = gpa_matching(&g, &r, 10, &mut seeded(3));
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn even_cycle_dp() {
        assert_eq!(cycle_dp(&[5.0, 1.0, 1.0, 1.0]).len(), 2);
        let mut c = cycle_dp(&[1.0, 5.0, 1.0, 5.0]);
        c.sort();
        assert_eq!(c, vec![1, 3]);
        assert_eq!(path_dp(&[1.0]), vec![0]);
        assert!(path_dp(&[]).is_empty());
    }

    #[test]
    fn respects_weight_cap() {
        let g = Graph::from_edges(3, &[(0, 1, 5), (1, 2, 1)], Some(vec![3, 3, 1])).unwrap();
        let r = rate_edges(&g, RatingDenominator::NodeWeight);
        let m = gpa_matching(&g, &r, 5, &mut seeded(0));
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(1, 2)]);
        assert!(m.is_maximal(&g, 5));
    }
}
