//! Partial objective contributions, move gains, and the epoch-stamped delta
//! gain cache.

use crate::model::{Graph, Mapping, NodeId, Weight};
use crate::topology::{PeDistance, PeId};

/// `Psi_b(v)`: cost of the edges incident to `v` if `v` sat on PE `b`.
pub fn psi<D: PeDistance>(graph: &Graph, mapping: &Mapping, oracle: &D, v: NodeId, b: PeId) -> Weight {
    graph
        .neighbors(v)
        .map(|(u, w)| w * oracle.distance(b, mapping.pe(u)))
        .sum()
}

/// `g_b(v) = Psi_{pi(v)}(v) - Psi_b(v)`.
pub fn gain<D: PeDistance>(graph: &Graph, mapping: &Mapping, oracle: &D, v: NodeId, b: PeId) -> Weight {
    psi(graph, mapping, oracle, v, mapping.pe(v)) - psi(graph, mapping, oracle, v, b)
}

/// One cached gain: target block, `g_b(v)`, and the edge weight from `v`
/// into that block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GainEntry {
    pub block: PeId,
    pub gain: Weight,
    pub connection: Weight,
}

/// Gains of `v` for every block in `R(v)`: its own block and the blocks of
/// its neighbors, sorted by block id. Returns the number of distance
/// evaluations performed.
pub fn compute_gains<D: PeDistance>(
    graph: &Graph,
    assignment: &[PeId],
    oracle: &D,
    v: NodeId,
    out: &mut Vec<GainEntry>,
) -> u64 {
    out.clear();
    let own = assignment[v];
    out.push(GainEntry {
        block: own,
        gain: 0,
        connection: 0,
    });
    for (u, w) in graph.neighbors(v) {
        let b = assignment[u];
        match out.iter_mut().find(|e| e.block == b) {
            Some(e) => e.connection += w,
            None => out.push(GainEntry {
                block: b,
                gain: 0,
                connection: w,
            }),
        }
    }
    out.sort_unstable_by_key(|e| e.block);
    let r = out.len();
    let psi_of = |b: PeId, out: &[GainEntry]| -> Weight {
        out.iter().map(|e| e.connection * oracle.distance(b, e.block)).sum()
    };
    let own_psi = psi_of(own, out);
    for i in 0..r {
        let b = out[i].block;
        out[i].gain = if b == own { 0 } else { own_psi - psi_of(b, out) };
    }
    (r * r) as u64
}

/// Per-node gain vectors that stay exact under moves via delta updates.
///
/// A node's entry is active when its stamp equals the current epoch;
/// bumping the epoch invalidates everything at once.
#[derive(Clone, Debug)]
pub struct GainCache {
    entries: Vec<Vec<GainEntry>>,
    stamp: Vec<u32>,
    epoch: u32,
    evaluations: u64,
}

impl GainCache {
    pub fn new(n: usize) -> Self {
        Self {
            entries: vec![Vec::new(); n],
            stamp: vec![0; n],
            epoch: 1,
            evaluations: 0,
        }
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    /// Invalidates all entries.
    pub fn bump_epoch(&mut self) {
        self.epoch += 1;
    }

    /// Adapts the cache to a graph of `n` nodes and invalidates it.
    pub fn reset(&mut self, n: usize) {
        self.entries.resize_with(n, Vec::new);
        self.stamp.resize(n, 0);
        self.bump_epoch();
    }

    #[inline]
    pub fn is_active(&self, v: NodeId) -> bool {
        self.stamp[v] == self.epoch
    }

    /// Distance evaluations spent on from-scratch gain computations.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// The entries of `v` if active.
    pub fn peek(&self, v: NodeId) -> Option<&[GainEntry]> {
        self.is_active(v).then(|| self.entries[v].as_slice())
    }

    /// The entries of `v`, computed from scratch first if stale.
    pub fn gains<D: PeDistance>(&mut self, graph: &Graph, mapping: &Mapping, oracle: &D, v: NodeId) -> &[GainEntry] {
        if !self.is_active(v) {
            self.evaluations += compute_gains(graph, mapping.assignment(), oracle, v, &mut self.entries[v]);
            self.stamp[v] = self.epoch;
        }
        &self.entries[v]
    }

    /// Moves `v` to `to` and updates the entries of `v` and its active
    /// neighbors by the contribution of each changed edge only.
    pub fn apply_move<D: PeDistance>(
        &mut self,
        graph: &Graph,
        mapping: &mut Mapping,
        oracle: &D,
        v: NodeId,
        to: PeId,
    ) -> Weight {
        let from = mapping.pe(v);
        debug_assert_ne!(from, to);
        let gain_v = self
            .gains(graph, mapping, oracle, v)
            .iter()
            .find(|e| e.block == to)
            .map(|e| e.gain);
        let gain_v = match gain_v {
            Some(g) => g,
            None => {
                // Target outside R(v): evaluate it and add it to the vector.
                let g = gain(graph, mapping, oracle, v, to);
                let entries = &mut self.entries[v];
                let pos = entries.partition_point(|e| e.block < to);
                entries.insert(
                    pos,
                    GainEntry {
                        block: to,
                        gain: g,
                        connection: 0,
                    },
                );
                g
            }
        };
        mapping.apply_move(graph, v, to, gain_v);

        let entries = &mut self.entries[v];
        for e in entries.iter_mut() {
            e.gain -= gain_v;
        }
        entries.retain(|e| e.block != from || e.connection > 0);

        for (u, w) in graph.neighbors(v) {
            if !self.is_active(u) {
                continue;
            }
            let own = mapping.pe(u);
            let own_delta = w * (oracle.distance(own, to) - oracle.distance(own, from));
            let entries = &mut self.entries[u];
            let mut has_to = false;
            for e in entries.iter_mut() {
                if e.block == own {
                    // Stays exactly zero.
                } else {
                    e.gain += own_delta - w * (oracle.distance(e.block, to) - oracle.distance(e.block, from));
                }
                if e.block == from {
                    e.connection -= w;
                }
                if e.block == to {
                    e.connection += w;
                    has_to = true;
                }
            }
            if !has_to {
                let psi_own: Weight = entries
                    .iter()
                    .map(|e| e.connection * oracle.distance(own, e.block))
                    .sum::<Weight>()
                    + w * oracle.distance(own, to);
                let mut psi_to: Weight = entries.iter().map(|e| e.connection * oracle.distance(to, e.block)).sum();
                psi_to += w * oracle.distance(to, to);
                self.evaluations += entries.len() as u64 + 1;
                let pos = entries.partition_point(|e| e.block < to);
                entries.insert(
                    pos,
                    GainEntry {
                        block: to,
                        gain: psi_own - psi_to,
                        connection: w,
                    },
                );
            }
            entries.retain(|e| e.block == own || e.connection > 0);
        }
        gain_v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::topology::{build_oracle, HierarchySpec, OracleVariant};
    use rand::Rng as _;

    fn random_instance(n: usize, m: usize, k: usize, seed: u64) -> (Graph, Vec<PeId>) {
        let mut rng = seeded(seed);
        let mut edges = std::collections::BTreeMap::new();
        while edges.len() < m {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.insert((u.min(v), u.max(v)), rng.gen_range(1..5));
            }
        }
        let e: Vec<_> = edges.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let g = Graph::from_edges(n, &e, None).unwrap();
        let a = (0..n).map(|_| rng.gen_range(0..k)).collect();
        (g, a)
    }

    #[test]
    fn gain_matches_objective_difference() {
        let spec = HierarchySpec::parse("2:3:2", "1:5:20").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Division).unwrap();
        let (g, a) = random_instance(40, 120, 12, 4);
        let mut rng = seeded(7);
        let mut m = Mapping::new(&g, a, &oracle).unwrap();
        for _ in 0..200 {
            let v = rng.gen_range(0..40);
            let b = rng.gen_range(0..12);
            let expected = gain(&g, &m, &oracle, v, b);
            let before = m.objective();
            assert_eq!(m.move_node(&g, &oracle, v, b), expected);
            assert_eq!(before - m.objective(), 2 * expected);
            m.verify(&g, &oracle).unwrap();
        }
    }

    #[test]
    fn cache_stays_coherent() {
        let spec = HierarchySpec::parse("4:4", "1:10").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Binary).unwrap();
        let (g, a) = random_instance(60, 200, 16, 9);
        let mut m = Mapping::new(&g, a, &oracle).unwrap();
        let mut cache = GainCache::new(60);
        let mut rng = seeded(1);
        let mut scratch = Vec::new();
        for step in 0..500 {
            let v = rng.gen_range(0..60);
            let _ = cache.gains(&g, &m, &oracle, v);
            let to = rng.gen_range(0..16);
            if to != m.pe(v) {
                cache.apply_move(&g, &mut m, &oracle, v, to);
            }
            if step % 97 == 0 {
                cache.bump_epoch();
            }
            for u in 0..60 {
                if let Some(entries) = cache.peek(u) {
                    compute_gains(&g, m.assignment(), &oracle, u, &mut scratch);
                    assert_eq!(entries, scratch.as_slice(), "node {u} at step {step}");
                }
            }
        }
        m.verify(&g, &oracle).unwrap();
    }

    #[test]
    fn isolated_node_has_zero_psi() {
        let spec = HierarchySpec::parse("2", "3").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Matrix).unwrap();
        let g = Graph::from_edges(2, &[], None).unwrap();
        let m = Mapping::new(&g, vec![0, 1], &oracle).unwrap();
        assert_eq!(psi(&g, &m, &oracle, 0, 1), 0);
        assert_eq!(gain(&g, &m, &oracle, 0, 1), 0);
    }

    #[test]
    fn evaluations_are_quadratic_in_neighbor_blocks() {
        let spec = HierarchySpec::parse("4", "1").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Matrix).unwrap();
        let g = Graph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)], None).unwrap();
        let m = Mapping::new(&g, vec![0, 1, 2, 2], &oracle).unwrap();
        let mut cache = GainCache::new(4);
        cache.gains(&g, &m, &oracle, 0);
        // R(v) = {0, 1, 2}; at most |I(v)|^2 + ... = 9 evaluations.
        assert_eq!(cache.evaluations(), 9);
        cache.gains(&g, &m, &oracle, 0);
        assert_eq!(cache.evaluations(), 9);
    }
}
