//! Synthetic instances: grids, random geometric graphs, and graphs with a
//! planted hierarchy-aligned community structure.

use std::collections::BTreeMap;

use rand::Rng as _;

use crate::model::{Graph, NodeId, Weight};
use crate::rng::seeded;
use crate::topology::{HierarchySpec, PeId};

/// `w x h` lattice with 4-neighborhoods, node `y * w + x`.
pub fn grid2d(w: usize, h: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * w * h);
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
    Graph::from_edges(w * h, &edges, None).expect("lattice edges are valid")
}

/// Connection radius `0.55 * sqrt(ln n / n)` of the random geometric graphs.
pub fn rgg_radius(n: usize) -> f64 {
    let n = n.max(2) as f64;
    0.55 * (n.ln() / n).sqrt()
}

/// `n` uniform points in the unit square, joined when closer than
/// [`rgg_radius`].
pub fn random_geometric(n: usize, seed: u64) -> Graph {
    let mut rng = seeded(seed);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let r = rgg_radius(n);
    let cells = ((1.0 / r).floor() as usize).max(1);
    let cell_of = |c: f64| ((c * cells as f64) as usize).min(cells - 1);
    let mut grid: Vec<Vec<NodeId>> = vec![Vec::new(); cells * cells];
    for (v, &(x, y)) in points.iter().enumerate() {
        grid[cell_of(y) * cells + cell_of(x)].push(v);
    }
    let mut edges = Vec::new();
    for (v, &(x, y)) in points.iter().enumerate() {
        let (cx, cy) = (cell_of(x), cell_of(y));
        for ny in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
            for nx in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
                for &u in &grid[ny * cells + nx] {
                    if u > v {
                        let (ux, uy) = points[u];
                        if (ux - x).powi(2) + (uy - y).powi(2) < r * r {
                            edges.push((v, u, 1));
                        }
                    }
                }
            }
        }
    }
    Graph::from_edges(n, &edges, None).expect("geometric edges are valid")
}

/// Graph whose nodes are planted on the PEs of `spec` (`nodes_per_pe`
/// consecutive nodes each). Every node draws `degree` partners: within its
/// own PE with probability 1/2, otherwise within its level-1 module with
/// probability 1/2 of the rest, and so on up the hierarchy. Returns the
/// graph and the planted assignment.
pub fn random_hierarchy_test(
    spec: &HierarchySpec,
    nodes_per_pe: usize,
    degree: usize,
    seed: u64,
) -> (Graph, Vec<PeId>) {
    let mut rng = seeded(seed);
    let k = spec.k();
    let n = k * nodes_per_pe;
    // Node-count span of a module at each level: PE, level-1 module, ...
    let mut spans = vec![nodes_per_pe];
    for &a in spec.arities() {
        spans.push(spans.last().unwrap() * a);
    }
    let mut edges: BTreeMap<(NodeId, NodeId), Weight> = BTreeMap::new();
    for v in 0..n {
        for _ in 0..degree {
            let mut level = 0;
            while level + 1 < spans.len() && rng.gen_bool(0.5) {
                level += 1;
            }
            let span = spans[level];
            if span < 2 {
                continue;
            }
            let start = v / span * span;
            let u = start + rng.gen_range(0..span);
            if u != v {
                *edges.entry((v.min(u), v.max(u))).or_insert(0) += 1;
            }
        }
    }
    let list: Vec<_> = edges.into_iter().map(|((u, v), w)| (u, v, w)).collect();
    let graph = Graph::from_edges(n, &list, None).expect("planted edges are valid");
    let planted = (0..n).map(|v| v / nodes_per_pe.max(1)).collect();
    (graph, planted)
}
