//! Multilevel greedy graph growing with 2-way FM refinement, and the
//! recursive schemes built on top of it (standard recursive bisection and
//! hierarchy-following multisection).

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::model::{Graph, NodeId, Weight};
use crate::multilevel::{contract, gpa_matching, rate_edges, CoarseLevel, RatingDenominator};
use crate::refinement::queue::BucketQueue;
use crate::rng::Rng;
use crate::topology::HierarchySpec;

const GROWING_TRIALS: usize = 4;
const FM_PASSES: usize = 4;
const FM_FRUITLESS_MOVES: usize = 100;
/// Graphs up to this size are bisected directly; larger ones are contracted
/// first and the bisection is refined while uncontracting.
const COARSE_BISECTION_NODES: usize = 160;
/// Contracted nodes stay below this fraction of the smaller side's capacity.
const COARSE_WEIGHT_DIVISOR: Weight = 16;

/// Edge weight crossing the two sides.
pub fn cut_weight(graph: &Graph, side: &[u8]) -> Weight {
    graph
        .edges()
        .filter(|&(u, v, _)| side[u] != side[v])
        .map(|(_, _, w)| w)
        .sum()
}

fn side_weights(graph: &Graph, side: &[u8]) -> [Weight; 2] {
    let mut c = [0; 2];
    for (v, &s) in side.iter().enumerate() {
        c[s as usize] += graph.node_weight(v);
    }
    c
}

#[inline]
fn overload(c: [Weight; 2], caps: [Weight; 2]) -> Weight {
    (c[0] - caps[0]).max(0) + (c[1] - caps[1]).max(0)
}

/// Cut reduction when `v` switches sides.
#[inline]
fn switch_gain(graph: &Graph, side: &[u8], v: NodeId) -> Weight {
    let s = side[v];
    graph
        .neighbors(v)
        .map(|(u, w)| if side[u] == s { -w } else { w })
        .sum()
}

/// Grows side 0 from random seeds by absorbing the frontier node with the
/// largest cut gain until it reaches `share`, never exceeding `cap`.
fn grow(graph: &Graph, share: Weight, cap: Weight, rng: &mut Rng) -> Vec<u8> {
    let n = graph.n();
    let mut side = vec![1u8; n];
    let mut rejected = vec![false; n];
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut next_seed = 0;
    let mut queue = BucketQueue::new(n);
    let mut weight = 0;
    while weight < share {
        let v = match queue.pop_max() {
            Some((v, _)) => v,
            None => {
                while next_seed < n && (side[order[next_seed]] == 0 || rejected[order[next_seed]]) {
                    next_seed += 1;
                }
                if next_seed == n {
                    break;
                }
                order[next_seed]
            }
        };
        let c = graph.node_weight(v);
        if weight + c > cap {
            rejected[v] = true;
            continue;
        }
        side[v] = 0;
        weight += c;
        for (u, w) in graph.neighbors(v) {
            if side[u] == 1 && !rejected[u] {
                let key = queue.key(u).unwrap_or_else(|| -graph.weighted_degree(u));
                queue.push(u, key + 2 * w);
            }
        }
    }
    side
}

/// Two-queue FM on the edge cut. Moves may exceed `caps` by `slack`; each pass
/// is rolled back to its best prefix, ranked by overload then cut.
fn fm_bisection(graph: &Graph, side: &mut [u8], caps: [Weight; 2], slack: Weight, rng: &mut Rng) {
    let n = graph.n();
    let mut queues = [BucketQueue::new(n), BucketQueue::new(n)];
    let mut moved = vec![false; n];
    let mut c = side_weights(graph, side);
    let mut cut = cut_weight(graph, side);
    for _ in 0..FM_PASSES {
        let mut boundary: Vec<NodeId> = (0..n)
            .filter(|&v| graph.adjacent(v).iter().any(|&u| side[u] != side[v]))
            .collect();
        boundary.shuffle(rng);
        for &v in &boundary {
            queues[side[v] as usize].push(v, switch_gain(graph, side, v));
        }
        let start = (overload(c, caps), cut);
        let mut best = start;
        let mut log: Vec<NodeId> = Vec::new();
        let mut best_len = 0;
        let mut fruitless = 0;
        loop {
            let mut tops: [Option<(NodeId, Weight)>; 2] = [None, None];
            for s in 0..2 {
                while let Some((v, g)) = queues[s].peek_max() {
                    if c[1 - s] + graph.node_weight(v) <= caps[1 - s] + slack {
                        tops[s] = Some((v, g));
                        break;
                    }
                    queues[s].remove(v);
                }
            }
            let from = match tops {
                [None, None] => break,
                [Some(_), None] => 0,
                [None, Some(_)] => 1,
                [Some((_, g0)), Some((_, g1))] => {
                    let over = [c[0] - caps[0], c[1] - caps[1]];
                    if over[0] > 0 || over[1] > 0 {
                        usize::from(over[1] > over[0])
                    } else if g0 != g1 {
                        usize::from(g1 > g0)
                    } else if c[0] != c[1] {
                        usize::from(c[1] > c[0])
                    } else {
                        usize::from(rng.gen_bool(0.5))
                    }
                }
            };
            let (v, g) = tops[from].unwrap();
            queues[from].remove(v);
            side[v] = 1 - from as u8;
            let cv = graph.node_weight(v);
            c[from] -= cv;
            c[1 - from] += cv;
            cut -= g;
            moved[v] = true;
            log.push(v);
            for &u in graph.adjacent(v) {
                if !moved[u] {
                    let su = side[u] as usize;
                    queues[su].push(u, switch_gain(graph, side, u));
                }
            }
            let score = (overload(c, caps), cut);
            if score < best {
                best = score;
                best_len = log.len();
                fruitless = 0;
            } else {
                fruitless += 1;
                if fruitless > FM_FRUITLESS_MOVES {
                    break;
                }
            }
        }
        for &v in log[best_len..].iter().rev() {
            let from = side[v] as usize;
            side[v] = 1 - from as u8;
            let cv = graph.node_weight(v);
            c[from] -= cv;
            c[1 - from] += cv;
        }
        for &v in &log {
            moved[v] = false;
        }
        queues[0].clear();
        queues[1].clear();
        cut = best.1;
        if best >= start {
            break;
        }
    }
}

/// Moves the best-gain nodes off an overloaded side while the other side
/// has room.
fn repair_bisection(graph: &Graph, side: &mut [u8], caps: [Weight; 2]) {
    let mut c = side_weights(graph, side);
    for s in 0..2 {
        if c[s] <= caps[s] {
            continue;
        }
        let mut candidates: Vec<(Weight, NodeId)> = (0..graph.n())
            .filter(|&v| side[v] as usize == s)
            .map(|v| (switch_gain(graph, side, v), v))
            .collect();
        candidates.sort_unstable_by(|a, b| b.cmp(a));
        for (_, v) in candidates {
            if c[s] <= caps[s] {
                break;
            }
            let cv = graph.node_weight(v);
            if cv > 0 && c[1 - s] + cv <= caps[1 - s] {
                side[v] = 1 - s as u8;
                c[s] -= cv;
                c[1 - s] += cv;
            }
        }
    }
}

/// Greedy growing trials on `graph`, each polished by FM; keeps the best by
/// (overload, cut).
fn grow_and_refine(graph: &Graph, caps: [Weight; 2], share: Weight, rng: &mut Rng) -> Vec<u8> {
    let slack = graph.max_node_weight().max(1);
    let mut best: Option<(Weight, Weight, Vec<u8>)> = None;
    for _ in 0..GROWING_TRIALS {
        let mut side = grow(graph, share, caps[0], rng);
        fm_bisection(graph, &mut side, caps, slack, rng);
        repair_bisection(graph, &mut side, caps);
        let over = overload(side_weights(graph, &side), caps);
        let cut = cut_weight(graph, &side);
        if best.as_ref().is_none_or(|(o, k, _)| (over, cut) < (*o, *k)) {
            best = Some((over, cut, side));
        }
    }
    best.expect("at least one trial").2
}

/// Best-effort bisection: side 0 is grown towards `share`; both sides should
/// stay within `caps`. Large graphs are contracted by matchings first, grown
/// on the small graph, and refined with FM on every level on the way back.
/// Returns the sides and the remaining overload.
pub(crate) fn bisect(
    graph: &Graph,
    caps: [Weight; 2],
    share: Weight,
    rng: &mut Rng,
) -> (Vec<u8>, Weight) {
    let weight_cap = (caps[0].min(caps[1]) / COARSE_WEIGHT_DIVISOR).max(graph.max_node_weight());
    let mut levels: Vec<CoarseLevel> = Vec::new();
    loop {
        let current = levels.last().map_or(graph, |l| &l.graph);
        let n = current.n();
        if n <= COARSE_BISECTION_NODES {
            break;
        }
        let rated = rate_edges(current, RatingDenominator::NodeWeight);
        let matching = gpa_matching(current, &rated, weight_cap, rng);
        let level = contract(current, &matching);
        if level.graph.n() * 20 > n * 19 {
            break;
        }
        levels.push(level);
    }

    let coarsest = levels.last().map_or(graph, |l| &l.graph);
    let mut side = grow_and_refine(coarsest, caps, share, rng);
    for i in (0..levels.len()).rev() {
        let fine = if i == 0 { graph } else { &levels[i - 1].graph };
        side = levels[i].fine_to_coarse.iter().map(|&c| side[c]).collect();
        fm_bisection(fine, &mut side, caps, fine.max_node_weight().max(1), rng);
    }
    repair_bisection(graph, &mut side, caps);
    let over = overload(side_weights(graph, &side), caps);
    (side, over)
}

/// Splits the graph into two sides with `c(V_1) <= targets.0` and
/// `c(V_2) <= targets.1` (side 0 and side 1 in the result).
pub fn greedy_graph_growing_bisection(
    graph: &Graph,
    targets: (Weight, Weight),
    rng: &mut Rng,
) -> Result<Vec<u8>> {
    let caps = [targets.0, targets.1];
    let total = graph.total_node_weight();
    if caps[0] < 0 || caps[1] < 0 || caps[0] + caps[1] < total {
        return Err(Error::Infeasible(format!(
            "targets {} + {} cannot hold total weight {total}",
            caps[0], caps[1]
        )));
    }
    if graph.max_node_weight() > caps[0].max(caps[1]) {
        return Err(Error::Infeasible(format!(
            "a node of weight {} exceeds both targets",
            graph.max_node_weight()
        )));
    }
    let denom = (caps[0] + caps[1]).max(1) as i128;
    let share = (total as i128 * caps[0] as i128 / denom) as Weight;
    let (side, over) = bisect(graph, caps, share, rng);
    if over > 0 {
        return Err(Error::Infeasible(format!(
            "no bisection within targets ({}, {}) was found",
            caps[0], caps[1]
        )));
    }
    Ok(side)
}

/// Recursive bisection of `graph` into `parts` blocks of capacity `cap`
/// each. Each split also respects a per-level tolerance `eps_step` around the
/// proportional share. Lower block ids go to the first side.
pub(crate) fn split_into(
    graph: &Graph,
    parts: usize,
    cap: Weight,
    eps_step: f64,
    rng: &mut Rng,
) -> Vec<usize> {
    let n = graph.n();
    if parts <= 1 || n == 0 {
        return vec![0; n];
    }
    let p = [parts / 2, parts - parts / 2];
    let total = graph.total_node_weight() as i128;
    let mut caps = [0; 2];
    for i in 0..2 {
        let hard = p[i] as Weight * cap;
        let num = total * p[i] as i128;
        let ceil_share = ((num + parts as i128 - 1) / parts as i128) as Weight;
        let tight = ((num as f64 / parts as f64) * (1.0 + eps_step)).floor() as Weight;
        caps[i] = hard.min(tight.max(ceil_share));
    }
    let share = (total * p[0] as i128 / parts as i128) as Weight;
    let (side, _) = bisect(graph, caps, share, rng);

    let mut result = vec![0; n];
    let mut offset = 0;
    for s in 0..2 {
        let nodes: Vec<NodeId> = (0..n).filter(|&v| side[v] as usize == s).collect();
        let sub = graph.induced_subgraph(&nodes);
        let blocks = split_into(&sub, p[s], cap, eps_step, rng);
        for (i, &v) in nodes.iter().enumerate() {
            result[v] = offset + blocks[i];
        }
        offset += p[s];
    }
    result
}

fn implied_epsilon(graph: &Graph, k: usize, lmax: Weight) -> f64 {
    let total = graph.total_node_weight().max(1) as f64;
    (lmax as f64 * k as f64 / total - 1.0).max(0.0)
}

fn step_epsilon(epsilon: f64, splits: u32) -> f64 {
    (1.0 + epsilon).powf(1.0 / splits.max(1) as f64) - 1.0
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

fn check_node_weights(graph: &Graph, lmax: Weight) -> Result<()> {
    let heaviest = graph.max_node_weight();
    if heaviest > lmax {
        return Err(Error::Infeasible(format!(
            "node weight {heaviest} exceeds L_max = {lmax}"
        )));
    }
    Ok(())
}

/// Moves nodes out of blocks heavier than `lmax`, preferring the cheapest
/// move into an adjacent block with room.
pub fn repair_partition(graph: &Graph, blocks: &mut [usize], k: usize, lmax: Weight) -> Result<()> {
    let mut weights = vec![0; k];
    for (v, &b) in blocks.iter().enumerate() {
        weights[b] += graph.node_weight(v);
    }
    let mut conn = vec![0 as Weight; k];
    loop {
        let Some(over) = (0..k).filter(|&b| weights[b] > lmax).max_by_key(|&b| weights[b]) else {
            return Ok(());
        };
        let mut best: Option<(Weight, NodeId, usize)> = None;
        for v in (0..graph.n()).filter(|&v| blocks[v] == over) {
            let cv = graph.node_weight(v);
            if cv == 0 {
                continue;
            }
            for (u, w) in graph.neighbors(v) {
                conn[blocks[u]] += w;
            }
            let internal = conn[over];
            let consider = |t: usize, best: &mut Option<(Weight, NodeId, usize)>| {
                if t != over && weights[t] + cv <= lmax {
                    let increase = internal - conn[t];
                    if best.is_none_or(|(b, _, _)| increase < b) {
                        *best = Some((increase, v, t));
                    }
                }
            };
            for &u in graph.adjacent(v) {
                consider(blocks[u], &mut best);
            }
            if best.is_none() {
                if let Some(t) = (0..k).filter(|&t| t != over).min_by_key(|&t| weights[t]) {
                    consider(t, &mut best);
                }
            }
            for &u in graph.adjacent(v) {
                conn[blocks[u]] = 0;
            }
        }
        let Some((_, v, t)) = best else {
            return Err(Error::Infeasible(format!(
                "block {over} of weight {} cannot be brought below L_max = {lmax}",
                weights[over]
            )));
        };
        let cv = graph.node_weight(v);
        weights[over] -= cv;
        weights[t] += cv;
        blocks[v] = t;
    }
}

/// Recursive bisection into `k` blocks of weight at most `lmax`. For odd
/// `k` the first side receives `floor(k/2)` blocks and at most
/// `floor(k/2) * lmax` weight.
pub fn recursive_bisection_partition(
    graph: &Graph,
    k: usize,
    lmax: Weight,
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    check_node_weights(graph, lmax)?;
    let eps = step_epsilon(implied_epsilon(graph, k, lmax), ceil_log2(k));
    let mut blocks = split_into(graph, k, lmax, eps, rng);
    repair_partition(graph, &mut blocks, k, lmax)?;
    Ok(blocks)
}

/// Splits into `a_l` parts, then each part into `a_{l-1}` parts, and so on,
/// so that block ids are consecutive inside every module of the hierarchy.
pub fn multisection_partition(
    graph: &Graph,
    spec: &HierarchySpec,
    lmax: Weight,
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    check_node_weights(graph, lmax)?;
    let k = spec.k();
    let splits: u32 = spec.arities().iter().map(|&a| ceil_log2(a)).sum();
    let eps = step_epsilon(implied_epsilon(graph, k, lmax), splits);
    let h = spec.divisors();
    let mut blocks = vec![0; graph.n()];
    let all: Vec<NodeId> = (0..graph.n()).collect();
    multisect(graph, &all, spec, &h, spec.levels() - 1, 0, lmax, eps, rng, &mut blocks);
    repair_partition(graph, &mut blocks, k, lmax)?;
    Ok(blocks)
}

#[allow(clippy::too_many_arguments)]
fn multisect(
    sub: &Graph,
    ids: &[NodeId],
    spec: &HierarchySpec,
    h: &[usize],
    level: usize,
    offset: usize,
    lmax: Weight,
    eps: f64,
    rng: &mut Rng,
    out: &mut [usize],
) {
    let arity = spec.arities()[level];
    let parts = split_into(sub, arity, h[level] as Weight * lmax, eps, rng);
    for p in 0..arity {
        let local: Vec<NodeId> = (0..sub.n()).filter(|&v| parts[v] == p).collect();
        let first = offset + p * h[level];
        if level == 0 {
            for &v in &local {
                out[ids[v]] = first;
            }
        } else {
            let child = sub.induced_subgraph(&local);
            let child_ids: Vec<NodeId> = local.iter().map(|&v| ids[v]).collect();
            multisect(&child, &child_ids, spec, h, level - 1, first, lmax, eps, rng, out);
        }
    }
}
