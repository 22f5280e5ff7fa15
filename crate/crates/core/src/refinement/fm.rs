//! k-way FM and its localized multi-try variant.

use rand::seq::SliceRandom;

use super::gain::{compute_gains, GainEntry};
use super::log::{Move, MoveLog};
use super::queue::BucketQueue;
use super::{commit, current_overload, undo, RefinementBudget, StopRule};
use crate::model::{boundary_nodes, is_boundary, BalanceSpec, Graph, Mapping, NodeId, Weight};
use crate::rng::Rng;
use crate::topology::{PeDistance, PeId};

/// Reusable buffers for repeated FM runs on the same graph.
pub(crate) struct FmWorkspace {
    queue: BucketQueue,
    stamp: Vec<u32>,
    run: u32,
    scratch: Vec<GainEntry>,
    trial: Vec<Move>,
    touched: Vec<NodeId>,
}

impl FmWorkspace {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            queue: BucketQueue::new(n),
            stamp: vec![0; n],
            run: 0,
            scratch: Vec::new(),
            trial: Vec::new(),
            touched: Vec::new(),
        }
    }
}

/// Highest gain of `v` over all other blocks of `R(v)`, ignoring balance.
fn queue_key<D: PeDistance>(graph: &Graph, mapping: &Mapping, oracle: &D, v: NodeId, scratch: &mut Vec<GainEntry>) -> Option<Weight> {
    compute_gains(graph, mapping.assignment(), oracle, v, scratch);
    let own = mapping.pe(v);
    scratch.iter().filter(|e| e.block != own).map(|e| e.gain).max()
}

/// Best admissible target for `v`: a `c(v)`-underloaded neighboring block,
/// or, when `v` sits in an overloaded block, any neighboring block that ends
/// up lighter than the source was. Ties prefer the lighter block, then the
/// lower id.
pub(crate) fn best_target<D: PeDistance>(
    graph: &Graph,
    mapping: &Mapping,
    oracle: &D,
    balance: &BalanceSpec,
    v: NodeId,
    scratch: &mut Vec<GainEntry>,
) -> Option<(PeId, Weight)> {
    compute_gains(graph, mapping.assignment(), oracle, v, scratch);
    let own = mapping.pe(v);
    let c = graph.node_weight(v);
    let source = mapping.block_weight(own);
    let source_over = balance.is_overloaded(source);
    let mut best: Option<(Weight, Weight, PeId)> = None;
    for e in scratch.iter().filter(|e| e.block != own) {
        let target = mapping.block_weight(e.block);
        let admissible = balance.is_underloaded(target, c) || (source_over && target + c < source);
        if !admissible {
            continue;
        }
        let better = match best {
            None => true,
            Some((g, w, _)) => e.gain > g || (e.gain == g && target < w),
        };
        if better {
            best = Some((e.gain, target, e.block));
        }
    }
    best.map(|(g, _, b)| (b, g))
}

/// One FM search seeded with `seeds`. Moves the best node, requeues its
/// unmoved neighbors, and finally rolls back to the best prefix by
/// (overload, `J`). Returns whether the kept prefix is non-empty, i.e.
/// strictly improved the state.
#[allow(clippy::too_many_arguments)]
pub(crate) fn fm_run<D: PeDistance>(
    graph: &Graph,
    mapping: &mut Mapping,
    oracle: &D,
    balance: &BalanceSpec,
    budget: &RefinementBudget,
    seeds: &[NodeId],
    ws: &mut FmWorkspace,
    log: &mut MoveLog,
) -> bool {
    ws.run = ws.run.wrapping_add(1);
    if ws.run == 0 {
        ws.stamp.iter_mut().for_each(|s| *s = 0);
        ws.run = 1;
    }
    let run = ws.run;
    ws.queue.clear();
    ws.trial.clear();
    ws.touched.clear();
    for &v in seeds {
        if let Some(key) = queue_key(graph, mapping, oracle, v, &mut ws.scratch) {
            ws.queue.push(v, key);
        }
    }
    let lmax = balance.lmax;
    let mut overload = current_overload(mapping, lmax);
    let start = (overload, mapping.objective());
    let mut best = start;
    let mut best_len = 0;
    let mut stop = StopRule::new(budget, graph.n());

    while let Some((v, _)) = ws.queue.pop_max() {
        if ws.stamp[v] == run {
            continue;
        }
        let Some((to, gain)) = best_target(graph, mapping, oracle, balance, v, &mut ws.scratch) else {
            continue;
        };
        ws.stamp[v] = run;
        ws.touched.push(v);
        ws.trial.push(commit(graph, mapping, v, to, gain, lmax, &mut overload));
        for &u in graph.adjacent(v) {
            if ws.stamp[u] != run {
                match queue_key(graph, mapping, oracle, u, &mut ws.scratch) {
                    Some(key) => ws.queue.push(u, key),
                    None => ws.queue.remove(u),
                }
            }
        }
        let score = (overload, mapping.objective());
        if score < best {
            best = score;
            best_len = ws.trial.len();
            stop.reset();
        } else {
            stop.push(gain);
            if stop.should_stop() {
                break;
            }
        }
    }
    for m in ws.trial[best_len..].iter().rev() {
        undo(graph, mapping, m);
    }
    log.extend(ws.trial[..best_len].iter().copied());
    best_len > 0
}

/// Nodes moved during the most recent [`fm_run`], including rolled back ones.
pub(crate) fn last_run_nodes(ws: &FmWorkspace) -> &[NodeId] {
    &ws.touched
}

/// Global k-way FM: each pass starts from the whole boundary in random
/// order. Passes repeat while they improve, up to the budget.
pub fn kway_fm<D: PeDistance>(
    graph: &Graph,
    mapping: &mut Mapping,
    oracle: &D,
    balance: &BalanceSpec,
    budget: &RefinementBudget,
    rng: &mut Rng,
    log: &mut MoveLog,
) -> Weight {
    let before = mapping.objective();
    let mut ws = FmWorkspace::new(graph.n());
    for _ in 0..budget.kway_passes {
        let mut seeds = boundary_nodes(graph, mapping.assignment());
        if seeds.is_empty() {
            break;
        }
        seeds.shuffle(rng);
        if !fm_run(graph, mapping, oracle, balance, budget, &seeds, &mut ws, log) {
            break;
        }
    }
    before - mapping.objective()
}

/// Localized FM: every trial starts from a single boundary node. Nodes moved
/// in a trial are not used as roots again in the same round.
pub fn multitry_fm<D: PeDistance>(
    graph: &Graph,
    mapping: &mut Mapping,
    oracle: &D,
    balance: &BalanceSpec,
    budget: &RefinementBudget,
    rng: &mut Rng,
    log: &mut MoveLog,
) -> Weight {
    let before = mapping.objective();
    let n = graph.n();
    let mut ws = FmWorkspace::new(n);
    let mut used = vec![false; n];
    for _ in 0..budget.multitry_rounds {
        let mut roots = boundary_nodes(graph, mapping.assignment());
        if roots.is_empty() {
            break;
        }
        roots.shuffle(rng);
        used.iter_mut().for_each(|u| *u = false);
        let mut improved = false;
        for &root in &roots {
            if used[root] || !is_boundary(graph, mapping.assignment(), root) {
                continue;
            }
            used[root] = true;
            improved |= fm_run(graph, mapping, oracle, balance, budget, &[root], &mut ws, log);
            for &v in last_run_nodes(&ws) {
                used[v] = true;
            }
        }
        if !improved {
            break;
        }
    }
    before - mapping.objective()
}
