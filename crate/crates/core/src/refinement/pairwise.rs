//! Two-way FM searches on pairs of adjacent blocks, scheduled over the
//! quotient graph.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::log::{Move, MoveLog};
use super::queue::BucketQueue;
use super::{commit, current_overload, over, undo, RefinementBudget, StopRule};
use crate::model::{BalanceSpec, Graph, Mapping, NodeId, Weight};
use crate::rng::Rng;
use crate::topology::{PeDistance, PeId};

#[inline]
fn move_gain<D: PeDistance>(graph: &Graph, mapping: &Mapping, oracle: &D, v: NodeId, to: PeId) -> Weight {
    let own = mapping.pe(v);
    graph
        .neighbors(v)
        .map(|(u, w)| {
            let pu = mapping.pe(u);
            w * (oracle.distance(own, pu) - oracle.distance(to, pu))
        })
        .sum()
}

struct PairSearch<'a, D> {
    graph: &'a Graph,
    oracle: &'a D,
    balance: &'a BalanceSpec,
    budget: &'a RefinementBudget,
    queues: [BucketQueue; 2],
    stamp: Vec<u32>,
    run: u32,
    trial: Vec<Move>,
}

impl<D: PeDistance> PairSearch<'_, D> {
    /// A move out of `from` is admissible if the target stays within
    /// `L_max`, or if `from` is overloaded and the target ends up lighter
    /// than `from` was.
    fn admissible(&self, mapping: &Mapping, v: NodeId, from: PeId, to: PeId) -> bool {
        let c = self.graph.node_weight(v);
        let source = mapping.block_weight(from);
        let target = mapping.block_weight(to);
        self.balance.is_underloaded(target, c) || (self.balance.is_overloaded(source) && target + c < source)
    }

    /// Two-sided FM between blocks `pair[0]` and `pair[1]` seeded with their
    /// mutual boundary. Returns whether any move was kept.
    fn run(&mut self, mapping: &mut Mapping, pair: [PeId; 2], seeds: &[NodeId], rng: &mut Rng, log: &mut MoveLog) -> bool {
        self.run += 1;
        let run = self.run;
        let lmax = self.balance.lmax;
        self.queues[0].clear();
        self.queues[1].clear();
        self.trial.clear();
        for &v in seeds {
            let b = mapping.pe(v);
            let side = if b == pair[0] { 0 } else if b == pair[1] { 1 } else { continue };
            let other = pair[1 - side];
            if self.graph.adjacent(v).iter().any(|&u| mapping.pe(u) == other) {
                self.queues[side].push(v, move_gain(self.graph, mapping, self.oracle, v, other));
            }
        }
        let mut overload = current_overload(mapping, lmax);
        let start = (overload, mapping.objective());
        let mut best = start;
        let mut best_len = 0;
        let mut stop = StopRule::new(self.budget, self.graph.n());
        loop {
            let mut tops: [Option<(NodeId, Weight)>; 2] = [None, None];
            for (s, top) in tops.iter_mut().enumerate() {
                while let Some((v, g)) = self.queues[s].peek_max() {
                    if self.admissible(mapping, v, pair[s], pair[1 - s]) {
                        *top = Some((v, g));
                        break;
                    }
                    self.queues[s].remove(v);
                }
            }
            let side = match tops {
                [None, None] => break,
                [Some(_), None] => 0,
                [None, Some(_)] => 1,
                [Some((_, g0)), Some((_, g1))] => {
                    let w0 = mapping.block_weight(pair[0]);
                    let w1 = mapping.block_weight(pair[1]);
                    let (o0, o1) = (over(w0, lmax), over(w1, lmax));
                    if o0 != o1 {
                        // Drain the more overloaded block first.
                        usize::from(o1 > o0)
                    } else if g0 != g1 {
                        usize::from(g1 > g0)
                    } else if w0 != w1 {
                        usize::from(w1 > w0)
                    } else {
                        usize::from(rng.gen_bool(0.5))
                    }
                }
            };
            let (v, gain) = tops[side].unwrap();
            self.queues[side].remove(v);
            self.stamp[v] = run;
            let to = pair[1 - side];
            self.trial.push(commit(self.graph, mapping, v, to, gain, lmax, &mut overload));
            for &u in self.graph.adjacent(v) {
                if self.stamp[u] == run {
                    continue;
                }
                let bu = mapping.pe(u);
                let su = if bu == pair[0] { 0 } else if bu == pair[1] { 1 } else { continue };
                let other = pair[1 - su];
                if self.graph.adjacent(u).iter().any(|&x| mapping.pe(x) == other) {
                    self.queues[su].push(u, move_gain(self.graph, mapping, self.oracle, u, other));
                } else {
                    self.queues[su].remove(u);
                }
            }
            let score = (overload, mapping.objective());
            if score < best {
                best = score;
                best_len = self.trial.len();
                stop.reset();
            } else {
                stop.push(gain);
                if stop.should_stop() {
                    break;
                }
            }
        }
        for m in self.trial[best_len..].iter().rev() {
            undo(self.graph, mapping, m);
        }
        log.extend(self.trial[..best_len].iter().copied());
        best_len > 0
    }
}

/// Boundary nodes grouped by the (unordered) block pair they sit between.
fn pair_boundaries(graph: &Graph, assignment: &[PeId]) -> HashMap<(PeId, PeId), Vec<NodeId>> {
    let mut pairs: HashMap<(PeId, PeId), Vec<NodeId>> = HashMap::new();
    let mut seen: Vec<PeId> = Vec::new();
    for v in 0..graph.n() {
        let b = assignment[v];
        seen.clear();
        for &u in graph.adjacent(v) {
            let c = assignment[u];
            if c != b && !seen.contains(&c) {
                seen.push(c);
                pairs.entry((b.min(c), b.max(c))).or_default().push(v);
            }
        }
    }
    pairs
}

/// Runs pairwise FM on every pair of adjacent blocks with at least one
/// active endpoint, in random order. Blocks that change become active for
/// the next round; stops when no block is active or the round budget is
/// spent.
pub fn quotient_graph_refinement<D: PeDistance>(
    graph: &Graph,
    mapping: &mut Mapping,
    oracle: &D,
    balance: &BalanceSpec,
    budget: &RefinementBudget,
    rng: &mut Rng,
    log: &mut MoveLog,
) -> Weight {
    let before = mapping.objective();
    let k = mapping.k();
    let mut search = PairSearch {
        graph,
        oracle,
        balance,
        budget,
        queues: [BucketQueue::new(graph.n()), BucketQueue::new(graph.n())],
        stamp: vec![0; graph.n()],
        run: 0,
        trial: Vec::new(),
    };
    let mut active = vec![true; k];
    for _ in 0..budget.quotient_rounds {
        let boundaries = pair_boundaries(graph, mapping.assignment());
        let mut pairs: Vec<(PeId, PeId)> = boundaries
            .keys()
            .copied()
            .filter(|&(a, b)| active[a] || active[b])
            .collect();
        if pairs.is_empty() {
            break;
        }
        pairs.sort_unstable();
        pairs.shuffle(rng);
        let mut next_active = vec![false; k];
        let mut any = false;
        for (a, b) in pairs {
            let mut seeds = boundaries[&(a, b)].clone();
            seeds.shuffle(rng);
            if search.run(mapping, [a, b], &seeds, rng, log) {
                next_active[a] = true;
                next_active[b] = true;
                any = true;
            }
        }
        if !any {
            break;
        }
        active = next_active;
    }
    before - mapping.objective()
}
