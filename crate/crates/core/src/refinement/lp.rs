use rand::seq::SliceRandom;
use rand::Rng as _;

use super::gain::{compute_gains, GainCache, GainEntry};
use super::log::{Move, MoveLog};
use super::{current_overload, over, RefinementBudget};
use crate::model::{BalanceSpec, Graph, Mapping, NodeId, Weight};
use crate::rng::Rng;
use crate::topology::{PeDistance, PeId};

/// Label propagation: every round visits all nodes in a fresh random order
/// and moves each to the `c(v)`-underloaded neighboring block with the
/// highest positive gain (ties at random). Without a positive option, a
/// zero-gain block is taken with probability 1/2. Stops early after a round
/// without moves.
///
/// With `cache` the gains come from the delta-gain cache, otherwise they are
/// recomputed per visit; both paths make the same random choices.
#[allow(clippy::too_many_arguments)]
pub fn label_propagation_refine<D: PeDistance>(
    graph: &Graph,
    mapping: &mut Mapping,
    oracle: &D,
    balance: &BalanceSpec,
    budget: &RefinementBudget,
    rng: &mut Rng,
    mut cache: Option<&mut GainCache>,
    log: &mut MoveLog,
) -> Weight {
    let before = mapping.objective();
    let lmax = balance.lmax;
    let mut overload = current_overload(mapping, lmax);
    let mut order: Vec<NodeId> = (0..graph.n()).collect();
    let mut scratch: Vec<GainEntry> = Vec::new();
    let mut best: Vec<PeId> = Vec::new();
    for _ in 0..budget.lp_rounds {
        order.shuffle(rng);
        let mut moved = false;
        for &v in &order {
            if graph.degree(v) == 0 {
                continue;
            }
            let entries: &[GainEntry] = match cache.as_deref_mut() {
                Some(c) => c.gains(graph, mapping, oracle, v),
                None => {
                    compute_gains(graph, mapping.assignment(), oracle, v, &mut scratch);
                    &scratch
                }
            };
            let own = mapping.pe(v);
            let c = graph.node_weight(v);
            let mut top = 0;
            best.clear();
            for e in entries {
                if e.block == own || e.connection == 0 || e.gain < top {
                    continue;
                }
                if !balance.is_underloaded(mapping.block_weight(e.block), c) {
                    continue;
                }
                if e.gain > top {
                    top = e.gain;
                    best.clear();
                }
                best.push(e.block);
            }
            if best.is_empty() || (top == 0 && !rng.gen_bool(0.5)) {
                continue;
            }
            let to = best[rng.gen_range(0..best.len())];
            let from = own;
            let pre = over(mapping.block_weight(from), lmax) + over(mapping.block_weight(to), lmax);
            let gain = match cache.as_deref_mut() {
                Some(cache) => cache.apply_move(graph, mapping, oracle, v, to),
                None => {
                    mapping.apply_move(graph, v, to, top);
                    top
                }
            };
            debug_assert_eq!(gain, top);
            overload += over(mapping.block_weight(from), lmax) + over(mapping.block_weight(to), lmax) - pre;
            log.push(Move {
                node: v,
                from,
                to,
                gain,
                objective: mapping.objective(),
                overload,
            });
            moved = true;
        }
        if !moved {
            break;
        }
    }
    before - mapping.objective()
}
