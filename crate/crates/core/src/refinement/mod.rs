//! Local searches applied at every level during uncoarsening.

mod fm;
pub mod gain;
mod log;
mod lp;
mod pairwise;
pub mod queue;

pub use fm::{kway_fm, multitry_fm};
pub use gain::{compute_gains, gain, psi, GainCache, GainEntry};
pub use log::{Move, MoveLog};
pub use lp::label_propagation_refine;
pub use pairwise::quotient_graph_refinement;

use crate::model::{BalanceSpec, Graph, Mapping, NodeId, Weight};
use crate::rng::Rng;
use crate::topology::{PeDistance, PeId};

/// Tunables of the local searches.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementBudget {
    /// Stop rule: after `min_steps` moves without improvement, stop once
    /// `p * mean^2 > alpha * variance + beta` over those moves' gains.
    pub alpha: f64,
    /// `None` uses `ln(n)` of the current level.
    pub beta: Option<f64>,
    pub min_steps: usize,
    pub lp_rounds: usize,
    pub kway_passes: usize,
    pub multitry_rounds: usize,
    pub quotient_rounds: usize,
}

impl Default for RefinementBudget {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: None,
            min_steps: 15,
            lp_rounds: 3,
            kway_passes: 3,
            multitry_rounds: 2,
            quotient_rounds: 5,
        }
    }
}

/// Random-walk based stopping rule for FM-style searches.
pub(crate) struct StopRule {
    alpha: f64,
    beta: f64,
    min_steps: usize,
    steps: usize,
    sum: f64,
    sum_sq: f64,
}

impl StopRule {
    pub(crate) fn new(budget: &RefinementBudget, n: usize) -> Self {
        Self {
            alpha: budget.alpha,
            beta: budget.beta.unwrap_or_else(|| (n.max(2) as f64).ln()),
            min_steps: budget.min_steps,
            steps: 0,
            sum: 0.0,
            sum_sq: 0.0,
        }
    }

    pub(crate) fn reset(&mut self) {
        self.steps = 0;
        self.sum = 0.0;
        self.sum_sq = 0.0;
    }

    pub(crate) fn push(&mut self, gain: Weight) {
        let g = gain as f64;
        self.steps += 1;
        self.sum += g;
        self.sum_sq += g * g;
    }

    pub(crate) fn should_stop(&self) -> bool {
        if self.steps < self.min_steps {
            return false;
        }
        let p = self.steps as f64;
        let mean = self.sum / p;
        let variance = (self.sum_sq / p - mean * mean).max(0.0);
        mean < 0.0 && p * mean * mean > self.alpha * variance + self.beta
    }
}

#[inline]
pub(crate) fn over(weight: Weight, lmax: Weight) -> Weight {
    (weight - lmax).max(0)
}

pub(crate) fn current_overload(mapping: &Mapping, lmax: Weight) -> Weight {
    mapping.block_weights().iter().map(|&w| over(w, lmax)).sum()
}

/// Applies a move with known gain and returns its log record.
pub(crate) fn commit(
    graph: &Graph,
    mapping: &mut Mapping,
    v: NodeId,
    to: PeId,
    gain: Weight,
    lmax: Weight,
    overload: &mut Weight,
) -> Move {
    let from = mapping.pe(v);
    let pre = over(mapping.block_weight(from), lmax) + over(mapping.block_weight(to), lmax);
    mapping.apply_move(graph, v, to, gain);
    *overload += over(mapping.block_weight(from), lmax) + over(mapping.block_weight(to), lmax) - pre;
    Move {
        node: v,
        from,
        to,
        gain,
        objective: mapping.objective(),
        overload: *overload,
    }
}

/// Reverts a move made by [`commit`].
pub(crate) fn undo(graph: &Graph, mapping: &mut Mapping, m: &Move) {
    mapping.apply_move(graph, m.node, m.from, -m.gain);
}

/// Which searches run during uncoarsening, in the fixed order quotient
/// graph refinement, k-way FM, label propagation, multi-try FM.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RefinementSet {
    pub quotient: bool,
    pub kway: bool,
    pub label_propagation: bool,
    pub multitry: bool,
    /// Use the delta-gain cache in label propagation.
    pub delta_gains: bool,
}

impl RefinementSet {
    pub const NONE: Self = Self {
        quotient: false,
        kway: false,
        label_propagation: false,
        multitry: false,
        delta_gains: false,
    };

    pub fn is_empty(&self) -> bool {
        !(self.quotient || self.kway || self.label_propagation || self.multitry)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefinementPass {
    Quotient,
    KWay,
    LabelPropagation,
    MultiTry,
}

/// Runs the enabled searches in order. `observe` is called after each pass
/// with the pass, the objective before it, and the resulting mapping.
#[allow(clippy::too_many_arguments)]
pub fn refine_level<D: PeDistance>(
    graph: &Graph,
    mapping: &mut Mapping,
    oracle: &D,
    balance: &BalanceSpec,
    set: &RefinementSet,
    budget: &RefinementBudget,
    rng: &mut Rng,
    mut cache: Option<&mut GainCache>,
    log: &mut MoveLog,
    observe: &mut dyn FnMut(RefinementPass, Weight, &Mapping),
) -> Weight {
    let start = mapping.objective();
    if set.quotient {
        let before = mapping.objective();
        quotient_graph_refinement(graph, mapping, oracle, balance, budget, rng, log);
        observe(RefinementPass::Quotient, before, mapping);
    }
    if set.kway {
        let before = mapping.objective();
        kway_fm(graph, mapping, oracle, balance, budget, rng, log);
        observe(RefinementPass::KWay, before, mapping);
    }
    if set.label_propagation {
        let before = mapping.objective();
        let c = if set.delta_gains { cache.as_deref_mut() } else { None };
        label_propagation_refine(graph, mapping, oracle, balance, budget, rng, c, log);
        observe(RefinementPass::LabelPropagation, before, mapping);
    }
    if set.multitry {
        let before = mapping.objective();
        multitry_fm(graph, mapping, oracle, balance, budget, rng, log);
        observe(RefinementPass::MultiTry, before, mapping);
    }
    start - mapping.objective()
}
