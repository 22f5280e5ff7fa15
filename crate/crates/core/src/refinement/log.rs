use crate::error::{Error, Result};
use crate::model::{Graph, Mapping, NodeId, Weight};
use crate::topology::{PeDistance, PeId};

/// A committed node move together with the state it produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub node: NodeId,
    pub from: PeId,
    pub to: PeId,
    pub gain: Weight,
    /// `J` right after the move.
    pub objective: Weight,
    /// Total weight above `L_max` right after the move.
    pub overload: Weight,
}

/// Ordered record of the moves that survived rollback.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveLog {
    moves: Vec<Move>,
}

impl MoveLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, m: Move) {
        self.moves.push(m);
    }

    pub fn extend(&mut self, moves: impl IntoIterator<Item = Move>) {
        self.moves.extend(moves);
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn clear(&mut self) {
        self.moves.clear();
    }

    /// Replays the log on a copy of `initial`, checking every recorded gain
    /// and objective along the way.
    pub fn replay<D: PeDistance>(&self, graph: &Graph, initial: &Mapping, oracle: &D, lmax: Weight) -> Result<Mapping> {
        let mut mapping = initial.clone();
        for (i, m) in self.moves.iter().enumerate() {
            if mapping.pe(m.node) != m.from {
                return Err(Error::InvalidMapping(format!(
                    "move {i}: node {} is on PE {}, log says {}",
                    m.node,
                    mapping.pe(m.node),
                    m.from
                )));
            }
            let gain = mapping.move_node(graph, oracle, m.node, m.to);
            let overload: Weight = mapping.block_weights().iter().map(|&w| (w - lmax).max(0)).sum();
            if gain != m.gain || mapping.objective() != m.objective || overload != m.overload {
                return Err(Error::InvalidMapping(format!(
                    "move {i}: replay gives gain {gain}, J {}, overload {overload}; log has {}, {}, {}",
                    mapping.objective(),
                    m.gain,
                    m.objective,
                    m.overload
                )));
            }
        }
        Ok(mapping)
    }
}
