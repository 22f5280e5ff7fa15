use std::fmt;

use crate::error::{Error, Result};
use crate::model::{block_weights, compute_lmax, Epsilon, Graph, Weight};
use crate::topology::{HierarchySpec, PeId};

/// Quality report of a mapping.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport {
    pub objective: Weight,
    pub k: usize,
    pub lmax: Weight,
    pub max_block_weight: Weight,
    /// `max_block_weight / lmax`.
    pub balance_ratio: f64,
    /// Communication volume that stays on one PE.
    pub intra_pe: Weight,
    /// `level_traffic[j - 1]`: volume whose endpoints first share a module at
    /// level `j + 1`, i.e. which pays `d_j`. Volumes count both directions of
    /// every edge, so `sum d_j * level_traffic[j - 1] = J`.
    pub level_traffic: Vec<Weight>,
}

impl EvaluationReport {
    pub fn is_balanced(&self) -> bool {
        self.max_block_weight <= self.lmax
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "J: {}", self.objective)?;
        writeln!(f, "k: {}", self.k)?;
        writeln!(f, "L_max: {}", self.lmax)?;
        writeln!(f, "max block weight: {}", self.max_block_weight)?;
        writeln!(f, "balance ratio: {:.6}", self.balance_ratio)?;
        writeln!(f, "balanced: {}", self.is_balanced())?;
        writeln!(f, "intra-PE volume: {}", self.intra_pe)?;
        for (j, t) in self.level_traffic.iter().enumerate() {
            writeln!(f, "level {} volume: {}", j + 1, t)?;
        }
        Ok(())
    }
}

/// Evaluates `assignment` on the hierarchy `spec` with imbalance `epsilon`.
pub fn evaluate(graph: &Graph, assignment: &[PeId], spec: &HierarchySpec, epsilon: Epsilon) -> Result<EvaluationReport> {
    let k = spec.k();
    if assignment.len() != graph.n() {
        return Err(Error::InvalidMapping(format!(
            "mapping has {} entries, graph has {} nodes",
            assignment.len(),
            graph.n()
        )));
    }
    if let Some(&bad) = assignment.iter().find(|&&p| p >= k) {
        return Err(Error::PeOutOfRange { id: bad, k });
    }
    let h = spec.divisors();
    let levels = spec.levels();
    let mut level_traffic = vec![0; levels];
    let mut intra_pe = 0;
    for v in 0..graph.n() {
        let pv = assignment[v];
        for (u, w) in graph.neighbors(v) {
            let pu = assignment[u];
            if pu == pv {
                intra_pe += w;
                continue;
            }
            // Highest level at which the module ids still differ.
            let level = (0..levels).rev().find(|&i| pv / h[i] != pu / h[i]).unwrap();
            level_traffic[level] += w;
        }
    }
    let objective = level_traffic.iter().zip(spec.costs()).map(|(t, d)| t * d).sum();
    let lmax = compute_lmax(epsilon, k, graph.total_node_weight())?;
    let max_block_weight = block_weights(graph, assignment, k).into_iter().max().unwrap_or(0);
    Ok(EvaluationReport {
        objective,
        k,
        lmax,
        max_block_weight,
        balance_ratio: if lmax > 0 { max_block_weight as f64 / lmax as f64 } else { 0.0 },
        intra_pe,
        level_traffic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::objective_j;
    use crate::topology::{build_oracle, OracleVariant};

    #[test]
    fn all_on_one_pe() {
        let g = Graph::from_edges(3, &[(0, 1, 2), (1, 2, 3)], None).unwrap();
        let spec = HierarchySpec::parse("2:2", "1:10").unwrap();
        let r = evaluate(&g, &[0, 0, 0], &spec, Epsilon::new(3, 100)).unwrap();
        assert_eq!(r.objective, 0);
        assert_eq!(r.intra_pe, 10);
        assert_eq!(r.level_traffic, vec![0, 0]);
        assert!(!r.is_balanced());
    }

    #[test]
    fn decomposition_sums_to_objective() {
        let g = Graph::from_edges(4, &[(0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 0, 5)], None).unwrap();
        let spec = HierarchySpec::parse("2:2", "1:10").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Matrix).unwrap();
        let a = [0, 1, 3, 3];
        let r = evaluate(&g, &a, &spec, Epsilon::new(0, 1)).unwrap();
        assert_eq!(r.objective, objective_j(&g, &a, &oracle).unwrap());
        assert_eq!(r.level_traffic, vec![4, 16]);
        assert_eq!(r.intra_pe, 8);
    }

    #[test]
    fn size_mismatch() {
        let g = Graph::from_edges(2, &[], None).unwrap();
        let spec = HierarchySpec::parse("2", "1").unwrap();
        assert!(evaluate(&g, &[0], &spec, Epsilon::new(0, 1)).is_err());
        assert!(evaluate(&g, &[0, 2], &spec, Epsilon::new(0, 1)).is_err());
    }
}
