//! End-to-end pipeline, presets, file formats, evaluation, instance
//! generation and benchmarking.

pub mod bench;
mod eval;
pub mod generate;
mod io;

pub use eval::{evaluate, EvaluationReport};
pub use io::{
    metis_string, parse_mapping_str, parse_metis, parse_metis_str, read_mapping, write_mapping, write_mapping_to,
    write_metis,
};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::initial::{initial_mapping, repair_partition, InitialMappingConfig};
use crate::model::{BalanceSpec, Epsilon, Graph, Mapping, Weight};
use crate::multilevel::{coarsen, CoarseningConfig};
use crate::refinement::{refine_level, GainCache, MoveLog, RefinementBudget, RefinementPass, RefinementSet};
use crate::rng::derive;
use crate::topology::{DistanceOracle, HierarchySpec, OracleVariant, PeDistance};

/// Quality/speed trade-offs of the mapper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    Fastest,
    Fast,
    Eco,
    Strong,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fastest, Preset::Fast, Preset::Eco, Preset::Strong];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fastest => "fastest",
            Preset::Fast => "fast",
            Preset::Eco => "eco",
            Preset::Strong => "strong",
        }
    }

    pub fn refinements(self) -> RefinementSet {
        match self {
            Preset::Fastest => RefinementSet::NONE,
            Preset::Fast => RefinementSet {
                label_propagation: true,
                delta_gains: true,
                ..RefinementSet::NONE
            },
            Preset::Eco => RefinementSet {
                quotient: true,
                kway: true,
                label_propagation: true,
                ..RefinementSet::NONE
            },
            Preset::Strong => RefinementSet {
                quotient: true,
                kway: true,
                label_propagation: true,
                multitry: true,
                delta_gains: false,
            },
        }
    }

    pub fn config(self) -> PipelineConfig {
        PipelineConfig {
            initial: if self == Preset::Strong {
                InitialMappingConfig::MSECIN
            } else {
                InitialMappingConfig::MSECI
            },
            refinement: self.refinements(),
            budget: RefinementBudget::default(),
            coarsening: CoarseningConfig::default(),
            oracle: OracleVariant::Binary,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown preset '{s}' (fastest, fast, eco, strong)")))
    }
}

/// Everything the pipeline needs besides the inputs.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub initial: InitialMappingConfig,
    pub refinement: RefinementSet,
    pub budget: RefinementBudget,
    pub coarsening: CoarseningConfig,
    pub oracle: OracleVariant,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Preset::Eco.config()
    }
}

/// Summary of one pipeline run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStats {
    pub k: usize,
    pub seed: u64,
    pub objective: Weight,
    pub runtime_s: f64,
    pub phase_coarsen_s: f64,
    pub phase_initial_s: f64,
    pub phase_refine_s: f64,
    /// Number of graphs in the multilevel hierarchy, input included.
    pub levels: usize,
    pub lmax: Weight,
    /// `max c(V_i) / L_max`.
    pub balance_ratio: f64,
}

/// Milestones reported to an observer during [`map_graph_observed`].
#[derive(Debug)]
pub enum PipelineEvent<'a> {
    Coarsened { levels: usize },
    Initial { level: usize, graph: &'a Graph, mapping: &'a Mapping },
    Projected { level: usize, graph: &'a Graph, mapping: &'a Mapping },
    Refined { level: usize, pass: RefinementPass, before: Weight, graph: &'a Graph, mapping: &'a Mapping },
    Finished { mapping: &'a Mapping },
}

/// Runs the pipeline with an explicit distance oracle.
#[allow(clippy::too_many_arguments)]
pub fn map_graph_with<D: PeDistance>(
    graph: &Graph,
    spec: &HierarchySpec,
    oracle: &D,
    config: &PipelineConfig,
    epsilon: Epsilon,
    seed: u64,
    observer: &mut dyn FnMut(PipelineEvent<'_>),
) -> Result<(Mapping, RunStats)> {
    let start = Instant::now();
    let k = spec.k();
    if oracle.pe_count() != k {
        return Err(Error::InvalidParameter(format!(
            "oracle covers {} PEs, hierarchy has {k}",
            oracle.pe_count()
        )));
    }
    let balance = BalanceSpec::new(epsilon, k, graph.total_node_weight())?;
    if graph.max_node_weight() > balance.lmax {
        return Err(Error::Infeasible(format!(
            "node weight {} exceeds L_max = {}",
            graph.max_node_weight(),
            balance.lmax
        )));
    }

    let t = Instant::now();
    let hierarchy = coarsen(graph, &balance, &config.coarsening, &mut derive(seed, 1));
    let phase_coarsen_s = t.elapsed().as_secs_f64();
    observer(PipelineEvent::Coarsened { levels: hierarchy.depth() });

    let t = Instant::now();
    let top = hierarchy.coarsest_level();
    let mut mapping = initial_mapping(
        hierarchy.coarsest(),
        spec,
        &balance,
        &config.initial,
        oracle,
        &mut derive(seed, 2),
    )?;
    let phase_initial_s = t.elapsed().as_secs_f64();
    observer(PipelineEvent::Initial {
        level: top,
        graph: hierarchy.coarsest(),
        mapping: &mapping,
    });

    let t = Instant::now();
    let mut rng = derive(seed, 3);
    let mut cache = GainCache::new(0);
    let mut log = MoveLog::new();
    for level in (0..=top).rev() {
        let g = hierarchy.graph(level);
        if level < top {
            mapping = hierarchy.project_mapping(&mapping, level + 1, level)?;
            observer(PipelineEvent::Projected {
                level,
                graph: g,
                mapping: &mapping,
            });
        }
        if config.refinement.is_empty() {
            continue;
        }
        cache.reset(g.n());
        log.clear();
        refine_level(
            g,
            &mut mapping,
            oracle,
            &balance,
            &config.refinement,
            &config.budget,
            &mut rng,
            Some(&mut cache),
            &mut log,
            &mut |pass, before, m| {
                observer(PipelineEvent::Refined {
                    level,
                    pass,
                    before,
                    graph: g,
                    mapping: m,
                })
            },
        );
    }
    if mapping.max_block_weight() > balance.lmax {
        // Only reachable through unusual inputs; restore feasibility.
        let mut assignment = mapping.into_assignment();
        repair_partition(graph, &mut assignment, k, balance.lmax)?;
        mapping = Mapping::new(graph, assignment, oracle)?;
    }
    let phase_refine_s = t.elapsed().as_secs_f64();
    observer(PipelineEvent::Finished { mapping: &mapping });

    let stats = RunStats {
        k,
        seed,
        objective: mapping.objective(),
        runtime_s: start.elapsed().as_secs_f64(),
        phase_coarsen_s,
        phase_initial_s,
        phase_refine_s,
        levels: hierarchy.depth(),
        lmax: balance.lmax,
        balance_ratio: if balance.lmax > 0 {
            mapping.max_block_weight() as f64 / balance.lmax as f64
        } else {
            0.0
        },
    };
    Ok((mapping, stats))
}

/// Builds the oracle selected in `config` and runs the pipeline with it.
pub fn map_graph_observed(
    graph: &Graph,
    spec: &HierarchySpec,
    config: &PipelineConfig,
    epsilon: Epsilon,
    seed: u64,
    observer: &mut dyn FnMut(PipelineEvent<'_>),
) -> Result<(Mapping, RunStats)> {
    let oracle = crate::topology::build_oracle(spec, config.oracle)?;
    // Dispatch once so the hot loops use the concrete oracle type.
    match &oracle {
        DistanceOracle::Matrix(o) => map_graph_with(graph, spec, o, config, epsilon, seed, observer),
        DistanceOracle::Division(o) => map_graph_with(graph, spec, o, config, epsilon, seed, observer),
        DistanceOracle::StoredDivision(o) => {
            map_graph_with(graph, spec, o, config, epsilon, seed, observer)
        }
        DistanceOracle::Binary(o) => map_graph_with(graph, spec, o, config, epsilon, seed, observer),
    }
}

/// Maps `graph` onto the hierarchy `spec`.
pub fn map_graph(
    graph: &Graph,
    spec: &HierarchySpec,
    config: &PipelineConfig,
    epsilon: Epsilon,
    seed: u64,
) -> Result<(Mapping, RunStats)> {
    map_graph_observed(graph, spec, config, epsilon, seed, &mut |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::objective_j;
    use crate::topology::build_oracle;

    #[test]
    fn presets_parse() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("turbo".parse::<Preset>().is_err());
        assert!(Preset::Fastest.config().refinement.is_empty());
        assert_eq!(Preset::Strong.config().initial, InitialMappingConfig::MSECIN);
    }

    #[test]
    fn single_pe() {
        let g = generate::grid2d(5, 5);
        let spec = HierarchySpec::parse("1", "1").unwrap();
        let (m, stats) = map_graph(&g, &spec, &Preset::Strong.config(), Epsilon::new(3, 100), 1).unwrap();
        assert!(m.assignment().iter().all(|&p| p == 0));
        assert_eq!(stats.objective, 0);
    }

    #[test]
    fn pipeline_is_consistent_and_deterministic() {
        let g = generate::grid2d(90, 90);
        let spec = HierarchySpec::parse("2:4:2", "1:10:100").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Binary).unwrap();
        let mut config = Preset::Strong.config();
        config.coarsening.min_nodes = 500;
        let mut events = 0;
        let (m, stats) = map_graph_observed(&g, &spec, &config, Epsilon::new(3, 100), 4, &mut |e| {
            match e {
                PipelineEvent::Initial { graph, mapping, .. }
                | PipelineEvent::Projected { graph, mapping, .. }
                | PipelineEvent::Refined { graph, mapping, .. } => {
                    mapping.verify(graph, &oracle).unwrap();
                }
                _ => {}
            }
            events += 1;
        })
        .unwrap();
        assert!(stats.levels > 1);
        assert!(events > 4);
        assert_eq!(stats.objective, objective_j(&g, m.assignment(), &oracle).unwrap());
        assert!(stats.balance_ratio <= 1.0);
        let (again, _) = map_graph(&g, &spec, &config, Epsilon::new(3, 100), 4).unwrap();
        assert_eq!(again, m);
    }
}
