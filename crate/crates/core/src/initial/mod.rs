//! Initial mapping on the coarsest graph, built in two phases: a balanced
//! k-partition, then a placement of its blocks onto PEs.

mod assignment;
mod bisection;

pub use assignment::{hierarchy_top_down, identity_assignment, muller_merbach_greedy, ncd_swap_refinement};
pub use bisection::{
    cut_weight, greedy_graph_growing_bisection, multisection_partition, recursive_bisection_partition,
    repair_partition,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{build_quotient_graph, BalanceSpec, Graph, Mapping};
use crate::rng::Rng;
use crate::topology::{HierarchySpec, PeDistance, PeId};

/// How the k-partition is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GppMethod {
    StandardBisection,
    Multisection,
}

/// How blocks are placed on PEs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpmpMethod {
    Identity,
    TopDown,
    /// Identity when `k` is a power of two, top down otherwise.
    AutoPowerOfTwo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialMappingConfig {
    pub gpp_method: GppMethod,
    pub opmp_method: OpmpMethod,
    pub use_ncd_refinement: bool,
    /// Hop radius of the swap neighborhood.
    pub ncd_radius: usize,
}

impl InitialMappingConfig {
    pub const DEFAULT_RADIUS: usize = 10;

    const fn with(gpp_method: GppMethod, opmp_method: OpmpMethod, use_ncd_refinement: bool) -> Self {
        Self {
            gpp_method,
            opmp_method,
            use_ncd_refinement,
            ncd_radius: Self::DEFAULT_RADIUS,
        }
    }

    pub const BSEC: Self = Self::with(GppMethod::StandardBisection, OpmpMethod::AutoPowerOfTwo, false);
    pub const BSECN: Self = Self::with(GppMethod::StandardBisection, OpmpMethod::AutoPowerOfTwo, true);
    pub const MSECT: Self = Self::with(GppMethod::Multisection, OpmpMethod::TopDown, false);
    pub const MSECTN: Self = Self::with(GppMethod::Multisection, OpmpMethod::TopDown, true);
    pub const MSECI: Self = Self::with(GppMethod::Multisection, OpmpMethod::Identity, false);
    pub const MSECIN: Self = Self::with(GppMethod::Multisection, OpmpMethod::Identity, true);

    /// All named configurations with their short names.
    pub const NAMED: [(&'static str, Self); 6] = [
        ("Bsec", Self::BSEC),
        ("BsecN", Self::BSECN),
        ("MsecT", Self::MSECT),
        ("MsecTN", Self::MSECTN),
        ("MsecI", Self::MSECI),
        ("MsecIN", Self::MSECIN),
    ];

    /// The placement method actually used for `k` PEs.
    pub fn resolved_opmp(&self, k: usize) -> OpmpMethod {
        match self.opmp_method {
            OpmpMethod::AutoPowerOfTwo if k.is_power_of_two() => OpmpMethod::Identity,
            OpmpMethod::AutoPowerOfTwo => OpmpMethod::TopDown,
            other => other,
        }
    }
}

impl Default for InitialMappingConfig {
    fn default() -> Self {
        Self::MSECIN
    }
}

impl fmt::Display for InitialMappingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match Self::NAMED.iter().find(|(_, c)| c.gpp_method == self.gpp_method
            && c.opmp_method == self.opmp_method
            && c.use_ncd_refinement == self.use_ncd_refinement)
        {
            Some((name, _)) => f.write_str(name),
            None => write!(f, "{:?}/{:?}", self.gpp_method, self.opmp_method),
        }
    }
}

impl FromStr for InitialMappingConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::NAMED
            .iter()
            .find(|(name, _)| name.eq_ignore_ascii_case(s))
            .map(|(_, c)| c.clone())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown initial mapping configuration '{s}'")))
    }
}

/// Computes the k-partition requested by `config`.
pub fn initial_partition(
    graph: &Graph,
    spec: &HierarchySpec,
    balance: &BalanceSpec,
    method: GppMethod,
    rng: &mut Rng,
) -> Result<Vec<usize>> {
    match method {
        GppMethod::StandardBisection => recursive_bisection_partition(graph, spec.k(), balance.lmax, rng),
        GppMethod::Multisection => multisection_partition(graph, spec, balance.lmax, rng),
    }
}

/// Partition, placement and optional swap search in one go.
pub fn initial_mapping<D: PeDistance>(
    graph: &Graph,
    spec: &HierarchySpec,
    balance: &BalanceSpec,
    config: &InitialMappingConfig,
    oracle: &D,
    rng: &mut Rng,
) -> Result<Mapping> {
    let k = spec.k();
    if balance.k != k || oracle.pe_count() != k {
        return Err(Error::InvalidParameter(format!(
            "balance is for k = {}, oracle for {}, hierarchy for {k}",
            balance.k,
            oracle.pe_count()
        )));
    }
    let blocks = initial_partition(graph, spec, balance, config.gpp_method, rng)?;
    let needs_quotient = config.use_ncd_refinement || config.resolved_opmp(k) == OpmpMethod::TopDown;
    let quotient = needs_quotient.then(|| build_quotient_graph(graph, &blocks, k));
    let mut perm: Vec<PeId> = match config.resolved_opmp(k) {
        OpmpMethod::TopDown => hierarchy_top_down(quotient.as_ref().unwrap(), spec, rng)?,
        _ => identity_assignment(k),
    };
    if config.use_ncd_refinement {
        ncd_swap_refinement(&mut perm, quotient.as_ref().unwrap(), oracle, config.ncd_radius);
    }
    let assignment = blocks.into_iter().map(|b| perm[b]).collect();
    Mapping::new(graph, assignment, oracle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Epsilon;
    use crate::rng::seeded;
    use crate::topology::{build_oracle, OracleVariant};

    #[test]
    fn auto_rule() {
        assert_eq!(InitialMappingConfig::BSEC.resolved_opmp(4), OpmpMethod::Identity);
        assert_eq!(InitialMappingConfig::BSEC.resolved_opmp(6), OpmpMethod::TopDown);
        assert_eq!(InitialMappingConfig::MSECI.resolved_opmp(6), OpmpMethod::Identity);
    }

    #[test]
    fn names_round_trip() {
        for (name, cfg) in InitialMappingConfig::NAMED {
            assert_eq!(cfg.to_string(), name);
            assert_eq!(name.parse::<InitialMappingConfig>().unwrap(), cfg);
        }
        assert!("Nope".parse::<InitialMappingConfig>().is_err());
    }

    #[test]
    fn two_clique_instance_is_optimal() {
        // Two 2-cliques with heavy internal edges, joined by a light edge.
        let g = Graph::from_edges(4, &[(0, 1, 10), (2, 3, 10), (1, 2, 1)], None).unwrap();
        let spec = HierarchySpec::parse("2:2", "1:10").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Binary).unwrap();
        let balance = BalanceSpec::new(Epsilon::new(0, 1), 4, 4).unwrap();
        // Optimum: each clique inside one module, J = 2 * (10 + 10 + 10).
        for (_, cfg) in InitialMappingConfig::NAMED {
            for seed in 0..5 {
                let m = initial_mapping(&g, &spec, &balance, &cfg, &oracle, &mut seeded(seed)).unwrap();
                assert!(m.max_block_weight() <= balance.lmax);
                if cfg.gpp_method == GppMethod::Multisection {
                    assert_eq!(m.objective(), 60, "{cfg} seed {seed}");
                }
            }
        }
    }
}
