use proptest::prelude::*;

use procmap::driver::generate::{grid2d, random_geometric, random_hierarchy_test};
use procmap::driver::{
    evaluate, map_graph, metis_string, parse_mapping_str, parse_metis, parse_metis_str, read_mapping, write_mapping,
    write_metis, Preset,
};
use procmap::initial::InitialMappingConfig;
use procmap::model::{objective_j, Epsilon, Graph, Mapping};
use procmap::refinement::gain;
use procmap::topology::build_oracle;
use procmap::{HierarchySpec, OracleVariant};

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = random_geometric(500, 3);
    let graph_path = dir.path().join("g.graph");
    write_metis(&g, &graph_path).unwrap();
    assert_eq!(parse_metis(&graph_path).unwrap(), g);

    let spec = HierarchySpec::parse("2:4", "1:10").unwrap();
    let (m, _) = map_graph(&g, &spec, &Preset::Eco.config(), Epsilon::new(3, 100), 1).unwrap();
    let mapping_path = dir.path().join("g.map");
    write_mapping(m.assignment(), &mapping_path).unwrap();
    assert_eq!(read_mapping(&mapping_path, g.n(), spec.k()).unwrap(), m.assignment());
}

#[test]
fn weighted_metis_text() {
    let text = "% two weighted nodes\n3 2 11\n2 2 5\n1 1 5 3 7\n4 2 7\n";
    let g = parse_metis_str(text, "inline").unwrap();
    assert_eq!(g.node_weights(), &[2, 1, 4]);
    assert_eq!(g.total_edge_weight(), 12);
    assert_eq!(parse_metis_str(&metis_string(&g), "again").unwrap(), g);
    assert!(parse_metis_str("2 5\n2\n1\n", "bad").is_err());
    assert!(parse_mapping_str("0\n7\n", 2, 4, "bad").is_err());
}

#[test]
fn evaluation_agrees_with_pipeline() {
    let g = grid2d(40, 40);
    let spec = HierarchySpec::parse("4:4:2", "1:10:100").unwrap();
    for preset in Preset::ALL {
        let (m, stats) = map_graph(&g, &spec, &preset.config(), Epsilon::new(3, 100), 2).unwrap();
        let report = evaluate(&g, m.assignment(), &spec, Epsilon::new(3, 100)).unwrap();
        assert_eq!(report.objective, stats.objective, "{preset}");
        assert!(report.is_balanced(), "{preset}");
        let total: i64 = report.level_traffic.iter().sum::<i64>() + report.intra_pe;
        assert_eq!(total, 2 * g.total_edge_weight());
    }
}

#[test]
fn every_oracle_gives_the_same_objective() {
    let g = random_geometric(2000, 8);
    let spec = HierarchySpec::parse("4:3:2", "1:10:100").unwrap();
    let mut results = Vec::new();
    for oracle in OracleVariant::ALL {
        let mut config = Preset::Strong.config();
        config.oracle = oracle;
        let (m, _) = map_graph(&g, &spec, &config, Epsilon::new(3, 100), 5).unwrap();
        results.push(m);
    }
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn planted_structure_is_recovered_well() {
    let spec = HierarchySpec::parse("4:4", "1:10").unwrap();
    let (g, planted) = random_hierarchy_test(&spec, 50, 8, 4);
    let oracle = build_oracle(&spec, OracleVariant::Binary).unwrap();
    let reference = objective_j(&g, &planted, &oracle).unwrap();
    let (m, _) = map_graph(&g, &spec, &Preset::Strong.config(), Epsilon::new(3, 100), 1).unwrap();
    // The planted mapping is a good but not necessarily optimal solution.
    assert!((m.objective() as f64) < 1.25 * reference as f64, "{} vs {reference}", m.objective());
}

#[test]
fn all_initial_configurations_are_feasible() {
    let g = random_geometric(3000, 6);
    for (hier, k) in [("4:4:2", 32), ("4:3:2", 24)] {
        let spec = HierarchySpec::parse(hier, "1:10:100").unwrap();
        assert_eq!(spec.k(), k);
        for (name, initial) in InitialMappingConfig::NAMED {
            let mut config = Preset::Fast.config();
            config.initial = initial;
            let (m, stats) = map_graph(&g, &spec, &config, Epsilon::new(3, 100), 3).unwrap();
            assert!(stats.balance_ratio <= 1.0, "{name} k={k}");
            assert_eq!(m.k(), k);
        }
    }
}

#[test]
fn infeasible_inputs_are_rejected() {
    let g = Graph::from_edges(3, &[(0, 1, 1)], Some(vec![1, 1, 10])).unwrap();
    let spec = HierarchySpec::parse("2", "1").unwrap();
    assert!(map_graph(&g, &spec, &Preset::Fast.config(), Epsilon::new(3, 100), 0).is_err());
}

fn small_graph() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    (3usize..24).prop_flat_map(|n| {
        let edges = prop::collection::btree_map((0..n, 0..n), 1i64..20, 0..3 * n);
        let assignment = prop::collection::vec(0usize..8, n);
        (Just(n), edges, assignment).prop_map(|(n, edges, assignment)| {
            let list: Vec<_> = edges
                .into_iter()
                .filter(|((u, v), _)| u < v)
                .map(|((u, v), w)| (u, v, w))
                .collect();
            (Graph::from_edges(n, &list, None).unwrap(), assignment)
        })
    })
}

proptest! {
    #[test]
    fn moving_changes_objective_by_twice_the_gain((g, assignment) in small_graph(), v in 0usize..24, to in 0usize..8) {
        let spec = HierarchySpec::parse("2:2:2", "1:4:9").unwrap();
        let oracle = build_oracle(&spec, OracleVariant::Binary).unwrap();
        let v = v % g.n();
        let mut m = Mapping::new(&g, assignment, &oracle).unwrap();
        let before = m.objective();
        let expected = gain(&g, &m, &oracle, v, to);
        let mut moved = m.assignment().to_vec();
        moved[v] = to;
        let after = objective_j(&g, &moved, &oracle).unwrap();
        prop_assert_eq!(before - after, 2 * expected);
        prop_assert_eq!(m.move_node(&g, &oracle, v, to), expected);
        prop_assert_eq!(m.objective(), after);
    }
}
