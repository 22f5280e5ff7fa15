//! Command-line front end: map, evaluate, generate and benchmark.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use procmap::driver::bench::{
    performance_profile, run_bench, summarize, write_profile_csv, write_rows_csv, write_summary_csv, BenchConfig,
    BenchInstance, HierarchyTemplate, BASELINE,
};
use procmap::driver::generate::{grid2d, random_geometric, random_hierarchy_test};
use procmap::driver::{evaluate, map_graph, parse_metis, read_mapping, write_mapping, write_metis, Preset};
use procmap::initial::InitialMappingConfig;
use procmap::model::{parse_epsilon, Epsilon};
use procmap::{HierarchySpec, OracleVariant};

#[derive(Parser)]
#[command(name = "procmap", version, about = "Map communication graphs onto hierarchical machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a mapping for a METIS graph.
    Map(MapArgs),
    /// Report the objective, balance and per-level traffic of a mapping.
    Eval(EvalArgs),
    /// Write a synthetic METIS graph.
    Gen(GenArgs),
    /// Run presets over instances and seeds and write CSV results.
    Bench(BenchArgs),
}

#[derive(Args)]
struct MachineArgs {
    /// Module arities from the lowest level up, e.g. 4:16:2.
    #[arg(long)]
    hierarchy: String,
    /// Communication cost per level, e.g. 1:10:100.
    #[arg(long)]
    distances: String,
    /// Allowed imbalance as a decimal or fraction.
    #[arg(long, default_value = "0.03")]
    imbalance: String,
}

impl MachineArgs {
    fn spec(&self) -> Result<HierarchySpec> {
        Ok(HierarchySpec::parse(&self.hierarchy, &self.distances)?)
    }

    fn epsilon(&self) -> Result<Epsilon> {
        Ok(parse_epsilon(&self.imbalance)?)
    }
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    machine: MachineArgs,
    /// fastest, fast, eco or strong.
    #[arg(long, default_value = "eco")]
    preconfig: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the mapping; defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Distance oracle: matrix, division, stored-division or binary.
    #[arg(long, default_value = "binary")]
    oracle: String,
    /// Hop radius of the block swap search.
    #[arg(long, default_value_t = 10)]
    ncd_radius: usize,
    /// Override the initial mapping (Bsec, BsecN, MsecT, MsecTN, MsecI, MsecIN).
    #[arg(long)]
    initial: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    mapping: PathBuf,
    #[command(flatten)]
    machine: MachineArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Grid2d,
    RandomGeometric,
    RandomHierarchyTest,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Grid width.
    #[arg(long, default_value_t = 64)]
    width: usize,
    /// Grid height.
    #[arg(long, default_value_t = 64)]
    height: usize,
    /// Node count of a random geometric graph.
    #[arg(long, default_value_t = 1 << 14)]
    nodes: usize,
    /// Planted hierarchy for the hierarchy test generator.
    #[arg(long, default_value = "4:4")]
    hierarchy: String,
    #[arg(long, default_value = "1:10")]
    distances: String,
    #[arg(long, default_value_t = 32)]
    nodes_per_pe: usize,
    #[arg(long, default_value_t = 6)]
    degree: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// METIS graphs to benchmark (repeatable).
    #[arg(long = "graph", required = true)]
    graphs: Vec<PathBuf>,
    /// Comma-separated PE counts.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "fastest,fast,eco,strong")]
    presets: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    /// Fixed lower levels of the hierarchy; the top arity is k / product.
    #[arg(long, default_value = "4:16")]
    hierarchy_prefix: String,
    #[arg(long, default_value = "1:10:100")]
    distances: String,
    #[arg(long, default_value = "0.03")]
    imbalance: String,
    #[arg(long, default_value = "binary")]
    oracle: String,
    /// Skip the greedy baseline rows.
    #[arg(long)]
    no_baseline: bool,
    /// Raw per-run CSV; summary and profile files are written next to it.
    #[arg(long)]
    output: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Map(a) => cmd_map(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_map(a: MapArgs) -> Result<()> {
    let graph = parse_metis(&a.graph)?;
    let spec = a.machine.spec()?;
    let preset: Preset = a.preconfig.parse()?;
    let mut config = preset.config();
    config.oracle = a.oracle.parse::<OracleVariant>()?;
    if let Some(name) = &a.initial {
        config.initial = name.parse::<InitialMappingConfig>()?;
    }
    config.initial.ncd_radius = a.ncd_radius;
    let (mapping, stats) = map_graph(&graph, &spec, &config, a.machine.epsilon()?, a.seed)?;
    match &a.output {
        Some(path) => write_mapping(mapping.assignment(), path)?,
        None => procmap::driver::write_mapping_to(mapping.assignment(), io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    writeln!(err, "J: {}", stats.objective)?;
    writeln!(err, "k: {}", stats.k)?;
    writeln!(err, "balance ratio: {:.6}", stats.balance_ratio)?;
    writeln!(err, "levels: {}", stats.levels)?;
    writeln!(
        err,
        "runtime: {:.3}s (coarsen {:.3}s, initial {:.3}s, refine {:.3}s)",
        stats.runtime_s, stats.phase_coarsen_s, stats.phase_initial_s, stats.phase_refine_s
    )?;
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let graph = parse_metis(&a.graph)?;
    let spec = a.machine.spec()?;
    let assignment = read_mapping(&a.mapping, graph.n(), spec.k())?;
    let report = evaluate(&graph, &assignment, &spec, a.machine.epsilon()?)?;
    print!("{report}");
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let graph = match a.kind {
        GenKind::Grid2d => grid2d(a.width, a.height),
        GenKind::RandomGeometric => random_geometric(a.nodes, a.seed),
        GenKind::RandomHierarchyTest => {
            let spec = HierarchySpec::parse(&a.hierarchy, &a.distances)?;
            random_hierarchy_test(&spec, a.nodes_per_pe, a.degree, a.seed).0
        }
    };
    write_metis(&graph, &a.output)?;
    eprintln!("wrote {} nodes, {} edges to {}", graph.n(), graph.m(), a.output.display());
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let presets = a
        .presets
        .iter()
        .map(|p| p.parse::<Preset>())
        .collect::<Result<Vec<_>, _>>()?;
    if a.ks.is_empty() || a.seeds.is_empty() {
        bail!("need at least one k and one seed");
    }
    let instances = a
        .graphs
        .iter()
        .map(|p| {
            let graph = parse_metis(p)?;
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(BenchInstance { name, graph })
        })
        .collect::<Result<Vec<_>>>()?;
    let config = BenchConfig {
        ks: a.ks,
        presets,
        seeds: a.seeds,
        epsilon: parse_epsilon(&a.imbalance)?,
        template: HierarchyTemplate::parse(&a.hierarchy_prefix, &a.distances)?,
        oracle: a.oracle.parse()?,
        baseline: !a.no_baseline,
    };
    let rows = run_bench(&instances, &config, &mut |row| match (&row.objective, &row.error) {
        (Some(j), _) => eprintln!(
            "{} k={} {} seed={} J={} {:.3}s",
            row.instance, row.k, row.algorithm, row.seed, j, row.runtime_s
        ),
        (None, Some(e)) => eprintln!("{} k={} {} seed={} failed: {e}", row.instance, row.k, row.algorithm, row.seed),
        (None, None) => {}
    });
    let file = fs::File::create(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
    write_rows_csv(&rows, io::BufWriter::new(file))?;
    let summary = summarize(&rows, BASELINE);
    write_summary_csv(&summary, io::BufWriter::new(fs::File::create(sibling(&a.output, "summary"))?))?;
    write_profile_csv(
        &performance_profile(&rows),
        io::BufWriter::new(fs::File::create(sibling(&a.output, "profile"))?),
    )?;
    for s in &summary {
        match s.improvement_pct {
            Some(p) => println!("k={} {}: geomean J {:.1}, improvement {:+.2}%", s.k, s.algorithm, s.geomean_objective, p),
            None => println!("k={} {}: geomean J {:.1}", s.k, s.algorithm, s.geomean_objective),
        }
    }
    Ok(())
}
