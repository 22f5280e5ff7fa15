//! Seeded benchmark runs and their aggregation: arithmetic means over seeds,
//! geometric means over instances, improvements over a baseline, and
//! runtime ratios for performance profiles.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::initial::muller_merbach_greedy;
use crate::model::{build_quotient_graph, Epsilon, Graph, Mapping, Weight};
use crate::topology::{build_oracle, HierarchySpec, OracleVariant};

use super::{map_graph, Preset};

/// Name of the baseline algorithm in rows and summaries.
pub const BASELINE: &str = "muller-merbach";

/// Header of the per-run CSV.
pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "k",
    "preset",
    "seed",
    "J",
    "runtime_s",
    "balance_ratio",
    "phase_coarsen_s",
    "phase_initial_s",
    "phase_refine_s",
];

/// Hierarchy `a_1:...:a_m:r` with fixed costs, where the last arity `r` is
/// chosen so that the product equals `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyTemplate {
    pub prefix: Vec<usize>,
    pub costs: Vec<Weight>,
}

impl HierarchyTemplate {
    /// Parses `"4:16"` and `"1:10:100"`; the cost list has one more entry.
    pub fn parse(prefix: &str, costs: &str) -> Result<Self> {
        let prefix = if prefix.trim().is_empty() {
            Vec::new()
        } else {
            prefix
                .split(':')
                .map(|t| t.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad arity '{t}'"))))
                .collect::<Result<Vec<usize>>>()?
        };
        let costs = costs
            .split(':')
            .map(|t| t.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad cost '{t}'"))))
            .collect::<Result<Vec<Weight>>>()?;
        if costs.len() != prefix.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "template with {} fixed levels needs {} costs, got {}",
                prefix.len(),
                prefix.len() + 1,
                costs.len()
            )));
        }
        Ok(Self { prefix, costs })
    }

    pub fn spec_for(&self, k: usize) -> Result<HierarchySpec> {
        let base: usize = self.prefix.iter().product();
        if base == 0 || k % base != 0 {
            return Err(Error::InvalidParameter(format!("k = {k} is not a multiple of {base}")));
        }
        let mut arities = self.prefix.clone();
        arities.push(k / base);
        HierarchySpec::new(arities, self.costs.clone())
    }
}

#[derive(Clone, Debug)]
pub struct BenchInstance {
    pub name: String,
    pub graph: Graph,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub ks: Vec<usize>,
    pub presets: Vec<Preset>,
    pub seeds: Vec<u64>,
    pub epsilon: Epsilon,
    pub template: HierarchyTemplate,
    pub oracle: OracleVariant,
    /// Also run the greedy baseline on the partition of the fastest preset.
    pub baseline: bool,
}

/// One run. `objective` is `None` when the run failed.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub k: usize,
    pub algorithm: String,
    pub seed: u64,
    pub objective: Option<Weight>,
    pub runtime_s: f64,
    pub balance_ratio: f64,
    pub phase_coarsen_s: f64,
    pub phase_initial_s: f64,
    pub phase_refine_s: f64,
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(instance: &str, k: usize, algorithm: &str, seed: u64, error: String) -> Self {
        Self {
            instance: instance.to_string(),
            k,
            algorithm: algorithm.to_string(),
            seed,
            objective: None,
            runtime_s: 0.0,
            balance_ratio: 0.0,
            phase_coarsen_s: 0.0,
            phase_initial_s: 0.0,
            phase_refine_s: 0.0,
            error: Some(error),
        }
    }
}

/// Places the blocks of `partition` with the greedy baseline.
pub fn baseline_mapping(graph: &Graph, partition: &[usize], spec: &HierarchySpec, oracle: OracleVariant) -> Result<Mapping> {
    let oracle = build_oracle(spec, oracle)?;
    let quotient = build_quotient_graph(graph, partition, spec.k());
    let perm = muller_merbach_greedy(&quotient, &oracle);
    let assignment = partition.iter().map(|&b| perm[b]).collect();
    Mapping::new(graph, assignment, &oracle)
}

/// Runs every (instance, k, algorithm, seed) combination in order. Failures
/// are recorded in their row and do not stop the run.
pub fn run_bench(instances: &[BenchInstance], config: &BenchConfig, progress: &mut dyn FnMut(&BenchRow)) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    let mut emit = |row: BenchRow, rows: &mut Vec<BenchRow>| {
        progress(&row);
        rows.push(row);
    };
    for inst in instances {
        for &k in &config.ks {
            let spec = match config.template.spec_for(k) {
                Ok(s) => s,
                Err(e) => {
                    for p in &config.presets {
                        emit(BenchRow::failed(&inst.name, k, p.name(), 0, e.to_string()), &mut rows);
                    }
                    continue;
                }
            };
            for &seed in &config.seeds {
                for &preset in &config.presets {
                    let mut pipeline = preset.config();
                    pipeline.oracle = config.oracle;
                    let row = match map_graph(&inst.graph, &spec, &pipeline, config.epsilon, seed) {
                        Ok((_, s)) => BenchRow {
                            instance: inst.name.clone(),
                            k,
                            algorithm: preset.name().to_string(),
                            seed,
                            objective: Some(s.objective),
                            runtime_s: s.runtime_s,
                            balance_ratio: s.balance_ratio,
                            phase_coarsen_s: s.phase_coarsen_s,
                            phase_initial_s: s.phase_initial_s,
                            phase_refine_s: s.phase_refine_s,
                            error: None,
                        },
                        Err(e) => BenchRow::failed(&inst.name, k, preset.name(), seed, e.to_string()),
                    };
                    emit(row, &mut rows);
                }
                if config.baseline {
                    emit(baseline_row(inst, k, &spec, config, seed), &mut rows);
                }
            }
        }
    }
    rows
}

fn baseline_row(inst: &BenchInstance, k: usize, spec: &HierarchySpec, config: &BenchConfig, seed: u64) -> BenchRow {
    let start = Instant::now();
    let mut pipeline = Preset::Fastest.config();
    pipeline.oracle = config.oracle;
    let result = map_graph(&inst.graph, spec, &pipeline, config.epsilon, seed).and_then(|(partition, stats)| {
        let t = Instant::now();
        let mapping = baseline_mapping(&inst.graph, partition.assignment(), spec, config.oracle)?;
        Ok((mapping, stats, t.elapsed().as_secs_f64()))
    });
    match result {
        Ok((mapping, stats, placement)) => BenchRow {
            instance: inst.name.clone(),
            k,
            algorithm: BASELINE.to_string(),
            seed,
            objective: Some(mapping.objective()),
            runtime_s: start.elapsed().as_secs_f64(),
            balance_ratio: mapping.max_block_weight() as f64 / stats.lmax.max(1) as f64,
            phase_coarsen_s: stats.phase_coarsen_s,
            phase_initial_s: stats.phase_initial_s + placement,
            phase_refine_s: 0.0,
            error: None,
        },
        Err(e) => BenchRow::failed(&inst.name, k, BASELINE, seed, e.to_string()),
    }
}

pub fn write_rows_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in rows {
        let num = |x: f64| if r.objective.is_some() { format!("{x:.6}") } else { String::new() };
        w.write_record([
            r.instance.clone(),
            r.k.to_string(),
            r.algorithm.clone(),
            r.seed.to_string(),
            r.objective.map(|j| j.to_string()).unwrap_or_default(),
            num(r.runtime_s),
            num(r.balance_ratio),
            num(r.phase_coarsen_s),
            num(r.phase_initial_s),
            num(r.phase_refine_s),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

/// Per-(k, algorithm) aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub k: usize,
    pub algorithm: String,
    pub instances: usize,
    pub geomean_objective: f64,
    pub geomean_runtime_s: f64,
    /// `(baseline / algorithm - 1) * 100` on the geometric means.
    pub improvement_pct: Option<f64>,
    pub failed_runs: usize,
}

pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

/// `(sigma_b / sigma_a - 1) * 100`: how much better `a` is than `b`.
pub fn improvement_pct(a: f64, b: f64) -> f64 {
    (b / a - 1.0) * 100.0
}

/// Arithmetic means over seeds per (instance, k, algorithm).
fn seed_means(rows: &[BenchRow]) -> BTreeMap<(usize, String, String), (f64, f64)> {
    let mut acc: BTreeMap<(usize, String, String), (f64, f64, usize)> = BTreeMap::new();
    for r in rows {
        if let Some(j) = r.objective {
            let e = acc.entry((r.k, r.algorithm.clone(), r.instance.clone())).or_default();
            e.0 += j as f64;
            e.1 += r.runtime_s;
            e.2 += 1;
        }
    }
    acc.into_iter()
        .map(|(key, (j, t, c))| (key, (j / c as f64, t / c as f64)))
        .collect()
}

/// Aggregates rows: mean over seeds, then geometric mean over instances.
/// Zero objectives are clamped to 1 so the geometric mean stays defined.
pub fn summarize(rows: &[BenchRow], baseline: &str) -> Vec<SummaryRow> {
    let means = seed_means(rows);
    let mut groups: BTreeMap<(usize, String), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for ((k, alg, _), (j, t)) in &means {
        let g = groups.entry((*k, alg.clone())).or_default();
        g.0.push(j.max(1.0));
        g.1.push(t.max(1e-9));
    }
    let mut failed: BTreeMap<(usize, String), usize> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.objective.is_none()) {
        *failed.entry((r.k, r.algorithm.clone())).or_default() += 1;
        groups.entry((r.k, r.algorithm.clone())).or_default();
    }
    let geo: BTreeMap<(usize, String), f64> = groups
        .iter()
        .map(|(key, (j, _))| (key.clone(), geometric_mean(j)))
        .collect();
    let mut order: Vec<(usize, String)> = groups.keys().cloned().collect();
    let rank = |alg: &str| -> usize {
        Preset::ALL
            .iter()
            .position(|p| p.name() == alg)
            .unwrap_or(Preset::ALL.len())
    };
    order.sort_by(|a, b| a.0.cmp(&b.0).then(rank(&a.1).cmp(&rank(&b.1))).then(a.1.cmp(&b.1)));
    order
        .into_iter()
        .map(|key| {
            let (j, t) = &groups[&key];
            let g = geo[&key];
            let improvement = geo
                .get(&(key.0, baseline.to_string()))
                .filter(|b| b.is_finite() && g.is_finite())
                .map(|&b| improvement_pct(g, b));
            SummaryRow {
                k: key.0,
                instances: j.len(),
                geomean_objective: g,
                geomean_runtime_s: geometric_mean(t),
                improvement_pct: improvement,
                failed_runs: failed.get(&key).copied().unwrap_or(0),
                algorithm: key.1,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "k",
        "preset",
        "instances",
        "geomean_J",
        "geomean_runtime_s",
        "improvement_pct",
        "failed_runs",
    ])
    .map_err(csv_error)?;
    for s in summary {
        w.write_record([
            s.k.to_string(),
            s.algorithm.clone(),
            s.instances.to_string(),
            format!("{:.6}", s.geomean_objective),
            format!("{:.6}", s.geomean_runtime_s),
            s.improvement_pct.map(|p| format!("{p:.6}")).unwrap_or_default(),
            s.failed_runs.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean runtime of each algorithm on one (instance, k), relative to the
/// slowest algorithm there.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileRow {
    pub instance: String,
    pub k: usize,
    pub algorithm: String,
    pub mean_runtime_s: f64,
    pub ratio_to_slowest: f64,
}

pub fn performance_profile(rows: &[BenchRow]) -> Vec<ProfileRow> {
    let means = seed_means(rows);
    let mut slowest: BTreeMap<(String, usize), f64> = BTreeMap::new();
    for ((k, _, inst), (_, t)) in &means {
        let s = slowest.entry((inst.clone(), *k)).or_insert(0.0);
        *s = s.max(*t);
    }
    let mut out: Vec<ProfileRow> = means
        .into_iter()
        .map(|((k, alg, inst), (_, t))| {
            let s = slowest[&(inst.clone(), k)];
            ProfileRow {
                ratio_to_slowest: if s > 0.0 { t / s } else { 1.0 },
                instance: inst,
                k,
                algorithm: alg,
                mean_runtime_s: t,
            }
        })
        .collect();
    out.sort_by(|a, b| (&a.instance, a.k, &a.algorithm).cmp(&(&b.instance, b.k, &b.algorithm)));
    out
}

pub fn write_profile_csv<W: Write>(profile: &[ProfileRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "k", "preset", "mean_runtime_s", "ratio_to_slowest"])
        .map_err(csv_error)?;
    for p in profile {
        w.write_record([
            p.instance.clone(),
            p.k.to_string(),
            p.algorithm.clone(),
            format!("{:.6}", p.mean_runtime_s),
            format!("{:.6}", p.ratio_to_slowest),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::generate::grid2d;

    fn row(instance: &str, alg: &str, seed: u64, j: Weight, t: f64) -> BenchRow {
        BenchRow {
            instance: instance.into(),
            k: 4,
            algorithm: alg.into(),
            seed,
            objective: Some(j),
            runtime_s: t,
            balance_ratio: 1.0,
            phase_coarsen_s: 0.0,
            phase_initial_s: 0.0,
            phase_refine_s: 0.0,
            error: None,
        }
    }

    #[test]
    fn template_specs() {
        let t = HierarchyTemplate::parse("4:16", "1:10:100").unwrap();
        assert_eq!(t.spec_for(128).unwrap().arities(), &[4, 16, 2]);
        assert!(t.spec_for(100).is_err());
        assert!(HierarchyTemplate::parse("4", "1").is_err());
    }

    #[test]
    fn aggregation_math() {
        let rows = vec![
            row("a", "fast", 1, 10, 1.0),
            row("a", "fast", 2, 30, 3.0),
            row("b", "fast", 1, 80, 2.0),
            row("a", BASELINE, 1, 40, 0.5),
            row("b", BASELINE, 1, 160, 0.5),
        ];
        let s = summarize(&rows, BASELINE);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].algorithm, "fast");
        // Means over seeds: a -> 20, b -> 80; geometric mean 40.
        assert!((s[0].geomean_objective - 40.0).abs() < 1e-9);
        assert!((s[1].geomean_objective - 80.0).abs() < 1e-9);
        assert!((s[0].improvement_pct.unwrap() - 100.0).abs() < 1e-9);
        assert!(s[1].improvement_pct.unwrap().abs() < 1e-12);

        let p = performance_profile(&rows);
        let fast_a = p.iter().find(|r| r.instance == "a" && r.algorithm == "fast").unwrap();
        assert!((fast_a.ratio_to_slowest - 1.0).abs() < 1e-12);
        let base_a = p.iter().find(|r| r.instance == "a" && r.algorithm == BASELINE).unwrap();
        assert!((base_a.ratio_to_slowest - 0.25).abs() < 1e-12);
    }

    #[test]
    fn single_run_gives_one_row_and_one_summary() {
        let config = BenchConfig {
            ks: vec![4],
            presets: vec![Preset::Fast],
            seeds: vec![1],
            epsilon: Epsilon::new(3, 100),
            template: HierarchyTemplate::parse("2", "1:10").unwrap(),
            oracle: OracleVariant::Binary,
            baseline: false,
        };
        let inst = BenchInstance {
            name: "grid".into(),
            graph: grid2d(8, 8),
        };
        let rows = run_bench(&[inst], &config, &mut |_| {});
        assert_eq!(rows.len(), 1);
        assert_eq!(summarize(&rows, BASELINE).len(), 1);
        let mut buf = Vec::new();
        write_rows_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn failures_are_recorded() {
        let config = BenchConfig {
            ks: vec![3],
            presets: vec![Preset::Fast],
            seeds: vec![1],
            epsilon: Epsilon::new(3, 100),
            template: HierarchyTemplate::parse("2", "1:10").unwrap(),
            oracle: OracleVariant::Binary,
            baseline: true,
        };
        let inst = BenchInstance {
            name: "grid".into(),
            graph: grid2d(4, 4),
        };
        let rows = run_bench(&[inst], &config, &mut |_| {});
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error.is_some());
        let s = summarize(&rows, BASELINE);
        assert_eq!(s[0].failed_runs, 1);
    }
}
