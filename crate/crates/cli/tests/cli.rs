use std::path::Path;
use std::process::{Command, Output};

fn procmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_procmap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_map_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("grid.graph");
    let mapping = dir.path().join("grid.map");

    let out = procmap(&["gen", "grid2d", "--width", "30", "--height", "20", "--output", path(&graph)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let machine = ["--hierarchy", "4:2", "--distances", "1:10"];
    let mut args = vec!["map", "--graph", path(&graph), "--preconfig", "strong", "--seed", "3", "--output", path(&mapping)];
    args.extend(machine);
    let out = procmap(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let j_line = stderr.lines().find(|l| l.starts_with("J: ")).expect("objective reported").to_string();

    let mut args = vec!["eval", "--graph", path(&graph), "--mapping", path(&mapping)];
    args.extend(machine);
    let out = procmap(&args);
    assert!(out.status.success());
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.lines().any(|l| l == j_line), "{report}");
    assert!(report.contains("balanced: true"));
}

#[test]
fn mapping_goes_to_stdout_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.graph");
    std::fs::write(&graph, "4 3\n2\n1 3\n2 4\n3\n").unwrap();
    let out = procmap(&["map", "--graph", path(&graph), "--hierarchy", "2", "--distances", "1", "--imbalance", "0"]);
    assert!(out.status.success());
    let lines: Vec<_> = String::from_utf8_lossy(&out.stdout).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], lines[1]);
    assert_eq!(lines[2], lines[3]);
    assert_ne!(lines[0], lines[2]);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.graph");
    std::fs::write(&graph, "3 5\n2\n1\n\n").unwrap();
    let out = procmap(&["map", "--graph", path(&graph), "--hierarchy", "2", "--distances", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = procmap(&["map", "--graph", path(&graph), "--hierarchy", "2:2", "--distances", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_writes_three_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("rgg.graph");
    let out = procmap(&["gen", "random-geometric", "--nodes", "2000", "--seed", "1", "--output", path(&graph)]);
    assert!(out.status.success());
    let csv = dir.path().join("runs.csv");
    let out = procmap(&[
        "bench", "--graph", path(&graph), "--ks", "8,12", "--presets", "fastest,eco", "--seeds", "1,2",
        "--hierarchy-prefix", "4", "--distances", "1:10", "--output", path(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = std::fs::read_to_string(&csv).unwrap();
    assert!(runs.starts_with("instance,k,preset,seed,J,runtime_s,balance_ratio"));
    // 2 ks x (2 presets + baseline) x 2 seeds, plus the header.
    assert_eq!(runs.lines().count(), 13);
    assert!(dir.path().join("runs.summary.csv").exists());
    assert!(dir.path().join("runs.profile.csv").exists());
}
