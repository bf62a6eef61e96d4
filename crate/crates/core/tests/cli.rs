use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn finstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finstab")).args(args).env_remove("FINSTAB_SEED").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

const SMALL_GRID: &str = "\
topologies = er3
models = homog
mechanisms = coord,idio
n = 30
e_over_i = 1,2
phi = 0.5
k = 0.1
replicates = 3
";

#[test]
fn generate_single_node() {
    let out = finstab(&["generate", "--topology", "er3", "--n", "1", "--seed", "4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("# finstab "));
    assert_eq!(data(&text), vec!["1 0"]);
}

#[test]
fn generate_arborescence_edge_count() {
    let out = finstab(&["generate", "--topology", "arb", "--n", "50", "--seed", "4"]);
    let text = stdout(&out);
    let lines = data(&text);
    assert_eq!(lines[0], "50 49");
    assert_eq!(lines.len() - 1, 49);
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for p in [&a, &b] {
        let out =
            finstab(&["generate", "--topology", "sf6", "--n", "80", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn seed_falls_back_to_environment() {
    let run_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_finstab"))
            .args(["generate", "--topology", "er6", "--n", "40"])
            .env("FINSTAB_SEED", seed)
            .output()
            .unwrap()
    };
    let flag = finstab(&["generate", "--topology", "er6", "--n", "40", "--seed", "5"]);
    assert_eq!(stdout(&run_env("5")), stdout(&flag));
    assert_ne!(stdout(&run_env("6")), stdout(&flag));
}

fn two_node_fixture(dir: &Path) -> String {
    let path = dir.join("two.txt");
    fs::write(&path, "2 1\n0 1\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_two_node_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = two_node_fixture(dir.path());
    // I = m = 1, so --ei 4 gives E = 4; K = 0.5 shocks the borrower.
    let args =
        ["simulate", "--fixture", &fixture, "--ei", "4", "--gamma", "0.25", "--phi", "0.5", "--k", "0.5", "--header"];
    let out = finstab(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed,n,topology,mechanism,k,phi,gamma,e_over_i,dead,rounds");
    assert_eq!(lines[1], "0,2,fixture,coord,0.5,0.5,0.25,4,2,2");

    let mut high = args.to_vec();
    high[6] = "0.45";
    let text = stdout(&finstab(&high));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[8], "1");
}

#[test]
fn simulate_parameter_errors() {
    let base = ["simulate", "--topology", "er3", "--n", "50", "--permissive"];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        code(&finstab(&a))
    };
    assert_eq!(with(&[]), 0);
    assert_eq!(with(&["--phi", "0.5", "--gamma", "0.5"]), 2);
    assert_eq!(with(&["--phi", "0.3", "--gamma", "0.45"]), 2);
    assert_eq!(with(&["--k", "0.005"]), 2);
    assert_eq!(with(&["--topology", "tree"]), 2);
}

#[test]
fn simulate_strict_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = two_node_fixture(dir.path());
    // E = 2 leaves the lender with zero effective external asset.
    let out = finstab(&["simulate", "--fixture", &fixture, "--ei", "2", "--k", "0.5"]);
    assert_eq!(code(&out), 3);
    let out = finstab(&["simulate", "--fixture", &fixture, "--ei", "2", "--k", "0.5", "--permissive"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("graph.txt");
    let out = finstab(&["generate", "--topology", "er3", "--n", "10", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&finstab(&["analyze", missing.to_str().unwrap()])), 4);
}

#[test]
fn empty_grid_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    fs::write(&grid, "").unwrap();
    let out = finstab(&["sweep", "--grid", grid.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

fn sweep_into(dir: &Path, grid: &Path, jobs: &str) {
    let out = finstab(&[
        "sweep",
        "--grid",
        grid.to_str().unwrap(),
        "--seed",
        "3",
        "--jobs",
        jobs,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    fs::write(&grid, SMALL_GRID).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    sweep_into(&a, &grid, "0");
    sweep_into(&b, &grid, "1");
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "cells.csv"));
    assert!(names.len() >= 8);
    for name in names {
        let x = fs::read(a.join(&name)).unwrap();
        let y = fs::read(b.join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
        assert!(String::from_utf8(x).unwrap().starts_with("# finstab "));
    }
    // 2 mechanisms x 2 E/I x 9 gamma x 1 K
    let cells = fs::read_to_string(a.join("cells.csv")).unwrap();
    assert_eq!(data(&cells).len(), 1 + 36);
}

#[test]
fn analyze_reproduces_sweep_tables() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    fs::write(&grid, SMALL_GRID).unwrap();
    let swept = dir.path().join("s");
    sweep_into(&swept, &grid, "0");
    let again = dir.path().join("t");
    let out = finstab(&["analyze", swept.join("cells.csv").to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for name in ["connectivity.csv", "coordinated_vs_idiosyncratic.csv", "lambda.csv"] {
        assert_eq!(fs::read(swept.join(name)).unwrap(), fs::read(again.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn series_files_have_one_line_per_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    fs::write(&grid, SMALL_GRID).unwrap();
    let swept = dir.path().join("s");
    sweep_into(&swept, &grid, "0");
    let cells = swept.join("cells.csv");
    let plots = dir.path().join("plots");
    let out = finstab(&[
        "series",
        cells.to_str().unwrap(),
        "--free",
        "gamma",
        "--ei",
        "1",
        "--mech",
        "coord",
        "--out",
        plots.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(plots.join("series_gamma_er3_homog_coord.txt")).unwrap();
    let lines = data(&text);
    assert_eq!(lines.len(), 9);
    let xs: Vec<f64> = lines.iter().map(|l| l.split_whitespace().next().unwrap().parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[0] < w[1]));

    let out = finstab(&["series", cells.to_str().unwrap(), "--ei", "7", "--out", plots.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("available"));
}
