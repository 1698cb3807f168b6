use std::path::Path;
use std::process::{Command, Output};

use cqed_gates_cli::{run, Experiment, ExperimentConfig, RawConfig, Table};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim"))
        .args(args)
        .output()
        .expect("sim runs")
}

fn config(experiment: Experiment, pairs: &[(&str, &str)]) -> ExperimentConfig {
    let mut raw = RawConfig::default();
    for (k, v) in pairs {
        raw.set(k, *v).unwrap();
    }
    ExperimentConfig::resolve(experiment, &raw).unwrap()
}

fn column(table: &Table, name: &str) -> Vec<f64> {
    table
        .column(name)
        .unwrap_or_else(|| panic!("no column {name} in {:?}", table.headers))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn writes_stamp_then_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("protocol.csv");
    let status = sim(&["protocol", "--eta", "0.8", "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "# config: experiment=protocol g=3 gamma-s=1 T=210 samples=4096 eta=0.8 alpha-sq=0.1"
    );
    assert_eq!(
        lines.next().unwrap(),
        "network,detector,probability,heralded_probability,fidelity,cpf_deviation"
    );
    assert_eq!(lines.count(), 6);
}

#[test]
fn stdout_when_no_output_path() {
    let out = sim(&["reflectance", "--samples", "5", "--N", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# config: experiment=reflectance g=3 gamma-s=1 N=1 samples=5\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# loss curve\ng-range = 2..3\ng-step = 1\nN-range = 2..2\nT = 100\n").unwrap();
    let out = sim(&["fig3c", "--config", path.to_str().unwrap(), "--T", "210"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("T=210 N-range=2..2 g-range=2..3 g-step=1"), "{text}");
    // g = 3 row carries the empirical value
    let row = text.lines().nth(3).unwrap();
    let emp: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((emp - 0.063158).abs() < 1e-6);
}

fn expect_exit(args: &[&str], code: i32, mention: &str) {
    let out = sim(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(mention), "{args:?}: {err}");
}

#[test]
fn exit_codes() {
    expect_exit(&["fig3a", "--g", "-1"], 2, "`g`");
    expect_exit(&["fig3a", "--T", "abc"], 2, "`T`");
    expect_exit(&["fig3d"], 2, "`seed`");
    expect_exit(&["fig3e"], 2, "experiment");
    expect_exit(&["fig3a", "--samples", "512", "--g", "6"], 3, "resolution");
    expect_exit(&["fig3a", "--gamma-s", "0.001", "--g", "0.05"], 4, "decay");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "g = 3\nkappa = 1\n").unwrap();
    expect_exit(&["fig3a", "--config", path.to_str().unwrap()], 2, "`kappa`");
    expect_exit(&["fig3a", "--config", "/nonexistent/run.cfg"], 2, "`config`");
}

#[test]
fn fixed_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run_once = |name: &str| {
        let path = dir.path().join(name);
        let out = sim(&["fig3d", "--seed", "9", "--g-range", "2..3", "--n-seeds", "3", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
        std::fs::read(&path).unwrap()
    };
    assert_eq!(run_once("a.csv"), run_once("b.csv"));
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn fig3a_csv_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    assert!(sim(&["fig3a", "--out", path.to_str().unwrap()]).status.success());
    let rows = read_csv(&path);
    assert!(rows.len() > 4096);
    assert!(rows.iter().all(|r| r.len() == 7));
}

#[test]
fn fig3a_non_00_components_track_the_input() {
    let table = run(&config(Experiment::Fig3a, &[])).unwrap();
    let input = column(&table, "|f_in|");
    let peak = input.iter().cloned().fold(0.0, f64::max);
    for k in ["01", "10", "11"] {
        let out = column(&table, &format!("|f_out_{k}|"));
        assert!(max_diff(&out, &input) < 1e-2 * peak, "{k}");
    }
    // the bare-cavity component lags visibly
    let out_00 = column(&table, "|f_out_00|");
    let lag = max_diff(&out_00, &input);
    let lag_11 = max_diff(&column(&table, "|f_out_11|"), &input);
    assert!(lag > 10.0 * lag_11, "{lag} vs {lag_11}");
}

#[test]
fn fig3a_insensitive_to_coupling() {
    let weak = run(&config(Experiment::Fig3a, &[("g", "2")])).unwrap();
    let strong = run(&config(Experiment::Fig3a, &[("g", "6")])).unwrap();
    let peak = column(&weak, "|f_in|").iter().cloned().fold(0.0, f64::max);
    for k in ["01", "10", "11"] {
        let name = format!("|f_out_{k}|");
        assert!(max_diff(&column(&weak, &name), &column(&strong, &name)) < 1e-2 * peak);
    }
}

#[test]
fn fig3a_converges_in_samples() {
    // the truncation steps of the pulse converge at first order: from the
    // default 4096 samples a doubling still moves them by 3e-6
    let coarse = run(&config(Experiment::Fig3a, &[("samples", "16384")])).unwrap();
    let fine = run(&config(Experiment::Fig3a, &[("samples", "32768")])).unwrap();
    let mut headers = coarse.headers.clone();
    // the phase column is only meaningful where the field is not tiny
    headers.retain(|h| h.starts_with("|f"));
    for name in &headers {
        let a = column(&coarse, name);
        let b = column(&fine, name);
        // coarse sample j sits midway between fine samples 2j and 2j + 1
        let worst = a
            .iter()
            .enumerate()
            .filter(|(j, _)| 2 * j + 1 < b.len())
            .map(|(j, x)| (x - 0.5 * (b[2 * j] + b[2 * j + 1])).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{name}: {worst}");
    }
}

#[test]
fn fig3b_single_atom_edge() {
    let table = run(&config(Experiment::Fig3b, &[("N-range", "1..1")])).unwrap();
    assert_eq!(table.rows.len(), 1);
    let f = column(&table, "F(T=210)")[0];
    assert!(f > 0.99 && f <= 1.0);
}

#[test]
fn fig3c_columns_and_monotone_loss() {
    let table = run(&config(Experiment::Fig3c, &[])).unwrap();
    assert_eq!(
        table.headers,
        ["g", "P_sim(N=2)", "P_emp(N=2)", "P_sim(N=3)", "P_emp(N=3)", "P_sim(N=4)", "P_emp(N=4)"]
    );
    for n in 2..=4 {
        let p = column(&table, &format!("P_sim(N={n})"));
        assert!(p.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn fig3d_without_modulation_matches_constant() {
    let table = run(&config(
        Experiment::Fig3d,
        &[("seed", "3"), ("depth", "0"), ("g-range", "2..4"), ("g-step", "1")],
    ))
    .unwrap();
    let a = column(&table, "P_sim_constant");
    let b = column(&table, "P_sim_modulated");
    assert!(max_diff(&a, &b) < 1e-9);
}

#[test]
fn protocol_rows() {
    let table = run(&config(Experiment::Protocol, &[("alpha-sq", "0.05"), ("eta", "0.5")])).unwrap();
    let p = column(&table, "probability");
    let heralded = column(&table, "heralded_probability");
    for (a, b) in p.iter().zip(&heralded) {
        assert_eq!(*b, a * 0.5 * 0.05);
    }
    let f = column(&table, "fidelity");
    assert_eq!(&f[..2], &[1.0, 1.0]);
    assert!(f[2..].iter().all(|&x| x > 0.99 && x < 1.0));
}
