use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ostbc-relay"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn ser_at_vanishing_snr_is_half_for_bpsk() {
    let csv = stdout(&[
        "ser",
        "--mod",
        "psk",
        "--M",
        "2",
        "--K",
        "1",
        "--N",
        "1",
        "--snr-db-range",
        "-100:-100:1",
        "--method",
        "exact",
    ]);
    let ser = column(&csv, "ser_exact");
    assert_eq!(ser.len(), 1);
    assert!((ser[0] - 0.5).abs() < 1e-4);
    // Simulation columns stay empty.
    assert!(csv.lines().nth(1).unwrap().contains(",,,"));
}

#[test]
fn ser_header_and_methods() {
    let csv = stdout(&["ser", "--snr-db-range", "10:10:1", "--method", "both", "--workers", "1"]);
    assert_eq!(
        csv.lines().next().unwrap(),
        "snr_db,ser_exact,ser_sim,ser_sim_stderr,ber_approx,ber_sim,ber_sim_stderr"
    );
    let exact = column(&csv, "ser_exact")[0];
    let sim = column(&csv, "ser_sim")[0];
    let se = column(&csv, "ser_sim_stderr")[0];
    assert!((exact - sim).abs() < 4.0 * se, "{exact} {sim} {se}");
}

#[test]
fn inconsistent_selection_is_a_usage_error() {
    let out = run(&["ser", "--K", "2", "--Ks", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["ser", "--mod", "qam", "--M", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["ser", "--snr-db-range", "5:0:1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

fn same_across_workers(args: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let path = dir.path().join(format!("w{workers}.csv"));
        let mut full: Vec<&str> = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        full.extend(["--workers", workers, "--out", &p]);
        let out = run(&full);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "{args:?}");
}

#[test]
fn worker_count_does_not_change_output() {
    same_across_workers(&["ser", "--snr-db-range", "0:10:10", "--seed", "9"]);
    same_across_workers(&[
        "ser",
        "--mod",
        "qam",
        "--M",
        "16",
        "--K",
        "3",
        "--Ks",
        "2",
        "--Ns",
        "1",
        "--fast",
        "--snr-db-range",
        "5:5:1",
    ]);
    same_across_workers(&["ergodic-capacity", "--K", "5", "--N", "10", "--Ks", "1", "--Ns", "2", "--trials", "20000"]);
    same_across_workers(&["mgf", "--K", "3", "--N", "2", "--trials", "50000"]);
    same_across_workers(&["pdf", "--points", "200", "--samples", "30000"]);
}

#[test]
fn same_seed_reruns_are_identical() {
    let args = ["ser", "--snr-db-range", "5:5:1", "--method", "sim", "--seed", "4"];
    assert_eq!(stdout(&args), stdout(&args));
    let other = stdout(&["ser", "--snr-db-range", "5:5:1", "--method", "sim", "--seed", "5"]);
    assert_ne!(stdout(&args), other);
}

#[test]
fn manifest_accompanies_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cap.csv");
    stdout(&["ergodic-capacity", "--rho-db-range", "0:10:10", "--seed", "3", "--out", out.to_str().unwrap()]);
    let manifest = fs::read_to_string(dir.path().join("cap.csv.manifest")).unwrap();
    assert!(manifest.contains("command = ergodic-capacity"));
    assert!(manifest.contains("seed = 3"));
    assert!(manifest.contains(&format!("output = {}", out.display())));
    assert!(manifest.contains("tool_version = "));
    assert!(manifest.contains("wall_time_s = "));
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# bpsk at very low snr\nmod = psk\nM = 2\nK = 1\nN = 1\nsnr-db-range = -100:-100:1\nmethod = exact\n",
    )
    .unwrap();
    let csv = stdout(&["ser", "--config", cfg.to_str().unwrap()]);
    assert!((column(&csv, "ser_exact")[0] - 0.5).abs() < 1e-4);
    let csv = stdout(&["ser", "--config", cfg.to_str().unwrap(), "--M", "4"]);
    assert!((column(&csv, "ser_exact")[0] - 0.75).abs() < 1e-4);
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "this is not a pair\n").unwrap();
    assert_eq!(run(&["ser", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn capacity_table_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    stdout(&["capacity-table", "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][..4], ["tx_antennas", "feedback_bits", "rx_2", "rx_3"]);
    let cell = |k: usize, n: usize| rows[k - 1][n].parse::<usize>().unwrap();
    assert_eq!(cell(2, 2), 1);
    assert_eq!(cell(2, 5), 2);
    assert_eq!(cell(4, 10), 2);
    assert_eq!(cell(5, 10), 2);
    assert_eq!(rows[4][1], "3");
    let report = fs::read_to_string(dir.path().join("table.csv.discrepancies.txt")).unwrap();
    assert!(report.contains("K=2 N=4: computed 2 published 1"));
    assert!(!report.contains("K=2 N=2:"));
    assert!(dir.path().join("table.csv.manifest").exists());
}

#[test]
fn ergodic_capacity_vanishes_at_low_snr() {
    let csv = stdout(&[
        "ergodic-capacity",
        "--K",
        "5",
        "--N",
        "5",
        "--Ks",
        "1",
        "--Ns",
        "1",
        "--rho-db-range",
        "-100:-100:1",
    ]);
    assert_eq!(csv.lines().next().unwrap(), "rho_db,cap_full_mean,cap_full_stderr,cap_sel_mean,cap_sel_stderr");
    assert!(column(&csv, "cap_full_mean")[0] < 1e-8);
    assert!(column(&csv, "cap_sel_mean")[0] < 1e-8);
}

#[test]
fn mgf_values() {
    let csv = stdout(&["mgf", "--K", "1", "--N", "1", "--s-values", "0,1"]);
    let m = column(&csv, "mgf_exact");
    assert_eq!(m[0], 1.0);
    assert!((m[1] - 0.596_347_4).abs() < 1e-6);
    let dir = tempfile::tempdir().unwrap();
    let terms = dir.path().join("terms.txt");
    stdout(&["mgf", "--K", "2", "--N", "2", "--dump-terms", terms.to_str().unwrap()]);
    let text = fs::read_to_string(terms).unwrap();
    assert!(text.lines().count() > 1 && text.lines().skip(1).all(|l| l.split(", ").count() == 4));
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(a, b)| (a[1] - a[0]) * (b[0] + b[1]) / 2.0).sum()
}

#[test]
fn pdf_grid_integrates_to_one() {
    for args in [["--K", "1", "--N", "1"], ["--K", "2", "--N", "2"], ["--Ks", "1", "--Ns", "1"]] {
        let mut full = vec!["pdf"];
        full.extend(args);
        let csv = stdout(&full);
        let x = column(&csv, "theta");
        let p = column(&csv, "pdf_exact");
        let total = trapezoid(&x, &p);
        assert!((total - 1.0).abs() < 1e-6, "{args:?}: {total}");
        let cdf = column(&csv, "cdf_exact");
        assert!(cdf.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((cdf[cdf.len() - 1] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn pdf_empirical_columns() {
    let dir = tempfile::tempdir().unwrap();
    let terms = dir.path().join("t.txt");
    let csv = stdout(&[
        "pdf",
        "--grid",
        "linear",
        "--theta-max",
        "20",
        "--points",
        "81",
        "--samples",
        "200000",
        "--dump-terms",
        terms.to_str().unwrap(),
    ]);
    let exact = column(&csv, "cdf_exact");
    let emp = column(&csv, "cdf_empirical");
    let worst = exact.iter().zip(&emp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 0.01, "{worst}");
    assert!(Path::new(&terms).exists());
    assert!(fs::read_to_string(terms).unwrap().contains("# density terms"));
}

#[test]
fn validate_reports_and_exit_codes() {
    let out = run(&["validate", "--quick", "--only", "zero-snr,table-entries"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS zero-snr"));
    assert!(text.contains("summary status=pass checks=2 passed=2 failed=0"));

    let out = run(&["validate", "--quick", "--only", "selection-capacity", "--tolerance-scale", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout).unwrap().contains("summary status=fail"));

    assert_eq!(run(&["validate", "--only", "nonsense"]).status.code(), Some(1));
}

#[test]
fn quick_validation_runs_statistical_checks() {
    let out = run(&["validate", "--quick", "--only", "ser-8psk,fast-vs-matrix,selection-capacity"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}
