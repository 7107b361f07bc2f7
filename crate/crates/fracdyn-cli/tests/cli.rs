//! End-to-end checks of the command-line interface: artifact round-trips,
//! summary contents, and the exit-status discipline (0 success, 1 numerical
//! failure, 2 configuration or I/O error).

use std::path::Path;
use std::process::Command;

use fracdyn::{GridFunction, TimeScaleGrid};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracdyn"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn powfun_alpha_zero_writes_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(&cfg, "grid = lattice(0, 5, 1)\norders = 0\n");
    let out = dir.path().join("out");
    let status = bin()
        .args(["powfun", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("power_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "i,j,t_i,sigma_t_j,h_alpha");
    for line in lines {
        assert!(line.ends_with(",1"), "row {line:?} should be one");
    }
}

#[test]
fn powfun_check_reports_small_integer_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(&cfg, "grid = lattice(0, 5, 1)\norders = 2\n");
    let out = dir.path().join("out");
    let output = bin()
        .args(["powfun", "--check", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let line = stdout
        .lines()
        .find(|l| l.contains("max semigroup residual"))
        .expect("residual line");
    let value: f64 = line.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!(value <= 1e-10, "residual {value}");
}

#[test]
fn powfun_fractional_on_arbitrary_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let gridfile = dir.path().join("g.txt");
    write(&gridfile, "kind=arbitrary\n0\n0.5\n2\n3.75\n");
    let cfg = dir.path().join("p.cfg");
    write(&cfg, "grid = file:g.txt\norders = 0.5\n");
    let out = dir.path().join("out");
    let output = bin()
        .args(["powfun", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(
        stderr.contains("unsupported on Arbitrary scale"),
        "{stderr}"
    );
}

#[test]
fn corrupted_grid_file_exits_two_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let gridfile = dir.path().join("g.txt");
    write(&gridfile, "kind=arbitrary\n0\nnot-a-number\n");
    let cfg = dir.path().join("p.cfg");
    write(&cfg, "grid = file:g.txt\norders = 1\n");
    let out = dir.path().join("out");
    let output = bin()
        .args(["powfun", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.join("summary.txt").exists());
}

#[test]
fn missing_required_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(&cfg, "grid = lattice(0, 5, 1)\n");
    let output = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn solve_zero_rhs_single_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(
        &cfg,
        "grid = lattice(0, 5, 1)\nalpha = 1\nw = 2\neta = 1\nL = 0\nrhs = zero\ntol = 1e-12\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("iterations = 1"), "{summary}");
    assert!(summary.contains("converged = true"));
    assert!(summary.contains("p1 = 2"), "{summary}");

    // the written solution must round-trip through the loaders
    let grid = TimeScaleGrid::lattice(0.0, 5.0, 1.0).unwrap();
    let sol = GridFunction::read_csv_file(&out.join("solution.csv"), grid).unwrap();
    assert!(sol.values().iter().all(|&v| v == 2.0));
}

#[test]
fn solve_contractive_lattice_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(
        &cfg,
        "grid = lattice(0, 6, 1)\nalpha = 1\nw = 1\neta = 2\nL = 0.5\nrhs = linear(0.5)\ntol = 1e-10\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("contraction_bound = 0.25"), "{summary}");
    assert!(summary.contains("converged = true"));
    assert!(summary.contains("divergence_warning = false"));
}

#[test]
fn solve_expansive_rate_warns_in_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(
        &cfg,
        "grid = lattice(0, 10, 1)\nalpha = 1\nw = 1\neta = 1\nL = 3\nrhs = linear(3)\ntol = 1e-9\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("divergence_warning = true"), "{summary}");
}

#[test]
fn solve_nonconvergence_exits_one_with_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(
        &cfg,
        "grid = uniform(0, 1, 300)\nalpha = 1\nw = 1\neta = 2\nL = 1\nrhs = linear(1)\n\
         tol = 1e-14\nmax_iter = 3\n",
    );
    let out = dir.path().join("out");
    let output = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("converged = false"));
    assert!(out.join("solution.csv").exists());
}

#[test]
fn solve_warns_on_underdeclared_lipschitz() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(
        &cfg,
        "grid = lattice(0, 5, 1)\nalpha = 1\nw = 1\neta = 4\nL = 0.1\nrhs = linear(2)\ntol = 1e-9\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("lipschitz_warning"), "{summary}");
}

#[test]
fn gronwall_lattice_pass_and_report_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.cfg");
    write(
        &cfg,
        "grid = lattice(0, 5, 1)\nalpha = 1\nu = const(1)\nv = const(1)\nB = 1\n\
         series_tol = 1e-12\nmax_terms = 50\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["gronwall", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("verdict = pass"), "{summary}");
    let report = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.starts_with("t,y,u,bound,slack"));
    // bound column at t = 5 is 2^5
    let last = report.lines().last().unwrap();
    let bound: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!((bound - 32.0).abs() < 1e-8);
}

#[test]
fn gronwall_custom_function_files() {
    let dir = tempfile::tempdir().unwrap();
    let grid = TimeScaleGrid::lattice(0.0, 4.0, 1.0).unwrap();
    let u = GridFunction::sample(grid.clone(), |t| 1.0 + 0.1 * t).unwrap();
    u.write_csv_file(&dir.path().join("u.csv")).unwrap();
    let cfg = dir.path().join("g.cfg");
    write(
        &cfg,
        "grid = lattice(0, 4, 1)\nalpha = 0.5\nu = file:u.csv\nv = const(0.5)\nB = 0.5\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["gronwall", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn depend_closed_form_pair_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("d.cfg");
    write(
        &cfg,
        "grid = lattice(0, 6, 1)\nalpha = 1\nw = 1\neta = 2\nL = 0.5\nrhs = linear(0.5)\n\
         w_b = 1.1\ntol = 1e-12\nseries_tol = 1e-12\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["depend", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("verdict = pass"), "{summary}");
}

#[test]
fn solve_outputs_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    write(
        &cfg,
        "grid = lattice(0, 8, 1)\nalpha = 0.5\nw = 1\neta = 2\nL = 0.5\nrhs = linear(0.5)\ntol = 1e-10\n",
    );
    let mut artifacts = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = bin()
            .args(["solve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        artifacts.push((
            std::fs::read(out.join("solution.csv")).unwrap(),
            std::fs::read(out.join("summary.txt")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0], artifacts[1]);
}

#[test]
fn verify_quick_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let output = bin()
        .args(["verify", "--seed", "7", "--instances", "8", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stdout)
    );
    let table = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(table.contains("overall = pass"));
    assert!(!table.contains("FAIL"));
}
