use std::path::Path;
use std::process::{Command, Output};

use hallsim::config::RunConfig;
use hallsim::run::{simulate, DIAGNOSTICS_FILE, MANIFEST_FILE};
use hallsim::snapshot::state_paths;

fn hallsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hallsim")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate",
        "--out",
        out.to_str().unwrap(),
        "--set",
        "domain.nx=12",
        "--set",
        "domain.ny=12",
        "--set",
        "init.width=2.0",
        "--set",
        "integrator.steps=20",
        "--set",
        "integrator.record_every=5",
    ];
    args.extend_from_slice(extra);
    hallsim(&args)
}

#[test]
fn simulate_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 1 + 20 / 5);
    assert!(lines[0].starts_with("t,norm,gauss_rel,continuity_rel,n_global,B_mean,sigma_est"));
    assert!(lines[0].ends_with("pure_gauge_max,breakdown"));
    for p in state_paths(dir.path(), "initial").iter().chain(&state_paths(dir.path(), "final")) {
        assert!(p.exists(), "{}", p.display());
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(small_run(a.path(), &[]).status.success());
    assert!(small_run(b.path(), &[]).status.success());
    let mut names = vec![DIAGNOSTICS_FILE.to_string()];
    for p in state_paths(Path::new(""), "final") {
        names.push(p.to_str().unwrap().to_string());
    }
    for n in names {
        let x = std::fs::read(a.path().join(&n)).unwrap();
        let y = std::fs::read(b.path().join(&n)).unwrap();
        assert!(x == y, "{n} differs");
    }
}

#[test]
fn manifest_reproduces_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(small_run(a.path(), &["--set", "physics.sigma_h=2.5"]).status.success());
    let manifest = a.path().join(MANIFEST_FILE);
    let o = hallsim(&["simulate", "--config", manifest.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(a.path().join(DIAGNOSTICS_FILE)).unwrap(),
        std::fs::read(b.path().join(DIAGNOSTICS_FILE)).unwrap()
    );
}

#[test]
fn zero_matter_leaves_gauge_field_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &["--set", "init.kind=zero", "--set", "domain.holes=4,4,3,3", "--set", "flux.value=0.7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let [_, i1, i2] = state_paths(dir.path(), "initial");
    let [_, f1, f2] = state_paths(dir.path(), "final");
    assert_eq!(std::fs::read(i1).unwrap(), std::fs::read(f1).unwrap());
    assert_eq!(std::fs::read(i2).unwrap(), std::fs::read(f2).unwrap());
    let csv = std::fs::read_to_string(dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[2], "0.0");
        assert!(cols[3] == "NA" || cols[3] == "0.0", "{row}");
        assert_eq!(cols[6], "NA");
        assert_eq!(cols[7], "NA");
    }
}

#[test]
fn diagnose_matches_last_row() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--set", "domain.holes=4,4,3,3", "--set", "flux.value=0.3"];
    assert!(small_run(dir.path(), &args).status.success());
    let [p, a1, a2] = state_paths(dir.path(), "final");
    let mut dargs = vec![
        "diagnose".to_string(),
        "--config".to_string(),
        dir.path().join(MANIFEST_FILE).to_str().unwrap().to_string(),
        "--psi".to_string(),
        p.to_str().unwrap().to_string(),
        "--a1".to_string(),
        a1.to_str().unwrap().to_string(),
        "--a2".to_string(),
        a2.to_str().unwrap().to_string(),
    ];
    let o = hallsim(&dargs.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let diag_row: Vec<String> = out.lines().nth(1).unwrap().split(',').map(String::from).collect();
    let csv = std::fs::read_to_string(dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(diag_row.len(), last.len());
    assert_eq!(diag_row[0], "NA");
    assert_eq!(diag_row[3], "NA");
    for (k, (x, y)) in diag_row.iter().zip(&last).enumerate().skip(1) {
        if k == 3 {
            continue;
        }
        match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(u), Ok(v)) => assert!((u - v).abs() <= 1e-12 * v.abs().max(1.0), "column {k}: {u} vs {v}"),
            _ => assert_eq!(x, y, "column {k}"),
        }
    }

    // Gauge-only input leaves the matter columns missing.
    dargs.drain(3..5);
    let o = hallsim(&dargs.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(o.status.success(), "{}", stderr(&o));
    let row: Vec<String> = stdout(&o).lines().nth(1).unwrap().split(',').map(String::from).collect();
    for k in [1, 2, 3, 4, 6, 7] {
        assert_eq!(row[k], "NA", "column {k}");
    }
    assert_ne!(row[5], "NA");
    assert_eq!(row.last().unwrap(), "NA");
}

#[test]
fn diagnose_rejects_wrong_grid() {
    let dir = tempfile::tempdir().unwrap();
    assert!(small_run(dir.path(), &[]).status.success());
    let [p, a1, a2] = state_paths(dir.path(), "final");
    let o = hallsim(&[
        "diagnose",
        "--set",
        "domain.nx=14",
        "--psi",
        p.to_str().unwrap(),
        "--a1",
        a1.to_str().unwrap(),
        "--a2",
        a2.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("12x12") && msg.contains("14x32"), "{msg}");
}

#[test]
fn invalid_config_is_itemized() {
    let dir = tempfile::tempdir().unwrap();
    let o = hallsim(&[
        "simulate",
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "physics.hbar=-1",
        "--set",
        "integrator.record_every=0",
        "--set",
        "no.such.key=1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    for needle in ["physics.hbar", "integrator.record_every", "no.such.key"] {
        assert!(msg.contains(needle), "missing {needle} in {msg}");
    }
}

#[test]
fn zero_hall_conductivity_rejected_for_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &["--set", "physics.sigma_h=0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solver_failure_names_step() {
    // At this time step the normal equations are too ill-conditioned to reach
    // the solver tolerance.
    let dir = tempfile::tempdir().unwrap();
    let o = small_run(dir.path(), &["--set", "integrator.dt=1e9", "--set", "init.consistent=false"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("step 1"), "{}", stderr(&o));
}

#[test]
fn quantize_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = hallsim(&["quantize", "--out", d, "--sigma-min", "0", "--sigma-max", "5", "--sigma-step", "0.25"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("allowed_set = {0, 1, 2, 3, 4, 5}\n"));
    assert_eq!(std::fs::read_to_string(dir.path().join("spectrum.txt")).unwrap(), stdout(&o));

    let o = hallsim(&["quantize", "--out", d, "--sigma-min", "1", "--sigma-max", "3", "--sigma-step", "1"]);
    assert!(stdout(&o).contains("allowed_set = {1, 2, 3}\n"));
    assert!(stderr(&o).is_empty());

    let o = hallsim(&["quantize", "--out", d, "--sigma-min", "0", "--sigma-max", "1", "--sigma-step", "0.25", "--tol", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("allowed_set = {0, 0.25, 0.5, 0.75, 1}\n"));
    assert!(stderr(&o).contains("warning"));

    let o = hallsim(&["quantize", "--out", d, "--sigma-step", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn library_and_binary_agree() {
    let dir = tempfile::tempdir().unwrap();
    assert!(small_run(dir.path(), &[]).status.success());
    let text = std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
    let cfg = RunConfig::from_pairs(&hallsim::config::parse_pairs(&text).unwrap()).unwrap();
    let traj = simulate(&cfg).unwrap();
    let csv = std::fs::read_to_string(dir.path().join(DIAGNOSTICS_FILE)).unwrap();
    for (row, rec) in csv.lines().skip(1).zip(&traj.rows) {
        assert_eq!(row, rec.csv_row());
    }
}
