use std::fs;
use std::path::Path;
use std::process::Command;

use cocycle_core::cocycle::almost_mathieu_cocycle;
use cocycle_core::torus::golden;
use cocycle_core::C64;
use cocyclelab::format::SeriesJson;

fn run(kind: &str, config: &str, extra: &[&str]) -> (i32, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_cocyclelab"))
        .arg(kind)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    (status.status.code().unwrap(), dir)
}

fn read_csv(dir: &Path, name: &str) -> Vec<Vec<String>> {
    let text = fs::read_to_string(dir.join("out").join(name)).unwrap();
    assert!(!text.contains('\r'));
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn col(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = rows[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[i].clone()).collect()
}

#[test]
fn schedule_toy_table() {
    let (code, dir) = run("schedule", r#"{"schedule": {"kappa0": 0.5, "c": 2, "max_stages": 3, "mode": "toy"}}"#, &[]);
    assert_eq!(code, 0);
    let rows = read_csv(dir.path(), "schedule.csv");
    let k: Vec<f64> = col(&rows, "K").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(k, vec![4.0, 16.0, 256.0, 65536.0]);
    assert_eq!(col(&rows, "n_admissible"), vec!["true", "false", "false", "false"]);
    for c in ["N", "M", "clamp_fraction"] {
        assert_eq!(col(&rows, c).len(), 4);
    }
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["experiment"], "schedule");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn ids_free_laplacian_full_window() {
    let (code, dir) = run(
        "ids",
        r#"{"system": {"family": "free"}, "ids": {"windows": [[-3, 3], [-3, 0]], "n": 50}}"#,
        &[],
    );
    assert_eq!(code, 0);
    let k: Vec<f64> = col(&read_csv(dir.path(), "ids.csv"), "k_value").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(k[0], 1.0);
    // 101 sites, symmetric spectrum with 0 an eigenvalue: 50 below, half of one split
    assert_eq!(k[1], 50.5 / 101.0);
}

#[test]
fn le_is_thread_count_independent() {
    let cfg = r#"{"kind": "le", "system": {"family": "amo", "lambda": 3.0, "energy": 0.4},
                  "scales": {"n": [32, 64], "grid_m": 300, "n0": 16, "depth": 3}}"#;
    let (c1, d1) = run("le", cfg, &["--threads", "1"]);
    let (c3, d3) = run("le", cfg, &["--threads", "3"]);
    assert_eq!((c1, c3), (0, 0));
    for f in ["le.csv", "probe.csv"] {
        assert_eq!(fs::read(d1.path().join("out").join(f)).unwrap(), fs::read(d3.path().join("out").join(f)).unwrap());
    }
}

#[test]
fn exit_codes() {
    // subcommand / config mismatch
    assert_eq!(run("ldt", r#"{"kind": "le"}"#, &[]).0, 2);
    // malformed config
    assert_eq!(run("le", "{", &[]).0, 2);
    // unknown subcommand is a clap usage error
    assert_eq!(run("bogus", "{}", &[]).0, 2);
    // base exponent below 0.1
    let rot = r#"{"system": {"family": "inline", "cocycle": {"dimension": 1,
        "coeffs": [{"k": [0], "re": [[0.8, -0.6], [0.6, 0.8]]}]}},
        "perturbation": {"seed": 1, "epsilons": [1e-3, 1e-4]}, "scales": {"grid_m": 64}}"#;
    assert_eq!(run("continuity-cocycle", rot, &[]).0, 1);
    // missing seed
    let no_seed = r#"{"system": {"family": "amo", "lambda": 3.0}, "perturbation": {"epsilons": [1e-3]}}"#;
    assert_eq!(run("continuity-cocycle", no_seed, &[]).0, 2);
    // omega = 1/2 is not Diophantine
    let rational = r#"{"system": {"family": "amo", "lambda": 3.0}, "frequency": {"omega": [0.5]},
        "frequency_sweep": {"h_values": [1e-3]}}"#;
    assert_eq!(run("continuity-frequency", rational, &[]).0, 1);
    // budget ceiling
    let big = r#"{"system": {"family": "amo", "lambda": 3.0}, "scales": {"n": [1000000], "grid_m": 100000}}"#;
    assert_eq!(run("le", big, &[]).0, 3);
    // strict schedule outside its range
    assert_eq!(run("schedule", r#"{"schedule": {"kappa0": 0.5, "c": 2, "mode": "strict"}}"#, &[]).0, 1);
}

#[test]
fn continuity_gamma_invariant_under_scaling() {
    let a = almost_mathieu_cocycle(3.0, 0.0, golden(), 0.5).unwrap();
    let scaled = a.scaled(C64::new(10.0, 0.0)).unwrap();
    let inline = |s| {
        serde_json::to_string(&SeriesJson::from_matrix_series(s, Some(0.5))).unwrap()
    };
    let cfg = |sys: String| {
        format!(
            r#"{{"system": {{"family": "inline", "cocycle": {sys}}}, "scales": {{"grid_m": 128}},
                "perturbation": {{"seed": 4, "degree": 1, "epsilons": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]}}}}"#
        )
    };
    let (c0, d0) = run("continuity-cocycle", &cfg(inline(a.series())), &[]);
    let (c1, d1) = run("continuity-cocycle", &cfg(inline(scaled.series())), &[]);
    assert_eq!((c0, c1), (0, 0));
    let g0: f64 = col(&read_csv(d0.path(), "continuity_cocycle.csv"), "gamma_fit")[0].parse().unwrap();
    let g1: f64 = col(&read_csv(d1.path(), "continuity_cocycle.csv"), "gamma_fit")[0].parse().unwrap();
    assert!(g0 > 0.0);
    assert!((g0 - g1).abs() < 1e-6, "{g0} {g1}");
    // same seed, same bytes; --seed overrides the config
    let (_, d2) = run("continuity-cocycle", &cfg(inline(a.series())), &[]);
    let f = "out/continuity_cocycle.csv";
    assert_eq!(fs::read(d0.path().join(f)).unwrap(), fs::read(d2.path().join(f)).unwrap());
    let (_, d3) = run("continuity-cocycle", &cfg(inline(a.series())), &["--seed", "5"]);
    assert_ne!(fs::read(d0.path().join(f)).unwrap(), fs::read(d3.path().join(f)).unwrap());
}

#[test]
fn ldt_and_ap_outputs() {
    let (code, dir) = run(
        "ldt",
        r#"{"system": {"family": "amo", "lambda": 3.0}, "scales": {"n": [64, 128], "grid_m": 512}, "ldt": {"epsilon": 0.1}}"#,
        &[],
    );
    assert_eq!(code, 0);
    let rows = read_csv(dir.path(), "ldt.csv");
    assert_eq!(col(&rows, "N"), vec!["64", "128"]);
    let (code, dir) = run(
        "ap-check",
        r#"{"system": {"family": "inline", "cocycle": {"dimension": 1, "coeffs": [{"k": [0], "re": [[2, 0], [0, 0.5]]}]}},
            "ap": {"n": 32, "n1": [64, 128], "grid_points": 4}}"#,
        &[],
    );
    assert_eq!(code, 0);
    let rows = read_csv(dir.path(), "ap.csv");
    assert!(col(&rows, "hypotheses_met").iter().all(|v| v == "true"));
    assert!(col(&rows, "residual").iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn frequency_sweep_accepts_rational_target() {
    let (code, dir) = run(
        "continuity-frequency",
        r#"{"system": {"family": "amo", "lambda": 3.0}, "scales": {"grid_m": 256},
            "frequency_sweep": {"h_values": [1e-3, 1e-5], "targets": [[0.5]]}}"#,
        &[],
    );
    assert_eq!(code, 0);
    let rows = read_csv(dir.path(), "continuity_frequency.csv");
    let dev: Vec<f64> = col(&rows, "deviation").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(dev.len(), 3);
    assert!(dev.iter().all(|d| d.is_finite()));
}

#[test]
fn thouless_outside_spectrum() {
    let (code, dir) = run(
        "thouless",
        r#"{"system": {"family": "free", "a": 2.0}, "scales": {"grid_m": 8}, "thouless": {"energies": [10.0], "n": 200}}"#,
        &[],
    );
    assert_eq!(code, 0);
    let gap: f64 = col(&read_csv(dir.path(), "thouless.csv"), "gap")[0].parse().unwrap();
    assert!(gap < 1e-2);
}
