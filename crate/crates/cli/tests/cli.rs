//! Subcommand behaviour, through the library entry points and the binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use arbormatch::commands::{check_instance, verify_instance};
use arbormatch::{
    cmd_estimate, cmd_exact, cmd_generate, cmd_sweep, cmd_verify, CliError, EstimateParams,
    ExactOracles, Oracles, SweepParams, VerifyParams,
};
use arbormatch_core::edge_list::write_edge_list;
use arbormatch_core::{exact_arboricity, generate_forest_union, parse_edge_list, EdgeStream};
use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn write_stream(dir: &TempDir, name: &str, s: &EdgeStream) -> PathBuf {
    let path = dir.path().join(name);
    write_edge_list(s, std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arbormatch"))
        .args(args)
        .env_remove("ARBORMATCH_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn params(alpha: u32, epsilon: f64, seed: u64, capacity: Option<usize>) -> EstimateParams {
    EstimateParams {
        alpha,
        epsilon,
        seed,
        capacity,
    }
}

#[test]
fn exact_single_edge() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.txt", "0 1\n");
    let r = cmd_exact(&f, 0).unwrap();
    assert_eq!(r.results["e_alpha"], 1);
    assert_eq!(r.results["e_star"], 1);
    assert_eq!(r.results["matching"], 1);
}

#[test]
fn exact_crossing_stream() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "c.txt", "0 1\n2 3\n1 2\n");
    let r = cmd_exact(&f, 0).unwrap();
    assert_eq!(r.results["e_alpha"], 1);
    assert_eq!(r.results["e_star"], 2);
    assert_eq!(r.results["argmax_t"], 2);
}

#[test]
fn exact_oversized_oracles_are_null() {
    let dir = TempDir::new().unwrap();
    let f = write_stream(&dir, "big.txt", &generate_forest_union(200, 2, 1).unwrap());
    let r = cmd_exact(&f, 2).unwrap();
    assert!(r.results["matching"].is_null());
    assert!(r.results["arboricity"].is_null());
    assert!(r.results["e_star"].as_u64().unwrap() > 0);
}

#[test]
fn self_loop_is_a_line_numbered_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.txt", "5 5\n");
    let err = cmd_exact(&f, 0).unwrap_err();
    assert!(matches!(&err, CliError::Input { source, .. } if source.line() == Some(1)));
    let out = bin(&["exact", "--alpha", "0", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn estimate_single_edge_is_exact() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.txt", "0 1\n");
    for seed in [0, 1, 99] {
        let r = cmd_estimate(&f, params(3, 0.5, seed, None)).unwrap();
        assert_eq!(r.results["estimate"], 1);
        assert_eq!(r.results["match_upper"], 2.0);
    }
}

#[test]
fn estimate_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = write_stream(&dir, "g.txt", &generate_forest_union(500, 3, 4).unwrap());
    let args = ["estimate", "--alpha", "3", "--seed", "12", "--capacity", "50", f.to_str().unwrap()];
    let a = json(&bin(&args));
    let b = json(&bin(&args));
    assert_eq!(a["results"].to_string(), b["results"].to_string());
    assert!(a["results"]["final_level"].as_u64().unwrap() > 0);
}

#[test]
fn capacity_bounds_tracked_edges() {
    let dir = TempDir::new().unwrap();
    let s = generate_forest_union(1700, 3, 8).unwrap();
    assert!(s.len() >= 5000);
    let f = write_stream(&dir, "big.txt", &s);
    let r = cmd_estimate(&f, params(3, 0.2, 5, Some(100))).unwrap();
    assert!(r.results["peak_tracked_edges"].as_u64().unwrap() <= 100);
    assert_eq!(r.parameters["capacity"], 100);
}

#[test]
fn estimate_rejects_bad_epsilon() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.txt", "0 1\n");
    assert!(matches!(
        cmd_estimate(&f, params(1, 1.5, 0, None)),
        Err(CliError::Estimator(_))
    ));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let f = write_stream(&dir, "g.txt", &generate_forest_union(300, 2, 4).unwrap());
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_arbormatch"));
        cmd.args(["estimate", "--alpha", "2", "--capacity", "20"])
            .args(extra)
            .arg(&f)
            .env_remove("ARBORMATCH_SEED");
        if let Some(v) = env {
            cmd.env("ARBORMATCH_SEED", v);
        }
        json(&cmd.output().unwrap())
    };
    let from_env = run(Some("31"), &[]);
    assert_eq!(from_env["parameters"]["seed"], 31);
    assert_eq!(from_env["results"], run(None, &["--seed", "31"])["results"]);
}

#[test]
fn generate_tiny_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let tiny = dir.path().join("tiny.txt");
    let r = cmd_generate(2, 1, 0, &tiny).unwrap();
    assert!(r.results["edges"].as_u64().unwrap() <= 1);
    assert!(std::fs::read_to_string(&tiny).unwrap().starts_with("# n=2\n"));

    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    cmd_generate(10, 3, 77, &a).unwrap();
    cmd_generate(10, 3, 77, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn generated_file_respects_arboricity() {
    let dir = TempDir::new().unwrap();
    for seed in 0..10 {
        let out = dir.path().join(format!("g{seed}.txt"));
        cmd_generate(12, 2, seed, &out).unwrap();
        let parsed = parse_edge_list(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(parsed.stream.n(), 12);
        assert!(exact_arboricity(&parsed.stream.graph()).unwrap() <= 2);
    }
}

#[test]
fn generate_rejects_bad_parameters() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.txt");
    assert!(matches!(cmd_generate(1, 1, 0, &out), Err(CliError::Generate(_))));
    assert!(matches!(cmd_generate(5, 0, 0, &out), Err(CliError::Generate(_))));
}

#[test]
fn verify_zero_trials_is_vacuous() {
    let r = cmd_verify(
        VerifyParams {
            trials: 0,
            ..Default::default()
        },
        &ExactOracles,
    )
    .unwrap();
    assert!(r.success);
    assert_eq!(r.results["passed"], 0);
    let out = bin(&["verify", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_default_suite_passes() {
    let r = cmd_verify(VerifyParams::default(), &ExactOracles).unwrap();
    assert!(r.success);
    assert_eq!(r.results["passed"], 200);
    assert!(r.results["first_counterexample"].is_null());
}

/// Reports an `E_alpha` one larger than the truth.
struct InflatedEAlpha;

impl Oracles for InflatedEAlpha {
    fn e_alpha(&self, s: &EdgeStream, alpha: usize) -> usize {
        ExactOracles.e_alpha(s, alpha) * 10 + 1
    }
}

#[test]
fn corrupted_oracle_yields_counterexample() {
    let r = cmd_verify(
        VerifyParams {
            trials: 20,
            ..Default::default()
        },
        &InflatedEAlpha,
    )
    .unwrap();
    assert!(!r.success);
    assert_eq!(r.results["failed"], 20);
    let cx = &r.results["first_counterexample"];
    assert_eq!(cx["trial"], 0);
    assert!(!cx["edges"].as_array().unwrap().is_empty());
    assert!(cx["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v.as_str().unwrap().contains("E_alpha")));

    // The counterexample replays to the same stream.
    let (alpha, s) = verify_instance(&VerifyParams::default(), 0);
    assert_eq!(cx["alpha"], alpha);
    assert!(check_instance(&ExactOracles, &s, alpha).is_empty());
}

#[test]
fn verify_rejects_oversized_ranges() {
    let err = cmd_verify(
        VerifyParams {
            max_n: 40,
            ..Default::default()
        },
        &ExactOracles,
    )
    .unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
}

fn sweep(f: &Path, seeds: usize, capacity: Option<usize>, threshold: f64) -> Result<arbormatch::RunReport, CliError> {
    cmd_sweep(
        f,
        SweepParams {
            estimate: params(3, 0.2, 5, capacity),
            seeds,
            threshold,
        },
    )
}

#[test]
fn sweep_at_full_capacity_is_exact() {
    let dir = TempDir::new().unwrap();
    let s = generate_forest_union(100, 3, 2).unwrap();
    let f = write_stream(&dir, "g.txt", &s);
    let r = sweep(&f, 1, Some(s.len()), 0.9).unwrap();
    assert_eq!(r.results["runs"][0]["relative_error"], 0.0);
    assert_eq!(r.results["within_fraction"], 1.0);
    assert!(r.success);
}

#[test]
fn sweep_needs_seeds() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.txt", "0 1\n");
    assert!(matches!(sweep(&f, 0, None, 0.9), Err(CliError::Usage(_))));
    let out = bin(&["sweep", "--alpha", "1", "--seeds", "0", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_runs_match_individual_estimates() {
    let dir = TempDir::new().unwrap();
    let f = write_stream(&dir, "g.txt", &generate_forest_union(400, 3, 9).unwrap());
    let r = sweep(&f, 6, Some(40), 0.0).unwrap();
    for run in r.results["runs"].as_array().unwrap() {
        let seed = run["seed"].as_u64().unwrap();
        let single = cmd_estimate(&f, params(3, 0.2, seed, Some(40))).unwrap();
        for key in ["estimate", "final_level", "peak_tracked_edges", "match_lower", "match_upper"] {
            assert_eq!(run[key], single.results[key], "{key} for seed {seed}");
        }
    }
}

#[test]
fn sweep_below_threshold_exits_nonzero() {
    let dir = TempDir::new().unwrap();
    let f = write_stream(&dir, "g.txt", &generate_forest_union(400, 3, 9).unwrap());
    // No fraction can exceed 1, so this threshold always fails.
    let r = sweep(&f, 3, Some(40), 1.5).unwrap();
    assert!(!r.success);
    assert_eq!(r.results["passed"], false);
    let out = bin(&[
        "sweep", "--alpha", "3", "--seeds", "3", "--capacity", "40", "--threshold", "1.5",
        f.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["command"], "sweep");
}

#[test]
fn reports_have_the_stable_top_level_schema() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.txt", "# n=4\n0 1\n");
    let out_file = dir.path().join("gen.txt");
    let runs = [
        bin(&["exact", "--alpha", "1", f.to_str().unwrap()]),
        bin(&["estimate", "--alpha", "1", f.to_str().unwrap()]),
        bin(&["generate", "--n", "5", "--alpha", "1", "--out", out_file.to_str().unwrap()]),
        bin(&["verify", "--trials", "3"]),
        bin(&["sweep", "--alpha", "1", "--seeds", "2", f.to_str().unwrap()]),
    ];
    for out in &runs {
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(out);
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["command", "parameters", "results", "timing_ms"]);
    }
    assert_eq!(json(&runs[0])["parameters"]["n_inferred"], false);
}
