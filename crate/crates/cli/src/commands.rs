//! The subcommands, as plain functions returning a [`RunReport`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use arbormatch_core::arboricity::ArboricityError;
use arbormatch_core::edge_list::write_edge_list;
use arbormatch_core::generate::seeded_rng;
use arbormatch_core::matching::MatchingError;
use arbormatch_core::{
    classify_edges, derive_seed, exact_arboricity, exact_e_alpha, exact_e_star,
    generate_forest_union, maximum_matching_size, read_edge_list, shuffle_stream, DiagnosticReport,
    EdgeList, EdgeListError, EdgeStream, Estimate, EstimatorConfig, EstimatorError, GenerateError,
    Graph, MatchingEstimate, SamplerState,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::report::RunReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: EdgeListError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("estimate {0} does not fit in 64 bits")]
    EstimateOverflow(Estimate),
}

fn load(path: &Path) -> Result<EdgeList, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_edge_list(BufReader::new(file)).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn estimate_u64(e: Estimate) -> Result<u64, CliError> {
    e.value()
        .and_then(|v| u64::try_from(v).ok())
        .ok_or(CliError::EstimateOverflow(e))
}

#[derive(Serialize)]
struct FileParams<'a> {
    file: String,
    n: usize,
    n_inferred: bool,
    alpha: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seeds: Option<&'a [u64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
}

impl<'a> FileParams<'a> {
    fn new(path: &Path, list: &EdgeList, alpha: usize) -> Self {
        FileParams {
            file: path.display().to_string(),
            n: list.stream.n(),
            n_inferred: list.n_inferred,
            alpha,
            epsilon: None,
            capacity: None,
            seed: None,
            seeds: None,
            threshold: None,
        }
    }
}

#[derive(Serialize)]
struct ExactResults {
    edges: usize,
    e_alpha: usize,
    e_star: usize,
    argmax_t: usize,
    matching: Option<usize>,
    arboricity: Option<usize>,
}

/// Exact oracles over a whole file. Oracles whose size cap is exceeded
/// report `null` rather than failing.
pub fn cmd_exact(path: &Path, alpha: usize) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let list = load(path)?;
    let s = &list.stream;
    let g = s.graph();
    let profile = exact_e_star(s, alpha);
    let results = ExactResults {
        edges: s.len(),
        e_alpha: exact_e_alpha(s, alpha).0,
        e_star: profile.e_star,
        argmax_t: profile.argmax_t,
        matching: maximum_matching_size(&g).ok(),
        arboricity: exact_arboricity(&g).ok(),
    };
    Ok(RunReport::new("exact", &FileParams::new(path, &list, alpha), &results, started))
}

/// Estimator settings shared by `estimate` and `sweep`.
#[derive(Debug, Clone, Copy)]
pub struct EstimateParams {
    pub alpha: u32,
    pub epsilon: f64,
    pub seed: u64,
    pub capacity: Option<usize>,
}

impl EstimateParams {
    fn config(&self, stream: &EdgeStream) -> Result<EstimatorConfig, CliError> {
        let mut cfg = EstimatorConfig::new(self.alpha, self.epsilon, stream.n().max(2), self.seed);
        if let Some(c) = self.capacity {
            cfg = cfg.with_capacity(c);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EstimateResults {
    pub estimate: u64,
    pub match_lower: f64,
    pub match_upper: f64,
    pub final_level: u32,
    pub peak_tracked_edges: usize,
}

fn estimate_once(stream: &EdgeStream, cfg: &EstimatorConfig) -> Result<EstimateResults, CliError> {
    let mut state = SamplerState::init(cfg.clone())?;
    for &e in stream {
        state.process_edge(e)?;
    }
    let bounds = MatchingEstimate::from_estimate(state.estimate(), cfg.alpha, cfg.epsilon);
    Ok(EstimateResults {
        estimate: estimate_u64(state.estimate())?,
        match_lower: bounds.lower,
        match_upper: bounds.upper,
        final_level: state.level(),
        peak_tracked_edges: state.peak_tracked(),
    })
}

/// One estimator pass over a file.
pub fn cmd_estimate(path: &Path, params: EstimateParams) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let list = load(path)?;
    let cfg = params.config(&list.stream)?;
    let results = estimate_once(&list.stream, &cfg)?;
    let mut p = FileParams::new(path, &list, params.alpha as usize);
    p.epsilon = Some(params.epsilon);
    p.capacity = Some(cfg.capacity);
    p.seed = Some(params.seed);
    Ok(RunReport::new("estimate", &p, &results, started))
}

#[derive(Serialize)]
struct GenerateParams {
    n: usize,
    alpha: usize,
    seed: u64,
    out: String,
}

#[derive(Serialize)]
struct GenerateResults {
    edges: usize,
}

/// Writes a forest-union instance with a `# n=` header.
pub fn cmd_generate(n: usize, alpha: usize, seed: u64, out: &Path) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let stream = generate_forest_union(n, alpha, seed)?;
    let io_err = |source| CliError::Io {
        path: out.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(out).map_err(io_err)?);
    write_edge_list(&stream, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    let params = GenerateParams {
        n,
        alpha,
        seed,
        out: out.display().to_string(),
    };
    Ok(RunReport::new(
        "generate",
        &params,
        &GenerateResults { edges: stream.len() },
        started,
    ))
}

/// The exact computations `verify` relies on. Swappable so the harness can
/// be checked against a deliberately broken oracle.
pub trait Oracles: Sync {
    fn matching(&self, g: &Graph) -> Result<usize, MatchingError> {
        maximum_matching_size(g)
    }
    fn e_alpha(&self, s: &EdgeStream, alpha: usize) -> usize {
        exact_e_alpha(s, alpha).0
    }
    fn e_star(&self, s: &EdgeStream, alpha: usize) -> usize {
        exact_e_star(s, alpha).e_star
    }
    fn classify(&self, s: &EdgeStream, alpha: usize) -> DiagnosticReport {
        classify_edges(s, alpha)
    }
    fn arboricity(&self, g: &Graph) -> Result<usize, ArboricityError> {
        exact_arboricity(g)
    }
}

/// The library oracles, unmodified.
pub struct ExactOracles;

impl Oracles for ExactOracles {}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyParams {
    pub trials: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub min_alpha: usize,
    pub max_alpha: usize,
    pub seed: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            trials: 200,
            min_n: 4,
            max_n: 14,
            min_alpha: 1,
            max_alpha: 3,
            seed: 0,
        }
    }
}

/// Largest `n` the verify harness accepts; bounded by the arboricity oracle.
pub const VERIFY_MAX_N: usize = arbormatch_core::arboricity::ARBORICITY_VERTEX_CAP;

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub n: usize,
    pub alpha: usize,
    pub edges: Vec<[u32; 2]>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyResults {
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_counterexample: Option<Counterexample>,
}

/// One generated instance and its (shuffled) stream order.
pub fn verify_instance(params: &VerifyParams, trial: usize) -> (usize, EdgeStream) {
    let mut rng = seeded_rng(derive_seed(params.seed, trial as u64));
    let n = rng.gen_range(params.min_n..=params.max_n);
    let alpha = rng.gen_range(params.min_alpha..=params.max_alpha);
    let base = generate_forest_union(n, alpha, rng.gen()).expect("validated parameters");
    (alpha, shuffle_stream(&base, rng.gen()))
}

/// Every check `verify` applies to one stream; returns the violated ones.
pub fn check_instance(oracles: &dyn Oracles, s: &EdgeStream, alpha: usize) -> Vec<String> {
    let mut bad: Vec<String> = Vec::new();
    let g = s.graph();
    let report = oracles.classify(s, alpha);
    bad.extend(report.violated_identities(alpha).into_iter().map(String::from));

    match oracles.arboricity(&g) {
        Ok(a) if a <= alpha => {
            bad.extend(report.violated_arboricity_bounds(alpha).into_iter().map(String::from));
        }
        Ok(_) | Err(ArboricityError::EmptyGraph) => {}
        Err(e) => bad.push(format!("arboricity oracle: {e}")),
    }

    let m = match oracles.matching(&g) {
        Ok(m) => m,
        Err(e) => {
            bad.push(format!("matching oracle: {e}"));
            return bad;
        }
    };
    let e_alpha = oracles.e_alpha(s, alpha);
    let e_star = oracles.e_star(s, alpha);
    if report.e_alpha != e_alpha {
        bad.push("classification e_alpha = oracle e_alpha".into());
    }
    if !(m <= e_alpha && e_alpha <= (alpha + 2) * m) {
        bad.push(format!("match <= |E_alpha| <= (alpha+2) match [{m}, {e_alpha}]"));
    }
    if !(m <= e_star && e_star <= (alpha + 2) * m) {
        bad.push(format!("match <= E* <= (alpha+2) match [{m}, {e_star}]"));
    }
    if e_star < e_alpha {
        bad.push("E* >= |E_alpha|".into());
    }
    bad
}

/// Checks the sandwich bounds and report identities on random
/// low-arboricity instances. Failures are reported, never raised.
pub fn cmd_verify(params: VerifyParams, oracles: &dyn Oracles) -> Result<RunReport, CliError> {
    let started = Instant::now();
    if params.min_n < 2 || params.min_n > params.max_n || params.max_n > VERIFY_MAX_N {
        return Err(CliError::Usage(format!(
            "need 2 <= min-n <= max-n <= {VERIFY_MAX_N}"
        )));
    }
    if params.min_alpha < 1 || params.min_alpha > params.max_alpha {
        return Err(CliError::Usage("need 1 <= min-alpha <= max-alpha".into()));
    }
    let outcomes: Vec<(usize, usize, EdgeStream, Vec<String>)> = (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let (alpha, s) = verify_instance(&params, trial);
            let bad = check_instance(oracles, &s, alpha);
            (trial, alpha, s, bad)
        })
        .collect();
    let failed = outcomes.iter().filter(|o| !o.3.is_empty()).count();
    let first_counterexample = outcomes
        .into_iter()
        .find(|o| !o.3.is_empty())
        .map(|(trial, alpha, s, violations)| Counterexample {
            trial,
            n: s.n(),
            alpha,
            edges: s.iter().map(|e| [e.u(), e.v()]).collect(),
            violations,
        });
    let results = VerifyResults {
        trials: params.trials,
        passed: params.trials - failed,
        failed,
        first_counterexample,
    };
    Ok(RunReport::new("verify", &params, &results, started).with_success(failed == 0))
}

#[derive(Debug, Clone, Copy)]
pub struct SweepParams {
    pub estimate: EstimateParams,
    /// Number of runs; run `i` uses `derive_seed(estimate.seed, i)`.
    pub seeds: usize,
    /// Minimum fraction of runs within `(1 +/- eps) E*` for the sweep to pass.
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRun {
    pub index: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub result: EstimateResults,
    pub relative_error: f64,
    pub within: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResults {
    pub e_star: usize,
    pub within_fraction: f64,
    pub mean_estimate: f64,
    pub min_estimate: u64,
    pub max_estimate: u64,
    pub passed: bool,
    pub runs: Vec<SweepRun>,
}

/// Seeds used by a sweep, in run order.
pub fn sweep_seeds(master: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| derive_seed(master, i)).collect()
}

/// Runs the estimator once per derived seed and scores each run against
/// the exact `E*`.
pub fn cmd_sweep(path: &Path, params: SweepParams) -> Result<RunReport, CliError> {
    let started = Instant::now();
    if params.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let list = load(path)?;
    let s = &list.stream;
    let alpha = params.estimate.alpha as usize;
    let eps = params.estimate.epsilon;
    let base_cfg = params.estimate.config(s)?;
    let e_star = exact_e_star(s, alpha).e_star;
    let seeds = sweep_seeds(params.estimate.seed, params.seeds);

    let runs = seeds
        .par_iter()
        .enumerate()
        .map(|(index, &seed)| {
            let result = estimate_once(s, &base_cfg.clone().with_seed(seed))?;
            let diff = (result.estimate as f64 - e_star as f64).abs();
            let relative_error = if e_star == 0 { 0.0 } else { diff / e_star as f64 };
            Ok(SweepRun {
                index,
                seed,
                within: diff <= eps * e_star as f64,
                relative_error,
                result,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let within = runs.iter().filter(|r| r.within).count();
    let within_fraction = within as f64 / runs.len() as f64;
    let estimates = runs.iter().map(|r| r.result.estimate);
    let results = SweepResults {
        e_star,
        within_fraction,
        mean_estimate: estimates.clone().map(|e| e as f64).sum::<f64>() / runs.len() as f64,
        min_estimate: estimates.clone().min().unwrap_or(0),
        max_estimate: estimates.max().unwrap_or(0),
        passed: within_fraction >= params.threshold,
        runs,
    };
    let mut p = FileParams::new(path, &list, alpha);
    p.epsilon = Some(eps);
    p.capacity = Some(base_cfg.capacity);
    p.seed = Some(params.estimate.seed);
    p.seeds = Some(&seeds);
    p.threshold = Some(params.threshold);
    let passed = results.passed;
    Ok(RunReport::new("sweep", &p, &results, started).with_success(passed))
}
