//! One-pass estimator for `E*`, the largest qualifying-edge count over all
//! stream prefixes.
//!
//! The sampler keeps a set `S` of edges, each with one counter per endpoint
//! recording how many later edges have touched that endpoint. For every
//! arriving edge `e = uv`:
//!
//! 1. with probability `p = 2^-level`, `e` joins `S` with both counters at 0;
//! 2. every other tracked edge sharing an endpoint `w` with `e` increments
//!    its counter for `w`, and is dropped once that counter exceeds `alpha`;
//! 3. while `|S|` exceeds the capacity, `level` goes up by one and each
//!    tracked edge independently survives with probability 1/2;
//! 4. the running maximum absorbs `|S| * 2^level`.
//!
//! Tracked edges are therefore always a `p`-sample of the edges that still
//! qualify in the current prefix, and the memory held is bounded by the
//! capacity, `ceil(30 * eps^-2 * log2 n)` by default.
//!
//! The estimate is kept as `(count, level)` and compared exactly; no floating
//! point touches it.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::generate::seeded_rng;
use crate::graph::{Edge, EdgeStream, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("invalid estimator config: {field} {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("duplicate edge {edge} at stream position {position}")]
    DuplicateEdge { edge: Edge, position: u64 },
    #[error("stream declares {stream_n} vertices but the estimator was configured for {config_n}")]
    VertexCountMismatch { stream_n: usize, config_n: usize },
}

/// `ceil(30 * eps^-2 * log2 n)`.
pub fn default_capacity(epsilon: f64, n: usize) -> usize {
    (30.0 * (n as f64).log2() / (epsilon * epsilon)).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub alpha: u32,
    pub epsilon: f64,
    /// Declared vertex count; only used to size the default capacity.
    pub n: usize,
    /// Largest tracked-set size tolerated after an edge is processed.
    pub capacity: usize,
    pub seed: u64,
    /// Reject repeated edges. Costs memory linear in the stream, so it is
    /// off by default and callers are expected to validate upstream.
    pub detect_duplicates: bool,
}

impl EstimatorConfig {
    /// A config with the default capacity for `epsilon` and `n`.
    pub fn new(alpha: u32, epsilon: f64, n: usize, seed: u64) -> Self {
        let capacity = if epsilon > 0.0 && epsilon < 1.0 && n >= 2 {
            default_capacity(epsilon, n)
        } else {
            0
        };
        EstimatorConfig {
            alpha,
            epsilon,
            n,
            capacity,
            seed,
            detect_duplicates: false,
        }
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_duplicate_detection(mut self, on: bool) -> Self {
        self.detect_duplicates = on;
        self
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        let invalid = |field, reason: &str| {
            Err(EstimatorError::InvalidConfig {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return invalid("epsilon", "must lie strictly between 0 and 1");
        }
        if self.n < 2 {
            return invalid("n", "must be at least 2");
        }
        if self.capacity < 1 {
            return invalid("capacity", "must be at least 1");
        }
        Ok(())
    }
}

/// A non-negative value `count * 2^level`, compared exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct Estimate {
    pub count: u64,
    pub level: u32,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { count: 0, level: 0 };

    /// The exact value, or `None` if it does not fit in 128 bits.
    pub fn value(&self) -> Option<u128> {
        if self.count == 0 {
            return Some(0);
        }
        let bits = 64 - self.count.leading_zeros();
        (bits + self.level <= 128).then(|| (self.count as u128) << self.level)
    }

    pub fn to_f64(&self) -> f64 {
        self.count as f64 * 2f64.powi(self.level as i32)
    }
}

impl PartialEq for Estimate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Estimate {}

impl PartialOrd for Estimate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Estimate {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.count, other.count) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {}
        }
        // Shift the operand with the larger level down to the other's scale;
        // once the shifted value leaves u128 it dominates any u64.
        let (hi, lo, flipped) = if self.level >= other.level {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let shift = hi.level - lo.level;
        let ord = if shift >= 64 {
            Ordering::Greater
        } else {
            ((hi.count as u128) << shift).cmp(&(lo.count as u128))
        };
        if flipped {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl std::fmt::Display for Estimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}*2^{}", self.count, self.level),
        }
    }
}

/// A sampled edge and its per-endpoint counters of later incident edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackedEdge {
    pub edge: Edge,
    /// Later edges seen at `edge.u()`.
    pub c_u: u32,
    /// Later edges seen at `edge.v()`.
    pub c_v: u32,
}

impl TrackedEdge {
    fn counter_mut(&mut self, w: Vertex) -> &mut u32 {
        if self.edge.u() == w {
            &mut self.c_u
        } else {
            &mut self.c_v
        }
    }
}

/// True with probability `2^-level`.
fn coin_pow2<R: RngCore>(rng: &mut R, level: u32) -> bool {
    let mut remaining = level;
    while remaining > 0 {
        let bits = remaining.min(64);
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        if rng.next_u64() & mask != 0 {
            return false;
        }
        remaining -= bits;
    }
    true
}

/// The estimator's full mutable state.
///
/// Generic over the coin source so tests can inject one; `R` must behave like
/// a real random generator; a source that never lands tails would keep the
/// halving loop spinning.
#[derive(Debug, Clone)]
pub struct SamplerState<R = ChaCha8Rng> {
    config: EstimatorConfig,
    rng: R,
    /// Insertion-ordered so halving rounds consume coins deterministically.
    tracked: IndexMap<Edge, TrackedEdge>,
    /// Tracked edges by endpoint. A vertex never holds more than `alpha + 1`
    /// of them, since each arrival at `w` ages every tracked edge at `w`.
    incident: HashMap<Vertex, Vec<Edge>>,
    level: u32,
    running_max: Estimate,
    edges_seen: u64,
    peak_tracked: usize,
    seen: Option<HashSet<Edge>>,
}

impl SamplerState<ChaCha8Rng> {
    /// Empty sample, `p = 1`, maximum 0, coins drawn from the config seed.
    pub fn init(config: EstimatorConfig) -> Result<Self, EstimatorError> {
        let rng = seeded_rng(config.seed);
        Self::with_rng(config, rng)
    }
}

impl<R: RngCore> SamplerState<R> {
    pub fn with_rng(config: EstimatorConfig, rng: R) -> Result<Self, EstimatorError> {
        config.validate()?;
        let seen = config.detect_duplicates.then(HashSet::new);
        Ok(SamplerState {
            config,
            rng,
            tracked: IndexMap::new(),
            incident: HashMap::new(),
            level: 0,
            running_max: Estimate::ZERO,
            edges_seen: 0,
            peak_tracked: 0,
            seen,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn capacity(&self) -> usize {
        self.config.capacity
    }

    /// Current sampling level `i`; the sampling probability is `2^-i`.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn sampling_probability(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }

    pub fn tracked_len(&self) -> usize {
        self.tracked.len()
    }

    pub fn tracked(&self) -> impl Iterator<Item = &TrackedEdge> {
        self.tracked.values()
    }

    pub fn get(&self, e: &Edge) -> Option<&TrackedEdge> {
        self.tracked.get(e)
    }

    pub fn edges_seen(&self) -> u64 {
        self.edges_seen
    }

    /// Largest tracked-set size observed after any processed edge.
    pub fn peak_tracked(&self) -> usize {
        self.peak_tracked
    }

    /// The running maximum of `|S| * 2^level`.
    pub fn estimate(&self) -> Estimate {
        self.running_max
    }

    pub fn process_edge(&mut self, e: Edge) -> Result<(), EstimatorError> {
        if let Some(seen) = &mut self.seen {
            if !seen.insert(e) {
                return Err(EstimatorError::DuplicateEdge {
                    edge: e,
                    position: self.edges_seen,
                });
            }
        }

        // (a) admit with probability 2^-level.
        let admitted = coin_pow2(&mut self.rng, self.level);
        if admitted && self.tracked.insert(e, TrackedEdge { edge: e, c_u: 0, c_v: 0 }).is_none() {
            for w in e.endpoints() {
                self.incident.entry(w).or_default().push(e);
            }
        }

        // (b) age the other tracked edges at each endpoint of e.
        let alpha = self.config.alpha;
        for w in e.endpoints() {
            let Some(at_w) = self.incident.get(&w) else {
                continue;
            };
            let mut expired = Vec::new();
            for other in at_w.iter().filter(|&&f| f != e) {
                let entry = self.tracked.get_mut(other).expect("index and sample agree");
                let counter = entry.counter_mut(w);
                *counter += 1;
                if *counter > alpha {
                    expired.push(*other);
                }
            }
            for f in expired {
                self.forget(f);
            }
        }

        // (c) halve until the sample fits.
        while self.tracked.len() > self.config.capacity {
            self.level += 1;
            let mut dropped = Vec::new();
            let rng = &mut self.rng;
            self.tracked.retain(|edge, _| {
                let keep = rng.next_u64() & 1 == 0;
                if !keep {
                    dropped.push(*edge);
                }
                keep
            });
            for f in dropped {
                self.unindex(f);
            }
        }

        // (d)
        let current = Estimate {
            count: self.tracked.len() as u64,
            level: self.level,
        };
        self.running_max = self.running_max.max(current);
        self.peak_tracked = self.peak_tracked.max(self.tracked.len());
        self.edges_seen += 1;
        Ok(())
    }

    fn forget(&mut self, e: Edge) {
        self.tracked.swap_remove(&e);
        self.unindex(e);
    }

    fn unindex(&mut self, e: Edge) {
        for w in e.endpoints() {
            if let Some(list) = self.incident.get_mut(&w) {
                if let Some(pos) = list.iter().position(|&f| f == e) {
                    list.swap_remove(pos);
                }
                if list.is_empty() {
                    self.incident.remove(&w);
                }
            }
        }
    }

    /// Consumes the state and returns the estimate of `E*`.
    pub fn finalize(self) -> Estimate {
        self.running_max
    }
}

/// What a full run produced, beyond the estimate itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub estimate: Estimate,
    pub final_level: u32,
    pub peak_tracked_edges: usize,
    pub edges_processed: u64,
}

fn check_stream(stream: &EdgeStream, config: &EstimatorConfig) -> Result<(), EstimatorError> {
    if stream.n() > config.n {
        return Err(EstimatorError::VertexCountMismatch {
            stream_n: stream.n(),
            config_n: config.n,
        });
    }
    Ok(())
}

/// Runs the estimator over a whole stream.
pub fn run(stream: &EdgeStream, config: &EstimatorConfig) -> Result<Estimate, EstimatorError> {
    run_summary(stream, config).map(|s| s.estimate)
}

pub fn run_summary(stream: &EdgeStream, config: &EstimatorConfig) -> Result<RunSummary, EstimatorError> {
    check_stream(stream, config)?;
    let mut state = SamplerState::init(config.clone())?;
    for &e in stream {
        state.process_edge(e)?;
    }
    Ok(RunSummary {
        estimate: state.estimate(),
        final_level: state.level(),
        peak_tracked_edges: state.peak_tracked(),
        edges_processed: state.edges_seen(),
    })
}

/// An `E*` estimate turned into an interval for the maximum matching size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingEstimate {
    pub estimate: Estimate,
    /// `estimate / ((1 + eps)(alpha + 2))`.
    pub lower: f64,
    /// `estimate / (1 - eps)`.
    pub upper: f64,
}

impl MatchingEstimate {
    pub fn from_estimate(estimate: Estimate, alpha: u32, epsilon: f64) -> Self {
        let value = estimate.to_f64();
        MatchingEstimate {
            estimate,
            lower: value / ((1.0 + epsilon) * (alpha as f64 + 2.0)),
            upper: value / (1.0 - epsilon),
        }
    }

    pub fn contains(&self, matching_size: usize) -> bool {
        let m = matching_size as f64;
        self.lower <= m && m <= self.upper
    }
}

/// Runs the estimator and brackets the maximum matching size.
///
/// Whenever the estimate is within a `(1 +/- eps)` factor of `E*`, the true
/// matching size lies in `[lower, upper]` for any stream of arboricity at
/// most `alpha`.
pub fn estimate_matching(
    stream: &EdgeStream,
    config: &EstimatorConfig,
) -> Result<MatchingEstimate, EstimatorError> {
    let estimate = run(stream, config)?;
    Ok(MatchingEstimate::from_estimate(estimate, config.alpha, config.epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_stream;

    /// Returns zeros forever: every admission coin lands heads.
    struct AlwaysHeads;

    impl RngCore for AlwaysHeads {
        fn next_u32(&mut self) -> u32 {
            0
        }
        fn next_u64(&mut self) -> u64 {
            0
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            dest.fill(0);
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
            dest.fill(0);
            Ok(())
        }
    }

    fn stream(n: usize, edges: &[(u64, u64)]) -> EdgeStream {
        validate_stream(edges.iter().copied(), n).unwrap()
    }

    fn config(alpha: u32) -> EstimatorConfig {
        EstimatorConfig::new(alpha, 0.5, 16, 7)
    }

    #[test]
    fn init_state() {
        let s = SamplerState::init(config(2)).unwrap();
        assert_eq!(s.tracked_len(), 0);
        assert_eq!(s.level(), 0);
        assert_eq!(s.sampling_probability(), 1.0);
        assert_eq!(s.estimate(), Estimate::ZERO);
        assert_eq!(s.capacity(), default_capacity(0.5, 16));
        assert_eq!(s.capacity(), 480);
    }

    #[test]
    fn invalid_configs() {
        for eps in [0.0, 1.0, -0.1, f64::NAN] {
            let err = SamplerState::init(EstimatorConfig::new(1, eps, 10, 0)).unwrap_err();
            assert!(matches!(
                err,
                EstimatorError::InvalidConfig {
                    field: "epsilon",
                    ..
                }
            ));
        }
        let err = SamplerState::init(EstimatorConfig::new(1, 0.5, 1, 0)).unwrap_err();
        assert!(matches!(err, EstimatorError::InvalidConfig { field: "n", .. }));
        let err = SamplerState::init(config(1).with_capacity(0)).unwrap_err();
        assert!(matches!(
            err,
            EstimatorError::InvalidConfig {
                field: "capacity",
                ..
            }
        ));
    }

    #[test]
    fn capacity_override() {
        let s = SamplerState::init(config(1).with_capacity(5)).unwrap();
        assert_eq!(s.capacity(), 5);
    }

    #[test]
    fn default_capacity_values() {
        assert_eq!(default_capacity(0.5, 2), 120);
        assert_eq!(default_capacity(0.1, 1024), 30_000);
        assert_eq!(default_capacity(0.2, 1000), 7_475);
    }

    #[test]
    fn later_edge_expires_tracked_edge() {
        let mut s = SamplerState::init(config(0)).unwrap();
        s.process_edge(Edge::new(0, 1)).unwrap();
        assert_eq!(s.get(&Edge::new(0, 1)).map(|t| (t.c_u, t.c_v)), Some((0, 0)));
        s.process_edge(Edge::new(1, 2)).unwrap();
        let left: Vec<Edge> = s.tracked().map(|t| t.edge).collect();
        assert_eq!(left, vec![Edge::new(1, 2)]);
        assert_eq!(s.get(&Edge::new(1, 2)).map(|t| (t.c_u, t.c_v)), Some((0, 0)));
    }

    #[test]
    fn counters_track_the_right_endpoint() {
        let mut s = SamplerState::init(config(3)).unwrap();
        for (a, b) in [(5, 9), (9, 1), (2, 5), (9, 3)] {
            s.process_edge(Edge::new(a, b)).unwrap();
        }
        let t = s.get(&Edge::new(5, 9)).unwrap();
        assert_eq!((t.edge.u(), t.c_u, t.c_v), (5, 1, 2));
        let t = s.get(&Edge::new(9, 1)).unwrap();
        assert_eq!((t.c_u, t.c_v), (1, 0));
    }

    #[test]
    fn forced_heads_grows_by_one() {
        let mut s = SamplerState::with_rng(config(5).with_capacity(10), AlwaysHeads).unwrap();
        // Lift the level artificially; the injected coin still admits.
        s.level = 3;
        for (i, (a, b)) in [(0u32, 1u32), (2, 3), (4, 5)].into_iter().enumerate() {
            s.process_edge(Edge::new(a, b)).unwrap();
            assert_eq!(s.tracked_len(), i + 1);
            assert_eq!(s.level(), 3);
        }
    }

    #[test]
    fn overflow_triggers_halving() {
        let cap = 4;
        let edges: Vec<(u64, u64)> = (0..5).map(|i| (2 * i, 2 * i + 1)).collect();
        let st = stream(10, &edges);
        for seed in 0..50 {
            let mut s = SamplerState::init(config(1).with_capacity(cap).with_seed(seed)).unwrap();
            for &e in &st.edges()[..4] {
                s.process_edge(e).unwrap();
            }
            assert_eq!((s.tracked_len(), s.level()), (cap, 0));
            s.process_edge(st.edges()[4]).unwrap();
            assert!(s.level() >= 1);
            assert!(s.tracked_len() <= cap);
        }
    }

    #[test]
    fn finalize_cases() {
        let s = SamplerState::init(config(0)).unwrap();
        assert_eq!(s.finalize(), Estimate::ZERO);

        let st = stream(4, &[(0, 1), (2, 3), (1, 2)]);
        for seed in 0..10 {
            let est = run(&st, &config(0).with_seed(seed).with_capacity(3)).unwrap();
            assert_eq!(est.value(), Some(2));
        }
    }

    #[test]
    fn duplicate_detection_is_opt_in() {
        let st = [Edge::new(0, 1), Edge::new(1, 0)];
        let mut s = SamplerState::init(config(1).with_duplicate_detection(true)).unwrap();
        s.process_edge(st[0]).unwrap();
        assert_eq!(
            s.process_edge(st[1]),
            Err(EstimatorError::DuplicateEdge {
                edge: Edge::new(0, 1),
                position: 1
            })
        );
        let mut s = SamplerState::init(config(1)).unwrap();
        s.process_edge(st[0]).unwrap();
        assert!(s.process_edge(st[1]).is_ok());
    }

    #[test]
    fn stream_larger_than_config_is_rejected() {
        let st = stream(100, &[(0, 99)]);
        assert_eq!(
            run(&st, &config(1)),
            Err(EstimatorError::VertexCountMismatch {
                stream_n: 100,
                config_n: 16
            })
        );
    }

    #[test]
    fn matching_interval() {
        let st = stream(2, &[(0, 1)]);
        let cfg = EstimatorConfig::new(3, 0.5, 2, 1);
        let m = estimate_matching(&st, &cfg).unwrap();
        assert_eq!(m.estimate.value(), Some(1));
        assert!((m.lower - 1.0 / 7.5).abs() < 1e-12);
        assert!((m.upper - 2.0).abs() < 1e-12);
        assert!(m.contains(1));

        let m = estimate_matching(&EdgeStream::empty(2), &cfg).unwrap();
        assert_eq!((m.estimate.value(), m.lower, m.upper), (Some(0), 0.0, 0.0));
    }

    #[test]
    fn estimate_ordering_is_exact() {
        let e = |count, level| Estimate { count, level };
        assert_eq!(e(4, 0), e(1, 2));
        assert!(e(3, 1) < e(1, 3));
        assert!(e(1, 200) > e(u64::MAX, 0));
        assert!(e(0, 200) < e(1, 0));
        assert_eq!(e(0, 5), Estimate::ZERO);
        assert_eq!(e(1, 200).value(), None);
        assert_eq!(e(3, 4).value(), Some(48));
        assert_eq!(e(3, 4).to_string(), "48");
    }

    #[test]
    fn coin_probabilities() {
        let mut rng = seeded_rng(3);
        let trials = 40_000;
        let heads = (0..trials).filter(|_| coin_pow2(&mut rng, 2)).count();
        let rate = heads as f64 / trials as f64;
        assert!((rate - 0.25).abs() < 0.02, "rate {rate}");
        assert!(coin_pow2(&mut rng, 0));
        assert!(coin_pow2(&mut AlwaysHeads, 150));
    }
}
