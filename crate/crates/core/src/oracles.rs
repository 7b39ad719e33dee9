//! Exact whole-stream reference computations.
//!
//! Everything here holds the full stream in memory. These functions are the
//! ground truth the streaming estimator is checked against.
//!
//! An edge `uv` at stream position `j` *qualifies* for threshold `alpha` when
//! at most `alpha` later edges touch `u` and at most `alpha` later edges touch
//! `v`. `E_alpha` is the set of qualifying edges, `E_alpha^t` the same set
//! computed on the length-`t` prefix, and `E*` the maximum of `|E_alpha^t|`
//! over all `t`.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::graph::{Edge, EdgeStream, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("prefix length {t} outside 1..={len}")]
    PrefixOutOfRange { t: usize, len: usize },
}

/// Per stream position `j` holding edge `uv`: `(a, b)` where `a` counts the
/// edges after `j` that touch `u` and `b` those that touch `v`.
pub fn tail_degrees(s: &EdgeStream) -> Vec<(usize, usize)> {
    tail_degrees_of(s.edges())
}

fn tail_degrees_of(edges: &[Edge]) -> Vec<(usize, usize)> {
    let mut later: HashMap<Vertex, usize> = HashMap::new();
    let mut out = vec![(0, 0); edges.len()];
    for (j, e) in edges.iter().enumerate().rev() {
        let a = later.get(&e.u()).copied().unwrap_or(0);
        let b = later.get(&e.v()).copied().unwrap_or(0);
        out[j] = (a, b);
        *later.entry(e.u()).or_insert(0) += 1;
        *later.entry(e.v()).or_insert(0) += 1;
    }
    out
}

fn qualifying(edges: &[Edge], alpha: usize) -> impl Iterator<Item = &Edge> {
    let tails = tail_degrees_of(edges);
    edges
        .iter()
        .zip(tails)
        .filter(move |(_, (a, b))| *a <= alpha && *b <= alpha)
        .map(|(e, _)| e)
}

/// `|E_alpha|` and the set itself.
pub fn exact_e_alpha(s: &EdgeStream, alpha: usize) -> (usize, BTreeSet<Edge>) {
    let set: BTreeSet<Edge> = qualifying(s.edges(), alpha).copied().collect();
    (set.len(), set)
}

/// `|E_alpha^t|`, the qualifying-edge count of the first `t` edges.
pub fn exact_e_alpha_prefix(s: &EdgeStream, alpha: usize, t: usize) -> Result<usize, OracleError> {
    if t == 0 || t > s.len() {
        return Err(OracleError::PrefixOutOfRange { t, len: s.len() });
    }
    Ok(qualifying(&s.edges()[..t], alpha).count())
}

/// `|E_alpha^t|` for every prefix, plus its maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixProfile {
    /// `e_alpha_t[t - 1]` is `|E_alpha^t|`.
    pub e_alpha_t: Vec<usize>,
    pub e_star: usize,
    /// Earliest prefix length attaining `e_star`; 0 for an empty stream.
    pub argmax_t: usize,
}

/// Computes the full prefix profile by re-evaluating every prefix, `O(m^2)`.
pub fn exact_e_star(s: &EdgeStream, alpha: usize) -> PrefixProfile {
    let e_alpha_t: Vec<usize> = (1..=s.len())
        .map(|t| qualifying(&s.edges()[..t], alpha).count())
        .collect();
    let (mut e_star, mut argmax_t) = (0, 0);
    for (i, &c) in e_alpha_t.iter().enumerate() {
        if c > e_star {
            e_star = c;
            argmax_t = i + 1;
        }
    }
    PrefixProfile {
        e_alpha_t,
        e_star,
        argmax_t,
    }
}

/// Heavy vertices and the good/wasted edge tallies for one stream.
///
/// A vertex is heavy when its degree is at least `alpha + 1`. For heavy `u`,
/// `B_u` is its last `alpha + 1` incident edges; a light endpoint accepts
/// every incident edge. An edge is good when both endpoints accept it and
/// wasted when it joins two heavy vertices and exactly one of them accepts
/// it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosticReport {
    pub heavy: BTreeSet<Vertex>,
    /// Good edges with no heavy endpoint.
    pub w: usize,
    /// Good edges with exactly one heavy endpoint.
    pub x: usize,
    /// Good edges with two heavy endpoints.
    pub y: usize,
    /// Wasted edges between two heavy vertices.
    pub z: usize,
    /// Edges with no heavy endpoint.
    pub e_l: usize,
    /// `|E_alpha|` from the tail-degree route.
    pub e_alpha: usize,
}

impl DiagnosticReport {
    /// Names of the unconditional identities that fail on this report.
    pub fn violated_identities(&self, alpha: usize) -> Vec<&'static str> {
        let mut bad = Vec::new();
        if self.e_alpha != self.w + self.x + self.y {
            bad.push("e_alpha = w + x + y");
        }
        if self.w != self.e_l {
            bad.push("w = e_l");
        }
        if self.x + 2 * self.y + self.z != (alpha + 1) * self.heavy.len() {
            bad.push("x + 2y + z = (alpha + 1)|H|");
        }
        bad
    }

    /// Names of the inequalities that must hold when the arboricity is at
    /// most `alpha` and fail on this report.
    pub fn violated_arboricity_bounds(&self, alpha: usize) -> Vec<&'static str> {
        let h = self.heavy.len();
        let mut bad = Vec::new();
        if self.y + self.z > alpha * h {
            bad.push("y + z <= alpha|H|");
        }
        if self.x + self.y < h {
            bad.push("x + y >= |H|");
        }
        bad
    }
}

/// Builds the [`DiagnosticReport`] from explicit `B_u` sets, independently of
/// the tail-degree computation that yields `e_alpha`.
pub fn classify_edges(s: &EdgeStream, alpha: usize) -> DiagnosticReport {
    let mut incident: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (j, e) in s.iter().enumerate() {
        for w in e.endpoints() {
            incident.entry(w).or_default().push(j);
        }
    }
    let heavy: BTreeSet<Vertex> = incident
        .iter()
        .filter(|(_, positions)| positions.len() > alpha)
        .map(|(&v, _)| v)
        .collect();
    // Positions are pushed in stream order, so the tail of each list is the
    // most recent edges.
    let last_edges: HashMap<Vertex, HashSet<usize>> = heavy
        .iter()
        .map(|&v| {
            let positions = &incident[&v];
            let tail = positions[positions.len() - (alpha + 1)..].iter().copied().collect();
            (v, tail)
        })
        .collect();
    let accepts = |w: Vertex, j: usize| last_edges.get(&w).is_none_or(|b| b.contains(&j));

    let mut report = DiagnosticReport {
        heavy: heavy.clone(),
        w: 0,
        x: 0,
        y: 0,
        z: 0,
        e_l: 0,
        e_alpha: exact_e_alpha(s, alpha).0,
    };
    for (j, e) in s.iter().enumerate() {
        let heavy_ends = e.endpoints().iter().filter(|w| heavy.contains(w)).count();
        let (in_u, in_v) = (accepts(e.u(), j), accepts(e.v(), j));
        if heavy_ends == 0 {
            report.e_l += 1;
        }
        if in_u && in_v {
            match heavy_ends {
                0 => report.w += 1,
                1 => report.x += 1,
                _ => report.y += 1,
            }
        } else if heavy_ends == 2 && in_u != in_v {
            report.z += 1;
        }
    }
    report
}
