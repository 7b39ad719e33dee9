//! Edges, edge streams and the order-free graph view.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// Vertex identifier.
pub type Vertex = u32;

/// An undirected edge between two distinct vertices.
///
/// The endpoints keep the orientation they were given in (`u` is the first
/// endpoint read from the stream), but equality, ordering and hashing all go
/// through the unordered key, so `{u, v}` and `{v, u}` are the same edge.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    u: Vertex,
    v: Vertex,
}

impl Edge {
    /// Builds an edge, returning `None` for a self-loop.
    pub fn try_new(u: Vertex, v: Vertex) -> Option<Self> {
        (u != v).then_some(Edge { u, v })
    }

    /// Builds an edge.
    ///
    /// Panics on a self-loop; use [`Edge::try_new`] for untrusted input.
    pub fn new(u: Vertex, v: Vertex) -> Self {
        Self::try_new(u, v).unwrap_or_else(|| panic!("self-loop at vertex {u}"))
    }

    #[inline]
    pub fn u(&self) -> Vertex {
        self.u
    }

    #[inline]
    pub fn v(&self) -> Vertex {
        self.v
    }

    #[inline]
    pub fn endpoints(&self) -> [Vertex; 2] {
        [self.u, self.v]
    }

    /// The endpoints as `(min, max)`.
    #[inline]
    pub fn key(&self) -> (Vertex, Vertex) {
        if self.u < self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }

    #[inline]
    pub fn touches(&self, w: Vertex) -> bool {
        self.u == w || self.v == w
    }

    /// True when the two edges have at least one endpoint in common.
    #[inline]
    pub fn shares_endpoint(&self, other: &Edge) -> bool {
        other.touches(self.u) || other.touches(self.v)
    }
}

impl PartialEq for Edge {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Edge {}

impl Hash for Edge {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// Rejections from [`validate_stream`]. Each carries the first offending
/// stream position (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("vertex count must be at least 1")]
    EmptyVertexSet,
    #[error("self-loop at stream position {0}")]
    SelfLoop(usize),
    #[error("duplicate edge at stream position {0}")]
    DuplicateEdge(usize),
    #[error("vertex id out of range at stream position {0}")]
    VertexOutOfRange(usize),
}

impl StreamError {
    /// The stream position the error refers to, if any.
    pub fn position(&self) -> Option<usize> {
        match *self {
            StreamError::EmptyVertexSet => None,
            StreamError::SelfLoop(p)
            | StreamError::DuplicateEdge(p)
            | StreamError::VertexOutOfRange(p) => Some(p),
        }
    }
}

/// A finite, ordered sequence of distinct edges over vertices `0..n`.
///
/// Order matters: every quantity computed downstream depends on which edges
/// arrive after which.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeStream {
    edges: Vec<Edge>,
    n: usize,
}

impl EdgeStream {
    /// An empty stream over `n` vertices.
    pub fn empty(n: usize) -> Self {
        EdgeStream { edges: Vec::new(), n }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Declared vertex count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Edge> {
        self.edges.iter()
    }

    /// The first `t` edges as a stream of their own.
    ///
    /// Panics if `t > self.len()`.
    pub fn prefix(&self, t: usize) -> EdgeStream {
        EdgeStream {
            edges: self.edges[..t].to_vec(),
            n: self.n,
        }
    }

    /// The order-free view of this stream.
    pub fn graph(&self) -> Graph {
        Graph {
            n: self.n,
            edges: self.edges.clone(),
        }
    }

    /// Wraps edges already known to be distinct, loop-free and in range.
    pub(crate) fn from_parts_unchecked(edges: Vec<Edge>, n: usize) -> Self {
        EdgeStream { edges, n }
    }
}

impl<'a> IntoIterator for &'a EdgeStream {
    type Item = &'a Edge;
    type IntoIter = std::slice::Iter<'a, Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.edges.iter()
    }
}

/// Checks a raw endpoint sequence against the simple-graph model and wraps it
/// as an [`EdgeStream`], preserving order.
///
/// Positions are checked in order; within one position a self-loop is
/// reported before an out-of-range id.
pub fn validate_stream<I>(raw: I, n: usize) -> Result<EdgeStream, StreamError>
where
    I: IntoIterator<Item = (u64, u64)>,
{
    if n == 0 {
        return Err(StreamError::EmptyVertexSet);
    }
    let raw = raw.into_iter();
    let mut seen = std::collections::HashSet::with_capacity(raw.size_hint().0);
    let mut edges = Vec::with_capacity(raw.size_hint().0);
    for (pos, (a, b)) in raw.enumerate() {
        if a == b {
            return Err(StreamError::SelfLoop(pos));
        }
        if a >= n as u64 || b >= n as u64 || a > Vertex::MAX as u64 || b > Vertex::MAX as u64 {
            return Err(StreamError::VertexOutOfRange(pos));
        }
        let edge = Edge::new(a as Vertex, b as Vertex);
        if !seen.insert(edge) {
            return Err(StreamError::DuplicateEdge(pos));
        }
        edges.push(edge);
    }
    Ok(EdgeStream { edges, n })
}

/// A simple undirected graph; the set view of an [`EdgeStream`].
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from an edge collection, rejecting anything that would
    /// not be a valid stream.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, StreamError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let stream = validate_stream(edges.into_iter().map(|e| (e.u as u64, e.v as u64)), n)?;
        Ok(stream.graph())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> HashMap<Vertex, usize> {
        let mut deg = HashMap::new();
        for e in &self.edges {
            for w in e.endpoints() {
                *deg.entry(w).or_insert(0) += 1;
            }
        }
        deg
    }

    /// Vertices with at least one incident edge, sorted.
    pub fn active_vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.edges.iter().flat_map(|e| e.endpoints()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_values().max().unwrap_or(0)
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return false;
        }
        let mut a = self.edges.clone();
        let mut b = other.edges.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

impl Eq for Graph {}
