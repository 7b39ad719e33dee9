//! Exact maximum-cardinality matching on general graphs.
//!
//! Two independent routes: an exhaustive search over vertex-disjoint edge
//! sets, which is the reference oracle for small instances, and Edmonds'
//! blossom algorithm, which is polynomial and used where the exhaustive
//! search is out of reach. Tests cross-check one against the other.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error(
        "instance too large for exhaustive matching: {edges} edges on {vertices} active vertices"
    )]
    InstanceTooLarge { edges: usize, vertices: usize },
}

/// Size limits for the exhaustive search.
///
/// The search visits every matching of the graph at most once, so its cost
/// is bounded both by `2^edges` and by the number of matchings on the active
/// vertices. An instance is accepted when either bound is small.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveCap {
    pub max_edges: usize,
    pub max_vertices: usize,
}

impl Default for ExhaustiveCap {
    fn default() -> Self {
        ExhaustiveCap {
            max_edges: 24,
            max_vertices: 16,
        }
    }
}

impl ExhaustiveCap {
    pub fn admits(&self, g: &Graph) -> bool {
        let active = g.active_vertices().len();
        active <= 64 && (g.edge_count() <= self.max_edges || active <= self.max_vertices)
    }
}

/// `match(g)` by exhaustive search under the default cap.
pub fn maximum_matching_size(g: &Graph) -> Result<usize, MatchingError> {
    maximum_matching_size_capped(g, ExhaustiveCap::default())
}

pub fn maximum_matching_size_capped(g: &Graph, cap: ExhaustiveCap) -> Result<usize, MatchingError> {
    if !cap.admits(g) {
        return Err(MatchingError::InstanceTooLarge {
            edges: g.edge_count(),
            vertices: g.active_vertices().len(),
        });
    }
    let (k, adj) = compact_adjacency(g);
    let nbr: Vec<u64> = adj
        .iter()
        .map(|list| list.iter().fold(0u64, |m, &w| m | (1 << w)))
        .collect();
    let mut search = Exhaustive { nbr, best: 0 };
    let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    search.descend(all, 0);
    Ok(search.best)
}

struct Exhaustive {
    /// Neighbourhood bitmask per compacted vertex.
    nbr: Vec<u64>,
    best: usize,
}

impl Exhaustive {
    /// `free` holds the vertices not yet decided. The lowest one is either
    /// left unmatched or matched to one of its free neighbours.
    fn descend(&mut self, mut free: u64, size: usize) {
        // Vertices with no free neighbour can never be matched from here on.
        let mut live = 0u64;
        let mut rest = free;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.nbr[v] & free != 0 {
                live |= 1 << v;
            }
        }
        free = live;
        if size + (free.count_ones() as usize) / 2 <= self.best {
            return;
        }
        if free == 0 {
            self.best = self.best.max(size);
            return;
        }
        let v = free.trailing_zeros() as usize;
        let without_v = free & !(1 << v);
        let mut partners = self.nbr[v] & without_v;
        while partners != 0 {
            let w = partners.trailing_zeros() as usize;
            partners &= partners - 1;
            self.descend(without_v & !(1 << w), size + 1);
        }
        self.descend(without_v, size);
    }
}

/// Relabels active vertices to `0..k` and returns `(k, adjacency)`.
fn compact_adjacency(g: &Graph) -> (usize, Vec<Vec<usize>>) {
    let active = g.active_vertices();
    let index: HashMap<Vertex, usize> = active.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); active.len()];
    for e in g.edges() {
        let (a, b) = (index[&e.u()], index[&e.v()]);
        adj[a].push(b);
        adj[b].push(a);
    }
    (active.len(), adj)
}

const NONE: usize = usize::MAX;

/// `match(g)` by Edmonds' blossom algorithm, `O(V^3)`; no size cap.
pub fn blossom_matching_size(g: &Graph) -> usize {
    let (k, adj) = compact_adjacency(g);
    let mut b = Blossom::new(k, adj);
    b.solve()
}

struct Blossom {
    adj: Vec<Vec<usize>>,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom {
    fn new(k: usize, adj: Vec<Vec<usize>>) -> Self {
        Blossom {
            adj,
            mate: vec![NONE; k],
            parent: vec![NONE; k],
            base: (0..k).collect(),
            used: vec![false; k],
            in_blossom: vec![false; k],
            queue: VecDeque::new(),
        }
    }

    fn solve(&mut self) -> usize {
        let k = self.mate.len();
        // Greedy warm start; augmenting from every exposed vertex fixes it up.
        for v in 0..k {
            if self.mate[v] == NONE {
                if let Some(&w) = self.adj[v].iter().find(|&&w| self.mate[w] == NONE) {
                    self.mate[v] = w;
                    self.mate[w] = v;
                }
            }
        }
        for root in 0..k {
            if self.mate[root] != NONE {
                continue;
            }
            if let Some(mut v) = self.find_augmenting_path(root) {
                while v != NONE {
                    let pv = self.parent[v];
                    let next = self.mate[pv];
                    self.mate[v] = pv;
                    self.mate[pv] = v;
                    v = next;
                }
            }
        }
        self.mate.iter().filter(|&&m| m != NONE).count() / 2
    }

    fn lowest_common_ancestor(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_augmenting_path(&mut self, root: usize) -> Option<usize> {
        let k = self.mate.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);

        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lowest_common_ancestor(v, to);
                    self.in_blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..k {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        None
    }
}
