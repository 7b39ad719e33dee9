//! Exact arboricity of small graphs.
//!
//! By Nash-Williams, the minimum number of forests covering a graph equals
//! the maximum of `ceil(|E(S)| / (|S| - 1))` over vertex subsets `S` with at
//! least two vertices. Isolated vertices never raise that maximum, so only
//! the vertices that carry edges are enumerated.

use thiserror::Error;

use crate::graph::{Graph, Vertex};

/// Largest number of non-isolated vertices [`exact_arboricity`] will enumerate.
pub const ARBORICITY_VERTEX_CAP: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArboricityError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("{vertices} non-isolated vertices exceeds the enumeration cap of {cap}")]
    InstanceTooLarge { vertices: usize, cap: usize },
}

pub fn exact_arboricity(g: &Graph) -> Result<usize, ArboricityError> {
    exact_arboricity_capped(g, ARBORICITY_VERTEX_CAP)
}

pub fn exact_arboricity_capped(g: &Graph, cap: usize) -> Result<usize, ArboricityError> {
    if g.edge_count() == 0 {
        return Err(ArboricityError::EmptyGraph);
    }
    let active = g.active_vertices();
    let k = active.len();
    if k > cap || k > 24 {
        return Err(ArboricityError::InstanceTooLarge { vertices: k, cap });
    }
    let index = |v: Vertex| active.binary_search(&v).expect("endpoint is active");
    let mut nbr = vec![0u32; k];
    for e in g.edges() {
        let (a, b) = (index(e.u()), index(e.v()));
        nbr[a] |= 1 << b;
        nbr[b] |= 1 << a;
    }

    // induced[S] = number of edges with both ends in S, built by peeling off
    // the lowest vertex of S.
    let mut induced = vec![0u32; 1 << k];
    let mut best = 0;
    for set in 1usize..(1 << k) {
        let low = set.trailing_zeros() as usize;
        let rest = set & (set - 1);
        induced[set] = induced[rest] + (nbr[low] & rest as u32).count_ones();
        let size = set.count_ones();
        if size >= 2 {
            best = best.max(induced[set].div_ceil(size - 1));
        }
    }
    Ok(best as usize)
}
