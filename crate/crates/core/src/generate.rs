//! Seeded test-instance generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, EdgeStream, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("forest union needs n >= 2, got {0}")]
    TooFewVertices(usize),
    #[error("forest union needs alpha >= 1")]
    ZeroForests,
    #[error("n = {0} exceeds the vertex id range")]
    TooManyVertices(usize),
}

/// The deterministic generator used everywhere a seed turns into randomness.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives the seed of trial `index` from a master seed (SplitMix64 finaliser
/// over the pair), so sweeps can hand each trial an independent stream that
/// does not depend on execution order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A stream whose edge set is the union of `alpha` random spanning trees on
/// `0..n`, in uniformly random order.
///
/// Each tree is a random recursive tree over a fresh random vertex
/// permutation. An edge already contributed by an earlier tree is dropped
/// rather than resampled, so the result has arboricity at most `alpha` but
/// usually slightly fewer than `alpha * (n - 1)` edges.
pub fn generate_forest_union(n: usize, alpha: usize, seed: u64) -> Result<EdgeStream, GenerateError> {
    if n < 2 {
        return Err(GenerateError::TooFewVertices(n));
    }
    if alpha == 0 {
        return Err(GenerateError::ZeroForests);
    }
    if n > Vertex::MAX as usize {
        return Err(GenerateError::TooManyVertices(n));
    }
    let mut rng = seeded_rng(seed);
    let mut seen = HashSet::with_capacity(alpha * n);
    let mut edges = Vec::with_capacity(alpha * n);
    let mut order: Vec<Vertex> = (0..n as Vertex).collect();
    for _ in 0..alpha {
        order.shuffle(&mut rng);
        for i in 1..n {
            let parent = order[rng.gen_range(0..i)];
            let edge = Edge::new(order[i], parent);
            if seen.insert(edge) {
                edges.push(edge);
            }
        }
    }
    edges.shuffle(&mut rng);
    Ok(EdgeStream::from_parts_unchecked(edges, n))
}

/// Same edges, uniformly random order.
pub fn shuffle_stream(s: &EdgeStream, seed: u64) -> EdgeStream {
    let mut edges = s.edges().to_vec();
    edges.shuffle(&mut seeded_rng(seed));
    EdgeStream::from_parts_unchecked(edges, s.n())
}
