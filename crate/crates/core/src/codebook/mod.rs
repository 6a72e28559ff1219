//! Grassmannian beamforming codebooks.
//!
//! A codebook is `N` unit vectors in `C^Mt`, shared by both ends of the link.
//! Its quality is the minimum chordal distance between the lines the vectors
//! span; its [`TransitionTable`] ranks, for each codeword, every codeword by
//! decreasing correlation, which is what the differential feedback encodes.

mod glp;
mod transition;

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{inner, norm2};

pub use glp::{generate_glp_codebook, GeneratedCodebook};
pub use transition::{build_transition_table, property1_deviation, TransitionTable};

/// Codewords whose norm is within this distance of 1 are renormalized;
/// anything further off is rejected.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Pairs closer than this chordal distance count as duplicates.
pub const DUPLICATE_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum CodebookSource {
    Inline,
    File(String),
    Generated {
        seed: u64,
        restarts: usize,
        iterations: usize,
    },
}

/// A validated set of unit-norm beamforming vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
    min_distance: f64,
    source: CodebookSource,
}

impl Codebook {
    /// Validates and normalizes `vectors`. Errors name the offending vector
    /// by its 0-based position.
    pub fn new(dim: usize, mut vectors: Vec<Vec<Complex64>>, source: CodebookSource) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("codebook dimension must be positive"));
        }
        if vectors.len() < 2 {
            return Err(Error::domain(alloc::format!(
                "codebook needs at least 2 vectors, got {}",
                vectors.len()
            )));
        }
        for (i, v) in vectors.iter_mut().enumerate() {
            if v.len() != dim {
                return Err(Error::domain(alloc::format!(
                    "vector {i} has {} entries, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::domain(alloc::format!("vector {i} has non-finite entries")));
            }
            let n = norm2(v);
            if (n - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::domain(alloc::format!("vector {i} has norm {n}, expected 1")));
            }
            v.iter_mut().for_each(|z| *z /= n);
        }
        if let Some((k, l, d)) = closest_pair(&vectors) {
            if d <= DUPLICATE_DISTANCE {
                return Err(Error::domain(alloc::format!(
                    "vectors {k} and {l} span the same line (distance {d:e})"
                )));
            }
        }
        let min_distance = min_distance(&vectors);
        Ok(Codebook {
            dim,
            vectors,
            min_distance,
            source,
        })
    }

    /// `Mt`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N`.
    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub fn source(&self) -> &CodebookSource {
        &self.source
    }

    pub fn with_source(mut self, source: CodebookSource) -> Self {
        self.source = source;
        self
    }
}

/// `sqrt(1 - |a^H b|^2)` for unit vectors.
pub fn chordal_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    libm::sqrt((1.0 - inner(a, b).norm_sqr()).max(0.0))
}

fn closest_pair(vectors: &[Vec<Complex64>]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for k in 0..vectors.len() {
        for l in k + 1..vectors.len() {
            let d = chordal_distance(&vectors[k], &vectors[l]);
            if best.is_none_or(|(_, _, b)| d < b) {
                best = Some((k, l, d));
            }
        }
    }
    best
}

/// Minimum pairwise chordal distance; `1.0` for fewer than two vectors.
pub fn min_distance(vectors: &[Vec<Complex64>]) -> f64 {
    closest_pair(vectors).map_or(1.0, |(_, _, d)| d)
}
