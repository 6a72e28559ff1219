//! Differential feedback codec.
//!
//! One OFDM symbol's codeword indices `[i_1, ..., i_M]` become a
//! [`SymbolVector`]: `i_1` as is, then for each neighbor pair the rank of
//! `i_{m+1}` in `i_m`'s transition-table ordering. The ranks are Huffman
//! coded into a [`FeedbackMessage`]:
//!
//! ```text
//! [ i_1 : log2(N) bits, big-endian ][ codeword(X_2) ... codeword(X_M) ]
//! ```
//!
//! packed MSB-first and zero-padded to a byte boundary at the end only.
//!
//! Both ends run a [`CodecSession`]. Each message is coded with tables built
//! from the counts of all *earlier* messages; afterwards both sides add the
//! message's symbols to their counts and rebuild. With an error-free feedback
//! link the two sessions therefore hold identical models at all times.

mod bits;
mod huffman;
mod model;
mod session;

use alloc::vec::Vec;

pub use bits::{BitReader, BitWriter};
pub use huffman::{entropy_bits, huffman_build, CodeTable, DISTRIBUTION_TOLERANCE, MAX_CODE_LENGTH};
pub use model::{ProbabilityMode, ProbabilityModel};
pub use session::{CodecSession, FeedbackMessage, Role};

use crate::beamform::IndexVector;
use crate::codebook::TransitionTable;

/// The block message of one OFDM symbol before entropy coding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolVector {
    /// Codeword index of the first cluster.
    pub first_index: usize,
    /// Rank of each following cluster's codeword relative to its predecessor
    /// (0 = same codeword).
    pub transitions: Vec<usize>,
}

/// `X_{m+1} = xi_{i_m}(i_{m+1})`.
pub fn differential_encode_indices(iv: &IndexVector, tt: &TransitionTable) -> SymbolVector {
    assert!(!iv.is_empty(), "index vector must cover at least one cluster");
    SymbolVector {
        first_index: iv[0],
        transitions: iv.windows(2).map(|w| tt.symbol(w[0], w[1])).collect(),
    }
}

/// Inverse of [`differential_encode_indices`]: `i_{m+1} = q_{i_m}(X_{m+1})`.
pub fn differential_decode_indices(sv: &SymbolVector, tt: &TransitionTable) -> IndexVector {
    let mut out = Vec::with_capacity(sv.transitions.len() + 1);
    let mut cur = sv.first_index;
    out.push(cur);
    for &k in &sv.transitions {
        cur = tt.target(cur, k);
        out.push(cur);
    }
    IndexVector(out)
}
