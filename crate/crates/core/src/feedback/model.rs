use alloc::vec;
use alloc::vec::Vec;

use crate::codebook::TransitionTable;

use super::SymbolVector;

/// Whether transition statistics are shared by all source codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbabilityMode {
    /// One distribution `p(k)` for every source codeword.
    Pooled,
    /// One distribution `p(k)_i` per source codeword `i`.
    PerIndex,
}

/// Transition-symbol counts with add-one smoothed estimates.
///
/// The estimate for symbol `k` in a context with `total` observations is
/// `(count[k] + 1) / (total + N)`: uniform before any data, converging to the
/// raw frequency `count[k] / total` as observations accumulate, and never
/// zero, so every symbol stays encodable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityModel {
    mode: ProbabilityMode,
    size: usize,
    counts: Vec<u64>,
    totals: Vec<u64>,
}

impl ProbabilityModel {
    pub fn new(mode: ProbabilityMode, size: usize) -> Self {
        let contexts = match mode {
            ProbabilityMode::Pooled => 1,
            ProbabilityMode::PerIndex => size,
        };
        ProbabilityModel {
            mode,
            size,
            counts: vec![0; contexts * size],
            totals: vec![0; contexts],
        }
    }

    pub fn mode(&self) -> ProbabilityMode {
        self.mode
    }

    /// Alphabet size `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of separate distributions: 1 pooled, `N` per-index.
    pub fn contexts(&self) -> usize {
        self.totals.len()
    }

    /// Distribution used for transitions out of `source`.
    #[inline]
    pub fn context_of(&self, source: usize) -> usize {
        match self.mode {
            ProbabilityMode::Pooled => 0,
            ProbabilityMode::PerIndex => source,
        }
    }

    pub fn counts(&self, context: usize) -> &[u64] {
        &self.counts[context * self.size..(context + 1) * self.size]
    }

    pub fn total(&self, context: usize) -> u64 {
        self.totals[context]
    }

    /// Records one transition out of `source` with symbol `symbol`.
    pub fn observe(&mut self, source: usize, symbol: usize) {
        let ctx = self.context_of(source);
        self.counts[ctx * self.size + symbol] += 1;
        self.totals[ctx] += 1;
    }

    /// Records every transition of one feedback message. Source indices are
    /// recovered by walking the transition table from `first_index`.
    pub fn update(&mut self, sv: &SymbolVector, tt: &TransitionTable) {
        let mut source = sv.first_index;
        for &k in &sv.transitions {
            self.observe(source, k);
            source = tt.target(source, k);
        }
    }

    /// Smoothed estimate `(count + 1) / (total + N)`.
    pub fn probabilities(&self, context: usize) -> Vec<f64> {
        let denom = (self.totals[context] + self.size as u64) as f64;
        self.counts(context).iter().map(|&c| (c + 1) as f64 / denom).collect()
    }

    /// Unnormalized smoothed weights `count + 1`; exact integers, so the
    /// Huffman construction from them is bit-reproducible.
    pub fn weights(&self, context: usize) -> Vec<f64> {
        self.counts(context).iter().map(|&c| (c + 1) as f64).collect()
    }

    /// Raw frequencies `count / total`; `None` before any observation.
    pub fn raw_estimate(&self, context: usize) -> Option<Vec<f64>> {
        let total = self.totals[context];
        (total > 0).then(|| self.counts(context).iter().map(|&c| c as f64 / total as f64).collect())
    }

    /// Adds another model's counts (same mode and size).
    pub fn merge(&mut self, other: &ProbabilityModel) {
        assert_eq!((self.mode, self.size), (other.mode, other.size), "incompatible models");
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        self.totals.iter_mut().zip(&other.totals).for_each(|(a, b)| *a += b);
    }
}
