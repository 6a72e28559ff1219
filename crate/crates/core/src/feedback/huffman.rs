//! Canonical Huffman codes.
//!
//! Both ends of the feedback link rebuild their code tables from shared
//! counts, so construction is fully deterministic: the merge step always
//! combines the two lightest subtrees, ordered by `(weight, lowest symbol
//! contained)`, and codewords are then reassigned canonically in
//! `(length, symbol)` order. Only the length profile of the Huffman tree
//! survives into the table.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

/// Longest codeword a table may hold.
pub const MAX_CODE_LENGTH: u8 = 63;

/// Tolerance on `sum(p) == 1` accepted by [`huffman_build`].
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    lengths: Vec<u8>,
    codes: Vec<u64>,
    // decoding: symbols in (length, symbol) order, plus per-length counts
    sorted: Vec<usize>,
    count: Vec<usize>,
}

struct Subtree {
    weight: f64,
    min_symbol: usize,
    node: usize,
}

impl PartialEq for Subtree {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Subtree {}

impl PartialOrd for Subtree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subtree {
    // Reversed: BinaryHeap is a max-heap and we pop the lightest first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then(other.min_symbol.cmp(&self.min_symbol))
    }
}

impl CodeTable {
    /// Huffman code for positive, finite (not necessarily normalized) weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("Huffman code over an empty alphabet"));
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::domain(alloc::format!(
                "symbol {k} has weight {}; every symbol needs a positive weight",
                weights[k]
            )));
        }
        let n = weights.len();
        if n == 1 {
            return Self::from_lengths(&[1]);
        }
        let mut parent = vec![usize::MAX; 2 * n - 1];
        let mut heap: BinaryHeap<Subtree> = weights
            .iter()
            .enumerate()
            .map(|(s, &w)| Subtree {
                weight: w,
                min_symbol: s,
                node: s,
            })
            .collect();
        let mut next = n;
        while heap.len() > 1 {
            let a = heap.pop().expect("len > 1");
            let b = heap.pop().expect("len > 1");
            parent[a.node] = next;
            parent[b.node] = next;
            heap.push(Subtree {
                weight: a.weight + b.weight,
                min_symbol: a.min_symbol.min(b.min_symbol),
                node: next,
            });
            next += 1;
        }
        // Parents always have larger ids, so depths resolve top-down.
        let mut depth = vec![0usize; 2 * n - 1];
        for node in (0..2 * n - 2).rev() {
            depth[node] = depth[parent[node]] + 1;
        }
        if let Some(&d) = depth[..n].iter().max() {
            if d > MAX_CODE_LENGTH as usize {
                return Err(Error::Resource(alloc::format!(
                    "Huffman code length {d} exceeds {MAX_CODE_LENGTH}"
                )));
            }
        }
        let lengths: Vec<u8> = depth[..n].iter().map(|&d| d as u8).collect();
        Self::from_lengths(&lengths)
    }

    /// Canonical code for a length profile. Lengths must be in
    /// `1..=MAX_CODE_LENGTH` and satisfy Kraft's inequality.
    pub fn from_lengths(lengths: &[u8]) -> Result<Self> {
        if lengths.iter().any(|&l| l == 0 || l > MAX_CODE_LENGTH) {
            return Err(Error::domain("code lengths must be in 1..=63"));
        }
        let kraft: f64 = lengths.iter().map(|&l| libm::ldexp(1.0, -(l as i32))).sum();
        if kraft > 1.0 + 1e-12 {
            return Err(Error::domain("code lengths violate Kraft's inequality"));
        }
        let max_len = lengths.iter().copied().max().unwrap_or(0) as usize;
        let mut sorted: Vec<usize> = (0..lengths.len()).collect();
        sorted.sort_by_key(|&s| (lengths[s], s));
        let mut count = vec![0usize; max_len + 1];
        for &l in lengths {
            count[l as usize] += 1;
        }
        let mut codes = vec![0u64; lengths.len()];
        let mut code = 0u64;
        let mut prev_len = lengths[sorted[0]];
        for &s in &sorted {
            code <<= lengths[s] - prev_len;
            prev_len = lengths[s];
            codes[s] = code;
            code += 1;
        }
        Ok(CodeTable {
            lengths: lengths.to_vec(),
            codes,
            sorted,
            count,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn length(&self, symbol: usize) -> u8 {
        self.lengths[symbol]
    }

    /// Codeword of `symbol`, right-aligned in the low `length(symbol)` bits.
    pub fn code(&self, symbol: usize) -> u64 {
        self.codes[symbol]
    }

    pub fn encode(&self, symbol: usize, out: &mut BitWriter) {
        out.write_bits(self.codes[symbol], self.lengths[symbol] as u32);
    }

    /// Reads one codeword. `None` when the input ends mid-codeword.
    pub fn decode(&self, input: &mut BitReader<'_>) -> Option<usize> {
        let mut code = 0u64;
        let mut first = 0u64;
        let mut index = 0usize;
        for len in 1..self.count.len() {
            code = (code << 1) | input.read_bit()? as u64;
            let n = self.count[len] as u64;
            if code - first < n {
                return Some(self.sorted[index + (code - first) as usize]);
            }
            index += n as usize;
            first = (first + n) << 1;
        }
        // Only reachable for incomplete codes.
        None
    }

    /// Expected codeword length under `dist`.
    pub fn mean_length(&self, dist: &[f64]) -> f64 {
        dist.iter().zip(&self.lengths).map(|(p, &l)| p * l as f64).sum()
    }
}

/// Huffman code for a probability distribution over `0..dist.len()`.
pub fn huffman_build(dist: &[f64]) -> Result<CodeTable> {
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::domain(alloc::format!("probabilities sum to {total}, not 1")));
    }
    CodeTable::from_weights(dist)
}

/// Shannon entropy in bits; zero-probability symbols contribute nothing.
pub fn entropy_bits(dist: &[f64]) -> f64 {
    dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * libm::log2(p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn is_prefix_free(t: &CodeTable) -> bool {
        let n = t.alphabet_size();
        for a in 0..n {
            for b in 0..n {
                if a != b && t.length(a) <= t.length(b) {
                    let shift = t.length(b) - t.length(a);
                    if t.code(b) >> shift == t.code(a) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Optimal expected length by exhaustive search over length profiles
    /// (Kraft-complete, sorted against the sorted probabilities).
    fn brute_force_optimum(dist: &[f64]) -> f64 {
        let mut p = dist.to_vec();
        p.sort_by(|a, b| b.total_cmp(a));
        let n = p.len();
        fn go(p: &[f64], i: usize, min_len: u32, slack: f64, acc: f64, best: &mut f64) {
            if i == p.len() {
                if slack.abs() < 1e-12 {
                    *best = best.min(acc);
                }
                return;
            }
            let remaining = (p.len() - i) as u32;
            for l in min_len..=(p.len() as u32) {
                let w = libm::ldexp(1.0, -(l as i32));
                if w > slack + 1e-15 {
                    continue;
                }
                // remaining symbols take at most `w` each
                if w * remaining as f64 + 1e-15 < slack {
                    break;
                }
                go(p, i + 1, l, slack - w, acc + p[i] * l as f64, best);
            }
        }
        let mut best = f64::INFINITY;
        go(&p, 0, 1, 1.0, 0.0, &mut best);
        assert!(best.is_finite() || n == 1);
        best
    }

    #[test]
    fn uniform_64_is_six_bits() {
        let t = huffman_build(&[1.0 / 64.0; 64]).unwrap();
        assert!(t.lengths().iter().all(|&l| l == 6));
        assert!((t.mean_length(&[1.0 / 64.0; 64]) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn dyadic_three_symbols() {
        let dist = [0.5, 0.25, 0.25];
        let t = huffman_build(&dist).unwrap();
        assert_eq!(t.lengths(), &[1, 2, 2]);
        assert!((t.mean_length(&dist) - 1.5).abs() < 1e-15);
        assert!((entropy_bits(&dist) - 1.5).abs() < 1e-15);
        assert_eq!((t.code(0), t.code(1), t.code(2)), (0b0, 0b10, 0b11));
    }

    #[test]
    fn rejects_zero_probability_and_bad_sums() {
        assert!(matches!(huffman_build(&[0.5, 0.5, 0.0]), Err(Error::Domain(_))));
        assert!(huffman_build(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn matches_brute_force_optimum() {
        let mut rng = stream_rng(99, 0);
        for n in [2, 3, 5, 8] {
            for _ in 0..20 {
                let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let dist: Vec<f64> = raw.iter().map(|x| x / total).collect();
                let t = huffman_build(&dist).unwrap();
                assert!((t.mean_length(&dist) - brute_force_optimum(&dist)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sixteen_symbols_within_entropy_band() {
        let mut rng = stream_rng(7, 0);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..16).map(|_| rng.random_range(0.001..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let dist: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let t = huffman_build(&dist).unwrap();
            let (h, l) = (entropy_bits(&dist), t.mean_length(&dist));
            assert!(l >= h - 1e-9 && l < h + 1.0);
        }
    }

    #[test]
    fn skewed_weights_get_long_codes() {
        // Fibonacci weights produce the deepest possible tree.
        let mut w = vec![1.0, 1.0];
        for i in 2..20 {
            let next = w[i - 1] + w[i - 2];
            w.push(next);
        }
        let t = CodeTable::from_weights(&w).unwrap();
        assert_eq!(*t.lengths().iter().max().unwrap(), 19);
        assert!(is_prefix_free(&t));
    }

    proptest! {
        #[test]
        fn tables_are_prefix_free_and_decode(weights in proptest::collection::vec(1u32..1000, 2..70)) {
            let w: Vec<f64> = weights.iter().map(|&x| x as f64).collect();
            let t = CodeTable::from_weights(&w).unwrap();
            prop_assert!(is_prefix_free(&t));
            let kraft: f64 = t.lengths().iter().map(|&l| libm::ldexp(1.0, -(l as i32))).sum();
            prop_assert!((kraft - 1.0).abs() < 1e-12);
            let mut out = BitWriter::new();
            for s in 0..w.len() {
                t.encode(s, &mut out);
            }
            let (bytes, bits) = out.finish();
            let mut r = BitReader::new(&bytes, bits);
            for s in 0..w.len() {
                prop_assert_eq!(t.decode(&mut r), Some(s));
            }
            prop_assert_eq!(r.remaining(), 0);
        }
    }
}
