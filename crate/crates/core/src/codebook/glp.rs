//! Grassmannian line packing search.
//!
//! Candidates are orbits of one generator under a cyclic group of diagonal
//! unitaries: `v_k[s] = sqrt(p_s) * exp(j 2 pi u_s k / N)`. The coherence
//! between `v_k` and `v_l` depends only on `d = l - k`:
//!
//! ```text
//! |v_k^H v_l| = | sum_s p_s exp(j 2 pi u_s d / N) |
//! ```
//!
//! so every codeword sees the same correlation profile and all quantization
//! cells are congruent. The search runs random restarts over the integer
//! frequencies `u` (with `u_0 = 0` as phase reference), accepting moves that
//! do not lower the minimum distance and break plateaus with a soft-max of
//! the coherences; every eighth step is a projected-gradient step on the
//! power weights `p`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::{Codebook, CodebookSource};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

const SOFTMAX_SHARPNESS: f64 = 60.0;
const WEIGHT_STEP_EVERY: usize = 8;
const INITIAL_WEIGHT_STEP: f64 = 0.05;

/// Result of [`generate_glp_codebook`].
#[derive(Debug, Clone)]
pub struct GeneratedCodebook {
    pub codebook: Codebook,
    /// Best minimum distance found after each iteration, over all restarts
    /// so far. Non-decreasing.
    pub history: Vec<f64>,
    /// Integer frequencies `u_s` of the best orbit.
    pub frequencies: Vec<usize>,
    /// Power weights `p_s` of the best orbit (sum to one).
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Candidate {
    freqs: Vec<usize>,
    weights: Vec<f64>,
    max_coherence: f64,
    soft: f64,
}

struct Evaluator {
    size: usize,
    roots: Vec<Complex64>,
}

impl Evaluator {
    fn new(size: usize) -> Self {
        let roots = (0..size)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / size as f64))
            .collect();
        Evaluator { size, roots }
    }

    fn sums(&self, freqs: &[usize], weights: &[f64]) -> Vec<Complex64> {
        (1..self.size)
            .map(|d| {
                freqs
                    .iter()
                    .zip(weights)
                    .map(|(&u, &p)| self.roots[(u * d) % self.size] * p)
                    .sum()
            })
            .collect()
    }

    fn candidate(&self, freqs: Vec<usize>, weights: Vec<f64>) -> Candidate {
        let coh: Vec<f64> = self.sums(&freqs, &weights).iter().map(|s| s.norm_sqr()).collect();
        let max_coherence = coh.iter().copied().fold(0.0, f64::max);
        let soft = max_coherence
            + libm::log(
                coh.iter()
                    .map(|c| libm::exp(SOFTMAX_SHARPNESS * (c - max_coherence)))
                    .sum::<f64>(),
            ) / SOFTMAX_SHARPNESS;
        Candidate {
            freqs,
            weights,
            max_coherence,
            soft,
        }
    }

    /// Gradient of the soft-max coherence with respect to the weights.
    fn weight_gradient(&self, cand: &Candidate) -> Vec<f64> {
        let sums = self.sums(&cand.freqs, &cand.weights);
        let coh: Vec<f64> = sums.iter().map(|s| s.norm_sqr()).collect();
        let shares: Vec<f64> = coh
            .iter()
            .map(|c| libm::exp(SOFTMAX_SHARPNESS * (c - cand.max_coherence)))
            .collect();
        let total: f64 = shares.iter().sum();
        cand.freqs
            .iter()
            .map(|&u| {
                sums.iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let z = self.roots[(u * (i + 1)) % self.size];
                        shares[i] / total * 2.0 * (s.conj() * z).re
                    })
                    .sum()
            })
            .collect()
    }
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    a.max_coherence < b.max_coherence - 1e-15 || (a.max_coherence <= b.max_coherence + 1e-15 && a.soft < b.soft - 1e-15)
}

fn distance(c: &Candidate) -> f64 {
    libm::sqrt((1.0 - c.max_coherence).max(0.0))
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Searches for an `size`-line packing in `C^dim`.
///
/// Deterministic for a given `seed`: restart `r` draws from stream `r`.
pub fn generate_glp_codebook(
    dim: usize,
    size: usize,
    seed: u64,
    restarts: usize,
    iterations: usize,
) -> Result<GeneratedCodebook> {
    if dim < 2 || size < 2 {
        return Err(Error::domain(alloc::format!(
            "packing needs dimension >= 2 and size >= 2, got ({dim}, {size})"
        )));
    }
    let eval = Evaluator::new(size);
    let mut best: Option<Candidate> = None;
    let mut history = Vec::with_capacity(restarts.max(1) * (iterations + 1));

    for restart in 0..restarts.max(1) as u64 {
        let mut rng = stream_rng(seed, restart);
        // u_0 = 0 and u_1 = 1 keep every pair of codewords distinct.
        let mut freqs = vec![0, 1];
        freqs.extend((2..dim).map(|_| rng.random_range(0..size)));
        let mut current = eval.candidate(freqs, vec![1.0 / dim as f64; dim]);
        let mut step = INITIAL_WEIGHT_STEP;

        let record = |cand: &Candidate, best: &mut Option<Candidate>, history: &mut Vec<f64>| {
            if best.as_ref().is_none_or(|b| better(cand, b)) {
                *best = Some(cand.clone());
            }
            history.push(distance(best.as_ref().expect("set above")));
        };
        record(&current, &mut best, &mut history);

        for it in 0..iterations {
            if it % WEIGHT_STEP_EVERY == WEIGHT_STEP_EVERY - 1 {
                let grad = eval.weight_gradient(&current);
                let mut weights: Vec<f64> = current.weights.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
                project_simplex(&mut weights);
                let trial = eval.candidate(current.freqs.clone(), weights);
                if better(&trial, &current) {
                    current = trial;
                    step *= 1.2;
                } else {
                    step *= 0.5;
                }
            } else {
                let s = rng.random_range(1..dim);
                let mut freqs = current.freqs.clone();
                freqs[s] = if rng.random_bool(0.5) {
                    rng.random_range(0..size)
                } else {
                    (freqs[s] + if rng.random_bool(0.5) { 1 } else { size - 1 }) % size
                };
                let trial = eval.candidate(freqs, current.weights.clone());
                if better(&trial, &current) {
                    current = trial;
                }
            }
            record(&current, &mut best, &mut history);
        }
    }

    let best = best.expect("at least one restart");
    let vectors = (0..size)
        .map(|k| {
            best.freqs
                .iter()
                .zip(&best.weights)
                .map(|(&u, &p)| eval.roots[(u * k) % size] * libm::sqrt(p))
                .collect()
        })
        .collect();
    let codebook = Codebook::new(
        dim,
        vectors,
        CodebookSource::Generated {
            seed,
            restarts,
            iterations,
        },
    )?;
    Ok(GeneratedCodebook {
        codebook,
        history,
        frequencies: best.freqs,
        weights: best.weights,
    })
}
