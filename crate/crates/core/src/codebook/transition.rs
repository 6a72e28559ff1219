use alloc::vec::Vec;

use crate::numerics::inner;

use super::Codebook;

/// Correlations that agree to nine decimals are ties.
const TIE_SCALE: f64 = 1e9;

/// Per-codeword ranking of all codewords by decreasing `|v_i^H v_l|^2`.
///
/// `target(i, k)` is the codeword at rank `k` from source `i` and
/// `symbol(i, j)` is the inverse: the rank of codeword `j` as seen from `i`.
/// Ranks are 0-based, so `symbol(i, i) == 0` for every `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    size: usize,
    order: Vec<usize>,
    xi: Vec<usize>,
    betas: Vec<f64>,
}

impl TransitionTable {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Codeword at rank `k` from source `i`.
    #[inline]
    pub fn target(&self, source: usize, rank: usize) -> usize {
        self.order[source * self.size + rank]
    }

    /// Rank of codeword `j` as seen from source `i`.
    #[inline]
    pub fn symbol(&self, source: usize, target: usize) -> usize {
        self.xi[source * self.size + target]
    }

    /// Correlation at rank `k` from source `i`; non-increasing in `k`.
    #[inline]
    pub fn beta(&self, source: usize, rank: usize) -> f64 {
        self.betas[source * self.size + rank]
    }

    pub fn order_of(&self, source: usize) -> &[usize] {
        &self.order[source * self.size..(source + 1) * self.size]
    }

    pub fn betas_of(&self, source: usize) -> &[f64] {
        &self.betas[source * self.size..(source + 1) * self.size]
    }
}

/// Sorts each row of `|v_i^H v_l|^2` in descending order. Ties go to the
/// lower target index, and the source itself always takes rank 0, so both
/// ends derive the same table from the same codebook.
pub fn build_transition_table(cb: &Codebook) -> TransitionTable {
    let n = cb.size();
    let mut order = Vec::with_capacity(n * n);
    let mut betas = Vec::with_capacity(n * n);
    let mut xi = alloc::vec![0usize; n * n];
    for i in 0..n {
        let keys: Vec<i64> = (0..n)
            .map(|l| libm::round(inner(cb.vector(i), cb.vector(l)).norm_sqr() * TIE_SCALE) as i64)
            .collect();
        let mut row: Vec<usize> = (0..n).collect();
        row.sort_by(|&a, &b| (a != i).cmp(&(b != i)).then(keys[b].cmp(&keys[a])).then(a.cmp(&b)));
        // The self key is forced to rank 0 and can round to just under the
        // next key; clamp so betas stay non-increasing.
        let mut prev = i64::MAX;
        for (k, &l) in row.iter().enumerate() {
            let key = if l == i { TIE_SCALE as i64 } else { keys[l].min(prev) };
            prev = key;
            xi[i * n + l] = k;
            order.push(l);
            betas.push(key as f64 / TIE_SCALE);
        }
    }
    TransitionTable {
        size: n,
        order,
        xi,
        betas,
    }
}

/// `max |beta_i(k) - beta_j(k)|` over all sources and ranks. Zero when every
/// codeword sees the same correlation profile.
pub fn property1_deviation(tt: &TransitionTable) -> f64 {
    let n = tt.size();
    (0..n)
        .map(|k| {
            let (lo, hi) = (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
                let b = tt.beta(i, k);
                (lo.min(b), hi.max(b))
            });
            hi - lo
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{generate_glp_codebook, CodebookSource};
    use alloc::vec;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn basis(n: usize) -> Codebook {
        let v = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        Codebook::new(n, v, CodebookSource::Inline).unwrap()
    }

    #[test]
    fn orthonormal_basis_table() {
        let tt = build_transition_table(&basis(4));
        for i in 0..4 {
            let mut expected = vec![i];
            expected.extend((0..4).filter(|&j| j != i));
            assert_eq!(tt.order_of(i), expected.as_slice());
            assert_eq!(tt.betas_of(i), &[1.0, 0.0, 0.0, 0.0]);
        }
        assert_eq!(property1_deviation(&tt), 0.0);
    }

    #[test]
    fn table_invariants_on_generated_codebook() {
        let cb = generate_glp_codebook(4, 16, 3, 2, 300).unwrap().codebook;
        let tt = build_transition_table(&cb);
        for i in 0..16 {
            assert_eq!(tt.target(i, 0), i);
            assert_eq!(tt.symbol(i, i), 0);
            assert_eq!(tt.beta(i, 0), 1.0);
            assert!(tt.betas_of(i).windows(2).all(|w| w[1] <= w[0]));
            for j in 0..16 {
                assert_eq!(tt.target(i, tt.symbol(i, j)), j);
                assert_eq!(tt.symbol(i, tt.target(i, j)), j);
            }
            // betas are a permutation of the alphas
            let mut alphas: Vec<f64> = (0..16).map(|l| inner(cb.vector(i), cb.vector(l)).norm_sqr()).collect();
            alphas.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in alphas.iter().zip(tt.betas_of(i)) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn perturbation_breaks_property1() {
        let cb = generate_glp_codebook(4, 16, 3, 2, 300).unwrap().codebook;
        assert!(property1_deviation(&build_transition_table(&cb)) < 1e-9);
        let mut vs = cb.vectors().to_vec();
        vs[5][0] += Complex64::new(0.1, 0.0);
        let n = crate::numerics::norm2(&vs[5]);
        vs[5].iter_mut().for_each(|z| *z /= n);
        let bent = Codebook::new(4, vs, CodebookSource::Inline).unwrap();
        assert!(property1_deviation(&build_transition_table(&bent)) > 0.02);
    }

    proptest! {
        #[test]
        fn table_is_phase_invariant(phases in proptest::collection::vec(0.0f64..core::f64::consts::TAU, 8)) {
            let cb = generate_glp_codebook(3, 8, 1, 1, 100).unwrap().codebook;
            let rotated: Vec<Vec<Complex64>> = cb
                .vectors()
                .iter()
                .zip(&phases)
                .map(|(v, &p)| v.iter().map(|z| z * Complex64::from_polar(1.0, p)).collect())
                .collect();
            let rot = Codebook::new(3, rotated, CodebookSource::Inline).unwrap();
            let (a, b) = (build_transition_table(&cb), build_transition_table(&rot));
            for i in 0..8 {
                prop_assert_eq!(a.order_of(i), b.order_of(i));
            }
        }
    }
}
