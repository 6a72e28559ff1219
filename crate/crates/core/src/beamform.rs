//! Cluster codeword selection.
//!
//! Adjacent subcarriers are grouped into clusters of `G`; each cluster feeds
//! back one codeword, the one maximizing the worst per-subcarrier beamforming
//! gain `min_g ||H_g v_i||^2` inside the cluster.

use alloc::vec::Vec;
use core::ops::Deref;

use num_complex::Complex64;

use crate::channel::ChannelTensor;
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::numerics::{inner, right_singular_basis, ComplexMatrix};

/// Subcarrier clustering: `clusters = subcarriers / cluster_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterConfig {
    subcarriers: usize,
    cluster_size: usize,
}

impl ClusterConfig {
    pub fn new(subcarriers: usize, cluster_size: usize) -> Result<Self> {
        if cluster_size == 0 || subcarriers == 0 || !subcarriers.is_multiple_of(cluster_size) {
            return Err(Error::domain(alloc::format!(
                "cluster size {cluster_size} does not divide {subcarriers} subcarriers"
            )));
        }
        Ok(ClusterConfig {
            subcarriers,
            cluster_size,
        })
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    /// `G`.
    pub fn cluster_size(&self) -> usize {
        self.cluster_size
    }

    /// `M`.
    pub fn clusters(&self) -> usize {
        self.subcarriers / self.cluster_size
    }

    /// Representative subcarrier of cluster `m` (0-based): the center one,
    /// `ceil(G / 2)` counting from 1 within the cluster.
    pub fn center_subcarrier(&self, m: usize) -> usize {
        m * self.cluster_size + self.cluster_size.div_ceil(2) - 1
    }
}

/// Selected codeword per cluster for one OFDM symbol (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexVector(pub Vec<usize>);

impl Deref for IndexVector {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// `||H v||^2` with `H` given in `(s, r)` order as by
/// [`ChannelTensor::subcarrier_gains`].
#[inline]
fn beam_gain(gains: &[Complex64], rx: usize, v: &[Complex64]) -> f64 {
    (0..rx)
        .map(|r| {
            v.iter()
                .enumerate()
                .map(|(s, vs)| gains[s * rx + r] * vs)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum()
}

fn select<'a>(slice: impl Iterator<Item = &'a [Complex64]> + Clone, rx: usize, cb: &Codebook) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in cb.vectors().iter().enumerate() {
        let worst = slice.clone().map(|g| beam_gain(g, rx, v)).fold(f64::INFINITY, f64::min);
        if worst > best.1 {
            best = (i, worst);
        }
    }
    best.0
}

/// The codeword maximizing `min_g ||H_g v_i||^2` over a cluster of `Mr x Mt`
/// matrices. Ties go to the lowest index.
pub fn select_cluster_codeword(cluster: &[ComplexMatrix], cb: &Codebook) -> Result<usize> {
    let first = cluster
        .first()
        .ok_or_else(|| Error::domain("cluster must contain at least one subcarrier"))?;
    let rx = first.rows();
    if cluster.iter().any(|h| h.cols() != cb.dim() || h.rows() != rx) {
        return Err(Error::domain("cluster matrices do not match the codebook dimension"));
    }
    let reordered: Vec<Vec<Complex64>> = cluster
        .iter()
        .map(|h| (0..h.cols()).flat_map(|s| (0..rx).map(move |r| h[(r, s)])).collect())
        .collect();
    Ok(select(reordered.iter().map(Vec::as_slice), rx, cb))
}

/// Runs [`select_cluster_codeword`] for every cluster of one OFDM symbol.
pub fn select_all_clusters(ch: &ChannelTensor, cfg: &ClusterConfig, cb: &Codebook) -> Result<IndexVector> {
    if ch.subcarriers() != cfg.subcarriers() {
        return Err(Error::domain(alloc::format!(
            "channel has {} subcarriers, clustering expects {}",
            ch.subcarriers(),
            cfg.subcarriers()
        )));
    }
    if ch.tx() != cb.dim() {
        return Err(Error::domain(alloc::format!(
            "channel has {} transmit antennas, codebook dimension is {}",
            ch.tx(),
            cb.dim()
        )));
    }
    let g = cfg.cluster_size();
    Ok(IndexVector(
        (0..cfg.clusters())
            .map(|m| select((m * g..(m + 1) * g).map(|l| ch.subcarrier_gains(l)), ch.rx(), cb))
            .collect(),
    ))
}

/// Eigen-mode switching events in one symbol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SwitchCount {
    pub switches: usize,
    pub pairs: usize,
}

impl SwitchCount {
    pub fn rate(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.switches as f64 / self.pairs as f64
        }
    }
}

impl core::ops::AddAssign for SwitchCount {
    fn add_assign(&mut self, rhs: Self) {
        self.switches += rhs.switches;
        self.pairs += rhs.pairs;
    }
}

/// Counts neighboring cluster pairs whose dominant right singular vector
/// (at the second cluster's center subcarrier) lies closer to the first
/// cluster's *second* right singular vector than to its first.
pub fn count_eigen_switches(ch: &ChannelTensor, cfg: &ClusterConfig) -> Result<SwitchCount> {
    if ch.rx() < 2 {
        return Err(Error::domain(
            "eigen-mode switching needs at least two receive antennas",
        ));
    }
    if ch.subcarriers() != cfg.subcarriers() {
        return Err(Error::domain(
            "channel and cluster configuration disagree on subcarriers",
        ));
    }
    let bases = (0..cfg.clusters())
        .map(|m| right_singular_basis(&ch.subcarrier_matrix(cfg.center_subcarrier(m))))
        .collect::<Result<Vec<_>>>()?;
    let mut count = SwitchCount::default();
    for pair in bases.windows(2) {
        let (prev, next) = (&pair[0].eigenvectors, &pair[1].eigenvectors);
        let lead = next.column(0);
        let to_first = inner(&lead, &prev.column(0)).norm();
        let to_second = inner(&lead, &prev.column(1)).norm();
        count.pairs += 1;
        if to_second > to_first {
            count.switches += 1;
        }
    }
    Ok(count)
}

/// Fraction of neighboring cluster pairs with an eigen-mode switch, over a
/// stream of symbols.
pub fn eigen_switching_rate<'a>(
    symbols: impl IntoIterator<Item = &'a ChannelTensor>,
    cfg: &ClusterConfig,
) -> Result<f64> {
    let mut total = SwitchCount::default();
    for ch in symbols {
        total += count_eigen_switches(ch, cfg)?;
    }
    Ok(total.rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelSampler, CorrelationSpec, FreqProfile, SpatialProfile};
    use crate::codebook::{generate_glp_codebook, CodebookSource};
    use crate::numerics::dominant_right_singular_vector;
    use crate::rng::stream_rng;
    use alloc::vec;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn codebook(n: usize) -> Codebook {
        generate_glp_codebook(4, n, 5, 2, 300).unwrap().codebook
    }

    fn random_h(rng: &mut crate::rng::SimRng, rx: usize, tx: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rx, tx, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn cluster_config_checks_divisibility() {
        assert!(ClusterConfig::new(64, 3).is_err());
        assert!(ClusterConfig::new(64, 0).is_err());
        let cfg = ClusterConfig::new(64, 4).unwrap();
        assert_eq!(cfg.clusters(), 16);
        assert_eq!(cfg.center_subcarrier(0), 1);
        assert_eq!(ClusterConfig::new(8, 1).unwrap().center_subcarrier(3), 3);
        assert_eq!(ClusterConfig::new(9, 3).unwrap().center_subcarrier(1), 4);
    }

    #[test]
    fn aligned_channel_selects_its_codeword() {
        let cb = codebook(16);
        for i in [0, 7, 15] {
            // rank-one H = u v_i^H has v_i as dominant right singular vector
            let v = cb.vector(i);
            let h = ComplexMatrix::from_fn(2, 4, |r, s| v[s].conj() * c(1.0 + r as f64, 0.5));
            let sp = dominant_right_singular_vector(&h).unwrap();
            assert!(inner(&sp.vector, v).norm() > 1.0 - 1e-12);
            assert_eq!(select_cluster_codeword(&[h], &cb).unwrap(), i);
        }
    }

    #[test]
    fn zero_channel_ties_to_first_index() {
        let cb = codebook(8);
        let zeros = vec![ComplexMatrix::zeros(2, 4); 3];
        assert_eq!(select_cluster_codeword(&zeros, &cb).unwrap(), 0);
    }

    #[test]
    fn matches_exhaustive_oracle() {
        let cb = codebook(8);
        let mut rng = stream_rng(21, 0);
        for _ in 0..200 {
            let cluster = vec![random_h(&mut rng, 2, 4), random_h(&mut rng, 2, 4)];
            let mut best = (0, f64::NEG_INFINITY);
            for i in 0..cb.size() {
                let mut worst = f64::INFINITY;
                for h in &cluster {
                    let hv = h.mul_vec(cb.vector(i));
                    worst = worst.min(hv.iter().map(|z| z.norm_sqr()).sum());
                }
                if worst > best.1 {
                    best = (i, worst);
                }
            }
            assert_eq!(select_cluster_codeword(&cluster, &cb).unwrap(), best.0);
        }
    }

    #[test]
    fn selection_is_scale_and_phase_invariant() {
        let cb = codebook(16);
        let mut rng = stream_rng(2, 0);
        let cluster = vec![random_h(&mut rng, 2, 4), random_h(&mut rng, 2, 4)];
        let idx = select_cluster_codeword(&cluster, &cb).unwrap();
        let scaled: Vec<ComplexMatrix> = cluster.iter().map(|h| h.scale(c(3.7, 0.0))).collect();
        assert_eq!(select_cluster_codeword(&scaled, &cb).unwrap(), idx);
        let rotated: Vec<Vec<Complex64>> = cb
            .vectors()
            .iter()
            .enumerate()
            .map(|(k, v)| v.iter().map(|z| z * Complex64::from_polar(1.0, k as f64)).collect())
            .collect();
        let rot_cb = Codebook::new(4, rotated, CodebookSource::Inline).unwrap();
        assert_eq!(select_cluster_codeword(&cluster, &rot_cb).unwrap(), idx);
    }

    #[test]
    fn identical_subcarriers_give_identical_indices() {
        let cb = codebook(16);
        let mut rng = stream_rng(3, 0);
        let h = random_h(&mut rng, 2, 4);
        let ch = ChannelTensor::repeated(&h, 16);
        let iv = select_all_clusters(&ch, &ClusterConfig::new(16, 2).unwrap(), &cb).unwrap();
        assert_eq!(iv.len(), 8);
        assert!(iv.iter().all(|&i| i == iv[0]));
        let one = select_all_clusters(&ch, &ClusterConfig::new(16, 16).unwrap(), &cb).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(
            count_eigen_switches(&ch, &ClusterConfig::new(16, 1).unwrap())
                .unwrap()
                .switches,
            0
        );
    }

    #[test]
    fn select_all_matches_matrix_path() {
        let cb = codebook(16);
        let spec = CorrelationSpec {
            subcarriers: 8,
            tx: 4,
            rx: 2,
            freq: FreqProfile::ExponentialPdp { adjacent_corr: 0.8 },
            spatial: SpatialProfile::None,
        };
        let ch = ChannelSampler::new(&spec).unwrap().sample(&mut stream_rng(4, 0));
        let cfg = ClusterConfig::new(8, 2).unwrap();
        let iv = select_all_clusters(&ch, &cfg, &cb).unwrap();
        for m in 0..4 {
            let cluster = [ch.subcarrier_matrix(2 * m), ch.subcarrier_matrix(2 * m + 1)];
            assert_eq!(iv[m], select_cluster_codeword(&cluster, &cb).unwrap());
        }
        assert!(select_all_clusters(&ch, &ClusterConfig::new(16, 2).unwrap(), &cb).is_err());
    }

    #[test]
    fn switching_needs_two_receive_antennas() {
        let h = ComplexMatrix::from_fn(1, 4, |_, s| c(s as f64, 1.0));
        let ch = ChannelTensor::repeated(&h, 4);
        assert!(count_eigen_switches(&ch, &ClusterConfig::new(4, 1).unwrap()).is_err());
    }

    #[test]
    fn independent_subcarriers_switch_sometimes() {
        let spec = CorrelationSpec {
            subcarriers: 16,
            tx: 4,
            rx: 2,
            freq: FreqProfile::ExponentialPdp { adjacent_corr: 0.0 },
            spatial: SpatialProfile::None,
        };
        let sampler = ChannelSampler::new(&spec).unwrap();
        let mut rng = stream_rng(6, 0);
        let draws: Vec<ChannelTensor> = (0..50).map(|_| sampler.sample(&mut rng)).collect();
        let rate = eigen_switching_rate(&draws, &ClusterConfig::new(16, 1).unwrap()).unwrap();
        assert!(rate > 0.0 && rate < 1.0, "{rate}");
    }
}
