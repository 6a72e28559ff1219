//! Frequency- and spatially-correlated Rayleigh channel tensors.
//!
//! The joint correlation of all `L * Mt * Mr` gains of one OFDM symbol is the
//! Kronecker model `R = R_f ⊗ (R_t ⊗ R_r)`. A tensor is drawn as `y = F x`
//! with `F F^H = R` and `x` i.i.d. `CN(0, 1)`, then devectorized with the
//! subcarrier index slowest and the receive antenna fastest:
//! flat index `(l * Mt + s) * Mr + r` holds `h_rs(l)`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{kron, psd_factor, ComplexMatrix};

/// Adjacent-subcarrier correlation magnitude of the "low" frequency profile.
pub const LOW_ADJACENT_CORRELATION: f64 = 0.91;

/// Adjacent-subcarrier correlation magnitude of the "high" frequency profile.
pub const HIGH_ADJACENT_CORRELATION: f64 = 0.997;

/// Entries of the 4x4 transmit / 2x2 receive macro-cell correlation
/// matrices (Laplacian azimuth spectrum, 5 degree spread).
pub const MACRO_CELL_A: Complex64 = Complex64::new(0.4640, 0.8499);
pub const MACRO_CELL_B: Complex64 = Complex64::new(-0.4802, 0.7421);
pub const MACRO_CELL_C: Complex64 = Complex64::new(-0.7688, -0.0625);

const UNIT_DIAGONAL_TOLERANCE: f64 = 1e-9;

/// Frequency correlation across the subcarriers of one OFDM symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum FreqProfile {
    /// `R_f[n][m] = 1 / (1 + j 2 pi (n - m) df tau)`, the response of an
    /// exponential power-delay profile, with `df * tau` chosen so adjacent
    /// subcarriers correlate with magnitude `adjacent_corr`.
    ExponentialPdp {
        adjacent_corr: f64,
    },
    Explicit(ComplexMatrix),
}

impl FreqProfile {
    pub fn low() -> Self {
        FreqProfile::ExponentialPdp {
            adjacent_corr: LOW_ADJACENT_CORRELATION,
        }
    }

    pub fn high() -> Self {
        FreqProfile::ExponentialPdp {
            adjacent_corr: HIGH_ADJACENT_CORRELATION,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpatialProfile {
    /// `R_t = I`, `R_r = I`.
    None,
    Explicit {
        tx: ComplexMatrix,
        rx: ComplexMatrix,
    },
}

impl SpatialProfile {
    /// The 4-transmit / 2-receive macro-cell matrices built from
    /// [`MACRO_CELL_A`], [`MACRO_CELL_B`] and [`MACRO_CELL_C`].
    pub fn macro_cell() -> Self {
        let (a, b, c) = (MACRO_CELL_A, MACRO_CELL_B, MACRO_CELL_C);
        let one = Complex64::new(1.0, 0.0);
        let tx = ComplexMatrix::from_vec(
            4,
            4,
            alloc::vec![
                one,
                a,
                b,
                c,
                a.conj(),
                one,
                a,
                b,
                b.conj(),
                a.conj(),
                one,
                a,
                c.conj(),
                b.conj(),
                a.conj(),
                one,
            ],
        )
        .expect("4x4");
        let rx = ComplexMatrix::from_vec(2, 2, alloc::vec![one, a, a.conj(), one]).expect("2x2");
        SpatialProfile::Explicit { tx, rx }
    }
}

/// Dimensions and correlation structure of the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSpec {
    pub subcarriers: usize,
    pub tx: usize,
    pub rx: usize,
    pub freq: FreqProfile,
    pub spatial: SpatialProfile,
}

impl CorrelationSpec {
    /// Dimension of the vectorized tensor, `L * Mt * Mr`.
    pub fn len(&self) -> usize {
        self.subcarriers * self.tx * self.rx
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::domain("subcarrier and antenna counts must be positive"));
        }
        match &self.freq {
            FreqProfile::ExponentialPdp { adjacent_corr } => {
                if !(0.0..1.0).contains(adjacent_corr) {
                    return Err(Error::domain(alloc::format!(
                        "adjacent correlation magnitude {adjacent_corr} outside [0, 1)"
                    )));
                }
            }
            FreqProfile::Explicit(m) => check_correlation_matrix("frequency", m, self.subcarriers)?,
        }
        if let SpatialProfile::Explicit { tx, rx } = &self.spatial {
            check_correlation_matrix("transmit", tx, self.tx)?;
            check_correlation_matrix("receive", rx, self.rx)?;
        }
        Ok(())
    }

    /// `(R_t, R_r)`; identities when there is no spatial correlation.
    pub fn spatial_matrices(&self) -> (ComplexMatrix, ComplexMatrix) {
        match &self.spatial {
            SpatialProfile::None => (ComplexMatrix::identity(self.tx), ComplexMatrix::identity(self.rx)),
            SpatialProfile::Explicit { tx, rx } => (tx.clone(), rx.clone()),
        }
    }
}

fn check_correlation_matrix(what: &str, m: &ComplexMatrix, n: usize) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::domain(alloc::format!(
            "{what} correlation matrix is {}x{}, expected {n}x{n}",
            m.rows(),
            m.cols()
        )));
    }
    for i in 0..n {
        if (m[(i, i)] - Complex64::new(1.0, 0.0)).norm() > UNIT_DIAGONAL_TOLERANCE {
            return Err(Error::domain(alloc::format!(
                "{what} correlation matrix has diagonal entry {} at {i}",
                m[(i, i)]
            )));
        }
    }
    psd_factor(m).map(|_| ()).map_err(|e| match e {
        Error::Domain(msg) => Error::domain(alloc::format!("{what} correlation matrix: {msg}")),
        other => other,
    })
}

/// The `L x L` frequency correlation matrix of `spec`.
pub fn build_freq_correlation(spec: &CorrelationSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let l = spec.subcarriers;
    match &spec.freq {
        FreqProfile::Explicit(m) => Ok(m.clone()),
        FreqProfile::ExponentialPdp { adjacent_corr } => {
            if *adjacent_corr == 0.0 {
                return Ok(ComplexMatrix::identity(l));
            }
            // |1 / (1 + j 2 pi x)| = rho  =>  x = sqrt(1/rho^2 - 1) / (2 pi)
            let x = libm::sqrt(1.0 / (adjacent_corr * adjacent_corr) - 1.0) / (2.0 * PI);
            Ok(ComplexMatrix::from_fn(l, l, |n, m| {
                let lag = n as f64 - m as f64;
                Complex64::new(1.0, 0.0) / Complex64::new(1.0, 2.0 * PI * lag * x)
            }))
        }
    }
}

/// `R_f ⊗ (R_t ⊗ R_r)`.
pub fn build_full_correlation(rf: &ComplexMatrix, rt: &ComplexMatrix, rr: &ComplexMatrix) -> Result<ComplexMatrix> {
    for (name, m) in [("frequency", rf), ("transmit", rt), ("receive", rr)] {
        if !m.is_square() {
            return Err(Error::domain(alloc::format!(
                "{name} correlation factor is {}x{}, not square",
                m.rows(),
                m.cols()
            )));
        }
    }
    kron(rf, &kron(rt, rr)?)
}

/// One OFDM symbol's channel: a gain per (rx antenna, tx antenna, subcarrier).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    rx: usize,
    tx: usize,
    subcarriers: usize,
    gains: Vec<Complex64>,
}

impl ChannelTensor {
    /// Devectorizes `y`, whose flat index is `(l * tx + s) * rx + r`.
    pub fn from_vec(rx: usize, tx: usize, subcarriers: usize, gains: Vec<Complex64>) -> Result<Self> {
        if gains.len() != rx * tx * subcarriers {
            return Err(Error::domain(alloc::format!(
                "{} gains do not fill a {rx}x{tx}x{subcarriers} tensor",
                gains.len()
            )));
        }
        if gains.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("channel gains must be finite"));
        }
        Ok(ChannelTensor {
            rx,
            tx,
            subcarriers,
            gains,
        })
    }

    /// A tensor whose every subcarrier carries the same `rx x tx` matrix.
    pub fn repeated(h: &ComplexMatrix, subcarriers: usize) -> Self {
        let (rx, tx) = (h.rows(), h.cols());
        let mut gains = Vec::with_capacity(rx * tx * subcarriers);
        for _ in 0..subcarriers {
            for s in 0..tx {
                for r in 0..rx {
                    gains.push(h[(r, s)]);
                }
            }
        }
        ChannelTensor {
            rx,
            tx,
            subcarriers,
            gains,
        }
    }

    pub fn rx(&self) -> usize {
        self.rx
    }

    pub fn tx(&self) -> usize {
        self.tx
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    #[inline]
    pub fn gain(&self, r: usize, s: usize, l: usize) -> Complex64 {
        self.gains[(l * self.tx + s) * self.rx + r]
    }

    /// Gains of subcarrier `l` in `(s, r)` order: entry `s * rx + r` is `H[r][s]`.
    #[inline]
    pub fn subcarrier_gains(&self, l: usize) -> &[Complex64] {
        let n = self.tx * self.rx;
        &self.gains[l * n..(l + 1) * n]
    }

    /// `H(l)` as an `rx x tx` matrix.
    pub fn subcarrier_matrix(&self, l: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rx, self.tx, |r, s| self.gain(r, s, l))
    }

    /// The vectorized tensor, inverse of [`ChannelTensor::from_vec`].
    pub fn as_vec(&self) -> &[Complex64] {
        &self.gains
    }

    /// `h_rs = [h_rs(1), ..., h_rs(L)]`.
    pub fn frequency_response(&self, r: usize, s: usize) -> Vec<Complex64> {
        (0..self.subcarriers).map(|l| self.gain(r, s, l)).collect()
    }
}

/// Draws tensors `devec(F x)` for a fixed factor `F`.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    rx: usize,
    tx: usize,
    subcarriers: usize,
    factor: ComplexMatrix,
}

impl ChannelSampler {
    /// Factors each correlation matrix separately and takes
    /// `F = F_f ⊗ (F_t ⊗ F_r)`; then `F F^H = R` with `F` built from an
    /// eigenbasis of `R` without decomposing the full matrix.
    pub fn new(spec: &CorrelationSpec) -> Result<Self> {
        let rf = build_freq_correlation(spec)?;
        let (rt, rr) = spec.spatial_matrices();
        let factor = kron(&psd_factor(&rf)?, &kron(&psd_factor(&rt)?, &psd_factor(&rr)?)?)?;
        Self::from_factor(factor, spec)
    }

    /// Eigendecomposes the full `R = R_f ⊗ (R_t ⊗ R_r)` directly.
    pub fn from_full_correlation(spec: &CorrelationSpec) -> Result<Self> {
        let rf = build_freq_correlation(spec)?;
        let (rt, rr) = spec.spatial_matrices();
        let r = build_full_correlation(&rf, &rt, &rr)?;
        Self::from_factor(psd_factor(&r)?, spec)
    }

    pub fn from_factor(factor: ComplexMatrix, spec: &CorrelationSpec) -> Result<Self> {
        let n = spec.len();
        if factor.rows() != n || factor.cols() != n {
            return Err(Error::domain(alloc::format!(
                "factor is {}x{}, spec needs {n}x{n}",
                factor.rows(),
                factor.cols()
            )));
        }
        Ok(ChannelSampler {
            rx: spec.rx,
            tx: spec.tx,
            subcarriers: spec.subcarriers,
            factor,
        })
    }

    pub fn factor(&self) -> &ComplexMatrix {
        &self.factor
    }

    /// Draws one tensor. Consumes exactly `2 * L * Mt * Mr` normal variates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelTensor {
        let x = white_vector(rng, self.factor.cols());
        ChannelTensor {
            rx: self.rx,
            tx: self.tx,
            subcarriers: self.subcarriers,
            gains: self.factor.mul_vec(&x),
        }
    }
}

/// I.i.d. circularly-symmetric `CN(0, 1)` entries.
pub fn white_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect()
}

/// One draw of `devec(F x)` for a factor of the spec's full correlation.
pub fn sample_channel<R: Rng + ?Sized>(
    factor: &ComplexMatrix,
    spec: &CorrelationSpec,
    rng: &mut R,
) -> Result<ChannelTensor> {
    Ok(ChannelSampler::from_factor(factor.clone(), spec)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMode {
    /// `E{h_rs h_rs^H}` pooled over all antenna pairs (`L x L`).
    Frequency,
    /// `E{y y^H}` of the vectorized tensor.
    Full,
}

/// Sample correlation of a set of tensors.
pub fn empirical_correlation(samples: &[ChannelTensor], mode: CorrelationMode) -> Result<ComplexMatrix> {
    let first = samples
        .first()
        .ok_or_else(|| Error::domain("empirical correlation of an empty sample set"))?;
    let dims = (first.rx, first.tx, first.subcarriers);
    if samples.iter().any(|s| (s.rx, s.tx, s.subcarriers) != dims) {
        return Err(Error::domain("samples have mismatched dimensions"));
    }
    let (n, per_sample) = match mode {
        CorrelationMode::Frequency => (first.subcarriers, first.rx * first.tx),
        CorrelationMode::Full => (first.gains.len(), 1),
    };
    let mut acc = ComplexMatrix::zeros(n, n);
    let mut accumulate = |h: &[Complex64]| {
        for i in 0..n {
            let hi = h[i];
            for j in 0..n {
                acc[(i, j)] += hi * h[j].conj();
            }
        }
    };
    for s in samples {
        match mode {
            CorrelationMode::Full => accumulate(&s.gains),
            CorrelationMode::Frequency => {
                for r in 0..s.rx {
                    for t in 0..s.tx {
                        accumulate(&s.frequency_response(r, t));
                    }
                }
            }
        }
    }
    let count = (samples.len() * per_sample) as f64;
    Ok(acc.scale(Complex64::new(1.0 / count, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn spec(l: usize, tx: usize, rx: usize, freq: FreqProfile, spatial: SpatialProfile) -> CorrelationSpec {
        CorrelationSpec {
            subcarriers: l,
            tx,
            rx,
            freq,
            spatial,
        }
    }

    fn pdp(rho: f64) -> FreqProfile {
        FreqProfile::ExponentialPdp { adjacent_corr: rho }
    }

    #[test]
    fn uncorrelated_limit_is_identity() {
        let rf = build_freq_correlation(&spec(8, 1, 1, pdp(0.0), SpatialProfile::None)).unwrap();
        assert_eq!(rf, ComplexMatrix::identity(8));
    }

    #[test]
    fn adjacent_magnitude_matches() {
        let rf = build_freq_correlation(&spec(16, 1, 1, pdp(0.95), SpatialProfile::None)).unwrap();
        for n in 0..15 {
            assert!((rf[(n, n + 1)].norm() - 0.95).abs() < 1e-9);
            assert!((rf[(n, n)].re - 1.0).abs() < 1e-15);
        }
        assert!(rf.hermitian_defect() < 1e-15);
    }

    #[test]
    fn magnitudes_decay_with_lag() {
        let l = 16;
        let rf = build_freq_correlation(&spec(l, 1, 1, pdp(0.7), SpatialProfile::None)).unwrap();
        for n in 0..l {
            for m in 0..l {
                for m2 in 0..l {
                    let (d1, d2) = ((n as i64 - m as i64).abs(), (n as i64 - m2 as i64).abs());
                    if d1 < d2 {
                        assert!(rf[(n, m)].norm() > rf[(n, m2)].norm());
                    }
                }
            }
        }
        assert!(psd_factor(&rf).is_ok());
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(build_freq_correlation(&spec(4, 1, 1, pdp(1.0), SpatialProfile::None)).is_err());
        let not_psd = ComplexMatrix::from_fn(3, 3, |r, c| Complex64::new(if r == c { 1.0 } else { -0.9 }, 0.0));
        let err = build_freq_correlation(&spec(3, 1, 1, FreqProfile::Explicit(not_psd), SpatialProfile::None));
        assert!(matches!(err, Err(Error::Domain(_))));
        let off_diag = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(build_freq_correlation(&spec(2, 1, 1, FreqProfile::Explicit(off_diag), SpatialProfile::None)).is_err());
    }

    #[test]
    fn macro_cell_matrices_are_valid() {
        let s = spec(4, 4, 2, pdp(0.5), SpatialProfile::macro_cell());
        s.validate().unwrap();
        let rf = build_freq_correlation(&s).unwrap();
        let (rt, rr) = s.spatial_matrices();
        let r = build_full_correlation(&rf, &rt, &rr).unwrap();
        assert!(psd_factor(&r).is_ok());
    }

    #[test]
    fn full_correlation_identity_and_trace() {
        let i = ComplexMatrix::identity;
        assert_eq!(build_full_correlation(&i(3), &i(2), &i(2)).unwrap(), i(12));
        let s = spec(4, 4, 2, pdp(0.8), SpatialProfile::macro_cell());
        let rf = build_freq_correlation(&s).unwrap();
        let (rt, rr) = s.spatial_matrices();
        let r = build_full_correlation(&rf, &rt, &rr).unwrap();
        assert!((r.trace().re - 32.0).abs() < 1e-12);
        assert!(build_full_correlation(&ComplexMatrix::zeros(2, 3), &rt, &rr).is_err());
    }

    #[test]
    fn full_correlation_entrywise() {
        let s = spec(2, 2, 1, pdp(0.6), SpatialProfile::None);
        let rf = build_freq_correlation(&s).unwrap();
        let rt = ComplexMatrix::from_vec(
            2,
            2,
            alloc::vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.3, 0.4),
                Complex64::new(0.3, -0.4),
                Complex64::new(1.0, 0.0)
            ],
        )
        .unwrap();
        let r = build_full_correlation(&rf, &rt, &ComplexMatrix::identity(1)).unwrap();
        for l1 in 0..2 {
            for l2 in 0..2 {
                for s1 in 0..2 {
                    for s2 in 0..2 {
                        assert_eq!(r[(l1 * 2 + s1, l2 * 2 + s2)], rf[(l1, l2)] * rt[(s1, s2)]);
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = spec(8, 2, 2, pdp(0.9), SpatialProfile::None);
        let sampler = ChannelSampler::new(&s).unwrap();
        let a = sampler.sample(&mut stream_rng(1, 0));
        let b = sampler.sample(&mut stream_rng(1, 0));
        let c = sampler.sample(&mut stream_rng(1, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn devec_round_trip() {
        let s = spec(4, 3, 2, pdp(0.5), SpatialProfile::None);
        let sampler = ChannelSampler::new(&s).unwrap();
        let t = sampler.sample(&mut stream_rng(3, 0));
        let again = ChannelTensor::from_vec(2, 3, 4, t.as_vec().to_vec()).unwrap();
        assert_eq!(again, t);
        for l in 0..4 {
            for sx in 0..3 {
                for r in 0..2 {
                    assert_eq!(t.as_vec()[(l * 3 + sx) * 2 + r], t.gain(r, sx, l));
                    assert_eq!(t.subcarrier_matrix(l)[(r, sx)], t.gain(r, sx, l));
                }
            }
        }
    }

    #[test]
    fn white_channel_unit_variance() {
        let s = spec(2, 2, 2, pdp(0.0), SpatialProfile::None);
        let sampler = ChannelSampler::new(&s).unwrap();
        let mut rng = stream_rng(17, 0);
        let draws: Vec<ChannelTensor> = (0..10_000).map(|_| sampler.sample(&mut rng)).collect();
        for idx in 0..8 {
            let var: f64 = draws.iter().map(|d| d.as_vec()[idx].norm_sqr()).sum::<f64>() / draws.len() as f64;
            assert!((var - 1.0).abs() < 0.05, "entry {idx}: {var}");
        }
        let emp = empirical_correlation(&draws, CorrelationMode::Frequency).unwrap();
        assert!(emp[(0, 1)].norm() < 0.05);
    }

    #[test]
    fn rank_one_frequency_factor_repeats_subcarriers() {
        let ones = ComplexMatrix::from_fn(6, 6, |_, _| Complex64::new(1.0, 0.0));
        let s = spec(6, 2, 2, FreqProfile::Explicit(ones), SpatialProfile::None);
        let sampler = ChannelSampler::new(&s).unwrap();
        let t = sampler.sample(&mut stream_rng(4, 0));
        let h0 = t.subcarrier_matrix(0);
        for l in 1..6 {
            assert!(t.subcarrier_matrix(l).sub(&h0).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn factor_routes_agree() {
        let s = spec(6, 4, 2, pdp(0.9), SpatialProfile::macro_cell());
        let kron_route = ChannelSampler::new(&s).unwrap();
        let dense_route = ChannelSampler::from_full_correlation(&s).unwrap();
        let rf = build_freq_correlation(&s).unwrap();
        let (rt, rr) = s.spatial_matrices();
        let r = build_full_correlation(&rf, &rt, &rr).unwrap();
        for sampler in [&kron_route, &dense_route] {
            let f = sampler.factor();
            let err = (f * &f.adjoint()).sub(&r).frobenius_norm() / r.frobenius_norm();
            assert!(err < 1e-8, "{err}");
        }
    }

    #[test]
    fn repeated_sample_correlation_is_outer_product() {
        let s = spec(3, 1, 1, pdp(0.5), SpatialProfile::None);
        let t = ChannelSampler::new(&s).unwrap().sample(&mut stream_rng(8, 0));
        let emp = empirical_correlation(&[t.clone(), t.clone(), t.clone()], CorrelationMode::Full).unwrap();
        let h = t.as_vec();
        for i in 0..3 {
            for j in 0..3 {
                assert!((emp[(i, j)] - h[i] * h[j].conj()).norm() < 1e-15);
            }
        }
        assert!(empirical_correlation(&[], CorrelationMode::Full).is_err());
    }
}
