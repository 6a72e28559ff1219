//! Small dense complex linear algebra.
//!
//! Everything here works on [`ComplexMatrix`], a row-major matrix of
//! [`Complex64`]. The sizes in this crate are tiny (4x4 Gram matrices) to
//! moderate (the 512x512 joint correlation matrix), so the eigensolver is a
//! plain cyclic Jacobi iteration on the Hermitian matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sweep cap for [`hermitian_eig`].
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Largest number of entries [`kron`] will allocate.
pub const MAX_KRON_ENTRIES: usize = 1 << 24;

/// Relative Hermitian defect accepted by [`hermitian_eig`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

/// Eigenvalues with magnitude up to `PSD_CLAMP_TOLERANCE * lambda_max` are
/// treated as rounding noise and clamped to zero by [`psd_factor`], as are
/// all other negative eigenvalues it accepts.
pub const PSD_CLAMP_TOLERANCE: f64 = 1e-9;

/// Eigenvalues below `-PSD_REJECT_TOLERANCE * lambda_max` make [`psd_factor`]
/// reject its input.
pub const PSD_REJECT_TOLERANCE: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting a wrong entry count
    /// or any non-finite value.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::domain(alloc::format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain(alloc::format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `||A - A^H||_F`; zero for exactly Hermitian matrices.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        libm::sqrt(acc)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// `a^H b`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(a: &[Complex64]) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigResult {
    /// Real eigenvalues, largest first.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as `(A + A^H) / 2` after the Hermitian check, so
/// rounding-level asymmetry does not leak into the result. A sweep visits
/// every off-diagonal pair once; iteration stops after a sweep in which every
/// pair was already negligible, and fails after [`MAX_JACOBI_SWEEPS`].
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigResult> {
    if !a.is_square() {
        return Err(Error::domain(alloc::format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows,
            a.cols
        )));
    }
    let n = a.rows;
    let norm = a.frobenius_norm();
    if !norm.is_finite() {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    if a.hermitian_defect() > HERMITIAN_TOLERANCE * norm {
        return Err(Error::domain("matrix is not Hermitian"));
    }

    let mut w = ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(a[(r, r)].re, 0.0)
        } else {
            (a[(r, c)] + a[(c, r)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let tiny = 1e-18 * norm;

    let mut converged = n < 2 || norm == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::numeric(alloc::format!(
                "Jacobi eigensolver did not converge in {MAX_JACOBI_SWEEPS} sweeps (n = {n})"
            )));
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w[(p, q)];
                let mag = apq.norm();
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                if mag <= tiny || mag <= f64::EPSILON * libm::sqrt(libm::fabs(app * aqq)) {
                    w[(p, q)] = ZERO;
                    w[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                jacobi_rotate(&mut w, &mut v, p, q, apq, mag, app, aqq);
            }
        }
        converged = !rotated;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| w[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies `A <- J^H A J`, `V <- V J` with the unitary rotation that zeroes
/// `A[p][q]`. `J = D P` where `D` rotates the phase of coordinate `q` so the
/// pivot becomes real and `P` is the classical real Jacobi rotation.
#[allow(clippy::too_many_arguments)]
fn jacobi_rotate(
    w: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    apq: Complex64,
    mag: f64,
    app: f64,
    aqq: f64,
) {
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::hypot(theta, 1.0))
    };
    let c = 1.0 / libm::hypot(t, 1.0);
    let s = t * c;

    // Column update, A <- A J.
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    for k in 0..w.rows {
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        w[(k, p)] = akp * c + akq * jqp;
        w[(k, q)] = akp * s + akq * jqq;
    }
    for k in 0..v.rows {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * s + vkq * jqq;
    }
    // Row update, A <- J^H A.
    let hpq = -phase * s;
    let hqq = phase * c;
    for k in 0..w.cols {
        let apk = w[(p, k)];
        let aqk = w[(q, k)];
        w[(p, k)] = apk * c + aqk * hpq;
        w[(q, k)] = apk * s + aqk * hqq;
    }
    w[(p, q)] = ZERO;
    w[(q, p)] = ZERO;
    w[(p, p)] = Complex64::new(app - t * mag, 0.0);
    w[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
}

/// Rotates `v` so its first entry with magnitude above `1e-12` is real and
/// nonnegative. Singular vectors are only defined up to such a phase.
pub fn normalize_phase(v: &mut [Complex64]) {
    if let Some(lead) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Dominant right singular vector and the largest singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularPair {
    /// Unit vector, phase-normalized by [`normalize_phase`].
    pub vector: Vec<Complex64>,
    pub sigma: f64,
}

/// Right singular vectors of `h` (eigenvectors of `H^H H`), strongest first,
/// each phase-normalized. Eigenvalues are the squared singular values.
pub fn right_singular_basis(h: &ComplexMatrix) -> Result<EigResult> {
    let gram = &h.adjoint() * h;
    let mut eig = hermitian_eig(&gram)?;
    let n = gram.rows();
    for c in 0..n {
        let mut col = eig.eigenvectors.column(c);
        normalize_phase(&mut col);
        for (r, z) in col.into_iter().enumerate() {
            eig.eigenvectors[(r, c)] = z;
        }
    }
    for ev in eig.eigenvalues.iter_mut() {
        *ev = ev.max(0.0);
    }
    Ok(eig)
}

/// The optimal single-stream steering vector of `h` (`Mr x Mt`).
///
/// Computed from the `Mt x Mt` Gram matrix `H^H H`. An all-zero channel
/// returns `sigma = 0` with `v = e1`.
pub fn dominant_right_singular_vector(h: &ComplexMatrix) -> Result<SingularPair> {
    let mt = h.cols();
    if h.rows() == 0 || mt == 0 {
        return Err(Error::domain("channel matrix must have at least one row and column"));
    }
    if h.as_slice().iter().all(|z| *z == ZERO) {
        let mut vector = vec![ZERO; mt];
        vector[0] = ONE;
        return Ok(SingularPair { vector, sigma: 0.0 });
    }
    let eig = right_singular_basis(h)?;
    Ok(SingularPair {
        vector: eig.eigenvectors.column(0),
        sigma: libm::sqrt(eig.eigenvalues[0]),
    })
}

/// Kronecker product. Entry `(ia * b.rows + ib, ja * b.cols + jb)` equals
/// `a[ia][ja] * b[ib][jb]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let entries = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c));
    match (rows, cols, entries) {
        (Some(rows), Some(cols), Some(e)) if e <= MAX_KRON_ENTRIES => {
            let mut out = ComplexMatrix::zeros(rows, cols);
            for ia in 0..a.rows {
                for ja in 0..a.cols {
                    let s = a[(ia, ja)];
                    for ib in 0..b.rows {
                        let dst = (ia * b.rows + ib) * cols + ja * b.cols;
                        for (o, z) in out.data[dst..dst + b.cols].iter_mut().zip(b.row(ib)) {
                            *o = s * z;
                        }
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Resource(alloc::format!(
            "Kronecker product of {}x{} and {}x{} exceeds {MAX_KRON_ENTRIES} entries",
            a.rows,
            a.cols,
            b.rows,
            b.cols
        ))),
    }
}

/// Square-root factor `F = P sqrt(Omega)` of a Hermitian PSD matrix
/// `R = P Omega P^H`, so that `F F^H = R`.
///
/// Slightly negative eigenvalues are clamped to zero; anything below
/// `-PSD_REJECT_TOLERANCE * lambda_max` is rejected as not PSD.
pub fn psd_factor(r: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(r)?;
    let n = r.rows();
    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    if let Some(&lo) = eig.eigenvalues.last() {
        if lo < -PSD_REJECT_TOLERANCE * lambda_max || (lambda_max == 0.0 && lo < 0.0) {
            return Err(Error::domain(alloc::format!(
                "matrix is not positive semidefinite (eigenvalue {lo:e}, largest {lambda_max:e})"
            )));
        }
    }
    let floor = PSD_CLAMP_TOLERANCE * lambda_max;
    let roots: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l <= floor { 0.0 } else { libm::sqrt(l) })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        eig.eigenvectors[(row, col)] * roots[col]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let g = random_matrix(rng, n, n);
        let gh = g.adjoint();
        ComplexMatrix::from_fn(n, n, |r, col| g[(r, col)] + gh[(r, col)])
    }

    fn reconstruct(eig: &EigResult) -> ComplexMatrix {
        let lam = ComplexMatrix::from_real_diagonal(&eig.eigenvalues);
        &(&eig.eigenvectors * &lam) * &eig.eigenvectors.adjoint()
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
        let vhv = &eig.eigenvectors.adjoint() * &eig.eigenvectors;
        assert!(vhv.sub(&ComplexMatrix::identity(2)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn diagonal_eigenpairs() {
        let eig = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, 1.0]);
        assert!((eig.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((eig.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 4, 7, 16] {
            let a = random_hermitian(&mut rng, n);
            let eig = hermitian_eig(&a).unwrap();
            assert!(reconstruct(&eig).sub(&a).frobenius_norm() < 1e-9 * a.frobenius_norm().max(1.0));
            let vhv = &eig.eigenvectors.adjoint() * &eig.eigenvectors;
            assert!(vhv.sub(&ComplexMatrix::identity(n)).frobenius_norm() < 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|p| p[0] >= p[1]));
            let sum: f64 = eig.eigenvalues.iter().sum();
            assert!((sum - a.trace().re).abs() <= 1e-9 * a.trace().re.abs().max(1.0));
            for k in 0..n {
                let vk = eig.eigenvectors.column(k);
                let av = a.mul_vec(&vk);
                let resid: Vec<Complex64> = av.iter().zip(&vk).map(|(x, y)| x - y * eig.eigenvalues[k]).collect();
                assert!(norm2(&resid) <= 1e-8 * a.frobenius_norm());
            }
        }
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Domain(_))
        ));
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(hermitian_eig(&a), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_one_aligned_channel() {
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let sp = dominant_right_singular_vector(&h).unwrap();
        assert!((sp.sigma - 1.0).abs() < 1e-12);
        assert!((sp.vector[0] - ONE).norm() < 1e-12);
        assert!(sp.vector[1].norm() < 1e-12);
    }

    #[test]
    fn miso_closed_form() {
        let row = vec![c(0.3, -0.2), c(-1.0, 0.5), c(0.0, 0.7), c(0.2, 0.2)];
        let h = ComplexMatrix::from_vec(1, 4, row.clone()).unwrap();
        let sp = dominant_right_singular_vector(&h).unwrap();
        let hn = norm2(&row);
        assert!((sp.sigma - hn).abs() < 1e-12);
        // v = H^H / ||H|| up to the phase convention.
        let mut expected: Vec<Complex64> = row.iter().map(|z| z.conj() / hn).collect();
        normalize_phase(&mut expected);
        for (a, b) in sp.vector.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_channel_convention() {
        let sp = dominant_right_singular_vector(&ComplexMatrix::zeros(2, 4)).unwrap();
        assert_eq!(sp.sigma, 0.0);
        assert_eq!(sp.vector[0], ONE);
        assert!(sp.vector[1..].iter().all(|z| *z == ZERO));
    }

    #[test]
    fn dominant_vector_is_maximal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_matrix(&mut rng, 2, 4);
        let sp = dominant_right_singular_vector(&h).unwrap();
        assert!((norm2(&h.mul_vec(&sp.vector)) - sp.sigma).abs() < 1e-8);
        for _ in 0..1000 {
            let mut u: Vec<Complex64> = (0..4)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let n = norm2(&u);
            u.iter_mut().for_each(|z| *z /= n);
            assert!(sp.sigma + 1e-12 >= norm2(&h.mul_vec(&u)));
        }
    }

    #[test]
    fn kron_identity_factor_is_block_diagonal() {
        let b = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -3.0), c(4.0, 0.5)]).unwrap();
        let k = kron(&ComplexMatrix::identity(2), &b).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let expected = if r / 2 == col / 2 { b[(r % 2, col % 2)] } else { ZERO };
                assert_eq!(k[(r, col)], expected);
            }
        }
    }

    #[test]
    fn kron_definition_and_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (p, q, m, n) in [(1, 1, 1, 1), (2, 3, 3, 2), (3, 2, 2, 4)] {
            let a = random_matrix(&mut rng, p, q);
            let b = random_matrix(&mut rng, m, n);
            let k = kron(&a, &b).unwrap();
            assert_eq!((k.rows(), k.cols()), (p * m, q * n));
            for ia in 0..p {
                for ja in 0..q {
                    for ib in 0..m {
                        for jb in 0..n {
                            assert_eq!(k[(ia * m + ib, ja * n + jb)], a[(ia, ja)] * b[(ib, jb)]);
                        }
                    }
                }
            }
            let x = random_matrix(&mut rng, q, 1);
            let y = random_matrix(&mut rng, n, 1);
            let lhs = k.mul_vec(kron(&x, &y).unwrap().as_slice());
            let rhs = kron(&(&a * &x), &(&b * &y)).unwrap();
            for (l, r) in lhs.iter().zip(rhs.as_slice()) {
                assert!((l - r).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 2, 1);
        let b = random_matrix(&mut rng, 1, 3);
        let cm = random_matrix(&mut rng, 2, 2);
        let left = kron(&kron(&a, &b).unwrap(), &cm).unwrap();
        let right = kron(&a, &kron(&b, &cm).unwrap()).unwrap();
        assert!(left.sub(&right).frobenius_norm() < 1e-14);
    }

    #[test]
    fn kron_size_cap() {
        let a = ComplexMatrix::zeros(1 << 7, 1 << 7);
        assert!(matches!(kron(&a, &a), Err(Error::Resource(_))));
    }

    #[test]
    fn psd_factor_identity_and_rank_deficient() {
        let f = psd_factor(&ComplexMatrix::identity(3)).unwrap();
        let ffh = &f * &f.adjoint();
        assert!(ffh.sub(&ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);

        let r = ComplexMatrix::from_real_diagonal(&[4.0, 0.0]);
        let f = psd_factor(&r).unwrap();
        assert_eq!(&f * &f.adjoint(), r);
        assert_eq!(f.column(1), vec![ZERO, ZERO]);
    }

    #[test]
    fn psd_factor_gram_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 5, 12] {
            let g = random_matrix(&mut rng, n, n);
            let r = &g * &g.adjoint();
            let f = psd_factor(&r).unwrap();
            let err = (&f * &f.adjoint()).sub(&r).frobenius_norm() / r.frobenius_norm();
            assert!(err < 1e-8, "n = {n}: {err}");
        }
    }

    #[test]
    fn psd_factor_rejects_indefinite() {
        let r = ComplexMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(psd_factor(&r), Err(Error::Domain(_))));
    }
}
