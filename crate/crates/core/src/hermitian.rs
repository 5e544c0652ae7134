//! Dense complex Hermitian matrices and the spectral toolkit the discrimination
//! routines are built from.
//!
//! Every spectral operation (square root, pseudoinverse, image and kernel
//! projectors, trace norm) goes through one Hermitian eigendecomposition, so
//! rank decisions are made the same way everywhere.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

pub use faer::c64;

/// Absolute tolerance on `|a[j][k] - conj(a[k][j])|` when validating input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is not PSD.
pub const PSD_TOL: f64 = 1e-10;
/// Allowed deviation of a density matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Default cap on the dimension of any Kronecker product.
pub const DEFAULT_DIM_CAP: usize = 4096;

const RANK_TOL_FACTOR: f64 = 1e-12;

/// A dense `dim x dim` complex Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    entries: Mat<c64>,
}

impl HermitianMatrix {
    /// Validates squareness, finiteness and Hermiticity (within [`HERMITIAN_TOL`]).
    pub fn new(entries: Mat<c64>) -> Result<Self> {
        let (rows, cols) = (entries.nrows(), entries.ncols());
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let mut max_asymmetry = 0.0f64;
        for j in 0..rows {
            for k in 0..cols {
                let z = entries[(j, k)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry { row: j, col: k });
                }
                if k >= j {
                    let diff = (z - entries[(k, j)].conj()).norm();
                    max_asymmetry = max_asymmetry.max(diff);
                }
            }
        }
        if max_asymmetry > HERMITIAN_TOL {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        Ok(Self::hermitian_part(entries))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> c64) -> Result<Self> {
        Self::new(Mat::from_fn(dim, dim, f))
    }

    /// Real row-major entries; must be symmetric.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("rows of unequal length".into()));
        }
        Self::from_fn(dim, |j, k| c64::new(rows[j][k], 0.0))
    }

    /// `(A + A†) / 2`, with no tolerance check. Used for results of arithmetic
    /// that is Hermitian in exact arithmetic but accumulates rounding asymmetry.
    pub fn hermitian_part(entries: Mat<c64>) -> Self {
        let n = entries.nrows();
        assert_eq!(n, entries.ncols(), "hermitian_part needs a square matrix");
        let entries = Mat::from_fn(n, n, |j, k| {
            if j == k {
                c64::new(entries[(j, j)].re, 0.0)
            } else {
                (entries[(j, k)] + entries[(k, j)].conj()) * 0.5
            }
        });
        Self { entries }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let entries = Mat::from_fn(n, n, |j, k| {
            if j == k {
                c64::new(diag[j], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: Mat::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: Mat::zeros(dim, dim),
        }
    }

    /// Rank-one projector `v v†` onto a (not necessarily normalized) vector.
    pub fn outer(v: &[c64]) -> Self {
        let n = v.len();
        Self::hermitian_part(Mat::from_fn(n, n, |j, k| v[j] * v[k].conj()))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.entries[(row, col)]
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.entries[(j, j)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.entries[(j, j)].re).collect()
    }

    /// Largest absolute entry-wise difference. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        max_abs_diff(self.as_mat(), other.as_mat())
    }

    pub fn max_abs_entry(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                m = m.max(self.entries[(j, k)].norm());
            }
        }
        m
    }

    pub fn scale(&self, factor: f64) -> Self {
        let n = self.dim();
        Self {
            entries: Mat::from_fn(n, n, |j, k| self.entries[(j, k)] * factor),
        }
    }

    /// `a * self + b * other`. Real combinations of Hermitian matrices stay Hermitian.
    pub fn linear_combination(&self, a: f64, other: &HermitianMatrix, b: f64) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        let n = self.dim();
        Ok(Self {
            entries: Mat::from_fn(n, n, |j, k| {
                self.entries[(j, k)] * a + other.entries[(j, k)] * b
            }),
        })
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    /// Plain matrix product; the result is in general not Hermitian.
    pub fn matmul(&self, other: &HermitianMatrix) -> Mat<c64> {
        &self.entries * &other.entries
    }

    /// `tr(self * other)` in `O(dim^2)`; real because both factors are Hermitian.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        assert_eq!(n, other.dim(), "trace_product dimension mismatch");
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                acc += (self.entries[(j, k)] * other.entries[(k, j)]).re;
            }
        }
        acc
    }

    /// `v† A v` for a column vector `v`.
    pub fn quadratic_form(&self, v: &[c64]) -> f64 {
        let n = self.dim();
        assert_eq!(n, v.len(), "quadratic_form dimension mismatch");
        let mut acc = c64::new(0.0, 0.0);
        for j in 0..n {
            let mut row = c64::new(0.0, 0.0);
            for (k, vk) in v.iter().enumerate() {
                row += self.entries[(j, k)] * vk;
            }
            acc += v[j].conj() * row;
        }
        acc.re
    }

    /// `A² = A` (and Hermitian, which holds by construction) within `tol`.
    pub fn is_projection(&self, tol: f64) -> bool {
        let sq = self.matmul(self);
        max_abs_diff(sq.as_ref(), self.as_mat()) <= tol
    }
}

pub(crate) fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Max entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut m = 0.0f64;
    for j in 0..a.nrows() {
        for k in 0..a.ncols() {
            m = m.max((a[(j, k)] - b[(j, k)]).norm());
        }
    }
    m
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let trace = matrix.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace { trace });
        }
        let min_eigenvalue = eig_hermitian(&matrix).eigenvalues[0];
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self(matrix))
    }

    /// Skips validation. Callers must guarantee the density-matrix invariants.
    pub(crate) fn new_unchecked(matrix: HermitianMatrix) -> Self {
        Self(matrix)
    }

    /// Pure state `|ψ⟩⟨ψ|` for the normalized `amplitudes`.
    pub fn pure(amplitudes: &[c64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if amplitudes.is_empty() || !norm_sq.is_finite() || norm_sq == 0.0 {
            return Err(Error::Shape(
                "pure state needs a nonzero finite vector".into(),
            ));
        }
        let inv = 1.0 / norm_sq.sqrt();
        let psi: Vec<c64> = amplitudes.iter().map(|a| a * inv).collect();
        Ok(Self(HermitianMatrix::outer(&psi)))
    }

    /// Diagonal state from a probability vector.
    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        if let Some(&p) = probabilities
            .iter()
            .find(|p| !p.is_finite() || **p < -PSD_TOL)
        {
            return Err(Error::NotPsd { min_eigenvalue: p });
        }
        Self::new(HermitianMatrix::from_real_diagonal(probabilities))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// Uniform convex combination in the given order.
    pub fn uniform_mixture(states: &[DensityMatrix]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::Shape("mixture of zero states".into()))?;
        let n = first.dim();
        let mut acc = Mat::<c64>::zeros(n, n);
        for s in states {
            check_same_dim(n, s.dim())?;
            acc += s.as_mat();
        }
        let w = 1.0 / states.len() as f64;
        Ok(Self(HermitianMatrix::hermitian_part(Mat::from_fn(
            n,
            n,
            |j, k| acc[(j, k)] * w,
        ))))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.0.as_mat()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0)
    }
}

impl AsRef<HermitianMatrix> for DensityMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Eigenvalues in ascending order with the matching unitary of column eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<c64>,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> MatRef<'_, c64> {
        self.eigenvectors.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()))
    }

    /// `dim * max|λ| * 1e-12`.
    pub fn default_rank_tol(&self) -> f64 {
        self.dim() as f64 * self.max_abs_eigenvalue() * RANK_TOL_FACTOR
    }

    /// `V diag(f(λ)) V†`.
    pub fn spectral_map(&self, mut f: impl FnMut(f64) -> f64) -> HermitianMatrix {
        let n = self.dim();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let active: Vec<usize> = (0..n).filter(|&i| weights[i] != 0.0).collect();
        if active.is_empty() {
            return HermitianMatrix::zeros(n);
        }
        let v = &self.eigenvectors;
        let scaled = Mat::from_fn(n, active.len(), |j, c| {
            v[(j, active[c])] * weights[active[c]]
        });
        let basis_adj = Mat::from_fn(active.len(), n, |c, k| v[(k, active[c])].conj());
        HermitianMatrix::hermitian_part(&scaled * &basis_adj)
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.spectral_map(|l| l)
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending.
///
/// Panics only if the eigensolver fails to converge, which does not happen
/// for the finite matrices a validated [`HermitianMatrix`] holds.
pub fn eig_hermitian(a: &HermitianMatrix) -> EigenDecomposition {
    let evd = a
        .as_mat()
        .self_adjoint_eigen(Side::Lower)
        .expect("self-adjoint eigensolver did not converge");
    let n = a.dim();
    let s = evd.S();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let eigenvalues = order.iter().map(|&i| s[i].re).collect();
    let eigenvectors = Mat::from_fn(n, n, |j, c| u[(j, order[c])]);
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Spectrum of `a` after clamping `[-PSD_TOL, 0)` to zero.
fn psd_spectrum(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let mut evd = eig_hermitian(a);
    let min_eigenvalue = evd.eigenvalues[0];
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    for l in &mut evd.eigenvalues {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(evd)
}

/// The unique PSD square root.
pub fn psd_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(psd_spectrum(a)?.spectral_map(f64::sqrt))
}

/// Moore–Penrose pseudoinverse with the default relative rank tolerance.
pub fn pinv(a: &HermitianMatrix) -> HermitianMatrix {
    let evd = eig_hermitian(a);
    let tol = evd.default_rank_tol();
    pinv_from(&evd, tol)
}

/// Moore–Penrose pseudoinverse; eigenvalues with `|λ| <= rank_tol` count as zero.
pub fn pinv_with_tol(a: &HermitianMatrix, rank_tol: f64) -> HermitianMatrix {
    pinv_from(&eig_hermitian(a), rank_tol)
}

fn pinv_from(evd: &EigenDecomposition, rank_tol: f64) -> HermitianMatrix {
    evd.spectral_map(|l| if l.abs() > rank_tol { 1.0 / l } else { 0.0 })
}

/// Orthogonal projector onto `im(A)` for PSD `A`.
pub fn projector_image(a: &HermitianMatrix) -> HermitianMatrix {
    let evd = eig_hermitian(a);
    let tol = evd.default_rank_tol();
    evd.spectral_map(|l| if l.abs() > tol { 1.0 } else { 0.0 })
}

pub fn projector_image_with_tol(a: &HermitianMatrix, rank_tol: f64) -> HermitianMatrix {
    eig_hermitian(a).spectral_map(|l| if l.abs() > rank_tol { 1.0 } else { 0.0 })
}

/// Orthogonal projector onto `ker(A)`, i.e. `I - projector_image(A)`.
pub fn projector_kernel(a: &HermitianMatrix) -> HermitianMatrix {
    let evd = eig_hermitian(a);
    let tol = evd.default_rank_tol();
    evd.spectral_map(|l| if l.abs() > tol { 0.0 } else { 1.0 })
}

pub fn projector_kernel_with_tol(a: &HermitianMatrix, rank_tol: f64) -> HermitianMatrix {
    eig_hermitian(a).spectral_map(|l| if l.abs() > rank_tol { 0.0 } else { 1.0 })
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianMatrix) -> f64 {
    eig_hermitian(a).eigenvalues.iter().map(|l| l.abs()).sum()
}

/// `A ⊗ B` with the default dimension cap.
pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    kron_capped(a, b, DEFAULT_DIM_CAP)
}

/// `A ⊗ B`, indexed as `[(j·dimB + k), (l·dimB + m)] = A[j][l]·B[k][m]`.
pub fn kron_capped(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    cap: usize,
) -> Result<HermitianMatrix> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na
        .checked_mul(nb)
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::Capacity {
            required: format!("{na}*{nb}"),
            cap,
        })?;
    let entries = Mat::from_fn(n, n, |r, c| {
        a.entries[(r / nb, c / nb)] * b.entries[(r % nb, c % nb)]
    });
    Ok(HermitianMatrix { entries })
}

/// Traces out the first tensor factor, of dimension `dim_first`.
pub fn partial_trace_first(a: &HermitianMatrix, dim_first: usize) -> Result<HermitianMatrix> {
    let n = a.dim();
    if dim_first == 0 || !n.is_multiple_of(dim_first) {
        return Err(Error::Shape(format!(
            "first factor dimension {dim_first} does not divide {n}"
        )));
    }
    let rest = n / dim_first;
    let mut out = Mat::<c64>::zeros(rest, rest);
    for j in 0..dim_first {
        let block = a.entries.as_ref().submatrix(j * rest, j * rest, rest, rest);
        out += block;
    }
    Ok(HermitianMatrix { entries: out })
}
