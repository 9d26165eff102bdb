//! Dense complex linear-algebra kernels.
//!
//! Storage is `nalgebra` column-major. The Cholesky factorization is written
//! out here so that a failing pivot can be reported; the Hermitian
//! eigensolver delegates to `nalgebra`'s Householder/implicit-QR routine.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative Hermitian-symmetry tolerance accepted by [`HermitianMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Magnitude below which an entry is skipped by the phase convention.
pub const PHASE_REF_TOL: f64 = 1e-12;

const EIG_MAX_SWEEPS: usize = 10_000;

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermitian symmetry within `1e-12 * ||A||_F` and stores the
    /// exactly symmetrized matrix `(A + A^H) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let norm = m.norm();
        let skew = (&m - m.adjoint()).norm();
        if skew > HERMITIAN_TOL * norm.max(f64::MIN_POSITIVE) * 2.0 {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian (skew norm {skew:e}, norm {norm:e})"
            )));
        }
        Ok(Self::symmetrize(m))
    }

    /// Hermitian part `(A + A^H) / 2` of an arbitrary square matrix.
    pub fn symmetrize(m: CMatrix) -> Self {
        let adj = m.adjoint();
        HermitianMatrix((m + adj) * Complex64::new(0.5, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n, n))
    }

    /// Rank-one outer product `v v^H`.
    pub fn outer(v: &CVector) -> Self {
        HermitianMatrix::symmetrize(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &other.0 * Complex64::new(s, 0.0))
    }

    /// `self + s * I`.
    pub fn add_identity(&self, s: f64) -> HermitianMatrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += s;
        }
        HermitianMatrix(m)
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix(&self.0 * Complex64::new(s, 0.0))
    }

    /// Real quadratic form `v^H A v`.
    pub fn quadratic_form(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.0 * v)).re
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    pub fn l(&self) -> &CMatrix {
        &self.l
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &CMatrix) -> CMatrix {
        let n = self.l.nrows();
        let mut y = b.clone();
        for c in 0..y.ncols() {
            for i in 0..n {
                let mut s = y[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * y[(k, c)];
                }
                y[(i, c)] = s / self.l[(i, i)];
            }
        }
        y
    }

    /// Solves `L^H x = b`.
    pub fn solve_upper_adjoint(&self, b: &CMatrix) -> CMatrix {
        let n = self.l.nrows();
        let mut x = b.clone();
        for c in 0..x.ncols() {
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.l[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].conj();
            }
        }
        x
    }

    /// Solves `B x = b` with `B = L L^H`.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        self.solve_upper_adjoint(&self.solve_lower(b))
    }

    pub fn solve_vector(&self, b: &CVector) -> CVector {
        let m = self.solve(&CMatrix::from_column_slice(b.len(), 1, b.as_slice()));
        CVector::from_column_slice(m.as_slice())
    }
}

/// Cholesky factorization `B = L L^H`.
///
/// Fails with the index of the first pivot whose Schur complement is not
/// strictly positive.
pub fn cholesky(b: &HermitianMatrix) -> Result<Cholesky> {
    let a = b.as_matrix();
    let n = a.nrows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(Cholesky { l })
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` belonging to `values[i]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("empty decomposition")
    }

    /// Eigenvector of the largest eigenvalue, phase-normalized.
    pub fn principal_vector(&self) -> CVector {
        let mut v = self.vectors.column(self.values.len() - 1).into_owned();
        normalize_phase(&mut v);
        v
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<HermitianEigen> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let eig = a
        .as_matrix()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIG_MAX_SWEEPS)
        .ok_or(Error::NoConvergence {
            iterations: EIG_MAX_SWEEPS,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        normalize_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok(HermitianEigen { values, vectors })
}

/// Kronecker product `A ⊗ B` (block `(i, j)` equals `a_ij B`).
pub fn kronecker(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            for q in 0..bc {
                for p in 0..br {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn kronecker_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, ai) in a.iter().enumerate() {
        for (p, bp) in b.iter().enumerate() {
            out[i * b.len() + p] = ai * bp;
        }
    }
    out
}

/// Rotates `v` so its first entry with magnitude above [`PHASE_REF_TOL`] is
/// real and positive.
pub fn normalize_phase(v: &mut CVector) {
    if let Some(r) = v.iter().find(|z| z.norm() > PHASE_REF_TOL).copied() {
        let rot = r.conj() / r.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

/// Real scalar as a complex number.
#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
