//! Low-rank Kronecker solver for the robust precoder.
//!
//! Each correlation matrix is `R_x ⊗ R_y` with small Hermitian factors. From
//! their eigendecompositions, `σ_i² R_i ≈ W_i W_i^H` where the columns of
//! `W_i` are scaled Kronecker products of factor eigenvectors, keeping only
//! pairs whose eigenvalue product exceeds `truncation` times the largest.
//! All inner products between columns factor into per-axis inner products,
//! so the Gram matrix of every `W_i` is assembled without touching vectors
//! of length `N_T`.
//!
//! For stream `ℓ`, with `V` the stacked factors of the other satellites,
//! `B_ℓ = cI + V V^H` and `K = cI + V^H V`:
//!
//! ```text
//!   M = W_ℓ^H W_ℓ − W_ℓ^H V K^{-1} V^H W_ℓ        (c · W_ℓ^H B_ℓ^{-1} W_ℓ)
//!   λ_max(B_ℓ^{-1} σ_ℓ² R_ℓ) = λ_max(M) / c
//!   v ∝ W_ℓ u − V K^{-1} V^H W_ℓ u                 (u principal for M)
//! ```

use num_complex::Complex64;

use super::{GeneralizedEigenpair, SlnrProblem};
use crate::error::{Error, Result};
use crate::linalg::{c, cholesky, hermitian_eig, normalize_phase, CMatrix, CVector, HermitianMatrix};

/// Default relative cut-off for factor eigenvalue products.
pub const DEFAULT_TRUNCATION: f64 = 1e-12;

/// Truncated eigen-factorization of one satellite's scaled correlation.
#[derive(Debug, Clone)]
struct SatelliteFactor {
    ux: CMatrix,
    uy: CMatrix,
    /// Kept `(p, q, scale)` with `scale = sqrt(σ² λ_x,p λ_y,q)`.
    columns: Vec<(usize, usize, f64)>,
}

/// Low-rank representation of an [`SlnrProblem`].
#[derive(Debug, Clone)]
pub struct LowRankModel {
    factors: Vec<SatelliteFactor>,
    /// Offset of each satellite's columns in the stacked factor.
    offsets: Vec<usize>,
    gram: CMatrix,
    regularization: f64,
    nx: usize,
    ny: usize,
}

impl LowRankModel {
    pub fn new(problem: &SlnrProblem, truncation: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&truncation) {
            return Err(Error::invalid("truncation must lie in [0, 1)"));
        }
        let mut factors = Vec::with_capacity(problem.num_satellites());
        for (i, (r, &s2)) in problem.correlations().iter().zip(problem.gain_variances()).enumerate() {
            let (ex, ey) = r.factor_eigen().map_err(|e| e.at_satellite(i))?;
            let lx: Vec<f64> = ex.values.iter().map(|v| v.max(0.0)).collect();
            let ly: Vec<f64> = ey.values.iter().map(|v| v.max(0.0)).collect();
            let top = lx.iter().cloned().fold(0.0, f64::max) * ly.iter().cloned().fold(0.0, f64::max);
            let mut columns = Vec::new();
            // descending so the dominant column comes first
            for p in (0..lx.len()).rev() {
                for q in (0..ly.len()).rev() {
                    let prod = lx[p] * ly[q];
                    if prod > truncation * top && prod > 0.0 {
                        columns.push((p, q, (s2 * prod).sqrt()));
                    }
                }
            }
            factors.push(SatelliteFactor {
                ux: ex.vectors,
                uy: ey.vectors,
                columns,
            });
        }
        let mut offsets = Vec::with_capacity(factors.len() + 1);
        let mut total = 0;
        for f in &factors {
            offsets.push(total);
            total += f.columns.len();
        }
        offsets.push(total);

        let mut gram = CMatrix::zeros(total, total);
        for (i, fi) in factors.iter().enumerate() {
            for (j, fj) in factors.iter().enumerate().skip(i) {
                let gx = fi.ux.adjoint() * &fj.ux;
                let gy = fi.uy.adjoint() * &fj.uy;
                for (a, &(p, q, s)) in fi.columns.iter().enumerate() {
                    for (b, &(pp, qq, t)) in fj.columns.iter().enumerate() {
                        let v = gx[(p, pp)] * gy[(q, qq)] * (s * t);
                        gram[(offsets[i] + a, offsets[j] + b)] = v;
                        gram[(offsets[j] + b, offsets[i] + a)] = v.conj();
                    }
                }
            }
        }
        let first = &problem.correlations()[0];
        Ok(Self {
            factors,
            offsets,
            gram,
            regularization: problem.regularization(),
            nx: first.x_factor().nrows(),
            ny: first.y_factor().nrows(),
        })
    }

    /// Number of retained columns for satellite `i`.
    pub fn rank(&self, i: usize) -> usize {
        self.factors[i].columns.len()
    }

    /// Principal generalized eigenpair of `(σ_ℓ² R_ℓ, B_ℓ)`.
    pub fn principal_pair(&self, l: usize) -> Result<GeneralizedEigenpair> {
        let own: Vec<usize> = (self.offsets[l]..self.offsets[l + 1]).collect();
        if own.is_empty() {
            return Err(Error::invalid("satellite has a zero correlation matrix"));
        }
        let other: Vec<usize> = (0..self.offsets[self.factors.len()])
            .filter(|k| !own.contains(k))
            .collect();
        let creg = self.regularization;

        let g_ss = select(&self.gram, &own, &own);
        let (m, coupling) = if other.is_empty() {
            (g_ss, None)
        } else {
            let g_ts = select(&self.gram, &other, &own);
            let g_tt = select(&self.gram, &other, &other);
            let k = HermitianMatrix::symmetrize(g_tt).add_identity(creg);
            let kinv_gts = cholesky(&k)?.solve(&g_ts);
            (g_ss - g_ts.adjoint() * &kinv_gts, Some(kinv_gts))
        };
        let eig = hermitian_eig(&HermitianMatrix::symmetrize(m))?;
        let u = eig.vectors.column(eig.values.len() - 1).into_owned();

        let mut coef = vec![Complex64::new(0.0, 0.0); self.offsets[self.factors.len()]];
        for (a, &k) in own.iter().enumerate() {
            coef[k] = u[a];
        }
        if let Some(kinv_gts) = coupling {
            let t = kinv_gts * &u;
            for (a, &k) in other.iter().enumerate() {
                coef[k] = -t[a];
            }
        }
        let mut v = self.synthesize(&coef);
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(Error::Numerical("structured solver produced a zero direction".into()));
        }
        v /= c(norm);
        normalize_phase(&mut v);
        Ok(GeneralizedEigenpair {
            value: eig.max_value() / creg,
            vector: v,
        })
    }

    /// `Σ_k coef_k w_k` as a length-`N_T` vector.
    fn synthesize(&self, coef: &[Complex64]) -> CVector {
        let mut out = CMatrix::zeros(self.nx, self.ny);
        for (i, f) in self.factors.iter().enumerate() {
            // Σ_{pq} c_pq s_pq u_p ⊗ w_q  ==  U_x C U_y^T  (row-major vec)
            let mut cm = CMatrix::zeros(f.ux.ncols(), f.uy.ncols());
            for (a, &(p, q, s)) in f.columns.iter().enumerate() {
                cm[(p, q)] += coef[self.offsets[i] + a] * s;
            }
            out += &f.ux * cm * f.uy.transpose();
        }
        CVector::from_iterator(self.nx * self.ny, (0..self.nx).flat_map(|m| (0..self.ny).map(move |n| (m, n))).map(|(m, n)| out[(m, n)]))
    }
}

fn select(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}
