//! SLNR precoders.
//!
//! Each stream `ℓ` gets a column `g_ℓ` with `g_ℓ^H g_ℓ = P_Tx / N_S`. The
//! robust column maximizes the mean SLNR
//!
//! ```text
//!            σ_ℓ² g^H R_ℓ g
//!   ───────────────────────────────────────
//!   g^H (Σ_{i≠ℓ} σ_i² R_i + (N_S σ_n²/P_Tx) I) g
//! ```
//!
//! which is a generalized Rayleigh quotient, so the optimum is the principal
//! generalized eigenvector of the pencil `(σ_ℓ² R_ℓ, B_ℓ)`.

mod structured;

use num_complex::Complex64;

use crate::channel::SteeringVector;
use crate::error::{Error, Result};
use crate::linalg::{c, cholesky, hermitian_eig, normalize_phase, CMatrix, CVector, HermitianMatrix};
use crate::stats::CorrelationMatrix;

pub use structured::{LowRankModel, DEFAULT_TRUNCATION};

/// Iteration cap of the power-iteration eigen solver.
pub const ITERATIVE_MAX_ITER: usize = 10_000;
/// Relative eigenvalue change at which power iteration stops.
pub const ITERATIVE_TOL: f64 = 1e-10;

/// Linear precoder `G = [g_1, …, g_{N_S}]`, `N_T × N_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    g: CMatrix,
}

impl Precoder {
    pub fn from_matrix(g: CMatrix) -> Self {
        Self { g }
    }

    pub fn from_columns(cols: &[CVector]) -> Result<Self> {
        let n = cols.first().map(|v| v.len()).ok_or_else(|| Error::invalid("no columns"))?;
        if let Some(bad) = cols.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self {
            g: CMatrix::from_columns(cols),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.g
    }

    pub fn column(&self, l: usize) -> CVector {
        self.g.column(l).into_owned()
    }

    pub fn num_antennas(&self) -> usize {
        self.g.nrows()
    }

    pub fn num_streams(&self) -> usize {
        self.g.ncols()
    }

    /// `tr(G G^H)`.
    pub fn total_power(&self) -> f64 {
        self.g.norm_squared()
    }

    pub fn column_power(&self, l: usize) -> f64 {
        self.g.column(l).norm_squared()
    }
}

/// Scales `v` to squared norm `power` and applies the phase convention.
fn scaled_column(mut v: CVector, power: f64) -> Result<CVector> {
    let norm = v.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Numerical("precoder direction is zero or not finite".into()));
    }
    normalize_phase(&mut v);
    Ok(v * c(power.sqrt() / norm))
}

/// Second-order channel statistics of all satellites, plus the power budget.
#[derive(Debug, Clone)]
pub struct SlnrProblem {
    correlations: Vec<CorrelationMatrix>,
    gain_variances: Vec<f64>,
    noise_power: f64,
    total_power: f64,
}

impl SlnrProblem {
    pub fn new(
        correlations: Vec<CorrelationMatrix>,
        gain_variances: Vec<f64>,
        noise_power: f64,
        total_power: f64,
    ) -> Result<Self> {
        if correlations.is_empty() {
            return Err(Error::invalid("at least one satellite required"));
        }
        if correlations.len() != gain_variances.len() {
            return Err(Error::DimensionMismatch {
                expected: correlations.len(),
                found: gain_variances.len(),
            });
        }
        let n = correlations[0].dim();
        if let Some(bad) = correlations.iter().find(|r| r.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        if gain_variances.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("gain variances must be > 0"));
        }
        if !(noise_power > 0.0) || !(total_power > 0.0) {
            return Err(Error::invalid("noise and transmit power must be > 0"));
        }
        Ok(Self {
            correlations,
            gain_variances,
            noise_power,
            total_power,
        })
    }

    pub fn num_satellites(&self) -> usize {
        self.correlations.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.correlations[0].dim()
    }

    pub fn correlations(&self) -> &[CorrelationMatrix] {
        &self.correlations
    }

    pub fn gain_variances(&self) -> &[f64] {
        &self.gain_variances
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    /// Per-stream power `P_Tx / N_S`.
    pub fn stream_power(&self) -> f64 {
        self.total_power / self.num_satellites() as f64
    }

    /// Noise loading `N_S σ_n² / P_Tx` of the leakage matrix.
    pub fn regularization(&self) -> f64 {
        self.noise_power / self.stream_power()
    }

    /// Dense `σ_ℓ² R_ℓ`.
    pub fn signal_matrix(&self, l: usize) -> HermitianMatrix {
        self.correlations[l].to_dense().scale(self.gain_variances[l])
    }

    /// Dense `B_ℓ = Σ_{i≠ℓ} σ_i² R_i + (N_S σ_n² / P_Tx) I`.
    pub fn leakage_matrix(&self, l: usize) -> HermitianMatrix {
        let n = self.num_antennas();
        let mut b = HermitianMatrix::identity(n).scale(self.regularization());
        for (i, r) in self.correlations.iter().enumerate() {
            if i != l {
                b = b.add_scaled(self.gain_variances[i], &r.to_dense());
            }
        }
        b
    }
}

/// Mean SLNR of stream `l` with precoder column `g`, where the stream power
/// is `p_ℓ = g^H g`.
pub fn mean_slnr(g: &CVector, problem: &SlnrProblem, l: usize) -> Result<f64> {
    if l >= problem.num_satellites() {
        return Err(Error::invalid(format!("satellite index {l} out of range")));
    }
    if g.len() != problem.num_antennas() {
        return Err(Error::DimensionMismatch {
            expected: problem.num_antennas(),
            found: g.len(),
        });
    }
    if g.norm_squared() == 0.0 {
        return Err(Error::invalid("precoder column is zero"));
    }
    let sig = problem.gain_variances[l] * problem.correlations[l].quadratic_form(g);
    let leak: f64 = problem
        .correlations
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != l)
        .map(|(i, r)| problem.gain_variances[i] * r.quadratic_form(g))
        .sum();
    // g^H (σ_n²/p) I g = σ_n²
    Ok(sig / (leak + problem.noise_power))
}

/// Largest eigenvalue of `B^{-1} A` with a unit-norm eigenvector.
#[derive(Debug, Clone)]
pub struct GeneralizedEigenpair {
    pub value: f64,
    pub vector: CVector,
}

/// Principal eigenpair of the Hermitian-definite pencil `(A, B)`.
///
/// Reduces to the standard problem `L^{-1} A L^{-H} y = λ y` with `B = L L^H`
/// and back-substitutes `v = L^{-H} y`.
pub fn principal_generalized_eigenpair(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<GeneralizedEigenpair> {
    check_pencil(a, b)?;
    let chol = cholesky(b)?;
    let y = chol.solve_lower(a.as_matrix());
    // C = L^{-1} A L^{-H} = (L^{-1} (L^{-1} A)^H)^H
    let reduced = chol.solve_lower(&y.adjoint()).adjoint();
    let eig = hermitian_eig(&HermitianMatrix::symmetrize(reduced))?;
    let top = eig.vectors.column(eig.values.len() - 1).into_owned();
    let v = chol.solve_upper_adjoint(&CMatrix::from_column_slice(top.len(), 1, top.as_slice()));
    let mut v = CVector::from_column_slice(v.as_slice());
    v /= c(v.norm());
    normalize_phase(&mut v);
    Ok(GeneralizedEigenpair {
        value: eig.max_value(),
        vector: v,
    })
}

/// Power iteration on `B^{-1} A`, for pencils too large for a dense
/// eigendecomposition.
pub fn principal_generalized_eigenpair_iterative(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    max_iter: usize,
    tol: f64,
) -> Result<GeneralizedEigenpair> {
    check_pencil(a, b)?;
    let n = a.dim();
    let chol = cholesky(b)?;
    // deterministic start with energy in every coordinate
    let mut v = CVector::from_fn(n, |i, _| Complex64::from_polar(1.0, 0.7 * i as f64));
    v /= c(v.norm());
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..max_iter {
        let w = chol.solve_vector(&(a.as_matrix() * &v));
        let norm = w.norm();
        if !(norm > 0.0) {
            return Err(Error::Numerical("iteration collapsed onto the null space of A".into()));
        }
        v = w / c(norm);
        let lambda = a.quadratic_form(&v) / b.quadratic_form(&v);
        if (lambda - prev).abs() <= tol * lambda.abs() {
            normalize_phase(&mut v);
            return Ok(GeneralizedEigenpair { value: lambda, vector: v });
        }
        prev = lambda;
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

fn check_pencil(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Numerical route used by [`robust_precoder_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    /// Dense Cholesky reduction and full Hermitian eigendecomposition.
    Dense,
    /// Capped power iteration on the dense pencil.
    Iterative,
    /// Kronecker-factored low-rank model of the correlation matrices; cost
    /// independent of the dense `N_T × N_T` pencil. Factor eigenvalues below
    /// the given fraction of the largest are dropped.
    Structured { truncation: f64 },
}

/// Mean-SLNR-optimal precoder using the dense solver.
pub fn robust_precoder(problem: &SlnrProblem) -> Result<Precoder> {
    robust_precoder_with(problem, Solver::Dense)
}

pub fn robust_precoder_with(problem: &SlnrProblem, solver: Solver) -> Result<Precoder> {
    let power = problem.stream_power();
    let cols = match solver {
        Solver::Structured { truncation } => {
            let model = LowRankModel::new(problem, truncation)?;
            (0..problem.num_satellites())
                .map(|l| {
                    model
                        .principal_pair(l)
                        .and_then(|p| scaled_column(p.vector, power))
                        .map_err(|e| e.at_satellite(l))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Solver::Dense | Solver::Iterative => (0..problem.num_satellites())
            .map(|l| {
                let a = problem.signal_matrix(l);
                let b = problem.leakage_matrix(l);
                let pair = if solver == Solver::Dense {
                    principal_generalized_eigenpair(&a, &b)
                } else {
                    principal_generalized_eigenpair_iterative(&a, &b, ITERATIVE_MAX_ITER, ITERATIVE_TOL)
                };
                pair.and_then(|p| scaled_column(p.vector, power))
                    .map_err(|e| e.at_satellite(l))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Precoder::from_columns(&cols)
}

fn check_inputs(steering: &[SteeringVector], gains: &[f64], noise_power: f64, total_power: f64) -> Result<usize> {
    let first = steering.first().ok_or_else(|| Error::invalid("at least one satellite required"))?;
    if steering.len() != gains.len() {
        return Err(Error::DimensionMismatch {
            expected: steering.len(),
            found: gains.len(),
        });
    }
    let n = first.len();
    if let Some(bad) = steering.iter().find(|a| a.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
    }
    if gains.iter().any(|&g| !(g > 0.0)) || !(noise_power > 0.0) || !(total_power > 0.0) {
        return Err(Error::invalid("gain variances, noise and transmit power must be > 0"));
    }
    Ok(n)
}

/// Columns proportional to `(Σ_i σ_i² a_i a_i^H + (N_S σ_n²/P_Tx) I)^{-1} a_ℓ`.
///
/// With `V = [σ_1 a_1, …]` the matrix is `cI + V V^H`, and by the push-through
/// identity `(cI + V V^H)^{-1} V = V (cI + V^H V)^{-1}`, so column `ℓ` is
/// proportional to `V K^{-1} e_ℓ` with the `N_S × N_S` matrix
/// `K = cI + V^H V`.
fn regularized_zero_forcing(
    steering: &[SteeringVector],
    gains: &[f64],
    noise_power: f64,
    total_power: f64,
) -> Result<Precoder> {
    let n = check_inputs(steering, gains, noise_power, total_power)?;
    let ns = steering.len();
    let reg = ns as f64 * noise_power / total_power;
    let v = CMatrix::from_fn(n, ns, |k, i| steering[i].entries()[k] * gains[i].sqrt());
    let k = HermitianMatrix::symmetrize(v.adjoint() * &v).add_identity(reg);
    let kinv = cholesky(&k)?.solve(&CMatrix::identity(ns, ns));
    let dirs = &v * kinv;
    let power = total_power / ns as f64;
    let cols = (0..ns)
        .map(|l| scaled_column(dirs.column(l).into_owned(), power).map_err(|e| e.at_satellite(l)))
        .collect::<Result<Vec<_>>>()?;
    Precoder::from_columns(&cols)
}

/// Precoder for perfectly known steering vectors.
pub fn perfect_csi_precoder(
    steering: &[SteeringVector],
    gain_variances: &[f64],
    noise_power: f64,
    total_power: f64,
) -> Result<Precoder> {
    regularized_zero_forcing(steering, gain_variances, noise_power, total_power)
}

/// Perfect-CSI formula evaluated at estimated steering vectors, with the
/// leakage sum over `i ≠ ℓ`.
///
/// Adding `σ_ℓ² â_ℓ â_ℓ^H` to the leakage matrix only rescales
/// `B_ℓ^{-1} â_ℓ` (Sherman–Morrison), so after normalization the columns
/// coincide with [`perfect_csi_precoder`] applied to the estimates.
pub fn heuristic_precoder(
    estimated: &[SteeringVector],
    gain_variances: &[f64],
    noise_power: f64,
    total_power: f64,
) -> Result<Precoder> {
    regularized_zero_forcing(estimated, gain_variances, noise_power, total_power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{steering_vector, UraConfig};
    use crate::geometry::SpaceAngles;
    use crate::stats::{steering_autocorrelation, AngleErrorModel};
    use approx::assert_relative_eq;

    fn diag(d: &[f64]) -> HermitianMatrix {
        HermitianMatrix::new(CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| c(x))))).unwrap()
    }

    #[test]
    fn identical_pencil_has_unit_eigenvalue() {
        let a = diag(&[2.0, 5.0, 1.0]);
        let p = principal_generalized_eigenpair(&a, &a).unwrap();
        assert_relative_eq!(p.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn diagonal_pencil() {
        let p = principal_generalized_eigenpair(&diag(&[3.0, 1.0]), &HermitianMatrix::identity(2)).unwrap();
        assert_relative_eq!(p.value, 3.0, max_relative = 1e-14);
        assert_relative_eq!(p.vector[0].re, 1.0, max_relative = 1e-14);
        assert!(p.vector[1].norm() < 1e-14);
        let q = principal_generalized_eigenpair_iterative(&diag(&[3.0, 1.0]), &HermitianMatrix::identity(2), 1000, 1e-14).unwrap();
        assert_relative_eq!(q.value, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn non_pd_leakage_is_reported() {
        let err = principal_generalized_eigenpair(&diag(&[1.0, 1.0]), &diag(&[1.0, -1.0])).unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { pivot: 1 });
    }

    #[test]
    fn iterative_reports_cap() {
        // close top eigenvalues cannot converge in a single step
        let err = principal_generalized_eigenpair_iterative(&diag(&[3.0, 2.9]), &HermitianMatrix::identity(2), 1, 1e-14).unwrap_err();
        assert_eq!(err, Error::NoConvergence { iterations: 1 });
    }

    #[test]
    fn single_satellite_matched_filter() {
        let ura = UraConfig::new(3, 3, 0.025, 30e9).unwrap();
        let phi = SpaceAngles::new(0.1, -0.2);
        let a = steering_vector(&ura, phi);
        let r = steering_autocorrelation(&ura, phi, &AngleErrorModel::None);
        let (s2, n2, p) = (2.0, 0.5, 3.0);
        let prob = SlnrProblem::new(vec![r], vec![s2], n2, p).unwrap();
        let g = a.entries() * c((p / 9.0).sqrt());
        assert_relative_eq!(mean_slnr(&g, &prob, 0).unwrap(), s2 * 9.0 * p / n2, max_relative = 1e-12);

        let rob = robust_precoder(&prob).unwrap();
        assert_relative_eq!(rob.column_power(0), p, max_relative = 1e-12);
        assert_relative_eq!(rob.column(0).dotc(a.entries()).norm(), 3.0 * p.sqrt(), max_relative = 1e-10);

        let per = perfect_csi_precoder(std::slice::from_ref(&a), &[s2], n2, p).unwrap();
        assert_relative_eq!(per.column(0).dotc(a.entries()).norm(), 3.0 * p.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn mean_slnr_rejects_zero_vector() {
        let ura = UraConfig::new(2, 2, 0.025, 30e9).unwrap();
        let r = steering_autocorrelation(&ura, SpaceAngles::default(), &AngleErrorModel::None);
        let prob = SlnrProblem::new(vec![r], vec![1.0], 1.0, 1.0).unwrap();
        assert!(mean_slnr(&CVector::zeros(4), &prob, 0).is_err());
        assert!(mean_slnr(&CVector::zeros(3), &prob, 0).is_err());
    }

    #[test]
    fn problem_validation() {
        let ura = UraConfig::new(2, 2, 0.025, 30e9).unwrap();
        let r = steering_autocorrelation(&ura, SpaceAngles::default(), &AngleErrorModel::None);
        assert!(SlnrProblem::new(vec![r.clone()], vec![0.0], 1.0, 1.0).is_err());
        assert!(SlnrProblem::new(vec![r.clone()], vec![1.0, 1.0], 1.0, 1.0).is_err());
        assert!(SlnrProblem::new(vec![r.clone()], vec![1.0], 0.0, 1.0).is_err());
        assert!(SlnrProblem::new(vec![], vec![], 1.0, 1.0).is_err());
    }

    #[test]
    fn phase_rotation_keeps_slnr() {
        let ura = UraConfig::new(2, 2, 0.025, 30e9).unwrap();
        let rs = [SpaceAngles::new(0.1, 0.0), SpaceAngles::new(-0.2, 0.3)]
            .iter()
            .map(|&p| steering_autocorrelation(&ura, p, &AngleErrorModel::uniform(0.05).unwrap()))
            .collect();
        let prob = SlnrProblem::new(rs, vec![1.0, 0.7], 0.2, 2.0).unwrap();
        let g = CVector::from_fn(4, |i, _| Complex64::new(1.0 + i as f64, -0.5 * i as f64));
        let a = mean_slnr(&g, &prob, 0).unwrap();
        let b = mean_slnr(&(&g * Complex64::from_polar(1.0, 1.1)), &prob, 0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
        // scaling changes the relative weight of noise
        let s = mean_slnr(&(&g * c(3.0)), &prob, 0).unwrap();
        assert!((s - a).abs() > 1e-6 * a);
    }
}
