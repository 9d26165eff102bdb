//! Space-angle error distributions and steering-vector autocorrelation.
//!
//! With independent errors on the two array axes the autocorrelation of a
//! URA steering vector factors as `R_x ⊗ R_y`. Each factor is Hermitian
//! Toeplitz: its entry at lag `m − m'` is the deterministic phase ramp of the
//! estimated angle times the error characteristic function evaluated at the
//! corresponding array phase lag.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::channel::UraConfig;
use crate::error::{Error, Result};
use crate::geometry::SpaceAngles;
use crate::linalg::{c, hermitian_eig, kronecker, CMatrix, CVector, HermitianEigen, HermitianMatrix};

/// Characteristic function of `U(−ξ_max, ξ_max)`: `sin(t ξ_max) / (t ξ_max)`.
pub fn cf_uniform(t: f64, xi_max: f64) -> f64 {
    let x = t * xi_max;
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Characteristic function of `N(0, σ²)`: `exp(−t² σ² / 2)`.
pub fn cf_gauss(t: f64, sigma: f64) -> f64 {
    (-0.5 * t * t * sigma * sigma).exp()
}

/// Distribution of the estimation error on one space-angle component.
///
/// All supported distributions are symmetric about zero, so their
/// characteristic functions are real and even.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum AngleErrorModel {
    /// Perfect position knowledge.
    #[default]
    None,
    /// `ξ ~ U(−max, max)`.
    Uniform { max: f64 },
    /// `ξ ~ N(0, std_dev²)`.
    Gaussian { std_dev: f64 },
}

impl AngleErrorModel {
    pub fn uniform(max: f64) -> Result<Self> {
        if !(max > 0.0) || !max.is_finite() {
            return Err(Error::invalid(format!("uniform error bound must be > 0, got {max}")));
        }
        Ok(AngleErrorModel::Uniform { max })
    }

    pub fn gaussian(std_dev: f64) -> Result<Self> {
        if !(std_dev > 0.0) || !std_dev.is_finite() {
            return Err(Error::invalid(format!(
                "gaussian error std-dev must be > 0, got {std_dev}"
            )));
        }
        Ok(AngleErrorModel::Gaussian { std_dev })
    }

    /// Gaussian model with the same variance as `U(−max, max)`, i.e.
    /// `σ = max / √3`.
    pub fn gaussian_matching_uniform(max: f64) -> Result<Self> {
        Self::gaussian(max / 3f64.sqrt())
    }

    /// `E[e^{j t ξ}]`.
    pub fn cf(&self, t: f64) -> f64 {
        match *self {
            AngleErrorModel::None => 1.0,
            AngleErrorModel::Uniform { max } => cf_uniform(t, max),
            AngleErrorModel::Gaussian { std_dev } => cf_gauss(t, std_dev),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            AngleErrorModel::None => 0.0,
            AngleErrorModel::Uniform { max } => max * max / 3.0,
            AngleErrorModel::Gaussian { std_dev } => std_dev * std_dev,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AngleErrorModel::None => 0.0,
            AngleErrorModel::Uniform { max } => Uniform::new_inclusive(-max, max)
                .expect("validated bound")
                .sample(rng),
            AngleErrorModel::Gaussian { std_dev } => Normal::new(0.0, std_dev)
                .expect("validated std-dev")
                .sample(rng),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, AngleErrorModel::None)
    }
}

/// Autocorrelation `E[a a^H]` of a URA steering vector, stored as its two
/// per-axis Toeplitz factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    rx: CMatrix,
    ry: CMatrix,
}

impl CorrelationMatrix {
    /// Builds from per-axis factors; the full matrix is `rx ⊗ ry`.
    pub fn from_factors(rx: CMatrix, ry: CMatrix) -> Result<Self> {
        let rx = HermitianMatrix::new(rx)?.into_matrix();
        let ry = HermitianMatrix::new(ry)?.into_matrix();
        Ok(Self { rx, ry })
    }

    /// Dimension `N_x · N_y`.
    pub fn dim(&self) -> usize {
        self.rx.nrows() * self.ry.nrows()
    }

    pub fn x_factor(&self) -> &CMatrix {
        &self.rx
    }

    pub fn y_factor(&self) -> &CMatrix {
        &self.ry
    }

    pub fn to_dense(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrize(kronecker(&self.rx, &self.ry))
    }

    /// `(R_x ⊗ R_y) v`, computed as `R_x V R_y^T` on the `N_x × N_y`
    /// reshaping of `v`.
    pub fn apply(&self, v: &CVector) -> CVector {
        let (nx, ny) = (self.rx.nrows(), self.ry.nrows());
        assert_eq!(v.len(), nx * ny, "vector length does not match correlation dimension");
        let x = CMatrix::from_row_slice(nx, ny, v.as_slice());
        let y = &self.rx * x * self.ry.transpose();
        CVector::from_iterator(nx * ny, (0..nx).flat_map(|m| (0..ny).map(move |n| (m, n))).map(|(m, n)| y[(m, n)]))
    }

    /// `v^H R v`.
    pub fn quadratic_form(&self, v: &CVector) -> f64 {
        v.dotc(&self.apply(v)).re
    }

    /// Eigendecompositions of the two factors.
    pub fn factor_eigen(&self) -> Result<(HermitianEigen, HermitianEigen)> {
        let ex = hermitian_eig(&HermitianMatrix::symmetrize(self.rx.clone()))?;
        let ey = hermitian_eig(&HermitianMatrix::symmetrize(self.ry.clone()))?;
        Ok((ex, ey))
    }
}

/// Toeplitz autocorrelation of one array axis with `n` elements, for
/// estimated space angle `phi_hat` and array phase step `k = ν D_A`.
pub fn axis_autocorrelation(n: usize, k: f64, phi_hat: f64, err: &AngleErrorModel) -> CMatrix {
    let lag_entry = |lag: i64| -> Complex64 {
        let lag = lag as f64;
        Complex64::from_polar(1.0, -k * lag * phi_hat) * err.cf(-k * lag)
    };
    let table: Vec<Complex64> = (-(n as i64) + 1..n as i64).map(lag_entry).collect();
    CMatrix::from_fn(n, n, |m, mp| {
        if m == mp {
            c(1.0)
        } else {
            table[(m as i64 - mp as i64 + n as i64 - 1) as usize]
        }
    })
}

/// `E[a a^H]` for a steering vector whose true angles are the estimate minus
/// an error drawn from `err` on each axis.
pub fn steering_autocorrelation(
    ura: &UraConfig,
    estimated: SpaceAngles,
    err: &AngleErrorModel,
) -> CorrelationMatrix {
    let k = ura.phase_step();
    CorrelationMatrix {
        rx: axis_autocorrelation(ura.nx(), k, estimated.x, err),
        ry: axis_autocorrelation(ura.ny(), k, estimated.y, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::steering_vector;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn ura(nx: usize, ny: usize) -> UraConfig {
        UraConfig::new(nx, ny, 0.025, 30e9).unwrap()
    }

    #[test]
    fn cf_values_at_origin_and_zero() {
        assert_eq!(cf_uniform(0.0, 0.3), 1.0);
        assert_eq!(cf_gauss(0.0, 0.2), 1.0);
        assert!(cf_uniform(PI / 0.3, 0.3).abs() < 1e-15);
        assert_eq!(cf_gauss(5.0, 0.0), 1.0);
        assert_eq!(AngleErrorModel::None.cf(12.0), 1.0);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(AngleErrorModel::uniform(0.0).is_err());
        assert!(AngleErrorModel::gaussian(-1.0).is_err());
        assert!(AngleErrorModel::gaussian(f64::NAN).is_err());
    }

    #[test]
    fn matched_gaussian_has_uniform_variance() {
        let g = AngleErrorModel::gaussian_matching_uniform(0.01).unwrap();
        assert_relative_eq!(g.variance(), AngleErrorModel::uniform(0.01).unwrap().variance(), max_relative = 1e-14);
    }

    #[test]
    fn no_error_gives_rank_one_outer_product() {
        let u = ura(3, 4);
        let phi = SpaceAngles::new(0.13, -0.4);
        let r = steering_autocorrelation(&u, phi, &AngleErrorModel::None).to_dense();
        let a = steering_vector(&u, phi);
        let outer = HermitianMatrix::outer(a.entries());
        assert!((r.as_matrix() - outer.as_matrix()).norm() < 1e-12);
        let e = hermitian_eig(&r).unwrap();
        assert_relative_eq!(e.max_value(), 12.0, max_relative = 1e-12);
        assert!(e.values[..11].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn diagonal_is_one_and_trace_is_dimension() {
        for err in [
            AngleErrorModel::None,
            AngleErrorModel::uniform(0.05).unwrap(),
            AngleErrorModel::gaussian(0.02).unwrap(),
        ] {
            let r = steering_autocorrelation(&ura(4, 3), SpaceAngles::new(0.2, 0.1), &err).to_dense();
            for i in 0..12 {
                assert_eq!(r.as_matrix()[(i, i)], c(1.0));
            }
            assert_relative_eq!(r.as_matrix().trace().re, 12.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn apply_matches_dense_product() {
        let r = steering_autocorrelation(&ura(3, 5), SpaceAngles::new(0.3, -0.2), &AngleErrorModel::uniform(0.04).unwrap());
        let v = CVector::from_fn(15, |i, _| Complex64::new((i as f64).sin(), (2.0 * i as f64).cos()));
        let dense = r.to_dense().as_matrix() * &v;
        assert!((r.apply(&v) - dense).norm() < 1e-12);
    }

    #[test]
    fn factors_are_hermitian_toeplitz() {
        let r = steering_autocorrelation(&ura(6, 5), SpaceAngles::new(0.3, -0.2), &AngleErrorModel::gaussian(0.03).unwrap());
        for f in [r.x_factor(), r.y_factor()] {
            assert!((f - f.adjoint()).norm() < 1e-15);
            let n = f.nrows();
            for i in 1..n {
                for j in 1..n {
                    assert!((f[(i, j)] - f[(i - 1, j - 1)]).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn sample_respects_support_and_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = AngleErrorModel::uniform(0.02).unwrap();
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let x = u.sample(&mut rng);
            assert!(x.abs() <= 0.02);
            acc += x * x;
        }
        assert_relative_eq!(acc / n as f64, u.variance(), max_relative = 0.05);
        assert_eq!(AngleErrorModel::None.sample(&mut rng), 0.0);
    }
}
