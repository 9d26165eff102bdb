//! Capacity benchmark and achievable rates with linear precoding.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix, HermitianMatrix};
use crate::precoding::Precoder;

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Water-filling solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    /// Power per eigenmode, aligned with the input eigenvalues.
    pub powers: Vec<f64>,
    /// Water level `μ*`.
    pub water_level: f64,
}

impl PowerAllocation {
    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }
}

/// Water-filling over eigenmodes: `p_μ = max(0, μ* − σ_n²/λ_μ)` with
/// `Σ p_μ = P_Tx`.
///
/// Solved exactly on the active set: modes are activated in decreasing
/// eigenvalue order until the next inverse gain lies above the water level.
pub fn waterfill(eigenvalues: &[f64], total_power: f64, noise_power: f64) -> Result<PowerAllocation> {
    if !(total_power > 0.0) || !(noise_power > 0.0) {
        return Err(Error::invalid("transmit and noise power must be > 0"));
    }
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::invalid("eigenvalues must be finite"));
    }
    let max = eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    if !(max > 0.0) {
        return Err(Error::invalid("at least one eigenvalue must be positive"));
    }
    let floor = RANK_TOL * max;
    let mut order: Vec<usize> = (0..eigenvalues.len())
        .filter(|&i| eigenvalues[i] > floor)
        .collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));

    let inv: Vec<f64> = order.iter().map(|&i| noise_power / eigenvalues[i]).collect();
    let mut active = order.len();
    let mut level;
    loop {
        let base: f64 = inv[..active].iter().sum();
        level = (total_power + base) / active as f64;
        if active == 1 || level > inv[active - 1] {
            break;
        }
        active -= 1;
    }
    let mut powers = vec![0.0; eigenvalues.len()];
    for (rank, &i) in order.iter().enumerate().take(active) {
        powers[i] = level - inv[rank];
    }
    Ok(PowerAllocation {
        powers,
        water_level: level,
    })
}

/// Nonnegative eigenvalues of `H H^H`, clipped at `−RANK_TOL · max`.
pub fn gram_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    let g = HermitianMatrix::symmetrize(h * h.adjoint());
    let values = hermitian_eig(&g)?.values;
    let max = values.iter().cloned().fold(0.0_f64, f64::max);
    let floor = -RANK_TOL * max.max(f64::MIN_POSITIVE);
    if let Some(bad) = values.iter().find(|&&v| v < floor - 1e-300) {
        return Err(Error::invalid(format!(
            "Gram matrix has negative eigenvalue {bad:e}"
        )));
    }
    Ok(values.into_iter().map(|v| v.max(0.0)).collect())
}

/// MIMO capacity `Σ log2(1 + λ_μ p_μ / σ_n²)` with water-filling powers.
pub fn capacity(h: &CMatrix, total_power: f64, noise_power: f64) -> Result<f64> {
    let lambdas = gram_eigenvalues(h)?;
    let alloc = waterfill(&lambdas, total_power, noise_power)?;
    Ok(lambdas
        .iter()
        .zip(&alloc.powers)
        .map(|(l, p)| (1.0 + l * p / noise_power).log2())
        .sum())
}

/// Per-satellite SINR `|h_ℓ^H g_ℓ|² / (Σ_{i≠ℓ} |h_ℓ^H g_i|² + σ_n²)`.
pub fn sinr(h: &CMatrix, g: &Precoder, noise_power: f64) -> Result<Vec<f64>> {
    let gm = g.matrix();
    if h.ncols() != gm.nrows() {
        return Err(Error::DimensionMismatch {
            expected: h.ncols(),
            found: gm.nrows(),
        });
    }
    if h.nrows() != gm.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: gm.ncols(),
        });
    }
    let hg = h * gm;
    Ok((0..h.nrows())
        .map(|l| {
            let signal = hg[(l, l)].norm_sqr();
            let interference: f64 = (0..hg.ncols()).filter(|&i| i != l).map(|i| hg[(l, i)].norm_sqr()).sum();
            signal / (interference + noise_power)
        })
        .collect())
}

/// `Σ log2(1 + Γ_ℓ)`.
pub fn sum_rate(sinrs: &[f64]) -> f64 {
    sinrs.iter().map(|g| (1.0 + g).log2()).sum()
}

/// Capacity and achievable rate of one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub capacity: f64,
    pub sum_rate: f64,
    pub sinr: Vec<f64>,
}

pub fn evaluate(h: &CMatrix, g: &Precoder, total_power: f64, noise_power: f64) -> Result<RateReport> {
    let sinr = sinr(h, g, noise_power)?;
    Ok(RateReport {
        capacity: capacity(h, total_power, noise_power)?,
        sum_rate: sum_rate(&sinr),
        sinr,
    })
}
