//! Line-of-sight channel model for a uniform rectangular array.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::SpaceAngles;
use crate::linalg::{kronecker_vec, CMatrix, CVector};
use crate::stats::AngleErrorModel;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Uniform rectangular array geometry and carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UraConfig {
    nx: usize,
    ny: usize,
    spacing: f64,
    carrier_frequency: f64,
}

impl UraConfig {
    pub fn new(nx: usize, ny: usize, spacing: f64, carrier_frequency: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid("array needs at least one element per axis"));
        }
        if !(spacing > 0.0) || !(carrier_frequency > 0.0) {
            return Err(Error::invalid("antenna spacing and carrier frequency must be > 0"));
        }
        Ok(Self {
            nx,
            ny,
            spacing,
            carrier_frequency,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// `N_T = N_x · N_y`.
    pub fn num_antennas(&self) -> usize {
        self.nx * self.ny
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    /// `ν = 2π f_c / c`.
    pub fn wavenumber(&self) -> f64 {
        TAU * self.carrier_frequency / SPEED_OF_LIGHT
    }

    /// Inter-element phase factor `ν D_A`.
    pub fn phase_step(&self) -> f64 {
        self.wavenumber() * self.spacing
    }
}

/// Unit-modulus array response towards a pair of space angles.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: CVector,
    angles: SpaceAngles,
}

impl SteeringVector {
    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn angles(&self) -> SpaceAngles {
        self.angles
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Response of one array axis: entry `i` is `exp(−j k i φ)`.
pub fn axis_response(n: usize, phase_step: f64, phi: f64) -> CVector {
    CVector::from_fn(n, |i, _| Complex64::from_polar(1.0, -phase_step * i as f64 * phi))
}

/// `a = a_x ⊗ a_y`; entry `n + m N_y` is `exp(−j ν D_A (m φ_x + n φ_y))`
/// with zero-based `m`, `n`.
pub fn steering_vector(ura: &UraConfig, angles: SpaceAngles) -> SteeringVector {
    let k = ura.phase_step();
    let entries = kronecker_vec(
        &axis_response(ura.nx, k, angles.x),
        &axis_response(ura.ny, k, angles.y),
    );
    SteeringVector { entries, angles }
}

/// Antenna gains and receiver noise of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Transmit gain per array element, dBi.
    pub tx_gain_dbi: f64,
    /// Receive gain per satellite, dBi.
    pub rx_gain_dbi: f64,
    /// Receiver noise power, W.
    pub noise_power: f64,
}

impl LinkBudget {
    /// Splits aggregate antenna gains: the transmit gain is shared over
    /// `n_tx` elements and the receive gain over `n_sat` satellites.
    pub fn from_aggregate_gains(
        tx_total_dbi: f64,
        n_tx: usize,
        rx_total_dbi: f64,
        n_sat: usize,
        noise_power: f64,
    ) -> Result<Self> {
        if !(noise_power > 0.0) {
            return Err(Error::invalid("noise power must be > 0"));
        }
        Ok(Self {
            tx_gain_dbi: tx_total_dbi - 10.0 * (n_tx as f64).log10(),
            rx_gain_dbi: rx_total_dbi - 10.0 * (n_sat as f64).log10(),
            noise_power,
        })
    }
}

/// Free-space path loss in dB at distance `d`.
pub fn free_space_path_loss_db(d: f64, carrier_frequency: f64) -> f64 {
    20.0 * (4.0 * PI * d * carrier_frequency / SPEED_OF_LIGHT).log10()
}

/// Mean channel power gain `σ_α² = 10^{(ζ_Tx + ζ_Rx − FSPL)/10}`.
pub fn channel_gain_variance(d: f64, ura: &UraConfig, budget: &LinkBudget) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!("distance must be > 0, got {d}")));
    }
    let db = budget.tx_gain_dbi + budget.rx_gain_dbi - free_space_path_loss_db(d, ura.carrier_frequency);
    Ok(10f64.powf(db / 10.0))
}

/// `α = √σ_α² · e^{jφ₀}` with `φ₀ ~ U[0, 2π)`.
pub fn realize_gain<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let phase = rng.random_range(0.0..TAU);
    Complex64::from_polar(variance.sqrt(), phase)
}

/// Estimated angles `φ̂ = φ + ξ` with independent errors per axis.
///
/// The result is not clipped to `[−1, 1]`.
pub fn perturb_angles<R: Rng + ?Sized>(
    rng: &mut R,
    truth: SpaceAngles,
    err: &AngleErrorModel,
) -> SpaceAngles {
    let ex = err.sample(rng);
    let ey = err.sample(rng);
    SpaceAngles::new(truth.x + ex, truth.y + ey)
}

/// LOS channel `h = α a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    entries: CVector,
    gain: Complex64,
}

impl ChannelVector {
    pub fn new(gain: Complex64, steering: &SteeringVector) -> Self {
        Self {
            entries: steering.entries() * gain,
            gain,
        }
    }

    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn gain(&self) -> Complex64 {
        self.gain
    }
}

/// `H = [h_1, …, h_{N_S}]^H`; row `ℓ` is `h_ℓ^H`.
pub fn channel_matrix(channels: &[ChannelVector]) -> Result<CMatrix> {
    let first = channels
        .first()
        .ok_or_else(|| Error::invalid("at least one channel required"))?;
    let n = first.entries.len();
    let mut h = CMatrix::zeros(channels.len(), n);
    for (l, ch) in channels.iter().enumerate() {
        if ch.entries.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ch.entries.len(),
            });
        }
        for k in 0..n {
            h[(l, k)] = ch.entries[k].conj();
        }
    }
    Ok(h)
}
