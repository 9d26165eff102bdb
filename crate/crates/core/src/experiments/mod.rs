//! Seeded Monte Carlo sweeps over inter-satellite distance and transmit power.
//!
//! Geometry is fixed per grid point. Every trial redraws the gain phases and
//! the angle-estimation errors from its own generator, seeded from
//! `(master seed, trial, grid point)`, so results do not depend on how trials
//! are scheduled. Precoders see only estimated angles and statistics; rates
//! are always evaluated on the true channel.

pub mod config;
mod output;
mod seed;

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{
    channel_gain_variance, channel_matrix, perturb_angles, realize_gain, steering_vector, ChannelVector,
    SteeringVector, UraConfig,
};
use crate::error::{Error, Result};
use crate::geometry::{triangle_swarm, SpaceAngles, SwarmGeometry};
use crate::linalg::CMatrix;
use crate::precoding::{
    heuristic_precoder, mean_slnr, perfect_csi_precoder, robust_precoder_with, Precoder, SlnrProblem, Solver,
};
use crate::rates::{capacity, sinr, sum_rate};
use crate::stats::{steering_autocorrelation, AngleErrorModel};

pub use config::{dbw_to_watts, linspace, logspace, ErrorKind, ExperimentConfig, Scheme, KEYS, NUM_SATELLITES};
pub use output::{format_value, CSV_HEADER};
pub use seed::{trial_rng, trial_seed};

/// Fixed geometry and link budget of one grid point.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub ura: UraConfig,
    pub swarm: SwarmGeometry,
    pub true_angles: Vec<SpaceAngles>,
    pub steering: Vec<SteeringVector>,
    pub gain_variances: Vec<f64>,
    pub noise_power: f64,
}

impl Scenario {
    /// Triangle swarm of side `inter_sat_distance` placed as configured.
    pub fn new(cfg: &ExperimentConfig, inter_sat_distance: f64) -> Result<Self> {
        let ura = cfg.ura()?;
        let budget = cfg.link_budget()?;
        let swarm = triangle_swarm(&cfg.placement(), inter_sat_distance)?;
        let true_angles = swarm.space_angles();
        let steering = true_angles.iter().map(|&a| steering_vector(&ura, a)).collect();
        let gain_variances = swarm
            .positions
            .iter()
            .map(|p| channel_gain_variance(p.distance(), &ura, &budget))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ura,
            swarm,
            true_angles,
            steering,
            gain_variances,
            noise_power: budget.noise_power,
        })
    }

    pub fn num_satellites(&self) -> usize {
        self.steering.len()
    }
}

/// Random quantities of one trial.
#[derive(Debug, Clone)]
pub struct TrialDraw {
    /// True channel matrix `H`.
    pub channel: CMatrix,
    /// Estimated space angles per satellite.
    pub estimated: Vec<SpaceAngles>,
}

impl TrialDraw {
    /// Gain phases for all satellites first, then the `(x, y)` errors per
    /// satellite.
    pub fn sample<R: Rng + ?Sized>(sc: &Scenario, err: &AngleErrorModel, rng: &mut R) -> Result<Self> {
        let channels: Vec<ChannelVector> = sc
            .steering
            .iter()
            .zip(&sc.gain_variances)
            .map(|(a, &v)| ChannelVector::new(realize_gain(rng, v), a))
            .collect();
        let estimated = sc.true_angles.iter().map(|&phi| perturb_angles(rng, phi, err)).collect();
        Ok(Self {
            channel: channel_matrix(&channels)?,
            estimated,
        })
    }
}

/// Builds the precoder of `scheme` from what the transmitter knows.
/// Returns `None` for [`Scheme::Capacity`], which has no linear precoder.
pub fn build_precoder(
    scheme: Scheme,
    sc: &Scenario,
    draw: &TrialDraw,
    err: &AngleErrorModel,
    total_power: f64,
    solver: Solver,
) -> Result<Option<Precoder>> {
    let p = match scheme {
        Scheme::Capacity => return Ok(None),
        Scheme::Perfect => perfect_csi_precoder(&sc.steering, &sc.gain_variances, sc.noise_power, total_power)?,
        Scheme::Heuristic => {
            let est: Vec<_> = draw.estimated.iter().map(|&a| steering_vector(&sc.ura, a)).collect();
            heuristic_precoder(&est, &sc.gain_variances, sc.noise_power, total_power)?
        }
        Scheme::Robust => {
            let problem = slnr_problem(sc, &draw.estimated, err, total_power)?;
            robust_precoder_with(&problem, solver)?
        }
    };
    Ok(Some(p))
}

/// Mean-SLNR problem seen by the transmitter given its angle estimates.
pub fn slnr_problem(
    sc: &Scenario,
    estimated: &[SpaceAngles],
    err: &AngleErrorModel,
    total_power: f64,
) -> Result<SlnrProblem> {
    let correlations = estimated
        .iter()
        .map(|&a| steering_autocorrelation(&sc.ura, a, err))
        .collect();
    SlnrProblem::new(correlations, sc.gain_variances.clone(), sc.noise_power, total_power)
}

/// Rate of every scheme in `schemes` for one trial, in the same order.
pub fn run_trial<R: Rng + ?Sized>(
    sc: &Scenario,
    err: &AngleErrorModel,
    total_power: f64,
    schemes: &[Scheme],
    solver: Solver,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let draw = TrialDraw::sample(sc, err, rng)?;
    schemes
        .iter()
        .map(|&s| {
            let rate = match build_precoder(s, sc, &draw, err, total_power, solver)? {
                None => capacity(&draw.channel, total_power, sc.noise_power)?,
                Some(g) => sum_rate(&sinr(&draw.channel, &g, sc.noise_power)?),
            };
            if rate.is_finite() {
                Ok(rate)
            } else {
                Err(Error::Numerical(format!("{s} rate is {rate}")))
            }
        })
        .collect()
}

/// Mean and standard error of one curve at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Summary {
    /// Compensated-summation mean; standard error is the sample standard
    /// deviation over `√n` (zero for a single trial).
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = neumaier_sum(xs.iter().copied()) / n as f64;
        let ss = neumaier_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
        let stderr = if n > 1 {
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, trials: n }
    }
}

fn neumaier_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Aggregated rates of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub schemes: Vec<Scheme>,
    /// `stats[g][s]` belongs to `grid[g]` and `schemes[s]`.
    pub stats: Vec<Vec<Summary>>,
}

impl SweepResult {
    pub fn get(&self, grid_index: usize, scheme: Scheme) -> Option<Summary> {
        let s = self.schemes.iter().position(|&k| k == scheme)?;
        self.stats.get(grid_index).map(|row| row[s])
    }

    /// Mean rate of `scheme` along the grid.
    pub fn means(&self, scheme: Scheme) -> Option<Vec<f64>> {
        (0..self.grid.len()).map(|g| self.get(g, scheme).map(|s| s.mean)).collect()
    }

    /// Grid value maximizing the mean rate of `scheme`.
    pub fn argmax(&self, scheme: Scheme) -> Option<f64> {
        let means = self.means(scheme)?;
        let best = (0..means.len()).max_by(|&a, &b| means[a].total_cmp(&means[b]))?;
        Some(self.grid[best])
    }
}

/// Which parameter the grid sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Distance,
    Power,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Distance => "distance",
            SweepKind::Power => "power",
        })
    }
}

/// Rate versus inter-satellite distance with perfect position knowledge at
/// `power.tx_power_dbw`. The configured error model is ignored.
pub fn run_distance_sweep(cfg: &ExperimentConfig, workers: usize) -> Result<SweepResult> {
    run_sweep(cfg, SweepKind::Distance, workers)
}

/// Rate versus transmit power at `swarm.inter_sat_distance_m` under the
/// configured error model.
pub fn run_power_sweep(cfg: &ExperimentConfig, workers: usize) -> Result<SweepResult> {
    run_sweep(cfg, SweepKind::Power, workers)
}

/// Runs a sweep on `workers` threads (`0` picks the rayon default). The
/// result is bit-identical for any worker count.
pub fn run_sweep(cfg: &ExperimentConfig, kind: SweepKind, workers: usize) -> Result<SweepResult> {
    cfg.validate()?;
    let (grid, err) = match kind {
        SweepKind::Distance => (cfg.distance_grid_m.clone(), AngleErrorModel::None),
        SweepKind::Power => (cfg.power_grid_dbw.clone(), cfg.error_model()?),
    };
    let scenarios: Vec<Scenario> = match kind {
        SweepKind::Distance => grid
            .iter()
            .enumerate()
            .map(|(g, &d)| Scenario::new(cfg, d).map_err(|e| e.at_grid_point(g)))
            .collect::<Result<_>>()?,
        SweepKind::Power => vec![Scenario::new(cfg, cfg.inter_sat_distance_m)?],
    };
    let schemes = cfg.schemes.clone();
    let solver = cfg.solver();
    let trials = cfg.trials;

    let tasks: Vec<(usize, usize)> = (0..grid.len()).flat_map(|g| (0..trials).map(move |t| (g, t))).collect();
    let eval = |&(g, t): &(usize, usize)| -> Result<Vec<f64>> {
        let (sc, power) = match kind {
            SweepKind::Distance => (&scenarios[g], dbw_to_watts(cfg.tx_power_dbw)),
            SweepKind::Power => (&scenarios[0], dbw_to_watts(grid[g])),
        };
        let mut rng = trial_rng(cfg.seed, t as u64, g as u64);
        run_trial(sc, &err, power, &schemes, solver, &mut rng).map_err(|e| e.at_grid_point(g))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<f64>>> = pool.install(|| tasks.par_iter().map(eval).collect());

    let mut per_grid: Vec<Vec<Vec<f64>>> = vec![vec![Vec::with_capacity(trials); schemes.len()]; grid.len()];
    for (&(g, _), r) in tasks.iter().zip(results) {
        for (s, v) in r?.into_iter().enumerate() {
            per_grid[g][s].push(v);
        }
    }
    let stats = per_grid
        .iter()
        .map(|row| row.iter().map(|xs| Summary::from_samples(xs)).collect())
        .collect();
    Ok(SweepResult { grid, schemes, stats })
}

/// Per-satellite breakdown of one precoder.
#[derive(Debug, Clone)]
pub struct DemoStream {
    pub column_power: f64,
    pub mean_slnr: f64,
    pub sinr: f64,
}

#[derive(Debug, Clone)]
pub struct DemoScheme {
    pub scheme: Scheme,
    pub streams: Vec<DemoStream>,
    pub sum_rate: f64,
}

/// One trial of every configured precoder at `swarm.inter_sat_distance_m`
/// and `power.tx_power_dbw`.
#[derive(Debug, Clone)]
pub struct DemoReport {
    pub scenario: Scenario,
    pub estimated: Vec<SpaceAngles>,
    pub total_power: f64,
    pub capacity: f64,
    pub schemes: Vec<DemoScheme>,
}

pub fn precoder_demo(cfg: &ExperimentConfig) -> Result<DemoReport> {
    cfg.validate()?;
    let sc = Scenario::new(cfg, cfg.inter_sat_distance_m)?;
    let err = cfg.error_model()?;
    let power = dbw_to_watts(cfg.tx_power_dbw);
    let mut rng = trial_rng(cfg.seed, 0, 0);
    let draw = TrialDraw::sample(&sc, &err, &mut rng)?;
    let problem = slnr_problem(&sc, &draw.estimated, &err, power)?;
    let mut schemes = Vec::new();
    for &s in &cfg.schemes {
        let Some(g) = build_precoder(s, &sc, &draw, &err, power, cfg.solver())? else {
            continue;
        };
        let sinrs = sinr(&draw.channel, &g, sc.noise_power)?;
        let streams = (0..sc.num_satellites())
            .map(|l| {
                Ok(DemoStream {
                    column_power: g.column_power(l),
                    mean_slnr: mean_slnr(&g.column(l), &problem, l)?,
                    sinr: sinrs[l],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        schemes.push(DemoScheme {
            scheme: s,
            streams,
            sum_rate: sum_rate(&sinrs),
        });
    }
    Ok(DemoReport {
        capacity: capacity(&draw.channel, power, sc.noise_power)?,
        scenario: sc,
        estimated: draw.estimated,
        total_power: power,
        schemes,
    })
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "satellites:")?;
        for (l, p) in self.scenario.swarm.positions.iter().enumerate() {
            let (t, e) = (self.scenario.true_angles[l], self.estimated[l]);
            writeln!(
                f,
                "  {l}: d = {:.3} km, el = {:.4} deg, az = {:.4} deg, phi = ({:+.6}, {:+.6}), est = ({:+.6}, {:+.6}), gain var = {:.4e}",
                p.distance() / 1e3,
                p.elevation().to_degrees(),
                p.azimuth().to_degrees(),
                t.x,
                t.y,
                e.x,
                e.y,
                self.scenario.gain_variances[l]
            )?;
        }
        writeln!(f, "transmit power: {:.4} W, capacity: {:.6} bit/s/Hz", self.total_power, self.capacity)?;
        for s in &self.schemes {
            writeln!(f, "{}: sum rate {:.6} bit/s/Hz", s.scheme, s.sum_rate)?;
            for (l, st) in s.streams.iter().enumerate() {
                writeln!(
                    f,
                    "  stream {l}: |g|^2 = {:.6} W, mean SLNR = {:.6e}, SINR = {:.6e}",
                    st.column_power, st.mean_slnr, st.sinr
                )?;
            }
        }
        Ok(())
    }
}
