//! Fixtures shared by the criterion benches.

use vsat_precoding::experiments::{slnr_problem, trial_rng, ExperimentConfig, Scenario, TrialDraw};
use vsat_precoding::{AngleErrorModel, SlnrProblem};

/// Zenith swarm with 40 km spacing seen from an `n × n` array, uniform
/// angle error of 0.01 and 5 dBW transmit power.
pub struct Fixture {
    pub cfg: ExperimentConfig,
    pub scenario: Scenario,
    pub draw: TrialDraw,
    pub err: AngleErrorModel,
    pub problem: SlnrProblem,
    pub power: f64,
}

impl Fixture {
    pub fn new(n: usize) -> Self {
        let cfg = ExperimentConfig {
            nx: n,
            ny: n,
            inter_sat_distance_m: 40e3,
            ..Default::default()
        };
        let scenario = Scenario::new(&cfg, cfg.inter_sat_distance_m).expect("valid fixture");
        let err = cfg.error_model().expect("valid error model");
        let draw = TrialDraw::sample(&scenario, &err, &mut trial_rng(cfg.seed, 0, 0)).expect("valid draw");
        let power = 10f64.powf(cfg.tx_power_dbw / 10.0);
        let problem = slnr_problem(&scenario, &draw.estimated, &err, power).expect("valid problem");
        Self { cfg, scenario, draw, err, problem, power }
    }
}
