//! Experiment configuration and its `key = value` text format.
//!
//! ```text
//! # comment
//! [array]
//! nx = 32
//! [swarm]
//! distance_grid_m = logspace(1e3, 200e3, 25)
//! ```
//!
//! Every key belongs to a section; unknown sections or keys, duplicate keys
//! and keys outside a section are errors. See [`KEYS`] for the full list.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::channel::{LinkBudget, UraConfig};
use crate::error::{Error, Result};
use crate::geometry::{SwarmPlacement, EARTH_RADIUS_M};
use crate::precoding::{Solver, DEFAULT_TRUNCATION};
use crate::stats::AngleErrorModel;

/// Number of satellites in the triangle formation.
pub const NUM_SATELLITES: usize = 3;

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("array.nx", "antennas along x"),
    ("array.ny", "antennas along y"),
    ("array.spacing_m", "antenna spacing D_A in meters"),
    ("array.carrier_hz", "carrier frequency in Hz"),
    ("link.tx_gain_total_dbi", "transmit array gain in dBi, shared equally over the N_T elements"),
    ("link.rx_gain_total_dbi", "receive gain in dBi, shared equally over the satellites"),
    ("link.noise_dbw", "receiver noise power in dBW"),
    ("swarm.altitude_m", "orbit altitude in meters"),
    ("swarm.centroid_elevation_deg", "elevation of the swarm centroid in degrees"),
    ("swarm.centroid_azimuth_deg", "azimuth of the swarm centroid in degrees"),
    ("swarm.min_elevation_deg", "lowest admissible centroid elevation in degrees"),
    ("swarm.earth_radius_m", "spherical Earth radius in meters"),
    ("swarm.inter_sat_distance_m", "inter-satellite distance D_S for the power sweep, meters"),
    ("swarm.distance_grid_m", "D_S grid for the distance sweep, meters (list or logspace(a, b, n))"),
    ("power.tx_power_dbw", "transmit power for the distance sweep, dBW"),
    ("power.power_grid_dbw", "transmit power grid for the power sweep, dBW (list or linspace(a, b, n))"),
    ("error.model", "space-angle error distribution: none | uniform | gaussian"),
    ("error.xi_max", "uniform error half-width"),
    ("error.sigma", "gaussian error std-dev; defaults to xi_max/sqrt(3)"),
    ("run.schemes", "comma-separated subset of robust, heuristic, perfect, capacity"),
    ("run.trials", "Monte Carlo trials per grid point"),
    ("run.seed", "master seed"),
    ("run.truncation", "relative eigenvalue cut-off of the structured robust solver"),
];

/// Rate curves a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Robust,
    Heuristic,
    Perfect,
    Capacity,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Robust, Scheme::Heuristic, Scheme::Perfect, Scheme::Capacity];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Robust => "robust",
            Scheme::Heuristic => "heuristic",
            Scheme::Perfect => "perfect",
            Scheme::Capacity => "capacity",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// Which error distribution the configuration selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    None,
    Uniform,
    Gaussian,
}

/// All parameters of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nx: usize,
    pub ny: usize,
    pub spacing_m: f64,
    pub carrier_hz: f64,
    pub tx_gain_total_dbi: f64,
    pub rx_gain_total_dbi: f64,
    pub noise_dbw: f64,
    pub altitude_m: f64,
    pub centroid_elevation_deg: f64,
    pub centroid_azimuth_deg: f64,
    pub min_elevation_deg: f64,
    pub earth_radius_m: f64,
    pub inter_sat_distance_m: f64,
    pub distance_grid_m: Vec<f64>,
    pub tx_power_dbw: f64,
    pub power_grid_dbw: Vec<f64>,
    pub error_kind: ErrorKind,
    pub xi_max: f64,
    pub sigma: Option<f64>,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
    pub seed: u64,
    pub truncation: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nx: 32,
            ny: 32,
            spacing_m: 0.025,
            carrier_hz: 30e9,
            tx_gain_total_dbi: 43.2,
            rx_gain_total_dbi: 30.5,
            noise_dbw: -120.0,
            altitude_m: 600e3,
            centroid_elevation_deg: 90.0,
            centroid_azimuth_deg: 0.0,
            min_elevation_deg: 30.0,
            earth_radius_m: EARTH_RADIUS_M,
            inter_sat_distance_m: 40e3,
            distance_grid_m: logspace(1e3, 200e3, 25),
            tx_power_dbw: 5.0,
            power_grid_dbw: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0],
            error_kind: ErrorKind::Uniform,
            xi_max: 0.01,
            sigma: None,
            schemes: Scheme::ALL.to_vec(),
            trials: 500,
            seed: 1,
            truncation: DEFAULT_TRUNCATION,
        }
    }
}

/// `n` points from `a` to `b`, geometrically spaced.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                a
            } else if i == n - 1 {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// `n` points from `a` to `b`, evenly spaced.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{v}` is not a non-negative integer")))
}

fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    let v = v.trim();
    for (name, f) in [("logspace", logspace as fn(f64, f64, usize) -> Vec<f64>), ("linspace", linspace)] {
        if let Some(rest) = v.strip_prefix(name) {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Config(format!("{key}: expected {name}(a, b, n)")))?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!("{key}: expected {name}(a, b, n)")));
            }
            let a = parse_f64(key, parts[0])?;
            let b = parse_f64(key, parts[1])?;
            let n: usize = parse_int(key, parts[2])?;
            if n == 0 || (name == "logspace" && !(a > 0.0 && b > 0.0)) {
                return Err(Error::Config(format!("{key}: invalid {name} arguments")));
            }
            return Ok(f(a, b, n));
        }
    }
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

fn format_grid(g: &[f64]) -> String {
    g.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Parses configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section: Option<String> = None;
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| at("unterminated section header".into()))?
                    .trim();
                if !KEYS.iter().any(|(k, _)| k.split('.').next() == Some(name)) {
                    return Err(at(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| at("key outside of any section".into()))?;
            let full = format!("{sec}.{}", key.trim());
            if !seen.insert(full.clone()) {
                return Err(at(format!("duplicate key `{full}`")));
            }
            cfg.set(&full, value.trim()).map_err(|e| match e {
                Error::Config(m) => at(m),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Assigns one `section.key`.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "array.nx" => self.nx = parse_int(key, v)?,
            "array.ny" => self.ny = parse_int(key, v)?,
            "array.spacing_m" => self.spacing_m = parse_f64(key, v)?,
            "array.carrier_hz" => self.carrier_hz = parse_f64(key, v)?,
            "link.tx_gain_total_dbi" => self.tx_gain_total_dbi = parse_f64(key, v)?,
            "link.rx_gain_total_dbi" => self.rx_gain_total_dbi = parse_f64(key, v)?,
            "link.noise_dbw" => self.noise_dbw = parse_f64(key, v)?,
            "swarm.altitude_m" => self.altitude_m = parse_f64(key, v)?,
            "swarm.centroid_elevation_deg" => self.centroid_elevation_deg = parse_f64(key, v)?,
            "swarm.centroid_azimuth_deg" => self.centroid_azimuth_deg = parse_f64(key, v)?,
            "swarm.min_elevation_deg" => self.min_elevation_deg = parse_f64(key, v)?,
            "swarm.earth_radius_m" => self.earth_radius_m = parse_f64(key, v)?,
            "swarm.inter_sat_distance_m" => self.inter_sat_distance_m = parse_f64(key, v)?,
            "swarm.distance_grid_m" => self.distance_grid_m = parse_grid(key, v)?,
            "power.tx_power_dbw" => self.tx_power_dbw = parse_f64(key, v)?,
            "power.power_grid_dbw" => self.power_grid_dbw = parse_grid(key, v)?,
            "error.model" => {
                self.error_kind = match v.trim() {
                    "none" => ErrorKind::None,
                    "uniform" => ErrorKind::Uniform,
                    "gaussian" => ErrorKind::Gaussian,
                    other => return Err(Error::Config(format!("{key}: unknown model `{other}`"))),
                }
            }
            "error.xi_max" => self.xi_max = parse_f64(key, v)?,
            "error.sigma" => self.sigma = Some(parse_f64(key, v)?),
            "run.schemes" => {
                let mut s = v
                    .split(',')
                    .map(|x| x.trim().parse::<Scheme>())
                    .collect::<Result<Vec<_>>>()?;
                s.sort();
                s.dedup();
                self.schemes = s;
            }
            "run.trials" => self.trials = parse_int(key, v)?,
            "run.seed" => self.seed = parse_int(key, v)?,
            "run.truncation" => self.truncation = parse_f64(key, v)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `section.key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.nx == 0 || self.ny == 0 {
            return bad("array dimensions must be >= 1");
        }
        if !(self.spacing_m > 0.0) || !(self.carrier_hz > 0.0) {
            return bad("antenna spacing and carrier must be > 0");
        }
        if !(self.altitude_m > 0.0) || !(self.earth_radius_m > 0.0) {
            return bad("altitude and Earth radius must be > 0");
        }
        if !(0.0..=90.0).contains(&self.min_elevation_deg) {
            return bad("min elevation must lie in [0, 90] degrees");
        }
        if !(self.centroid_elevation_deg >= self.min_elevation_deg && self.centroid_elevation_deg <= 90.0) {
            return bad("centroid elevation must lie in [min_elevation, 90] degrees");
        }
        if !(self.inter_sat_distance_m >= 0.0) {
            return bad("inter-satellite distance must be >= 0");
        }
        for (name, g) in [("distance grid", &self.distance_grid_m), ("power grid", &self.power_grid_dbw)] {
            if g.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
            if g.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Config(format!("{name} must be strictly increasing")));
            }
        }
        if self.distance_grid_m[0] < 0.0 {
            return bad("distance grid must be >= 0");
        }
        match self.error_kind {
            ErrorKind::None => {}
            ErrorKind::Uniform => {
                if !(self.xi_max > 0.0) {
                    return bad("error.xi_max must be > 0");
                }
            }
            ErrorKind::Gaussian => {
                if !(self.sigma.unwrap_or(self.xi_max / 3f64.sqrt()) > 0.0) {
                    return bad("gaussian error std-dev must be > 0");
                }
            }
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme required");
        }
        if self.trials == 0 {
            return bad("trials must be >= 1");
        }
        if !(0.0..1.0).contains(&self.truncation) {
            return bad("truncation must lie in [0, 1)");
        }
        Ok(())
    }

    pub fn ura(&self) -> Result<UraConfig> {
        UraConfig::new(self.nx, self.ny, self.spacing_m, self.carrier_hz)
    }

    pub fn noise_power(&self) -> f64 {
        dbw_to_watts(self.noise_dbw)
    }

    pub fn link_budget(&self) -> Result<LinkBudget> {
        LinkBudget::from_aggregate_gains(
            self.tx_gain_total_dbi,
            self.nx * self.ny,
            self.rx_gain_total_dbi,
            NUM_SATELLITES,
            self.noise_power(),
        )
    }

    pub fn placement(&self) -> SwarmPlacement {
        SwarmPlacement {
            elevation: self.centroid_elevation_deg.to_radians(),
            azimuth: self.centroid_azimuth_deg.to_radians(),
            altitude: self.altitude_m,
            min_elevation: self.min_elevation_deg.to_radians(),
            earth_radius: self.earth_radius_m,
        }
    }

    pub fn error_model(&self) -> Result<AngleErrorModel> {
        match self.error_kind {
            ErrorKind::None => Ok(AngleErrorModel::None),
            ErrorKind::Uniform => AngleErrorModel::uniform(self.xi_max),
            ErrorKind::Gaussian => match self.sigma {
                Some(s) => AngleErrorModel::gaussian(s),
                None => AngleErrorModel::gaussian_matching_uniform(self.xi_max),
            },
        }
    }

    pub fn solver(&self) -> Solver {
        Solver::Structured {
            truncation: self.truncation,
        }
    }

    pub fn has_scheme(&self, s: Scheme) -> bool {
        self.schemes.contains(&s)
    }

    /// Canonical text form; [`ExperimentConfig::parse`] reads it back to an
    /// equal configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let model = match self.error_kind {
            ErrorKind::None => "none",
            ErrorKind::Uniform => "uniform",
            ErrorKind::Gaussian => "gaussian",
        };
        let schemes = self.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "[array]\nnx = {}\nny = {}\nspacing_m = {}\ncarrier_hz = {}\n", self.nx, self.ny, self.spacing_m, self.carrier_hz);
        let _ = writeln!(
            out,
            "[link]\ntx_gain_total_dbi = {}\nrx_gain_total_dbi = {}\nnoise_dbw = {}\n",
            self.tx_gain_total_dbi, self.rx_gain_total_dbi, self.noise_dbw
        );
        let _ = writeln!(
            out,
            "[swarm]\naltitude_m = {}\ncentroid_elevation_deg = {}\ncentroid_azimuth_deg = {}\nmin_elevation_deg = {}\nearth_radius_m = {}\ninter_sat_distance_m = {}\ndistance_grid_m = {}\n",
            self.altitude_m,
            self.centroid_elevation_deg,
            self.centroid_azimuth_deg,
            self.min_elevation_deg,
            self.earth_radius_m,
            self.inter_sat_distance_m,
            format_grid(&self.distance_grid_m)
        );
        let _ = writeln!(out, "[power]\ntx_power_dbw = {}\npower_grid_dbw = {}\n", self.tx_power_dbw, format_grid(&self.power_grid_dbw));
        let _ = writeln!(out, "[error]\nmodel = {model}\nxi_max = {}", self.xi_max);
        if let Some(s) = self.sigma {
            let _ = writeln!(out, "sigma = {s}");
        }
        let _ = writeln!(
            out,
            "\n[run]\nschemes = {schemes}\ntrials = {}\nseed = {}\ntruncation = {}",
            self.trials, self.seed, self.truncation
        );
        out
    }
}

pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.distance_grid_m.len(), 25);
        assert_eq!(c.distance_grid_m[0], 1e3);
        assert_eq!(c.distance_grid_m[24], 200e3);
    }

    #[test]
    fn every_key_is_settable() {
        for (k, _) in KEYS {
            let v = match *k {
                "error.model" => "gaussian",
                "run.schemes" => "robust",
                "swarm.distance_grid_m" | "power.power_grid_dbw" => "1, 2",
                "run.truncation" => "0.5",
                _ => "3",
            };
            ExperimentConfig::default().set(k, v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn parses_sections_and_grids() {
        let c = ExperimentConfig::parse(
            "# test\n[array]\nnx = 4\nny = 2 # trailing\n\n[swarm]\ndistance_grid_m = logspace(10, 1000, 3)\n[power]\npower_grid_dbw = linspace(0, 10, 3)\n[run]\nschemes = capacity, robust\n",
        )
        .unwrap();
        assert_eq!((c.nx, c.ny), (4, 2));
        assert_eq!(c.distance_grid_m.len(), 3);
        assert!((c.distance_grid_m[1] - 100.0).abs() < 1e-9);
        assert_eq!(c.power_grid_dbw, vec![0.0, 5.0, 10.0]);
        assert_eq!(c.schemes, vec![Scheme::Robust, Scheme::Capacity]);
    }

    #[test]
    fn rejects_unknown_and_misplaced_keys() {
        assert!(ExperimentConfig::parse("[array]\nnz = 3\n").is_err());
        assert!(ExperimentConfig::parse("[antenna]\nnx = 3\n").is_err());
        assert!(ExperimentConfig::parse("nx = 3\n").is_err());
        assert!(ExperimentConfig::parse("[array]\nnx = 3\nnx = 4\n").is_err());
        assert!(ExperimentConfig::parse("[array]\nnx 3\n").is_err());
        assert!(ExperimentConfig::parse("[run]\nschemes = robust, magic\n").is_err());
        assert!(ExperimentConfig::parse("[error]\nmodel = laplace\n").is_err());
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(ExperimentConfig::parse("[run]\ntrials = 0\n").is_err());
        assert!(ExperimentConfig::parse("[power]\npower_grid_dbw = 5, 0\n").is_err());
        assert!(ExperimentConfig::parse("[power]\npower_grid_dbw = 5, 5\n").is_err());
        assert!(ExperimentConfig::parse("[swarm]\ncentroid_elevation_deg = 10\n").is_err());
        assert!(ExperimentConfig::parse("[array]\nnx = -1\n").is_err());
        assert!(ExperimentConfig::parse("[array]\nspacing_m = nan\n").is_err());
        let err = ExperimentConfig::parse("[array]\n\nnx = x\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn overrides_apply() {
        let mut c = ExperimentConfig::default();
        c.apply_override("run.seed=99").unwrap();
        assert_eq!(c.seed, 99);
        assert!(c.apply_override("run.seed").is_err());
        assert!(c.apply_override("run.color=blue").is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut c = ExperimentConfig::default();
        c.error_kind = ErrorKind::Gaussian;
        c.sigma = Some(0.004);
        c.schemes = vec![Scheme::Heuristic, Scheme::Capacity];
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn gaussian_defaults_to_matched_variance() {
        let mut c = ExperimentConfig::default();
        c.error_kind = ErrorKind::Gaussian;
        match c.error_model().unwrap() {
            AngleErrorModel::Gaussian { std_dev } => assert!((std_dev - 0.01 / 3f64.sqrt()).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }
}
