//! Robust SLNR precoding for the uplink from a multi-antenna ground terminal
//! to a swarm of single-antenna LEO satellites under positional uncertainty.
//!
//! Module map:
//!
//! - [`geometry`]: swarm placement and space angles
//! - [`channel`]: URA steering vectors, link budget and channel draws
//! - [`stats`]: angle-error distributions, characteristic functions and
//!   steering-vector autocorrelation
//! - [`precoding`]: robust, perfect-CSI and heuristic precoders
//! - [`rates`]: water-filling capacity, SINR and sum rate
//! - [`experiments`]: seeded Monte Carlo sweeps and their configuration
//! - [`linalg`]: dense complex kernels shared by the above

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod precoding;
pub mod rates;
pub mod stats;

pub use channel::{ChannelVector, LinkBudget, SteeringVector, UraConfig};
pub use error::{Error, Result};
pub use geometry::{SatellitePosition, SpaceAngles, SwarmGeometry, SwarmPlacement};
pub use linalg::{CMatrix, CVector, HermitianMatrix};
pub use precoding::{Precoder, SlnrProblem, Solver};
pub use rates::{PowerAllocation, RateReport};
pub use stats::{AngleErrorModel, CorrelationMatrix};
