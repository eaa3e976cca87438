//! Monte Carlo stochastic-geometry simulator for multi-tier wireless
//! networks.
//!
//! The crate samples Poisson, inhomogeneous Poisson, Matérn hard-core and
//! cluster deployments, evaluates fading-averaged link success given an
//! interferer pattern, and estimates how shared interferer geometry across
//! antennas, slots and receivers changes joint occurrence, mean local delay
//! and relay outage.
//!
//! ```
//! use hetcorr::experiments::{coverage_probability, ScenarioSpec};
//! use hetcorr::point_process::ProcessSpec;
//!
//! let scenario =
//!     ScenarioSpec::single_tier(ProcessSpec::HomogeneousPpp { lambda: 0.1 }, 4.0, 20.0, 500, 7).unwrap();
//! let c = coverage_probability(&scenario).unwrap();
//! assert!(c.estimate > 0.5 && c.estimate < 0.7);
//! ```

pub mod channel;
pub mod error;
pub mod experiments;
pub mod harness;
pub mod interference;
pub mod point_process;
pub mod stats;

pub use error::{Error, Result};
