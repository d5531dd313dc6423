//! Online multiple hypothesis testing with provable false discovery control.
//!
//! The crate is organised bottom-up:
//!
//! - [`boost`]: boost sequences for SupLORD, LORD and alpha-spending, the
//!   coefficient `C_a(1/δ)`, the constant `c_a`, the canonical offset `a`
//!   and the guarantee calculator.
//! - [`schedule`]: spending sequences and the steady, aggressive and dynamic
//!   alpha schedules.
//! - [`engine`]: the generalized alpha-investing state machine.
//! - [`metrics`]: FDP/FDR/FDX/supFD/power/mFDR and the time-uniform FDP band.
//! - [`simgen`]: seeded synthetic p-value streams.
//! - [`harness`]: experiment grids, CSV ingestion and result files.
//!
//! ```
//! use online_fdx::boost::{suplord_default_boosts, SupLordParams};
//! use online_fdx::engine::{run_stream, Policy};
//! use online_fdx::schedule::ScheduleConfig;
//!
//! let params = SupLordParams::new(0.15, 0.05, 30, 1.0).unwrap();
//! let boosts = suplord_default_boosts(&params).unwrap();
//! let p_values = [0.001, 0.4, 0.0002, 0.9];
//! let schedule = ScheduleConfig::steady(p_values.len()).unwrap();
//! let traj = run_stream(Policy::SupLord(params), &boosts, &schedule, &p_values).unwrap();
//! assert_eq!(traj.len(), 4);
//! ```

pub mod boost;
pub mod engine;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod schedule;
pub mod simgen;
pub mod tolerance;

pub use error::{Error, Result};
