//! Counting the elastic collisions between two blocks and a wall.
//!
//! A light block of mass `m` sits between a wall and a heavy block of mass
//! `M` moving toward it. With `alpha = m / M = 10^-2n` the total number of
//! collisions is the first `n + 1` digits of pi.
//!
//! The crate computes that number two independent ways:
//!
//! * [`engine::run`] plays the collisions out, either in exact rational
//!   arithmetic ([`backend::ExactBackend`]) or in `f64`
//!   ([`backend::FloatBackend`]);
//! * [`analytic::predict_count`] reads it off the rotation angle
//!   `theta = 2 arctan(sqrt(alpha))` without simulating anything.
//!
//! ```
//! use galperin_core::{count_collisions, predict_count, BackendChoice, MassRatio};
//!
//! let alpha: MassRatio = "1e-4".parse().unwrap();
//! assert_eq!(count_collisions(alpha, BackendChoice::Exact).unwrap(), 314);
//! assert_eq!(predict_count(&alpha).unwrap().n_exact_formula, 314);
//! ```

pub mod analytic;
pub mod backend;
pub mod engine;
pub mod error;
pub mod kinematics;
pub mod ratio;

pub use analytic::{
    predict_count, rotation_angle, verify_rotation_equivalence, BoundaryFlag, CountPrediction, RotationModel,
};
pub use backend::{Backend, BackendChoice, BackendKind, DriftReport, ExactBackend, ExactLimits, FloatBackend};
pub use engine::{
    count_collisions, run, run_streaming, simulate, simulate_with, CollisionEvent, CollisionKind, Outcome, RunOptions,
    SimulationResult, TraceRow,
};
pub use error::{Error, Result};
pub use kinematics::{PhasePoint, VelocityPair};
pub use ratio::MassRatio;
