//! Sliding-mode boundary control of a 1-D heat equation with a Robin end and
//! a disturbed Neumann actuator.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`). The
//! [`harness`] runs experiments in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controllers;
pub mod error;
pub mod harness;
pub mod heat_sim;
pub mod reduced_ode;
pub mod scalar;
pub mod spectral;

pub use controllers::{GainCheck, GainReport, SignMode};
pub use error::{Error, Result};
pub use heat_sim::{InitialProfile, RobinClosure, TimeScheme};
pub use scalar::Scalar;

pub type Eigenpair = spectral::Eigenpair<f64>;
pub type UniformGrid = spectral::UniformGrid<f64>;
pub type SampledFunction = spectral::SampledFunction<f64>;
pub type SimConfig = heat_sim::SimConfig<f64>;
pub type DisturbanceSpec = heat_sim::DisturbanceSpec<f64>;
pub type FieldState = heat_sim::FieldState<f64>;
pub type Trajectory = heat_sim::Trajectory<f64>;
pub type ControlLaw = controllers::ControlLaw<f64>;
pub type SmcGains = controllers::SmcGains<f64>;
pub type StGains = controllers::StGains<f64>;
pub type StState = controllers::StState<f64>;
pub type ReducedTrajectory = reduced_ode::ReducedTrajectory<f64>;

pub type Eigenpair32 = spectral::Eigenpair<f32>;
pub type SimConfig32 = heat_sim::SimConfig<f32>;
pub type Trajectory32 = heat_sim::Trajectory<f32>;
