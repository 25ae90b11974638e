//! # coax-core
//!
//! Flight-control workbench for a micro coaxial-rotor UAV:
//!
//! - [`dynamics`]: rigid-body 6-DOF plant (kinematics, rotor forces and
//!   moments, RK4 integration)
//! - [`control`]: cascaded four-loop controller in NDI and INDI variants,
//!   including the incremental-gain update and the active-delay baseline
//! - [`estimation`]: noise-robust central differentiators and explicit
//!   delay modeling for the angular-acceleration feedback path
//! - [`zdomain`]: discrete-time stability analysis of the delayed-derivative
//!   incremental loop (transfer functions, root loci, gain/phase margins,
//!   Nyquist curves)
//! - [`simkit`]: deterministic closed-loop simulation engine, tracking
//!   metrics, and parameter sweeps
//!
//! ## Conventions
//!
//! Ground and body frames are both z-down (aerospace convention): gravity is
//! `+g` along ground z, hover thrust is negative along body z, and altitude
//! is `-z`. Attitude is Euler roll/pitch/yaw with the usual `|pitch| < pi/2`
//! singularity, which is guarded rather than worked around.

pub mod control;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod simkit;
pub mod zdomain;

pub use error::CoaxError;

/// 3D vector of f64.
pub type Vec3 = nalgebra::Vector3<f64>;

/// 3x3 matrix of f64.
pub type Mat3 = nalgebra::Matrix3<f64>;
