//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the plant, controllers, estimators, and analyzers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoaxError {
    /// Euler kinematics are singular: |pitch| reached pi/2 within guard.
    #[error("singular attitude: |pitch| = {pitch_abs} rad is within {guard} of pi/2")]
    SingularAttitude { pitch_abs: f64, guard: f64 },

    /// A simulated state component exceeded the divergence bound.
    #[error("state diverged: |{component}| = {value} exceeds {bound}")]
    Diverged {
        component: &'static str,
        value: f64,
        bound: f64,
    },

    /// Translational inversion left the arcsine/square-root domain.
    #[error("infeasible translational command: |sigma_xy| = {sigma_norm} vs g = {gravity}")]
    CommandInfeasible { sigma_norm: f64, gravity: f64 },

    /// The effectiveness matrix of the incremental translational loop is
    /// singular at the current attitude.
    #[error("singular control effectiveness: det g1 = {det}")]
    SingularEffectiveness { det: f64 },

    /// Differentiator window length must be odd and at least 3.
    #[error("invalid differentiator length {n}: must be odd and >= 3")]
    InvalidWindow { n: usize },

    /// A buffered read was attempted before the buffer held a full window.
    #[error("buffer fill pending: have {have} of {need} samples")]
    FillPending { have: usize, need: usize },

    /// A requested delay is not an integer multiple of the sampling period.
    #[error("delay {delay} s is not an integer multiple of period {period} s")]
    NonIntegerDelay { delay: f64, period: f64 },

    /// Structural and expanded transfer-function assemblies disagree.
    #[error("transfer-function assembly mismatch: relative error {rel_err}")]
    AssemblyMismatch { rel_err: f64 },

    /// Polynomial root refinement failed to reach the residual tolerance.
    #[error("root solver residual {residual} above tolerance {tol}")]
    RootConvergence { residual: f64, tol: f64 },

    /// Two consecutive mission waypoints coincide.
    #[error("degenerate mission leg: waypoints {index} and {} coincide", index + 1)]
    DegenerateLeg { index: usize },

    /// Invalid scalar parameter (value out of documented domain).
    #[error("invalid parameter {name}: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The Nyquist contour indentation could not avoid a unit-circle pole.
    #[error("contour indentation failed: pole within {distance} of a grid node")]
    IndentationFailure { distance: f64 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoaxError>;
