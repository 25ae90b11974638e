//! Rigid-body 6-DOF plant of the coaxial-rotor UAV.
//!
//! State layout follows the four-vector form of the equations of motion:
//! ground-frame position, body-frame velocity, Euler attitude
//! (roll, pitch, yaw), and body rates. Both frames are z-down, so gravity is
//! `+g` along ground z and rotor thrust is negative along body z. Euler
//! kinematics are singular at |pitch| = pi/2; the plant aborts with a
//! flagged error well before reaching it instead of switching
//! parameterization, since every operating regime of interest stays near
//! hover.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{CoaxError, Result};
use crate::{Mat3, Vec3};

/// Pitch guard: |pitch| >= pi/2 - GUARD is treated as singular.
pub const ATTITUDE_GUARD: f64 = 1e-6;

/// Any state component beyond this magnitude flags divergence.
pub const DIVERGENCE_BOUND: f64 = 1e6;

/// Vehicle state: ground-frame position (m), body-frame velocity (m/s),
/// Euler attitude (rad), body angular rates (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub attitude: Vec3,
    pub rates: Vec3,
}

impl VehicleState {
    pub fn at_rest() -> Self {
        Self {
            position: Vec3::zeros(),
            velocity: Vec3::zeros(),
            attitude: Vec3::zeros(),
            rates: Vec3::zeros(),
        }
    }

    pub fn roll(&self) -> f64 {
        self.attitude.x
    }

    pub fn pitch(&self) -> f64 {
        self.attitude.y
    }

    pub fn yaw(&self) -> f64 {
        self.attitude.z
    }

    fn add_scaled(&self, d: &StateDerivative, s: f64) -> Self {
        Self {
            position: self.position + d.position * s,
            velocity: self.velocity + d.velocity * s,
            attitude: self.attitude + d.attitude * s,
            rates: self.rates + d.rates * s,
        }
    }

    /// Checks every component against the divergence bound.
    fn check_bounded(&self) -> Result<()> {
        let checks = [
            ("position", &self.position),
            ("velocity", &self.velocity),
            ("attitude", &self.attitude),
            ("rates", &self.rates),
        ];
        for (name, v) in checks {
            let m = v.amax();
            if !m.is_finite() || m > DIVERGENCE_BOUND {
                return Err(CoaxError::Diverged {
                    component: name,
                    value: m,
                    bound: DIVERGENCE_BOUND,
                });
            }
        }
        Ok(())
    }
}

/// Time derivative of `VehicleState`, same layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub position: Vec3,
    /// Body-frame acceleration; what an ideal accelerometer chain reports.
    pub velocity: Vec3,
    pub attitude: Vec3,
    /// Body angular acceleration.
    pub rates: Vec3,
}

/// Physical parameters of the vehicle and its actuator envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Mass, kg.
    pub mass: f64,
    /// Inertia matrix, kg m^2. Symmetric positive-definite.
    pub inertia: Mat3,
    /// Upper-rotor lift coefficient, N s^2/rad^2.
    pub lift_upper: f64,
    /// Lower-rotor lift coefficient at zero tilt, N s^2/rad^2. The
    /// effective value scales with cos(tilt_x)*cos(tilt_y).
    pub lift_lower_base: f64,
    /// Coaxial thrust-loss coefficient, in (0, 1].
    pub thrust_loss: f64,
    /// Roll control-moment coefficient, N m/rad.
    pub roll_moment_coeff: f64,
    /// Pitch control-moment coefficient, N m/rad.
    pub pitch_moment_coeff: f64,
    /// Upper-rotor yaw-moment coefficient, N m s^2/rad^2.
    pub yaw_moment_upper: f64,
    /// Lower-rotor yaw-moment coefficient, N m s^2/rad^2.
    pub yaw_moment_lower: f64,
    /// Gravitational acceleration, m/s^2.
    pub gravity: f64,
    /// Swashplate tilt saturation, rad (symmetric).
    pub tilt_limit: f64,
    /// Rotor speed saturation, rad/s.
    pub rotor_speed_limit: f64,
}

impl Default for VehicleParams {
    /// Plausible micro-coaxial vehicle. Overridable through configuration;
    /// closed-loop checks in this workspace are property-based rather than
    /// tied to these numbers.
    fn default() -> Self {
        Self {
            mass: 0.50,
            inertia: Matrix3::from_diagonal(&Vector3::new(2.5e-3, 2.5e-3, 1.5e-3)),
            lift_upper: 2.0e-6,
            lift_lower_base: 2.0e-6,
            thrust_loss: 0.85,
            roll_moment_coeff: 1.2,
            pitch_moment_coeff: 1.2,
            yaw_moment_upper: 4.0e-8,
            yaw_moment_lower: 4.0e-8,
            gravity: 9.81,
            tilt_limit: 0.15,
            rotor_speed_limit: 2500.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("mass", self.mass),
            ("lift_upper", self.lift_upper),
            ("lift_lower_base", self.lift_lower_base),
            ("yaw_moment_upper", self.yaw_moment_upper),
            ("yaw_moment_lower", self.yaw_moment_lower),
            ("gravity", self.gravity),
            ("tilt_limit", self.tilt_limit),
            ("rotor_speed_limit", self.rotor_speed_limit),
        ];
        for (name, v) in positives {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CoaxError::InvalidParameter {
                    name,
                    value: v,
                    requirement: "> 0",
                });
            }
        }
        if !(self.thrust_loss > 0.0 && self.thrust_loss <= 1.0) {
            return Err(CoaxError::InvalidParameter {
                name: "thrust_loss",
                value: self.thrust_loss,
                requirement: "in (0, 1]",
            });
        }
        let sym_err = (self.inertia - self.inertia.transpose()).amax();
        if sym_err > 1e-12 * self.inertia.amax() {
            return Err(CoaxError::InvalidParameter {
                name: "inertia",
                value: sym_err,
                requirement: "symmetric",
            });
        }
        if nalgebra::Cholesky::new(self.inertia).is_none() {
            return Err(CoaxError::InvalidParameter {
                name: "inertia",
                value: self.inertia.determinant(),
                requirement: "positive-definite",
            });
        }
        Ok(())
    }

    /// Rotor speed at which two equal-speed, zero-tilt rotors carry the
    /// weight: thrust_loss * (l1 + l20) * w^2 = m g.
    pub fn hover_rotor_speed(&self) -> f64 {
        (self.mass * self.gravity / (self.thrust_loss * (self.lift_upper + self.lift_lower_base)))
            .sqrt()
    }

    /// Hover trim command: equal rotor speeds, zero tilt. Yaw balances when
    /// the upper/lower yaw coefficients are equal; otherwise use the
    /// allocator for an exact trim.
    pub fn hover_command(&self) -> ActuatorCommand {
        let w = self.hover_rotor_speed();
        ActuatorCommand {
            rotor_speed_upper: w,
            rotor_speed_lower: w,
            tilt_x: 0.0,
            tilt_y: 0.0,
        }
    }
}

/// Actuator command: rotor speeds (rad/s, >= 0) and lower-rotor swashplate
/// tilt angles (rad, clockwise positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorCommand {
    pub rotor_speed_upper: f64,
    pub rotor_speed_lower: f64,
    pub tilt_x: f64,
    pub tilt_y: f64,
}

impl ActuatorCommand {
    pub fn zero() -> Self {
        Self {
            rotor_speed_upper: 0.0,
            rotor_speed_lower: 0.0,
            tilt_x: 0.0,
            tilt_y: 0.0,
        }
    }

    /// Clamps to the actuator envelope; the flag reports whether any
    /// component was saturated.
    pub fn clamp_to(&self, params: &VehicleParams) -> (Self, bool) {
        let clamped = Self {
            rotor_speed_upper: self.rotor_speed_upper.clamp(0.0, params.rotor_speed_limit),
            rotor_speed_lower: self.rotor_speed_lower.clamp(0.0, params.rotor_speed_limit),
            tilt_x: self.tilt_x.clamp(-params.tilt_limit, params.tilt_limit),
            tilt_y: self.tilt_y.clamp(-params.tilt_limit, params.tilt_limit),
        };
        let saturated = clamped != *self;
        (clamped, saturated)
    }
}

/// Wind and external disturbances. The fuselage aerodynamic force is a
/// linear drag on airspeed; the aerodynamic moment is zero by default. Both
/// enter the controllers only as unmodeled uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Wind velocity, ground frame, m/s.
    pub wind_ground: Vec3,
    /// External disturbance force, body frame, N.
    pub force_disturbance: Vec3,
    /// External disturbance moment, body frame, N m.
    pub moment_disturbance: Vec3,
    /// Linear drag coefficient on airspeed, N s/m.
    pub drag_coeff: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            wind_ground: Vec3::zeros(),
            force_disturbance: Vec3::zeros(),
            moment_disturbance: Vec3::zeros(),
            drag_coeff: 0.05,
        }
    }
}

impl Environment {
    pub fn still_air() -> Self {
        Self {
            drag_coeff: 0.0,
            ..Self::default()
        }
    }
}

fn guard_pitch(pitch: f64) -> Result<()> {
    if !pitch.is_finite() || pitch.abs() >= std::f64::consts::FRAC_PI_2 - ATTITUDE_GUARD {
        return Err(CoaxError::SingularAttitude {
            pitch_abs: pitch.abs(),
            guard: ATTITUDE_GUARD,
        });
    }
    Ok(())
}

/// Rotation matrix from body to ground frame for Euler angles
/// (roll, pitch, yaw). Orthonormal with determinant +1.
pub fn rotation_gb(attitude: &Vec3) -> Result<Mat3> {
    guard_pitch(attitude.y)?;
    let (sph, cph) = attitude.x.sin_cos();
    let (sth, cth) = attitude.y.sin_cos();
    let (sps, cps) = attitude.z.sin_cos();
    Ok(Matrix3::new(
        cth * cps,
        sth * sph * cps - cph * sps,
        sth * cph * cps + sph * sps,
        cth * sps,
        sth * sph * sps + cph * cps,
        sth * cph * sps - sph * cps,
        -sth,
        sph * cth,
        cph * cth,
    ))
}

/// Euler-rate matrix mapping body rates to Euler-angle rates.
pub fn euler_rate_matrix(roll: f64, pitch: f64) -> Result<Mat3> {
    guard_pitch(pitch)?;
    let (sph, cph) = roll.sin_cos();
    let (sth, cth) = pitch.sin_cos();
    let tth = sth / cth;
    Ok(Matrix3::new(
        1.0,
        sph * tth,
        cph * tth,
        0.0,
        cph,
        -sph,
        0.0,
        sph / cth,
        cph / cth,
    ))
}

/// Inverse of the Euler-rate matrix (maps Euler-angle rates to body rates).
pub fn euler_rate_matrix_inv(roll: f64, pitch: f64) -> Result<Mat3> {
    guard_pitch(pitch)?;
    let (sph, cph) = roll.sin_cos();
    let (sth, cth) = pitch.sin_cos();
    Ok(Matrix3::new(
        1.0, 0.0, -sth, 0.0, cph, sph * cth, 0.0, -sph, cph * cth,
    ))
}

/// Effective lower-rotor lift coefficient under swashplate tilt: the base
/// coefficient projected by cos(tilt_x)*cos(tilt_y).
pub fn lift_lower(tilt_x: f64, tilt_y: f64, params: &VehicleParams) -> f64 {
    params.lift_lower_base * tilt_x.cos() * tilt_y.cos()
}

/// Rotor thrust in the body frame. The thrust axis is fixed along -z; the
/// x and y components are structurally zero.
pub fn rotor_thrust(cmd: &ActuatorCommand, params: &VehicleParams) -> Vec3 {
    let l2 = lift_lower(cmd.tilt_x, cmd.tilt_y, params);
    let magnitude = params.thrust_loss
        * (params.lift_upper * cmd.rotor_speed_upper.powi(2)
            + l2 * cmd.rotor_speed_lower.powi(2));
    Vec3::new(0.0, 0.0, -magnitude)
}

/// Rotor control moment in the body frame: linear swashplate maps for roll
/// and pitch, rotor speed-squared difference for yaw.
pub fn rotor_moment(cmd: &ActuatorCommand, params: &VehicleParams) -> Vec3 {
    Vec3::new(
        params.roll_moment_coeff * cmd.tilt_y,
        params.pitch_moment_coeff * cmd.tilt_x,
        params.yaw_moment_upper * cmd.rotor_speed_upper.powi(2)
            - params.yaw_moment_lower * cmd.rotor_speed_lower.powi(2),
    )
}

/// Full state derivative of the 6-DOF model.
pub fn state_derivative(
    state: &VehicleState,
    cmd: &ActuatorCommand,
    env: &Environment,
    params: &VehicleParams,
) -> Result<StateDerivative> {
    let l_gb = rotation_gb(&state.attitude)?;
    let l_bg = l_gb.transpose();

    let gravity_body = l_bg * Vec3::new(0.0, 0.0, params.mass * params.gravity);
    let airspeed = state.velocity - l_bg * env.wind_ground;
    let aero = -env.drag_coeff * airspeed;
    let force = aero + gravity_body + rotor_thrust(cmd, params) + env.force_disturbance;

    let moment = rotor_moment(cmd, params) + env.moment_disturbance;
    let inertia_inv = params
        .inertia
        .try_inverse()
        .ok_or(CoaxError::InvalidParameter {
            name: "inertia",
            value: params.inertia.determinant(),
            requirement: "invertible",
        })?;

    Ok(StateDerivative {
        position: l_gb * state.velocity,
        velocity: force / params.mass - state.rates.cross(&state.velocity),
        attitude: euler_rate_matrix(state.roll(), state.pitch())? * state.rates,
        rates: inertia_inv * (moment - state.rates.cross(&(params.inertia * state.rates))),
    })
}

/// Classic fourth-order Runge-Kutta step with the command and environment
/// held constant over dt (zero-order hold).
pub fn step_rk4(
    state: &VehicleState,
    cmd: &ActuatorCommand,
    env: &Environment,
    params: &VehicleParams,
    dt: f64,
) -> Result<VehicleState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(CoaxError::InvalidParameter {
            name: "dt",
            value: dt,
            requirement: "> 0",
        });
    }
    let k1 = state_derivative(state, cmd, env, params)?;
    let k2 = state_derivative(&state.add_scaled(&k1, dt / 2.0), cmd, env, params)?;
    let k3 = state_derivative(&state.add_scaled(&k2, dt / 2.0), cmd, env, params)?;
    let k4 = state_derivative(&state.add_scaled(&k3, dt), cmd, env, params)?;

    let next = VehicleState {
        position: state.position
            + (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position) * (dt / 6.0),
        velocity: state.velocity
            + (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity) * (dt / 6.0),
        attitude: state.attitude
            + (k1.attitude + 2.0 * k2.attitude + 2.0 * k3.attitude + k4.attitude) * (dt / 6.0),
        rates: state.rates + (k1.rates + 2.0 * k2.rates + 2.0 * k3.rates + k4.rates) * (dt / 6.0),
    };
    next.check_bounded()?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn rotation_identity_at_zero() {
        let r = rotation_gb(&Vec3::zeros()).unwrap();
        assert!((r - Matrix3::identity()).amax() < 1e-15);
    }

    #[test]
    fn rotation_pure_yaw_maps_x_to_y() {
        let r = rotation_gb(&Vec3::new(0.0, 0.0, FRAC_PI_2)).unwrap();
        let mapped = r * Vec3::x();
        assert!((mapped - Vec3::y()).amax() < 1e-15);
    }

    #[test]
    fn rotation_matches_elementary_composition() {
        // Independent construction: R_z(yaw) * R_y(pitch) * R_x(roll).
        let (phi, theta, psi): (f64, f64, f64) = (0.1, 0.2, 0.3);
        let rx = Matrix3::new(
            1.0,
            0.0,
            0.0,
            0.0,
            phi.cos(),
            -phi.sin(),
            0.0,
            phi.sin(),
            phi.cos(),
        );
        let ry = Matrix3::new(
            theta.cos(),
            0.0,
            theta.sin(),
            0.0,
            1.0,
            0.0,
            -theta.sin(),
            0.0,
            theta.cos(),
        );
        let rz = Matrix3::new(
            psi.cos(),
            -psi.sin(),
            0.0,
            psi.sin(),
            psi.cos(),
            0.0,
            0.0,
            0.0,
            1.0,
        );
        let expected = rz * ry * rx;
        let r = rotation_gb(&Vec3::new(phi, theta, psi)).unwrap();
        assert!((r - expected).amax() < 1e-12);
        assert!((r * r.transpose() - Matrix3::identity()).amax() < 1e-12);
        assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_rejects_singular_pitch() {
        assert!(rotation_gb(&Vec3::new(0.0, FRAC_PI_2, 0.0)).is_err());
        assert!(rotation_gb(&Vec3::new(0.0, -FRAC_PI_2 + 1e-9, 0.0)).is_err());
    }

    #[test]
    fn euler_rate_matrix_examples() {
        let r = euler_rate_matrix(0.0, 0.0).unwrap();
        assert!((r - Matrix3::identity()).amax() < 1e-15);

        let q = PI / 4.0;
        let r = euler_rate_matrix(q, 0.0).unwrap();
        let expected = Matrix3::new(
            1.0,
            0.0,
            0.0,
            0.0,
            q.cos(),
            -q.sin(),
            0.0,
            q.sin(),
            q.cos(),
        );
        assert!((r - expected).amax() < 1e-15);
    }

    #[test]
    fn euler_rate_matrix_matches_finite_difference() {
        // Integrate attitude kinematics with constant body rates and compare
        // R * rates against a central difference of the attitude history.
        let rates = Vec3::new(0.3, -0.2, 0.1);
        let att0 = Vec3::new(0.1, 0.2, -0.3);
        let h = 1e-5;
        let micro = |att: Vec3, dt: f64| -> Vec3 {
            let f = |a: &Vec3| euler_rate_matrix(a.x, a.y).unwrap() * rates;
            let k1 = f(&att);
            let k2 = f(&(att + k1 * (dt / 2.0)));
            let k3 = f(&(att + k2 * (dt / 2.0)));
            let k4 = f(&(att + k3 * dt));
            att + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (dt / 6.0)
        };
        let minus = micro(att0, -h);
        let plus = micro(att0, h);
        let fd = (plus - minus) / (2.0 * h);
        let analytic = euler_rate_matrix(att0.x, att0.y).unwrap() * rates;
        assert!((fd - analytic).amax() < 1e-9);
    }

    #[test]
    fn euler_rate_inverse_consistent() {
        let r = euler_rate_matrix(0.3, 0.2).unwrap();
        let rinv = euler_rate_matrix_inv(0.3, 0.2).unwrap();
        assert!((r * rinv - Matrix3::identity()).amax() < 1e-14);
    }

    #[test]
    fn thrust_examples() {
        let p = VehicleParams::default();
        assert_eq!(rotor_thrust(&ActuatorCommand::zero(), &p), Vec3::zeros());

        let hover = p.hover_command();
        let t = rotor_thrust(&hover, &p);
        assert_relative_eq!(t.z, -p.mass * p.gravity, max_relative = 1e-12);
        assert_eq!(t.x, 0.0);
        assert_eq!(t.y, 0.0);

        // Tilt reduces the lower-rotor term by exactly cos(tilt).
        let tilted = ActuatorCommand {
            tilt_x: 0.05,
            ..hover
        };
        let tt = rotor_thrust(&tilted, &p);
        let w2 = p.hover_rotor_speed().powi(2);
        let expected =
            p.mass * p.gravity - p.thrust_loss * p.lift_lower_base * (1.0 - 0.05f64.cos()) * w2;
        assert_relative_eq!(tt.z.abs(), expected, max_relative = 1e-12);
        assert!(tt.z.abs() < p.mass * p.gravity);
    }

    #[test]
    fn moment_examples() {
        let p = VehicleParams::default();
        let hover = p.hover_command();
        assert!(rotor_moment(&hover, &p).amax() < 1e-15);

        let roll_cmd = ActuatorCommand {
            tilt_y: 0.01,
            ..hover
        };
        let m = rotor_moment(&roll_cmd, &p);
        assert_relative_eq!(m.x, p.roll_moment_coeff * 0.01, max_relative = 1e-15);
        assert_eq!(m.y, 0.0);
        assert!(m.z.abs() < 1e-15);

        // 5% upper-rotor speedup produces the expected yaw moment.
        let w = p.hover_rotor_speed();
        let spun = ActuatorCommand {
            rotor_speed_upper: 1.05 * w,
            ..hover
        };
        let m = rotor_moment(&spun, &p);
        let expected = p.yaw_moment_upper * (1.05 * w).powi(2) - p.yaw_moment_lower * w * w;
        assert_relative_eq!(m.z, expected, max_relative = 1e-12);
    }

    #[test]
    fn hover_is_equilibrium() {
        let p = VehicleParams::default();
        let env = Environment::still_air();
        let d = state_derivative(&VehicleState::at_rest(), &p.hover_command(), &env, &p).unwrap();
        assert!(d.position.amax() < 1e-12);
        assert!(d.velocity.amax() < 1e-12);
        assert!(d.attitude.amax() < 1e-12);
        assert!(d.rates.amax() < 1e-12);
    }

    #[test]
    fn free_fall_accelerates_at_g() {
        let p = VehicleParams::default();
        let env = Environment::still_air();
        let d = state_derivative(&VehicleState::at_rest(), &ActuatorCommand::zero(), &env, &p)
            .unwrap();
        assert_relative_eq!(d.velocity.z, p.gravity, max_relative = 1e-14);
        assert!(d.velocity.x.abs() < 1e-15 && d.velocity.y.abs() < 1e-15);
    }

    #[test]
    fn coriolis_term_matches_hand_cross_product() {
        // Independent cross-product routine.
        let cross = |a: Vec3, b: Vec3| {
            Vec3::new(
                a.y * b.z - a.z * b.y,
                a.z * b.x - a.x * b.z,
                a.x * b.y - a.y * b.x,
            )
        };
        let p = VehicleParams::default();
        let env = Environment {
            drag_coeff: 0.0,
            ..Environment::still_air()
        };

        let v = Vec3::new(1.0, 2.0, 3.0);
        let balanced = Vec3::new(0.1, 0.2, 0.3);
        assert!(cross(balanced, v).amax() < 1e-15); // parallel vectors

        let rates = Vec3::new(0.1, 0.2, 0.4);
        let expected = cross(rates, v);
        assert_relative_eq!(expected.x, -0.2, epsilon = 1e-15);
        assert_relative_eq!(expected.y, 0.1, epsilon = 1e-15);
        assert_relative_eq!(expected.z, 0.0, epsilon = 1e-15);

        let state = VehicleState {
            velocity: v,
            rates,
            ..VehicleState::at_rest()
        };
        let with = state_derivative(&state, &ActuatorCommand::zero(), &env, &p).unwrap();
        let without = state_derivative(
            &VehicleState {
                rates: Vec3::zeros(),
                ..state
            },
            &ActuatorCommand::zero(),
            &env,
            &p,
        )
        .unwrap();
        // The velocity-derivative difference isolates -rates x velocity
        // plus the rate-free terms, which cancel in the subtraction.
        assert!((with.velocity - without.velocity + expected).amax() < 1e-14);
    }

    #[test]
    fn rk4_hover_fixed_point() {
        let p = VehicleParams::default();
        let env = Environment::still_air();
        let s = step_rk4(
            &VehicleState::at_rest(),
            &p.hover_command(),
            &env,
            &p,
            0.01,
        )
        .unwrap();
        assert!(s.position.amax() < 1e-10);
        assert!(s.velocity.amax() < 1e-10);
        assert!(s.attitude.amax() < 1e-10);
        assert!(s.rates.amax() < 1e-10);
    }

    #[test]
    fn rk4_free_fall_displacement_exact() {
        let p = VehicleParams::default();
        let env = Environment::still_air();
        let mut s = VehicleState::at_rest();
        let dt = 1e-3;
        for _ in 0..1000 {
            s = step_rk4(&s, &ActuatorCommand::zero(), &env, &p, dt).unwrap();
        }
        assert!((s.position.z - p.gravity / 2.0).abs() < 1e-6);
        assert!((s.velocity.z - p.gravity).abs() < 1e-9);
    }

    /// Spin-up state used by the convergence study.
    fn spin_up_case() -> (VehicleState, ActuatorCommand, Environment, VehicleParams) {
        let p = VehicleParams::default();
        let w = p.hover_rotor_speed();
        let cmd = ActuatorCommand {
            rotor_speed_upper: 1.1 * w,
            rotor_speed_lower: 0.95 * w,
            tilt_x: 0.02,
            tilt_y: -0.03,
        };
        let state = VehicleState {
            position: Vec3::zeros(),
            velocity: Vec3::new(1.0, -0.5, 0.3),
            attitude: Vec3::new(0.05, -0.1, 0.2),
            rates: Vec3::new(0.4, 0.3, 0.2),
        };
        (state, cmd, Environment::default(), p)
    }

    fn integrate_to(t_end: f64, dt: f64) -> VehicleState {
        let (mut s, cmd, env, p) = spin_up_case();
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            s = step_rk4(&s, &cmd, &env, &p, dt).unwrap();
        }
        s
    }

    fn state_distance(a: &VehicleState, b: &VehicleState) -> f64 {
        ((a.position - b.position).norm_squared()
            + (a.velocity - b.velocity).norm_squared()
            + (a.attitude - b.attitude).norm_squared()
            + (a.rates - b.rates).norm_squared())
        .sqrt()
    }

    #[test]
    fn rk4_observed_order_at_least_3_8() {
        let reference = integrate_to(0.2, 1e-6);
        let coarse = state_distance(&integrate_to(0.2, 2e-3), &reference);
        let fine = state_distance(&integrate_to(0.2, 1e-3), &reference);
        let order = (coarse / fine).log2();
        assert!(order >= 3.8, "observed order {order}");
    }

    #[test]
    fn ballistic_energy_conserved() {
        // Drag-free tumble: translational energy 0.5 m |v|^2 + m g h with
        // h = -z must hold to 0.1% over 10 s.
        let p = VehicleParams::default();
        let env = Environment {
            drag_coeff: 0.0,
            ..Environment::still_air()
        };
        let mut s = VehicleState {
            position: Vec3::zeros(),
            velocity: Vec3::new(2.0, 0.0, -3.0),
            attitude: Vec3::zeros(),
            rates: Vec3::new(0.3, 0.0, 0.0),
        };
        let energy = |s: &VehicleState| {
            0.5 * p.mass * s.velocity.norm_squared() + p.mass * p.gravity * (-s.position.z)
        };
        let e0 = energy(&s);
        for _ in 0..10_000 {
            s = step_rk4(&s, &ActuatorCommand::zero(), &env, &p, 1e-3).unwrap();
        }
        assert!((energy(&s) - e0).abs() / e0.abs() < 1e-3);
    }

    #[test]
    fn rk4_flags_divergence() {
        let p = VehicleParams::default();
        let env = Environment::still_air();
        let mut cur = VehicleState {
            velocity: Vec3::new(9.9e5, 0.0, 0.0),
            ..VehicleState::at_rest()
        };
        let mut diverged = false;
        for _ in 0..200 {
            match step_rk4(&cur, &ActuatorCommand::zero(), &env, &p, 0.01) {
                Ok(next) => cur = next,
                Err(CoaxError::Diverged { .. }) => {
                    diverged = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(diverged);
    }

    #[test]
    fn clamp_reports_saturation() {
        let p = VehicleParams::default();
        let cmd = ActuatorCommand {
            rotor_speed_upper: 3000.0,
            rotor_speed_lower: -5.0,
            tilt_x: 0.2,
            tilt_y: 0.1,
        };
        let (c, sat) = cmd.clamp_to(&p);
        assert!(sat);
        assert_eq!(c.rotor_speed_upper, p.rotor_speed_limit);
        assert_eq!(c.rotor_speed_lower, 0.0);
        assert_eq!(c.tilt_x, p.tilt_limit);
        assert_eq!(c.tilt_y, 0.1);
        let (_, sat2) = c.clamp_to(&p);
        assert!(!sat2);
    }
}
