//! Discrete-time stability analysis of the incremental control loop with a
//! delayed state derivative.
//!
//! The loop under study is the SISO plant `xdot = f*x + g*u` under a
//! zero-order hold, closed through an incremental controller whose state
//! derivative arrives `m` sampling periods late from a central
//! differentiator. The module assembles the closed- and open-loop transfer
//! functions two independent ways (block algebra vs. expanded coefficients),
//! finds poles and zeros with two independent root solvers, and derives
//! root loci over the incremental gain, gain/phase margins, and Nyquist
//! winding counts.

mod poly;

use std::f64::consts::PI;

use num_complex::Complex;

use crate::error::{CoaxError, Result};

pub use poly::{
    roots_companion, roots_durand_kerner, sort_roots, Polynomial, RootSet, ROOT_RESIDUAL_TOL,
};

/// |f|*T below which the ZOH plant switches to its integrator limit.
const F_LIMIT: f64 = 1e-10;

/// Relative tolerance for the structural-vs-expanded assembly cross-check.
const ASSEMBLY_TOL: f64 = 1e-10;

/// A pole is inside the unit circle iff |z| < 1 - UNIT_CIRCLE_TOL.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Radius of the Nyquist contour indentation around the z = 1 pole.
const INDENT_RADIUS: f64 = 1e-6;

/// Rational function of z with a sampling period.
#[derive(Debug, Clone)]
pub struct DiscreteTransferFn {
    pub num: Polynomial,
    pub den: Polynomial,
    /// Sampling period, seconds.
    pub period: f64,
}

impl DiscreteTransferFn {
    pub fn new(num: Polynomial, den: Polynomial, period: f64) -> Result<Self> {
        if den.is_zero() {
            return Err(CoaxError::InvalidParameter {
                name: "denominator",
                value: 0.0,
                requirement: "nonzero",
            });
        }
        if !(period > 0.0) {
            return Err(CoaxError::InvalidParameter {
                name: "period",
                value: period,
                requirement: "> 0",
            });
        }
        Ok(Self { num, den, period })
    }

    /// Evaluates at a complex z.
    pub fn eval_z(&self, z: Complex<f64>) -> Complex<f64> {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Evaluates the frequency response at omega rad/s: z = e^{j omega T}.
    pub fn eval_freq(&self, omega: f64) -> Complex<f64> {
        let z = Complex::new(0.0, omega * self.period).exp();
        self.eval_z(z)
    }
}

/// Parameters of the SISO incremental loop with delayed derivative.
#[derive(Debug, Clone, Copy)]
pub struct SisoLoopParams {
    /// Plant pole f, 1/s.
    pub plant_pole: f64,
    /// Plant gain g (poles and zeros do not depend on it).
    pub plant_gain: f64,
    /// Control gain k, 1/s.
    pub control_gain: f64,
    /// Incremental gain applied to the control increment, in (0, 1].
    pub incremental_gain: f64,
    /// Derivative delay in sampling periods, >= 1.
    pub delay_steps: usize,
    /// Sampling period T, seconds.
    pub period: f64,
}

impl SisoLoopParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0) || !self.period.is_finite() {
            return Err(CoaxError::InvalidParameter {
                name: "period",
                value: self.period,
                requirement: "> 0",
            });
        }
        if self.delay_steps < 1 {
            return Err(CoaxError::InvalidParameter {
                name: "delay_steps",
                value: self.delay_steps as f64,
                requirement: ">= 1",
            });
        }
        if !(self.control_gain > 0.0) {
            return Err(CoaxError::InvalidParameter {
                name: "control_gain",
                value: self.control_gain,
                requirement: "> 0",
            });
        }
        if !(self.incremental_gain > 0.0 && self.incremental_gain <= 1.0) {
            return Err(CoaxError::InvalidParameter {
                name: "incremental_gain",
                value: self.incremental_gain,
                requirement: "in (0, 1]",
            });
        }
        if self.plant_gain == 0.0 || !self.plant_gain.is_finite() {
            return Err(CoaxError::InvalidParameter {
                name: "plant_gain",
                value: self.plant_gain,
                requirement: "finite and nonzero",
            });
        }
        if !self.plant_pole.is_finite() {
            return Err(CoaxError::InvalidParameter {
                name: "plant_pole",
                value: self.plant_pole,
                requirement: "finite",
            });
        }
        Ok(())
    }
}

/// ZOH discretization of xdot = f*x + g*u:
/// `G(z) = -g(1 - e^{fT}) / (f (z - e^{fT}))`,
/// with the integrator limit `gT/(z-1)` for |f|*T below 1e-10.
pub fn zoh_plant(plant_pole: f64, plant_gain: f64, period: f64) -> Result<DiscreteTransferFn> {
    if !(period > 0.0) {
        return Err(CoaxError::InvalidParameter {
            name: "period",
            value: period,
            requirement: "> 0",
        });
    }
    let ft = plant_pole * period;
    if ft.abs() < F_LIMIT {
        return DiscreteTransferFn::new(
            Polynomial::constant(plant_gain * period),
            Polynomial::new(vec![-1.0, 1.0]),
            period,
        );
    }
    let e = ft.exp();
    let beta = -ft.exp_m1(); // 1 - e^{fT}
    DiscreteTransferFn::new(
        Polynomial::constant(-plant_gain * beta),
        Polynomial::new(vec![-plant_pole * e, plant_pole]),
        period,
    )
}

/// One-period input delay: `A(z) = 1/z`.
pub fn delay_tf(period: f64) -> Result<DiscreteTransferFn> {
    DiscreteTransferFn::new(
        Polynomial::constant(1.0),
        Polynomial::monomial(1.0, 1),
        period,
    )
}

/// Simplified differentiator: a three-point central difference in series
/// with an (m-1)-period delay, `D(z) = (z^2 - 1) / (2T z^{m+1})`.
pub fn diff_tf(delay_steps: usize, period: f64) -> Result<DiscreteTransferFn> {
    if delay_steps < 1 {
        return Err(CoaxError::InvalidParameter {
            name: "delay_steps",
            value: delay_steps as f64,
            requirement: ">= 1",
        });
    }
    DiscreteTransferFn::new(
        Polynomial::new(vec![-1.0, 0.0, 1.0]),
        Polynomial::monomial(2.0 * period, delay_steps + 1),
        period,
    )
}

/// Expanded closed-loop denominator coefficients; `limit` selects the f -> 0
/// form (everything divided through by f).
fn expanded_closed(p: &SisoLoopParams) -> (Polynomial, Polynomial) {
    let (t, f, k, kd, m) = (
        p.period,
        p.plant_pole,
        p.control_gain,
        p.incremental_gain,
        p.delay_steps,
    );
    let ft = f * t;
    let mut den = vec![0.0; m + 3];
    if ft.abs() < F_LIMIT {
        // beta/f -> -T
        let num = Polynomial::monomial(2.0 * kd * k * t * t, m + 1);
        den[m + 2] += 2.0 * t;
        den[m + 1] -= 2.0 * t * (2.0 - kd * k * t);
        den[m] += 2.0 * t;
        den[2] += kd * t;
        den[0] -= kd * t;
        (num, Polynomial::new(den))
    } else {
        let e = ft.exp();
        let beta = -ft.exp_m1();
        let num = Polynomial::monomial(-2.0 * t * kd * k * beta, m + 1);
        den[m + 2] += 2.0 * t * f;
        den[m + 1] -= 2.0 * t * (kd * k * beta + f + f * e);
        den[m] += 2.0 * t * f * e;
        den[2] -= kd * beta;
        den[0] += kd * beta;
        (num, Polynomial::new(den))
    }
}

/// Expanded open-loop denominator; numerator is shared with the closed loop.
fn expanded_open(p: &SisoLoopParams) -> (Polynomial, Polynomial) {
    let (t, f, kd, m) = (p.period, p.plant_pole, p.incremental_gain, p.delay_steps);
    let ft = f * t;
    let mut den = vec![0.0; m + 3];
    let num = expanded_closed(p).0;
    if ft.abs() < F_LIMIT {
        den[m + 2] += 2.0 * t;
        den[m + 1] -= 4.0 * t;
        den[m] += 2.0 * t;
        den[2] += kd * t;
        den[0] -= kd * t;
    } else {
        let e = ft.exp();
        let beta = -ft.exp_m1();
        den[m + 2] += 2.0 * t * f;
        den[m + 1] -= 2.0 * t * f * (1.0 + e);
        den[m] += 2.0 * t * f * e;
        den[2] -= kd * beta;
        den[0] += kd * beta;
    }
    (num, Polynomial::new(den))
}

/// Structural assembly of numerator/denominator over the common denominator
/// of the G, A, D blocks. `include_forward` adds the `kd*k*G` term that
/// distinguishes the closed-loop denominator from the open-loop one.
fn structural(p: &SisoLoopParams, include_forward: bool) -> Result<(Polynomial, Polynomial)> {
    let g_tf = zoh_plant(p.plant_pole, p.plant_gain, p.period)?;
    let a_tf = delay_tf(p.period)?;
    let d_tf = diff_tf(p.delay_steps, p.period)?;
    let kd = p.incremental_gain;
    let k = p.control_gain;
    let g = p.plant_gain;

    let da_dd = a_tf.den.mul(&d_tf.den);
    // kd*k*Ng*Da*Dd
    let forward = g_tf.num.mul(&da_dd).scale(kd * k);
    // kd*Ng*Nd*Da
    let diff_path = g_tf.num.mul(&d_tf.num).mul(&a_tf.den).scale(kd);
    // -g*Na*Dg*Dd
    let delay_path = a_tf.num.mul(&g_tf.den).mul(&d_tf.den).scale(-g);
    // +g*Dg*Da*Dd
    let unity = g_tf.den.mul(&da_dd).scale(g);

    let mut den = diff_path.add(&delay_path).add(&unity);
    if include_forward {
        den = den.add(&forward);
    }
    Ok((forward, den))
}

/// Verifies rational-function equality of the structural assembly and the
/// expanded form by cross-multiplication.
fn check_assembly(
    structural: &(Polynomial, Polynomial),
    expanded: &(Polynomial, Polynomial),
) -> Result<()> {
    let lhs = structural.0.mul(&expanded.1);
    let rhs = expanded.0.mul(&structural.1);
    let scale = lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
    let rel_err = lhs.sub(&rhs).norm() / scale;
    if rel_err > ASSEMBLY_TOL {
        return Err(CoaxError::AssemblyMismatch { rel_err });
    }
    Ok(())
}

/// Closed-loop transfer function of the incremental loop, assembled from the
/// G/A/D blocks and cross-checked against the expanded coefficient form.
pub fn closed_loop_h(params: &SisoLoopParams) -> Result<DiscreteTransferFn> {
    params.validate()?;
    let s = structural(params, true)?;
    let e = expanded_closed(params);
    check_assembly(&s, &e)?;
    DiscreteTransferFn::new(e.0, e.1, params.period)
}

/// Open-loop transfer function of the incremental loop. Its denominator
/// always carries a z = 1 root, which is verified here.
pub fn open_loop_h_star(params: &SisoLoopParams) -> Result<DiscreteTransferFn> {
    params.validate()?;
    let s = structural(params, false)?;
    let e = expanded_open(params);
    check_assembly(&s, &e)?;
    let at_one = e.1.eval_real(1.0).abs();
    if at_one > 1e-12 * e.1.norm() {
        return Err(CoaxError::AssemblyMismatch {
            rel_err: at_one / e.1.norm(),
        });
    }
    DiscreteTransferFn::new(e.0, e.1, params.period)
}

/// Poles of a transfer function (denominator roots), residual-checked.
pub fn poles(tf: &DiscreteTransferFn) -> Result<Vec<Complex<f64>>> {
    checked_roots(&tf.den)
}

/// Zeros of a transfer function (numerator roots), residual-checked.
pub fn zeros(tf: &DiscreteTransferFn) -> Result<Vec<Complex<f64>>> {
    checked_roots(&tf.num)
}

fn checked_roots(p: &Polynomial) -> Result<Vec<Complex<f64>>> {
    let rs = roots_companion(p)?;
    if rs.max_residual > ROOT_RESIDUAL_TOL {
        return Err(CoaxError::RootConvergence {
            residual: rs.max_residual,
            tol: ROOT_RESIDUAL_TOL,
        });
    }
    Ok(rs.roots)
}

fn all_inside_unit_circle(roots: &[Complex<f64>]) -> bool {
    roots.iter().all(|z| z.norm() < 1.0 - UNIT_CIRCLE_TOL)
}

/// One grid point of the root locus: closed-loop poles reordered so that
/// index = branch id continued from the previous grid point.
#[derive(Debug, Clone)]
pub struct LocusCell {
    pub incremental_gain: f64,
    pub poles: Vec<Complex<f64>>,
    pub stable: bool,
    pub solver_error: Option<CoaxError>,
}

/// Closed-loop root locus over a grid of incremental gains. The
/// `incremental_gain` field of `base` is ignored; grid values must lie in
/// (0, 1]. Branches are matched between adjacent grid points by
/// nearest-neighbor pairing.
pub fn root_locus(base: &SisoLoopParams, kd_grid: &[f64]) -> Result<Vec<LocusCell>> {
    for &kd in kd_grid {
        if !(kd > 0.0 && kd <= 1.0) {
            return Err(CoaxError::InvalidParameter {
                name: "incremental_gain",
                value: kd,
                requirement: "in (0, 1]",
            });
        }
    }
    let mut cells = Vec::with_capacity(kd_grid.len());
    let mut prev: Option<Vec<Complex<f64>>> = None;
    for &kd in kd_grid {
        let p = SisoLoopParams {
            incremental_gain: kd,
            ..*base
        };
        let cell = match closed_loop_h(&p).and_then(|tf| poles(&tf)) {
            Ok(mut roots) => {
                if let Some(prev_roots) = &prev {
                    pair_to_previous(prev_roots, &mut roots);
                }
                let stable = all_inside_unit_circle(&roots);
                prev = Some(roots.clone());
                LocusCell {
                    incremental_gain: kd,
                    poles: roots,
                    stable,
                    solver_error: None,
                }
            }
            Err(e) => LocusCell {
                incremental_gain: kd,
                poles: Vec::new(),
                stable: false,
                solver_error: Some(e),
            },
        };
        cells.push(cell);
    }
    Ok(cells)
}

/// Reorders `next` so that next[i] is the root closest to prev[i], pairing
/// globally smallest distances first.
fn pair_to_previous(prev: &[Complex<f64>], next: &mut Vec<Complex<f64>>) {
    if prev.len() != next.len() {
        return; // degree changed; keep sorted order
    }
    let n = prev.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, q) in next.iter().enumerate() {
            pairs.push(((p - q).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = vec![Complex::new(f64::NAN, f64::NAN); n];
    let mut prev_used = vec![false; n];
    let mut next_used = vec![false; n];
    for (_, i, j) in pairs {
        if !prev_used[i] && !next_used[j] {
            prev_used[i] = true;
            next_used[j] = true;
            out[i] = next[j];
        }
    }
    *next = out;
}

/// Gain/phase margins of an open-loop transfer function, plus the
/// closed-loop (unity negative feedback) stability verdict.
#[derive(Debug, Clone)]
pub struct MarginReport {
    /// Gain margin in dB; +inf when no phase crossover exists.
    pub gain_margin_db: f64,
    /// Phase-crossover frequency, rad/s.
    pub phase_crossover_rad_s: Option<f64>,
    /// Phase margin in degrees; +inf when no gain crossover exists.
    pub phase_margin_deg: f64,
    /// Gain-crossover frequency, rad/s.
    pub gain_crossover_rad_s: Option<f64>,
    /// All closed-loop poles strictly inside the unit circle.
    pub stable: bool,
    /// Closed-loop poles backing the verdict.
    pub closed_loop_poles: Vec<Complex<f64>>,
}

/// Number of frequency-grid points used by `margins`.
const MARGIN_GRID: usize = 100_000;

/// Computes gain and phase margins of `open` on a log-spaced grid over
/// (1e-3, pi/T], refining each crossover by bisection. When several
/// crossovers exist the smallest-magnitude margin is reported.
pub fn margins(open: &DiscreteTransferFn) -> Result<MarginReport> {
    let t = open.period;
    let closed_den = open.num.add(&open.den);
    let closed_poles = checked_roots(&closed_den)?;
    let stable = all_inside_unit_circle(&closed_poles);

    let lo: f64 = 1e-3;
    let hi: f64 = PI / t;
    let n = MARGIN_GRID;
    let log_step = (hi / lo).ln() / (n - 1) as f64;
    let omegas: Vec<f64> = (0..n).map(|i| lo * (log_step * i as f64).exp()).collect();
    let resp: Vec<Complex<f64>> = omegas.iter().map(|&w| open.eval_freq(w)).collect();
    let mags: Vec<f64> = resp.iter().map(|h| h.norm()).collect();

    // Unwrapped phase in degrees.
    let mut phase = Vec::with_capacity(n);
    phase.push(resp[0].arg().to_degrees());
    for i in 1..n {
        let raw = resp[i].arg().to_degrees();
        let prev = phase[i - 1];
        phase.push(prev + wrap_deg(raw - prev));
    }

    // Gain crossovers: |H| = 1.
    let mut pm_candidates: Vec<(f64, f64)> = Vec::new(); // (PM deg, omega)
    for i in 0..n - 1 {
        let a = mags[i] - 1.0;
        let b = mags[i + 1] - 1.0;
        if a == 0.0 {
            pm_candidates.push((180.0 + phase[i], omegas[i]));
        } else if a * b < 0.0 {
            let w = bisect(omegas[i], omegas[i + 1], |w| open.eval_freq(w).norm() - 1.0);
            let ph = phase_at(open, w, lerp_phase(&omegas, &phase, i, w));
            pm_candidates.push((180.0 + ph, w));
        }
    }

    // Phase crossovers: unwrapped phase hits -180 + 360k.
    let mut gm_candidates: Vec<(f64, f64)> = Vec::new(); // (GM dB, omega)
    for i in 0..n - 1 {
        let (pa, pb) = (phase[i], phase[i + 1]);
        let (lo_p, hi_p) = if pa <= pb { (pa, pb) } else { (pb, pa) };
        let mut k = ((lo_p + 180.0) / 360.0).ceil() as i64;
        loop {
            let level = -180.0 + 360.0 * k as f64;
            if level > hi_p {
                break;
            }
            if level >= lo_p {
                let w = if pa == level {
                    omegas[i]
                } else {
                    bisect(omegas[i], omegas[i + 1], |w| {
                        phase_at(open, w, lerp_phase(&omegas, &phase, i, w)) - level
                    })
                };
                let mag = open.eval_freq(w).norm();
                gm_candidates.push((-20.0 * mag.log10(), w));
            }
            k += 1;
        }
    }

    let (gain_margin_db, phase_crossover_rad_s) = pick_smallest(&gm_candidates);
    let (phase_margin_deg, gain_crossover_rad_s) = pick_smallest(&pm_candidates);

    Ok(MarginReport {
        gain_margin_db,
        phase_crossover_rad_s,
        phase_margin_deg,
        gain_crossover_rad_s,
        stable,
        closed_loop_poles: closed_poles,
    })
}

fn pick_smallest(candidates: &[(f64, f64)]) -> (f64, Option<f64>) {
    candidates
        .iter()
        .min_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap())
        .map(|&(m, w)| (m, Some(w)))
        .unwrap_or((f64::INFINITY, None))
}

fn wrap_deg(x: f64) -> f64 {
    x - 360.0 * (x / 360.0).round()
}

/// Phase in degrees at omega, unwrapped to the 360-degree branch nearest to
/// `reference`.
fn phase_at(tf: &DiscreteTransferFn, omega: f64, reference: f64) -> f64 {
    let raw = tf.eval_freq(omega).arg().to_degrees();
    raw + 360.0 * ((reference - raw) / 360.0).round()
}

fn lerp_phase(omegas: &[f64], phase: &[f64], i: usize, w: f64) -> f64 {
    let (w0, w1) = (omegas[i], omegas[i + 1]);
    let s = if w1 > w0 { (w - w0) / (w1 - w0) } else { 0.0 };
    phase[i] + s * (phase[i + 1] - phase[i])
}

/// Relative bisection to ~1e-8 on a bracketing interval.
fn bisect(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= 1e-8 * mid.abs() {
            return mid;
        }
        let fm = f(mid);
        if (fa <= 0.0) == (fm <= 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Nyquist curve samples and the winding count about (-1, 0).
#[derive(Debug, Clone)]
pub struct NyquistCurve {
    /// (omega rad/s, response) along the unit circle, ascending omega.
    pub points: Vec<(f64, Complex<f64>)>,
    /// Net clockwise encirclements of (-1, 0), indentation arc included.
    pub clockwise_encirclements: i64,
    /// Open-loop poles strictly outside the unit circle.
    pub outside_poles: usize,
    /// Discrete Nyquist verdict: counterclockwise winding equals the number
    /// of open-loop poles strictly outside the unit circle.
    pub stable: bool,
}

/// Samples the open loop around the unit circle at the given frequencies and
/// counts encirclements of (-1, 0). The z = 1 pole is bypassed with an
/// outward indentation arc of radius 1e-6, which contributes the
/// "closure at infinity" sweep to the winding count.
pub fn nyquist_curve(open: &DiscreteTransferFn, omega_grid: &[f64]) -> Result<NyquistCurve> {
    let t = open.period;
    for &w in omega_grid {
        if !(w > 0.0 && w < 2.0 * PI / t) {
            return Err(CoaxError::InvalidParameter {
                name: "omega",
                value: w,
                requirement: "in (0, 2*pi/T)",
            });
        }
    }
    let open_poles = checked_roots(&open.den)?;
    let outside_poles = open_poles
        .iter()
        .filter(|z| z.norm() > 1.0 + UNIT_CIRCLE_TOL)
        .count();

    let mut omegas: Vec<f64> = omega_grid.to_vec();
    omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Grid nodes inside the indentation are replaced by the arc.
    let mut circle_z: Vec<(f64, Complex<f64>)> = Vec::with_capacity(omegas.len());
    for &w in &omegas {
        let z = Complex::new(0.0, w * t).exp();
        if (z - Complex::new(1.0, 0.0)).norm() > INDENT_RADIUS {
            circle_z.push((w, z));
        }
    }

    // Poles near the unit circle must stay clear of the retained nodes.
    for p in &open_poles {
        if (p.norm() - 1.0).abs() < 2.0 * INDENT_RADIUS {
            for (_, z) in &circle_z {
                let d = (p - z).norm();
                if d < INDENT_RADIUS * (1.0 - 1e-9) {
                    return Err(CoaxError::IndentationFailure { distance: d });
                }
            }
        }
    }

    let points: Vec<(f64, Complex<f64>)> = circle_z
        .iter()
        .map(|&(w, z)| (w, open.eval_z(z)))
        .collect();

    // Winding contour: circle samples plus the indentation arc from
    // alpha = -pi/2 (just below z = 1) to +pi/2 (just above), bulging
    // outward so the z = 1 pole stays with the inside region.
    const ARC_SAMPLES: usize = 20_001;
    let mut contour: Vec<Complex<f64>> = points.iter().map(|&(_, h)| h).collect();
    for i in 0..ARC_SAMPLES {
        let alpha = -PI / 2.0 + PI * i as f64 / (ARC_SAMPLES - 1) as f64;
        let z = Complex::new(1.0, 0.0) + Complex::from_polar(INDENT_RADIUS, alpha);
        contour.push(open.eval_z(z));
    }

    let mut total = 0.0;
    let minus_one = Complex::new(-1.0, 0.0);
    for i in 0..contour.len() {
        let a = contour[i] - minus_one;
        let b = contour[(i + 1) % contour.len()] - minus_one;
        total += (b / a).arg();
    }
    let ccw = (total / (2.0 * PI)).round() as i64;

    Ok(NyquistCurve {
        points,
        clockwise_encirclements: -ccw,
        outside_poles,
        stable: ccw == outside_poles as i64,
    })
}

// ---------------------------------------------------------------------------
// CSV emitters (consumed by the CLI plot-data commands)
// ---------------------------------------------------------------------------

/// Root-locus CSV: `k_delta,re,im,branch_id,stable`.
pub fn locus_csv(cells: &[LocusCell]) -> String {
    let mut out = String::from("k_delta,re,im,branch_id,stable\n");
    for cell in cells {
        for (branch, pole) in cell.poles.iter().enumerate() {
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{},{}\n",
                cell.incremental_gain,
                pole.re,
                pole.im,
                branch,
                u8::from(cell.stable)
            ));
        }
    }
    out
}

/// Bode CSV over the given grid: `omega_rad_s,mag_db,phase_deg` with the
/// phase unwrapped along the grid.
pub fn bode_csv(open: &DiscreteTransferFn, omega_grid: &[f64]) -> String {
    let mut out = String::from("omega_rad_s,mag_db,phase_deg\n");
    let mut prev_phase: Option<f64> = None;
    for &w in omega_grid {
        let h = open.eval_freq(w);
        let raw = h.arg().to_degrees();
        let ph = match prev_phase {
            Some(p) => p + wrap_deg(raw - p),
            None => raw,
        };
        prev_phase = Some(ph);
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e}\n",
            w,
            20.0 * h.norm().log10(),
            ph
        ));
    }
    out
}

/// Nyquist CSV: `omega_rad_s,re,im` plus a winding-count footer.
pub fn nyquist_csv(curve: &NyquistCurve) -> String {
    let mut out = String::from("omega_rad_s,re,im\n");
    for &(w, h) in &curve.points {
        out.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", w, h.re, h.im));
    }
    out.push_str(&format!(
        "# clockwise_encirclements,{}\n# outside_poles,{}\n# stable,{}\n",
        curve.clockwise_encirclements,
        curve.outside_poles,
        u8::from(curve.stable)
    ));
    out
}
