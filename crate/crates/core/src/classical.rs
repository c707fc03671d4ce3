//! Classical equations of motion, closed-form circular solutions and
//! fixed-step RK4 integration.
//!
//! Model content, with `eps_12 = +1` and the written Lagrangian signs:
//!
//! - Landau model (LM), second order: `m xddot_j = g eps_ij xdot_i`, i.e.
//!   `a = (g/m) eps_first(v)`. Uniform circular motion of the velocity at
//!   `omega = g/m`, counterclockwise; the orbit center
//!   `c = x + (m/g) eps_first(v)` is a constant of motion.
//! - Chiral oscillator (CO), first order: `g eps_jk xdot_k = k x_j`, solved
//!   for the velocity as `v = (k/g) eps_first(x)`. Circular motion of the
//!   position about the origin at `omega = k/g`, counterclockwise. The state
//!   is the position alone; there is no independent velocity.
//! - Restricted dipole (Rydberg), second order:
//!   `m a = -g eps_first(v) - k x` (note the flipped Chern-Simons sign
//!   relative to the LM as written). Superposition of two circular modes;
//!   as `m -> 0` with the initial velocity on the CO constraint, the motion
//!   collapses onto the CO.
//!
//! The CO is integrated as a genuine first-order two-dimensional system and
//! is never embedded in a second-order form.

use crate::duality;
use crate::csvfmt::{build_csv, fmt_f64};
use crate::error::{CoreError, Result};
use crate::params::{ModelKind, ModelParams};
use crate::planar::{eps_first, eps_second, rotate, Vec2};

/// A time-stamped phase-space sample. First-order models carry no velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub t: f64,
    pub x: Vec2,
    pub v: Option<Vec2>,
}

fn finite2(u: Vec2) -> bool {
    u.x.is_finite() && u.y.is_finite()
}

impl PhaseState {
    /// State of a second-order model (position and velocity).
    pub fn second_order(t: f64, x: Vec2, v: Vec2) -> Result<Self> {
        if !t.is_finite() || !finite2(x) || !finite2(v) {
            return Err(CoreError::InvalidState("non-finite phase-state component".into()));
        }
        Ok(PhaseState { t, x, v: Some(v) })
    }

    /// State of a first-order model (position only).
    pub fn first_order(t: f64, x: Vec2) -> Result<Self> {
        if !t.is_finite() || !finite2(x) {
            return Err(CoreError::InvalidState("non-finite phase-state component".into()));
        }
        Ok(PhaseState { t, x, v: None })
    }

    /// Velocity, or an error for position-only states.
    pub fn velocity(&self) -> Result<Vec2> {
        self.v
            .ok_or_else(|| CoreError::InvalidState("state carries no velocity".into()))
    }

    fn check_shape(&self, model: ModelKind) -> Result<()> {
        match (model.requires_velocity(), self.v.is_some()) {
            (true, false) => Err(CoreError::InvalidState(format!(
                "{} state must carry a velocity",
                model.name()
            ))),
            (false, true) => Err(CoreError::InvalidState(
                "chiral-oscillator state must be position-only".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Landau-model acceleration `a = cs (g/m) eps_first(v)`.
pub fn lm_rhs(state: &PhaseState, params: &ModelParams) -> Result<Vec2> {
    let v = state.velocity()?;
    if !finite2(state.x) || !finite2(v) {
        return Err(CoreError::InvalidState("non-finite input".into()));
    }
    Ok(eps_first(v) * (params.cs_sign * params.g / params.m))
}

/// Chiral-oscillator velocity `v = cs (k/g) eps_first(x)`, the unique
/// solution of the algebraic equation of motion `g eps_jk xdot_k = k x_j`.
pub fn co_rhs(state: &PhaseState, params: &ModelParams) -> Result<Vec2> {
    state.check_shape(ModelKind::ChiralOscillator)?;
    if !finite2(state.x) {
        return Err(CoreError::InvalidState("non-finite input".into()));
    }
    if params.g == 0.0 {
        return Err(CoreError::SingularTransform(
            "first-order equation of motion needs g != 0".into(),
        ));
    }
    Ok(eps_first(state.x) * (params.cs_sign * params.k / params.g))
}

/// Restricted-dipole acceleration `a = -cs (g/m) eps_first(v) - (k/m) x`.
///
/// With `k = 0` this is the Landau model with the opposite Chern-Simons
/// orientation; with `g = 0` it is an isotropic harmonic trap.
pub fn rydberg_rhs(state: &PhaseState, params: &ModelParams) -> Result<Vec2> {
    let v = state.velocity()?;
    if !finite2(state.x) || !finite2(v) {
        return Err(CoreError::InvalidState("non-finite input".into()));
    }
    Ok(eps_first(v) * (-params.cs_sign * params.g / params.m) - state.x * (params.k / params.m))
}

/// A uniformly sampled integrated trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: ModelKind,
    pub params: ModelParams,
    pub dt: f64,
    pub samples: Vec<PhaseState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Central-difference velocity at an interior sample index.
    pub fn fd_velocity(&self, j: usize) -> Result<Vec2> {
        if j == 0 || j + 1 >= self.samples.len() {
            return Err(CoreError::InvalidState(
                "finite-difference velocity needs an interior sample".into(),
            ));
        }
        Ok((self.samples[j + 1].x - self.samples[j - 1].x) / (2.0 * self.dt))
    }

    /// Kinetic energy `(m/2) v.v` of a velocity-carrying sample.
    pub fn kinetic_energy(&self, j: usize) -> Result<f64> {
        let v = self.samples[j].velocity()?;
        Ok(0.5 * self.params.m * v.dot(&v))
    }

    /// Largest relative drift of the kinetic energy along the run; the LM
    /// conserves it exactly.
    pub fn max_kinetic_energy_drift(&self) -> Result<f64> {
        let e0 = self.kinetic_energy(0)?;
        if e0 == 0.0 {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        for j in 0..self.samples.len() {
            worst = worst.max((self.kinetic_energy(j)? - e0).abs() / e0);
        }
        Ok(worst)
    }

    /// CSV export: `t,x1,x2[,v1,v2]`, velocity columns present exactly when
    /// the model is second order.
    pub fn to_csv(&self) -> String {
        let with_v = self.model.requires_velocity();
        let header = if with_v { "t,x1,x2,v1,v2" } else { "t,x1,x2" };
        build_csv(
            header,
            self.samples.iter().map(|s| {
                let mut row = vec![fmt_f64(s.t), fmt_f64(s.x.x), fmt_f64(s.x.y)];
                if with_v {
                    let v = s.v.expect("second-order sample");
                    row.push(fmt_f64(v.x));
                    row.push(fmt_f64(v.y));
                }
                row
            }),
        )
    }
}

fn rk4_first(f: &dyn Fn(Vec2) -> Vec2, x: Vec2, dt: f64) -> Vec2 {
    let k1 = f(x);
    let k2 = f(x + k1 * (dt * 0.5));
    let k3 = f(x + k2 * (dt * 0.5));
    let k4 = f(x + k3 * dt);
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

fn rk4_second(f: &dyn Fn(Vec2, Vec2) -> Vec2, x: Vec2, v: Vec2, dt: f64) -> (Vec2, Vec2) {
    let (k1x, k1v) = (v, f(x, v));
    let (k2x, k2v) = (v + k1v * (dt * 0.5), f(x + k1x * (dt * 0.5), v + k1v * (dt * 0.5)));
    let (k3x, k3v) = (v + k2v * (dt * 0.5), f(x + k2x * (dt * 0.5), v + k2v * (dt * 0.5)));
    let (k4x, k4v) = (v + k3v * dt, f(x + k3x * dt, v + k3v * dt));
    (
        x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0),
        v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0),
    )
}

/// Fixed-step RK4 integration of any of the four models.
///
/// The sample grid is `t_j = j dt` for `j = 0..=round(t_end/dt)`, built by
/// multiplication so the grid stays uniform to the last ulp. Fails when
/// `dt >= period/10` (the integrator would not resolve the motion) or when
/// the state leaves a generous divergence envelope.
pub fn integrate(
    model: ModelKind,
    state0: &PhaseState,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) || !(t_end.is_finite() && t_end > 0.0) {
        return Err(CoreError::InvalidParams(format!(
            "need dt > 0 and t_end > 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    state0.check_shape(model)?;
    if !finite2(state0.x) || state0.v.is_some_and(|v| !finite2(v)) {
        return Err(CoreError::InvalidState("non-finite initial state".into()));
    }
    let limit = params.period(model) / 10.0;
    if dt >= limit {
        return Err(CoreError::StepTooLarge { dt, limit });
    }

    let n_steps = (t_end / dt).round().max(1.0) as usize;
    let scale0 = state0.x.norm() + state0.v.map_or(0.0, |v| v.norm()) + 1.0;
    let blowup = 1e12 * scale0;

    let mut samples = Vec::with_capacity(n_steps + 1);
    match model {
        ModelKind::ChiralOscillator => {
            let f = |x: Vec2| eps_first(x) * (params.cs_sign * params.k / params.g);
            let mut x = state0.x;
            samples.push(PhaseState { t: 0.0, x, v: None });
            for j in 1..=n_steps {
                x = rk4_first(&f, x, dt);
                if !finite2(x) || x.norm() > blowup {
                    return Err(CoreError::Divergence { t: j as f64 * dt });
                }
                samples.push(PhaseState { t: j as f64 * dt, x, v: None });
            }
        }
        _ => {
            let f: Box<dyn Fn(Vec2, Vec2) -> Vec2> = match model {
                ModelKind::Landau => {
                    let c = params.cs_sign * params.g / params.m;
                    Box::new(move |_x, v| eps_first(v) * c)
                }
                ModelKind::Rydberg => {
                    let cg = -params.cs_sign * params.g / params.m;
                    let ck = params.k / params.m;
                    Box::new(move |x, v| eps_first(v) * cg - x * ck)
                }
                ModelKind::Master => {
                    let p = *params;
                    Box::new(move |_x, v| duality::master_acceleration(v, &p))
                }
                ModelKind::ChiralOscillator => unreachable!(),
            };
            let mut x = state0.x;
            let mut v = state0.v.expect("shape checked");
            samples.push(PhaseState { t: 0.0, x, v: Some(v) });
            for j in 1..=n_steps {
                (x, v) = rk4_second(&f, x, v, dt);
                if !finite2(x) || !finite2(v) || x.norm() + v.norm() > blowup {
                    return Err(CoreError::Divergence { t: j as f64 * dt });
                }
                samples.push(PhaseState { t: j as f64 * dt, x, v: Some(v) });
            }
        }
    }
    Ok(Trajectory { model, params: *params, dt, samples })
}

/// Exact circular-motion solution at time `t`. Only the Landau model and
/// the chiral oscillator have one in this simple closed form.
///
/// LM: `x(t) = c + R(cs w t) (x0 - c)`, `v(t) = R(cs w t) v0` with
/// `w = g/m` and the fixed orbit center `c = x0 + cs (m/g) eps_first(v0)`.
/// CO: `x(t) = R(cs w t) x0` with `w = k/g`.
pub fn analytic_solution(
    model: ModelKind,
    state0: &PhaseState,
    params: &ModelParams,
    t: f64,
) -> Result<PhaseState> {
    state0.check_shape(model)?;
    let cs = params.cs_sign;
    match model {
        ModelKind::ChiralOscillator => {
            let x = rotate(state0.x, cs * params.omega_co() * t);
            PhaseState::first_order(t, x)
        }
        ModelKind::Landau => {
            let v0 = state0.velocity()?;
            let c = lm_orbit_center(state0, params)?;
            let angle = cs * params.omega_lm() * t;
            let x = c + rotate(state0.x - c, angle);
            let v = rotate(v0, angle);
            PhaseState::second_order(t, x, v)
        }
        other => Err(CoreError::UnsupportedModel(other.name().into())),
    }
}

/// Conserved orbit center of the Landau model,
/// `c = x + cs (m/g) eps_first(v)`.
pub fn lm_orbit_center(state: &PhaseState, params: &ModelParams) -> Result<Vec2> {
    let v = state.velocity()?;
    Ok(state.x + eps_first(v) * (params.cs_sign * params.m / params.g))
}

/// Orbit radius of the Landau model, `m |v| / g`.
pub fn lm_orbit_radius(state: &PhaseState, params: &ModelParams) -> Result<f64> {
    Ok(state.velocity()?.norm() * params.m / params.g)
}

/// Period extracted from the upward zero crossings of one position
/// component, with linear interpolation between samples.
pub fn zero_crossing_period(traj: &Trajectory, component: usize) -> Result<f64> {
    if component > 1 {
        return Err(CoreError::InvalidParams("component must be 0 or 1".into()));
    }
    let val = |s: &PhaseState| if component == 0 { s.x.x } else { s.x.y };
    let mut crossings = Vec::new();
    for j in 1..traj.samples.len() {
        let (a, b) = (val(&traj.samples[j - 1]), val(&traj.samples[j]));
        if a < 0.0 && b >= 0.0 {
            let frac = a / (a - b);
            crossings.push(traj.samples[j - 1].t + frac * traj.dt);
        }
    }
    if crossings.len() < 2 {
        return Err(CoreError::InvalidState(format!(
            "found {} upward zero crossings, need at least 2",
            crossings.len()
        )));
    }
    Ok((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}

/// Largest violation of the first-order constraint
/// `g eps_jk xdot_k - cs k x_j = 0` along a CO trajectory, with the velocity
/// approximated by central differences. Vanishes as O(dt^2).
pub fn co_constraint_residual(traj: &Trajectory, params: &ModelParams) -> Result<f64> {
    if traj.model != ModelKind::ChiralOscillator {
        return Err(CoreError::UnsupportedModel(traj.model.name().into()));
    }
    let mut worst = 0.0f64;
    for j in 1..traj.samples.len().saturating_sub(1) {
        let vfd = traj.fd_velocity(j)?;
        let r = eps_second(vfd) * params.g - traj.samples[j].x * (params.cs_sign * params.k);
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

/// One row of the slow-atom reduction study.
#[derive(Debug, Clone, Copy)]
pub struct MassScaleRow {
    /// Scaled mass actually used.
    pub mass: f64,
    /// Sup-norm deviation of the integrated dipole trajectory from the
    /// closed-form CO trajectory over one CO period.
    pub deviation: f64,
}

/// Slow-atom reduction: integrate the restricted dipole model over one CO
/// period with `g`, `k` held fixed and the mass scaled down, starting on the
/// CO constraint `v0 = co_rhs(x0)`, and measure the deviation from the
/// closed-form CO motion.
///
/// The step size resolves the fast cyclotron mode (`T_fast / 32`, capped by
/// `T_co / 1e4`), so every row is integrated with its own dt.
pub fn rydberg_limit_study(
    x0: Vec2,
    params: &ModelParams,
    mass_scales: &[f64],
) -> Result<Vec<MassScaleRow>> {
    if mass_scales.is_empty() {
        return Err(CoreError::EmptyInput("mass_scales".into()));
    }
    let co_state = PhaseState::first_order(0.0, x0)?;
    let v0 = co_rhs(&co_state, params)?;
    let t_end = params.period(ModelKind::ChiralOscillator);

    let mut rows = Vec::with_capacity(mass_scales.len());
    for &scale in mass_scales {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(CoreError::InvalidParams(format!(
                "mass scale must be finite and > 0, got {scale}"
            )));
        }
        let scaled =
            ModelParams::new(params.m * scale, params.g, params.k)?.with_hbar(params.hbar)?;
        let fast_period = scaled.period(ModelKind::Rydberg);
        let dt = (fast_period / 32.0).min(t_end / 1e4);
        let s0 = PhaseState::second_order(0.0, x0, v0)?;
        let traj = integrate(ModelKind::Rydberg, &s0, &scaled, t_end, dt)?;

        let mut dev = 0.0f64;
        for s in &traj.samples {
            let reference = analytic_solution(ModelKind::ChiralOscillator, &co_state, params, s.t)?;
            dev = dev.max((s.x - reference.x).norm());
        }
        rows.push(MassScaleRow { mass: scaled.m, deviation: dev });
    }
    Ok(rows)
}

/// CSV export for the reduction study: `mass,deviation`.
pub fn mass_scale_csv(rows: &[MassScaleRow]) -> String {
    build_csv(
        "mass,deviation",
        rows.iter().map(|r| vec![fmt_f64(r.mass), fmt_f64(r.deviation)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuned() -> ModelParams {
        ModelParams::tuned(1.0, 2.0).unwrap()
    }

    #[test]
    fn lm_rhs_is_centripetal_on_circular_data() {
        // On x(t) = (cos wt, sin wt) the velocity at t=0 is (0, w) and the
        // acceleration must point back along -x with magnitude w^2.
        let p = tuned();
        let w = p.omega_lm();
        let s = PhaseState::second_order(0.0, Vec2::new(1.0, 0.0), Vec2::new(0.0, w)).unwrap();
        let a = lm_rhs(&s, &p).unwrap();
        assert!((a - Vec2::new(-w * w, 0.0)).norm() < 1e-15);
        assert!((a.norm() - p.g * p.g / (p.m * p.m)).abs() < 1e-15);
    }

    #[test]
    fn lm_rhs_fixed_points() {
        let p = tuned();
        let rest =
            PhaseState::second_order(0.0, Vec2::new(0.4, -0.2), Vec2::zeros()).unwrap();
        assert_eq!(lm_rhs(&rest, &p).unwrap(), Vec2::zeros());

        // Free-particle limit, relaxing positivity for the test only.
        let free = ModelParams::unchecked(1.0, 0.0, 1.0, 1.0, 1.0);
        let moving =
            PhaseState::second_order(0.0, Vec2::new(1.0, 1.0), Vec2::new(0.3, 0.7)).unwrap();
        assert_eq!(lm_rhs(&moving, &free).unwrap(), Vec2::zeros());
    }

    #[test]
    fn lm_rhs_rejects_bad_states() {
        let p = tuned();
        let no_velocity = PhaseState::first_order(0.0, Vec2::new(1.0, 0.0)).unwrap();
        assert!(lm_rhs(&no_velocity, &p).is_err());
        let nan = PhaseState { t: 0.0, x: Vec2::new(f64::NAN, 0.0), v: Some(Vec2::zeros()) };
        assert!(lm_rhs(&nan, &p).is_err());
    }

    #[test]
    fn co_rhs_speed_and_fixed_point() {
        let p = tuned();
        let origin = PhaseState::first_order(0.0, Vec2::zeros()).unwrap();
        assert_eq!(co_rhs(&origin, &p).unwrap(), Vec2::zeros());

        // |v| = (k/g) |x| on any circle.
        for r in [0.5, 1.0, 3.2] {
            let s = PhaseState::first_order(0.0, Vec2::new(r * 0.6, r * 0.8)).unwrap();
            let v = co_rhs(&s, &p).unwrap();
            assert!((v.norm() - p.omega_co() * r).abs() < 1e-12);
        }
    }

    #[test]
    fn co_rhs_rotational_covariance() {
        let p = tuned();
        let x = Vec2::new(0.3, -1.1);
        for theta in [0.1, 1.0, 2.7, -0.9] {
            let v = co_rhs(&PhaseState::first_order(0.0, x).unwrap(), &p).unwrap();
            let v_rot = co_rhs(
                &PhaseState::first_order(0.0, rotate(x, theta)).unwrap(),
                &p,
            )
            .unwrap();
            assert!((rotate(v, theta) - v_rot).norm() < 1e-14);
        }
    }

    #[test]
    fn co_rhs_rejects_velocity_state() {
        let p = tuned();
        let s = PhaseState::second_order(0.0, Vec2::new(1.0, 0.0), Vec2::zeros()).unwrap();
        assert!(co_rhs(&s, &p).is_err());
    }

    #[test]
    fn rydberg_limits_match_trap_and_lm() {
        // g = 0: isotropic trap.
        let trap = ModelParams::unchecked(2.0, 0.0, 3.0, 1.0, 1.0);
        let s = PhaseState::second_order(0.0, Vec2::new(1.0, 0.0), Vec2::zeros()).unwrap();
        let a = rydberg_rhs(&s, &trap).unwrap();
        assert!((a - Vec2::new(-1.5, 0.0)).norm() < 1e-15);

        // k = 0: Landau model with the opposite CS orientation (flipping
        // cs_sign on the LM reproduces it exactly).
        let free_k = ModelParams::unchecked(1.0, 2.0, 0.0, 1.0, 1.0);
        let flipped = ModelParams::unchecked(1.0, 2.0, 0.0, 1.0, -1.0);
        let s2 =
            PhaseState::second_order(0.0, Vec2::new(0.2, 0.4), Vec2::new(-0.3, 0.9)).unwrap();
        let a_ryd = rydberg_rhs(&s2, &free_k).unwrap();
        let a_lm_flipped = lm_rhs(&s2, &flipped).unwrap();
        assert!((a_ryd - a_lm_flipped).norm() < 1e-15);
    }

    #[test]
    fn integrate_co_closes_after_one_period() {
        let p = tuned();
        let x0 = Vec2::new(1.0, 0.0);
        let s0 = PhaseState::first_order(0.0, x0).unwrap();
        let t = p.period(ModelKind::ChiralOscillator);
        let traj = integrate(ModelKind::ChiralOscillator, &s0, &p, t, t / 1e4).unwrap();
        let xf = traj.samples.last().unwrap().x;
        assert!((xf - x0).norm() < 1e-8 * x0.norm(), "gap {}", (xf - x0).norm());
    }

    #[test]
    fn integrate_lm_stationary_solution() {
        let p = tuned();
        let x0 = Vec2::new(0.7, -0.3);
        let s0 = PhaseState::second_order(0.0, x0, Vec2::zeros()).unwrap();
        let t = p.period(ModelKind::Landau);
        let traj = integrate(ModelKind::Landau, &s0, &p, t, t / 100.0).unwrap();
        for s in &traj.samples {
            assert_eq!(s.x, x0);
            assert_eq!(s.v.unwrap(), Vec2::zeros());
        }
    }

    #[test]
    fn integrate_rk4_fourth_order_convergence() {
        let p = tuned();
        let t = p.period(ModelKind::ChiralOscillator);
        let s0 = PhaseState::first_order(0.0, Vec2::new(1.0, 0.0)).unwrap();

        let max_err = |dt: f64| -> f64 {
            let traj = integrate(ModelKind::ChiralOscillator, &s0, &p, t, dt).unwrap();
            traj.samples
                .iter()
                .map(|s| {
                    let exact =
                        analytic_solution(ModelKind::ChiralOscillator, &s0, &p, s.t).unwrap();
                    (s.x - exact.x).norm()
                })
                .fold(0.0, f64::max)
        };

        let mut prev = max_err(t / 64.0);
        for div in [128.0, 256.0] {
            let err = max_err(t / div);
            assert!(prev / err >= 8.0 * 0.9, "ratio {} too small", prev / err);
            prev = err;
        }
    }

    #[test]
    fn integrate_lm_matches_analytic_orbit() {
        let p = tuned();
        let s0 =
            PhaseState::second_order(0.0, Vec2::new(0.3, 0.2), Vec2::new(-0.4, 1.1)).unwrap();
        let t = p.period(ModelKind::Landau);
        let traj = integrate(ModelKind::Landau, &s0, &p, 2.0 * t, t / 2000.0).unwrap();
        let c = lm_orbit_center(&s0, &p).unwrap();
        let radius = lm_orbit_radius(&s0, &p).unwrap();
        for s in traj.samples.iter().step_by(97) {
            let exact = analytic_solution(ModelKind::Landau, &s0, &p, s.t).unwrap();
            assert!((s.x - exact.x).norm() < 1e-9);
            // The center never moves and the radius never changes.
            let c_t = lm_orbit_center(s, &p).unwrap();
            assert!((c_t - c).norm() < 1e-9);
            assert!(((s.x - c).norm() - radius).abs() < 1e-9);
        }
    }

    #[test]
    fn integrate_rejects_coarse_step() {
        let p = tuned();
        let s0 = PhaseState::first_order(0.0, Vec2::new(1.0, 0.0)).unwrap();
        let t = p.period(ModelKind::ChiralOscillator);
        let err = integrate(ModelKind::ChiralOscillator, &s0, &p, t, t / 5.0);
        assert!(matches!(err, Err(CoreError::StepTooLarge { .. })));
    }

    #[test]
    fn analytic_co_half_period_reflects_through_origin() {
        let p = tuned();
        let x0 = Vec2::new(0.8, -0.5);
        let s0 = PhaseState::first_order(0.0, x0).unwrap();
        let half = 0.5 * p.period(ModelKind::ChiralOscillator);
        let s = analytic_solution(ModelKind::ChiralOscillator, &s0, &p, half).unwrap();
        assert!((s.x + x0).norm() < 1e-14);
    }

    #[test]
    fn analytic_rejects_unsupported_models() {
        let p = tuned();
        let s0 = PhaseState::second_order(0.0, Vec2::new(1.0, 0.0), Vec2::zeros()).unwrap();
        assert!(analytic_solution(ModelKind::Rydberg, &s0, &p, 1.0).is_err());
        assert!(analytic_solution(ModelKind::Master, &s0, &p, 1.0).is_err());
    }

    #[test]
    fn kinetic_energy_conserved_along_lm() {
        let p = tuned();
        let s0 =
            PhaseState::second_order(0.0, Vec2::new(0.1, 0.0), Vec2::new(0.0, 1.0)).unwrap();
        let t = p.period(ModelKind::Landau);
        let traj = integrate(ModelKind::Landau, &s0, &p, 10.0 * t, t / 1e4).unwrap();
        assert!(traj.max_kinetic_energy_drift().unwrap() < 1e-8);
    }

    #[test]
    fn zero_crossing_recovers_both_frequencies() {
        let p = tuned();
        // Duality-tuned: both periods coincide.
        let t = p.period(ModelKind::ChiralOscillator);

        let co0 = PhaseState::first_order(0.0, Vec2::new(1.0, 0.0)).unwrap();
        let co = integrate(ModelKind::ChiralOscillator, &co0, &p, 10.0 * t, t / 1e4).unwrap();
        let t_co = zero_crossing_period(&co, 0).unwrap();
        assert!((t_co - t).abs() / t < 1e-6);

        // LM orbit centered at the origin so that x1 actually crosses zero:
        // v0 = w eps_first(x0) puts the center at 0.
        let x0 = Vec2::new(1.0, 0.0);
        let v0 = eps_first(x0) * p.omega_lm();
        let lm0 = PhaseState::second_order(0.0, x0, v0).unwrap();
        assert!(lm_orbit_center(&lm0, &p).unwrap().norm() < 1e-15);
        let lm = integrate(ModelKind::Landau, &lm0, &p, 10.0 * t, t / 1e4).unwrap();
        let t_lm = zero_crossing_period(&lm, 0).unwrap();
        assert!((t_lm - t).abs() / t < 1e-6);
    }

    #[test]
    fn co_constraint_residual_shrinks_quadratically() {
        let p = tuned();
        let s0 = PhaseState::first_order(0.0, Vec2::new(1.0, 0.0)).unwrap();
        let t = p.period(ModelKind::ChiralOscillator);
        let res = |dt: f64| {
            let traj = integrate(ModelKind::ChiralOscillator, &s0, &p, t, dt).unwrap();
            co_constraint_residual(&traj, &p).unwrap()
        };
        let (r1, r2) = (res(t / 500.0), res(t / 1000.0));
        assert!(r1 / r2 >= 4.0 * 0.9, "ratio {}", r1 / r2);
    }

    #[test]
    fn trajectory_grid_is_uniform() {
        let p = tuned();
        let s0 = PhaseState::first_order(0.0, Vec2::new(1.0, 0.0)).unwrap();
        let t = p.period(ModelKind::ChiralOscillator);
        let traj = integrate(ModelKind::ChiralOscillator, &s0, &p, t, t / 128.0).unwrap();
        for (j, s) in traj.samples.iter().enumerate() {
            assert_eq!(s.t, j as f64 * traj.dt);
        }
    }

    #[test]
    fn rydberg_reduction_is_monotone_in_mass() {
        let p = tuned();
        let rows =
            rydberg_limit_study(Vec2::new(1.0, 0.0), &p, &[1.0, 0.1, 0.01]).unwrap();
        assert!(rows[0].deviation > rows[1].deviation);
        assert!(rows[1].deviation > rows[2].deviation);
    }

    #[test]
    fn rydberg_reduction_deterministic_rows() {
        let p = tuned();
        let rows = rydberg_limit_study(Vec2::new(1.0, 0.0), &p, &[0.5, 0.5]).unwrap();
        assert_eq!(rows[0].deviation, rows[1].deviation);
    }

    #[test]
    fn rydberg_reduction_rejects_empty_input() {
        let p = tuned();
        assert!(rydberg_limit_study(Vec2::new(1.0, 0.0), &p, &[]).is_err());
    }

    #[test]
    fn csv_columns_follow_model_order() {
        let p = tuned();
        let t = p.period(ModelKind::ChiralOscillator);
        let co0 = PhaseState::first_order(0.0, Vec2::new(1.0, 0.0)).unwrap();
        let co = integrate(ModelKind::ChiralOscillator, &co0, &p, t / 2.0, t / 100.0).unwrap();
        assert!(co.to_csv().starts_with("t,x1,x2\n"));

        let lm0 = PhaseState::second_order(0.0, Vec2::new(1.0, 0.0), Vec2::zeros()).unwrap();
        let lm = integrate(ModelKind::Landau, &lm0, &p, t / 2.0, t / 100.0).unwrap();
        assert!(lm.to_csv().starts_with("t,x1,x2,v1,v2\n"));
    }

    #[test]
    fn rotational_covariance_of_integrated_trajectories() {
        let p = tuned();
        let theta = 0.83;
        let t = p.period(ModelKind::Rydberg);
        let x0 = Vec2::new(0.9, -0.2);
        let v0 = Vec2::new(0.1, 0.5);
        for model in [ModelKind::Landau, ModelKind::Rydberg] {
            let a = integrate(
                model,
                &PhaseState::second_order(0.0, x0, v0).unwrap(),
                &p,
                20.0 * t,
                t / 200.0,
            )
            .unwrap();
            let b = integrate(
                model,
                &PhaseState::second_order(0.0, rotate(x0, theta), rotate(v0, theta)).unwrap(),
                &p,
                20.0 * t,
                t / 200.0,
            )
            .unwrap();
            for (sa, sb) in a.samples.iter().zip(&b.samples).step_by(37) {
                assert!((rotate(sa.x, theta) - sb.x).norm() < 1e-9);
            }
        }
    }
}
