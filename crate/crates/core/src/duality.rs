//! The dual-projection canonical transformation and the master system.
//!
//! Starting from the first-order form of the Landau model with canonical
//! momentum `p_j = m v_j - (g/2) eps_ij x_i`, the change of variables
//!
//! ```text
//! x_i = x_i^+ + x_i^-          2 p_i = g eps_ij (x_j^- - x_j^+)
//! ```
//!
//! splits the dynamics into a chiral-oscillator sector `x^+` (all the
//! energy) and a Chern-Simons sector `x^-` that reduces to the conserved
//! orbit center. Inverting the two linear relations gives
//!
//! ```text
//! x^+ = x/2 - (1/g) eps_first(p)       x^- = x/2 + (1/g) eps_first(p)
//! ```
//!
//! and the induced Poisson brackets are `{x_i^+, x_j^+} = -eps_ij / g`,
//! `{x_i^-, x_j^-} = +eps_ij / g`, with the sectors mutually commuting.
//!
//! This module works in the written Landau-model orientation
//! (`cs_sign = +1`); the `cs_sign` flag only affects the classical
//! right-hand sides.

use nalgebra::Matrix4;

use crate::classical::{PhaseState, Trajectory};
use crate::csvfmt::{build_csv, fmt_f64};
use crate::error::{CoreError, Result};
use crate::params::{ModelKind, ModelParams};
use crate::planar::{eps_first, Vec2};

/// Position and canonical momentum of the Landau model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalState {
    pub x: Vec2,
    pub p: Vec2,
}

/// The two sectors of the dual projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralDecomposition {
    /// Dynamical chiral-oscillator sector.
    pub x_plus: Vec2,
    /// Symmetry-carrying Chern-Simons sector (the orbit center).
    pub x_minus: Vec2,
}

/// Legendre map of the Landau model: `p = m v - (g/2) eps_first(x)`.
pub fn velocity_to_momentum(state: &PhaseState, params: &ModelParams) -> Result<CanonicalState> {
    let v = state.velocity()?;
    Ok(CanonicalState {
        x: state.x,
        p: v * params.m - eps_first(state.x) * (params.g / 2.0),
    })
}

/// Inverse Legendre map: `v = (p + (g/2) eps_first(x)) / m`.
pub fn momentum_to_velocity(
    cs: &CanonicalState,
    params: &ModelParams,
    t: f64,
) -> Result<PhaseState> {
    let v = (cs.p + eps_first(cs.x) * (params.g / 2.0)) / params.m;
    PhaseState::second_order(t, cs.x, v)
}

/// Splits a canonical state into its chiral sectors. The linear map only
/// needs `g > 0`; the dynamical statements about the sectors additionally
/// need duality-tuned parameters.
pub fn decompose(cs: &CanonicalState, params: &ModelParams) -> Result<ChiralDecomposition> {
    if params.g == 0.0 {
        return Err(CoreError::SingularTransform(
            "dual projection is singular at g = 0".into(),
        ));
    }
    let shift = eps_first(cs.p) / params.g;
    Ok(ChiralDecomposition {
        x_plus: cs.x * 0.5 - shift,
        x_minus: cs.x * 0.5 + shift,
    })
}

/// Exact inverse of [`decompose`]:
/// `x = x^+ + x^-`, `p = (g/2) eps_first(x^+ - x^-)`.
pub fn compose(d: &ChiralDecomposition, params: &ModelParams) -> CanonicalState {
    CanonicalState {
        x: d.x_plus + d.x_minus,
        p: eps_first(d.x_plus - d.x_minus) * (params.g / 2.0),
    }
}

/// Decomposes every sample of a Landau trajectory.
pub fn decompose_trajectory(
    traj: &Trajectory,
    params: &ModelParams,
) -> Result<Vec<(f64, ChiralDecomposition)>> {
    if traj.model != ModelKind::Landau {
        return Err(CoreError::UnsupportedModel(traj.model.name().into()));
    }
    traj.samples
        .iter()
        .map(|s| Ok((s.t, decompose(&velocity_to_momentum(s, params)?, params)?)))
        .collect()
}

/// CSV export of a decomposed trajectory: `t,xp1,xp2,xm1,xm2`.
pub fn decomposition_csv(rows: &[(f64, ChiralDecomposition)]) -> String {
    build_csv(
        "t,xp1,xp2,xm1,xm2",
        rows.iter().map(|(t, d)| {
            vec![
                fmt_f64(*t),
                fmt_f64(d.x_plus.x),
                fmt_f64(d.x_plus.y),
                fmt_f64(d.x_minus.x),
                fmt_f64(d.x_minus.y),
            ]
        }),
    )
}

/// Acceleration of the master system once the algebraic variable has been
/// eliminated.
///
/// Varying the master Lagrangian in `x` gives `x = -(g/k) eps_second(ydot)`;
/// substituting back leaves the Landau-type equation
/// `yddot = (k/g) eps_first(ydot)` for `y` alone. The eliminated coordinate
/// is recovered pointwise by [`reconstruct_co_position`] and satisfies the
/// chiral-oscillator equation of motion.
pub fn master_rhs(state: &PhaseState, params: &ModelParams) -> Result<Vec2> {
    let v = state.velocity()?;
    if params.k == 0.0 {
        return Err(CoreError::SingularTransform(
            "cannot eliminate x from the master system at k = 0".into(),
        ));
    }
    if params.g == 0.0 {
        return Err(CoreError::SingularTransform(
            "master system is singular at g = 0".into(),
        ));
    }
    Ok(master_acceleration(v, params))
}

/// Unchecked right-hand side used by the integrator dispatch.
pub(crate) fn master_acceleration(v: Vec2, params: &ModelParams) -> Vec2 {
    eps_first(v) * (params.k / params.g)
}

/// The algebraically eliminated coordinate of the master system,
/// `x = (g/k) eps_first(ydot)`.
pub fn reconstruct_co_position(y_velocity: Vec2, params: &ModelParams) -> Vec2 {
    eps_first(y_velocity) * (params.g / params.k)
}

/// The matrix of Poisson brackets of `(x1^+, x2^+, x1^-, x2^-)` induced by
/// the canonical `{x_i, p_j} = delta_ij`, computed from the linear map as
/// `T J T^T`. This is a kinematic statement about the transformation, not
/// about any trajectory.
pub fn poisson_bracket_matrix(params: &ModelParams) -> Result<Matrix4<f64>> {
    if params.g == 0.0 {
        return Err(CoreError::SingularTransform(
            "dual projection is singular at g = 0".into(),
        ));
    }
    let g = params.g;
    // Rows: gradients of (x1+, x2+, x1-, x2-) w.r.t. z = (x1, x2, p1, p2);
    // eps_first(p) = (-p2, p1).
    let t = Matrix4::new(
        0.5, 0.0, 0.0, 1.0 / g, //
        0.0, 0.5, -1.0 / g, 0.0, //
        0.5, 0.0, 0.0, -1.0 / g, //
        0.0, 0.5, 1.0 / g, 0.0,
    );
    let j = Matrix4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    );
    Ok(t * j * t.transpose())
}

/// The bracket matrix the dual projection must produce:
/// `{x_i^+, x_j^+} = -eps_ij/g`, `{x_i^-, x_j^-} = +eps_ij/g`, sectors
/// commuting.
pub fn expected_bracket_matrix(params: &ModelParams) -> Matrix4<f64> {
    let g = params.g;
    Matrix4::new(
        0.0, -1.0 / g, 0.0, 0.0, //
        1.0 / g, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0 / g, //
        0.0, 0.0, -1.0 / g, 0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{analytic_solution, integrate, lm_orbit_center};

    fn tuned() -> ModelParams {
        ModelParams::tuned(1.0, 2.0).unwrap()
    }

    #[test]
    fn momentum_of_pure_velocity_state() {
        let p = tuned();
        let s = PhaseState::second_order(0.0, Vec2::zeros(), Vec2::new(1.0, 0.0)).unwrap();
        let c = velocity_to_momentum(&s, &p).unwrap();
        assert_eq!(c.p, Vec2::new(p.m, 0.0));
    }

    #[test]
    fn momentum_of_pure_position_state() {
        // v = 0, x = e1: p = -(g/2) eps_first(e1) = (0, -g/2).
        let p = tuned();
        let s = PhaseState::second_order(0.0, Vec2::new(1.0, 0.0), Vec2::zeros()).unwrap();
        let c = velocity_to_momentum(&s, &p).unwrap();
        assert!((c.p - Vec2::new(0.0, -p.g / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn legendre_round_trip() {
        let p = tuned();
        let s = PhaseState::second_order(1.5, Vec2::new(0.3, -0.8), Vec2::new(0.9, 0.1)).unwrap();
        let back = momentum_to_velocity(&velocity_to_momentum(&s, &p).unwrap(), &p, s.t).unwrap();
        assert!((back.x - s.x).norm() < 1e-15);
        assert!((back.v.unwrap() - s.v.unwrap()).norm() < 1e-15);
    }

    #[test]
    fn decompose_zero_state() {
        let p = tuned();
        let d = decompose(&CanonicalState { x: Vec2::zeros(), p: Vec2::zeros() }, &p).unwrap();
        assert_eq!(d.x_plus, Vec2::zeros());
        assert_eq!(d.x_minus, Vec2::zeros());
    }

    #[test]
    fn decompose_rejects_singular_coupling() {
        let p = ModelParams::unchecked(1.0, 0.0, 1.0, 1.0, 1.0);
        let c = CanonicalState { x: Vec2::new(1.0, 0.0), p: Vec2::zeros() };
        assert!(decompose(&c, &p).is_err());
        assert!(poisson_bracket_matrix(&p).is_err());
    }

    #[test]
    fn compose_decompose_identity() {
        let p = tuned();
        let c = CanonicalState { x: Vec2::new(0.4, -1.3), p: Vec2::new(2.2, 0.7) };
        let back = compose(&decompose(&c, &p).unwrap(), &p);
        assert!((back.x - c.x).norm() < 1e-14);
        assert!((back.p - c.p).norm() < 1e-14);
    }

    #[test]
    fn minus_sector_is_the_orbit_center() {
        let p = tuned();
        let s = PhaseState::second_order(0.0, Vec2::new(0.3, 0.9), Vec2::new(-1.1, 0.4)).unwrap();
        let d = decompose(&velocity_to_momentum(&s, &p).unwrap(), &p).unwrap();
        let c = lm_orbit_center(&s, &p).unwrap();
        assert!((d.x_minus - c).norm() < 1e-14);
        assert!((d.x_plus - (s.x - c)).norm() < 1e-14);
    }

    #[test]
    fn minus_sector_constant_along_lm_trajectory() {
        let p = tuned();
        let s0 = PhaseState::second_order(0.0, Vec2::new(1.0, 0.2), Vec2::new(0.0, 0.8)).unwrap();
        let t = p.period(ModelKind::Landau);
        let traj = integrate(ModelKind::Landau, &s0, &p, 5.0 * t, t / 1e4).unwrap();
        let rows = decompose_trajectory(&traj, &p).unwrap();
        let first = rows[0].1.x_minus;
        let drift = rows
            .iter()
            .map(|(_, d)| (d.x_minus - first).norm())
            .fold(0.0, f64::max);
        assert!(drift < 1e-9, "drift {drift}");
    }

    #[test]
    fn minus_sector_drift_is_rounding_only_at_any_step() {
        // The symmetry sector is linear in (x, v), and Runge-Kutta methods
        // preserve linear first integrals exactly, so the drift sits at the
        // rounding floor even for coarse steps. That is stronger than the
        // nominal O(dt^4) improvement, which is therefore unobservable.
        let p = tuned();
        let s0 = PhaseState::second_order(0.0, Vec2::new(1.0, 0.2), Vec2::new(0.0, 0.8)).unwrap();
        let t = p.period(ModelKind::Landau);
        for steps in [50.0, 100.0, 1000.0] {
            let traj = integrate(ModelKind::Landau, &s0, &p, 5.0 * t, t / steps).unwrap();
            let rows = decompose_trajectory(&traj, &p).unwrap();
            let first = rows[0].1.x_minus;
            let drift = rows
                .iter()
                .map(|(_, d)| (d.x_minus - first).norm())
                .fold(0.0, f64::max);
            assert!(drift < 1e-12, "steps {steps}: drift {drift}");
        }
    }

    #[test]
    fn plus_sector_satisfies_co_equation() {
        // Finite-difference xdot+ against (k/g) eps_first(x+) along an
        // integrated LM trajectory.
        let p = tuned();
        let s0 = PhaseState::second_order(0.0, Vec2::new(1.0, 0.2), Vec2::new(0.0, 0.8)).unwrap();
        let t = p.period(ModelKind::Landau);
        let dt = t / 1e4;
        let traj = integrate(ModelKind::Landau, &s0, &p, t, dt).unwrap();
        let rows = decompose_trajectory(&traj, &p).unwrap();
        let mut worst = 0.0f64;
        for j in 1..rows.len() - 1 {
            let fd = (rows[j + 1].1.x_plus - rows[j - 1].1.x_plus) / (2.0 * dt);
            let rhs = eps_first(rows[j].1.x_plus) * p.omega_co();
            worst = worst.max((fd - rhs).norm());
        }
        assert!(worst < 1e-6, "residual {worst}");
    }

    #[test]
    fn pure_co_sector_orbits_the_origin() {
        // x_minus = 0 embeds a chiral oscillator in the LM with orbit
        // center at the origin.
        let p = tuned();
        let d = ChiralDecomposition { x_plus: Vec2::new(0.6, -0.1), x_minus: Vec2::zeros() };
        let c = compose(&d, &p);
        let s0 = momentum_to_velocity(&c, &p, 0.0).unwrap();
        assert!(lm_orbit_center(&s0, &p).unwrap().norm() < 1e-14);
        let t = p.period(ModelKind::Landau);
        let traj = integrate(ModelKind::Landau, &s0, &p, t, t / 1000.0).unwrap();
        for s in traj.samples.iter().step_by(53) {
            let exact = analytic_solution(ModelKind::Landau, &s0, &p, s.t).unwrap();
            assert!((s.x - exact.x).norm() < 1e-9);
            assert!((s.x.norm() - d.x_plus.norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_cs_sector_is_static() {
        let p = tuned();
        let d = ChiralDecomposition { x_plus: Vec2::zeros(), x_minus: Vec2::new(0.4, 0.9) };
        let c = compose(&d, &p);
        let s0 = momentum_to_velocity(&c, &p, 0.0).unwrap();
        // Zero energy: the composed state does not move.
        assert!(s0.v.unwrap().norm() < 1e-15);
        let t = p.period(ModelKind::Landau);
        let traj = integrate(ModelKind::Landau, &s0, &p, t, t / 100.0).unwrap();
        for s in &traj.samples {
            assert!((s.x - d.x_minus).norm() < 1e-15);
        }
    }

    #[test]
    fn lm_energy_lives_in_the_plus_sector() {
        let p = tuned();
        let s0 = PhaseState::second_order(0.0, Vec2::new(0.5, 0.5), Vec2::new(1.0, -0.2)).unwrap();
        let t = p.period(ModelKind::Landau);
        let traj = integrate(ModelKind::Landau, &s0, &p, 3.0 * t, t / 1e4).unwrap();
        for (j, s) in traj.samples.iter().enumerate().step_by(101) {
            let e_lm = traj.kinetic_energy(j).unwrap();
            let d = decompose(&velocity_to_momentum(s, &p).unwrap(), &p).unwrap();
            let e_co = 0.5 * p.k * d.x_plus.dot(&d.x_plus);
            assert!((e_lm - e_co).abs() < 1e-8 * e_lm);
        }
    }

    #[test]
    fn bracket_matrix_matches_expected() {
        for g in [0.5, 1.0, 2.0, 7.3] {
            let p = ModelParams::new(1.0, g, 1.0).unwrap();
            let got = poisson_bracket_matrix(&p).unwrap();
            let want = expected_bracket_matrix(&p);
            assert!((got - want).abs().max() < 1e-15);
        }
    }

    #[test]
    fn master_system_reconstructs_a_chiral_oscillator() {
        let p = tuned();
        let omega = p.omega_co();
        // Center the y-orbit at the origin: ydot0 = omega eps_first(y0).
        let y0 = Vec2::new(1.0, 0.0);
        let v0 = eps_first(y0) * omega;
        let s0 = PhaseState::second_order(0.0, y0, v0).unwrap();
        let t = p.period(ModelKind::Master);
        let dt = t / 4000.0;
        let traj = integrate(ModelKind::Master, &s0, &p, 2.0 * t, dt).unwrap();

        // Reconstructed x must satisfy the CO equation of motion.
        let xs: Vec<Vec2> = traj
            .samples
            .iter()
            .map(|s| reconstruct_co_position(s.v.unwrap(), &p))
            .collect();
        let mut worst = 0.0f64;
        for j in 1..xs.len() - 1 {
            let fd = (xs[j + 1] - xs[j - 1]) / (2.0 * dt);
            worst = worst.max((fd - eps_first(xs[j]) * omega).norm());
        }
        assert!(worst < 1e-5, "residual {worst}");
    }

    #[test]
    fn master_frequency_equals_duality_frequency() {
        let p = tuned();
        let y0 = Vec2::new(1.0, 0.0);
        let v0 = eps_first(y0) * p.omega_co();
        let s0 = PhaseState::second_order(0.0, y0, v0).unwrap();
        let t = p.period(ModelKind::Master);
        let traj = integrate(ModelKind::Master, &s0, &p, 10.0 * t, t / 1e4).unwrap();
        let measured = crate::classical::zero_crossing_period(&traj, 0).unwrap();
        let expected = 2.0 * std::f64::consts::PI / p.omega_lm();
        assert!((measured - expected).abs() / expected < 1e-6);
    }

    #[test]
    fn master_stationary_solution() {
        let p = tuned();
        let s0 = PhaseState::second_order(0.0, Vec2::new(0.3, 0.3), Vec2::zeros()).unwrap();
        assert_eq!(master_rhs(&s0, &p).unwrap(), Vec2::zeros());
        assert_eq!(reconstruct_co_position(Vec2::zeros(), &p), Vec2::zeros());
    }

    #[test]
    fn master_rejects_degenerate_parameters() {
        let s0 = PhaseState::second_order(0.0, Vec2::zeros(), Vec2::new(1.0, 0.0)).unwrap();
        let no_k = ModelParams::unchecked(1.0, 1.0, 0.0, 1.0, 1.0);
        assert!(master_rhs(&s0, &no_k).is_err());
        let no_g = ModelParams::unchecked(1.0, 0.0, 1.0, 1.0, 1.0);
        assert!(master_rhs(&s0, &no_g).is_err());
    }

    #[test]
    fn decomposition_csv_header() {
        let rows = vec![(
            0.0,
            ChiralDecomposition { x_plus: Vec2::new(1.0, 2.0), x_minus: Vec2::new(3.0, 4.0) },
        )];
        let csv = decomposition_csv(&rows);
        assert!(csv.starts_with("t,xp1,xp2,xm1,xm2\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
