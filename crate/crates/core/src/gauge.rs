//! Gauge potentials on the time circle, large gauge transformations, and
//! the regularized determinant of `i d/dt + a`.
//!
//! A loop is a periodic sampled potential `a(t_j)` on the uniform grid
//! `t_j = j T / N_t`. Its only gauge-invariant-mod-2pi datum is the
//! holonomy `phi = integral of a dt`, computed here by the Riemann sum,
//! which on a periodic grid coincides with the trapezoid rule. The same
//! quadrature underlies the determinant discretization.
//!
//! The determinant is discretized by the transfer product over one turn of
//! the circle, `T_N = prod_j exp(i dt a_j)`, the exact one-step evolution
//! for a piecewise-constant potential, giving
//!
//! ```text
//! det_N = 1 - T_N  ->  1 - exp(i phi).
//! ```
//!
//! `1 - exp(i phi)` is a function of the holonomy mod 2pi alone and cannot
//! see a winding; algebraically the ratio under `phi -> phi + 2 pi N` is 1.
//! The anomaly lives in the sign-resolved factorization
//!
//! ```text
//! 1 - exp(i phi) = -2i exp(i phi / 2) sin(phi / 2),
//! ```
//!
//! whose `sin(phi/2)` factor flips by `(-1)^N` when the holonomy advances
//! by `2 pi N`. That sign is extracted topologically: the transformation is
//! turned on along the homotopy `a_s = a + s lambda_dot`, the transfer
//! phase is unwrapped continuously in `s`, and the determinant ratio is
//! read off the unwrapped endpoint phases. No winding bookkeeping from the
//! transformation enters the measurement.
//!
//! `hbar = 1` throughout this module; `nu` is angular momentum in units of
//! `hbar`.

use crate::csvfmt::{build_csv, fmt_f64};
use crate::error::{CoreError, Result};
use crate::C64;

use std::f64::consts::TAU;

/// Number of homotopy samples used when branch-tracking a determinant
/// ratio; fine enough to unwrap windings up to |N| = 31.
const HOMOTOPY_STEPS: usize = 64;

/// Periodic sampled gauge potential on a time circle.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeLoop {
    period: f64,
    samples: Vec<f64>,
}

impl GaugeLoop {
    pub fn new(period: f64, samples: Vec<f64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(CoreError::InvalidParams(format!("need period > 0, got {period}")));
        }
        if samples.len() < 8 {
            return Err(CoreError::InvalidParams(format!(
                "need at least 8 samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|a| !a.is_finite()) {
            return Err(CoreError::InvalidState("non-finite gauge sample".into()));
        }
        Ok(GaugeLoop { period, samples })
    }

    /// Samples a function of `t` on the uniform grid.
    pub fn from_fn(period: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dt = period / n as f64;
        Self::new(period, (0..n).map(|j| f(j as f64 * dt)).collect())
    }

    /// Constant potential, `holonomy = value * period`.
    pub fn constant(period: f64, value: f64, n: usize) -> Result<Self> {
        Self::new(period, vec![value; n])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn dt(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Holonomy `integral a dt` by the Riemann sum on the periodic grid.
    pub fn holonomy(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.dt()
    }
}

/// A periodic-in-time U(1) gauge transformation
/// `lambda(t) = 2 pi N t / T + p(t)`, with `p` periodic. Only
/// `lambda_dot` ever acts on a loop, and it is periodic even though
/// `lambda` itself jumps by `2 pi N` per turn.
#[derive(Debug, Clone)]
pub struct GaugeTransform {
    winding: i64,
    periodic_part: Vec<f64>,
}

impl GaugeTransform {
    /// Pure winding, zero periodic part, on an `n`-point grid.
    pub fn pure_winding(winding: i64, n: usize) -> Result<Self> {
        Self::new(winding, vec![0.0; n])
    }

    pub fn new(winding: i64, periodic_part: Vec<f64>) -> Result<Self> {
        if periodic_part.len() < 8 {
            return Err(CoreError::InvalidParams(format!(
                "need at least 8 samples, got {}",
                periodic_part.len()
            )));
        }
        if periodic_part.iter().any(|p| !p.is_finite()) {
            return Err(CoreError::InvalidState("non-finite periodic part".into()));
        }
        Ok(GaugeTransform { winding, periodic_part })
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    pub fn n_samples(&self) -> usize {
        self.periodic_part.len()
    }

    /// Total change of the gauge function over one turn, `2 pi N`.
    pub fn delta_lambda(&self) -> f64 {
        TAU * self.winding as f64
    }

    /// `lambda_dot` on the grid: the constant winding slope plus the
    /// central finite difference of the periodic part. Central differences
    /// telescope to zero under the periodic Riemann sum, so the holonomy
    /// shift is `2 pi N` to rounding.
    fn lambda_dot(&self, period: f64) -> Vec<f64> {
        let n = self.periodic_part.len();
        let dt = period / n as f64;
        let slope = self.delta_lambda() / period;
        (0..n)
            .map(|j| {
                let next = self.periodic_part[(j + 1) % n];
                let prev = self.periodic_part[(j + n - 1) % n];
                slope + (next - prev) / (2.0 * dt)
            })
            .collect()
    }
}

/// Gauge-transformed loop `a' = a + lambda_dot`.
pub fn apply_gauge(looped: &GaugeLoop, gt: &GaugeTransform) -> Result<GaugeLoop> {
    apply_gauge_scaled(looped, gt, 1.0)
}

/// Partially applied transformation `a + s lambda_dot`; `s = 1` is
/// [`apply_gauge`]. Used for the homotopy in the branch tracking.
pub fn apply_gauge_scaled(looped: &GaugeLoop, gt: &GaugeTransform, s: f64) -> Result<GaugeLoop> {
    if looped.n_samples() != gt.n_samples() {
        return Err(CoreError::GridMismatch(format!(
            "loop has {} samples, transform has {}",
            looped.n_samples(),
            gt.n_samples()
        )));
    }
    let ld = gt.lambda_dot(looped.period);
    let samples = looped
        .samples
        .iter()
        .zip(&ld)
        .map(|(a, d)| a + s * d)
        .collect();
    GaugeLoop::new(looped.period, samples)
}

/// Transfer product `prod_j exp(i dt a_j)` around the circle; a unit-modulus
/// complex number whose phase is the Riemann holonomy mod 2 pi.
pub fn transfer_product(looped: &GaugeLoop) -> C64 {
    let dt = looped.dt();
    looped
        .samples
        .iter()
        .map(|a| C64::from_polar(1.0, dt * a))
        .product()
}

/// Discretized determinant of `i d/dt + a` with periodic boundary
/// conditions, normalized so the continuum limit is `1 - exp(i phi)`.
///
/// Vanishes on the zero-mode locus `phi in 2 pi Z` (a constant function
/// sits in the kernel there).
pub fn regularized_determinant(looped: &GaugeLoop) -> C64 {
    C64::from(1.0) - transfer_product(looped)
}

/// Closed-form continuum determinant `1 - exp(i phi)`.
pub fn determinant_closed_form(holonomy: f64) -> C64 {
    C64::from(1.0) - C64::from_polar(1.0, holonomy)
}

/// Outcome of following a determinant through a gauge homotopy.
#[derive(Debug, Clone, Copy)]
pub struct BranchTrackedRatio {
    /// `det(a') / det(a)` of the sign-resolved determinant; `(-1)^N` up to
    /// quadrature error.
    pub ratio: f64,
    /// Winding measured from the unwrapped transfer phases, independent of
    /// the transformation's own bookkeeping.
    pub measured_winding: i64,
    /// Unwrapped holonomy change along the homotopy, close to `2 pi N`.
    pub holonomy_shift: f64,
}

/// Follows the sign-resolved determinant along `a_s = a + s lambda_dot`.
///
/// The transfer phase is unwrapped continuously in `s`; the ratio of the
/// `sin(theta/2)` factors at the endpoints is the anomalous `(-1)^N`.
/// Errors out on the zero-mode locus, where the ratio is 0/0.
pub fn branch_tracked_ratio(looped: &GaugeLoop, gt: &GaugeTransform) -> Result<BranchTrackedRatio> {
    let mut theta: Vec<f64> = Vec::with_capacity(HOMOTOPY_STEPS + 1);
    for i in 0..=HOMOTOPY_STEPS {
        let s = i as f64 / HOMOTOPY_STEPS as f64;
        let t = transfer_product(&apply_gauge_scaled(looped, gt, s)?);
        let raw = t.arg();
        let unwrapped = match theta.last() {
            None => raw,
            Some(&prev) => {
                let mut candidate = raw + TAU * ((prev - raw) / TAU).round();
                // Guard against the rounding boundary.
                while candidate - prev > std::f64::consts::PI {
                    candidate -= TAU;
                }
                while candidate - prev < -std::f64::consts::PI {
                    candidate += TAU;
                }
                candidate
            }
        };
        theta.push(unwrapped);
    }
    let (theta0, theta1) = (theta[0], theta[HOMOTOPY_STEPS]);
    let (s0, s1) = ((theta0 / 2.0).sin(), (theta1 / 2.0).sin());
    if s0.abs() < 1e-8 {
        return Err(CoreError::ZeroMode);
    }
    let shift = theta1 - theta0;
    Ok(BranchTrackedRatio {
        ratio: s1 / s0,
        measured_winding: (shift / TAU).round() as i64,
        holonomy_shift: shift,
    })
}

/// Which effective action the anomaly ratio refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyModel {
    /// One anomalous determinant: ratio `(-1)^N exp(i 2 pi N nu)`.
    ChiralOscillator,
    /// Two canceling determinants: ratio `exp(i 2 pi N nu)`.
    Landau,
}

impl AnomalyModel {
    pub fn name(self) -> &'static str {
        match self {
            AnomalyModel::ChiralOscillator => "co",
            AnomalyModel::Landau => "lm",
        }
    }

    fn determinant_factors(self) -> i32 {
        match self {
            AnomalyModel::ChiralOscillator => 1,
            AnomalyModel::Landau => 2,
        }
    }
}

/// Ratio `exp(i Gamma(a')) / exp(i Gamma(a))` of the effective-action
/// phases, computed through the discretized branch-tracked determinant and
/// the measured holonomy shift.
///
/// Unit modulus up to quadrature error. The Chern-Simons coefficient `nu`
/// leaves it invariant iff `nu` is half-integer for the chiral oscillator
/// and integer for the Landau model.
pub fn anomaly_phase_ratio(
    looped: &GaugeLoop,
    gt: &GaugeTransform,
    nu: f64,
    model: AnomalyModel,
) -> Result<C64> {
    let tracked = branch_tracked_ratio(looped, gt)?;
    let det_ratio = tracked.ratio.powi(tracked_power(model));
    Ok(C64::from(det_ratio) * C64::from_polar(1.0, nu * tracked.holonomy_shift))
}

fn tracked_power(model: AnomalyModel) -> i32 {
    model.determinant_factors()
}

/// Closed-form layer of the same ratio: `(-1)^(N * factors) e^{i 2 pi N nu}`.
pub fn anomaly_phase_ratio_closed_form(winding: i64, nu: f64, model: AnomalyModel) -> C64 {
    let sign = if (winding * model.determinant_factors() as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    C64::from(sign) * C64::from_polar(1.0, TAU * winding as f64 * nu)
}

/// Optional restriction of the allowed angular momenta to one circulation
/// sense. The anomaly argument fixes the spacing of the allowed values, not
/// their sign, so the default keeps both branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Both,
    Positive,
    Negative,
}

/// Angular momentum values (in units of `hbar`) compatible with large gauge
/// invariance: half-integers for the chiral oscillator, integers for the
/// Landau model, intersected with `[lo, hi]`.
pub fn allowed_angular_momenta(
    model: AnomalyModel,
    lo: f64,
    hi: f64,
    chirality: Chirality,
) -> Vec<f64> {
    if lo > hi {
        return Vec::new();
    }
    let offset = match model {
        AnomalyModel::ChiralOscillator => 0.5,
        AnomalyModel::Landau => 0.0,
    };
    let start = (lo - offset).ceil() as i64;
    let end = (hi - offset).floor() as i64;
    (start..=end)
        .map(|n| n as f64 + offset)
        .filter(|nu| match chirality {
            Chirality::Both => true,
            Chirality::Positive => *nu > 0.0,
            Chirality::Negative => *nu < 0.0,
        })
        .collect()
}

/// One row of the anomaly report.
#[derive(Debug, Clone, Copy)]
pub struct AnomalyRow {
    pub model: AnomalyModel,
    pub winding: i64,
    pub nu: f64,
    pub ratio: C64,
}

impl AnomalyRow {
    pub fn invariant(&self) -> bool {
        (self.ratio - C64::from(1.0)).norm() < 1e-8
    }
}

/// CSV export: `model,N,nu,ratio_re,ratio_im,invariant`.
pub fn anomaly_report_csv(rows: &[AnomalyRow]) -> String {
    build_csv(
        "model,N,nu,ratio_re,ratio_im,invariant",
        rows.iter().map(|r| {
            vec![
                r.model.name().to_string(),
                r.winding.to_string(),
                fmt_f64(r.nu),
                fmt_f64(r.ratio.re),
                fmt_f64(r.ratio.im),
                r.invariant().to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Smooth loop with holonomy `phi` plus harmonic wiggle.
    fn wiggly_loop(phi: f64, n: usize) -> GaugeLoop {
        let t_period = TAU;
        GaugeLoop::from_fn(t_period, n, |t| {
            phi / t_period + 0.4 * (TAU * t / t_period).cos() + 0.15 * (2.0 * TAU * t / t_period).sin()
        })
        .unwrap()
    }

    fn harmonic_transform(winding: i64, n: usize) -> GaugeTransform {
        let t_period = TAU;
        let dt = t_period / n as f64;
        let part: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 * dt;
                0.3 * (TAU * t / t_period + 0.5).sin() + 0.1 * (2.0 * TAU * t / t_period).cos()
            })
            .collect();
        GaugeTransform::new(winding, part).unwrap()
    }

    #[test]
    fn loop_validation() {
        assert!(GaugeLoop::new(1.0, vec![0.0; 4]).is_err());
        assert!(GaugeLoop::new(0.0, vec![0.0; 16]).is_err());
        assert!(GaugeLoop::new(1.0, vec![f64::NAN; 16]).is_err());
    }

    #[test]
    fn identity_transform_is_identity() {
        let a = wiggly_loop(1.0, 64);
        let gt = GaugeTransform::pure_winding(0, 64).unwrap();
        let b = apply_gauge(&a, &gt).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn constant_loop_shifts_by_winding_slope() {
        let t_period = 2.0;
        let a = GaugeLoop::constant(t_period, 0.7, 32).unwrap();
        let gt = GaugeTransform::pure_winding(1, 32).unwrap();
        let b = apply_gauge(&a, &gt).unwrap();
        for s in b.samples() {
            assert!((s - (0.7 + TAU / t_period)).abs() < 1e-14);
        }
    }

    #[test]
    fn holonomy_shift_is_exactly_two_pi_n() {
        let a = wiggly_loop(PI / 3.0, 256);
        for n in [-2i64, -1, 0, 1, 2, 3] {
            let gt = harmonic_transform(n, 256);
            let b = apply_gauge(&a, &gt).unwrap();
            let shift = b.holonomy() - a.holonomy();
            assert!(
                (shift - TAU * n as f64).abs() < 1e-12,
                "N={n}: shift {shift}"
            );
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = wiggly_loop(1.0, 64);
        let gt = GaugeTransform::pure_winding(1, 128).unwrap();
        assert!(matches!(apply_gauge(&a, &gt), Err(CoreError::GridMismatch(_))));
    }

    #[test]
    fn determinant_at_pi_is_two() {
        // Closed form 1 - e^{i pi} = 2; the discretization must converge.
        let det = regularized_determinant(&wiggly_loop(PI, 1024));
        assert!((det - C64::from(2.0)).norm() < 1e-6, "det {det}");
    }

    #[test]
    fn determinant_zero_mode() {
        let zero = GaugeLoop::constant(TAU, 0.0, 64).unwrap();
        assert_eq!(regularized_determinant(&zero), C64::from(0.0));
        // phi = 2 pi: also in the kernel locus.
        let full = GaugeLoop::constant(TAU, 1.0, 64).unwrap();
        assert!(regularized_determinant(&full).norm() < 1e-12);
    }

    #[test]
    fn determinant_convergence_is_monotone() {
        // Loop of limited smoothness (C^2), so the quadrature error is
        // algebraic and visibly decreasing rather than lost in rounding.
        let make = |n: usize| {
            GaugeLoop::from_fn(TAU, n, |t| {
                (PI / 3.0) / TAU + (t / 2.0).sin().abs().powi(3)
            })
            .unwrap()
        };
        // Reference holonomy from a very fine grid.
        let phi_ref = make(1 << 16).holonomy();
        let closed = determinant_closed_form(phi_ref);
        let mut prev = f64::INFINITY;
        for n in [64usize, 128, 256, 512, 1024] {
            let err = (regularized_determinant(&make(n)) - closed).norm();
            assert!(err < prev, "error not decreasing at N_t = {n}: {err} vs {prev}");
            prev = err;
        }
    }

    #[test]
    fn small_gauge_invariance() {
        let a = wiggly_loop(PI / 3.0, 1024);
        let det_a = regularized_determinant(&a);
        for seedish in 1..6 {
            let part: Vec<f64> = (0..1024)
                .map(|j| {
                    let t = j as f64 / 1024.0;
                    0.5 * (TAU * t * seedish as f64).sin() + 0.2 * (TAU * t).cos()
                })
                .collect();
            let gt = GaugeTransform::new(0, part).unwrap();
            let det_b = regularized_determinant(&apply_gauge(&a, &gt).unwrap());
            assert!(
                (det_b - det_a).norm() < 1e-10 * det_a.norm(),
                "relative change {}",
                (det_b - det_a).norm() / det_a.norm()
            );
        }
    }

    #[test]
    fn sign_law_from_branch_tracking() {
        let a = wiggly_loop(PI / 3.0, 1024);
        for n in [-2i64, -1, 1, 2, 3] {
            let gt = harmonic_transform(n, 1024);
            let tracked = branch_tracked_ratio(&a, &gt).unwrap();
            assert_eq!(tracked.measured_winding, n);
            let expected = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!(
                (tracked.ratio - expected).abs() < 1e-8,
                "N={n}: ratio {}",
                tracked.ratio
            );
        }
    }

    #[test]
    fn branch_tracking_rejects_zero_mode() {
        let zero = GaugeLoop::constant(TAU, 0.0, 64).unwrap();
        let gt = GaugeTransform::pure_winding(1, 64).unwrap();
        assert!(matches!(
            branch_tracked_ratio(&zero, &gt),
            Err(CoreError::ZeroMode)
        ));
    }

    #[test]
    fn quantization_iff_table() {
        let a = wiggly_loop(PI / 3.0, 1024);
        let gt = harmonic_transform(1, 1024);
        for nu in [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5] {
            for model in [AnomalyModel::ChiralOscillator, AnomalyModel::Landau] {
                let ratio = anomaly_phase_ratio(&a, &gt, nu, model).unwrap();
                let invariant = (ratio - C64::from(1.0)).norm() < 1e-8;
                let should_be = match model {
                    AnomalyModel::ChiralOscillator => (nu - nu.floor() - 0.5).abs() < 1e-12,
                    AnomalyModel::Landau => (nu - nu.round()).abs() < 1e-12,
                };
                assert_eq!(invariant, should_be, "model {:?} nu {nu}: {ratio}", model);
                // Discretized and closed-form layers agree.
                let cf = anomaly_phase_ratio_closed_form(1, nu, model);
                assert!((ratio - cf).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn lm_ratio_is_product_of_sector_ratios() {
        // The CS-sector determinant carries the same (-1)^N as the CO
        // sector; their product is the Landau ratio.
        let a = wiggly_loop(PI / 3.0, 512);
        let gt = harmonic_transform(1, 512);
        let nu = 0.75;
        let co = anomaly_phase_ratio(&a, &gt, nu, AnomalyModel::ChiralOscillator).unwrap();
        let cs_factor = C64::from(branch_tracked_ratio(&a, &gt).unwrap().ratio);
        let lm = anomaly_phase_ratio(&a, &gt, nu, AnomalyModel::Landau).unwrap();
        assert!((co * cs_factor - lm).norm() < 1e-8);
        // Closed-form layer is exact.
        let co_cf = anomaly_phase_ratio_closed_form(1, nu, AnomalyModel::ChiralOscillator);
        let lm_cf = anomaly_phase_ratio_closed_form(1, nu, AnomalyModel::Landau);
        assert_eq!(co_cf * C64::from(-1.0), lm_cf);
    }

    #[test]
    fn allowed_values_split_by_model() {
        let co = allowed_angular_momenta(AnomalyModel::ChiralOscillator, 0.0, 3.0, Chirality::Both);
        assert_eq!(co, vec![0.5, 1.5, 2.5]);
        let lm = allowed_angular_momenta(AnomalyModel::Landau, -2.0, 2.0, Chirality::Both);
        assert_eq!(lm, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        // Systematically disjoint: integers never meet half-integers.
        let co_wide =
            allowed_angular_momenta(AnomalyModel::ChiralOscillator, -5.0, 5.0, Chirality::Both);
        let lm_wide = allowed_angular_momenta(AnomalyModel::Landau, -5.0, 5.0, Chirality::Both);
        for a in &co_wide {
            assert!(!lm_wide.contains(a));
        }
        // Chirality filter keeps one branch.
        let pos =
            allowed_angular_momenta(AnomalyModel::ChiralOscillator, -3.0, 3.0, Chirality::Positive);
        assert_eq!(pos, vec![0.5, 1.5, 2.5]);
        let neg =
            allowed_angular_momenta(AnomalyModel::ChiralOscillator, -3.0, 3.0, Chirality::Negative);
        assert_eq!(neg, vec![-2.5, -1.5, -0.5]);
    }

    #[test]
    fn report_csv_shape() {
        let rows = vec![AnomalyRow {
            model: AnomalyModel::ChiralOscillator,
            winding: 1,
            nu: 0.5,
            ratio: C64::from(1.0),
        }];
        let csv = anomaly_report_csv(&rows);
        assert!(csv.starts_with("model,N,nu,ratio_re,ratio_im,invariant\nco,1,"));
        assert!(csv.trim_end().ends_with("true"));
    }
}
