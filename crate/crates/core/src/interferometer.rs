//! Mach-Zehnder propagation of a path (x) internal density matrix, fringe
//! scans, and Pancharatnam phase extraction.
//!
//! The beam pair spans a fixed two-dimensional path space with basis
//! `|0>, |1>` (index 0 is port 0). The frozen optical conventions are
//!
//! ```text
//! U_B = (1/sqrt 2) [[1, 1], [1, -1]]        U_M = [[0, 1], [1, 0]]
//! U   = [[0,0],[0,1]] (x) U_i  +  e^{i chi} [[1,0],[0,0]] (x) 1
//! ```
//!
//! with mirrors and splitters acting as the identity on the internal
//! space. Chaining `U_B U_M U U_B` on `|0><0| (x) rho` reproduces, term for
//! term, the four-matrix closed form
//!
//! ```text
//! rho_out = 1/4 [ [[1,1],[1,1]]   (x) U_i rho U_i^dag
//!               + [[1,-1],[-1,1]] (x) rho
//!               + e^{+i chi} [[1,1],[-1,-1]] (x) rho U_i^dag
//!               + e^{-i chi} [[1,-1],[1,-1]] (x) U_i rho ]
//! ```
//!
//! and the port-0 intensity law
//! `I = (1/2)[1 + |Tr(U_i rho)| cos(chi - arg Tr(U_i rho))]`. The 1/2 makes
//! the intensity a probability: it averages to 1/2 over a fringe and equals
//! 1 at the fully constructive setting. Both routes are kept and compared
//! against each other as a permanent regression.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::Serialize;

use crate::csvfmt::{build_csv, fmt_f64};
use crate::error::{CoreError, Result};
use crate::fock::{OperatorMatrix, QuantumState};
use crate::C64;

use std::f64::consts::{PI, TAU};

/// Output port of the final beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathPort {
    Zero,
    One,
}

/// Relative phase plus the internal-arm unitary.
#[derive(Debug, Clone)]
pub struct InterferometerConfig {
    pub chi: f64,
    internal: OperatorMatrix,
}

impl InterferometerConfig {
    pub fn new(chi: f64, internal: OperatorMatrix) -> Result<Self> {
        if !chi.is_finite() {
            return Err(CoreError::InvalidParams("chi must be finite".into()));
        }
        let u_err = internal.unitarity_error();
        if u_err > 1e-12 {
            return Err(CoreError::InvalidParams(format!(
                "internal operator is not unitary: max |U U^dag - 1| = {u_err:.3e}"
            )));
        }
        Ok(InterferometerConfig { chi, internal })
    }

    pub fn internal(&self) -> &OperatorMatrix {
        &self.internal
    }
}

fn path2(entries: [f64; 4]) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &entries.map(C64::from))
}

fn kron_path(path: &DMatrix<C64>, internal: &DMatrix<C64>) -> DMatrix<C64> {
    path.kronecker(internal)
}

fn check_dims(rho: &QuantumState, cfg: &InterferometerConfig) -> Result<usize> {
    let d = rho.dim();
    if cfg.internal.dim() != d {
        return Err(CoreError::DimensionMismatch(format!(
            "internal unitary dim {} vs state dim {}",
            cfg.internal.dim(),
            d
        )));
    }
    Ok(d)
}

/// Full operator-product propagation of `|0><0| (x) rho` through splitter,
/// arm operators, mirrors and the recombining splitter.
pub fn propagate(rho: &QuantumState, cfg: &InterferometerConfig) -> Result<DMatrix<C64>> {
    let d = check_dims(rho, cfg)?;
    let id = DMatrix::<C64>::identity(d, d);
    let sq = 1.0 / 2.0_f64.sqrt();

    let u_b = kron_path(&path2([sq, sq, sq, -sq]), &id);
    let u_m = kron_path(&path2([0.0, 1.0, 1.0, 0.0]), &id);
    let u_arms = kron_path(&path2([0.0, 0.0, 0.0, 1.0]), cfg.internal.entries())
        + kron_path(&path2([1.0, 0.0, 0.0, 0.0]), &id) * C64::from_polar(1.0, cfg.chi);

    let chain = &u_b * u_m * u_arms * &u_b;
    let rho_in = kron_path(&path2([1.0, 0.0, 0.0, 0.0]), rho.density());
    Ok(&chain * rho_in * chain.adjoint())
}

/// The four internal-space blocks every output state is assembled from.
struct OutputParts {
    rotated: DMatrix<C64>,  // U rho U^dag
    plain: DMatrix<C64>,    // rho
    bra_side: DMatrix<C64>, // rho U^dag
    ket_side: DMatrix<C64>, // U rho
}

fn output_parts(rho: &QuantumState, internal: &OperatorMatrix) -> OutputParts {
    let u = internal.entries();
    let udag = u.adjoint();
    let ket_side = u * rho.density();
    OutputParts {
        rotated: &ket_side * &udag,
        plain: rho.density().clone(),
        bra_side: rho.density() * &udag,
        ket_side,
    }
}

fn assemble_output(parts: &OutputParts, chi: f64) -> DMatrix<C64> {
    let quarter = C64::from(0.25);
    let e_plus = C64::from_polar(1.0, chi);
    let e_minus = C64::from_polar(1.0, -chi);
    (kron_path(&path2([1.0, 1.0, 1.0, 1.0]), &parts.rotated)
        + kron_path(&path2([1.0, -1.0, -1.0, 1.0]), &parts.plain)
        + kron_path(&path2([1.0, 1.0, -1.0, -1.0]), &parts.bra_side) * e_plus
        + kron_path(&path2([1.0, -1.0, 1.0, -1.0]), &parts.ket_side) * e_minus)
        * quarter
}

/// Literal transcription of the four-matrix closed form; the independent
/// oracle for [`propagate`].
pub fn closed_form_output(rho: &QuantumState, cfg: &InterferometerConfig) -> Result<DMatrix<C64>> {
    check_dims(rho, cfg)?;
    Ok(assemble_output(&output_parts(rho, &cfg.internal), cfg.chi))
}

/// Output intensity on one port: `Tr[(|p><p| (x) 1) rho_out]`.
pub fn intensity(rho_out: &DMatrix<C64>, port: PathPort) -> Result<f64> {
    let rows = rho_out.nrows();
    if !rows.is_multiple_of(2) || rows != rho_out.ncols() || rows == 0 {
        return Err(CoreError::DimensionMismatch(format!(
            "output state must be square over path (x) internal, got {rows}x{}",
            rho_out.ncols()
        )));
    }
    let d = rows / 2;
    let offset = match port {
        PathPort::Zero => 0,
        PathPort::One => d,
    };
    Ok((0..d).map(|i| rho_out[(offset + i, offset + i)].re).sum())
}

/// Intensity rescaled by the reference configuration (`U_i = 1`,
/// `chi = 0`), which with these conventions is already the unit
/// probability; the division is computed, not assumed.
pub fn normalized_intensity(
    rho_out: &DMatrix<C64>,
    port: PathPort,
    rho_internal: &QuantumState,
) -> Result<f64> {
    let reference_cfg = InterferometerConfig::new(
        0.0,
        OperatorMatrix::identity(*rho_internal.basis()),
    )?;
    let reference = intensity(&propagate(rho_internal, &reference_cfg)?, PathPort::Zero)?;
    Ok(intensity(rho_out, port)? / reference)
}

/// Folds a phase into `(-pi, pi]`, sending the `-pi` branch point to `+pi`.
pub fn fold_phase(xi: f64) -> f64 {
    let mut x = xi.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    if x <= -PI + 1e-12 {
        x += TAU;
    }
    x
}

/// Continuity-based unwrapping of a phase sequence: consecutive values are
/// shifted by multiples of 2 pi to stay within pi of each other.
pub fn unwrap_phases(raw: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(raw.len());
    for &xi in raw {
        let unwrapped = match out.last() {
            None => xi,
            Some(&prev) => xi + TAU * ((prev - xi) / TAU).round(),
        };
        out.push(unwrapped);
    }
    out
}

/// Visibility and Pancharatnam phase `(V, xi) = polar(Tr(U rho))`.
///
/// Errors out when the trace magnitude is below `1e-12`: the rotated state
/// is then orthogonal to the original and no relative phase exists.
pub fn pancharatnam_phase(u: &OperatorMatrix, rho: &QuantumState) -> Result<(f64, f64)> {
    if u.basis() != rho.basis() {
        return Err(CoreError::DimensionMismatch(format!(
            "unitary basis {:?} vs state basis {:?}",
            u.basis(),
            rho.basis()
        )));
    }
    let d = rho.dim();
    let mut tr = C64::from(0.0);
    for i in 0..d {
        for j in 0..d {
            tr += u.entries()[(i, j)] * rho.density()[(j, i)];
        }
    }
    let v = tr.norm();
    if v < 1e-12 {
        return Err(CoreError::UndefinedPhase(v));
    }
    Ok((v, fold_phase(tr.arg())))
}

/// A sampled fringe plus its sinusoid fit `I = A [1 + V cos(chi - xi)]`.
#[derive(Debug, Clone)]
pub struct Interferogram {
    pub chi_grid: Vec<f64>,
    pub intensities: Vec<f64>,
    pub baseline: f64,
    pub visibility: f64,
    /// `None` when the fringe amplitude is consistent with zero and the
    /// phase is therefore meaningless.
    pub xi: Option<f64>,
    /// Root-mean-square misfit of the model on the grid.
    pub residual: f64,
}

impl Interferogram {
    /// CSV export: `chi,intensity`.
    pub fn to_csv(&self) -> String {
        build_csv(
            "chi,intensity",
            self.chi_grid
                .iter()
                .zip(&self.intensities)
                .map(|(chi, i)| vec![fmt_f64(*chi), fmt_f64(*i)]),
        )
    }

    pub fn fit_summary(&self, alpha: Option<f64>, model: Option<&str>) -> FitSummary {
        FitSummary {
            a: self.baseline,
            v: self.visibility,
            xi: self.xi,
            residual: self.residual,
            alpha,
            model: model.map(str::to_owned),
        }
    }
}

/// JSON summary of one fringe fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub xi: Option<f64>,
    pub residual: f64,
    pub alpha: Option<f64>,
    pub model: Option<String>,
}

impl FitSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Scans the phase over `chi_grid`, simulates the output intensity on port
/// 0, and fits the fringe by exact linear least squares on
/// `I = c0 + c1 cos chi + c2 sin chi`.
///
/// The grid must hold at least 8 points spanning at least 2 pi.
pub fn scan_and_fit(
    rho: &QuantumState,
    u: &OperatorMatrix,
    chi_grid: &[f64],
) -> Result<Interferogram> {
    if chi_grid.len() < 8 {
        return Err(CoreError::DegenerateGrid(format!(
            "need at least 8 phase samples, got {}",
            chi_grid.len()
        )));
    }
    if chi_grid.iter().any(|c| !c.is_finite()) {
        return Err(CoreError::DegenerateGrid("non-finite phase sample".into()));
    }
    let span = chi_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - chi_grid.iter().copied().fold(f64::INFINITY, f64::min);
    if span < TAU - 1e-9 {
        return Err(CoreError::DegenerateGrid(format!(
            "grid spans {span:.6}, need at least 2 pi"
        )));
    }
    if u.basis() != rho.basis() {
        return Err(CoreError::DimensionMismatch(format!(
            "unitary basis {:?} vs state basis {:?}",
            u.basis(),
            rho.basis()
        )));
    }

    // The chi-independent blocks are shared by the whole scan.
    let parts = output_parts(rho, u);
    let intensities: Vec<f64> = chi_grid
        .iter()
        .map(|&chi| intensity(&assemble_output(&parts, chi), PathPort::Zero))
        .collect::<Result<_>>()?;

    // Normal equations for (c0, c1, c2).
    let mut m = Matrix3::<f64>::zeros();
    let mut b = Vector3::<f64>::zeros();
    for (&chi, &i_val) in chi_grid.iter().zip(&intensities) {
        let row = Vector3::new(1.0, chi.cos(), chi.sin());
        m += row * row.transpose();
        b += row * i_val;
    }
    let c = m.lu().solve(&b).ok_or_else(|| {
        CoreError::DegenerateGrid("normal equations are singular".into())
    })?;

    let baseline = c[0];
    if !(baseline.is_finite() && baseline > 0.0) {
        return Err(CoreError::DegenerateGrid(format!(
            "fitted baseline {baseline} is not positive"
        )));
    }
    let amplitude = c[1].hypot(c[2]);
    let visibility = amplitude / baseline;
    let xi = if visibility < 1e-9 {
        None
    } else {
        Some(fold_phase(c[2].atan2(c[1])))
    };
    let residual = (chi_grid
        .iter()
        .zip(&intensities)
        .map(|(&chi, &i_val)| {
            let fit = c[0] + c[1] * chi.cos() + c[2] * chi.sin();
            (fit - i_val).powi(2)
        })
        .sum::<f64>()
        / chi_grid.len() as f64)
        .sqrt();

    Ok(Interferogram {
        chi_grid: chi_grid.to_vec(),
        intensities,
        baseline,
        visibility,
        xi,
        residual,
    })
}

/// Uniform scan grid of `n` points covering `[0, 2 pi]` inclusive.
pub fn uniform_chi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / (n - 1) as f64).collect()
}
