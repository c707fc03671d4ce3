//! Check bookkeeping and the `summary.json` schema.

use serde::Serialize;

use chiralab_core::ModelParams;

/// Direction of a numeric check.
#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Cmp {
    /// Passes when `measured <= tolerance`.
    Le,
    /// Passes when `measured >= tolerance`.
    Ge,
}

/// One verified property: what was measured, against what bound, and
/// whether it passed.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub cmp: Cmp,
    pub pass: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            cmp: Cmp::Le,
            pass: measured.is_finite() && measured <= tolerance,
        }
    }

    pub fn ge(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            cmp: Cmp::Ge,
            pass: measured.is_finite() && measured >= tolerance,
        }
    }

    /// Boolean check encoded as 1/0 against a >= 1 bound.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check::ge(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

/// Knob values after defaults, config file and command-line overrides.
#[derive(Debug, Clone, Serialize)]
pub struct KnobReport {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub dim: usize,
    pub thermal_dim: usize,
    pub n_t: usize,
    pub chi_points: usize,
    pub alpha: f64,
    pub mass_scales: Vec<f64>,
}

/// Top-level run report written next to the artifacts.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub rng: String,
    pub params: ModelParams,
    pub knobs: KnobReport,
    pub checks: Vec<Check>,
    /// Operations exercised by this run, sorted.
    pub coverage: Vec<String>,
    /// Operations of the full checklist that this run did not touch; empty
    /// for the `all` scenario when coverage is complete.
    pub coverage_missing: Vec<String>,
    pub all_pass: bool,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// The full operation checklist the `all` scenario must exercise.
pub const ALL_OPS: &[&str] = &[
    "classical.analytic_solution",
    "classical.co_rhs",
    "classical.integrate",
    "classical.lm_rhs",
    "classical.rydberg_limit_study",
    "classical.rydberg_rhs",
    "cli.parse_config",
    "cli.run",
    "duality.compose",
    "duality.decompose",
    "duality.master_rhs",
    "duality.velocity_to_momentum",
    "fock.co_angular_momentum",
    "fock.co_coordinates",
    "fock.co_hamiltonian",
    "fock.cs_angular_momentum",
    "fock.ladder",
    "fock.lm_operators",
    "fock.rotation_operator",
    "fock.thermal_state",
    "gauge.allowed_angular_momenta",
    "gauge.anomaly_phase_ratio",
    "gauge.apply_gauge",
    "gauge.regularized_determinant",
    "interferometer.closed_form_output",
    "interferometer.intensity",
    "interferometer.pancharatnam_phase",
    "interferometer.propagate",
    "interferometer.scan_and_fit",
];
