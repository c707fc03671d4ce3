//! Model parameters and model tags: the single source of parameter truth.

use serde::Serialize;

use crate::error::{CoreError, Result};

/// Which planar model a state or trajectory belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Landau model: free planar particle in a uniform magnetic field,
    /// second order, kinetic term plus a `-(g/2) eps_ij x_i xdot_j` term.
    Landau,
    /// Chiral oscillator: first order, `+(g/2) eps_ij x_i xdot_j` plus a
    /// harmonic well. Half the phase space of the Landau model.
    ChiralOscillator,
    /// Restricted planar dipole: kinetic term, `+(g/2)` Chern-Simons term
    /// and harmonic well together.
    Rydberg,
    /// Master system in the auxiliary variable `y`; interpolates between
    /// the other two (see `duality::master_rhs`).
    Master,
}

impl ModelKind {
    pub fn requires_velocity(self) -> bool {
        !matches!(self, ModelKind::ChiralOscillator)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Landau => "lm",
            ModelKind::ChiralOscillator => "co",
            ModelKind::Rydberg => "rydberg",
            ModelKind::Master => "master",
        }
    }
}

/// Physical constants of the model family.
///
/// `cs_sign` flips the Chern-Simons term of every Lagrangian relative to its
/// written sign (`+1` keeps the written signs; the Landau model carries
/// `-(g/2) eps x xdot`, the chiral oscillator and the restricted dipole carry
/// `+(g/2) eps x xdot`). It exists so that tests can exercise both
/// orientations; everything defaults to `+1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelParams {
    /// Mass.
    pub m: f64,
    /// Chern-Simons / magnetic coupling.
    pub g: f64,
    /// Harmonic strength.
    pub k: f64,
    /// Action scale; enters only the quantum modules.
    pub hbar: f64,
    /// Chern-Simons orientation flag, `+1` or `-1`.
    pub cs_sign: f64,
}

impl ModelParams {
    /// Strictly positive `m`, `g`, `k`; `hbar = 1`, written CS signs.
    pub fn new(m: f64, g: f64, k: f64) -> Result<Self> {
        let p = ModelParams { m, g, k, hbar: 1.0, cs_sign: 1.0 };
        p.validate()?;
        Ok(p)
    }

    /// Duality-tuned constructor: `k = g^2 / m`, so both frequencies agree.
    pub fn tuned(m: f64, g: f64) -> Result<Self> {
        Self::new(m, g, g * g / m)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_cs_sign(mut self, cs_sign: f64) -> Result<Self> {
        self.cs_sign = cs_sign;
        self.validate()?;
        Ok(self)
    }

    /// Bypasses the positivity checks. Limit studies (`g -> 0`, `k -> 0`)
    /// need parameter values the constructors reject.
    pub fn unchecked(m: f64, g: f64, k: f64, hbar: f64, cs_sign: f64) -> Self {
        ModelParams { m, g, k, hbar, cs_sign }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("g", self.g), ("k", self.k), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CoreError::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.cs_sign != 1.0 && self.cs_sign != -1.0 {
            return Err(CoreError::InvalidParams(format!(
                "cs_sign must be +1 or -1, got {}",
                self.cs_sign
            )));
        }
        Ok(())
    }

    /// Landau (cyclotron) frequency `g / m`.
    pub fn omega_lm(&self) -> f64 {
        self.g / self.m
    }

    /// Chiral-oscillator frequency `k / g`.
    pub fn omega_co(&self) -> f64 {
        self.k / self.g
    }

    /// True iff `|g^2 - k m| <= rel_tol * k m`, i.e. both frequencies agree.
    pub fn duality_tuned(&self, rel_tol: f64) -> bool {
        (self.g * self.g - self.k * self.m).abs() <= rel_tol * self.k * self.m
    }

    /// [`ModelParams::duality_tuned`] at the default tolerance `1e-12`.
    pub fn is_duality_tuned(&self) -> bool {
        self.duality_tuned(1e-12)
    }

    /// Fundamental period of the given model.
    ///
    /// For the restricted dipole this is the period of its fastest circular
    /// mode, which is what a fixed-step integrator must resolve.
    pub fn period(&self, model: ModelKind) -> f64 {
        use std::f64::consts::TAU;
        match model {
            ModelKind::Landau => TAU / self.omega_lm(),
            ModelKind::ChiralOscillator | ModelKind::Master => TAU / self.omega_co(),
            ModelKind::Rydberg => {
                let (lo, hi) = self.rydberg_mode_frequencies();
                TAU / lo.max(hi)
            }
        }
    }

    /// Angular frequencies `|Omega|` of the two circular normal modes of the
    /// restricted dipole model, `m Omega^2 + cs g Omega - k = 0`, returned as
    /// (slow, fast).
    pub fn rydberg_mode_frequencies(&self) -> (f64, f64) {
        let disc = (self.g * self.g + 4.0 * self.k * self.m).sqrt();
        let slow = (disc - self.g) / (2.0 * self.m);
        let fast = (disc + self.g) / (2.0 * self.m);
        (slow, fast)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuned_params_match_frequencies() {
        let p = ModelParams::tuned(1.0, 2.0).unwrap();
        assert!(p.is_duality_tuned());
        assert!((p.omega_lm() - p.omega_co()).abs() < 1e-15);
        assert_eq!(p.k, 4.0);
    }

    #[test]
    fn detuned_params_flagged() {
        let p = ModelParams::new(1.0, 2.0, 4.1).unwrap();
        assert!(!p.is_duality_tuned());
    }

    #[test]
    fn positivity_enforced() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0).unwrap().with_cs_sign(0.5).is_err());
    }

    #[test]
    fn rydberg_modes_solve_characteristic_polynomial() {
        let p = ModelParams::new(0.7, 1.3, 2.9).unwrap();
        let (slow, fast) = p.rydberg_mode_frequencies();
        // Roots of m w^2 + g w - k with signs attached: +slow and -fast.
        for omega in [slow, -fast] {
            let r = p.m * omega * omega + p.g * omega - p.k;
            assert!(r.abs() < 1e-12, "residual {r}");
        }
        assert!(slow > 0.0 && fast >= slow);
    }
}
