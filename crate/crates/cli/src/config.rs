//! Scenario configuration: defaults, the flat key=value config file, and
//! knob validation against the module preconditions.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use chiralab_core::{ModelKind, ModelParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(
        "unknown scenario '{0}'; valid scenarios: classical-duality, master-reduction, \
         spectra, anomaly, interferometer, rydberg-limit, all"
    )]
    UnknownScenario(String),
    #[error("unknown config keys: {0}; valid keys: {1}")]
    UnknownKeys(String, String),
    #[error("invalid value for knob {key}: {message}")]
    BadValue { key: &'static str, message: String },
}

/// The named experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    ClassicalDuality,
    MasterReduction,
    Spectra,
    Anomaly,
    Interferometer,
    RydbergLimit,
    All,
}

impl Scenario {
    pub const NAMES: [&'static str; 7] = [
        "classical-duality",
        "master-reduction",
        "spectra",
        "anomaly",
        "interferometer",
        "rydberg-limit",
        "all",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ClassicalDuality => "classical-duality",
            Scenario::MasterReduction => "master-reduction",
            Scenario::Spectra => "spectra",
            Scenario::Anomaly => "anomaly",
            Scenario::Interferometer => "interferometer",
            Scenario::RydbergLimit => "rydberg-limit",
            Scenario::All => "all",
        }
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "classical-duality" => Ok(Scenario::ClassicalDuality),
            "master-reduction" => Ok(Scenario::MasterReduction),
            "spectra" => Ok(Scenario::Spectra),
            "anomaly" => Ok(Scenario::Anomaly),
            "interferometer" => Ok(Scenario::Interferometer),
            "rydberg-limit" => Ok(Scenario::RydbergLimit),
            "all" => Ok(Scenario::All),
            other => Err(ConfigError::UnknownScenario(other.to_string())),
        }
    }
}

/// Every tunable knob. Optional fields fall back to scenario-derived
/// defaults at run time.
#[derive(Debug, Clone)]
pub struct Knobs {
    pub scenario: Scenario,
    pub m: f64,
    pub g: f64,
    pub k: f64,
    pub hbar: f64,
    pub cs_sign: f64,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub dim: usize,
    pub thermal_dim: usize,
    pub n_t: usize,
    pub chi_points: usize,
    pub alpha: f64,
    pub mass_scales: Vec<f64>,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for Knobs {
    fn default() -> Self {
        Knobs {
            scenario: Scenario::All,
            m: 1.0,
            g: 2.0,
            k: 4.0,
            hbar: 1.0,
            cs_sign: 1.0,
            dt: None,
            t_end: None,
            dim: 32,
            thermal_dim: 128,
            n_t: 1024,
            chi_points: 64,
            alpha: TAU,
            mass_scales: vec![1.0, 0.1, 0.01, 0.001],
            out: PathBuf::from("chiralab-out"),
            seed: 42,
        }
    }
}

/// The documented knob table printed by `--help`.
pub const KNOB_HELP: &str = "\
Config file: flat `key = value` lines; `#` starts a comment; unknown keys are rejected.
Command-line flags override file values, which override the defaults below.

  key          default              meaning
  scenario     all                  one of: classical-duality, master-reduction, spectra,
                                    anomaly, interferometer, rydberg-limit, all
  m            1                    mass (> 0)
  g            2                    Chern-Simons/magnetic coupling (> 0)
  k            4                    harmonic strength (> 0); defaults satisfy g^2 = k m
  hbar         1                    action scale (> 0)
  cs_sign      1                    +1 keeps the written Chern-Simons signs, -1 flips them
  dt           period/10000         integrator step; must stay below period/10
  t_end        10 periods           integration horizon
  dim          32                   Fock truncation for spectra and fringe scans (>= 4)
  thermal_dim  128                  Fock truncation for thermal states (>= 64)
  n_t          1024                 samples on the gauge time circle (>= 8)
  chi_points   64                   fringe-scan phase samples (>= 8)
  alpha        6.283185307179586    internal rotation angle for the fringe artifacts
  mass_scales  1,0.1,0.01,0.001     mass multipliers for the slow-atom reduction study
  out          chiralab-out         artifact directory
  seed         42                   seed of the ChaCha8 generator used by randomized suites
";

fn parse_knob<T: FromStr>(key: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| ConfigError::BadValue {
        key,
        message: format!("'{value}': {e}"),
    })
}

fn parse_mass_scales(value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(|s| parse_knob::<f64>("mass_scales", s))
        .collect()
}

/// Applies a flat key=value document on top of existing knobs. Unknown keys
/// are an error listing every offender; later lines win over earlier ones.
pub fn apply_config_str(knobs: &mut Knobs, text: &str) -> Result<(), ConfigError> {
    const VALID: [&str; 16] = [
        "scenario", "m", "g", "k", "hbar", "cs_sign", "dt", "t_end", "dim", "thermal_dim",
        "n_t", "chi_points", "alpha", "mass_scales", "out", "seed",
    ];
    let mut unknown = BTreeSet::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            unknown.insert(line.to_string());
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "scenario" => knobs.scenario = value.parse()?,
            "m" => knobs.m = parse_knob("m", value)?,
            "g" => knobs.g = parse_knob("g", value)?,
            "k" => knobs.k = parse_knob("k", value)?,
            "hbar" => knobs.hbar = parse_knob("hbar", value)?,
            "cs_sign" => knobs.cs_sign = parse_knob("cs_sign", value)?,
            "dt" => knobs.dt = Some(parse_knob("dt", value)?),
            "t_end" => knobs.t_end = Some(parse_knob("t_end", value)?),
            "dim" => knobs.dim = parse_knob("dim", value)?,
            "thermal_dim" => knobs.thermal_dim = parse_knob("thermal_dim", value)?,
            "n_t" => knobs.n_t = parse_knob("n_t", value)?,
            "chi_points" => knobs.chi_points = parse_knob("chi_points", value)?,
            "alpha" => knobs.alpha = parse_knob("alpha", value)?,
            "mass_scales" => knobs.mass_scales = parse_mass_scales(value)?,
            "out" => knobs.out = PathBuf::from(value),
            "seed" => knobs.seed = parse_knob("seed", value)?,
            other => {
                unknown.insert(other.to_string());
            }
        }
    }
    if !unknown.is_empty() {
        let offenders: Vec<String> = unknown.into_iter().collect();
        return Err(ConfigError::UnknownKeys(offenders.join(", "), VALID.join(", ")));
    }
    Ok(())
}

/// Validated parameters plus the knobs they came from.
#[derive(Debug)]
pub struct Validated {
    pub knobs: Knobs,
    pub params: ModelParams,
}

/// Checks every knob against the preconditions of the modules the scenario
/// will call, before any computation happens.
pub fn validate(knobs: Knobs) -> Result<Validated, ConfigError> {
    let params = ModelParams::new(knobs.m, knobs.g, knobs.k)
        .and_then(|p| p.with_hbar(knobs.hbar))
        .and_then(|p| p.with_cs_sign(knobs.cs_sign))
        .map_err(|e| ConfigError::BadValue { key: "m/g/k/hbar/cs_sign", message: e.to_string() })?;

    if knobs.dim < 4 {
        return Err(ConfigError::BadValue {
            key: "dim",
            message: format!("{} is below 4; the trusted spectrum would be empty", knobs.dim),
        });
    }
    if knobs.thermal_dim < 64 {
        return Err(ConfigError::BadValue {
            key: "thermal_dim",
            message: format!(
                "{} is below 64; thermal tails down to beta hbar omega = 0.5 need the room",
                knobs.thermal_dim
            ),
        });
    }
    if knobs.n_t < 8 {
        return Err(ConfigError::BadValue {
            key: "n_t",
            message: format!("{} is below the 8-sample minimum of the time circle", knobs.n_t),
        });
    }
    if knobs.chi_points < 8 {
        return Err(ConfigError::BadValue {
            key: "chi_points",
            message: format!("{} is below the 8-point minimum of a fringe scan", knobs.chi_points),
        });
    }
    if !knobs.alpha.is_finite() {
        return Err(ConfigError::BadValue {
            key: "alpha",
            message: "must be finite".into(),
        });
    }
    if knobs.mass_scales.is_empty() {
        return Err(ConfigError::BadValue {
            key: "mass_scales",
            message: "must not be empty".into(),
        });
    }
    if let Some(bad) = knobs.mass_scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(ConfigError::BadValue {
            key: "mass_scales",
            message: format!("every scale must be finite and > 0, got {bad}"),
        });
    }

    if let Some(dt) = knobs.dt {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ConfigError::BadValue {
                key: "dt",
                message: format!("must be finite and > 0, got {dt}"),
            });
        }
        // The step must resolve the fastest motion the scenario integrates.
        let limit = fastest_period(&params, &knobs) / 10.0;
        if dt >= limit {
            return Err(ConfigError::BadValue {
                key: "dt",
                message: format!("{dt:.6e} is not below period/10 = {limit:.6e}"),
            });
        }
    }
    if let Some(t_end) = knobs.t_end {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(ConfigError::BadValue {
                key: "t_end",
                message: format!("must be finite and > 0, got {t_end}"),
            });
        }
    }

    Ok(Validated { knobs, params })
}

fn fastest_period(params: &ModelParams, knobs: &Knobs) -> f64 {
    let classical = params
        .period(ModelKind::Landau)
        .min(params.period(ModelKind::ChiralOscillator));
    match knobs.scenario {
        Scenario::ClassicalDuality => classical,
        Scenario::MasterReduction => params.period(ModelKind::Master),
        Scenario::RydbergLimit | Scenario::All => {
            let min_scale = knobs
                .mass_scales
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let smallest =
                ModelParams::unchecked(params.m * min_scale, params.g, params.k, params.hbar, params.cs_sign);
            classical.min(smallest.period(ModelKind::Rydberg))
        }
        // The remaining scenarios never integrate in time.
        _ => classical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_keeps_defaults() {
        let mut knobs = Knobs::default();
        apply_config_str(&mut knobs, "").unwrap();
        assert_eq!(knobs.seed, 42);
        assert_eq!(knobs.dim, 32);
        assert!(knobs.dt.is_none());
        let v = validate(knobs).unwrap();
        assert!(v.params.is_duality_tuned());
    }

    #[test]
    fn tuned_arithmetic_from_file() {
        let mut knobs = Knobs::default();
        apply_config_str(&mut knobs, "g = 2\nk = 4\nm = 1\n").unwrap();
        let v = validate(knobs).unwrap();
        assert!(v.params.is_duality_tuned());
    }

    #[test]
    fn unknown_keys_all_reported() {
        let mut knobs = Knobs::default();
        let err = apply_config_str(&mut knobs, "zeta = 1\nm = 2\nxi_target = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("zeta") && msg.contains("xi_target"), "{msg}");
        // The valid key list is part of the message.
        assert!(msg.contains("mass_scales"));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let mut knobs = Knobs::default();
        apply_config_str(&mut knobs, "# comment\n\n; also comment\nseed = 7\n").unwrap();
        assert_eq!(knobs.seed, 7);
    }

    #[test]
    fn oversized_dt_names_the_knob() {
        // Period is pi for the defaults; period/10 is ~0.314.
        let knobs = Knobs {
            scenario: Scenario::ClassicalDuality,
            dt: Some(0.5),
            ..Knobs::default()
        };
        let err = validate(knobs).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dt"), "{msg}");
        assert!(msg.contains("period/10"), "{msg}");
    }

    #[test]
    fn scenario_names_round_trip() {
        for name in Scenario::NAMES {
            assert_eq!(name.parse::<Scenario>().unwrap().name(), name);
        }
        let err = "spectrum".parse::<Scenario>().unwrap_err();
        assert!(err.to_string().contains("classical-duality"));
    }

    #[test]
    fn mass_scale_list_parsing() {
        let mut knobs = Knobs::default();
        apply_config_str(&mut knobs, "mass_scales = 1, 0.5, 0.25\n").unwrap();
        assert_eq!(knobs.mass_scales, vec![1.0, 0.5, 0.25]);
        assert!(apply_config_str(&mut knobs, "mass_scales = 1,zebra\n").is_err());
    }

    #[test]
    fn bad_parameter_values_rejected() {
        assert!(validate(Knobs { m: -1.0, ..Knobs::default() }).is_err());
        assert!(validate(Knobs { dim: 2, ..Knobs::default() }).is_err());
        assert!(validate(Knobs { mass_scales: vec![], ..Knobs::default() }).is_err());
    }
}
