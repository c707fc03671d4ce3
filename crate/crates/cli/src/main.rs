//! `chiralab` scenario runner: parses a config, runs named experiments end
//! to end, writes CSV/JSON artifacts plus `summary.json`, and exits 0 only
//! when every checked property passes.
//!
//! Exit codes: 0 all checks pass, 1 validation failure, 2 I/O failure,
//! 3 one or more property checks failed.

mod checks;
mod config;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use checks::{Check, KnobReport, Summary, ALL_OPS};
use config::{apply_config_str, validate, Knobs, Scenario, KNOB_HELP};
use scenarios::run_scenario;

#[derive(Parser)]
#[command(
    name = "chiralab",
    version,
    about = "Numerical experiments on the planar Landau model / chiral oscillator pair",
    after_help = KNOB_HELP
)]
struct Cli {
    /// List the available scenarios and exit.
    #[arg(long)]
    list_scenarios: bool,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario (or `all`) and write its artifacts.
    #[command(after_help = KNOB_HELP)]
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario name; see --list-scenarios.
    #[arg(long)]
    scenario: String,

    /// Flat key=value config file (flags override file values).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Artifact directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for the randomized suites.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    cs_sign: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    thermal_dim: Option<usize>,
    #[arg(long)]
    n_t: Option<usize>,
    #[arg(long)]
    chi_points: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated mass multipliers for the reduction study.
    #[arg(long, value_delimiter = ',')]
    mass_scales: Option<Vec<f64>>,
}

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_PROPERTY: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if cli.list_scenarios {
        println!("Available scenarios:");
        for name in Scenario::NAMES {
            println!("  {name}");
        }
        return ExitCode::from(EXIT_OK);
    }

    match cli.command {
        Some(Cmd::Run(args)) => run(args),
        None => {
            eprintln!("nothing to do: pass `run --scenario NAME` or `--list-scenarios`");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn run(args: RunArgs) -> ExitCode {
    // Defaults, then the config file, then command-line overrides. The
    // parser runs even without a file so the empty document exercises the
    // same path.
    let mut knobs = Knobs::default();
    let config_text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("cannot read config {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
        },
        None => String::new(),
    };
    if let Err(e) = apply_config_str(&mut knobs, &config_text) {
        eprintln!("config error: {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }

    knobs.scenario = match args.scenario.parse::<Scenario>() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    if let Some(v) = args.out {
        knobs.out = v;
    }
    if let Some(v) = args.seed {
        knobs.seed = v;
    }
    if let Some(v) = args.m {
        knobs.m = v;
    }
    if let Some(v) = args.g {
        knobs.g = v;
    }
    if let Some(v) = args.k {
        knobs.k = v;
    }
    if let Some(v) = args.hbar {
        knobs.hbar = v;
    }
    if let Some(v) = args.cs_sign {
        knobs.cs_sign = v;
    }
    if let Some(v) = args.dt {
        knobs.dt = Some(v);
    }
    if let Some(v) = args.t_end {
        knobs.t_end = Some(v);
    }
    if let Some(v) = args.dim {
        knobs.dim = v;
    }
    if let Some(v) = args.thermal_dim {
        knobs.thermal_dim = v;
    }
    if let Some(v) = args.n_t {
        knobs.n_t = v;
    }
    if let Some(v) = args.chi_points {
        knobs.chi_points = v;
    }
    if let Some(v) = args.alpha {
        knobs.alpha = v;
    }
    if let Some(v) = args.mass_scales {
        knobs.mass_scales = v;
    }

    let validated = match validate(knobs) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("validation error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let knobs = validated.knobs;
    let params = validated.params;

    let mut output = match run_scenario(knobs.scenario, &params, &knobs) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("scenario aborted: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    output.ops.insert("cli.run");
    output.ops.insert("cli.parse_config");

    // Coverage bookkeeping; completeness is itself a checked property of
    // the `all` scenario.
    let coverage: Vec<String> = output.ops.iter().map(|s| s.to_string()).collect();
    let coverage_missing: Vec<String> = if knobs.scenario == Scenario::All {
        ALL_OPS
            .iter()
            .filter(|op| !output.ops.contains(**op))
            .map(|s| s.to_string())
            .collect()
    } else {
        Vec::new()
    };
    if knobs.scenario == Scenario::All {
        output
            .checks
            .push(Check::flag("cli.coverage_complete", coverage_missing.is_empty()));
    }

    let all_pass = output.checks.iter().all(|c| c.pass);
    let summary = Summary {
        schema_version: 1,
        scenario: knobs.scenario.name().to_string(),
        seed: knobs.seed,
        rng: "chacha8".to_string(),
        params,
        knobs: KnobReport {
            dt: knobs.dt,
            t_end: knobs.t_end,
            dim: knobs.dim,
            thermal_dim: knobs.thermal_dim,
            n_t: knobs.n_t,
            chi_points: knobs.chi_points,
            alpha: knobs.alpha,
            mass_scales: knobs.mass_scales.clone(),
        },
        checks: output.checks,
        coverage,
        coverage_missing,
        all_pass,
    };

    if let Err(e) = std::fs::create_dir_all(&knobs.out) {
        eprintln!("cannot create output directory {}: {e}", knobs.out.display());
        return ExitCode::from(EXIT_IO);
    }
    for (name, contents) in &output.artifacts {
        if let Err(e) = std::fs::write(knobs.out.join(name), contents) {
            eprintln!("cannot write artifact {name}: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }
    if let Err(e) = std::fs::write(knobs.out.join("summary.json"), summary.to_json()) {
        eprintln!("cannot write summary.json: {e}");
        return ExitCode::from(EXIT_IO);
    }

    for c in &summary.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        let op = match c.cmp {
            checks::Cmp::Le => "<=",
            checks::Cmp::Ge => ">=",
        };
        println!(
            "{verdict}  {:<55} measured {: >12.5e}  want {op} {:.1e}",
            c.name, c.measured, c.tolerance
        );
    }
    let failed = summary.checks.iter().filter(|c| !c.pass).count();
    println!(
        "{}: {} checks, {} failed; artifacts in {}",
        summary.scenario,
        summary.checks.len(),
        failed,
        knobs.out.display()
    );

    if all_pass {
        ExitCode::from(EXIT_OK)
    } else {
        ExitCode::from(EXIT_PROPERTY)
    }
}
