//! Command-line harness: configuration, the `predict`, `simulate`, `classify`,
//! `verify-order`, `sweep` and `floquet` commands, and their output files.
//!
//! Every command writes `<command>.manifest.json` next to its outputs. Exit codes:
//! 0 success, 2 configuration or I/O error, 3 numerical failure, 4 degenerate model.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bifurcation::BifurcationError;
use crate::dynamics::DynamicsError;
use crate::models::ModelError;
use crate::ode::OdeError;
use crate::poincare::{PoincareError, Turn};
use config::{Overrides, RunConfig};
use output::{output_path, write_json, RunManifest};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("degenerate model: {0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invalid(_) => CliError::Config(e.to_string()),
            _ => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<BifurcationError> for CliError {
    fn from(e: BifurcationError) -> Self {
        match e {
            BifurcationError::Model(m) => m.into(),
            BifurcationError::DegenerateFamily => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        let DynamicsError::Ode(o) = &e;
        let last = match o {
            OdeError::StepUnderflow { y, .. }
            | OdeError::NonFinite { y, .. }
            | OdeError::TooManySteps { y, .. } => {
                format!("; last good state {y:?}")
            }
            OdeError::BadTolerances { .. } => String::new(),
        };
        CliError::Numerical(format!("{e}{last}"))
    }
}

impl From<PoincareError> for CliError {
    fn from(e: PoincareError) -> Self {
        match e {
            PoincareError::Model(m) => m.into(),
            PoincareError::Dynamics(d) => d.into(),
            PoincareError::InvalidSection(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qkayak",
    version,
    about = "Kayaking, tumbling and logrolling orbits of Q-tensor shear flow"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// TOML configuration; the reference configuration when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Args, Clone, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Clone, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// End time; twenty unperturbed periods when omitted.
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Polar angle of the initial orbit point.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub theta0: f64,
    /// Azimuth of the initial orbit point.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi0: f64,
    /// Also write an SVG of the director trace.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args, Clone, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Polar angle of the Newton guess; the predicted kayak angle (or π/2) when omitted.
    #[arg(long)]
    pub theta0: Option<f64>,
    /// Return used by the Newton iteration; half turns suit in-plane orbits.
    #[arg(long, value_enum)]
    pub turn: Option<Turn>,
}

pub type FloquetArgs = ClassifyArgs;

#[derive(Args, Clone, Debug)]
pub struct VerifyOrderArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_value = "0,1e-3,2e-3,4e-3,8e-3")]
    pub betas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1.0471975511965976")]
    pub thetas: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Omega,
    TauLdg,
    B,
    C,
    Beta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Omega => "omega",
            SweepParam::TauLdg => "tau_ldg",
            SweepParam::B => "b",
            SweepParam::C => "c",
            SweepParam::Beta => "beta",
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "omega")]
    pub param: SweepParam,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    pub to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 90)]
    pub n: usize,
    /// Add the Floquet verdict of the simulated tumbling orbit at each point.
    #[arg(long)]
    pub simulate: bool,
    /// Evaluate both kayaking criteria on an (ω, τ) grid instead of a 1-D sweep.
    #[arg(long)]
    pub region: bool,
    #[arg(long, default_value_t = 50)]
    pub n_omega: usize,
    #[arg(long, default_value_t = 50)]
    pub n_tau: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega_max: f64,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Analytic bifurcation report.
    Predict(PredictArgs),
    /// Integrate from an orbit point and classify where the trajectory settles.
    Simulate(SimulateArgs),
    /// Newton periodic point and its orbit report.
    Classify(ClassifyArgs),
    /// Scaling of single-return displacements with the shear strength.
    VerifyOrder(VerifyOrderArgs),
    /// Predictions over a parameter grid.
    Sweep(SweepArgs),
    /// Floquet multipliers of a Newton periodic point.
    Floquet(FloquetArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Predict(_) => "predict",
            Command::Simulate(_) => "simulate",
            Command::Classify(_) => "classify",
            Command::VerifyOrder(_) => "verify-order",
            Command::Sweep(_) => "sweep",
            Command::Floquet(_) => "floquet",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Predict(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Classify(a) | Command::Floquet(a) => &a.common,
            Command::VerifyOrder(a) => &a.common,
            Command::Sweep(a) => &a.common,
        }
    }
}

/// Runs a parsed command and writes its manifest.
pub fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let common = cli.command.common();
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    common.overrides.apply(&mut cfg)?;
    let context = |e: CliError| match (&common.config, e) {
        (Some(p), CliError::Config(m)) => CliError::Config(format!("{}: {m}", p.display())),
        (Some(p), CliError::Degenerate(m)) => CliError::Degenerate(format!("{}: {m}", p.display())),
        (_, e) => e,
    };
    cfg.validate().map_err(context)?;
    let mut outcome = match &cli.command {
        Command::Predict(_) => commands::cmd_predict(&cfg, &common.out),
        Command::Simulate(a) => commands::cmd_simulate(&cfg, a),
        Command::Classify(a) => commands::cmd_classify(&cfg, a),
        Command::VerifyOrder(a) => commands::cmd_verify_order(&cfg, a),
        Command::Sweep(a) => commands::cmd_sweep(&cfg, a),
        Command::Floquet(a) => commands::cmd_floquet(&cfg, a),
    }
    .map_err(context)?;
    let name = cli.command.name();
    let manifest = RunManifest::new(name, cfg.hash(), outcome.outputs.clone());
    let path = output_path(&common.out, &format!("{name}.manifest.json"))?;
    write_json(&path, &manifest)?;
    outcome.outputs.push(path);
    Ok(outcome)
}

/// Parses `args`, runs the command, prints its summary and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for p in &outcome.outputs {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
