//! `ghz-forge`: synthesize, propagate and verify W <-> GHZ pulse schedules.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use ghz_core::{InitialPoint, ProfileKind};
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ghz-forge",
    version,
    about = "W <-> GHZ pulse synthesis for three blockaded Rydberg atoms"
)]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Read and write times in microseconds and Rabi frequencies in MHz
    #[arg(long, global = true)]
    physical_units: bool,
    /// Reference Rabi frequency in MHz for --physical-units
    #[arg(long, global = true)]
    omega_ref_mhz: Option<f64>,
    /// Sidecar log file (defaults to `<output>.log` when writing a file)
    #[arg(long, global = true)]
    log: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the endpoint relations for every sign branch
    Endpoints(EndpointsArgs),
    /// Write a Rabi-frequency schedule as CSV
    Synthesize(SynthArgs),
    /// Integrate the effective dynamics from |W> (or back from GHZ)
    Propagate(PropagateArgs),
    /// Compare the effective model with the full three-atom model
    ValidateFull(ValidateArgs),
    /// Run the invariant suite
    Check(CheckArgs),
}

#[derive(Debug, Args, Default)]
struct EndpointSelect {
    /// Endpoint signs as `q1,q2,q3`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    signs: Option<Vec<i8>>,
    #[arg(long)]
    branch: Option<usize>,
    #[arg(long, value_enum)]
    initial: Option<InitialArg>,
    /// Pinned angles `theta_a(T),theta_b(T),phi_a(0),phi_b(0)`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pin: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum InitialArg {
    PlusPi,
    MinusPi,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ProfileArg {
    Constant,
    Trapezoid,
}

#[derive(Debug, Args, Default)]
struct PulseSelect {
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, conflicts_with = "target_area")]
    duration: Option<f64>,
    #[arg(long)]
    target_area: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Debug, Args)]
struct EndpointsArgs {
    #[arg(long, allow_hyphen_values = true)]
    q1: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    q2: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    q3: Option<i8>,
    #[command(flatten)]
    select: EndpointSelect,
    /// Write the table as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    endpoint: EndpointSelect,
    #[command(flatten)]
    pulse: PulseSelect,
    /// Schedule CSV path; a `.meta.json` sidecar is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PropagateArgs {
    /// Schedule CSV; synthesized from the config when absent
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Run the time-reversed, sign-flipped schedule from the reached GHZ state
    #[arg(long)]
    reverse: bool,
    /// Fidelity-trace CSV
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Initial step count before doubling
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    endpoint: EndpointSelect,
    #[command(flatten)]
    pulse: PulseSelect,
    /// Result JSON path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Hierarchy factor; repeat for a trend
    #[arg(long = "factor")]
    factors: Vec<f64>,
    /// Run even when the hierarchy check fails
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    endpoint: EndpointSelect,
    #[command(flatten)]
    pulse: PulseSelect,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Write the outcomes as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

impl EndpointSelect {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), commands::CliError> {
        if self.signs.as_ref().is_some_and(|s| s.len() != 3) {
            return Err(commands::CliError::usage(anyhow::anyhow!(
                "--signs takes three values"
            )));
        }
        if self.pin.as_ref().is_some_and(|p| p.len() != 4) {
            return Err(commands::CliError::usage(anyhow::anyhow!(
                "--pin takes four angles"
            )));
        }
        if let Some(s) = &self.signs {
            cfg.endpoint.q1 = s[0];
            cfg.endpoint.q2 = s[1];
            cfg.endpoint.q3 = s[2];
        }
        if let Some(b) = self.branch {
            cfg.endpoint.branch = b;
        }
        if let Some(i) = self.initial {
            cfg.endpoint.initial = match i {
                InitialArg::PlusPi => InitialPoint::PlusPi,
                InitialArg::MinusPi => InitialPoint::MinusPi,
            };
        }
        if let Some(p) = &self.pin {
            cfg.endpoint.pin = Some([p[0], p[1], p[2], p[3]]);
        }
        Ok(())
    }
}

impl PulseSelect {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = self.profile {
            cfg.pulse.profile = match p {
                ProfileArg::Constant => ProfileKind::Constant,
                ProfileArg::Trapezoid => ProfileKind::Trapezoid,
            };
        }
        if let Some(t) = self.tau {
            cfg.pulse.tau = t;
        }
        if let Some(d) = self.duration {
            cfg.pulse.duration = Some(d);
            cfg.pulse.target_area = None;
        }
        if let Some(a) = self.target_area {
            cfg.pulse.target_area = Some(a);
            cfg.pulse.duration = None;
        }
        if let Some(n) = self.samples {
            cfg.pulse.samples = n;
        }
    }
}

fn run(cli: Cli) -> commands::Outcome {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(commands::CliError::usage)?,
        None => RunConfig::default(),
    };
    if cli.physical_units {
        cfg.units.physical = true;
    }
    if let Some(w) = cli.omega_ref_mhz {
        cfg.units.omega_ref_mhz = Some(w);
    }
    let log = cli.log.clone();
    match cli.command {
        Command::Endpoints(a) => {
            a.select.apply(&mut cfg)?;
            let filter = [a.q1, a.q2, a.q3];
            commands::endpoints(
                &cfg,
                filter,
                a.select.pin.is_some() || a.select.signs.is_some(),
                a.out,
                log,
            )
        }
        Command::Synthesize(a) => {
            a.endpoint.apply(&mut cfg)?;
            a.pulse.apply(&mut cfg);
            if a.out.is_some() {
                cfg.output.schedule = a.out;
            }
            commands::synthesize(&cfg, log)
        }
        Command::Propagate(a) => {
            a.endpoint.apply(&mut cfg)?;
            a.pulse.apply(&mut cfg);
            if let Some(s) = a.steps {
                cfg.propagation.steps = s;
            }
            if a.out.is_some() {
                cfg.output.result = a.out;
            }
            if a.trace.is_some() {
                cfg.output.trace = a.trace;
            }
            commands::propagate(&cfg, a.schedule, a.reverse, log)
        }
        Command::ValidateFull(a) => {
            a.endpoint.apply(&mut cfg)?;
            a.pulse.apply(&mut cfg);
            if !a.factors.is_empty() {
                cfg.full.factors = a.factors;
            }
            cfg.full.force |= a.force;
            if a.out.is_some() {
                cfg.output.report = a.out;
            }
            commands::validate_full(&cfg, a.schedule, log)
        }
        Command::Check(a) => commands::check(a.out, log),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.source);
            ExitCode::from(e.code)
        }
    }
}
