use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use wcdma_cac::coding::SchemeKind;
use wcdma_cac::load::BoundaryRule;
use wcdma_cac_cli::commands::{self, AdmitSimArgs, BerCurveArgs, CapacityArgs};
use wcdma_cac_cli::{Preset, ScenarioConfig};

/// WCDMA downlink capacity and call admission control simulator.
#[derive(Debug, Parser)]
#[command(name = "wcdma-cac", version)]
struct Cli {
    /// Scenario config (TOML). Defaults to the built-in configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Parameter preset: `paper-figures` (default) or `table1`.
    #[arg(long, global = true)]
    preset: Option<Preset>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scheme {
    Uncoded,
    Block,
    Convolutional,
}

impl From<Scheme> for SchemeKind {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Uncoded => SchemeKind::Uncoded,
            Scheme::Block => SchemeKind::Block,
            Scheme::Convolutional => SchemeKind::Convolutional,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    StrictNewLoad,
    AdmitIfOldBelow,
}

impl From<Rule> for BoundaryRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::StrictNewLoad => BoundaryRule::StrictNewLoad,
            Rule::AdmitIfOldBelow => BoundaryRule::AdmitIfOldBelow,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BER against Eb/N0 for each coding scheme.
    BerCurve {
        /// Schemes to include (repeatable); all configured schemes by default.
        #[arg(long = "scheme", value_enum)]
        schemes: Vec<Scheme>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 12.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Downlink load against number of users, and capacity at the threshold.
    Capacity {
        /// Service class name from the config.
        #[arg(long)]
        service: String,
        #[arg(long = "scheme", value_enum)]
        schemes: Vec<Scheme>,
        #[arg(long, default_value_t = 200)]
        max_users: u64,
        /// Overrides `admission.boundary_rule`.
        #[arg(long, value_enum)]
        rule: Option<Rule>,
    },
    /// Blocking percentage per policy over the configured arrival sequence.
    AdmitSim {
        /// Shuffle arrivals with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `scenario.scheme`.
        #[arg(long, value_enum)]
        scheme: Option<Scheme>,
        #[arg(long, value_enum)]
        rule: Option<Rule>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::builtin(),
    };
    let cfg = config.resolve(cli.preset)?;
    let csv = match cli.command {
        Command::BerCurve {
            schemes,
            from,
            to,
            step,
        } => commands::ber_curve(
            &cfg,
            &BerCurveArgs {
                schemes: schemes.into_iter().map(Into::into).collect(),
                from_db: from,
                to_db: to,
                step_db: step,
            },
        )?,
        Command::Capacity {
            service,
            schemes,
            max_users,
            rule,
        } => commands::capacity(
            &cfg,
            &CapacityArgs {
                service,
                schemes: schemes.into_iter().map(Into::into).collect(),
                max_users,
                rule: rule.map(Into::into),
            },
        )?,
        Command::AdmitSim { seed, scheme, rule } => commands::admit_sim(
            &cfg,
            &AdmitSimArgs {
                seed,
                scheme: scheme.map(Into::into),
                rule: rule.map(Into::into),
            },
        )?,
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
