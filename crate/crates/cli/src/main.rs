//! `alphacf`: batch front end for the alphacf library.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error,
//! 3 precision exhausted.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "alphacf", version, about = "Alpha-continued fractions: expansions, domains, statistics")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Decimal places for rendered numbers (round half to even).
    #[arg(long, global = true, default_value_t = 12)]
    pub digits: u32,
    /// Working precision for simulations and enclosures.
    #[arg(long, global = true, env = "ALPHACF_PRECISION_BITS", default_value_t = 128)]
    pub precision_bits: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Digits and convergents of x.
    Expand(commands::ExpandArgs),
    /// Rewrite a terminating expansion until it is the expansion for a new alpha.
    Rewrite(commands::RewriteArgs),
    /// Rectangles of the natural-extension domain.
    Domain(commands::DomainArgs),
    /// Samples of one orbit of the natural extension.
    Orbit(commands::OrbitArgs),
    /// Birkhoff estimate of the entropy.
    Entropy(commands::SimArgs),
    /// Empirical distribution of the approximation coefficients.
    ThetaDist(commands::ThetaArgs),
    /// Closed-form and empirical Legendre constant.
    Legendre(commands::LegendreArgs),
    /// Measure of a rectangle against its image, and its visit frequency.
    MeasureCheck(commands::MeasureArgs),
    /// The alpha-range on which a digit prefix is the expansion prefix of alpha.
    FundamentalInterval(commands::FundamentalArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Expand(_) => "expand",
            Command::Rewrite(_) => "rewrite",
            Command::Domain(_) => "domain",
            Command::Orbit(_) => "orbit",
            Command::Entropy(_) => "entropy",
            Command::ThetaDist(_) => "theta-dist",
            Command::Legendre(_) => "legendre",
            Command::MeasureCheck(_) => "measure-check",
            Command::FundamentalInterval(_) => "fundamental-interval",
        }
    }
}

fn exit_code(e: &alphacf::Error) -> u8 {
    match e {
        alphacf::Error::Parse(_) => 1,
        alphacf::Error::PrecisionExhausted { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let manifest = output::Manifest::new(cli.command.name(), &cli.global, &cli.command);
    match commands::run(&cli.global, &cli.command, manifest) {
        Ok(doc) => match output::write(&cli.global, &doc) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
