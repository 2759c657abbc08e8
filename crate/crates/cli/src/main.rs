//! `igusa`: runs the identity, module and covering-tensor checks and emits
//! machine-readable reports. Exit codes: 0 all checks pass, 1 a check
//! failed, 2 usage, configuration or I/O error.

mod commands;
mod config;
mod error;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use igusa_core::module_lab::ModuleTag;

use config::{Format, Overrides, RunConfig};
use error::CliError;
use report::VerificationReport;

#[derive(Parser)]
#[command(name = "igusa", version, about = "Verification toolkit for vector-valued Siegel modular forms of degree two")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// JSON array of points `{"z0":[re,im],"z1":[re,im],"z2":[re,im]}`.
    #[arg(long, global = true, value_name = "FILE")]
    points: Option<PathBuf>,
    /// Truncation target for the lattice sums.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    max_radius: Option<u32>,
    /// Evaluate in multiprecision with this many bits.
    #[arg(long, global = true)]
    precision_bits: Option<usize>,
    #[arg(long, global = true)]
    max_r: Option<u32>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for the generic sample points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuleArg {
    #[value(name = "M+")]
    MPlus,
    #[value(name = "M-")]
    MMinus,
    Scalar,
    ScalarTwisted,
    ScalarTrivial,
    TrivialCombined,
}

impl From<ModuleArg> for ModuleTag {
    fn from(m: ModuleArg) -> Self {
        match m {
            ModuleArg::MPlus => ModuleTag::MPlus,
            ModuleArg::MMinus => ModuleTag::MMinus,
            ModuleArg::Scalar => ModuleTag::Scalar,
            ModuleArg::ScalarTwisted => ModuleTag::ScalarTwisted,
            ModuleArg::ScalarTrivial => ModuleTag::ScalarTrivial,
            ModuleArg::TrivialCombined => ModuleTag::TrivialCombined,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Numeric identities at every sample point.
    Verify,
    /// Computed versus closed-form dimensions, degree by degree.
    Hilbert {
        #[arg(long, value_enum, default_value = "M+")]
        module: ModuleArg,
    },
    /// Relations among the generators and whether the known ones span.
    Syzygy {
        /// Restrict to one module (M+ or M-).
        #[arg(long, value_enum)]
        module: Option<ModuleArg>,
    },
    /// Intersection of the shifted even modules against the full product.
    Intersect,
    /// The ten integer quadrics, checked against squared theta constants.
    Quadrics,
    /// Estimate of the constant relating the jacobian determinant to chi5.
    EstimateC5,
    /// Membership conditions and thresholds for tensor candidates.
    TensorCheck {
        /// JSON array of candidates; the built-in curated set when omitted.
        #[arg(long, value_name = "FILE")]
        candidates: Option<PathBuf>,
    },
    /// Everything above at the default ranges.
    Suite,
}

fn run(cli: &Cli) -> Result<VerificationReport, CliError> {
    let g = &cli.global;
    let overrides = Overrides {
        config: g.config.clone(),
        points: g.points.clone(),
        eps: g.eps,
        max_radius: g.max_radius,
        precision_bits: g.precision_bits,
        seed: g.seed,
        max_r: g.max_r,
        format: g.format,
    };
    let cfg = RunConfig::resolve(&overrides)?;
    match &cli.command {
        Command::Verify => commands::verify(&cfg),
        Command::Hilbert { module } => commands::hilbert(&cfg, (*module).into()),
        Command::Syzygy { module } => {
            let modules: Vec<ModuleTag> = match module {
                Some(m) => vec![(*m).into()],
                None => vec![ModuleTag::MPlus, ModuleTag::MMinus],
            };
            commands::syzygy(&cfg, &modules)
        }
        Command::Intersect => commands::intersect(&cfg),
        Command::Quadrics => commands::quadrics(&cfg),
        Command::EstimateC5 => commands::estimate_c5(&cfg),
        Command::TensorCheck { candidates } => commands::tensor_check(&cfg, candidates.as_ref()),
        Command::Suite => commands::suite(&cfg),
    }
    .and_then(|report| emit(&report, &cfg, g.out.as_ref()).map(|()| report))
}

fn emit(report: &VerificationReport, cfg: &RunConfig, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = report.render(cfg.format)?;
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) if report.pass => ExitCode::SUCCESS,
        Ok(report) => {
            for c in report.failed() {
                eprintln!("FAILED {}", c.name);
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
