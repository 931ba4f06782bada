use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lopc::intrinsic::OptimizerConfig;
use lopc::report::{self, Measure, QuantumCheck, ReportDocument};

#[derive(Parser)]
#[command(
    name = "lopc",
    version,
    about = "Reproduce and check secrecy distributed through a private channel"
)]
struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the classical protocol, the quantum chain and the courier demo.
    Reproduce {
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate an entropy-based measure on a distribution file.
    Measure {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum)]
        measure: MeasureArg,
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "")]
        y: String,
        #[arg(long, default_value = "")]
        given: String,
    },
    /// Certify a witness channel or search for the intrinsic information.
    Intrinsic {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        eve: String,
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the density-matrix analog.
    Quantum {
        #[arg(long, value_enum, default_value_t = CheckArg::All)]
        check: CheckArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Entropy,
    Mi,
    Cmi,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    All,
    Ppt,
    CnotChain,
    Distill,
    Diag,
}

fn run(cli: &Cli) -> lopc::Result<ReportDocument> {
    match &cli.command {
        Command::Reproduce { restarts, seed } => {
            report::cmd_reproduce(&OptimizerConfig::default().with_restarts(*restarts).with_seed(*seed))
        }
        Command::Measure {
            dist,
            measure,
            x,
            y,
            given,
        } => {
            let measure = match measure {
                MeasureArg::Entropy => Measure::Entropy,
                MeasureArg::Mi => Measure::Mi,
                MeasureArg::Cmi => Measure::Cmi,
            };
            report::cmd_measure(
                dist,
                measure,
                &report::parse_names(x),
                &report::parse_names(y),
                &report::parse_names(given),
            )
        }
        Command::Intrinsic {
            dist,
            x,
            y,
            eve,
            witness,
            restarts,
            seed,
        } => report::cmd_intrinsic(
            dist,
            &report::parse_names(x),
            &report::parse_names(y),
            eve,
            witness.as_deref(),
            &OptimizerConfig::default().with_restarts(*restarts).with_seed(*seed),
        ),
        Command::Quantum { check } => report::cmd_quantum(match check {
            CheckArg::All => QuantumCheck::All,
            CheckArg::Ppt => QuantumCheck::Ppt,
            CheckArg::CnotChain => QuantumCheck::CnotChain,
            CheckArg::Distill => QuantumCheck::Distill,
            CheckArg::Diag => QuantumCheck::Diag,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let text = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => println!("{text}"),
    }
    eprintln!("{report}");
    if let Some(value) = report.results.get("formatted") {
        eprintln!("  value: {} bits", value.as_str().unwrap_or_default());
    }
    match report.first_failure() {
        None => ExitCode::SUCCESS,
        Some(check) => {
            eprintln!("failed check: {}", check.name);
            ExitCode::FAILURE
        }
    }
}
