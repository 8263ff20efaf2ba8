// NaN must fail the lambda guard too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use grushin_lab::analysis::{
    critical_exponent, homogeneous_dimension, regularity_exponent, AnalysisError,
    RegularityCase,
};
use grushin_lab::config::parse_config;
use grushin_lab::experiment::run_experiment;
use grushin_lab::report::{emit_report, OutputFormat};

/// Config-driven experiments for the singular Grushin problem
/// -Δ_λ u = f/u^ν with Dirichlet boundary data.
#[derive(Parser)]
#[command(name = "grushin-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and emit a report.
    Run {
        /// Path to the config file (flat `key = value` lines).
        config: PathBuf,
        /// Output path; defaults to the config's `out` key, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format.
        #[arg(long, default_value = "csv")]
        format: OutputFormatArg,
    },
    /// Parse and validate a config without running it.
    Check {
        /// Path to the config file.
        config: PathBuf,
    },
    /// Print the derived exponents for a Grushin geometry.
    Exponents {
        /// Number of degenerate directions.
        #[arg(long)]
        m: u32,
        /// Degeneracy exponent λ >= 0.
        #[arg(long)]
        lambda: f64,
        /// Singular exponent ν (needed with --case).
        #[arg(long)]
        nu: Option<f64>,
        /// Source integrability r (needed with --case).
        #[arg(long)]
        r: Option<f64>,
        /// Integrability regime: nu_eq_1, nu_gt_1, nu_lt_1 or sobolev_q.
        #[arg(long, value_parser = clap::value_parser!(RegularityCase))]
        case: Option<RegularityCase>,
    },
}

#[derive(Clone, Copy)]
struct OutputFormatArg(OutputFormat);

impl std::str::FromStr for OutputFormatArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(OutputFormatArg)
    }
}

fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else {
        format!("{v}")
    }
}

fn cmd_run(config_path: &PathBuf, out: Option<PathBuf>, format: OutputFormat) -> ExitCode {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return ExitCode::from(2);
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out_path = out.or_else(|| config.out.as_ref().map(PathBuf::from));
    if let Err(e) = emit_report(&report, format, out_path.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: {} check(s) failed", config.kind.name(), report.checks.iter().filter(|c| !c.pass).count());
        ExitCode::from(1)
    }
}

fn cmd_check(config_path: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return ExitCode::from(2);
        }
    };
    match parse_config(&text) {
        Ok(config) => {
            println!("ok: {} experiment", config.kind.name());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_exponents(
    m: u32,
    lambda: f64,
    nu: Option<f64>,
    r: Option<f64>,
    case: Option<RegularityCase>,
) -> ExitCode {
    if m < 1 {
        eprintln!("error: --m must be >= 1");
        return ExitCode::from(2);
    }
    if !(lambda >= 0.0) {
        eprintln!("error: --lambda must be >= 0");
        return ExitCode::from(2);
    }
    let q = homogeneous_dimension(m, lambda);
    println!("Q = {}", fmt17(q));
    match critical_exponent(q) {
        Ok(two_star) => println!("two_star = {}", fmt17(two_star)),
        Err(_) => println!("two_star = undefined (Q <= 2)"),
    }
    if let Some(case) = case {
        let (Some(nu), Some(r)) = (nu, r) else {
            eprintln!("error: --case needs both --nu and --r");
            return ExitCode::from(2);
        };
        match regularity_exponent(case, nu, r, q) {
            Ok(s) => println!("{} = {}", case.name(), fmt17(s)),
            Err(AnalysisError::LInftyRegime { r, half_q }) => {
                println!("{}: r = {} >= Q/2 = {}; solution is bounded (L_infinity regime)", case.name(), fmt17(r), fmt17(half_q));
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else if let Some(r) = r {
        println!("holder_conjugate = {}", match grushin_lab::analysis::holder_conjugate(r) {
            Ok(c) => fmt17(c),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        });
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, format } => cmd_run(&config, out, format.0),
        Command::Check { config } => cmd_check(&config),
        Command::Exponents { m, lambda, nu, r, case } => cmd_exponents(m, lambda, nu, r, case),
    }
}
