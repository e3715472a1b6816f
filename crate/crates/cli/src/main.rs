use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use qbo_cli::commands::{run_command, Command, Overrides};
use qbo_cli::corpus::{generate_corpus, CorpusKind};
use qbo_cli::error::{CliError, EXIT_VALIDATION};
use qbo_cli::report::Format;
use qbo_cli::scenario::Scenario;

/// Quotient-bounded operator calculus on calibrated spaces.
///
/// Analyses run against a scenario file (JSON) holding named operators,
/// vectors, and a calibration of seminorm defining matrices. Exit codes:
/// 0 success, 2 analytic negative, 3 validation error, 4 numerical failure.
#[derive(Parser)]
#[command(name = "qbo", version, about)]
struct Cli {
    /// Scenario file (required by every command except `gen`).
    #[arg(long, short = 's', global = true)]
    scenario: Option<PathBuf>,

    /// Relative tolerance for equivalence decisions and Neumann truncation.
    #[arg(long, global = true)]
    tol_rel: Option<f64>,

    /// Series length cap (radius estimates, decay tables, transfer series).
    #[arg(long, global = true)]
    n_max: Option<usize>,

    /// Absolute eigenvalue clustering tolerance (default: scaled automatic).
    #[arg(long, global = true)]
    cluster_tol: Option<f64>,

    /// Report format.
    #[arg(long, global = true, default_value = "text")]
    format: String,

    /// Seed for `gen`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Parse and validate the scenario.
    Validate,
    /// Boundedness certificates plus spectrum and radius when bounded.
    Analyze { op: String },
    /// Spectrum through the calibration (union over quotients).
    Spectrum { op: String },
    /// Radius of boundedness, exact and by the root-of-norm estimates.
    Radius { op: String },
    /// Neumann-series inverse of (I - op) with a certified tail.
    Neumann { op: String },
    /// Quasi-nilpotent equivalence verdict for two operators.
    Equiv { op1: String, op2: String },
    /// Bracket decay table (n, b_n, b_n^{1/n}) per seminorm.
    Decay { op1: String, op2: String },
    /// Local spectrum support of a vector.
    Local { op: String, vec: String },
    /// Transferred local resolvent from op1 to op2 at lambda ("re" or "re,im").
    Transfer {
        op1: String,
        op2: String,
        vec: String,
        lambda: String,
    },
    /// Generate a deterministic corpus scenario on stdout.
    Gen {
        /// shared-semisimple | nilpotent-pair | permuted-diagonal | random-dense
        kind: String,
        /// Space dimension.
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let format: Format = cli.format.parse().map_err(CliError::Parse)?;

    if let Sub::Gen { kind, dim } = &cli.command {
        let kind: CorpusKind = kind.parse()?;
        let scenario = generate_corpus(cli.seed, *dim, kind)?;
        println!("{}", scenario.to_json());
        return Ok(0);
    }

    let path = cli.scenario.as_ref().ok_or_else(|| {
        CliError::Validation("this command needs --scenario <FILE>".to_string())
    })?;
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Parse(format!("{}: not valid UTF-8", path.display())))?;
    let scenario = Scenario::from_json(&text)?;
    let digest = qbo_cli::commands::digest_bytes(&bytes);

    let command = match &cli.command {
        Sub::Validate => Command::Validate,
        Sub::Analyze { op } => Command::Analyze { op: op.clone() },
        Sub::Spectrum { op } => Command::Spectrum { op: op.clone() },
        Sub::Radius { op } => Command::Radius { op: op.clone() },
        Sub::Neumann { op } => Command::Neumann { op: op.clone() },
        Sub::Equiv { op1, op2 } => Command::Equiv {
            left: op1.clone(),
            right: op2.clone(),
        },
        Sub::Decay { op1, op2 } => Command::Decay {
            left: op1.clone(),
            right: op2.clone(),
        },
        Sub::Local { op, vec } => Command::Local {
            op: op.clone(),
            vector: vec.clone(),
        },
        Sub::Transfer {
            op1,
            op2,
            vec,
            lambda,
        } => Command::Transfer {
            left: op1.clone(),
            right: op2.clone(),
            vector: vec.clone(),
            lambda: lambda.clone(),
        },
        Sub::Gen { .. } => unreachable!("handled above"),
    };

    let overrides = Overrides {
        tol_rel: cli.tol_rel,
        n_max: cli.n_max,
        cluster_tol: cli.cluster_tol,
    };
    let (report, exit) = run_command(&command, &scenario, &digest, &overrides)?;
    print!("{}", report.render(format));
    Ok(exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    // Timing is diagnostics only; reports stay byte-reproducible.
    eprintln!("elapsed: {:.3} ms", started.elapsed().as_secs_f64() * 1e3);
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_VALIDATION as u8))
}
