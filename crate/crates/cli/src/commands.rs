//! Command dispatch: scenario + command + flags in, report + exit code out.
//!
//! Analytic negatives (not quotient bounded, not equivalent) exit 2 whether
//! they arrive as errors or as reported verdicts; validation problems exit
//! 3; uncertifiable numerics (oracle disagreement, cluster separation
//! failures, overflow) exit 4.

use num_complex::Complex64 as C64;

use qbo_core::calibration::INVARIANCE_REL_TOL;
use qbo_core::linalg::eigen::default_cluster_tol;
use qbo_core::local_spectral::{local_spectrum, transfer_local_resolvent};
use qbo_core::matrix::ComplexMatrix;
use qbo_core::qnequiv::{decay_table, decide_equivalence};
use qbo_core::spectral::{neumann_inverse, qp_spectrum, radius_exact, radius_estimates};

use crate::error::{CliError, EXIT_ANALYTIC_NEGATIVE, EXIT_NUMERICAL, EXIT_OK};
use crate::report::{decay_rows, encode_matrix, encode_vector, CommandResult, Report, SettingsEcho};
use crate::scenario::{Cx, Scenario};

/// One analysis command against a loaded scenario.
#[derive(Debug, Clone)]
pub enum Command {
    Validate,
    Analyze { op: String },
    Spectrum { op: String },
    Radius { op: String },
    Neumann { op: String },
    Equiv { left: String, right: String },
    Decay { left: String, right: String },
    Local { op: String, vector: String },
    Transfer {
        left: String,
        right: String,
        vector: String,
        lambda: String,
    },
}

impl Command {
    pub fn echo(&self) -> String {
        match self {
            Command::Validate => "validate".into(),
            Command::Analyze { op } => format!("analyze {op}"),
            Command::Spectrum { op } => format!("spectrum {op}"),
            Command::Radius { op } => format!("radius {op}"),
            Command::Neumann { op } => format!("neumann {op}"),
            Command::Equiv { left, right } => format!("equiv {left} {right}"),
            Command::Decay { left, right } => format!("decay {left} {right}"),
            Command::Local { op, vector } => format!("local {op} {vector}"),
            Command::Transfer {
                left,
                right,
                vector,
                lambda,
            } => format!("transfer {left} {right} {vector} {lambda}"),
        }
    }
}

/// Flag overrides; unset values fall back to the scenario settings.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol_rel: Option<f64>,
    pub n_max: Option<usize>,
    pub cluster_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct EffectiveSettings {
    pub tol_rel: f64,
    pub n_max: usize,
    pub cluster_tol: Option<f64>,
    pub support_tol: f64,
}

impl EffectiveSettings {
    pub fn resolve(scenario: &Scenario, overrides: &Overrides) -> Self {
        Self {
            tol_rel: overrides.tol_rel.unwrap_or(scenario.settings.tol_rel),
            n_max: overrides.n_max.unwrap_or(scenario.settings.n_max),
            cluster_tol: overrides.cluster_tol.or(scenario.settings.cluster_tol),
            support_tol: scenario.settings.support_tol,
        }
    }

    fn cluster_tol_for(&self, t: &ComplexMatrix) -> f64 {
        self.cluster_tol.unwrap_or_else(|| default_cluster_tol(t))
    }

    fn echo(&self) -> SettingsEcho {
        SettingsEcho {
            tol_rel: self.tol_rel,
            n_max: self.n_max,
            cluster_tol: self.cluster_tol,
            support_tol: self.support_tol,
        }
    }
}

/// Parse "re" or "re,im" into a complex number.
pub fn parse_complex(text: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Parse(format!("`{s}` is not a real number")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(parse(re)?, 0.0)),
        [re, im] => Ok(C64::new(parse(re)?, parse(im)?)),
        _ => Err(CliError::Parse(format!(
            "`{text}` is not a complex number (expected `re` or `re,im`)"
        ))),
    }
}

/// Run a command. Returns the report and the exit code; hard failures come
/// back as errors carrying their own exit class.
pub fn run_command(
    command: &Command,
    scenario: &Scenario,
    scenario_digest: &str,
    overrides: &Overrides,
) -> Result<(Report, i32), CliError> {
    let settings = EffectiveSettings::resolve(scenario, overrides);
    let cal = scenario.build_calibration()?;
    let mut exit = EXIT_OK;

    let result = match command {
        Command::Validate => CommandResult::Validate {
            space_dim: scenario.space_dim,
            seminorms: scenario.calibration.iter().map(|s| s.name.clone()).collect(),
            separating: cal.is_separating(),
            operators: scenario.operators.keys().cloned().collect(),
            vectors: scenario.vectors.keys().cloned().collect(),
        },
        Command::Analyze { op } => {
            let t = scenario.operator(op)?;
            let report = cal.is_quotient_bounded(&t, INVARIANCE_REL_TOL)?;
            let (spectrum, radius) = if report.bounded {
                let spectral = qp_spectrum(&t, &cal, settings.cluster_tol_for(&t))?;
                let radius = radius_exact(&t, &cal)?;
                (Some((&spectral).into()), Some(radius))
            } else {
                exit = EXIT_ANALYTIC_NEGATIVE;
                (None, None)
            };
            CommandResult::Analyze {
                operator: op.clone(),
                bounded: report.bounded,
                certificates: report.certificates.iter().map(Into::into).collect(),
                spectrum,
                radius_exact: radius,
            }
        }
        Command::Spectrum { op } => {
            let t = scenario.operator(op)?;
            let spectral = qp_spectrum(&t, &cal, settings.cluster_tol_for(&t))?;
            CommandResult::Spectrum {
                operator: op.clone(),
                spectrum: (&spectral).into(),
            }
        }
        Command::Radius { op } => {
            let t = scenario.operator(op)?;
            let exact = radius_exact(&t, &cal)?;
            let estimates = radius_estimates(&t, &cal, settings.n_max)?;
            CommandResult::Radius {
                operator: op.clone(),
                exact,
                estimates,
            }
        }
        Command::Neumann { op } => {
            let t = scenario.operator(op)?;
            let result = neumann_inverse(&t, &cal, settings.tol_rel)?;
            CommandResult::Neumann {
                operator: op.clone(),
                terms: result.terms,
                certified_ratio: result.certified_ratio,
                residual: result.residual,
                inverse: encode_matrix(&result.inverse),
            }
        }
        Command::Equiv { left, right } => {
            let t = scenario.operator(left)?;
            let s = scenario.operator(right)?;
            let verdict = decide_equivalence(&t, &s, &cal, settings.tol_rel)?;
            if !verdict.oracle_agrees {
                exit = EXIT_NUMERICAL;
            } else if !verdict.equivalent {
                exit = EXIT_ANALYTIC_NEGATIVE;
            }
            CommandResult::Equiv {
                left: left.clone(),
                right: right.clone(),
                verdict: (&verdict).into(),
            }
        }
        Command::Decay { left, right } => {
            let t = scenario.operator(left)?;
            let s = scenario.operator(right)?;
            let rows = decay_table(&t, &s, &cal, settings.n_max.min(2 * scenario.space_dim + 4))?;
            CommandResult::Decay {
                left: left.clone(),
                right: right.clone(),
                rows: decay_rows(&rows),
            }
        }
        Command::Local { op, vector } => {
            let t = scenario.operator(op)?;
            let x = scenario.vector(vector)?;
            let spectrum = local_spectrum(&t, &x, settings.support_tol)?;
            CommandResult::Local {
                operator: op.clone(),
                vector: vector.clone(),
                support: spectrum.support_values.iter().map(|&v| Cx(v)).collect(),
                cluster_count: spectrum.cluster_count,
                empty: spectrum.is_empty(),
            }
        }
        Command::Transfer {
            left,
            right,
            vector,
            lambda,
        } => {
            let t = scenario.operator(left)?;
            let s = scenario.operator(right)?;
            let x = scenario.vector(vector)?;
            let point = parse_complex(lambda)?;
            let result = transfer_local_resolvent(&t, &s, &x, point, settings.n_max)?;
            // Residual of the transferred extension identity.
            let mut shifted = s.scale(C64::new(-1.0, 0.0));
            for i in 0..s.rows() {
                shifted[(i, i)] += point;
            }
            let residual = shifted.apply(&result).sub(&x).norm();
            CommandResult::Transfer {
                left: left.clone(),
                right: right.clone(),
                vector: vector.clone(),
                lambda: Cx(point),
                result: encode_vector(&result),
                residual,
            }
        }
    };

    Ok((
        Report {
            command: command.echo(),
            scenario_digest: scenario_digest.to_string(),
            settings: settings.echo(),
            result,
        },
        exit,
    ))
}

/// Hex-encoded SHA-256 of the scenario bytes, echoed into every report.
pub fn digest_bytes(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
