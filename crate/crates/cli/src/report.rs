//! Reports: structured command results with deterministic text, CSV, and
//! JSON renderings. Identical inputs and flags produce byte-identical
//! output; wall-clock timing therefore goes to stderr, never into a report.

use num_complex::Complex64 as C64;
use serde::Serialize;

use qbo_core::calibration::SeminormCertificate;
use qbo_core::matrix::{ComplexMatrix, ComplexVector};
use qbo_core::qnequiv::{DecayRow, EquivalenceVerdict};
use qbo_core::spectral::SpectralReport;

use crate::scenario::Cx;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected text, csv, json)")),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SettingsEcho {
    pub tol_rel: f64,
    pub n_max: usize,
    pub cluster_tol: Option<f64>,
    pub support_tol: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub scenario_digest: String,
    pub settings: SettingsEcho,
    pub result: CommandResult,
}

#[derive(Debug, Serialize)]
pub struct CertificateEcho {
    pub seminorm: String,
    pub invariant: bool,
    pub residual: f64,
    pub limit: f64,
    pub bound: Option<f64>,
}

impl From<&SeminormCertificate> for CertificateEcho {
    fn from(c: &SeminormCertificate) -> Self {
        Self {
            seminorm: c.seminorm.clone(),
            invariant: c.invariant,
            residual: c.residual,
            limit: c.limit,
            bound: c.bound,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClusterEcho {
    pub value: Cx,
    pub seminorms: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumEcho {
    pub clusters: Vec<ClusterEcho>,
    pub ambient: Vec<Cx>,
    pub radius_of_boundedness: f64,
    pub regular: bool,
    pub per_seminorm_radii: Vec<(String, f64)>,
}

impl From<&SpectralReport> for SpectrumEcho {
    fn from(r: &SpectralReport) -> Self {
        Self {
            clusters: r
                .qp_spectrum
                .iter()
                .map(|c| ClusterEcho {
                    value: Cx(c.value),
                    seminorms: c.seminorms.clone(),
                })
                .collect(),
            ambient: r.ambient_spectrum.iter().map(|&v| Cx(v)).collect(),
            radius_of_boundedness: r.radius_of_boundedness,
            regular: r.regular,
            per_seminorm_radii: r.per_seminorm_radii.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictEcho {
    pub equivalent: bool,
    pub cutoff: usize,
    pub residual_forward: (f64, f64),
    pub residual_reverse: (f64, f64),
    pub scale: f64,
    pub oracle_equivalent: bool,
    pub oracle_agrees: bool,
    pub decay_curve: Vec<f64>,
}

impl From<&EquivalenceVerdict> for VerdictEcho {
    fn from(v: &EquivalenceVerdict) -> Self {
        Self {
            equivalent: v.equivalent,
            cutoff: v.cutoff,
            residual_forward: v.residual_forward,
            residual_reverse: v.residual_reverse,
            scale: v.scale,
            oracle_equivalent: v.oracle_equivalent,
            oracle_agrees: v.oracle_agrees,
            decay_curve: v.decay_curve.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DecayRowEcho {
    pub n: usize,
    pub b_n: f64,
    pub root_n: Option<f64>,
    pub seminorm: String,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandResult {
    Validate {
        space_dim: usize,
        seminorms: Vec<String>,
        separating: bool,
        operators: Vec<String>,
        vectors: Vec<String>,
    },
    Analyze {
        operator: String,
        bounded: bool,
        certificates: Vec<CertificateEcho>,
        spectrum: Option<SpectrumEcho>,
        radius_exact: Option<f64>,
    },
    Spectrum {
        operator: String,
        #[serde(flatten)]
        spectrum: SpectrumEcho,
    },
    Radius {
        operator: String,
        exact: f64,
        estimates: Vec<f64>,
    },
    Neumann {
        operator: String,
        terms: usize,
        certified_ratio: f64,
        residual: f64,
        inverse: Vec<Vec<Cx>>,
    },
    Equiv {
        left: String,
        right: String,
        #[serde(flatten)]
        verdict: VerdictEcho,
    },
    Decay {
        left: String,
        right: String,
        rows: Vec<DecayRowEcho>,
    },
    Local {
        operator: String,
        vector: String,
        support: Vec<Cx>,
        cluster_count: usize,
        empty: bool,
    },
    Transfer {
        left: String,
        right: String,
        vector: String,
        lambda: Cx,
        result: Vec<Cx>,
        residual: f64,
    },
}

pub fn decay_rows(rows: &[DecayRow]) -> Vec<DecayRowEcho> {
    rows.iter()
        .map(|r| DecayRowEcho {
            n: r.n,
            b_n: r.norm,
            root_n: if r.root.is_nan() { None } else { Some(r.root) },
            seminorm: r.seminorm.clone(),
        })
        .collect()
}

pub fn encode_matrix(m: &ComplexMatrix) -> Vec<Vec<Cx>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| Cx(m[(i, j)])).collect())
        .collect()
}

pub fn encode_vector(v: &ComplexVector) -> Vec<Cx> {
    v.entries().iter().map(|&z| Cx(z)).collect()
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

fn fmt_cx(c: &Cx) -> String {
    fmt_c(c.0)
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn header_text(&self) -> String {
        format!(
            "command: {}\nscenario sha256: {}\ntolerances: tol_rel={} n_max={} cluster_tol={} support_tol={}\n",
            self.command,
            self.scenario_digest,
            self.settings.tol_rel,
            self.settings.n_max,
            self.settings
                .cluster_tol
                .map_or("auto".to_string(), |v| v.to_string()),
            self.settings.support_tol,
        )
    }

    fn render_text(&self) -> String {
        let mut out = self.header_text();
        match &self.result {
            CommandResult::Validate {
                space_dim,
                seminorms,
                separating,
                operators,
                vectors,
            } => {
                out += &format!(
                    "scenario ok: dim={space_dim} seminorms=[{}] separating={separating} operators=[{}] vectors=[{}]\n",
                    seminorms.join(", "),
                    operators.join(", "),
                    vectors.join(", ")
                );
            }
            CommandResult::Analyze {
                operator,
                bounded,
                certificates,
                spectrum,
                radius_exact,
            } => {
                out += &format!("operator {operator}: quotient bounded = {bounded}\n");
                for c in certificates {
                    out += &format!(
                        "  seminorm {}: invariant={} residual={:.3e} limit={:.3e}{}\n",
                        c.seminorm,
                        c.invariant,
                        c.residual,
                        c.limit,
                        c.bound
                            .map_or(String::new(), |b| format!(" p_hat={b:.12}")),
                    );
                }
                if let Some(s) = spectrum {
                    out += &render_spectrum_text(s);
                }
                if let Some(r) = radius_exact {
                    out += &format!("radius of boundedness: {r:.12}\n");
                }
            }
            CommandResult::Spectrum { operator, spectrum } => {
                out += &format!("operator {operator}:\n");
                out += &render_spectrum_text(spectrum);
            }
            CommandResult::Radius {
                operator,
                exact,
                estimates,
            } => {
                out += &format!("operator {operator}: radius_exact = {exact:.12}\n");
                for (i, g) in estimates.iter().enumerate() {
                    out += &format!("  g_{} = {g:.12}\n", i + 1);
                }
            }
            CommandResult::Neumann {
                operator,
                terms,
                certified_ratio,
                residual,
                inverse,
            } => {
                out += &format!(
                    "operator {operator}: Neumann inverse of (I - {operator}) with {terms} terms, certified ratio {certified_ratio:.6}, residual {residual:.3e}\n",
                );
                for row in inverse {
                    out += "  [";
                    out += &row.iter().map(fmt_cx).collect::<Vec<_>>().join(", ");
                    out += "]\n";
                }
            }
            CommandResult::Equiv { left, right, verdict } => {
                out += &format!(
                    "{left} ~q {right}: {}\n",
                    if verdict.equivalent { "equivalent" } else { "NOT equivalent" }
                );
                out += &format!(
                    "  cutoff n* = {}, b_(n*) forward = {:.3e}, reverse = {:.3e}, scale = {:.3e}\n",
                    verdict.cutoff,
                    verdict.residual_forward.0,
                    verdict.residual_reverse.0,
                    verdict.scale
                );
                out += &format!(
                    "  semisimple-part oracle: {} ({})\n",
                    if verdict.oracle_equivalent { "equivalent" } else { "not equivalent" },
                    if verdict.oracle_agrees { "agrees" } else { "DISAGREES" }
                );
                out += "  decay roots:";
                for r in &verdict.decay_curve {
                    out += &format!(" {r:.6}");
                }
                out += "\n";
            }
            CommandResult::Decay { left, right, rows } => {
                out += &format!("bracket decay for ({left}, {right}):\n");
                out += "  n,b_n,root_n,seminorm\n";
                for r in rows {
                    out += &format!(
                        "  {},{:e},{},{}\n",
                        r.n,
                        r.b_n,
                        r.root_n.map_or(String::new(), |v| format!("{v:e}")),
                        r.seminorm
                    );
                }
            }
            CommandResult::Local {
                operator,
                vector,
                support,
                cluster_count,
                empty,
            } => {
                out += &format!(
                    "local spectrum of {vector} under {operator}: {} of {cluster_count} clusters{}\n",
                    support.len(),
                    if *empty { " (empty: zero vector)" } else { "" }
                );
                for v in support {
                    out += &format!("  {}\n", fmt_cx(v));
                }
            }
            CommandResult::Transfer {
                left,
                right,
                vector,
                lambda,
                result,
                residual,
            } => {
                out += &format!(
                    "transfer of {vector} from {left} to {right} at lambda = {}:\n",
                    fmt_cx(lambda)
                );
                out += "  x1 = [";
                out += &result.iter().map(fmt_cx).collect::<Vec<_>>().join(", ");
                out += "]\n";
                out += &format!("  residual |(lambda I - {right}) x1 - {vector}| = {residual:.3e}\n");
            }
        }
        out
    }

    fn render_csv(&self) -> String {
        match &self.result {
            CommandResult::Decay { rows, .. } => {
                let mut out = String::from("n,b_n,root_n,seminorm\n");
                for r in rows {
                    out += &format!(
                        "{},{:e},{},{}\n",
                        r.n,
                        r.b_n,
                        r.root_n.map_or(String::new(), |v| format!("{v:e}")),
                        r.seminorm
                    );
                }
                out
            }
            CommandResult::Radius { exact, estimates, .. } => {
                let mut out = String::from("n,g_n\n");
                out += &format!("0,{exact:e}\n");
                for (i, g) in estimates.iter().enumerate() {
                    out += &format!("{},{:e}\n", i + 1, g);
                }
                out
            }
            // Non-tabular commands fall back to key,value rows.
            _ => {
                let value = serde_json::to_value(&self.result).expect("result serializes");
                let mut out = String::from("key,value\n");
                flatten_json("result", &value, &mut out);
                out
            }
        }
    }
}

fn render_spectrum_text(s: &SpectrumEcho) -> String {
    let mut out = String::new();
    out += &format!(
        "spectrum through the calibration ({} clusters), radius = {:.12}, regular = {}\n",
        s.clusters.len(),
        s.radius_of_boundedness,
        s.regular
    );
    for c in &s.clusters {
        out += &format!("  {} from [{}]\n", fmt_cx(&c.value), c.seminorms.join(", "));
    }
    out += "ambient eigenvalue clusters:";
    for v in &s.ambient {
        out += &format!(" {}", fmt_cx(v));
    }
    out += "\nper-seminorm spectral radii:";
    for (name, r) in &s.per_seminorm_radii {
        out += &format!(" {name}={r:.9}");
    }
    out += "\n";
    out
}

fn flatten_json(prefix: &str, value: &serde_json::Value, out: &mut String) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                flatten_json(&format!("{prefix}.{k}"), v, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}[{i}]"), v, out);
            }
        }
        other => {
            out.push_str(&format!("{prefix},{other}\n"));
        }
    }
}
