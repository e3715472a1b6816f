//! Scenario files: named operators, vectors, and a calibration on one
//! space, with tolerance overrides. JSON with complex entries encoded as
//! `[re, im]` (bare numbers read as reals); serialization always emits the
//! two-element form so round-trips are lossless.

use indexmap::IndexMap;
use num_complex::Complex64 as C64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use qbo_core::calibration::{Calibration, Seminorm};
use qbo_core::matrix::{ComplexMatrix, ComplexVector};

use crate::error::CliError;

/// Complex scalar with the `[re, im]` wire encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub C64);

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx(z)
    }
}

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&self.0.re)?;
        seq.serialize_element(&self.0.im)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CxVisitor;
        impl<'de> Visitor<'de> for CxVisitor {
            type Value = Cx;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or a two-element [re, im] array")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cx, E> {
                Ok(Cx(C64::new(v, 0.0)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cx, E> {
                Ok(Cx(C64::new(v as f64, 0.0)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cx, E> {
                Ok(Cx(C64::new(v as f64, 0.0)))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Cx, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Cx(C64::new(re, im)))
            }
        }
        deserializer.deserialize_any(CxVisitor)
    }
}

/// A named seminorm defining matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: Vec<Vec<Cx>>,
}

/// Tolerances and size limits; every field has a default so scenarios only
/// state what they override.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Settings {
    pub tol_rel: f64,
    pub n_max: usize,
    pub cluster_tol: Option<f64>,
    pub support_tol: f64,
    pub allow_degenerate: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol_rel: 1e-9,
            n_max: 64,
            cluster_tol: None,
            support_tol: 1e-8,
            allow_degenerate: false,
        }
    }
}

/// One self-contained analysis input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub space_dim: usize,
    pub calibration: Vec<NamedMatrix>,
    #[serde(default)]
    pub operators: IndexMap<String, Vec<Vec<Cx>>>,
    #[serde(default)]
    pub vectors: IndexMap<String, Vec<Cx>>,
    #[serde(default)]
    pub settings: Settings,
}

fn matrix_from_rows(rows: &[Vec<Cx>], path: &str) -> Result<ComplexMatrix, CliError> {
    let data: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|c| c.0).collect()).collect();
    ComplexMatrix::from_rows(&data).map_err(|e| CliError::Validation(format!("{path}: {e}")))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Structural validation: shapes, names, and the separating property
    /// (unless explicitly disabled).
    pub fn validate(&self) -> Result<(), CliError> {
        if self.space_dim == 0 {
            return Err(CliError::Validation("space_dim: must be at least 1".into()));
        }
        self.build_calibration()?;
        for (name, rows) in &self.operators {
            let m = matrix_from_rows(rows, &format!("operators.{name}"))?;
            if !m.is_square() || m.rows() != self.space_dim {
                return Err(CliError::Validation(format!(
                    "operators.{name}: expected {0}x{0}, got {1}x{2}",
                    self.space_dim,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        for (name, entries) in &self.vectors {
            if entries.len() != self.space_dim {
                return Err(CliError::Validation(format!(
                    "vectors.{name}: expected dimension {}, got {}",
                    self.space_dim,
                    entries.len()
                )));
            }
        }
        Ok(())
    }

    pub fn build_calibration(&self) -> Result<Calibration, CliError> {
        if self.calibration.is_empty() {
            return Err(CliError::Validation(
                "calibration: must contain at least one seminorm".into(),
            ));
        }
        let mut seminorms = Vec::with_capacity(self.calibration.len());
        for (i, named) in self.calibration.iter().enumerate() {
            let path = format!("calibration[{i}] (`{}`)", named.name);
            let matrix = matrix_from_rows(&named.matrix, &path)?;
            if matrix.cols() != self.space_dim {
                return Err(CliError::Validation(format!(
                    "{path}: defining matrix has {} columns, expected {}",
                    matrix.cols(),
                    self.space_dim
                )));
            }
            seminorms.push(
                Seminorm::new(named.name.clone(), matrix)
                    .map_err(|e| CliError::Validation(format!("{path}: {e}")))?,
            );
        }
        let result = if self.settings.allow_degenerate {
            Calibration::new_allow_degenerate(self.space_dim, seminorms)
        } else {
            Calibration::new(self.space_dim, seminorms)
        };
        result.map_err(|e| CliError::Validation(format!("calibration: {e}")))
    }

    pub fn operator(&self, name: &str) -> Result<ComplexMatrix, CliError> {
        let rows = self
            .operators
            .get(name)
            .ok_or_else(|| CliError::UnknownName(format!("operator `{name}`")))?;
        matrix_from_rows(rows, &format!("operators.{name}"))
    }

    pub fn vector(&self, name: &str) -> Result<ComplexVector, CliError> {
        let entries = self
            .vectors
            .get(name)
            .ok_or_else(|| CliError::UnknownName(format!("vector `{name}`")))?;
        ComplexVector::new(entries.iter().map(|c| c.0).collect())
            .map_err(|e| CliError::Validation(format!("vectors.{name}: {e}")))
    }

    /// Helpers for building scenarios programmatically (corpus generation).
    pub fn encode_matrix(m: &ComplexMatrix) -> Vec<Vec<Cx>> {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| Cx(m[(i, j)])).collect())
            .collect()
    }

    pub fn encode_vector(v: &ComplexVector) -> Vec<Cx> {
        v.entries().iter().map(|&z| Cx(z)).collect()
    }
}
