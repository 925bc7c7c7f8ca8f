//! The on-disk point-set format: a JSON object `{"p": ..., "points": [...]}`
//! with a canonical writer (sorted keys, 17-significant-digit floats) whose
//! output re-parses and re-serializes byte-identically.

use lpcheb::{LpSpace, PointSet};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed input: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("field {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Invalid { field: field.into(), message: message.into() }
}

/// A parsed point-set file. Constructing one through [`PointSetFile::parse`]
/// guarantees `p > 1`, rectangular rows, and finite coordinates.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetFile {
    pub p: f64,
    pub points: Vec<Vec<f64>>,
}

impl PointSetFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: Self = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), FormatError> {
        if !self.p.is_finite() || self.p <= 1.0 {
            return Err(invalid(
                "p",
                format!("must be a finite exponent greater than 1, got {}", self.p),
            ));
        }
        if self.points.is_empty() {
            return Err(invalid("points", "must contain at least one point"));
        }
        let dim = self.points[0].len();
        if dim == 0 {
            return Err(invalid("points[0]", "points must have at least one coordinate"));
        }
        for (i, row) in self.points.iter().enumerate() {
            if row.len() != dim {
                return Err(invalid(
                    format!("points[{i}]"),
                    format!("has {} coordinates, expected {dim}", row.len()),
                ));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(invalid(format!("points[{i}][{j}]"), "is not finite"));
                }
            }
        }
        Ok(())
    }

    pub fn to_point_set(&self) -> Result<PointSet, FormatError> {
        let space = LpSpace::new(self.p).map_err(|e| invalid("p", e.to_string()))?;
        PointSet::from_rows(space, self.points.clone())
            .map_err(|e| invalid("points", e.to_string()))
    }

    pub fn from_point_set(a: &PointSet) -> Self {
        Self {
            p: a.space().p(),
            points: a.iter().map(|row| row.to_vec()).collect(),
        }
    }

    /// Canonical serialization: keys in sorted order, every float printed
    /// with 17 significant digits so values survive a parse bit-exactly and
    /// parse-then-reserialize is byte-identical.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"p\": {},\n", fmt_float(self.p)));
        out.push_str("  \"points\": [\n");
        for (i, row) in self.points.iter().enumerate() {
            let coords: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
            let comma = if i + 1 < self.points.len() { "," } else { "" };
            out.push_str(&format!("    [{}]{comma}\n", coords.join(", ")));
        }
        out.push_str("  ]\n}\n");
        out
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
