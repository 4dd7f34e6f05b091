//! Deterministic CSV and manifest output: UTF-8, LF line endings, floats
//! printed with 17 significant digits so identical runs are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Result, SolverError};

/// Canonical float rendering (17 significant digits).
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// One value of a CSV row.
pub enum Field {
    Num(f64),
    Int(i64),
    Str(String),
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<i64> for Field {
    fn from(x: i64) -> Self {
        Field::Int(x)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Str(s.to_string())
    }
}

pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<Field>>,
) -> Result<()> {
    let mut body = String::new();
    body.push_str(&header.join(","));
    body.push('\n');
    for row in rows {
        let mut first = true;
        for field in row {
            if !first {
                body.push(',');
            }
            first = false;
            match field {
                Field::Num(x) => body.push_str(&fmt_float(x)),
                Field::Int(i) => {
                    let _ = write!(body, "{i}");
                }
                Field::Str(s) => body.push_str(&s),
            }
        }
        body.push('\n');
    }
    std::fs::write(path, body)
        .map_err(|e| SolverError::Config(format!("cannot write {}: {e}", path.display())))
}

/// One pass/fail entry of the run summary.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// Run summary written alongside the CSVs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub experiment: String,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// free-form extras (skipped eps lists, proxy errors, ...)
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(config_digest: String, experiment: &str, seed: u64) -> Self {
        RunManifest {
            config_digest,
            experiment: experiment.into(),
            seed,
            outputs: Vec::new(),
            checks: Vec::new(),
            passed: true,
            notes: Vec::new(),
        }
    }

    pub fn push_check(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn push_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| SolverError::Config(format!("manifest serialisation failed: {e}")))?;
        std::fs::write(&path, body + "\n")
            .map_err(|e| SolverError::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_is_stable() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_float(f64::NAN), "nan");
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
    }
}
