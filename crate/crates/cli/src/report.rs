use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<u64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// `residual < threshold`; NaN fails.
    pub fn below(name: impl Into<String>, residual: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            residual: Some(residual),
            threshold: Some(threshold),
            computed: None,
            expected: None,
            pass: residual < threshold,
            detail: None,
        }
    }

    pub fn count(name: impl Into<String>, computed: u64, expected: u64) -> Check {
        Check {
            name: name.into(),
            residual: None,
            threshold: None,
            computed: Some(computed),
            expected: Some(expected),
            pass: computed == expected,
            detail: None,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Check {
        Check { name: name.into(), residual: None, threshold: None, computed: None, expected: None, pass, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub command: String,
    /// SHA-256 of the resolved configuration, points and command inputs.
    pub input_digest: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl VerificationReport {
    pub fn new(command: &str, inputs: &impl Serialize, checks: Vec<Check>, data: Option<serde_json::Value>) -> Self {
        let bytes = serde_json::to_vec(inputs).expect("inputs serialize");
        let input_digest = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        let pass = checks.iter().all(|c| c.pass);
        VerificationReport { command: command.to_string(), input_digest, pass, checks, data }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Output(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["name", "residual", "threshold", "computed", "expected", "pass", "detail"])
                    .map_err(|e| CliError::Output(e.to_string()))?;
                let opt = |x: Option<String>| x.unwrap_or_default();
                for c in &self.checks {
                    w.write_record([
                        c.name.clone(),
                        opt(c.residual.map(|x| format!("{x:e}"))),
                        opt(c.threshold.map(|x| format!("{x:e}"))),
                        opt(c.computed.map(|x| x.to_string())),
                        opt(c.expected.map(|x| x.to_string())),
                        c.pass.to_string(),
                        opt(c.detail.clone()),
                    ])
                    .map_err(|e| CliError::Output(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residual_fails() {
        assert!(!Check::below("x", f64::NAN, 1.0).pass);
        assert!(Check::below("x", 0.5, 1.0).pass);
    }

    #[test]
    fn overall_pass_requires_every_check() {
        let r = VerificationReport::new("t", &1, vec![Check::flag("a", true), Check::count("b", 2, 3)], None);
        assert!(!r.pass);
        assert_eq!(r.failed().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["b"]);
        assert_eq!(r.input_digest.len(), 64);
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let r = VerificationReport::new("t", &1, vec![Check::below("a", 1e-12, 1e-9), Check::count("b", 3, 3)], None);
        let s = r.render(Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "a,1e-12,1e-9,,,true,");
        assert_eq!(lines[2], "b,,,3,3,true,");
    }
}
