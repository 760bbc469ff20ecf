//! Machine-readable run reports.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scenario::{NetSpec, ScenarioConfig};

/// Floats are written in scientific notation with 17 significant digits;
/// non-finite values become `null` and read back as `+∞`.
mod sci {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            let raw = RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub samples: usize,
    #[serde(with = "sci")]
    pub max_residual: f64,
    #[serde(with = "sci")]
    pub scale: f64,
    pub pass: bool,
    #[serde(with = "sci")]
    pub seconds: f64,
}

impl Record {
    /// `pass` is derived from the residual; NaN counts as a failure.
    pub fn new(name: &str, samples: usize, max_residual: f64, scale: f64, tolerance: f64, seconds: f64) -> Self {
        let max_residual = if max_residual.is_nan() { f64::INFINITY } else { max_residual };
        Self {
            name: name.to_string(),
            samples,
            max_residual,
            scale,
            pass: max_residual < tolerance,
            seconds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEcho {
    pub seed: u64,
    pub dim: usize,
    pub grading: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net: Option<NetSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    pub k: usize,
    pub k_outer: usize,
    #[serde(with = "sci")]
    pub d: f64,
    #[serde(with = "sci")]
    pub d_kernel_normalized: f64,
    /// `1 − |c|` with `c = tr(g_rest ρ_rest)`, present for product states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<SciF64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SciF64(#[serde(with = "sci")] pub f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub k: usize,
    pub dim: usize,
    #[serde(with = "sci")]
    pub vacuum: f64,
    #[serde(with = "sci")]
    pub containment: f64,
    #[serde(with = "sci")]
    pub agreement: f64,
    #[serde(with = "sci")]
    pub restriction: f64,
    #[serde(with = "sci")]
    pub projection_defect: f64,
    #[serde(with = "sci")]
    pub monotonicity_margin: f64,
    /// Graded-KMS residual of the restriction under its own reduced flow.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graded_kms: Option<SciF64>,
}

/// Quantities that are recorded but never asserted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NetSection {
    pub product: bool,
    pub discrepancy: Vec<DiscrepancyRow>,
    pub regions: Vec<RegionRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_drift: Option<SciF64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub scenario: ScenarioEcho,
    #[serde(with = "sci")]
    pub tolerance: f64,
    pub records: Vec<Record>,
    /// Checks not run because a prerequisite failed.
    pub skipped: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net: Option<NetSection>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    /// Records sorted by name, as emitted.
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.name.cmp(&b.name));
        self.skipped.sort();
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One line per record.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "{:<32} {} residual {:.3e} ({} samples, {:.2}s)\n",
                r.name,
                if r.pass { "PASS" } else { "FAIL" },
                r.max_residual,
                r.samples,
                r.seconds
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("{s:<32} SKIP\n"));
        }
        out
    }
}

pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    let mut sorted = report.clone();
    sorted.sort();
    std::fs::write(path, sorted.to_json()?)?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<Report> {
    Report::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            version: "v".into(),
            scenario: ScenarioEcho {
                seed: 1,
                dim: 2,
                grading: vec![1, -1],
                config: Some(ScenarioConfig::explicit(1, 1, 1, vec![0.75, 0.25])),
                net: None,
            },
            tolerance: 1e-9,
            records: vec![
                Record::new("zeta", 3, 0.1 + 0.2, 1.0, 1e-9, 0.001),
                Record::new("alpha", 3, f64::NAN, 1.0, 1e-9, 0.0),
                Record::new("beta", 3, 1.234_567_890_123_456_7e-13, 3.0, 1e-9, 1.0 / 3.0),
            ],
            skipped: vec!["gns".into()],
            net: Some(NetSection {
                product: true,
                discrepancy: vec![DiscrepancyRow {
                    k: 1,
                    k_outer: 2,
                    d: 0.8,
                    d_kernel_normalized: 0.8,
                    closed_form: Some(SciF64(0.8)),
                }],
                regions: vec![],
                growth_exponent: Some(0),
                sigma_drift: None,
            }),
        }
    }

    #[test]
    fn round_trip() {
        let mut r = sample();
        r.sort();
        let text = r.to_json().unwrap();
        assert_eq!(Report::from_json(&text).unwrap(), r);
        assert!(text.contains("\"max_residual\": 3.0000000000000004e-1"));
        assert!(text.contains("\"max_residual\": null"));
        assert_eq!(r.records[0].name, "alpha");
    }

    #[test]
    fn pass_flag_and_exit_code() {
        let r = sample();
        assert!(!r.records[0].pass);
        assert!(!r.records[1].pass);
        assert!(r.records[2].pass);
        assert_eq!(r.exit_code(), 1);
        let ok = Report {
            records: vec![r.records[2].clone()],
            ..r
        };
        assert_eq!(ok.exit_code(), 0);
    }

    #[test]
    fn emit_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        emit_report(&sample(), &path).unwrap();
        let mut expected = sample();
        expected.sort();
        assert_eq!(load_report(&path).unwrap(), expected);
    }
}
