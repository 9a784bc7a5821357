//! Run reports and their serializations.

use std::io::{self, Write};

use serde::{Deserialize, Serialize, Serializer};

use super::stats::{round_sig12, std_devs_off, wilson_interval, Z95};
use super::RunConfig;
use crate::digest::DigestHeader;

pub const SCHEMA_VERSION: u32 = 1;

fn sig12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig12(*x))
}

fn sig12_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig12(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub successes: u64,
    pub trials: u64,
    #[serde(serialize_with = "sig12")]
    pub empirical_rate: f64,
    #[serde(serialize_with = "sig12")]
    pub ci_low: f64,
    #[serde(serialize_with = "sig12")]
    pub ci_high: f64,
    #[serde(serialize_with = "sig12")]
    pub model_value: f64,
    #[serde(serialize_with = "sig12_opt")]
    pub std_devs_off: Option<f64>,
    /// A published figure shown beside the model value, when one exists.
    #[serde(serialize_with = "sig12_opt")]
    pub reference_value: Option<f64>,
}

impl Metric {
    pub fn new(name: &str, successes: u64, trials: u64, model_value: f64, reference_value: Option<f64>) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        let empirical_rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self {
            name: name.to_string(),
            successes,
            trials,
            empirical_rate,
            ci_low,
            ci_high,
            model_value,
            std_devs_off: std_devs_off(successes, trials, model_value),
            reference_value,
        }
    }

    /// Within `k` standard deviations of the model, treating an exact match
    /// of a deterministic model as zero deviation.
    pub fn within(&self, k: f64) -> bool {
        self.std_devs_off.is_some_and(|d| d.abs() <= k)
    }
}

/// Per-session quantum resources and total collision-search effort.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    /// Bell pairs consumed by one session (largest seen across trials).
    pub bell_pairs: u64,
    /// Eve- or Charlie-prepared qubits per session (largest seen).
    pub qubits: u64,
    /// Digest evaluations spent on collision search, summed over trials.
    pub collision_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub config: RunConfig,
    pub digest: Option<DigestHeader>,
    /// Hex of the key behind the split-secret bijection, when used.
    pub f_key_hex: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub experiment: String,
    pub config: ConfigEcho,
    pub metrics: Vec<Metric>,
    pub resources: Resources,
    #[serde(serialize_with = "sig12")]
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    /// The report with `wall_time_s` zeroed, for reproducibility checks.
    pub fn without_wall_time(&self) -> Self {
        Self { wall_time_s: 0.0, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    CsvSummary,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" | "csv-summary" => Ok(ReportFormat::CsvSummary),
            other => Err(crate::Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str =
    "metric,successes,trials,empirical_rate,ci_low,ci_high,model_value,std_devs_off,reference_value";

fn csv_float(x: f64) -> String {
    serde_json::to_string(&round_sig12(x)).unwrap_or_default()
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_float).unwrap_or_default()
}

pub fn emit_report<W: Write>(report: &RunReport, format: ReportFormat, mut out: W) -> io::Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")
        }
        ReportFormat::CsvSummary => {
            writeln!(out, "{CSV_HEADER}")?;
            for m in &report.metrics {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    m.name,
                    m.successes,
                    m.trials,
                    csv_float(m.empirical_rate),
                    csv_float(m.ci_low),
                    csv_float(m.ci_high),
                    csv_float(m.model_value),
                    csv_opt(m.std_devs_off),
                    csv_opt(m.reference_value),
                )?;
            }
            Ok(())
        }
    }
}

pub fn report_to_string(report: &RunReport, format: ReportFormat) -> String {
    let mut buf = Vec::new();
    emit_report(report, format, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("reports are UTF-8")
}
