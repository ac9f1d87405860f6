//! Result files. Floats in CSV are written with 17 significant digits in
//! scientific notation, rows end in LF.

use std::path::{Path, PathBuf};

use catguard::protocol::{ProtocolConfig, RngAlgorithm};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// `d.dddddddddddddddde±x`, enough digits to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub const STEP_COLUMNS: [&str; 8] = [
    "step",
    "t",
    "alpha_n_abs",
    "p_e_analytic",
    "p_e_empirical",
    "se",
    "fidelity_even_mean",
    "parity_mean",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub step: usize,
    pub t: f64,
    pub alpha_n_abs: f64,
    pub p_e_analytic: f64,
    pub p_e_empirical: f64,
    pub se: f64,
    pub fidelity_even_mean: f64,
    pub parity_mean: f64,
}

impl StepRow {
    fn record(&self) -> [String; 8] {
        [
            self.step.to_string(),
            float(self.t),
            float(self.alpha_n_abs),
            float(self.p_e_analytic),
            float(self.p_e_empirical),
            float(self.se),
            float(self.fidelity_even_mean),
            float(self.parity_mean),
        ]
    }
}

/// Written next to the CSV, or as the whole output in JSON mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    /// The fully resolved configuration that was run.
    pub config: ProtocolConfig,
    pub trials: usize,
    pub seed: u64,
    pub rng: RngAlgorithm,
    pub all_upper_frequency: f64,
    pub all_upper_se: f64,
    pub all_upper_analytic: f64,
    pub mean_final_fidelity_even: f64,
    pub final_fidelity_se: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepRow>>,
}

pub fn steps_csv(rows: &[StepRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(STEP_COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    into_bytes(w)
}

/// A CSV with a header and pre-formatted cells.
pub fn table_csv(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    into_bytes(w)
}

fn into_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("plain data always serializes");
    bytes.push(b'\n');
    bytes
}

/// `runs/out.csv` → `runs/out.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
