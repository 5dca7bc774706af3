//! Tidy result tables with provenance.
//!
//! Every row is (parameter values..., quantity, value, std_error). Rows are
//! validated on insertion — a non-finite value is an error, never silently
//! written — and both serializations are deterministic functions of the
//! data, so re-running a config with the same base seed reproduces the
//! files byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub base_seed: u64,
    pub code_version: String,
}

impl Provenance {
    pub fn new(config_sha256: &str, base_seed: u64) -> Self {
        Self {
            config_sha256: config_sha256.to_owned(),
            base_seed,
            code_version: env!("CARGO_PKG_VERSION").to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Aligned with the dataset's `params` names.
    pub params: Vec<f64>,
    pub quantity: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    pub schema_version: u32,
    pub experiment: String,
    pub provenance: Provenance,
    /// Parameter column names, in CSV order.
    pub params: Vec<String>,
    pub rows: Vec<Row>,
}

impl DataSet {
    pub fn new(experiment: &str, params: &[&str], provenance: Provenance) -> Self {
        Self {
            schema_version: DATASET_SCHEMA_VERSION,
            experiment: experiment.to_owned(),
            provenance,
            params: params.iter().map(|s| (*s).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append one row, rejecting NaN/inf rather than emitting it.
    pub fn push(
        &mut self,
        params: &[f64],
        quantity: &str,
        value: f64,
        std_error: Option<f64>,
    ) -> Result<(), CliError> {
        if params.len() != self.params.len() {
            return Err(CliError::Runtime(format!(
                "row for {quantity:?} has {} parameters, dataset has {}",
                params.len(),
                self.params.len()
            )));
        }
        let finite = params.iter().all(|p| p.is_finite())
            && value.is_finite()
            && std_error.map_or(true, |e| e.is_finite() && e >= 0.0);
        if !finite {
            return Err(CliError::Runtime(format!(
                "non-finite result for {quantity:?} at {:?} (value {value}, err {std_error:?})",
                params
            )));
        }
        self.rows.push(Row {
            params: params.to_vec(),
            quantity: quantity.to_owned(),
            value,
            std_error,
        });
        Ok(())
    }

    // --- lookup helpers for plotting and tests ---

    /// (param[x_index], value, std_error) of every row with this quantity.
    pub fn series(&self, x_param: &str, quantity: &str) -> Vec<(f64, f64, Option<f64>)> {
        let Some(ix) = self.params.iter().position(|p| p == x_param) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| (r.params[ix], r.value, r.std_error))
            .collect()
    }

    /// Join two quantities on identical parameter vectors: (x, y, y_err).
    pub fn joined(&self, x_quantity: &str, y_quantity: &str) -> Vec<(f64, f64, Option<f64>)> {
        let mut out = Vec::new();
        for y in self.rows.iter().filter(|r| r.quantity == y_quantity) {
            if let Some(x) = self
                .rows
                .iter()
                .find(|r| r.quantity == x_quantity && bits_eq(&r.params, &y.params))
            {
                out.push((x.value, y.value, y.std_error));
            }
        }
        out
    }

    /// First value carrying this quantity, if any.
    pub fn scalar(&self, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.quantity == quantity)
            .map(|r| r.value)
    }

    // --- serialization ---

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.params {
            out.push_str(p);
            out.push(',');
        }
        out.push_str("quantity,value,std_error\n");
        for row in &self.rows {
            for p in &row.params {
                out.push_str(&format!("{p},"));
            }
            out.push_str(&row.quantity);
            out.push(',');
            out.push_str(&format!("{}", row.value));
            out.push(',');
            if let Some(e) = row.std_error {
                out.push_str(&format!("{e}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        let csv = dir.join("dataset.csv");
        std::fs::write(&csv, self.to_csv())
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", csv.display())))?;
        let json = dir.join("dataset.json");
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Runtime(format!("serialize dataset: {e}")))?;
        std::fs::write(&json, text + "\n")
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", json.display())))?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
        let ds: DataSet = serde_json::from_str(&text)
            .map_err(|e| CliError::Runtime(format!("cannot parse {}: {e}", path.display())))?;
        if ds.schema_version != DATASET_SCHEMA_VERSION {
            return Err(CliError::Runtime(format!(
                "dataset schema_version {} unsupported (this build reads {DATASET_SCHEMA_VERSION})",
                ds.schema_version
            )));
        }
        Ok(ds)
    }
}

fn bits_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}
