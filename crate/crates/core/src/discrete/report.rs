//! Structured experiment records: `{experiment, grid, field_digest, seed,
//! parameters, metrics}`.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::grid::BoxGrid;
use crate::coeff::{to_json_string, MatrixField};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridInfo {
    pub d: usize,
    pub n: usize,
    pub side: f64,
    pub periodic: bool,
}

impl From<&BoxGrid> for GridInfo {
    fn from(g: &BoxGrid) -> Self {
        Self {
            d: g.d(),
            n: g.cells_per_axis(),
            side: g.side(),
            periodic: g.periodic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub grid: GridInfo,
    pub field_digest: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
}

/// SHA-256 of the canonical JSON serialization, hex encoded.
pub fn field_digest(field: &MatrixField) -> String {
    Sha256::digest(to_json_string(field).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl ExperimentRecord {
    pub fn new(experiment: &str, grid: &BoxGrid, field: &MatrixField, seed: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            grid: grid.into(),
            field_digest: field_digest(field),
            seed,
            parameters: BTreeMap::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, v: f64) -> Self {
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn metric(mut self, key: &str, v: f64) -> Self {
        self.metrics.insert(key.to_string(), v);
        self
    }

    /// `section,key,value` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,key,value\n");
        out += &format!("record,experiment,{}\n", self.experiment);
        out += &format!("record,field_digest,{}\n", self.field_digest);
        out += &format!("record,seed,{}\n", self.seed);
        out += &format!("grid,d,{}\ngrid,n,{}\n", self.grid.d, self.grid.n);
        out += &format!("grid,side,{}\ngrid,periodic,{}\n", fmt12(self.grid.side), self.grid.periodic);
        for (k, v) in &self.parameters {
            out += &format!("parameters,{k},{}\n", fmt12(*v));
        }
        for (k, v) in &self.metrics {
            out += &format!("metrics,{k},{}\n", fmt12(*v));
        }
        out
    }
}

/// 12 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn fmt12(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.11e}")
    }
}
