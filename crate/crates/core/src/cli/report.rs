use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::discrete::report::fmt12;
use crate::discrete::ExperimentRecord;

/// Output value: numbers are rounded to 12 significant digits on output;
/// non-finite numbers serialize as `"inf"`, `"-inf"` or `"nan"`.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Num(x) => fmt12(*x),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Num(x) if x.is_finite() => s.serialize_f64(fmt12(*x).parse().expect("formatted float parses")),
            Value::Num(x) => s.serialize_str(&fmt12(*x)),
            Value::Text(t) => s.serialize_str(t),
            Value::Bool(b) => s.serialize_bool(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    pub name: String,
    pub value: Value,
    /// Tolerance of the computation that produced a numeric value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error { message: String },
}

/// Rows of raw samples or of a printed table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",") + "\n";
        for r in &self.rows {
            out += &(r.join(",") + "\n");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<Output>,
    pub provenance: Provenance,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<ExperimentRecord>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            provenance: Provenance {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                seed: None,
                tolerances: BTreeMap::new(),
            },
            status: Status::Ok,
            table: None,
            record: None,
        }
    }

    pub fn input(&mut self, key: &str, v: impl ToString) {
        self.inputs.insert(key.to_string(), v.to_string());
    }

    pub fn num(&mut self, name: &str, v: f64, tol: f64) {
        self.outputs.push(Output {
            name: name.to_string(),
            value: Value::Num(v),
            tolerance: Some(tol),
        });
    }

    pub fn text(&mut self, name: &str, v: impl ToString) {
        self.outputs.push(Output {
            name: name.to_string(),
            value: Value::Text(v.to_string()),
            tolerance: None,
        });
    }

    pub fn flag(&mut self, name: &str, v: bool) {
        self.outputs.push(Output {
            name: name.to_string(),
            value: Value::Bool(v),
            tolerance: None,
        });
    }

    pub fn tolerance(&mut self, name: &str, v: f64) {
        self.provenance.tolerances.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.outputs.iter().find(|o| o.name == name).map(|o| &o.value)
    }

    pub fn get_num(&self, name: &str) -> Option<f64> {
        match self.get(name) {
            Some(Value::Num(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\nstatus: ok\n", self.command);
        for (k, v) in &self.inputs {
            out += &format!("input {k} = {v}\n");
        }
        for o in &self.outputs {
            match o.tolerance {
                Some(t) => out += &format!("{} = {}  (tol {})\n", o.name, o.value.render(), fmt12(t)),
                None => out += &format!("{} = {}\n", o.name, o.value.render()),
            }
        }
        if let Some(seed) = self.provenance.seed {
            out += &format!("seed = {seed}\n");
        }
        if let Some(t) = &self.table {
            out += &t.to_csv();
        }
        out
    }

    /// The table if there is one, otherwise `name,value,tolerance` rows.
    pub fn to_csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.to_csv();
        }
        let mut out = String::from("name,value,tolerance\n");
        for o in &self.outputs {
            out += &format!("{},{},{}\n", o.name, o.value.render(), o.tolerance.map(fmt12).unwrap_or_default());
        }
        out
    }

    pub fn to_structured(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Single-line error record.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord<'a> {
    pub status: &'static str,
    pub command: &'a str,
    pub stage: &'a str,
    pub message: String,
}

impl ErrorRecord<'_> {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("error record serializes")
    }
}
