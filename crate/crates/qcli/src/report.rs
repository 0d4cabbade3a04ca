//! Experiment reports and their JSON and CSV encodings.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub type Fields = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub inputs: Fields,
    pub outputs: Fields,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Row {
    /// A residual that is not a finite number is recorded as `f64::MAX`, so
    /// the row fails and the report still round-trips through JSON.
    pub fn new(inputs: Fields, outputs: Fields, residual: f64, tolerance: f64) -> Self {
        let residual = if residual.is_finite() { residual } else { f64::MAX };
        Self { inputs, outputs, residual, tolerance, pass: residual <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: Fields,
    pub rows: Vec<Row>,
    pub meta: Meta,
}

/// `kv!{"t" => 1.0, "check" => "tail"}` builds a [`Fields`] map; values go
/// through `serde_json::Value::from`.
macro_rules! kv {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = $crate::report::Fields::new();
        $( m.insert(String::from($k), serde_json::Value::from($v)); )*
        m
    }};
}
pub(crate) use kv;

/// Adds `<key>_re` and `<key>_im`.
pub fn put_complex(f: &mut Fields, key: &str, z: Complex64) {
    f.insert(format!("{key}_re"), z.re.into());
    f.insert(format!("{key}_im"), z.im.into());
}

impl ExperimentReport {
    pub fn new(experiment: &str, params: Fields, rows: Vec<Row>, seed: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            params,
            rows,
            meta: Meta { version: env!("CARGO_PKG_VERSION").to_string(), seed },
        }
    }

    /// Replaces every row tolerance and recomputes the pass flags.
    pub fn override_tolerance(&mut self, tol: f64) {
        for row in &mut self.rows {
            row.tolerance = tol;
            row.pass = row.residual <= tol;
        }
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = (usize, &Row)> {
        self.rows.iter().enumerate().filter(|(_, r)| !r.pass)
    }

    /// Pretty JSON with sorted keys and shortest round-trip floats.
    pub fn to_json(&self) -> String {
        // Going through `Value` sorts struct fields along with map keys.
        let value = serde_json::to_value(self).expect("reports contain only finite numbers");
        let mut s = serde_json::to_string_pretty(&value).expect("values always serialize");
        s.push('\n');
        s
    }

    /// One CSV record per row: sorted input columns, sorted output columns,
    /// then residual, tolerance and pass. Rows lacking a column leave it empty.
    pub fn to_csv(&self) -> io::Result<String> {
        let mut ins: Vec<&String> = self.rows.iter().flat_map(|r| r.inputs.keys()).collect();
        let mut outs: Vec<&String> = self.rows.iter().flat_map(|r| r.outputs.keys()).collect();
        ins.sort();
        ins.dedup();
        outs.sort();
        outs.dedup();
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = ins
            .iter()
            .map(|k| format!("in.{k}"))
            .chain(outs.iter().map(|k| format!("out.{k}")))
            .chain(["residual", "tolerance", "pass"].map(String::from))
            .collect();
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec: Vec<String> = ins.iter().map(|k| cell(row.inputs.get(*k))).collect();
            rec.extend(outs.iter().map(|k| cell(row.outputs.get(*k))));
            rec.push(Value::from(row.residual).to_string());
            rec.push(Value::from(row.tolerance).to_string());
            rec.push(row.pass.to_string());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes the requested encodings into `dir` and returns the paths.
    pub fn write(&self, dir: &Path, json: bool, csv: bool) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if json {
            let p = dir.join(format!("{}.json", self.experiment));
            fs::write(&p, self.to_json())?;
            written.push(p);
        }
        if csv {
            let p = dir.join(format!("{}.csv", self.experiment));
            fs::write(&p, self.to_csv()?)?;
            written.push(p);
        }
        Ok(written)
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}
