//! Report assembly. A report is one TOML document with a `[run]` echo, a
//! `[results]` table, one `[[verdict]]` entry per check and an `[outcome]`.

use g2ambient_core::{Scalar, Q};
use toml::{Table, Value};

use crate::config::RunConfig;

/// Where a numeric value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Determined by the computation inside the truncation.
    Computed,
    /// Capped by the jet truncation; the true value may be larger.
    TruncationLimited,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Computed => "computed",
            Provenance::TruncationLimited => "truncation-limited",
        }
    }
    /// `TruncationLimited` when `value` reached `limit`.
    pub fn of_order(value: u32, limit: u32) -> Provenance {
        if value >= limit {
            Provenance::TruncationLimited
        } else {
            Provenance::Computed
        }
    }
}

/// A numeric field tagged with its provenance.
pub fn measured(value: impl Into<Value>, p: Provenance) -> Value {
    let mut t = Table::new();
    t.insert("value".into(), value.into());
    t.insert("provenance".into(), Value::String(p.name().into()));
    Value::Table(t)
}

/// An order that may be unbounded within the truncation (`u32::MAX`).
pub fn order_value(v: u32) -> Value {
    if v == u32::MAX {
        Value::String("unbounded".into())
    } else {
        Value::Integer(v as i64)
    }
}

pub fn int(v: impl TryInto<i64>) -> Value {
    Value::Integer(v.try_into().unwrap_or(i64::MAX))
}

/// Scalars usable by the driver: exact rationals or floats.
pub trait Num: Scalar {
    fn from_q(q: &Q) -> Self;
    fn value(&self) -> Value;
}

impl Num for Q {
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn value(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl Num for f64 {
    fn from_q(q: &Q) -> Self {
        q.to_f64()
    }
    fn value(&self) -> Value {
        Value::Float(*self)
    }
}

pub fn num<S: Num>(v: &S) -> Value {
    measured(v.value(), Provenance::Computed)
}

pub fn matrix_value<S: Num>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|x| x.value()).collect())).collect())
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Verdict {
        Verdict { name: name.into(), pass, detail: detail.into() }
    }
}

/// Results of a successful pipeline run.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub results: Table,
    pub verdicts: Vec<Verdict>,
}

impl Outcome {
    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.into(), v.into());
    }
    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict::new(name, pass, detail));
    }
}

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    InvalidInput,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::InvalidInput => 2,
        }
    }
    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::InvalidInput => "invalid-input",
        }
    }
}

/// Failure details for the `[outcome]` section.
#[derive(Clone, Debug)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub diagnostic: Vec<String>,
}

pub fn run_table(cfg: Option<&RunConfig>, command_name: Option<&str>) -> Table {
    let mut t = Table::new();
    if let Some(c) = cfg {
        t.insert("command".into(), Value::String(c.command.name().into()));
        t.insert("mode".into(), Value::String(c.mode.name().into()));
        t.insert("x_order".into(), int(c.x_order));
        t.insert("rho_order".into(), int(c.rho_order));
        t.insert("tolerance".into(), Value::Float(c.tolerance));
        if let Some(d) = c.dimension {
            t.insert("dimension".into(), int(d));
        }
    } else if let Some(n) = command_name {
        t.insert("command".into(), Value::String(n.into()));
    }
    t
}

pub fn render(run: Table, result: std::result::Result<&Outcome, &Failure>, elapsed_ms: Option<f64>) -> (String, Status) {
    let mut doc = Table::new();
    doc.insert("run".into(), Value::Table(run));
    let mut outcome = Table::new();
    let status = match result {
        Ok(o) => {
            doc.insert("results".into(), Value::Table(o.results.clone()));
            let vs: Vec<Value> = o
                .verdicts
                .iter()
                .map(|v| {
                    let mut t = Table::new();
                    t.insert("name".into(), Value::String(v.name.clone()));
                    t.insert("pass".into(), Value::Boolean(v.pass));
                    t.insert("detail".into(), Value::String(v.detail.clone()));
                    Value::Table(t)
                })
                .collect();
            if !vs.is_empty() {
                doc.insert("verdict".into(), Value::Array(vs));
            }
            let failed: Vec<Value> =
                o.verdicts.iter().filter(|v| !v.pass).map(|v| Value::String(v.name.clone())).collect();
            let st = if failed.is_empty() { Status::Pass } else { Status::Fail };
            outcome.insert("failed_checks".into(), Value::Array(failed));
            st
        }
        Err(f) => {
            outcome.insert("error_kind".into(), Value::String(f.kind.clone()));
            outcome.insert("message".into(), Value::String(f.message.clone()));
            if !f.diagnostic.is_empty() {
                outcome.insert(
                    "diagnostic".into(),
                    Value::Array(f.diagnostic.iter().map(|s| Value::String(s.clone())).collect()),
                );
            }
            Status::InvalidInput
        }
    };
    outcome.insert("status".into(), Value::String(status.name().into()));
    outcome.insert("exit_code".into(), int(status.code()));
    doc.insert("outcome".into(), Value::Table(outcome));
    if let Some(ms) = elapsed_ms {
        let mut t = Table::new();
        t.insert("elapsed_ms".into(), Value::Float((ms * 1000.0).round() / 1000.0));
        doc.insert("timing".into(), Value::Table(t));
    }
    let text = toml::to_string(&doc).unwrap_or_else(|e| format!("# report serialization failed: {e}\n"));
    (text, status)
}
