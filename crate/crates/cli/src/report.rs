//! `report-v1` documents and CSV tables.

use std::io::Write;

use fermatlab_core::jets::{Rule, Verdict as JetVerdict};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::CommandKind;
use crate::error::CliError;

pub const SCHEMA: &str = "report-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `observed ≤ bound`.
    Le,
    /// `observed ≥ bound`.
    Ge,
    /// `observed == bound`.
    Eq,
    /// `bound ⇒ observed` (booleans).
    Implies,
}

/// A predicate check, recomputable from `observed`, `relation` and `bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub relation: Relation,
    pub observed: Value,
    pub bound: Value,
    pub pass: bool,
}

impl Verdict {
    pub fn le(id: impl Into<String>, observed: f64, bound: f64) -> Verdict {
        Verdict { id: id.into(), relation: Relation::Le, observed: observed.into(), bound: bound.into(), pass: observed <= bound }
    }

    pub fn ge(id: impl Into<String>, observed: f64, bound: f64) -> Verdict {
        Verdict { id: id.into(), relation: Relation::Ge, observed: observed.into(), bound: bound.into(), pass: observed >= bound }
    }

    pub fn eq(id: impl Into<String>, observed: impl Into<Value>, bound: impl Into<Value>) -> Verdict {
        let (observed, bound) = (observed.into(), bound.into());
        let pass = observed == bound;
        Verdict { id: id.into(), relation: Relation::Eq, observed, bound, pass }
    }

    pub fn from_jet(v: &JetVerdict, suffix: &str) -> Verdict {
        Verdict {
            id: format!("{}{suffix}", v.id),
            relation: match v.rule {
                Rule::Iff => Relation::Eq,
                Rule::Implies => Relation::Implies,
            },
            observed: v.observed.into(),
            bound: v.expected.into(),
            pass: v.pass,
        }
    }

    /// Re-evaluates the relation on the stored values.
    pub fn recompute(&self) -> Option<bool> {
        match self.relation {
            Relation::Le => Some(self.observed.as_f64()? <= self.bound.as_f64()?),
            Relation::Ge => Some(self.observed.as_f64()? >= self.bound.as_f64()?),
            Relation::Eq => Some(self.observed == self.bound),
            Relation::Implies => Some(!self.bound.as_bool()? || self.observed.as_bool()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub tool: Tool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
    pub command: CommandKind,
    pub config: Value,
    pub results: Vec<Value>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

impl ReportDocument {
    pub fn new(command: CommandKind, config: Value, results: Vec<Value>, verdicts: Vec<Verdict>) -> ReportDocument {
        let pass = verdicts.iter().all(|v| v.pass);
        ReportDocument {
            schema: SCHEMA.into(),
            tool: Tool { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() },
            generated_unix: None,
            command,
            config,
            results,
            verdicts,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Plain table written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Table {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Number formatting for CSV cells (shortest round-trip form).
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
