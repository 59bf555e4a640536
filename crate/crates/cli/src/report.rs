use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Command, ConfigEcho};
use crate::CliError;

pub const SCHEMA: &str = "qig-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">")]
    Above,
    /// The experiment raised an error before producing a value.
    #[serde(rename = "error")]
    Error,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Below => "<",
            Comparison::AtMost => "<=",
            Comparison::Above => ">",
            Comparison::Error => "error",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub comparison: Comparison,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, bound: f64, comparison: Comparison) -> Self {
        let pass = value.is_finite()
            && match comparison {
                Comparison::Below => value < bound,
                Comparison::AtMost => value <= bound,
                Comparison::Above => value > bound,
                Comparison::Error => false,
            };
        Self {
            name: name.into(),
            value,
            bound,
            comparison,
            pass,
            note: None,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, Comparison::Below)
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, Comparison::AtMost)
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, Comparison::Above)
    }

    pub fn error(name: impl Into<String>, message: impl Into<String>) -> Self {
        let mut c = Self::new(name, f64::NAN, f64::NAN, Comparison::Error);
        c.note = Some(message.into());
        c
    }
}

/// One row of the flat witness table exported by `--csv`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    pub experiment: String,
    pub subject: String,
    pub quantity: String,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub config: ConfigEcho,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub witnesses: BTreeMap<String, Value>,
    pub witness_table: Vec<WitnessRow>,
    pub verdict: Verdict,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// The report without its wall-clock field.
    pub fn body(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report is serializable");
        if let Value::Object(map) = &mut v {
            map.remove("wall_clock_seconds");
        }
        v
    }

    pub fn write_json(&self, path: &Path) -> Result<(), CliError> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: csv::Error| CliError::Csv(path.display().to_string(), e);
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        for row in &self.witness_table {
            w.serialize(row).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(path.display().to_string(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        assert!(Check::below("a", 0.5, 1.0).pass);
        assert!(!Check::below("a", 1.0, 1.0).pass);
        assert!(Check::at_most("a", 1.0, 1.0).pass);
        assert!(Check::above("a", 2.0, 1.0).pass);
        assert!(!Check::below("a", f64::NAN, 1.0).pass);
        assert!(!Check::error("a", "boom").pass);
    }

    #[test]
    fn comparison_symbols() {
        let s = serde_json::to_string(&Check::at_most("x", 0.0, 0.0)).unwrap();
        assert!(s.contains(r#""comparison":"<=""#));
        assert!(!s.contains("note"));
    }
}
