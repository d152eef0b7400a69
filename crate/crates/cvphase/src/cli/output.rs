use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use super::{CliError, VERSION};

/// Seventeen significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub seed: Option<u64>,
    /// (name, unit)
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
    pub footer: Vec<(String, String)>,
}

impl Table {
    pub fn new(command: &str, parameters: Map<String, Value>, seed: Option<u64>, columns: &[(&str, &str)]) -> Self {
        Self {
            command: command.into(),
            parameters,
            seed,
            columns: columns.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.footer.push((key.into(), value.into()));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# cvphase {VERSION}\n# command: {}\n", self.command));
        match self.seed {
            Some(v) => s.push_str(&format!("# seed: {v}\n")),
            None => s.push_str("# seed: none\n"),
        }
        for (k, v) in &self.parameters {
            s.push_str(&format!("# param {k} = {v}\n"));
        }
        let cols: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        s.push_str(&format!("# columns: {}\n", cols.join(", ")));
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        s.push_str(&names.join(","));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format_float(*x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for (k, v) in &self.footer {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Csv(Table),
    Json(Value),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Csv(t) => t.render(),
            Output::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }

    pub fn write(&self, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
        }
    }
}
