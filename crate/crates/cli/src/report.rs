//! Reports: a JSON document with every residual next to its tolerance and
//! verdict, CSV tables, and an optional SVG plot.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::GridSpec;
use crate::svg::LinePlot;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, relation: Relation, tol: f64) -> Self {
        let pass = match relation {
            Relation::Lt => value < tol,
            Relation::Le => value <= tol,
            Relation::Gt => value > tol,
            Relation::Ge => value >= tol,
            Relation::Eq => value == tol,
        };
        Self {
            name: name.into(),
            value,
            relation,
            tol,
            pass,
        }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Relation::Eq, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The computation succeeded and certified an obstruction or infeasibility.
    Infeasible,
    /// A check failed or a solver did not converge.
    NumericalFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Infeasible => 2,
            Status::NumericalFailure => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Self {
            name: name.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.headers.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip formatting; identical across runs.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub command: String,
    pub description: String,
    pub seed: u64,
    pub grid: Option<GridSpec>,
    pub tol: Option<f64>,
    pub status: Status,
    /// Why the run is infeasible or failed, when it is.
    pub reason: Option<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub results: serde_json::Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub plot: Option<LinePlot>,
}

impl Report {
    /// Final status: an explicit infeasibility wins, then failed checks.
    pub fn finish(mut self, infeasible: Option<String>) -> Self {
        self.passed = self.checks.iter().all(|c| c.pass);
        if let Some(r) = infeasible {
            self.status = Status::Infeasible;
            self.reason = Some(r);
        } else if !self.passed {
            self.status = Status::NumericalFailure;
            let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            self.reason = Some(format!("failed checks: {}", failed.join(", ")));
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn checks_csv(&self) -> String {
        let mut t = Table::new("checks", &["name", "value", "relation", "tol", "pass"]);
        for c in &self.checks {
            let rel = serde_json::to_value(c.relation).expect("serializes");
            t.push(vec![
                c.name.clone(),
                num(c.value),
                rel.as_str().unwrap_or("?").to_string(),
                num(c.tol),
                c.pass.to_string(),
            ]);
        }
        t.to_csv()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Writes the requested formats into `dir`; returns the files written.
pub fn write(report: &Report, dir: &Path, formats: &[Format]) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let stem = format!("{}.{}", report.scenario, report.command);
    let mut out = Vec::new();
    let mut put = |name: String, body: &str| -> io::Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        out.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            Format::Json => put(format!("{stem}.json"), &report.to_json())?,
            Format::Csv => {
                put(format!("{stem}.checks.csv"), &report.checks_csv())?;
                for t in &report.tables {
                    put(format!("{stem}.{}.csv", t.name), &t.to_csv())?;
                }
            }
            Format::Svg => {
                if let Some(p) = &report.plot {
                    put(format!("{stem}.svg"), &p.render())?;
                }
            }
        }
    }
    Ok(out)
}

/// One line per check, for the terminal.
pub fn summary(report: &Report) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let rel = serde_json::to_value(c.relation).expect("serializes");
        let _ = writeln!(
            s,
            "[{}] {} = {} {} {}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            num(c.value),
            rel.as_str().unwrap_or("?"),
            num(c.tol)
        );
    }
    let _ = write!(s, "status: {:?}", report.status);
    if let Some(r) = &report.reason {
        let _ = write!(s, " ({r})");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Check::new("a", 1.0, Relation::Lt, 2.0).pass);
        assert!(!Check::new("a", 2.0, Relation::Lt, 2.0).pass);
        assert!(Check::new("a", 2.0, Relation::Le, 2.0).pass);
        assert!(!Check::new("a", f64::NAN, Relation::Lt, 2.0).pass);
        assert!(Check::flag("f", true).pass && !Check::flag("f", false).pass);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec![num(0.5), num(-2.0)]);
        assert_eq!(t.to_csv(), "a,b\n5e-1,-2e0\n");
    }
}
