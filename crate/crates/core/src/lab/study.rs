use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::csv::csv_opt;
use crate::error::{MfgError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Spectrum,
    HorizonError,
    StationaryGap,
    Perturbation,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Spectrum => "spectrum",
            StudyKind::HorizonError => "horizon-error",
            StudyKind::StationaryGap => "stationary-gap",
            StudyKind::Perturbation => "perturbation",
        }
    }
}

/// One checked inequality `lhs ≤ rhs + allowance`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    /// Grid key (horizon or time step) the inequality was checked at.
    pub at: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub allowance: f64,
}

impl Inequality {
    /// `rhs + allowance − lhs`; nonnegative when the inequality holds.
    pub fn slack(&self) -> f64 {
        self.rhs + self.allowance - self.lhs
    }
}

/// Pass/fail verdict of one family of inequalities.
///
/// `worst` is the inequality with the smallest slack. A flag with nothing to
/// check (`checked == 0`) passes vacuously and says so in `note`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    pub pass: bool,
    pub checked: usize,
    pub worst: Option<Inequality>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Flag {
    pub fn from_checks(name: &str, checks: impl IntoIterator<Item = Inequality>) -> Flag {
        let mut checked = 0;
        let mut worst: Option<Inequality> = None;
        for c in checks {
            checked += 1;
            if worst.map_or(true, |w| c.slack() < w.slack()) {
                worst = Some(c);
            }
        }
        let pass = worst.map_or(true, |w| w.slack() >= 0.0);
        let note = if checked == 0 { "nothing to check".to_string() } else { String::new() };
        Flag { name: name.to_string(), pass, checked, worst, note }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Flag {
        let note = note.into();
        if self.note.is_empty() {
            self.note = note;
        } else {
            self.note = format!("{}; {note}", self.note);
        }
        self
    }

    pub fn slack(&self) -> Option<f64> {
        self.worst.map(|w| w.slack())
    }
}

/// Output of a study: a table of observations, scalar diagnostics and flags.
///
/// Missing cells and undefined diagnostics are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub kind: StudyKind,
    /// Scalar inputs of the study (horizons, tolerances, probes).
    pub parameters: BTreeMap<String, f64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub diagnostics: BTreeMap<String, Option<f64>>,
    pub flags: Vec<Flag>,
}

impl StudyResult {
    pub fn new(kind: StudyKind, columns: &[&str]) -> StudyResult {
        StudyResult {
            kind,
            parameters: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            diagnostics: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from the header");
        self.rows.push(row);
    }

    pub fn param(&mut self, key: &str, value: f64) {
        self.parameters.insert(key.to_string(), value);
    }

    pub fn diag(&mut self, key: &str, value: Option<f64>) {
        self.diagnostics.insert(key.to_string(), value);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// The cells of column `name`, top to bottom.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn flag(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.flags.iter().all(|f| f.pass)
    }

    /// Header row with the column names, then one line per row; integer
    /// grid columns print without exponent.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&self.columns)
                .map(|(v, c)| match v {
                    Some(x) if is_grid_column(c) && x.fract() == 0.0 => format!("{}", *x as i64),
                    _ => csv_opt(*v),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Kind, parameters, diagnostics and flags, without the table.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "parameters": self.parameters,
            "diagnostics": self.diagnostics,
            "flags": self.flags,
            "all_pass": self.all_pass(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<StudyResult> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes `<stem>.csv` and `<stem>.json` (the summary) into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?;
        let summary = serde_json::to_string_pretty(&self.summary_json())?;
        std::fs::write(dir.join(format!("{stem}.json")), summary + "\n")?;
        Ok(())
    }
}

fn is_grid_column(name: &str) -> bool {
    matches!(name, "T" | "t")
}

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two
/// points or no spread in `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

pub(crate) fn check_grid(values: &[usize], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(MfgError::input(format!("{what} is empty")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MfgError::input(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        assert!((ls_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(ls_slope(&[1.0], &[2.0]), None);
        assert_eq!(ls_slope(&[1.0, 1.0], &[2.0, 3.0]), None);
    }

    #[test]
    fn flag_keeps_worst() {
        let f = Flag::from_checks(
            "x",
            [
                Inequality { at: 1.0, lhs: 0.5, rhs: 1.0, allowance: 0.0 },
                Inequality { at: 2.0, lhs: 0.9, rhs: 1.0, allowance: 0.0 },
            ],
        );
        assert!(f.pass);
        assert_eq!(f.checked, 2);
        assert_eq!(f.worst.unwrap().at, 2.0);
        let g = Flag::from_checks("y", [Inequality { at: 0.0, lhs: 2.0, rhs: 1.0, allowance: 0.5 }]);
        assert!(!g.pass);
        assert!((g.slack().unwrap() + 0.5).abs() < 1e-15);
        let v = Flag::from_checks("z", []);
        assert!(v.pass && v.checked == 0 && !v.note.is_empty());
    }

    #[test]
    fn csv_layout() {
        let mut s = StudyResult::new(StudyKind::Spectrum, &["T", "rho"]);
        s.push_row(vec![Some(5.0), Some(0.25)]);
        s.push_row(vec![Some(10.0), None]);
        assert_eq!(s.to_csv(), "T,rho\n5,2.5000000000000000e-1\n10,\n");
    }
}
