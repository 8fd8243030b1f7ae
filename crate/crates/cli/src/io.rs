//! CSV artifacts and the `report.txt` key=value summary.
//!
//! Floats are written with 17 significant digits so that reading a file back
//! reproduces every value bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use contact_weakkam::ccurve::CCurveSample;
use contact_weakkam::flows::Trajectory;
use contact_weakkam::measures::DiscreteMeasure;
use contact_weakkam::model::{ContactHamiltonian, TorusGrid1D};
use contact_weakkam::weakkam::{GridFunction, ResidualReport};

pub const SOLUTION_COLUMNS: [&str; 5] = ["x", "u", "du_upwind", "residual", "kink_flag"];
pub const MEASURE_COLUMNS: [&str; 3] = ["x", "v", "mass"];
pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "x", "p_or_v", "u", "H", "multiplier"];
pub const SCAN_COLUMNS: [&str; 7] =
    ["theta", "c", "slope_left", "slope_right", "integral_duH", "ordinal_nonempty", "method_gap"];

pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "nan".into())
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

/// Header plus one row per entry of `rows`.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_solution(path: &Path, u: &GridFunction, res: &ResidualReport) -> Result<()> {
    let g = u.grid();
    let mut w = writer(path)?;
    w.write_record(SOLUTION_COLUMNS)?;
    for i in 0..u.len() {
        w.write_record([
            fmt_f64(g.node(i)),
            fmt_f64(u.get(i)),
            fmt_f64(res.du_upwind[i]),
            fmt_f64(res.values.get(i)),
            if res.kinks[i] { "1" } else { "0" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the `x` and `u` columns of a solution file. The grid length is
/// recovered from `x`, which must list the nodes of a uniform grid.
pub fn read_solution(path: &Path) -> Result<GridFunction> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ix), Some(iu)) = (col("x"), col("u")) else {
        bail!("{}: expected columns x and u", path.display());
    };
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            s.trim().parse::<f64>().with_context(|| format!("{}: row {}: bad number '{s}'", path.display(), k + 1))
        };
        xs.push(parse(ix)?);
        us.push(parse(iu)?);
    }
    if xs.len() < 2 {
        bail!("{}: need at least two nodes", path.display());
    }
    let grid = recover_grid(&xs).with_context(|| format!("{}: x is not a uniform periodic grid", path.display()))?;
    Ok(GridFunction::new(grid, us)?)
}

fn recover_grid(xs: &[f64]) -> Result<TorusGrid1D> {
    let n = xs.len();
    let raw = xs[1] * n as f64;
    // Short decimal periods are tried first so that `x = i * p / n` holds exactly.
    let candidates = [(raw * 1e9).round() / 1e9, raw];
    for p in candidates {
        if let Ok(g) = TorusGrid1D::new(p, n) {
            if xs.iter().enumerate().all(|(i, &x)| (g.node(i) - x).abs() <= 1e-12 * p) {
                return Ok(g);
            }
        }
    }
    bail!("nodes do not match i * period / n")
}

pub fn write_measure(path: &Path, mu: &DiscreteMeasure) -> Result<()> {
    write_table(path, &MEASURE_COLUMNS, mu.nonzero().into_iter().map(|(x, v, m)| vec![x, v, m]))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory, ham: &ContactHamiltonian) -> Result<()> {
    write_table(path, &TRAJECTORY_COLUMNS, traj.rows(ham)?.into_iter().map(|r| r.to_vec()))
}

pub fn write_scan(path: &Path, samples: &[CCurveSample]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SCAN_COLUMNS)?;
    for s in samples {
        w.write_record([
            fmt_f64(s.theta),
            fmt_f64(s.c),
            fmt_opt(s.slope_left),
            fmt_opt(s.slope_right),
            fmt_f64(s.integral_duh),
            if s.ordinal_nonempty { "1" } else { "0" }.to_string(),
            fmt_opt(s.method_gap),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Ordered `key = value` lines. The write time is the only nondeterministic
/// entry and comes first.
#[derive(Debug, Default, Clone)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) {
        self.set(key, fmt_f64(value));
    }

    pub fn flag(&mut self, key: impl Into<String>, value: bool) {
        self.set(key, value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let path = dir.join("report.txt");
        let mut f = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        writeln!(f, "timestamp_unix = {stamp}")?;
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Parses a `report.txt` back into ordered pairs.
pub fn read_report(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text.lines().filter_map(|l| l.split_once(" = ").map(|(k, v)| (k.to_string(), v.to_string()))).collect())
}
