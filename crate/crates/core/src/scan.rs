//! Single-point evaluations and distance scans with CSV/JSON export.
//!
//! Numbers are written with Rust's `{:e}` formatting (shortest round-trip,
//! `.` decimal separator, no locale). Cells outside the validity regime of a
//! formula hold the sentinel `out-of-regime` in CSV and `null` in JSON.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::asymptotics::{energy_tail, mixing_tail, TailBreakdown, TailConvention};
use crate::error::{Error, Result};
use crate::hydrogen::{dipole_channels, mixing_channel, mixing_channels, AtomicConstants, LevelLabel};
use crate::nonretarded::{adiabatic_spectrum, decay_profile, default_order, multipole_interaction};
use crate::retarded::{energy_shift, mixing_element};

/// CSV sentinel for values outside a formula's regime.
pub const OUT_OF_REGIME: &str = "out-of-regime";

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    OutOfRegime,
}

impl Cell {
    fn from_result(r: Result<f64>) -> Result<Cell> {
        match r {
            Ok(v) => Ok(Cell::Value(v)),
            Err(Error::OutOfRegime { .. }) => Ok(Cell::OutOfRegime),
            Err(e) => Err(e),
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(v),
            Cell::OutOfRegime => None,
        }
    }

    fn csv(self) -> String {
        match self {
            Cell::Value(v) => format!("{v:e}"),
            Cell::OutOfRegime => OUT_OF_REGIME.to_owned(),
        }
    }

    fn json(self) -> Value {
        match self.value() {
            Some(v) => json!(v),
            None => Value::Null,
        }
    }
}

/// What a scan tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Energy,
    Mixing,
    Admixtures,
    Gamma,
}

impl Quantity {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Energy => &["energy_au", "energy_mhz", "nonretarded_au", "nonretarded_mhz", "tail_au"],
            Quantity::Mixing => &["mixing_au", "tail_au", "tail_flagged_au"],
            Quantity::Admixtures => &["aS_sq", "a12_sq", "a32_sq", "branch_eigenvalue_au"],
            Quantity::Gamma => &["xi", "gamma_eff_au", "gamma_ratio"],
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "energy" => Ok(Quantity::Energy),
            "mixing" => Ok(Quantity::Mixing),
            "admixtures" => Ok(Quantity::Admixtures),
            "gamma" => Ok(Quantity::Gamma),
            other => Err(Error::domain("quantity", format!("unknown quantity `{other}`"))),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Energy => "energy",
            Quantity::Mixing => "mixing",
            Quantity::Admixtures => "admixtures",
            Quantity::Gamma => "gamma",
        })
    }
}

/// Inputs shared by point evaluations and scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub state: LevelLabel,
    pub from: LevelLabel,
    pub to: LevelLabel,
    pub n_max: u32,
    pub convention: TailConvention,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            state: LevelLabel::S12,
            from: LevelLabel::P12,
            to: LevelLabel::S12,
            n_max: 2,
            convention: TailConvention::default(),
        }
    }
}

fn check_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain("distance", format!("need finite 𝒵 > 0, got {z}")));
    }
    Ok(())
}

/// Energy of one state at one distance by the three methods.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPoint {
    pub z_au: f64,
    pub retarded_au: f64,
    pub nonretarded_au: f64,
    pub tail: Option<TailBreakdown>,
}

pub fn energy_point(z: f64, s: &Settings, c: &AtomicConstants) -> Result<EnergyPoint> {
    check_z(z)?;
    let channels = dipole_channels(s.state, s.n_max, c)?;
    let retarded_au = energy_shift(z, &channels)?;
    let v = multipole_interaction(z, default_order(z))?;
    let i = s.state.index();
    let tail = match energy_tail(z, &channels, s.convention) {
        Ok(t) => Some(t),
        Err(Error::OutOfRegime { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(EnergyPoint {
        z_au: z,
        retarded_au,
        nonretarded_au: v[(i, i)],
        tail,
    })
}

/// Mixing element with its long-range breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingPoint {
    pub z_au: f64,
    pub retarded_au: f64,
    pub tail: Option<TailBreakdown>,
    /// Largest |coefficient| among the oscillating tail terms of the
    /// 2P₁/₂ virtual level (zero when they cancel).
    pub p12_oscillating_max: f64,
}

impl MixingPoint {
    /// The 2P₁/₂ oscillating coefficients vanish to 1e-14 of the largest
    /// coefficient present.
    pub fn p12_cancels(&self) -> bool {
        let scale = self
            .tail
            .as_ref()
            .map(|t| t.terms.iter().fold(0.0_f64, |m, x| m.max(x.coefficient.abs())))
            .unwrap_or(0.0);
        self.p12_oscillating_max <= 1e-14 * scale.max(f64::MIN_POSITIVE)
    }

    pub fn flagged_au(&self) -> Option<f64> {
        self.tail
            .as_ref()
            .map(|t| t.terms.iter().filter(|x| x.flagged).map(|x| x.value(t.z)).sum())
    }
}

pub fn mixing_point(z: f64, s: &Settings, c: &AtomicConstants) -> Result<MixingPoint> {
    check_z(z)?;
    let channels = mixing_channels(s.from, s.to, s.n_max, c)?;
    let retarded_au = mixing_element(z, &channels)?;
    let tail = match mixing_tail(z, &channels, s.convention) {
        Ok(t) => Some(t),
        Err(Error::OutOfRegime { .. }) => None,
        Err(e) => return Err(e),
    };
    let p12 = mixing_channel(&s.from.orbital(), &s.to.orbital(), &LevelLabel::P12.orbital(), c)?;
    let p12_oscillating_max = crate::asymptotics::mixing_channel_terms(&p12, s.convention)
        .iter()
        .filter(|t| t.oscillator != crate::asymptotics::Oscillator::None)
        .fold(0.0_f64, |m, t| m.max(t.coefficient.abs()));
    Ok(MixingPoint {
        z_au: z,
        retarded_au,
        tail,
        p12_oscillating_max,
    })
}

/// Distance grid, linear or logarithmic, strictly increasing.
pub fn grid(zmin: f64, zmax: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    check_z(zmin)?;
    check_z(zmax)?;
    if !(zmin < zmax) {
        return Err(Error::domain("grid", format!("need zmin < zmax, got {zmin} ≥ {zmax}")));
    }
    if points < 2 {
        return Err(Error::domain("grid", format!("need at least 2 points, got {points}")));
    }
    let last = (points - 1) as f64;
    let mut out: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 / last;
            if log {
                (zmin.ln() + t * (zmax.ln() - zmin.ln())).exp()
            } else {
                zmin + t * (zmax - zmin)
            }
        })
        .collect();
    out[0] = zmin;
    out[points - 1] = zmax;
    Ok(out)
}

/// One row of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub z_au: f64,
    pub values: Vec<Cell>,
}

/// Scan output: column names (after `z_au`) and rows in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub quantity: Quantity,
    pub columns: Vec<&'static str>,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }
}

fn energy_row(z: f64, s: &Settings, c: &AtomicConstants) -> Result<Vec<Cell>> {
    let p = energy_point(z, s, c)?;
    Ok(vec![
        Cell::Value(p.retarded_au),
        Cell::Value(p.retarded_au * c.au_to_mhz),
        Cell::Value(p.nonretarded_au),
        Cell::Value(p.nonretarded_au * c.au_to_mhz),
        p.tail.map_or(Cell::OutOfRegime, |t| Cell::Value(t.total)),
    ])
}

fn mixing_row(z: f64, s: &Settings, c: &AtomicConstants) -> Result<Vec<Cell>> {
    let p = mixing_point(z, s, c)?;
    Ok(vec![
        Cell::Value(p.retarded_au),
        p.tail.as_ref().map_or(Cell::OutOfRegime, |t| Cell::Value(t.total)),
        p.flagged_au().map_or(Cell::OutOfRegime, Cell::Value),
    ])
}

fn gamma_row(z: f64, c: &AtomicConstants) -> Result<Vec<Cell>> {
    match decay_profile(z, c) {
        Ok(d) => Ok(vec![
            Cell::Value(d.xi),
            Cell::Value(d.gamma_eff),
            Cell::Value(d.gamma_eff / c.gamma_2s),
        ]),
        Err(e) => {
            let cell = Cell::from_result(Err(e))?;
            Ok(vec![cell; 3])
        }
    }
}

/// Largest ratio between neighbouring points used for branch tracking.
const TRACKING_RATIO: f64 = 1.005;

/// Descending grid through every point of the ascending `grid`, with the
/// gaps subdivided geometrically; returns it with the positions of the
/// original points, in descending order.
fn tracking_grid(grid: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut dense = vec![grid[grid.len() - 1]];
    let mut picks = vec![0];
    for w in grid.windows(2).rev() {
        let (lo, hi) = (w[0], w[1]);
        let steps = ((hi / lo).ln() / TRACKING_RATIO.ln()).ceil().max(1.0) as usize;
        for i in 1..steps {
            dense.push(hi * (lo / hi).powf(i as f64 / steps as f64));
        }
        dense.push(lo);
        picks.push(dense.len() - 1);
    }
    (dense, picks)
}

/// Evaluate `quantity` over `grid` (parallel, rows kept in grid order).
pub fn run_scan(quantity: Quantity, grid: &[f64], s: &Settings, c: &AtomicConstants) -> Result<ScanTable> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("scan", "grid must have ≥ 2 strictly increasing points"));
    }
    let values: Vec<Vec<Cell>> = match quantity {
        Quantity::Admixtures => {
            // branches are followed inward from the decoupled large-𝒵 end on
            // a dense grid, so coarse requests cannot jump across a crossing
            let (dense, picks) = tracking_grid(grid);
            let spectrum = adiabatic_spectrum(&dense, None, c)?;
            let mut rows: Vec<Vec<Cell>> = picks
                .iter()
                .map(|&k| spectrum[k])
                .map(|states| {
                    let s = states[0];
                    let mut row: Vec<Cell> = s.weights().iter().map(|&w| Cell::Value(w)).collect();
                    row.push(Cell::Value(s.eigenvalue));
                    row
                })
                .collect();
            rows.reverse();
            rows
        }
        _ => grid
            .par_iter()
            .map(|&z| match quantity {
                Quantity::Energy => energy_row(z, s, c),
                Quantity::Mixing => mixing_row(z, s, c),
                Quantity::Gamma => gamma_row(z, c),
                Quantity::Admixtures => unreachable!(),
            })
            .collect::<Result<_>>()?,
    };
    Ok(ScanTable {
        quantity,
        columns: quantity.columns().to_vec(),
        rows: grid
            .iter()
            .zip(values)
            .map(|(&z, values)| ScanRow { z_au: z, values })
            .collect(),
    })
}

/// CSV with a `z_au` first column; header always present.
pub fn write_csv<W: Write>(table: &ScanTable, out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["z_au"];
    header.extend(table.columns.iter().copied());
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![format!("{:e}", row.z_au)];
        rec.extend(row.values.iter().map(|c| c.csv()));
        w.write_record(&rec)?;
    }
    w.flush()
}

/// JSON array of row objects keyed by column name.
pub fn to_json(table: &ScanTable) -> Value {
    let rows = table
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            m.insert("z_au".into(), json!(row.z_au));
            for (name, cell) in table.columns.iter().zip(&row.values) {
                m.insert((*name).into(), cell.json());
            }
            Value::Object(m)
        })
        .collect();
    Value::Array(rows)
}
