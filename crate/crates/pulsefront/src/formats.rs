//! Report and export formats shared by the experiments.

use std::fmt::Write;

use pulsefront_core::envelopes::ContainmentRun;
use pulsefront_core::fronts::{FrontRecord, PulsatingFront, SpeedEstimate};
use pulsefront_core::homowave::{LimitSpeedResult, TravelingWave};
use pulsefront_core::zeros::ZeroReport;
use serde_json::{json, Value};

use crate::Error;

fn csv_of<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Columns `xi, psi, dpsi`.
pub fn wave_csv(wave: &TravelingWave) -> Result<String, Error> {
    let xs = wave.xi_grid();
    csv_of(["xi", "psi", "dpsi"], (0..xs.len()).map(|k| [xs[k], wave.psi[k], wave.dpsi[k]]))
}

/// Columns `xi, y, phi` over the whole lattice, row by row.
pub fn front_lattice_csv(front: &PulsatingFront) -> Result<String, Error> {
    let xs = front.xi_grid();
    let ys = front.y_grid();
    csv_of(
        ["xi", "y", "phi"],
        (0..front.n_y).flat_map(|j| {
            let row = front.row(j);
            let y = ys[j];
            xs.iter().zip(row).map(move |(x, p)| [*x, y, *p]).collect::<Vec<_>>()
        }),
    )
}

/// Columns `y, zeta`.
pub fn zeta_csv(front: &PulsatingFront) -> Result<String, Error> {
    csv_of(["y", "zeta"], front.y_grid().into_iter().zip(&front.zeta).map(|(y, z)| [y, *z]))
}

/// Two-column `y zeta` for gnuplot, closed at `y = 1`.
pub fn zeta_dat(front: &PulsatingFront) -> String {
    let mut s = String::from("# y zeta\n");
    for (y, z) in front.y_grid().into_iter().zip(&front.zeta) {
        writeln!(s, "{y} {z}").unwrap();
    }
    writeln!(s, "1 {}", front.zeta[0]).unwrap();
    s
}

/// Snapshot sink: `t, x, u` triples.
pub fn snapshots_csv(record: &FrontRecord) -> Result<String, Error> {
    csv_of(
        ["t", "x", "u"],
        record.snapshots.iter().flat_map(|s| {
            s.u.iter().enumerate().map(move |(i, u)| [s.t, s.x0 + i as f64 * record.h, *u]).collect::<Vec<_>>()
        }),
    )
}

pub fn speed_report(l: f64, s: &SpeedEstimate) -> Value {
    json!({ "L": l, "c_L": s.c_l, "per_period_speeds": s.per_period_speeds, "converged": s.converged })
}

pub fn limit_speed_report(r: &LimitSpeedResult) -> Value {
    json!({ "c_star": r.c_star, "nodes": r.n_samples, "error_estimate": r.quad_error_estimate })
}

pub fn envelope_report(eps: f64, l: f64, run: &ContainmentRun) -> Value {
    json!({
        "eps": eps,
        "L": l,
        "max_violation_lower": run.max_violation_lower,
        "max_violation_upper": run.max_violation_upper,
        "T_tilde": run.t_tilde,
        "T_L": run.t_l,
    })
}

/// List of `{t, z, word}` with words like `"+-+"`.
pub fn zero_report(r: &ZeroReport) -> Value {
    Value::Array(
        r.entries.iter().map(|e| json!({ "t": e.t, "z": e.z, "word": e.word.to_word_string() })).collect(),
    )
}
