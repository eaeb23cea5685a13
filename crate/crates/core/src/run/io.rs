//! CSV and JSON artifacts. Floats are written with 17 significant digits so a
//! curve read back is bit-identical to the one written.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::incremental::DiscreteTrajectory;
use crate::model::System;
use crate::viscosity::{CurveData, CurveFields};

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| io_err(path, e))
}

fn write_row(w: &mut csv::Writer<File>, path: &Path, row: &[String]) -> Result<()> {
    w.write_record(row).map_err(|e| io_err(path, e))
}

/// `trajectory_eps*.csv`: one row per partition node.
pub fn write_trajectory_csv(path: &Path, system: &System, traj: &DiscreteTrajectory) -> Result<()> {
    let n = traj.dim();
    let mut w = writer(path)?;
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((0..n).map(|i| format!("z{i}")));
    header.extend((0..n).map(|i| format!("ell{i}")));
    header.extend(["energy", "dissipation", "residual", "iterations", "starts"].map(String::from));
    write_row(&mut w, path, &header)?;
    let times = traj.partition().times();
    for (k, t) in times.iter().enumerate() {
        let mut row = vec![fmt(*t)];
        row.extend(traj.state(k).iter().map(|x| fmt(*x)));
        row.extend(traj.load_value(k).iter().map(|x| fmt(*x)));
        if k == 0 {
            row.push(fmt(system
                .energy
                .energy_with(traj.load_value(0), traj.state(0))));
            row.extend([fmt(0.0), fmt(0.0), "0".into(), "0".into()]);
        } else {
            let r = &traj.steps()[k - 1];
            row.extend([fmt(r.energy), fmt(r.dissipation), fmt(r.residual)]);
            row.extend([r.iterations.to_string(), r.starts.to_string()]);
        }
        write_row(&mut w, path, &row)?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// `curve_eps*.csv`. Segment quantities sit on the row of the segment's left
/// node (the last row repeats the last segment); `λ` is 0 off the jump set.
pub fn write_curve_csv(path: &Path, curve: &CurveData, fields: &CurveFields) -> Result<()> {
    let n = curve.dim();
    let mut w = writer(path)?;
    let mut header: Vec<String> = vec!["s".into(), "t_hat".into()];
    header.extend((0..n).map(|i| format!("z{i}")));
    header.extend(
        [
            "t_rate",
            "r_rate",
            "dist",
            "m",
            "in_g",
            "lambda",
            "eps",
            "grid_node",
            "quad_err",
        ]
        .map(String::from),
    );
    header.extend((0..n).map(|i| format!("ell{i}")));
    write_row(&mut w, path, &header)?;
    let segs = curve.len() - 1;
    for j in 0..curve.len() {
        let g = j.min(segs - 1);
        let lambda = fields.lambda[g];
        let mut row = vec![fmt(curve.s[j]), fmt(curve.t_hat[j])];
        row.extend(curve.z_hat[j].iter().map(|x| fmt(*x)));
        row.extend([
            fmt(fields.t_rate[g]),
            fmt(fields.r_rate[g]),
            fmt(fields.dist[j]),
            fmt(fields.m[j]),
            u8::from(fields.in_g[j]).to_string(),
            fmt(if lambda.is_finite() { lambda } else { 0.0 }),
            fmt(curve.eps),
            u8::from(curve.grid_node[j]).to_string(),
            fmt(curve.quad_err[j]),
        ]);
        row.extend(curve.ell_hat[g].iter().map(|x| fmt(*x)));
        write_row(&mut w, path, &row)?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Reads back the raw curve from a file written by [`write_curve_csv`].
pub fn read_curve_csv(path: &Path) -> Result<CurveData> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header = r.headers().map_err(|e| io_err(path, e))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| io_err(path, format!("missing column '{name}'")))
    };
    let z_cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| is_indexed(h, "z"))
        .map(|(i, _)| i)
        .collect();
    let ell_cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| is_indexed(h, "ell"))
        .map(|(i, _)| i)
        .collect();
    if z_cols.is_empty() || z_cols.len() != ell_cols.len() {
        return Err(io_err(path, "state and load columns do not match"));
    }
    let (cs, ct, ce, cg, cq) = (
        col("s")?,
        col("t_hat")?,
        col("eps")?,
        col("grid_node")?,
        col("quad_err")?,
    );
    let mut curve = CurveData {
        eps: f64::NAN,
        s: Vec::new(),
        t_hat: Vec::new(),
        z_hat: Vec::new(),
        ell_hat: Vec::new(),
        grid_node: Vec::new(),
        quad_err: Vec::new(),
    };
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let num = |c: usize| -> Result<f64> {
            rec.get(c)
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| {
                    io_err(
                        path,
                        format!(
                            "row {}: bad value in column {}",
                            i + 2,
                            header.get(c).unwrap_or("?")
                        ),
                    )
                })
        };
        curve.eps = num(ce)?;
        curve.s.push(num(cs)?);
        curve.t_hat.push(num(ct)?);
        curve
            .z_hat
            .push(z_cols.iter().map(|c| num(*c)).collect::<Result<_>>()?);
        curve
            .ell_hat
            .push(ell_cols.iter().map(|c| num(*c)).collect::<Result<_>>()?);
        curve.grid_node.push(num(cg)? != 0.0);
        curve.quad_err.push(num(cq)?);
    }
    // The last row repeats the last segment's load.
    curve.ell_hat.pop();
    curve.validate().map_err(|e| io_err(path, e))?;
    Ok(curve)
}

fn is_indexed(h: &str, prefix: &str) -> bool {
    h.strip_prefix(prefix)
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path).map_err(|e| io_err(path, e))?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| io_err(path, e))?;
    f.write_all(b"\n").map_err(|e| io_err(path, e))
}

/// `0.025` -> `eps0.025`, used in artifact file names.
pub fn eps_tag(eps: f64) -> String {
    format!("eps{eps}")
}
