use std::io::Write;

use super::tables::{ConvergenceTable, WorkPrecisionTable};

/// Deterministic float formatting used in every output file.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "nan".to_string())
}

/// `N,h,error,pairwise_order`; failed runs and the first order are `nan`.
pub fn write_convergence_csv<W: Write>(mut out: W, t: &ConvergenceTable) -> std::io::Result<()> {
    writeln!(out, "N,h,error,pairwise_order")?;
    for r in &t.rows {
        writeln!(out, "{},{},{},{}", r.n, fmt_f64(r.h), opt(r.error), opt(r.pairwise_order))?;
    }
    Ok(())
}

pub fn write_convergence_json<W: Write>(mut out: W, t: &ConvergenceTable) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, t)?;
    writeln!(out)
}

/// `N,h,seconds,error`
pub fn write_workprecision_csv<W: Write>(mut out: W, t: &WorkPrecisionTable) -> std::io::Result<()> {
    writeln!(out, "N,h,seconds,error")?;
    for r in &t.rows {
        writeln!(out, "{},{},{},{}", r.n, fmt_f64(r.h), opt(r.seconds), opt(r.error))?;
    }
    Ok(())
}

pub fn write_workprecision_json<W: Write>(mut out: W, t: &WorkPrecisionTable) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, t)?;
    writeln!(out)
}
