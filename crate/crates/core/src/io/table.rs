//! CSV sweep tables.
//!
//! Columns: the axis value, the analytic `q1_over_p1` and `q2_over_p2`, then
//! `q_over_p` and `reversal` per `gamma1`; with simulation data, the simulated
//! ratios and their standard errors follow. With several `gamma1` values the
//! per-series columns carry a `[gamma1=<value>]` suffix.

use std::io::Write;

use crate::error::{Error, Result};
use crate::sim::SimulatedPoint;
use crate::ys::SweepTable;

fn suffixes(gamma1: &[f64]) -> Vec<String> {
    if gamma1.len() == 1 {
        vec![String::new()]
    } else {
        gamma1.iter().map(|g| format!("[gamma1={g}]")).collect()
    }
}

pub fn sweep_header(table: &SweepTable, with_sim: bool) -> Vec<String> {
    let sfx = suffixes(&table.gamma1);
    let mut header = vec![table.axis.name().to_string(), "q1_over_p1".into(), "q2_over_p2".into()];
    for s in &sfx {
        header.push(format!("q_over_p{s}"));
        header.push(format!("reversal{s}"));
    }
    if with_sim {
        for name in ["sim_q1_over_p1", "sim_q2_over_p2"] {
            header.push(name.into());
            header.push(format!("{name}_err"));
        }
        for s in &sfx {
            header.push(format!("sim_q_over_p{s}"));
            header.push(format!("sim_q_over_p_err{s}"));
        }
    }
    header
}

/// Writes the table with shortest round-trip decimals, one row per grid
/// point in grid order.
pub fn write_sweep_csv<W: Write>(out: W, table: &SweepTable, sim: Option<&[SimulatedPoint]>) -> Result<()> {
    if let Some(points) = sim {
        if points.len() != table.rows.len() {
            return Err(Error::invalid(format!(
                "simulation has {} points but the table has {} rows",
                points.len(),
                table.rows.len()
            )));
        }
    }
    let io_err = |e: csv::Error| Error::invalid(format!("cannot write CSV: {e}"));
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(sweep_header(table, sim.is_some())).map_err(io_err)?;
    for (i, row) in table.rows.iter().enumerate() {
        let mut fields = vec![row.axis_value.to_string(), row.q1_over_p1.to_string(), row.q2_over_p2.to_string()];
        for (r, rev) in row.q_over_p.iter().zip(&row.reversal) {
            fields.push(r.to_string());
            fields.push(rev.to_string());
        }
        if let Some(points) = sim {
            let p = &points[i];
            for e in [&p.q1_over_p1, &p.q2_over_p2] {
                fields.push(e.value.to_string());
                fields.push(e.std_error.to_string());
            }
            for e in &p.q_over_p {
                fields.push(e.value.to_string());
                fields.push(e.std_error.to_string());
            }
        }
        writer.write_record(&fields).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::invalid(format!("cannot write CSV: {e}")))?;
    Ok(())
}
