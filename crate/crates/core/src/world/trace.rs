use std::io::Write;

use serde::{Deserialize, Serialize};

/// One row of a per-tick trajectory trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub tick: u32,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub option: String,
    pub planner_choice: String,
    pub throttle: f64,
    pub steer: f64,
    pub r_option: f64,
    pub r_planner: f64,
    /// Event label on the tick it fired; empty otherwise.
    pub event: String,
}

pub const TRACE_HEADER: &str =
    "tick,x,y,heading,speed,option,planner_choice,throttle,steer,r_option,r_planner,event";

/// Write `rows` as CSV with the standard header.
pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(TRACE_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: std::io::Read>(input: R) -> crate::Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
