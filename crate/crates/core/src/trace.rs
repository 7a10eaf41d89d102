//! CSV serialization of iteration traces.
//!
//! Numbers are written in Rust's shortest round-trip notation (dot decimal
//! separator), records end with `\n`, and unknown values are empty fields.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::driver::IterationTrace;

/// One solver cycle as written to a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub cycle: usize,
    pub error: Option<f64>,
    pub rho: f64,
    pub delta: f64,
    pub gamma: Option<f64>,
    pub s_under: Option<f64>,
    pub predicted_gain: Option<f64>,
    pub cum_flops: u64,
}

/// One point of a multi-run comparison in long format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub variant: String,
    pub ell: Option<String>,
    pub cycle: usize,
    pub error: Option<f64>,
    pub cum_flops: u64,
}

impl IterationTrace {
    pub fn rows(&self) -> Vec<TraceRow> {
        self.records
            .iter()
            .map(|r| TraceRow {
                cycle: r.cycle,
                error: r.error,
                rho: r.rho,
                delta: r.delta,
                gamma: r.gamma,
                s_under: r.s_under,
                predicted_gain: r.predicted_gain,
                cum_flops: r.cum_flops.0,
            })
            .collect()
    }

    /// Long-format curve points `(k, ‖x_k − x*‖, flops spent to reach x_k)`
    /// for `k = 0, …, cycles()`.
    pub fn compare_rows(&self) -> Vec<CompareRow> {
        let ell = self.variant.uses_window().then(|| self.ell.to_string());
        let errors = self.error_curve();
        (0..=self.cycles())
            .map(|k| CompareRow {
                variant: self.variant.name().to_string(),
                ell: ell.clone(),
                cycle: k,
                error: errors.as_ref().map(|e| e[k]),
                cum_flops: if k == 0 { 0 } else { self.records[k - 1].cum_flops.0 },
            })
            .collect()
    }
}

/// Writes rows with a header line, even when `rows` is empty.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], header: &[&str], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const TRACE_HEADER: [&str; 8] = [
    "cycle",
    "error",
    "rho",
    "delta",
    "gamma",
    "s_under",
    "predicted_gain",
    "cum_flops",
];

pub const COMPARE_HEADER: [&str; 5] = ["variant", "ell", "cycle", "error", "cum_flops"];

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> csv::Result<()> {
    write_csv(rows, &TRACE_HEADER, out)
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], out: W) -> csv::Result<()> {
    write_csv(rows, &COMPARE_HEADER, out)
}

pub fn read_trace_csv<R: Read>(input: R) -> csv::Result<Vec<TraceRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_compare_csv<R: Read>(input: R) -> csv::Result<Vec<CompareRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
