//! Record files: one `# {json config}` line, a header row, one row per query.

use std::io::{BufRead, BufReader, Read, Write};

use serde::Deserialize;

use growth_distance::Status;

use crate::config::BenchConfig;

/// One query of a suite.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BenchRecord {
    pub instance_id: u64,
    pub pair_id: u64,
    pub pose_id: u64,
    pub shape1: String,
    pub shape2: String,
    pub vertices1: usize,
    pub vertices2: usize,
    pub alpha: f64,
    pub iterations: usize,
    pub status: String,
    pub gap: f64,
    /// Mean wall time per call.
    pub time_ns: Option<f64>,
    pub primal_infeasibility: f64,
    pub analytic_alpha: Option<f64>,
    pub analytic_rel_err: Option<f64>,
    /// Cold solve at the displaced pose.
    pub warm_cold_iterations: Option<usize>,
    pub warm_cold_time_ns: Option<f64>,
    /// Warm solve at the displaced pose, seeded from the original pose.
    pub warm_iterations: Option<usize>,
    pub warm_time_ns: Option<f64>,
    pub warm_alpha: Option<f64>,
    pub warm_status: Option<String>,
    pub warm_points_used: Option<usize>,
}

pub const COLUMNS: [&str; 22] = [
    "instance_id",
    "pair_id",
    "pose_id",
    "shape1",
    "shape2",
    "vertices1",
    "vertices2",
    "alpha",
    "iterations",
    "status",
    "gap",
    "time_ns",
    "primal_infeasibility",
    "analytic_alpha",
    "analytic_rel_err",
    "warm_cold_iterations",
    "warm_cold_time_ns",
    "warm_iterations",
    "warm_time_ns",
    "warm_alpha",
    "warm_status",
    "warm_points_used",
];

/// Columns that hold wall-clock measurements.
pub const TIME_COLUMNS: [&str; 3] = ["time_ns", "warm_cold_time_ns", "warm_time_ns"];

pub fn status_name(status: Status) -> &'static str {
    match status {
        Status::Converged => "Converged",
        Status::MaxIterations => "MaxIterations",
        Status::CentersCoincide => "CentersCoincide",
        Status::NumericalFailure => "NumericalFailure",
    }
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(x: &Option<T>, f: impl Fn(&T) -> String) -> String {
    x.as_ref().map(f).unwrap_or_default()
}

impl BenchRecord {
    fn fields(&self) -> Vec<String> {
        let float = |x: &f64| format_float(*x);
        let int = |x: &usize| x.to_string();
        vec![
            self.instance_id.to_string(),
            self.pair_id.to_string(),
            self.pose_id.to_string(),
            self.shape1.clone(),
            self.shape2.clone(),
            self.vertices1.to_string(),
            self.vertices2.to_string(),
            format_float(self.alpha),
            self.iterations.to_string(),
            self.status.clone(),
            format_float(self.gap),
            opt(&self.time_ns, float),
            format_float(self.primal_infeasibility),
            opt(&self.analytic_alpha, float),
            opt(&self.analytic_rel_err, float),
            opt(&self.warm_cold_iterations, int),
            opt(&self.warm_cold_time_ns, float),
            opt(&self.warm_iterations, int),
            opt(&self.warm_time_ns, float),
            opt(&self.warm_alpha, float),
            opt(&self.warm_status, |s| s.clone()),
            opt(&self.warm_points_used, int),
        ]
    }
}

/// Writes the config line, the header row and every record.
pub fn write_records<W: Write>(mut out: W, config: &BenchConfig, records: &[BenchRecord]) -> csv::Result<()> {
    writeln!(out, "# {}", config.header_json())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a record file back: the config JSON and the records.
pub fn read_records<R: Read>(input: R) -> csv::Result<(serde_json::Value, Vec<BenchRecord>)> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    let json = first.trim_start_matches('#').trim();
    let config = serde_json::from_str(json).map_err(|e| {
        csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    })?;
    let mut reader = csv::Reader::from_reader(input);
    let records = reader.deserialize().collect::<csv::Result<Vec<BenchRecord>>>()?;
    Ok((config, records))
}
