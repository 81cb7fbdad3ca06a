//! Run reports and sweep tables, with CSV and JSON encodings.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::engine::Config;

/// Statistics of one pass (local-moving plus aggregation).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PassRecord {
    pub pass: usize,
    pub iterations: usize,
    /// Modularity after local-moving, on the input graph.
    pub q: f64,
    pub local_ms: f64,
    pub agg_ms: f64,
    /// Vertices in this pass's level graph.
    pub vertices: usize,
    pub communities: usize,
    pub gain: f64,
    pub moves: usize,
    pub tolerance: f64,
    pub iteration_cap_hit: bool,
    /// Whether this pass's level entered the dendrogram.
    pub kept: bool,
    /// Parallel engine: move conflicts per iteration.
    pub conflicts: Vec<u64>,
    /// Parallel engine: drift of incremental community masses.
    pub aggregate_drift: f64,
    /// Total weight of the graph handed to the next pass.
    pub level_total: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    /// `async`, `sync` or `parallel`.
    pub engine: String,
    pub threads: usize,
    pub passes: Vec<PassRecord>,
    pub total_passes: usize,
    pub total_iterations: usize,
    pub final_q: f64,
    pub communities: usize,
    pub wall_ms: f64,
    pub pass_cap_hit: bool,
}

/// One row of the per-pass CSV report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassRow {
    pub pass: usize,
    pub iterations: usize,
    pub q: f64,
    pub local_ms: f64,
    pub agg_ms: f64,
    pub vertices: usize,
}

pub const PASS_CSV_HEADER: &str = "pass,iterations,q,local_ms,agg_ms,vertices";

impl From<&PassRecord> for PassRow {
    fn from(p: &PassRecord) -> Self {
        Self {
            pass: p.pass,
            iterations: p.iterations,
            q: p.q,
            local_ms: p.local_ms,
            agg_ms: p.agg_ms,
            vertices: p.vertices,
        }
    }
}

pub fn write_report_csv<W: Write>(report: &Report, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &report.passes {
        w.serialize(PassRow::from(p))?;
    }
    if report.passes.is_empty() {
        w.write_record(PASS_CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report_csv<R: Read>(input: R) -> Result<Vec<PassRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<_>, _>>()?)
}

pub fn write_report_json<W: Write>(report: &Report, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_report_json<R: Read>(input: R) -> Result<Report> {
    Ok(serde_json::from_reader(input)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Tolerance,
    Decline,
    Threads,
}

impl std::fmt::Display for SweepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepKind::Tolerance => "tolerance",
            SweepKind::Decline => "decline",
            SweepKind::Threads => "threads",
        })
    }
}

/// One grid cell of a parameter sweep. The column set is the same for every
/// sweep kind so tables from different runs line up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: SweepKind,
    pub tolerance: f64,
    pub decline_factor: f64,
    pub threads: usize,
    pub final_q: f64,
    pub passes: usize,
    pub total_iterations: usize,
    pub wall_time_ms: f64,
}

pub const SWEEP_CSV_HEADER: &str =
    "kind,tolerance,decline_factor,threads,final_q,passes,total_iterations,wall_time_ms";

impl SweepRow {
    pub fn from_report(kind: SweepKind, cfg: &Config, report: &Report) -> Self {
        Self {
            kind,
            tolerance: cfg.tolerance_initial,
            decline_factor: cfg.tolerance_decline_factor,
            threads: report.threads,
            final_q: report.final_q,
            passes: report.total_passes,
            total_iterations: report.total_iterations,
            wall_time_ms: report.wall_ms,
        }
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(SWEEP_CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<_>, _>>()?)
}

pub fn write_sweep_json<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_sweep_json<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    Ok(serde_json::from_reader(input)?)
}
