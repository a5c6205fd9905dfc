//! File formats for profiling output: the raw record CSV, the summary JSON
//! tree, the per-pass plot-data CSV, and a trace export mirroring an
//! external profiler's (path, function, cumulative) rows. Every writer here
//! has a matching loader so emitted files round-trip.

use std::fmt::Write as _;

use crate::error::ProfileError;
use crate::framework::{PassRegistry, Stage};
use crate::profiler::{ExperimentSummary, FiveNumber, PassAggregate, RunRecord};

pub const RECORDS_HEADER: &str = "run_id,stage,pass_name,iteration,wall_time_ns";
pub const PLOT_HEADER: &str = "pass_name,category,min,q1,median,q3,max";

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.run_id, r.stage, r.pass_name, r.iteration, r.wall_time_ns
        )
        .unwrap();
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>, ProfileError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == RECORDS_HEADER => {}
        _ => {
            return Err(ProfileError::Parse {
                line: 1,
                message: format!("expected header {:?}", RECORDS_HEADER),
            })
        }
    }
    let mut records = Vec::new();
    for (lineno, raw) in lines {
        let line = lineno + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(ProfileError::Parse {
                line,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str, value: &str| ProfileError::Parse {
            line,
            message: format!("bad {}: {:?}", what, value),
        };
        records.push(RunRecord {
            run_id: fields[0]
                .parse()
                .map_err(|_| parse_err("run_id", fields[0]))?,
            stage: fields[1]
                .parse::<Stage>()
                .map_err(|_| parse_err("stage", fields[1]))?,
            pass_name: fields[2].to_string(),
            iteration: fields[3]
                .parse()
                .map_err(|_| parse_err("iteration", fields[3]))?,
            wall_time_ns: fields[4]
                .parse()
                .map_err(|_| parse_err("wall_time_ns", fields[4]))?,
        });
    }
    Ok(records)
}

pub fn summary_to_json(summary: &ExperimentSummary) -> String {
    let mut text =
        serde_json::to_string_pretty(summary).expect("summary serialization cannot fail");
    text.push('\n');
    text
}

pub fn summary_from_json(text: &str) -> Result<ExperimentSummary, ProfileError> {
    serde_json::from_str(text).map_err(|e| ProfileError::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

/// One row of the plot-data file.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub pass_name: String,
    pub category: String,
    pub stats: FiveNumber,
}

/// Per-pass five-number rows in the summary's ranking order, ready for a
/// boxplot script.
pub fn plot_data_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from(PLOT_HEADER);
    out.push('\n');
    for p in &summary.passes {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.pass_name,
            p.category,
            p.stats.min,
            p.stats.q1,
            p.stats.median,
            p.stats.q3,
            p.stats.max
        )
        .unwrap();
    }
    out
}

pub fn plot_data_from_csv(text: &str) -> Result<Vec<PlotRow>, ProfileError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == PLOT_HEADER => {}
        _ => {
            return Err(ProfileError::Parse {
                line: 1,
                message: format!("expected header {:?}", PLOT_HEADER),
            })
        }
    }
    let mut rows = Vec::new();
    for (lineno, raw) in lines {
        let line = lineno + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 7 {
            return Err(ProfileError::Parse {
                line,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, ProfileError> {
            fields[idx].parse().map_err(|_| ProfileError::Parse {
                line,
                message: format!("bad number: {:?}", fields[idx]),
            })
        };
        rows.push(PlotRow {
            pass_name: fields[0].to_string(),
            category: fields[1].to_string(),
            stats: FiveNumber {
                min: num(2)?,
                q1: num(3)?,
                median: num(4)?,
                q3: num(5)?,
                max: num(6)?,
            },
        });
    }
    Ok(rows)
}

/// (path, function, cumulative) rows in the shape an external profiler's
/// output would take, so the same path/"run" filter can be replayed on our
/// data. The path embeds the pass's implementation module.
pub fn trace_export(aggregates: &[PassAggregate], registry: &PassRegistry) -> String {
    let mut out = String::from("path,function,cumulative_ns\n");
    for agg in aggregates {
        let module = registry
            .get(&agg.pass_name)
            .map(|d| d.module.name())
            .unwrap_or("unknown");
        writeln!(
            out,
            "passes/{}/{},run,{}",
            module, agg.pass_name, agg.cumulative_time_ns
        )
        .unwrap();
    }
    out
}
