//! Repeated-run statistics: five-number summaries with type-7 linear
//! interpolation quantiles, and the experiment summary combining every
//! repetition of one configuration.

use serde::{Deserialize, Serialize};

use crate::error::ProfileError;
use crate::profiler::PassAggregate;

/// Boxplot statistics of one sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quantile over an ascending-sorted sample
/// (the "type 7" convention): index h = (n−1)·q, interpolated between the
/// neighboring order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn five_number(samples: &[f64]) -> FiveNumber {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    FiveNumber {
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    }
}

/// What was compiled: the aggregation key for an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub circuit: String,
    pub qubits: usize,
    pub level: u8,
    pub target: String,
}

impl Configuration {
    pub fn label(&self) -> String {
        format!(
            "{}({}) level {} on {}",
            self.circuit, self.qubits, self.level, self.target
        )
    }
}

/// One repetition's worth of profiling output.
#[derive(Debug, Clone)]
pub struct Repetition {
    pub configuration: Configuration,
    pub aggregates: Vec<PassAggregate>,
    pub total_wall_ns: u64,
    pub total_cpu_ns: Option<u64>,
}

/// Per-pass boxplot row in a summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassSummary {
    pub pass_name: String,
    pub category: String,
    pub stats: FiveNumber,
}

/// Statistics over all repetitions of one configuration. Passes are sorted
/// by median cumulative time descending (name ascending on ties) and `top`
/// lists the first ten of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub configuration: Configuration,
    pub repetitions: usize,
    pub passes: Vec<PassSummary>,
    pub top: Vec<String>,
    pub total_wall: FiveNumber,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total_cpu: Option<FiveNumber>,
}

const TOP_LIST_LEN: usize = 10;

/// Combines repetitions of one configuration into boxplot statistics.
/// A pass absent from some repetition contributes a 0 sample for it.
pub fn summarize(repetitions: &[Repetition]) -> Result<ExperimentSummary, ProfileError> {
    let first = repetitions.first().ok_or(ProfileError::NoRepetitions)?;
    for (index, rep) in repetitions.iter().enumerate() {
        if rep.configuration != first.configuration {
            return Err(ProfileError::MismatchedConfiguration {
                index,
                expected: first.configuration.label(),
                found: rep.configuration.label(),
            });
        }
    }

    let mut universe: std::collections::BTreeMap<&str, &str> = std::collections::BTreeMap::new();
    for rep in repetitions {
        for agg in &rep.aggregates {
            universe
                .entry(agg.pass_name.as_str())
                .or_insert_with(|| agg.category.name());
        }
    }

    let mut passes: Vec<PassSummary> = universe
        .iter()
        .map(|(&name, &category)| {
            let samples: Vec<f64> = repetitions
                .iter()
                .map(|rep| {
                    rep.aggregates
                        .iter()
                        .find(|a| a.pass_name == name)
                        .map(|a| a.cumulative_time_ns as f64)
                        .unwrap_or(0.0)
                })
                .collect();
            PassSummary {
                pass_name: name.to_string(),
                category: category.to_string(),
                stats: five_number(&samples),
            }
        })
        .collect();
    passes.sort_by(|a, b| {
        b.stats
            .median
            .total_cmp(&a.stats.median)
            .then_with(|| a.pass_name.cmp(&b.pass_name))
    });
    let top = passes
        .iter()
        .take(TOP_LIST_LEN)
        .map(|p| p.pass_name.clone())
        .collect();

    let wall_samples: Vec<f64> = repetitions.iter().map(|r| r.total_wall_ns as f64).collect();
    let cpu_samples: Option<Vec<f64>> = repetitions
        .iter()
        .map(|r| r.total_cpu_ns.map(|ns| ns as f64))
        .collect();

    Ok(ExperimentSummary {
        configuration: first.configuration.clone(),
        repetitions: repetitions.len(),
        passes,
        top,
        total_wall: five_number(&wall_samples),
        total_cpu: cpu_samples.map(|s| five_number(&s)),
    })
}
