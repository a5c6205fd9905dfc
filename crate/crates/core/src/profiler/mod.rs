//! Built-in pass instrumentation: per-invocation timing records, cumulative
//! per-pass aggregation, category assignment, top-N ranking, and repeated-run
//! statistics with file exports.

mod export;
mod stats;

pub use export::{
    plot_data_csv, plot_data_from_csv, records_from_csv, records_to_csv, summary_from_json,
    summary_to_json, trace_export, PlotRow,
};
pub use stats::{
    five_number, quantile, summarize, Configuration, ExperimentSummary, FiveNumber, PassSummary,
    Repetition,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::ProfileError;
use crate::framework::{PassDescriptor, PassModule, PassRegistry, Stage};

/// One timed pass invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub run_id: u64,
    pub stage: Stage,
    pub pass_name: String,
    /// Loop index inside a flow controller (1-based); 0 outside controllers.
    pub iteration: u64,
    pub wall_time_ns: u64,
}

/// Collects the records of exactly one pipeline run.
#[derive(Debug, Default)]
pub struct Recorder {
    run_id: u64,
    records: Vec<RunRecord>,
}

impl Recorder {
    pub fn new(run_id: u64) -> Self {
        Recorder {
            run_id,
            records: Vec::new(),
        }
    }

    pub fn run_id(&self) -> u64 {
        self.run_id
    }

    pub fn record(&mut self, stage: Stage, pass_name: &str, iteration: u64, wall_time_ns: u64) {
        self.records.push(RunRecord {
            run_id: self.run_id,
            stage,
            pass_name: pass_name.to_string(),
            iteration,
            wall_time_ns,
        });
    }

    pub fn records(&self) -> &[RunRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<RunRecord> {
        self.records
    }
}

/// Process CPU time in nanoseconds, when the platform exposes it. Ranking
/// always uses wall time; this is reported alongside it.
#[cfg(unix)]
pub fn cpu_time_ns() -> Option<u64> {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    (rc == 0).then(|| ts.tv_sec as u64 * 1_000_000_000 + ts.tv_nsec as u64)
}

#[cfg(not(unix))]
pub fn cpu_time_ns() -> Option<u64> {
    None
}

/// Report category a pass lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    GateSynthesis,
    QubitMapping,
    CircuitOptimization,
    Scheduling,
    Uncategorized,
}

impl Category {
    pub fn name(&self) -> &'static str {
        match self {
            Category::GateSynthesis => "gate-synthesis",
            Category::QubitMapping => "qubit-mapping",
            Category::CircuitOptimization => "circuit-optimization",
            Category::Scheduling => "scheduling",
            Category::Uncategorized => "uncategorized",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Category::GateSynthesis,
            Category::QubitMapping,
            Category::CircuitOptimization,
            Category::Scheduling,
            Category::Uncategorized,
        ]
        .into_iter()
        .find(|c| c.name() == name)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Assigns a category from the pass's implementation module. Generic
/// modules (basis, utils) borrow the category of their single stage of
/// occurrence; seen in several stages they stay uncategorized.
pub fn categorize(descriptor: &PassDescriptor, stages_seen: &BTreeSet<Stage>) -> Category {
    match descriptor.module {
        PassModule::Synthesis => Category::GateSynthesis,
        PassModule::Layout | PassModule::Routing => Category::QubitMapping,
        PassModule::Optimization => Category::CircuitOptimization,
        PassModule::Scheduling => Category::Scheduling,
        PassModule::Basis | PassModule::Utils => {
            if stages_seen.len() != 1 {
                return Category::Uncategorized;
            }
            match stages_seen.iter().next().expect("one stage") {
                Stage::Translation => Category::GateSynthesis,
                Stage::Layout | Stage::Routing => Category::QubitMapping,
                Stage::Optimization => Category::CircuitOptimization,
                Stage::Scheduling => Category::Scheduling,
                Stage::Initialization => Category::Uncategorized,
            }
        }
    }
}

/// Registry-keyed form of [`categorize`].
pub fn categorize_by_name(
    registry: &PassRegistry,
    pass_name: &str,
    stages_seen: &BTreeSet<Stage>,
) -> Result<Category, ProfileError> {
    let descriptor = registry
        .get(pass_name)
        .ok_or_else(|| ProfileError::UnknownPass(pass_name.to_string()))?;
    Ok(categorize(descriptor, stages_seen))
}

/// Cumulative cost of one pass within a single pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PassAggregate {
    pub pass_name: String,
    pub cumulative_time_ns: u64,
    pub invocation_count: usize,
    pub category: Category,
    pub stages_seen: BTreeSet<Stage>,
}

/// Groups one run's records by pass name, summing times across stages and
/// iterations. Pass names missing from the registry report as uncategorized.
pub fn aggregate(
    records: &[RunRecord],
    registry: &PassRegistry,
) -> Result<Vec<PassAggregate>, ProfileError> {
    if let Some(first) = records.first() {
        for r in records {
            if r.run_id != first.run_id {
                return Err(ProfileError::MixedRunIds(first.run_id, r.run_id));
            }
        }
    }
    let mut groups: BTreeMap<&str, (u64, usize, BTreeSet<Stage>)> = BTreeMap::new();
    for r in records {
        let entry = groups
            .entry(r.pass_name.as_str())
            .or_insert_with(|| (0, 0, BTreeSet::new()));
        entry.0 += r.wall_time_ns;
        entry.1 += 1;
        entry.2.insert(r.stage);
    }
    Ok(groups
        .into_iter()
        .map(|(name, (time, count, stages))| {
            let category = categorize_by_name(registry, name, &stages)
                .unwrap_or(Category::Uncategorized);
            PassAggregate {
                pass_name: name.to_string(),
                cumulative_time_ns: time,
                invocation_count: count,
                category,
                stages_seen: stages,
            }
        })
        .collect())
}

/// The `n` most expensive passes: cumulative time descending, ties broken
/// by name ascending.
pub fn top_n(aggregates: &[PassAggregate], n: usize) -> Vec<PassAggregate> {
    let mut ranked = aggregates.to_vec();
    ranked.sort_by(|a, b| {
        b.cumulative_time_ns
            .cmp(&a.cumulative_time_ns)
            .then_with(|| a.pass_name.cmp(&b.pass_name))
    });
    ranked.truncate(n);
    ranked
}

/// Percentage of the total compile time spent in one pass.
pub fn share_of_total(cumulative_time_ns: u64, total_ns: u64) -> Result<f64, ProfileError> {
    if total_ns == 0 {
        return Err(ProfileError::ZeroTotal);
    }
    Ok(100.0 * cumulative_time_ns as f64 / total_ns as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::PassKind;

    fn record(run_id: u64, stage: Stage, name: &str, iteration: u64, ns: u64) -> RunRecord {
        RunRecord {
            run_id,
            stage,
            pass_name: name.to_string(),
            iteration,
            wall_time_ns: ns,
        }
    }

    fn registry() -> PassRegistry {
        let mut reg = PassRegistry::new();
        reg.register(
            "VF2Layout",
            PassKind::Analysis,
            PassModule::Layout,
            Stage::Layout,
        );
        reg.register(
            "MinimumPoint",
            PassKind::Transformation,
            PassModule::Utils,
            Stage::Optimization,
        );
        reg.register(
            "ASAPSchedule",
            PassKind::Transformation,
            PassModule::Scheduling,
            Stage::Scheduling,
        );
        reg
    }

    #[test]
    fn aggregate_empty_is_empty() {
        assert!(aggregate(&[], &registry()).unwrap().is_empty());
    }

    #[test]
    fn aggregate_sums_per_pass() {
        let records = vec![
            record(1, Stage::Layout, "VF2Layout", 0, 5),
            record(1, Stage::Layout, "VF2Layout", 0, 7),
        ];
        let aggs = aggregate(&records, &registry()).unwrap();
        assert_eq!(aggs.len(), 1);
        assert_eq!(aggs[0].cumulative_time_ns, 12);
        assert_eq!(aggs[0].invocation_count, 2);
        assert_eq!(aggs[0].category, Category::QubitMapping);
    }

    #[test]
    fn aggregate_matches_regroup_oracle() {
        let records = vec![
            record(1, Stage::Layout, "VF2Layout", 0, 5),
            record(1, Stage::Optimization, "MinimumPoint", 0, 11),
            record(1, Stage::Scheduling, "ASAPSchedule", 0, 2),
            record(1, Stage::Layout, "VF2Layout", 0, 3),
            record(1, Stage::Optimization, "MinimumPoint", 0, 1),
        ];
        let aggs = aggregate(&records, &registry()).unwrap();

        let mut oracle: std::collections::HashMap<&str, (u64, usize)> =
            std::collections::HashMap::new();
        for r in &records {
            let e = oracle.entry(r.pass_name.as_str()).or_insert((0, 0));
            e.0 += r.wall_time_ns;
            e.1 += 1;
        }
        assert_eq!(aggs.len(), oracle.len());
        for agg in &aggs {
            let &(time, count) = oracle.get(agg.pass_name.as_str()).unwrap();
            assert_eq!(agg.cumulative_time_ns, time);
            assert_eq!(agg.invocation_count, count);
        }
    }

    #[test]
    fn aggregate_rejects_mixed_runs() {
        let records = vec![
            record(1, Stage::Layout, "VF2Layout", 0, 5),
            record(2, Stage::Layout, "VF2Layout", 0, 7),
        ];
        assert!(matches!(
            aggregate(&records, &registry()),
            Err(ProfileError::MixedRunIds(1, 2))
        ));
    }

    #[test]
    fn categorize_layout_module_is_qubit_mapping() {
        let reg = registry();
        let cat = categorize_by_name(&reg, "VF2Layout", &BTreeSet::from([Stage::Layout])).unwrap();
        assert_eq!(cat, Category::QubitMapping);
    }

    #[test]
    fn categorize_utils_borrows_single_stage() {
        let reg = registry();
        let cat = categorize_by_name(
            &reg,
            "MinimumPoint",
            &BTreeSet::from([Stage::Optimization]),
        )
        .unwrap();
        assert_eq!(cat, Category::CircuitOptimization);
    }

    #[test]
    fn categorize_multi_stage_utils_is_uncategorized() {
        let descriptor = PassDescriptor {
            name: "Ambiguous".to_string(),
            kind: PassKind::Transformation,
            module: PassModule::Utils,
            declared_stages: BTreeSet::from([Stage::Layout, Stage::Scheduling]),
        };
        let cat = categorize(
            &descriptor,
            &BTreeSet::from([Stage::Layout, Stage::Scheduling]),
        );
        assert_eq!(cat, Category::Uncategorized);
    }

    #[test]
    fn categorize_unknown_pass_is_an_error() {
        let reg = registry();
        assert!(matches!(
            categorize_by_name(&reg, "Ghost", &BTreeSet::new()),
            Err(ProfileError::UnknownPass(_))
        ));
    }

    fn agg(name: &str, time: u64) -> PassAggregate {
        PassAggregate {
            pass_name: name.to_string(),
            cumulative_time_ns: time,
            invocation_count: 1,
            category: Category::Uncategorized,
            stages_seen: BTreeSet::new(),
        }
    }

    #[test]
    fn top_n_sorts_and_breaks_ties_by_name() {
        let aggs = vec![agg("A", 5), agg("C", 9), agg("B", 9)];
        let ranked = top_n(&aggs, 10);
        let names: Vec<_> = ranked.iter().map(|a| a.pass_name.as_str()).collect();
        assert_eq!(names, vec!["B", "C", "A"]);
    }

    #[test]
    fn top_n_truncates() {
        let aggs: Vec<_> = (0..15).map(|i| agg(&format!("P{i:02}"), i)).collect();
        let ranked = top_n(&aggs, 10);
        assert_eq!(ranked.len(), 10);
        assert_eq!(ranked[0].cumulative_time_ns, 14);
    }

    #[test]
    fn share_of_total_basics() {
        assert!((share_of_total(50, 100).unwrap() - 50.0).abs() < 1e-12);
        assert!((share_of_total(995, 1000).unwrap() - 99.5).abs() < 1e-12);
        assert!(matches!(share_of_total(1, 0), Err(ProfileError::ZeroTotal)));
    }

    #[test]
    fn category_names_round_trip() {
        for cat in [
            Category::GateSynthesis,
            Category::QubitMapping,
            Category::CircuitOptimization,
            Category::Scheduling,
            Category::Uncategorized,
        ] {
            assert_eq!(Category::from_name(cat.name()), Some(cat));
        }
        assert_eq!(Category::from_name("nonsense"), None);
    }
}
