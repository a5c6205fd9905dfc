//! Staged pipeline execution: entries run strictly in stage order, every
//! pass invocation is individually timed, and flow controllers loop their
//! children while accounting their own orchestration time separately so
//! per-pass times never double count.

use std::fmt::Write as _;
use std::time::Instant;

use crate::circuit::{Circuit, Metrics};
use crate::dag::DagCircuit;
use crate::error::PipelineError;
use crate::framework::{Pass, PassContext, PassKind, PassModule, PassRegistry, PropertySet, Stage};
use crate::profiler::{cpu_time_ns, Recorder, RunRecord};
use crate::target::Target;

pub const MINIMUM_POINT_MAX_ITERATIONS: usize = 1000;

const FIXED_POINT_NAME: &str = "FixedPoint";
const MINIMUM_POINT_NAME: &str = "MinimumPoint";

/// Metric a fixed-point loop watches for convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WatchedMetric {
    Size,
    Depth,
}

impl WatchedMetric {
    fn value(&self, m: &Metrics) -> usize {
        match self {
            WatchedMetric::Size => m.size,
            WatchedMetric::Depth => m.depth,
        }
    }
}

/// Repeats its children until the watched metrics are unchanged between
/// consecutive iterations, or the iteration cap is reached.
pub struct FixedPointLoop {
    pub children: Vec<Box<dyn Pass>>,
    pub watched: Vec<WatchedMetric>,
    pub max_iterations: usize,
}

/// Repeats its children tracking the lexicographic (depth, size) cost and
/// restores the best snapshot seen; stops after `backtrack_window`
/// consecutive iterations without improvement.
pub struct MinimumPointLoop {
    pub children: Vec<Box<dyn Pass>>,
    pub backtrack_window: usize,
    pub max_iterations: usize,
}

pub enum PipelineEntry {
    Single(Box<dyn Pass>),
    FixedPoint(FixedPointLoop),
    MinimumPoint(MinimumPointLoop),
}

impl PipelineEntry {
    pub fn single(pass: impl Pass + 'static) -> Self {
        PipelineEntry::Single(Box::new(pass))
    }
}

/// Everything one pipeline run produces. Records are present even when the
/// run aborts, covering every invocation up to and including the failure.
pub struct CompileResult {
    pub outcome: Result<Circuit, PipelineError>,
    pub properties: PropertySet,
    pub records: Vec<RunRecord>,
    pub total_wall_ns: u64,
    pub total_cpu_ns: Option<u64>,
}

impl CompileResult {
    pub fn circuit(&self) -> Option<&Circuit> {
        self.outcome.as_ref().ok()
    }
}

/// Ordered, staged pipeline over a fixed six-stage skeleton.
pub struct PassManager {
    stages: Vec<(Stage, Vec<PipelineEntry>)>,
    optimization_level: Option<u8>,
    registry: PassRegistry,
}

impl Default for PassManager {
    fn default() -> Self {
        Self::new()
    }
}

impl PassManager {
    pub fn new() -> Self {
        PassManager {
            stages: Stage::ALL.map(|s| (s, Vec::new())).into_iter().collect(),
            optimization_level: None,
            registry: PassRegistry::new(),
        }
    }

    pub fn set_optimization_level(&mut self, level: u8) {
        self.optimization_level = Some(level);
    }

    pub fn optimization_level(&self) -> Option<u8> {
        self.optimization_level
    }

    pub fn registry(&self) -> &PassRegistry {
        &self.registry
    }

    pub fn add_pass(&mut self, stage: Stage, pass: impl Pass + 'static) {
        self.add_entry(stage, PipelineEntry::Single(Box::new(pass)));
    }

    pub fn add_entry(&mut self, stage: Stage, entry: PipelineEntry) {
        match &entry {
            PipelineEntry::Single(p) => {
                self.registry.register(p.name(), p.kind(), p.module(), stage);
            }
            PipelineEntry::FixedPoint(fp) => {
                self.registry.register(
                    FIXED_POINT_NAME,
                    PassKind::Transformation,
                    PassModule::Utils,
                    stage,
                );
                for c in &fp.children {
                    self.registry.register(c.name(), c.kind(), c.module(), stage);
                }
            }
            PipelineEntry::MinimumPoint(mp) => {
                self.registry.register(
                    MINIMUM_POINT_NAME,
                    PassKind::Transformation,
                    PassModule::Utils,
                    stage,
                );
                for c in &mp.children {
                    self.registry.register(c.name(), c.kind(), c.module(), stage);
                }
            }
        }
        self.stages
            .iter_mut()
            .find(|(s, _)| *s == stage)
            .expect("all six stages are present")
            .1
            .push(entry);
    }

    /// Ordered `stage/pass` listing with controller children indented.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (stage, entries) in &self.stages {
            for entry in entries {
                match entry {
                    PipelineEntry::Single(p) => {
                        writeln!(out, "{}/{}", stage, p.name()).unwrap();
                    }
                    PipelineEntry::FixedPoint(fp) => {
                        writeln!(out, "{}/{}", stage, FIXED_POINT_NAME).unwrap();
                        for c in &fp.children {
                            writeln!(out, "  {}/{}", stage, c.name()).unwrap();
                        }
                    }
                    PipelineEntry::MinimumPoint(mp) => {
                        writeln!(out, "{}/{}", stage, MINIMUM_POINT_NAME).unwrap();
                        for c in &mp.children {
                            writeln!(out, "  {}/{}", stage, c.name()).unwrap();
                        }
                    }
                }
            }
        }
        out
    }

    /// Runs the pipeline on a copy of `circuit`. Stages execute strictly in
    /// order; a pass failure aborts the run but the records gathered so far
    /// are still returned.
    pub fn run(&self, circuit: &Circuit, target: &Target, run_id: u64) -> CompileResult {
        let run_start = Instant::now();
        let cpu_start = cpu_time_ns();
        let mut recorder = Recorder::new(run_id);
        let mut properties = PropertySet::new();
        let mut dag = DagCircuit::from_circuit(circuit);
        let mut failure = None;

        'stages: for (stage, entries) in &self.stages {
            for entry in entries {
                let result = run_entry(
                    *stage,
                    entry,
                    &mut dag,
                    target,
                    &mut properties,
                    &mut recorder,
                );
                if let Err(err) = result {
                    failure = Some(err);
                    break 'stages;
                }
            }
        }

        let total_wall_ns = run_start.elapsed().as_nanos() as u64;
        let total_cpu_ns = match (cpu_start, cpu_time_ns()) {
            (Some(a), Some(b)) => Some(b.saturating_sub(a)),
            _ => None,
        };
        CompileResult {
            outcome: match failure {
                Some(err) => Err(err),
                None => Ok(dag.to_circuit()),
            },
            properties,
            records: recorder.into_records(),
            total_wall_ns,
            total_cpu_ns,
        }
    }
}

fn run_entry(
    stage: Stage,
    entry: &PipelineEntry,
    dag: &mut DagCircuit,
    target: &Target,
    properties: &mut PropertySet,
    recorder: &mut Recorder,
) -> Result<(), PipelineError> {
    match entry {
        PipelineEntry::Single(pass) => {
            run_timed(stage, pass.as_ref(), 0, dag, target, properties, recorder).map(|_| ())
        }
        PipelineEntry::FixedPoint(fp) => {
            let loop_start = Instant::now();
            let mut children_ns = 0u64;
            let result = run_fixed_point(fp, stage, dag, target, properties, recorder, &mut children_ns);
            let own = (loop_start.elapsed().as_nanos() as u64).saturating_sub(children_ns);
            recorder.record(stage, FIXED_POINT_NAME, 0, own);
            result
        }
        PipelineEntry::MinimumPoint(mp) => {
            let loop_start = Instant::now();
            let mut children_ns = 0u64;
            let result =
                run_minimum_point(mp, stage, dag, target, properties, recorder, &mut children_ns);
            let own = (loop_start.elapsed().as_nanos() as u64).saturating_sub(children_ns);
            recorder.record(stage, MINIMUM_POINT_NAME, 0, own);
            result
        }
    }
}

fn run_fixed_point(
    fp: &FixedPointLoop,
    stage: Stage,
    dag: &mut DagCircuit,
    target: &Target,
    properties: &mut PropertySet,
    recorder: &mut Recorder,
    children_ns: &mut u64,
) -> Result<(), PipelineError> {
    let mut previous: Option<Vec<usize>> = None;
    for iteration in 1..=fp.max_iterations {
        for child in &fp.children {
            *children_ns += run_timed(
                stage,
                child.as_ref(),
                iteration as u64,
                dag,
                target,
                properties,
                recorder,
            )?;
        }
        let metrics = dag.metrics();
        let watched: Vec<usize> = fp.watched.iter().map(|w| w.value(&metrics)).collect();
        if previous.as_ref() == Some(&watched) {
            break;
        }
        previous = Some(watched);
    }
    Ok(())
}

fn run_minimum_point(
    mp: &MinimumPointLoop,
    stage: Stage,
    dag: &mut DagCircuit,
    target: &Target,
    properties: &mut PropertySet,
    recorder: &mut Recorder,
    children_ns: &mut u64,
) -> Result<(), PipelineError> {
    let mut best: Option<((usize, usize), Circuit)> = None;
    let mut since_improvement = 0usize;
    for iteration in 1..=mp.max_iterations {
        for child in &mp.children {
            *children_ns += run_timed(
                stage,
                child.as_ref(),
                iteration as u64,
                dag,
                target,
                properties,
                recorder,
            )?;
        }
        let m = dag.metrics();
        let cost = (m.depth, m.size);
        let improved = best.as_ref().map_or(true, |(b, _)| cost < *b);
        if improved {
            best = Some((cost, dag.to_circuit()));
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement >= mp.backtrack_window {
                break;
            }
        }
    }
    if let Some((_, snapshot)) = best {
        dag.replace_with(&snapshot)
            .expect("snapshot came from this dag, widths match");
    }
    Ok(())
}

fn run_timed(
    stage: Stage,
    pass: &dyn Pass,
    iteration: u64,
    dag: &mut DagCircuit,
    target: &Target,
    properties: &mut PropertySet,
    recorder: &mut Recorder,
) -> Result<u64, PipelineError> {
    #[cfg(debug_assertions)]
    let pre_hash = (pass.kind() == PassKind::Analysis).then(|| dag.content_hash());

    let started = Instant::now();
    let result = pass.run(dag, &mut PassContext { target, properties });
    let elapsed = started.elapsed().as_nanos() as u64;
    recorder.record(stage, pass.name(), iteration, elapsed);

    #[cfg(debug_assertions)]
    if let Some(h) = pre_hash {
        debug_assert_eq!(
            h,
            dag.content_hash(),
            "analysis pass {} mutated the circuit",
            pass.name()
        );
    }

    match result {
        Ok(()) => Ok(elapsed),
        Err(source) => Err(PipelineError {
            pass: pass.name().to_string(),
            stage,
            source,
        }),
    }
}
