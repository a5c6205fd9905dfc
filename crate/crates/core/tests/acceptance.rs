//! Release gate: one test per acceptance criterion, each printing a single
//! `criterion N: PASS` or `criterion N: FAIL` line. Tolerances and budgets
//! are pinned as constants next to the criteria they guard.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcc_core::circuit::{build_ghz, build_qft, Circuit, GateKind};
use qcc_core::dag::DagCircuit;
use qcc_core::framework::{
    keys, MinimumPointLoop, Pass, PassContext, PassDescriptor, PassKind, PassManager, PassModule,
    PipelineEntry, PropertySet, Stage, MINIMUM_POINT_MAX_ITERATIONS,
};
use qcc_core::passes::{
    is_monomorphism, vf2_layout, InteractionGraph, InverseCancellation, Optimize1QGates,
    Vf2Budget, Vf2Scoring,
};
use qcc_core::presets::build_preset;
use qcc_core::profiler::{
    aggregate, categorize, five_number, share_of_total, top_n, Category, PassAggregate,
};
use qcc_core::sim::verify_compiled;
use qcc_core::target::Target;
use qcc_core::PassError;

/// Criterion 1: maximum amplitude deviation for compiled-vs-source sweeps.
const EQUIVALENCE_TOLERANCE: f64 = 1e-8;
/// Criteria 1 and 4: wall-clock ceiling for each timed scenario.
const SCENARIO_TIME_LIMIT: Duration = Duration::from_secs(60);
/// Criterion 4: minimum share of total compile time for the layout search.
const LAYOUT_SHARE_FLOOR_PERCENT: f64 = 50.0;
/// Criterion 5: level-0 synthesis must cost at least this multiple of the
/// pre-expanded levels.
const SYNTHESIS_RATIO_FLOOR: f64 = 2.0;
/// Criterion 5: repetitions per level for the median.
const SYNTHESIS_REPETITIONS: usize = 5;
/// Criterion 7: number of random graph pairs checked against brute force.
const GRAPH_PAIR_SAMPLES: usize = 500;
/// Criterion 7: wall-clock ceiling for the oracle comparison.
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(30);
/// Criterion 8: number of random circuits for the size-monotonicity check.
const RANDOM_CIRCUIT_SAMPLES: usize = 1000;

fn report(criterion: usize, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {criterion}: PASS");
    } else {
        println!("criterion {criterion}: FAIL");
        panic!(
            "criterion {criterion} failed:\n{}",
            failures.join("\n")
        );
    }
}

/// The benchmark suite used by criteria 1 and 2: QFT and GHZ circuits over
/// both generated target families.
fn suite() -> Vec<Circuit> {
    let mut circuits = Vec::new();
    for n in 2..=7 {
        circuits.push(build_qft(n, false).unwrap());
    }
    for n in 2..=10 {
        circuits.push(build_ghz(n).unwrap());
    }
    circuits
}

fn suite_targets(width: usize) -> Vec<Target> {
    vec![
        Target::line(width).unwrap(),
        Target::grid(2, width.div_ceil(2)).unwrap(),
    ]
}

#[test]
fn criterion_1_semantic_preservation() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for circuit in suite() {
        for target in suite_targets(circuit.num_qubits()) {
            for level in 0..=3u8 {
                let label = format!(
                    "{} level {level} on {} qubits",
                    circuit.name,
                    target.num_qubits()
                );
                let result = build_preset(level).unwrap().run(&circuit, &target, 1);
                let compiled = match &result.outcome {
                    Ok(c) => c,
                    Err(e) => {
                        failures.push(format!("{label}: compile failed: {e}"));
                        continue;
                    }
                };
                let layout = result.properties.get_layout(keys::LAYOUT).unwrap();
                match verify_compiled(
                    &circuit,
                    compiled,
                    &layout.virtual_to_physical,
                    &layout.output_permutation,
                    EQUIVALENCE_TOLERANCE,
                ) {
                    Ok(report) if report.equivalent => {}
                    Ok(report) => failures.push(format!(
                        "{label}: deviation {} on input {:?}",
                        report.max_deviation, report.failing_input
                    )),
                    Err(e) => failures.push(format!("{label}: simulation failed: {e}")),
                }
            }
        }
    }
    let elapsed = started.elapsed();
    if elapsed > SCENARIO_TIME_LIMIT {
        failures.push(format!("suite took {elapsed:?}, limit {SCENARIO_TIME_LIMIT:?}"));
    }
    report(1, &failures);
}

#[test]
fn criterion_2_legality() {
    let mut failures = Vec::new();
    for circuit in suite() {
        for target in suite_targets(circuit.num_qubits()) {
            for level in 0..=3u8 {
                let label = format!(
                    "{} level {level} on {} qubits",
                    circuit.name,
                    target.num_qubits()
                );
                let result = build_preset(level).unwrap().run(&circuit, &target, 1);
                let compiled = match &result.outcome {
                    Ok(c) => c,
                    Err(e) => {
                        failures.push(format!("{label}: compile failed: {e}"));
                        continue;
                    }
                };
                for instr in compiled.instructions() {
                    if instr.qubits.len() == 2
                        && !target.is_coupled(instr.qubits[0], instr.qubits[1])
                    {
                        failures.push(format!("{label}: {instr} is uncoupled"));
                    }
                    let is_delay = matches!(instr.kind, GateKind::Delay(_));
                    if !is_delay && !target.in_basis(instr.kind.label()) {
                        failures.push(format!("{label}: {instr} escaped the basis"));
                    }
                }
            }
        }
    }
    report(2, &failures);
}

#[test]
fn criterion_3_pipeline_structure() {
    let mut failures = Vec::new();
    let dumps: Vec<String> = (0..=3u8)
        .map(|l| build_preset(l).unwrap().dump())
        .collect();
    for (level, dump) in dumps.iter().enumerate() {
        let has_minimum_point = dump.contains("MinimumPoint");
        if (level == 3) != has_minimum_point {
            failures.push(format!(
                "level {level}: MinimumPoint presence {has_minimum_point}"
            ));
        }
    }
    if dumps[0].contains("optimization/") {
        failures.push("level 0 has optimization-stage entries".to_string());
    }

    let stage_index =
        |stage: Stage| Stage::ALL.iter().position(|s| *s == stage).unwrap();
    let ghz = build_ghz(4).unwrap();
    let target = Target::line(4).unwrap();
    for level in 0..=3u8 {
        let result = build_preset(level).unwrap().run(&ghz, &target, 9);
        if result.outcome.is_err() {
            failures.push(format!("level {level}: compile failed"));
            continue;
        }
        let mut last = 0usize;
        for record in &result.records {
            let index = stage_index(record.stage);
            if index < last {
                failures.push(format!(
                    "level {level}: record for {} in stage {} after a later stage",
                    record.pass_name, record.stage
                ));
            }
            last = last.max(index);
        }
    }
    report(3, &failures);
}

#[test]
fn criterion_4_layout_dominates_sparse_device_compiles() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let target = Target::load(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../targets/eagle-like.target"
    ))
    .expect("shipped device model loads");
    if target.num_qubits() < 100 {
        failures.push(format!("device model has {} qubits", target.num_qubits()));
    }
    let ghz = build_ghz(100).unwrap();
    for level in 2..=3u8 {
        let pm = build_preset(level).unwrap();
        let result = pm.run(&ghz, &target, u64::from(level));
        if let Err(e) = &result.outcome {
            failures.push(format!("level {level}: compile failed: {e}"));
            continue;
        }
        let aggregates = aggregate(&result.records, pm.registry()).unwrap();
        let vf2 = aggregates.iter().find(|a| a.pass_name == "VF2Layout");
        match vf2 {
            Some(agg) => {
                let share =
                    share_of_total(agg.cumulative_time_ns, result.total_wall_ns).unwrap();
                if share < LAYOUT_SHARE_FLOOR_PERCENT {
                    failures.push(format!(
                        "level {level}: VF2Layout share {share:.1}% below {LAYOUT_SHARE_FLOOR_PERCENT}%"
                    ));
                }
            }
            None => failures.push(format!("level {level}: no VF2Layout aggregate")),
        }
        let top = top_n(&aggregates, 1);
        if top.first().map(|a| a.pass_name.as_str()) != Some("VF2Layout") {
            failures.push(format!(
                "level {level}: top pass is {:?}",
                top.first().map(|a| a.pass_name.clone())
            ));
        }
    }
    let elapsed = started.elapsed();
    if elapsed > SCENARIO_TIME_LIMIT {
        failures.push(format!("run took {elapsed:?}, limit {SCENARIO_TIME_LIMIT:?}"));
    }
    report(4, &failures);
}

#[test]
fn criterion_5_boxed_synthesis_cost_concentrates_at_level_0() {
    let mut failures = Vec::new();
    let boxed = build_qft(50, true).unwrap();
    let target = Target::line(50).unwrap();

    let median_synthesis_ns = |level: u8| -> f64 {
        let pm = build_preset(level).unwrap();
        let mut samples = Vec::with_capacity(SYNTHESIS_REPETITIONS);
        for rep in 0..SYNTHESIS_REPETITIONS {
            let result = pm.run(&boxed, &target, rep as u64);
            assert!(result.outcome.is_ok(), "level {level} rep {rep} failed");
            let aggregates = aggregate(&result.records, pm.registry()).unwrap();
            let hls = aggregates
                .iter()
                .find(|a| a.pass_name == "HighLevelSynthesis")
                .map(|a| a.cumulative_time_ns)
                .unwrap_or(0);
            samples.push(hls as f64);
        }
        five_number(&samples).median
    };

    let level0 = median_synthesis_ns(0);
    for level in 1..=3u8 {
        let other = median_synthesis_ns(level);
        if level0 < SYNTHESIS_RATIO_FLOOR * other {
            failures.push(format!(
                "level 0 synthesis median {level0} ns is not {SYNTHESIS_RATIO_FLOOR}x level {level} median {other} ns"
            ));
        }
    }
    report(5, &failures);
}

#[test]
fn criterion_6_profiler_correctness() {
    let mut failures = Vec::new();

    // Per-pass time conservation across a batch of real compiles.
    for n in [3usize, 5] {
        for level in 0..=3u8 {
            for circuit in [build_ghz(n).unwrap(), build_qft(n, false).unwrap()] {
                let target = Target::line(n).unwrap();
                let result = build_preset(level).unwrap().run(&circuit, &target, 6);
                let recorded: u64 =
                    result.records.iter().map(|r| r.wall_time_ns).sum();
                if recorded > result.total_wall_ns {
                    failures.push(format!(
                        "{} level {level}: record sum {recorded} exceeds total {}",
                        circuit.name, result.total_wall_ns
                    ));
                }
            }
        }
    }

    // Ranking against a full-sort oracle over synthetic aggregates with
    // plenty of ties.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let synthetic: Vec<PassAggregate> = (0..1000)
        .map(|i| PassAggregate {
            pass_name: format!("Pass{:03}", i % 157),
            cumulative_time_ns: rng.gen_range(0..100),
            invocation_count: 1,
            category: Category::Uncategorized,
            stages_seen: BTreeSet::new(),
        })
        .collect();
    let mut oracle = synthetic.clone();
    oracle.sort_by(|a, b| {
        b.cumulative_time_ns
            .cmp(&a.cumulative_time_ns)
            .then_with(|| a.pass_name.cmp(&b.pass_name))
    });
    for n in [1usize, 3, 10, 57, 1000, 2000] {
        let ranked = top_n(&synthetic, n);
        let expected: Vec<_> = oracle.iter().take(n).cloned().collect();
        let ranked_keys: Vec<_> = ranked
            .iter()
            .map(|a| (a.cumulative_time_ns, a.pass_name.clone()))
            .collect();
        let expected_keys: Vec<_> = expected
            .iter()
            .map(|a| (a.cumulative_time_ns, a.pass_name.clone()))
            .collect();
        if ranked_keys != expected_keys {
            failures.push(format!("top_n({n}) diverges from the sort oracle"));
        }
    }

    // Quartile sanity on the fixed four-point sample.
    let stats = five_number(&[1.0, 2.0, 3.0, 4.0]);
    if (stats.min, stats.q1, stats.median, stats.q3, stats.max)
        != (1.0, 1.75, 2.5, 3.25, 4.0)
    {
        failures.push(format!("five-number summary of [1,2,3,4] came out {stats:?}"));
    }

    // The three categorization rule examples.
    let descriptor = |module: PassModule| PassDescriptor {
        name: "UnderTest".to_string(),
        kind: PassKind::Analysis,
        module,
        declared_stages: BTreeSet::new(),
    };
    let cases = [
        (
            PassModule::Layout,
            BTreeSet::from([Stage::Layout]),
            Category::QubitMapping,
        ),
        (
            PassModule::Utils,
            BTreeSet::from([Stage::Optimization]),
            Category::CircuitOptimization,
        ),
        (
            PassModule::Utils,
            BTreeSet::from([Stage::Layout, Stage::Scheduling]),
            Category::Uncategorized,
        ),
    ];
    for (module, stages, expected) in cases {
        let got = categorize(&descriptor(module), &stages);
        if got != expected {
            failures.push(format!(
                "categorize({module:?}, {stages:?}) = {got:?}, expected {expected:?}"
            ));
        }
    }
    report(6, &failures);
}

/// Exhaustive injection enumeration, structurally independent of the VF2
/// search: plain recursion in node order with full consistency checks.
fn brute_force_embeds(interaction: &InteractionGraph, target: &Target) -> bool {
    fn extend(
        v: usize,
        interaction: &InteractionGraph,
        target: &Target,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if v == interaction.num_nodes() {
            return true;
        }
        for p in 0..target.num_qubits() {
            if used[p] {
                continue;
            }
            let ok = interaction
                .neighbors(v)
                .filter(|&u| u < v)
                .all(|u| target.is_coupled(mapping[u], p));
            if !ok {
                continue;
            }
            mapping.push(p);
            used[p] = true;
            if extend(v + 1, interaction, target, mapping, used) {
                return true;
            }
            mapping.pop();
            used[p] = false;
        }
        false
    }
    if interaction.num_nodes() > target.num_qubits() {
        return false;
    }
    let mut mapping = Vec::new();
    let mut used = vec![false; target.num_qubits()];
    extend(0, interaction, target, &mut mapping, &mut used)
}

#[test]
fn criterion_7_layout_search_matches_brute_force() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let budget = Vf2Budget {
        max_states: u64::MAX,
        scoring: Vf2Scoring::First,
    };
    let mut found = 0usize;
    for sample in 0..GRAPH_PAIR_SAMPLES {
        let pattern_nodes = rng.gen_range(1..=8usize);
        let target_nodes = rng.gen_range(1..=8usize);
        let mut edges = Vec::new();
        for a in 0..pattern_nodes {
            for b in (a + 1)..pattern_nodes {
                if rng.gen_bool(0.35) {
                    edges.push((a, b));
                }
            }
        }
        let interaction = InteractionGraph::from_edges(pattern_nodes, &edges);
        let mut target = Target::new(target_nodes).unwrap();
        for a in 0..target_nodes {
            for b in (a + 1)..target_nodes {
                if rng.gen_bool(0.35) {
                    target.add_edge_default(a, b).unwrap();
                }
            }
        }

        let outcome = vf2_layout(&interaction, &target, &budget);
        let expected = brute_force_embeds(&interaction, &target);
        match &outcome.mapping {
            Some(mapping) => {
                found += 1;
                if !expected {
                    failures.push(format!("sample {sample}: search found, oracle says none"));
                }
                if !is_monomorphism(&interaction, &target, mapping) {
                    failures.push(format!("sample {sample}: returned map is not a monomorphism"));
                }
            }
            None => {
                if expected {
                    failures.push(format!("sample {sample}: search missed an embedding"));
                }
            }
        }
    }
    // The sample mix must actually exercise both outcomes.
    if found == 0 || found == GRAPH_PAIR_SAMPLES {
        failures.push(format!("degenerate sample mix: {found} embeddings found"));
    }
    let elapsed = started.elapsed();
    if elapsed > ORACLE_TIME_LIMIT {
        failures.push(format!("oracle sweep took {elapsed:?}, limit {ORACLE_TIME_LIMIT:?}"));
    }
    report(7, &failures);
}

/// Rebuilds the circuit with a scripted size on each invocation, so the
/// optimization loop sees an oscillating cost sequence.
struct ScriptedSizes {
    sizes: Vec<usize>,
    calls: std::cell::Cell<usize>,
}

impl Pass for ScriptedSizes {
    fn name(&self) -> &str {
        "ScriptedSizes"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Optimization
    }

    fn run(&self, dag: &mut DagCircuit, _ctx: &mut PassContext) -> Result<(), PassError> {
        let call = self.calls.get();
        self.calls.set(call + 1);
        let size = self.sizes[call.min(self.sizes.len() - 1)];
        let mut c = Circuit::new(dag.num_qubits(), "scripted");
        for _ in 0..size {
            c.push(GateKind::H, vec![0]).unwrap();
        }
        dag.replace_with(&c)?;
        Ok(())
    }
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.gen_range(1..=6usize);
    let gates = rng.gen_range(0..=40usize);
    let mut c = Circuit::new(n, "random");
    for _ in 0..gates {
        let q = rng.gen_range(0..n);
        match rng.gen_range(0..7u8) {
            0 => c.push(GateKind::H, vec![q]).unwrap(),
            1 => c.push(GateKind::X, vec![q]).unwrap(),
            2 => c.push(GateKind::Sx, vec![q]).unwrap(),
            3 => c
                .push(GateKind::Rz(rng.gen_range(-4.0..4.0)), vec![q])
                .unwrap(),
            kind => {
                if n < 2 {
                    c.push(GateKind::H, vec![q]).unwrap();
                    continue;
                }
                let mut other = rng.gen_range(0..n);
                while other == q {
                    other = rng.gen_range(0..n);
                }
                match kind {
                    4 => c.push(GateKind::Cx, vec![q, other]).unwrap(),
                    5 => c.push(GateKind::Swap, vec![q, other]).unwrap(),
                    _ => c
                        .push(GateKind::Cp(rng.gen_range(-4.0..4.0)), vec![q, other])
                        .unwrap(),
                }
            }
        }
    }
    c
}

#[test]
fn criterion_8_optimization_behavior() {
    let mut failures = Vec::new();

    // Oscillating cost: sizes 10, 8, 9, 8, 9, ... must settle on the best
    // snapshot of size 8.
    let mut pm = PassManager::new();
    pm.add_entry(
        Stage::Optimization,
        PipelineEntry::MinimumPoint(MinimumPointLoop {
            children: vec![Box::new(ScriptedSizes {
                sizes: vec![10, 8, 9, 8, 9, 9, 9, 9, 9, 9],
                calls: std::cell::Cell::new(0),
            })],
            backtrack_window: 5,
            max_iterations: MINIMUM_POINT_MAX_ITERATIONS,
        }),
    );
    let seed = Circuit::new(1, "seed");
    let target = Target::line(2).unwrap();
    let result = pm.run(&seed, &target, 8);
    match &result.outcome {
        Ok(c) if c.metrics().size == 8 => {}
        Ok(c) => failures.push(format!(
            "oscillating run settled on size {}, expected 8",
            c.metrics().size
        )),
        Err(e) => failures.push(format!("oscillating run failed: {e}")),
    }

    // Size monotonicity of both optimization passes on random circuits.
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let wide_target = Target::line(6).unwrap();
    for sample in 0..RANDOM_CIRCUIT_SAMPLES {
        let circuit = random_circuit(&mut rng);
        let before = circuit.metrics().size;
        for pass in [&InverseCancellation as &dyn Pass, &Optimize1QGates] {
            let mut dag = DagCircuit::from_circuit(&circuit);
            let mut props = PropertySet::new();
            let mut ctx = PassContext {
                target: &wide_target,
                properties: &mut props,
            };
            if let Err(e) = pass.run(&mut dag, &mut ctx) {
                failures.push(format!("sample {sample}: {} failed: {e}", pass.name()));
                continue;
            }
            let after = dag.metrics().size;
            if after > before {
                failures.push(format!(
                    "sample {sample}: {} grew size {before} -> {after}",
                    pass.name()
                ));
            }
        }
    }

    // Higher optimization never worsens the two-qubit count on QFT.
    let qft = build_qft(20, false).unwrap();
    let line = Target::line(20).unwrap();
    let two_qubit_count = |level: u8| {
        let result = build_preset(level).unwrap().run(&qft, &line, u64::from(level));
        result
            .outcome
            .as_ref()
            .expect("qft(20) compiles")
            .metrics()
            .two_qubit_count
    };
    let level0 = two_qubit_count(0);
    let level2 = two_qubit_count(2);
    if level2 > level0 {
        failures.push(format!(
            "level 2 two-qubit count {level2} exceeds level 0 count {level0}"
        ));
    }
    report(8, &failures);
}
