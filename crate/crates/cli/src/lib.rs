//! Experiment runner for the qcc transpiler. Generates a benchmark circuit,
//! compiles it repeatedly under a preset pipeline while the built-in profiler
//! records every pass, and reports where the compilation time goes. Reports
//! can be written as files (records, summaries, boxplot data, the compiled
//! circuit) in the formats the core crate knows how to read back.

use std::fmt::Write as _;
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qcc_core::circuit::{build_ghz, build_qft, Circuit};
use qcc_core::framework::keys;
use qcc_core::presets::build_preset;
use qcc_core::profiler::{
    aggregate, plot_data_csv, records_to_csv, summarize, summary_to_json, Configuration,
    ExperimentSummary, Repetition, RunRecord,
};
use qcc_core::sim::{verify_compiled, EquivalenceReport, MAX_SWEEP_QUBITS};
use qcc_core::target::Target;
use qcc_core::PipelineError;

/// Tolerance handed to the equivalence oracle by `--verify` and `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

const QUICK_REPS: usize = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("compilation failed: {0}")]
    Compile(#[from] PipelineError),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// Process exit code for this failure: 2 for bad arguments, 3 for a
    /// failed compile, 4 for a failed equivalence check, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compile(_) => 3,
            CliError::Verification(_) => 4,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qcc",
    version,
    about = "Profile the qcc quantum-circuit transpiler pass by pass"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compile one circuit at one preset level repeatedly and report where
    /// the time goes.
    Profile(ProfileArgs),
    /// Profile all four preset levels on the same circuit and compare them.
    CompareLevels(CompareArgs),
    /// Compile once and check the output against the statevector oracle.
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Benchmark family to generate.
    #[arg(long, value_enum)]
    pub circuit: CircuitKind,
    /// Width of the generated circuit.
    #[arg(long)]
    pub qubits: usize,
    /// Device model: a .target file path, line:N, or grid:RxC.
    #[arg(long)]
    pub target: String,
}

impl CommonArgs {
    pub fn build_circuit(&self) -> Result<Circuit, CliError> {
        self.circuit.build(self.qubits).map_err(|e| {
            CliError::Usage(format!(
                "cannot build {}({}): {}",
                self.circuit.family(),
                self.qubits,
                e
            ))
        })
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Repetitions per configuration.
    #[arg(long, default_value_t = 30)]
    pub reps: usize,
    /// Shortcut for --reps 3, for smoke runs.
    #[arg(long, conflicts_with = "reps")]
    pub quick: bool,
    /// Directory the report files are written into. Without it only the
    /// console report is produced.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rows in each printed ranking.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Adjacent ranks whose median times differ by less than this percentage
    /// are marked "~": their order may swap between runs.
    #[arg(long, default_value_t = 1.0)]
    pub tie_threshold: f64,
    /// Run repetitions in a fixed order with sequential run ids. This is the
    /// only mode: the pipeline has no randomness to seed.
    #[arg(long)]
    pub seedless_deterministic: bool,
}

impl RunArgs {
    pub fn effective_reps(&self) -> Result<usize, CliError> {
        let reps = if self.quick { QUICK_REPS } else { self.reps };
        if reps == 0 {
            return Err(CliError::Usage("--reps must be at least 1".to_string()));
        }
        Ok(reps)
    }
}

#[derive(Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Preset optimization level.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub level: u8,
    #[command(flatten)]
    pub run: RunArgs,
    /// Check the compiled circuit against the statevector oracle. Limited to
    /// small widths: the sweep visits every basis state.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Check every level's output against the statevector oracle.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Preset optimization level.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    pub level: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CircuitKind {
    Qft,
    Ghz,
}

impl CircuitKind {
    pub fn family(self) -> &'static str {
        match self {
            CircuitKind::Qft => "qft",
            CircuitKind::Ghz => "ghz",
        }
    }

    pub fn build(self, qubits: usize) -> Result<Circuit, qcc_core::CircuitError> {
        match self {
            CircuitKind::Qft => build_qft(qubits, false),
            CircuitKind::Ghz => build_ghz(qubits),
        }
    }
}

/// Resolves a --target value into a device model plus a short label for
/// reports: `line:N` and `grid:RxC` generate one, anything else is loaded
/// as a target file.
pub fn parse_target(spec: &str) -> Result<(Target, String), CliError> {
    if let Some(rest) = spec.strip_prefix("line:") {
        let n: usize = rest
            .parse()
            .map_err(|_| bad_target(spec, "line wants a qubit count, e.g. line:8"))?;
        let target = Target::line(n).map_err(|e| bad_target(spec, &e.to_string()))?;
        Ok((target, spec.to_string()))
    } else if let Some(rest) = spec.strip_prefix("grid:") {
        let (rows, cols) = rest
            .split_once('x')
            .ok_or_else(|| bad_target(spec, "grid wants ROWSxCOLS, e.g. grid:2x4"))?;
        let rows: usize = rows
            .parse()
            .map_err(|_| bad_target(spec, "grid wants ROWSxCOLS, e.g. grid:2x4"))?;
        let cols: usize = cols
            .parse()
            .map_err(|_| bad_target(spec, "grid wants ROWSxCOLS, e.g. grid:2x4"))?;
        let target = Target::grid(rows, cols).map_err(|e| bad_target(spec, &e.to_string()))?;
        Ok((target, spec.to_string()))
    } else {
        let target = Target::load(spec).map_err(|e| bad_target(spec, &e.to_string()))?;
        let label = Path::new(spec)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        Ok((target, label))
    }
}

fn bad_target(spec: &str, why: &str) -> CliError {
    CliError::Usage(format!("invalid --target {spec:?}: {why}"))
}

/// The oracle sweeps all 2^n basis states, so both the circuit and the
/// device it lands on must be small.
pub fn ensure_verifiable(circuit_qubits: usize, target_qubits: usize) -> Result<(), CliError> {
    if circuit_qubits.max(target_qubits) > MAX_SWEEP_QUBITS {
        return Err(CliError::Usage(format!(
            "verification sweeps every basis state and is limited to {MAX_SWEEP_QUBITS} qubits; \
             got a {circuit_qubits}-qubit circuit on a {target_qubits}-qubit target"
        )));
    }
    Ok(())
}

/// Everything one profiled configuration produces: per-invocation records
/// across all repetitions, their combined summary, and the first
/// repetition's compiled circuit with its layout.
pub struct ProfiledRun {
    pub summary: ExperimentSummary,
    pub records: Vec<RunRecord>,
    pub compiled: Circuit,
    pub virtual_to_physical: Vec<usize>,
    pub output_permutation: Vec<usize>,
}

pub fn run_configuration(
    circuit: &Circuit,
    family: &str,
    target: &Target,
    target_label: &str,
    level: u8,
    reps: usize,
) -> Result<ProfiledRun, CliError> {
    if reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".to_string()));
    }
    let pass_manager = build_preset(level).map_err(|e| CliError::Usage(e.to_string()))?;
    let configuration = Configuration {
        circuit: family.to_string(),
        qubits: circuit.num_qubits(),
        level,
        target: target_label.to_string(),
    };

    let mut repetitions = Vec::with_capacity(reps);
    let mut records = Vec::new();
    let mut first: Option<(Circuit, Vec<usize>, Vec<usize>)> = None;
    for rep in 0..reps {
        let result = pass_manager.run(circuit, target, rep as u64);
        let compiled = result.outcome.map_err(CliError::Compile)?;
        let aggregates = aggregate(&result.records, pass_manager.registry())
            .map_err(|e| CliError::Internal(e.to_string()))?;
        repetitions.push(Repetition {
            configuration: configuration.clone(),
            aggregates,
            total_wall_ns: result.total_wall_ns,
            total_cpu_ns: result.total_cpu_ns,
        });
        records.extend(result.records);
        if first.is_none() {
            let layout = result.properties.get_layout(keys::LAYOUT).ok_or_else(|| {
                CliError::Internal("pipeline finished without recording a layout".to_string())
            })?;
            first = Some((
                compiled,
                layout.virtual_to_physical.clone(),
                layout.output_permutation.clone(),
            ));
        }
    }
    let summary = summarize(&repetitions).map_err(|e| CliError::Internal(e.to_string()))?;
    let (compiled, virtual_to_physical, output_permutation) =
        first.expect("at least one repetition ran");
    Ok(ProfiledRun {
        summary,
        records,
        compiled,
        virtual_to_physical,
        output_permutation,
    })
}

/// Runs the oracle and turns a mismatch into the exit-4 error, naming the
/// first failing basis input.
pub fn check_equivalence(
    original: &Circuit,
    compiled: &Circuit,
    virtual_to_physical: &[usize],
    output_permutation: &[usize],
) -> Result<EquivalenceReport, CliError> {
    let report = verify_compiled(
        original,
        compiled,
        virtual_to_physical,
        output_permutation,
        VERIFY_TOLERANCE,
    )
    .map_err(|e| CliError::Internal(e.to_string()))?;
    if !report.equivalent {
        let input = report.failing_input.unwrap_or(0);
        return Err(CliError::Verification(format!(
            "first failing basis input {} = |{:0width$b}>, max amplitude deviation {:.3e}",
            input,
            input,
            report.max_deviation,
            width = original.num_qubits()
        )));
    }
    Ok(report)
}

/// One printed ranking row: a pass, its median cumulative time across
/// repetitions, and that median's share of the median total wall time.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRow {
    pub rank: usize,
    pub pass_name: String,
    pub category: String,
    pub median_ns: f64,
    pub share_percent: f64,
    pub near_tie: bool,
}

/// Top rows of a summary's ranking. A row is a near-tie when its median is
/// within `tie_threshold` percent of an adjacent rank's median; such ranks
/// may swap between otherwise identical runs.
pub fn ranked_rows(
    summary: &ExperimentSummary,
    top: usize,
    tie_threshold: f64,
) -> Vec<RankedRow> {
    let total = summary.total_wall.median;
    let medians: Vec<f64> = summary.passes.iter().map(|p| p.stats.median).collect();
    let mut tied = vec![false; medians.len()];
    for i in 1..medians.len() {
        let larger = medians[i - 1];
        let gap = if larger > 0.0 {
            100.0 * (larger - medians[i]) / larger
        } else {
            0.0
        };
        if gap < tie_threshold {
            tied[i - 1] = true;
            tied[i] = true;
        }
    }
    summary
        .passes
        .iter()
        .enumerate()
        .take(top)
        .map(|(i, p)| RankedRow {
            rank: i + 1,
            pass_name: p.pass_name.clone(),
            category: p.category.clone(),
            median_ns: p.stats.median,
            share_percent: if total > 0.0 {
                100.0 * p.stats.median / total
            } else {
                0.0
            },
            near_tie: tied[i],
        })
        .collect()
}

pub fn format_ns(ns: f64) -> String {
    if ns >= 1e9 {
        format!("{:.2} s", ns / 1e9)
    } else if ns >= 1e6 {
        format!("{:.2} ms", ns / 1e6)
    } else if ns >= 1e3 {
        format!("{:.2} us", ns / 1e3)
    } else {
        format!("{ns:.0} ns")
    }
}

/// True when stdout is a terminal and NO_COLOR is unset.
pub fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn bold(text: &str, color: bool) -> String {
    if color {
        format!("\x1b[1m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn render_table(
    summary: &ExperimentSummary,
    top: usize,
    tie_threshold: f64,
    color: bool,
) -> String {
    let rows = ranked_rows(summary, top, tie_threshold);
    let mut out = String::new();
    let header = format!(
        "{:>5}  {:<22}  {:<22}  {:>12}  {:>7}",
        "rank", "pass", "category", "median", "share"
    );
    writeln!(out, "{}", bold(&header, color)).unwrap();
    for row in &rows {
        writeln!(
            out,
            "{:>5}  {:<22}  {:<22}  {:>12}  {:>6.2}%{}",
            row.rank,
            row.pass_name,
            row.category,
            format_ns(row.median_ns),
            row.share_percent,
            if row.near_tie { " ~" } else { "" }
        )
        .unwrap();
    }
    writeln!(
        out,
        "total wall time (median): {}",
        format_ns(summary.total_wall.median)
    )
    .unwrap();
    if rows.iter().any(|r| r.near_tie) {
        writeln!(
            out,
            "~ adjacent medians within {tie_threshold}%; those ranks may swap between runs"
        )
        .unwrap();
    }
    out
}

/// One line of the level-comparison table and of comparison.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub level: u8,
    pub repetitions: usize,
    pub total_wall_median_ns: f64,
    pub top_pass: String,
    pub top_share_percent: f64,
    pub near_tie: bool,
    pub passes: Vec<String>,
}

pub const COMPARISON_HEADER: &str =
    "level,repetitions,total_wall_median_ns,top_pass,top_share_percent,near_tie,passes";

pub fn comparison_row(level: u8, summary: &ExperimentSummary, tie_threshold: f64) -> ComparisonRow {
    let ranked = ranked_rows(summary, 1, tie_threshold);
    let top = ranked.first();
    let mut passes: Vec<String> = summary.passes.iter().map(|p| p.pass_name.clone()).collect();
    passes.sort_unstable();
    ComparisonRow {
        level,
        repetitions: summary.repetitions,
        total_wall_median_ns: summary.total_wall.median,
        top_pass: top.map(|r| r.pass_name.clone()).unwrap_or_default(),
        top_share_percent: top.map(|r| r.share_percent).unwrap_or(0.0),
        near_tie: top.map(|r| r.near_tie).unwrap_or(false),
        passes,
    }
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.level,
            row.repetitions,
            row.total_wall_median_ns,
            row.top_pass,
            row.top_share_percent,
            row.near_tie,
            row.passes.join(";")
        )
        .unwrap();
    }
    out
}

pub fn comparison_from_csv(text: &str) -> Result<Vec<ComparisonRow>, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == COMPARISON_HEADER => {}
        _ => {
            return Err(CliError::Parse {
                line: 1,
                message: format!("expected header {COMPARISON_HEADER:?}"),
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
            return Err(CliError::Parse {
                line,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let parse_err = |message: String| CliError::Parse { line, message };
        rows.push(ComparisonRow {
            level: fields[0]
                .parse()
                .map_err(|_| parse_err(format!("bad level {:?}", fields[0])))?,
            repetitions: fields[1]
                .parse()
                .map_err(|_| parse_err(format!("bad repetitions {:?}", fields[1])))?,
            total_wall_median_ns: fields[2]
                .parse()
                .map_err(|_| parse_err(format!("bad total {:?}", fields[2])))?,
            top_pass: fields[3].to_string(),
            top_share_percent: fields[4]
                .parse()
                .map_err(|_| parse_err(format!("bad share {:?}", fields[4])))?,
            near_tie: match fields[5] {
                "true" => true,
                "false" => false,
                other => return Err(parse_err(format!("bad near_tie {other:?}"))),
            },
            passes: if fields[6].is_empty() {
                Vec::new()
            } else {
                fields[6].split(';').map(str::to_string).collect()
            },
        });
    }
    Ok(rows)
}

pub fn render_comparison_table(rows: &[ComparisonRow], color: bool) -> String {
    let mut out = String::new();
    let header = format!(
        "{:>5}  {:>14}  {:<22}  {:>7}",
        "level", "total (median)", "top pass", "share"
    );
    writeln!(out, "{}", bold(&header, color)).unwrap();
    for row in rows {
        writeln!(
            out,
            "{:>5}  {:>14}  {:<22}  {:>6.2}%{}",
            row.level,
            format_ns(row.total_wall_median_ns),
            row.top_pass,
            row.top_share_percent,
            if row.near_tie { " ~" } else { "" }
        )
        .unwrap();
    }
    out
}

fn write_report_files(
    dir: &Path,
    run: &ProfiledRun,
    level_suffix: Option<u8>,
) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let suffix = level_suffix.map(|l| format!("_level{l}")).unwrap_or_default();
    let files = [
        (format!("records{suffix}.csv"), records_to_csv(&run.records)),
        (format!("summary{suffix}.json"), summary_to_json(&run.summary)),
        (format!("plot_data{suffix}.csv"), plot_data_csv(&run.summary)),
        (format!("circuit{suffix}.txt"), run.compiled.to_text()),
    ];
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(&name);
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(name);
    }
    Ok(written)
}

pub fn cmd_profile(args: ProfileArgs) -> Result<(), CliError> {
    let circuit = args.common.build_circuit()?;
    let (target, target_label) = parse_target(&args.common.target)?;
    if args.verify {
        ensure_verifiable(circuit.num_qubits(), target.num_qubits())?;
    }
    let reps = args.run.effective_reps()?;

    let run = run_configuration(
        &circuit,
        args.common.circuit.family(),
        &target,
        &target_label,
        args.level,
        reps,
    )?;

    println!(
        "{}, {} repetition{}",
        run.summary.configuration.label(),
        reps,
        if reps == 1 { "" } else { "s" }
    );
    print!(
        "{}",
        render_table(&run.summary, args.run.top, args.run.tie_threshold, color_enabled())
    );

    if let Some(dir) = &args.run.out {
        let written = write_report_files(dir, &run, None)?;
        println!("wrote {} to {}", written.join(", "), dir.display());
    }
    if args.verify {
        let report = check_equivalence(
            &circuit,
            &run.compiled,
            &run.virtual_to_physical,
            &run.output_permutation,
        )?;
        println!(
            "verification passed: max amplitude deviation {:.3e}",
            report.max_deviation
        );
    }
    Ok(())
}

pub fn cmd_compare_levels(args: CompareArgs) -> Result<(), CliError> {
    let circuit = args.common.build_circuit()?;
    let (target, target_label) = parse_target(&args.common.target)?;
    if args.verify {
        ensure_verifiable(circuit.num_qubits(), target.num_qubits())?;
    }
    let reps = args.run.effective_reps()?;
    let color = color_enabled();

    let mut runs: Vec<(u8, ProfiledRun)> = Vec::new();
    for level in 0..=3 {
        let run = run_configuration(
            &circuit,
            args.common.circuit.family(),
            &target,
            &target_label,
            level,
            reps,
        )?;
        runs.push((level, run));
    }

    println!(
        "{}({}) on {}, {} repetition{} per level",
        args.common.circuit.family(),
        circuit.num_qubits(),
        target_label,
        reps,
        if reps == 1 { "" } else { "s" }
    );
    for (level, run) in &runs {
        println!();
        println!("{}", bold(&format!("level {level}"), color));
        print!(
            "{}",
            render_table(&run.summary, args.run.top, args.run.tie_threshold, color)
        );
    }
    let rows: Vec<ComparisonRow> = runs
        .iter()
        .map(|(level, run)| comparison_row(*level, &run.summary, args.run.tie_threshold))
        .collect();
    println!();
    print!("{}", render_comparison_table(&rows, color));

    if let Some(dir) = &args.run.out {
        let mut written = Vec::new();
        for (level, run) in &runs {
            written.extend(write_report_files(dir, run, Some(*level))?);
        }
        let path = dir.join("comparison.csv");
        fs::write(&path, comparison_csv(&rows)).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        written.push("comparison.csv".to_string());
        println!("wrote {} files to {}", written.len(), dir.display());
    }
    if args.verify {
        for (level, run) in &runs {
            let report = check_equivalence(
                &circuit,
                &run.compiled,
                &run.virtual_to_physical,
                &run.output_permutation,
            )?;
            println!(
                "level {level} verification passed: max amplitude deviation {:.3e}",
                report.max_deviation
            );
        }
    }
    Ok(())
}

pub fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let circuit = args.common.build_circuit()?;
    let (target, target_label) = parse_target(&args.common.target)?;
    ensure_verifiable(circuit.num_qubits(), target.num_qubits())?;

    let pass_manager = build_preset(args.level).map_err(|e| CliError::Usage(e.to_string()))?;
    let result = pass_manager.run(&circuit, &target, 0);
    let compiled = result.outcome.map_err(CliError::Compile)?;
    let layout = result.properties.get_layout(keys::LAYOUT).ok_or_else(|| {
        CliError::Internal("pipeline finished without recording a layout".to_string())
    })?;

    let report = check_equivalence(
        &circuit,
        &compiled,
        &layout.virtual_to_physical,
        &layout.output_permutation,
    )?;
    println!(
        "{}({}) level {} on {}: max amplitude deviation {:.3e}",
        args.common.circuit.family(),
        circuit.num_qubits(),
        args.level,
        target_label,
        report.max_deviation
    );
    println!("equivalence holds within {VERIFY_TOLERANCE:e}");
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Profile(args) => cmd_profile(args),
        Command::CompareLevels(args) => cmd_compare_levels(args),
        Command::Verify(args) => cmd_verify(args),
    }
}
