//! A self-contained quantum-circuit transpiler with a staged pass manager
//! and built-in per-pass profiling.
//!
//! The crate covers the whole compilation path: a list/DAG circuit
//! representation, hardware targets, the six-stage pass pipeline with preset
//! optimization levels 0 through 3, concrete passes for every stage,
//! per-invocation timing with aggregation and boxplot statistics, and a
//! statevector oracle proving that compilation preserves circuit semantics.

pub mod circuit;
pub mod dag;
pub mod error;
pub mod framework;
pub mod passes;
pub mod presets;
pub mod profiler;
pub mod sim;
pub mod target;

pub use circuit::{build_ghz, build_qft, Circuit, GateKind, Instruction, Metrics};
pub use dag::DagCircuit;
pub use error::{CircuitError, PassError, PipelineError, ProfileError, SimError, TargetError};
pub use framework::{
    CompileResult, Layout, Pass, PassContext, PassKind, PassManager, PassModule, PropertySet,
    PropertyValue, Stage,
};
pub use presets::build_preset;
pub use target::Target;
