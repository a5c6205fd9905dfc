//! The pass abstraction and its shared plumbing: pipeline stages, the
//! property store passes communicate through, pass descriptors for the
//! profiler, and the [`Pass`] trait itself.

mod manager;

pub use manager::{
    CompileResult, FixedPointLoop, MinimumPointLoop, PassManager, PipelineEntry, WatchedMetric,
    MINIMUM_POINT_MAX_ITERATIONS,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::dag::DagCircuit;
use crate::error::PassError;
use crate::target::Target;

/// The six pipeline phases, in their fixed execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Initialization,
    Layout,
    Routing,
    Translation,
    Optimization,
    Scheduling,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Initialization,
        Stage::Layout,
        Stage::Routing,
        Stage::Translation,
        Stage::Optimization,
        Stage::Scheduling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stage::Initialization => "initialization",
            Stage::Layout => "layout",
            Stage::Routing => "routing",
            Stage::Translation => "translation",
            Stage::Optimization => "optimization",
            Stage::Scheduling => "scheduling",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

/// Whether a pass only inspects the circuit or may transform it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassKind {
    Analysis,
    Transformation,
}

/// The implementation module a pass belongs to; feeds report categorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PassModule {
    Layout,
    Routing,
    Synthesis,
    Basis,
    Optimization,
    Scheduling,
    Utils,
}

impl PassModule {
    pub fn name(&self) -> &'static str {
        match self {
            PassModule::Layout => "layout",
            PassModule::Routing => "routing",
            PassModule::Synthesis => "synthesis",
            PassModule::Basis => "basis",
            PassModule::Optimization => "optimization",
            PassModule::Scheduling => "scheduling",
            PassModule::Utils => "utils",
        }
    }
}

/// Registry entry describing one pass: the aggregation key for profiling
/// plus the metadata categorization needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassDescriptor {
    pub name: String,
    pub kind: PassKind,
    pub module: PassModule,
    pub declared_stages: BTreeSet<Stage>,
}

/// Name-keyed descriptor table for one pipeline. Registering a name twice
/// amends its declared stages.
#[derive(Debug, Clone, Default)]
pub struct PassRegistry {
    entries: BTreeMap<String, PassDescriptor>,
}

impl PassRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, kind: PassKind, module: PassModule, stage: Stage) {
        self.entries
            .entry(name.to_string())
            .and_modify(|d| {
                d.declared_stages.insert(stage);
            })
            .or_insert_with(|| PassDescriptor {
                name: name.to_string(),
                kind,
                module,
                declared_stages: BTreeSet::from([stage]),
            });
    }

    pub fn get(&self, name: &str) -> Option<&PassDescriptor> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }
}

/// Virtual-to-physical qubit assignment plus the output permutation that
/// routing accumulates.
///
/// Layout passes produce a map over the circuit's own qubits; routing
/// extends it to a bijection over all target wires (idle wires appended as
/// placeholder virtuals) and fills in `output_permutation`, which gives the
/// final wire of each virtual in that extended numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub virtual_to_physical: Vec<usize>,
    pub output_permutation: Vec<usize>,
}

impl Layout {
    pub fn trivial(n: usize) -> Self {
        Layout {
            virtual_to_physical: (0..n).collect(),
            output_permutation: (0..n).collect(),
        }
    }

    pub fn from_assignment(virtual_to_physical: Vec<usize>) -> Self {
        let n = virtual_to_physical.len();
        Layout {
            virtual_to_physical,
            output_permutation: (0..n).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.virtual_to_physical.iter().all(|&p| seen.insert(p))
    }
}

/// Value types storable in the [`PropertySet`].
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Bool(bool),
    UInt(u64),
    Float(f64),
    Text(String),
    Layout(Layout),
    UIntList(Vec<u64>),
}

/// Well-known property keys.
pub mod keys {
    /// The current [`super::Layout`], written by layout passes and updated
    /// by routing.
    pub const LAYOUT: &str = "layout";
    /// Flag set when VF2 search exhausted its budget or proved no
    /// monomorphism exists; the preset's fallback layout reacts to it.
    pub const VF2_NOT_FOUND: &str = "layout.vf2_not_found";
    /// Number of search states VF2 visited.
    pub const VF2_STATES_VISITED: &str = "layout.vf2_states_visited";
    /// Number of SWAP gates routing inserted.
    pub const SWAPS_INSERTED: &str = "routing.swaps_inserted";
    /// Start tick per output instruction, aligned with instruction order.
    pub const SCHEDULE_START_TICKS: &str = "schedule.start_ticks";
    /// Completion tick of the whole schedule.
    pub const SCHEDULE_MAKESPAN: &str = "schedule.makespan";
}

/// Keyed store passes communicate through. Fresh for every pipeline run.
#[derive(Debug, Clone, Default)]
pub struct PropertySet {
    values: HashMap<String, PropertyValue>,
}

impl PropertySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: PropertyValue) {
        self.values.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&PropertyValue> {
        self.values.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get_bool(&self, key: &str) -> Option<bool> {
        match self.values.get(key) {
            Some(PropertyValue::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn get_uint(&self, key: &str) -> Option<u64> {
        match self.values.get(key) {
            Some(PropertyValue::UInt(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn get_layout(&self, key: &str) -> Option<&Layout> {
        match self.values.get(key) {
            Some(PropertyValue::Layout(l)) => Some(l),
            _ => None,
        }
    }

    pub fn get_uint_list(&self, key: &str) -> Option<&[u64]> {
        match self.values.get(key) {
            Some(PropertyValue::UIntList(v)) => Some(v),
            _ => None,
        }
    }
}

/// Execution context handed to every pass invocation.
pub struct PassContext<'a> {
    pub target: &'a Target,
    pub properties: &'a mut PropertySet,
}

/// A single compilation task. Passes are stateless between invocations;
/// anything they need to communicate goes through the property set.
pub trait Pass {
    fn name(&self) -> &str;
    fn kind(&self) -> PassKind;
    fn module(&self) -> PassModule;
    fn run(&self, dag: &mut DagCircuit, ctx: &mut PassContext) -> Result<(), PassError>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_order_is_fixed() {
        let mut sorted = Stage::ALL.to_vec();
        sorted.sort();
        assert_eq!(sorted, Stage::ALL.to_vec());
        assert_eq!(Stage::Initialization.name(), "initialization");
        assert_eq!(Stage::Scheduling.name(), "scheduling");
    }

    #[test]
    fn stage_name_round_trip() {
        for stage in Stage::ALL {
            assert_eq!(stage.name().parse::<Stage>().unwrap(), stage);
        }
        assert!("warp".parse::<Stage>().is_err());
    }

    #[test]
    fn registry_amends_stages_on_rereg() {
        let mut reg = PassRegistry::new();
        reg.register("P", PassKind::Analysis, PassModule::Utils, Stage::Layout);
        reg.register("P", PassKind::Analysis, PassModule::Utils, Stage::Scheduling);
        let d = reg.get("P").unwrap();
        assert_eq!(
            d.declared_stages,
            BTreeSet::from([Stage::Layout, Stage::Scheduling])
        );
        assert!(reg.get("Q").is_none());
    }

    #[test]
    fn property_set_typed_access() {
        let mut props = PropertySet::new();
        props.set("flag", PropertyValue::Bool(true));
        props.set("count", PropertyValue::UInt(7));
        props.set("layout", PropertyValue::Layout(Layout::trivial(3)));
        assert_eq!(props.get_bool("flag"), Some(true));
        assert_eq!(props.get_uint("count"), Some(7));
        assert_eq!(props.get_bool("count"), None, "type-checked access");
        assert_eq!(
            props.get_layout("layout").unwrap().virtual_to_physical,
            vec![0, 1, 2]
        );
        assert!(!props.contains("absent"));
    }

    #[test]
    fn trivial_layout_is_identity() {
        let l = Layout::trivial(4);
        assert_eq!(l.virtual_to_physical, vec![0, 1, 2, 3]);
        assert_eq!(l.output_permutation, vec![0, 1, 2, 3]);
        assert!(l.is_injective());

        let bad = Layout::from_assignment(vec![1, 1]);
        assert!(!bad.is_injective());
    }
}
