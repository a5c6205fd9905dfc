//! Layout passes: the identity fallback assignment and a VF2-style
//! depth-first subgraph monomorphism search mapping the circuit's
//! interaction graph into the target coupling graph.

use std::collections::BTreeSet;

use crate::circuit::GateKind;
use crate::dag::DagCircuit;
use crate::error::PassError;
use crate::framework::{
    keys, Layout, Pass, PassContext, PassKind, PassModule, PropertyValue,
};
use crate::target::Target;

/// Undirected graph over virtual qubits with an edge per pair that shares at
/// least one two-qubit instruction; edge weights count those interactions.
#[derive(Debug, Clone)]
pub struct InteractionGraph {
    adjacency: Vec<BTreeSet<usize>>,
    weights: std::collections::BTreeMap<(usize, usize), usize>,
}

impl InteractionGraph {
    pub fn from_dag(dag: &DagCircuit) -> Self {
        let mut graph = InteractionGraph {
            adjacency: vec![BTreeSet::new(); dag.num_qubits()],
            weights: std::collections::BTreeMap::new(),
        };
        for node in dag.op_nodes() {
            let instr = dag.instruction(node).expect("op node holds an instruction");
            if instr.qubits.len() == 2 && !matches!(instr.kind, GateKind::Delay(_)) {
                graph.add_interaction(instr.qubits[0], instr.qubits[1]);
            }
        }
        graph
    }

    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Self {
        let mut graph = InteractionGraph {
            adjacency: vec![BTreeSet::new(); num_nodes],
            weights: std::collections::BTreeMap::new(),
        };
        for &(a, b) in edges {
            graph.add_interaction(a, b);
        }
        graph
    }

    fn add_interaction(&mut self, a: usize, b: usize) {
        self.adjacency[a].insert(b);
        self.adjacency[b].insert(a);
        *self.weights.entry((a.min(b), a.max(b))).or_insert(0) += 1;
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.weights.iter().map(|(&(a, b), &w)| (a, b, w))
    }

    pub fn num_edges(&self) -> usize {
        self.weights.len()
    }
}

/// How much search VF2 may do and how it picks among found mappings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vf2Budget {
    /// Search states (attempted pair extensions) before the search stops.
    pub max_states: u64,
    pub scoring: Vf2Scoring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vf2Scoring {
    /// Return the first complete monomorphism found.
    First,
    /// Enumerate within budget and keep the mapping minimizing total
    /// mapped-edge error (tie-break: lexicographically smallest vector).
    ExhaustiveWithinBudget,
}

#[derive(Debug, Clone)]
pub struct Vf2Outcome {
    /// Virtual-to-physical assignment, when a monomorphism was found.
    pub mapping: Option<Vec<usize>>,
    pub states_visited: u64,
}

struct SearchState<'a> {
    interaction: &'a InteractionGraph,
    target: &'a Target,
    budget: &'a Vf2Budget,
    mapping: Vec<usize>,
    used: Vec<bool>,
    visited: u64,
    best: Option<(f64, Vec<usize>)>,
}

const UNMAPPED: usize = usize::MAX;

/// Searches for an injective map sending every interaction edge to a
/// coupling edge. Not finding one (including by budget exhaustion) is a
/// normal outcome, not an error.
pub fn vf2_layout(
    interaction: &InteractionGraph,
    target: &Target,
    budget: &Vf2Budget,
) -> Vf2Outcome {
    let n = interaction.num_nodes();
    if n > target.num_qubits() {
        return Vf2Outcome {
            mapping: None,
            states_visited: 0,
        };
    }
    let order = search_order(interaction);
    let mut state = SearchState {
        interaction,
        target,
        budget,
        mapping: vec![UNMAPPED; n],
        used: vec![false; target.num_qubits()],
        visited: 0,
        best: None,
    };
    dfs(0, &order, &mut state);
    Vf2Outcome {
        mapping: state.best.map(|(_, m)| m),
        states_visited: state.visited,
    }
}

/// Connected breadth-first expansion starting from the highest-degree node;
/// remaining components follow by descending degree (ties: lowest index).
fn search_order(interaction: &InteractionGraph) -> Vec<usize> {
    let n = interaction.num_nodes();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    while order.len() < n {
        let start = (0..n)
            .filter(|&v| !seen[v])
            .max_by_key(|&v| (interaction.degree(v), std::cmp::Reverse(v)))
            .expect("an unvisited node remains");
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for nb in interaction.neighbors(v) {
                if !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    order
}

/// Returns true when the caller should stop the whole search (first match
/// in First mode, or budget exhausted).
fn dfs(pos: usize, order: &[usize], st: &mut SearchState) -> bool {
    if pos == order.len() {
        return complete_mapping(st);
    }
    let v = order[pos];
    let candidates: Vec<usize> = match st
        .interaction
        .neighbors(v)
        .find(|&u| st.mapping[u] != UNMAPPED)
    {
        Some(mapped_neighbor) => st
            .target
            .neighbors(st.mapping[mapped_neighbor])
            .iter()
            .copied()
            .filter(|&p| !st.used[p])
            .collect(),
        None => (0..st.target.num_qubits()).filter(|&p| !st.used[p]).collect(),
    };
    for p in candidates {
        if st.visited >= st.budget.max_states {
            return true;
        }
        st.visited += 1;
        if !consistent(v, p, st) {
            continue;
        }
        st.mapping[v] = p;
        st.used[p] = true;
        let stop = dfs(pos + 1, order, st);
        st.mapping[v] = UNMAPPED;
        st.used[p] = false;
        if stop {
            return true;
        }
    }
    false
}

fn consistent(v: usize, p: usize, st: &SearchState) -> bool {
    if st.target.degree(p) < st.interaction.degree(v) {
        return false;
    }
    st.interaction.neighbors(v).all(|u| {
        let image = st.mapping[u];
        image == UNMAPPED || st.target.is_coupled(image, p)
    })
}

fn complete_mapping(st: &mut SearchState) -> bool {
    let mapping = st.mapping.clone();
    match st.budget.scoring {
        Vf2Scoring::First => {
            st.best = Some((0.0, mapping));
            true
        }
        Vf2Scoring::ExhaustiveWithinBudget => {
            let score = mapping_error(st.interaction, st.target, &mapping);
            let better = match &st.best {
                None => true,
                Some((best_score, best_mapping)) => {
                    score < *best_score || (score == *best_score && mapping < *best_mapping)
                }
            };
            if better {
                st.best = Some((score, mapping));
            }
            false
        }
    }
}

/// Total error over the images of all interaction edges.
pub fn mapping_error(interaction: &InteractionGraph, target: &Target, mapping: &[usize]) -> f64 {
    interaction
        .edges()
        .map(|(a, b, _)| target.edge_error(mapping[a], mapping[b]))
        .sum()
}

/// True when `mapping` is injective and sends every interaction edge to a
/// coupling edge.
pub fn is_monomorphism(
    interaction: &InteractionGraph,
    target: &Target,
    mapping: &[usize],
) -> bool {
    if mapping.len() != interaction.num_nodes() {
        return false;
    }
    let mut used = vec![false; target.num_qubits()];
    for &p in mapping {
        if p >= target.num_qubits() || used[p] {
            return false;
        }
        used[p] = true;
    }
    interaction
        .edges()
        .all(|(a, b, _)| target.is_coupled(mapping[a], mapping[b]))
}

/// Identity assignment: virtual i sits on physical i.
pub fn trivial_assignment(num_qubits: usize, target: &Target) -> Result<Layout, PassError> {
    if num_qubits > target.num_qubits() {
        return Err(PassError::Capacity {
            circuit: num_qubits,
            target: target.num_qubits(),
        });
    }
    Ok(Layout::trivial(num_qubits))
}

/// Fallback layout pass: writes the identity assignment unless an earlier
/// pass already placed a layout in the property set.
pub struct TrivialLayout;

impl Pass for TrivialLayout {
    fn name(&self) -> &str {
        "TrivialLayout"
    }

    fn kind(&self) -> PassKind {
        PassKind::Analysis
    }

    fn module(&self) -> PassModule {
        PassModule::Layout
    }

    fn run(&self, dag: &mut DagCircuit, ctx: &mut PassContext) -> Result<(), PassError> {
        if ctx.properties.contains(keys::LAYOUT) {
            return Ok(());
        }
        let layout = trivial_assignment(dag.num_qubits(), ctx.target)?;
        ctx.properties.set(keys::LAYOUT, PropertyValue::Layout(layout));
        Ok(())
    }
}

/// Monomorphism layout search. On success the found assignment becomes the
/// layout; otherwise a not-found flag is set and the preset's fallback
/// layout takes over.
pub struct VF2Layout {
    pub budget: Vf2Budget,
}

impl Pass for VF2Layout {
    fn name(&self) -> &str {
        "VF2Layout"
    }

    fn kind(&self) -> PassKind {
        PassKind::Analysis
    }

    fn module(&self) -> PassModule {
        PassModule::Layout
    }

    fn run(&self, dag: &mut DagCircuit, ctx: &mut PassContext) -> Result<(), PassError> {
        let interaction = InteractionGraph::from_dag(dag);
        let outcome = vf2_layout(&interaction, ctx.target, &self.budget);
        ctx.properties.set(
            keys::VF2_STATES_VISITED,
            PropertyValue::UInt(outcome.states_visited),
        );
        match outcome.mapping {
            Some(mapping) => {
                debug_assert!(is_monomorphism(&interaction, ctx.target, &mapping));
                ctx.properties.set(
                    keys::LAYOUT,
                    PropertyValue::Layout(Layout::from_assignment(mapping)),
                );
            }
            None => {
                ctx.properties
                    .set(keys::VF2_NOT_FOUND, PropertyValue::Bool(true));
            }
        }
        Ok(())
    }
}
