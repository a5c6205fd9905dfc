//! Dataflow-graph form of a circuit.
//!
//! Each wire starts at an input node and ends at an output node; operation
//! nodes sit between them, connected by edges labeled with the wire index.
//! Passes that cancel or rewrite local gate patterns work on this form, and
//! conversion back to the list form follows a deterministic topological
//! order that preserves the original program order for untouched circuits.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use petgraph::stable_graph::{NodeIndex, StableDiGraph};
use petgraph::Direction;

use crate::circuit::{Circuit, Instruction, Metrics};
use crate::error::CircuitError;

#[derive(Debug, Clone)]
pub enum DagNode {
    /// Start-of-wire marker for the given qubit.
    In(usize),
    /// End-of-wire marker for the given qubit.
    Out(usize),
    Op(Instruction),
}

#[derive(Debug, Clone)]
pub struct DagCircuit {
    graph: StableDiGraph<DagNode, usize>,
    num_qubits: usize,
    op_counts: HashMap<&'static str, usize>,
    num_ops: usize,
    pub name: String,
}

impl DagCircuit {
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let n = circuit.num_qubits();
        let mut graph = StableDiGraph::new();
        let in_nodes: Vec<_> = (0..n).map(|q| graph.add_node(DagNode::In(q))).collect();
        let out_nodes: Vec<_> = (0..n).map(|q| graph.add_node(DagNode::Out(q))).collect();
        let mut last = in_nodes.clone();
        let mut op_counts: HashMap<&'static str, usize> = HashMap::new();
        for instr in circuit.instructions() {
            let node = graph.add_node(DagNode::Op(instr.clone()));
            for &q in &instr.qubits {
                graph.add_edge(last[q], node, q);
                last[q] = node;
            }
            *op_counts.entry(instr.kind.label()).or_insert(0) += 1;
        }
        for q in 0..n {
            graph.add_edge(last[q], out_nodes[q], q);
        }
        DagCircuit {
            graph,
            num_qubits: n,
            op_counts,
            num_ops: circuit.len(),
            name: circuit.name.clone(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_ops(&self) -> usize {
        self.num_ops
    }

    /// Count of operations with the given canonical label, maintained
    /// incrementally so emptiness checks cost nothing on large circuits.
    pub fn op_count(&self, label: &str) -> usize {
        self.op_counts.get(label).copied().unwrap_or(0)
    }

    pub fn has_boxes(&self) -> bool {
        self.op_count("BOX") > 0
    }

    pub fn instruction(&self, node: NodeIndex) -> Option<&Instruction> {
        match self.graph.node_weight(node) {
            Some(DagNode::Op(instr)) => Some(instr),
            _ => None,
        }
    }

    /// Operation nodes in the deterministic topological order used by
    /// [`DagCircuit::to_circuit`].
    pub fn op_nodes(&self) -> Vec<NodeIndex> {
        self.topological_order()
            .into_iter()
            .filter(|&n| matches!(self.graph[n], DagNode::Op(_)))
            .collect()
    }

    /// The node following `node` on wire `q`, which is an output marker when
    /// `node` is the last operation on that wire.
    pub fn wire_successor(&self, node: NodeIndex, q: usize) -> Option<NodeIndex> {
        self.graph
            .edges_directed(node, Direction::Outgoing)
            .find(|e| *e.weight() == q)
            .map(|e| petgraph::visit::EdgeRef::target(&e))
    }

    /// Removes an operation node, reconnecting each wire straight through.
    pub fn remove_op(&mut self, node: NodeIndex) {
        let instr = match self.graph.node_weight(node) {
            Some(DagNode::Op(instr)) => instr.clone(),
            _ => return,
        };
        for &q in &instr.qubits {
            let pred = self
                .graph
                .edges_directed(node, Direction::Incoming)
                .find(|e| *e.weight() == q)
                .map(|e| petgraph::visit::EdgeRef::source(&e))
                .expect("every op wire has a predecessor");
            let succ = self
                .wire_successor(node, q)
                .expect("every op wire has a successor");
            self.graph.add_edge(pred, succ, q);
        }
        self.graph.remove_node(node);
        if let Some(count) = self.op_counts.get_mut(instr.kind.label()) {
            *count -= 1;
        }
        self.num_ops -= 1;
    }

    /// Kahn's algorithm with a min-index ready queue. Node indices follow
    /// insertion order, so a graph built by [`DagCircuit::from_circuit`]
    /// linearizes back to the exact original instruction sequence.
    fn topological_order(&self) -> Vec<NodeIndex> {
        let mut in_degree: HashMap<NodeIndex, usize> = HashMap::new();
        let mut ready = BinaryHeap::new();
        for node in self.graph.node_indices() {
            let d = self
                .graph
                .edges_directed(node, Direction::Incoming)
                .count();
            if d == 0 {
                ready.push(Reverse(node));
            } else {
                in_degree.insert(node, d);
            }
        }
        let mut order = Vec::with_capacity(self.graph.node_count());
        while let Some(Reverse(node)) = ready.pop() {
            order.push(node);
            for succ in self.graph.neighbors_directed(node, Direction::Outgoing) {
                let d = in_degree
                    .get_mut(&succ)
                    .expect("successor has tracked in-degree");
                *d -= 1;
                if *d == 0 {
                    in_degree.remove(&succ);
                    ready.push(Reverse(succ));
                }
            }
        }
        debug_assert!(in_degree.is_empty(), "dag contains a cycle");
        order
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.num_qubits, self.name.clone());
        for node in self.topological_order() {
            if let DagNode::Op(instr) = &self.graph[node] {
                c.push_instruction(instr.clone())
                    .expect("dag instructions were validated on entry");
            }
        }
        c
    }

    /// Replaces the whole graph with the given circuit's dataflow form,
    /// keeping the current name.
    pub fn replace_with(&mut self, circuit: &Circuit) -> Result<(), CircuitError> {
        if circuit.num_qubits() < self.num_qubits {
            return Err(CircuitError::InvalidSize);
        }
        let name = std::mem::take(&mut self.name);
        *self = DagCircuit::from_circuit(circuit);
        self.name = name;
        Ok(())
    }

    pub fn metrics(&self) -> Metrics {
        self.to_circuit().metrics()
    }

    pub fn content_hash(&self) -> u64 {
        self.to_circuit().content_hash()
    }
}
