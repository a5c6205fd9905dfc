//! Greedy shortest-path swap routing.
//!
//! Walks the circuit in program order with a live placement table. Whenever
//! a two-qubit instruction lands on an uncoupled pair, swaps are inserted
//! along a shortest coupling-graph path until the pair is adjacent. The pass
//! widens the circuit to the target, extends the layout over every physical
//! wire, and records where each virtual qubit ends up as an output
//! permutation.

use std::collections::VecDeque;

use crate::circuit::{Circuit, GateKind};
use crate::dag::DagCircuit;
use crate::error::PassError;
use crate::framework::{
    keys, Layout, Pass, PassContext, PassKind, PassModule, PropertyValue,
};
use crate::target::Target;

pub struct SwapRoute;

impl Pass for SwapRoute {
    fn name(&self) -> &str {
        "SwapRoute"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Routing
    }

    fn run(&self, dag: &mut DagCircuit, ctx: &mut PassContext) -> Result<(), PassError> {
        let layout = ctx
            .properties
            .get_layout(keys::LAYOUT)
            .ok_or(PassError::MissingLayout)?
            .clone();
        let target = ctx.target;
        let n = dag.num_qubits();
        let m = target.num_qubits();
        if n > m {
            return Err(PassError::Capacity { circuit: n, target: m });
        }

        let extended = extend_layout(&layout.virtual_to_physical, m);
        // placement[v] is the physical wire currently holding virtual v;
        // occupant is its inverse.
        let mut placement = extended.clone();
        let mut occupant = vec![0usize; m];
        for (v, &p) in placement.iter().enumerate() {
            occupant[p] = v;
        }

        let source = dag.to_circuit();
        let mut routed = Circuit::new(m, source.name.clone());
        let mut swaps_inserted = 0u64;
        for instr in source.instructions() {
            if instr.qubits.len() == 2 {
                let a = placement[instr.qubits[0]];
                let b = placement[instr.qubits[1]];
                if !target.is_coupled(a, b) {
                    let path = shortest_path(target, a, b)
                        .ok_or(PassError::RoutingInfeasible(a, b))?;
                    for window in path[..path.len() - 1].windows(2) {
                        routed
                            .push(GateKind::Swap, vec![window[0], window[1]])
                            .expect("swap on distinct in-range wires");
                        swaps_inserted += 1;
                        occupant.swap(window[0], window[1]);
                        placement[occupant[window[0]]] = window[0];
                        placement[occupant[window[1]]] = window[1];
                    }
                }
            }
            let physical: Vec<usize> = instr.qubits.iter().map(|&v| placement[v]).collect();
            routed.push(instr.kind.clone(), physical)?;
        }

        let inverse_extended = invert(&extended);
        let output_permutation: Vec<usize> =
            (0..m).map(|v| inverse_extended[placement[v]]).collect();
        ctx.properties.set(
            keys::LAYOUT,
            PropertyValue::Layout(Layout {
                virtual_to_physical: extended,
                output_permutation,
            }),
        );
        ctx.properties
            .set(keys::SWAPS_INSERTED, PropertyValue::UInt(swaps_inserted));
        dag.replace_with(&routed)?;
        Ok(())
    }
}

/// Extends a partial assignment to a bijection over all `m` physical wires:
/// each unused physical wire, in ascending order, receives the next virtual
/// index past the circuit width.
pub fn extend_layout(virtual_to_physical: &[usize], m: usize) -> Vec<usize> {
    let mut used = vec![false; m];
    for &p in virtual_to_physical {
        used[p] = true;
    }
    let mut extended = virtual_to_physical.to_vec();
    extended.extend((0..m).filter(|&p| !used[p]));
    extended
}

fn invert(permutation: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0usize; permutation.len()];
    for (i, &p) in permutation.iter().enumerate() {
        inverse[p] = i;
    }
    inverse
}

/// Breadth-first shortest path between physical wires, expanding neighbors
/// in ascending index order so routes are deterministic.
fn shortest_path(target: &Target, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; target.num_qubits()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut path = vec![to];
            let mut at = to;
            while at != from {
                at = parent[at];
                path.push(at);
            }
            path.reverse();
            return Some(path);
        }
        for &nb in target.neighbors(q) {
            if parent[nb] == usize::MAX {
                parent[nb] = q;
                queue.push_back(nb);
            }
        }
    }
    None
}
