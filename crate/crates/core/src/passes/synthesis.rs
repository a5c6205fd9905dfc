//! High-level synthesis: expansion of BOX placeholders into elementary
//! gate bodies, either late in the pipeline (translation stage) or up front
//! before layout (initialization stage).

use crate::circuit::{build_ghz, build_qft, Circuit, GateKind};
use crate::dag::DagCircuit;
use crate::error::PassError;
use crate::framework::{Pass, PassContext, PassKind, PassModule};

/// Elementary-gate body for a named high-level operation.
fn box_body(name: &str, arity: usize) -> Result<Circuit, PassError> {
    match name {
        "qft" => build_qft(arity, false).map_err(PassError::Circuit),
        "ghz" => build_ghz(arity).map_err(PassError::Circuit),
        _ => Err(PassError::UnsupportedBox(name.to_string())),
    }
}

/// Expands every BOX in the circuit, recursing until none remain. The body's
/// wire `i` lands on the i-th qubit of the BOX operand list.
pub fn expand_boxes(circuit: &Circuit) -> Result<Circuit, PassError> {
    let mut current = circuit.clone();
    while current.has_boxes() {
        let mut next = Circuit::new(current.num_qubits(), current.name.clone());
        for instr in current.instructions() {
            match &instr.kind {
                GateKind::Boxed { name, .. } => {
                    let body = box_body(name, instr.qubits.len())?;
                    for inner in body.instructions() {
                        let mapped: Vec<usize> =
                            inner.qubits.iter().map(|&q| instr.qubits[q]).collect();
                        next.push(inner.kind.clone(), mapped)?;
                    }
                }
                _ => next.push_instruction(instr.clone())?,
            }
        }
        current = next;
    }
    Ok(current)
}

fn run_expansion(dag: &mut DagCircuit) -> Result<(), PassError> {
    if !dag.has_boxes() {
        return Ok(());
    }
    let expanded = expand_boxes(&dag.to_circuit())?;
    dag.replace_with(&expanded)?;
    Ok(())
}

/// Translation-stage BOX expansion. Checks for boxes in constant time via
/// the DAG's op counts, so box-free circuits cost almost nothing here.
pub struct HighLevelSynthesis;

impl Pass for HighLevelSynthesis {
    fn name(&self) -> &str {
        "HighLevelSynthesis"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Synthesis
    }

    fn run(&self, dag: &mut DagCircuit, _ctx: &mut PassContext) -> Result<(), PassError> {
        run_expansion(dag)
    }
}

/// Initialization-stage BOX expansion, so layout and routing see the real
/// two-qubit structure instead of opaque multi-qubit placeholders.
pub struct PreExpandBoxes;

impl Pass for PreExpandBoxes {
    fn name(&self) -> &str {
        "PreExpandBoxes"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Synthesis
    }

    fn run(&self, dag: &mut DagCircuit, _ctx: &mut PassContext) -> Result<(), PassError> {
        run_expansion(dag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::PropertySet;
    use crate::target::Target;

    fn run_hls(circuit: &Circuit) -> Result<Circuit, PassError> {
        let target = Target::line(circuit.num_qubits().max(2)).unwrap();
        let mut dag = DagCircuit::from_circuit(circuit);
        let mut props = PropertySet::new();
        let mut ctx = PassContext {
            target: &target,
            properties: &mut props,
        };
        HighLevelSynthesis.run(&mut dag, &mut ctx)?;
        Ok(dag.to_circuit())
    }

    #[test]
    fn box_free_circuit_is_untouched() {
        let ghz = build_ghz(3).unwrap();
        assert_eq!(run_hls(&ghz).unwrap().instructions(), ghz.instructions());
    }

    #[test]
    fn qft_box_expands_to_textbook_body() {
        let boxed = build_qft(3, true).unwrap();
        assert_eq!(boxed.instructions().len(), 1);
        let expanded = run_hls(&boxed).unwrap();
        let reference = build_qft(3, false).unwrap();
        assert_eq!(expanded.instructions(), reference.instructions());
        assert_eq!(expanded.instructions().len(), 7);
    }

    #[test]
    fn box_operands_remap_the_body() {
        let mut c = Circuit::new(3, "remap");
        c.push(
            GateKind::Boxed {
                name: "ghz".into(),
                arity: 2,
            },
            vec![2, 0],
        )
        .unwrap();
        let expanded = run_hls(&c).unwrap();
        let printed: Vec<String> =
            expanded.instructions().iter().map(|i| i.to_string()).collect();
        assert_eq!(printed, vec!["H q2", "CX q2, q0"]);
    }

    #[test]
    fn unknown_box_is_rejected() {
        let mut c = Circuit::new(2, "mystery");
        c.push(
            GateKind::Boxed {
                name: "mystery".into(),
                arity: 2,
            },
            vec![0, 1],
        )
        .unwrap();
        let err = run_hls(&c).unwrap_err();
        assert!(matches!(err, PassError::UnsupportedBox(name) if name == "mystery"));
    }

    #[test]
    fn pre_expand_matches_translation_expansion() {
        let boxed = build_qft(4, true).unwrap();
        let target = Target::line(4).unwrap();
        let mut dag = DagCircuit::from_circuit(&boxed);
        let mut props = PropertySet::new();
        let mut ctx = PassContext {
            target: &target,
            properties: &mut props,
        };
        PreExpandBoxes.run(&mut dag, &mut ctx).unwrap();
        assert_eq!(
            dag.to_circuit().instructions(),
            build_qft(4, false).unwrap().instructions()
        );
        assert!(!dag.has_boxes());
    }
}
