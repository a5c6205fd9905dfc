//! Basis translation: rewrites gates outside the target basis through a
//! fixed rule set until only basis gates (and DELAY) remain.

use std::f64::consts::PI;

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::dag::DagCircuit;
use crate::error::PassError;
use crate::framework::{Pass, PassContext, PassKind, PassModule};
use crate::target::Target;

/// Rewrites apply repeatedly, so a rule may emit gates that themselves need
/// translation. Rule chains here are short; hitting this depth means the
/// rules cannot reach the requested basis.
const MAX_RULE_DEPTH: usize = 8;

/// One rewrite step for a gate outside the basis. Returns `None` when no
/// rule exists.
fn rewrite(instr: &Instruction) -> Option<Vec<Instruction>> {
    let gate = |kind: GateKind, qubits: Vec<usize>| {
        Instruction::new(kind, qubits).expect("rewrite outputs are well formed")
    };
    match &instr.kind {
        GateKind::H => {
            let q = instr.qubits[0];
            Some(vec![
                gate(GateKind::Rz(PI / 2.0), vec![q]),
                gate(GateKind::Sx, vec![q]),
                gate(GateKind::Rz(PI / 2.0), vec![q]),
            ])
        }
        GateKind::Swap => {
            let (a, b) = (instr.qubits[0], instr.qubits[1]);
            Some(vec![
                gate(GateKind::Cx, vec![a, b]),
                gate(GateKind::Cx, vec![b, a]),
                gate(GateKind::Cx, vec![a, b]),
            ])
        }
        GateKind::Cp(theta) => {
            let (c, t) = (instr.qubits[0], instr.qubits[1]);
            Some(vec![
                gate(GateKind::Rz(theta / 2.0), vec![c]),
                gate(GateKind::Cx, vec![c, t]),
                gate(GateKind::Rz(-theta / 2.0), vec![t]),
                gate(GateKind::Cx, vec![c, t]),
                gate(GateKind::Rz(theta / 2.0), vec![t]),
            ])
        }
        _ => None,
    }
}

/// Translates a whole circuit into the target basis. DELAY always passes
/// through; a gate outside the basis with no applicable rule chain is a
/// translation error.
pub fn translate_circuit(circuit: &Circuit, target: &Target) -> Result<Circuit, PassError> {
    let mut out = Circuit::new(circuit.num_qubits(), circuit.name.clone());
    for instr in circuit.instructions() {
        let mut pending: Vec<(Instruction, usize)> =
            vec![(instr.clone(), 0)];
        while let Some((current, depth)) = pending.pop() {
            if matches!(current.kind, GateKind::Delay(_))
                || target.in_basis(current.kind.label())
            {
                out.push_instruction(current)?;
                continue;
            }
            if depth >= MAX_RULE_DEPTH {
                return Err(PassError::Translation(format!(
                    "no rule chain reaches the basis for {}",
                    current.kind.label()
                )));
            }
            match rewrite(&current) {
                Some(expansion) => {
                    // Stack discipline: push in reverse so the expansion is
                    // processed in emission order.
                    for e in expansion.into_iter().rev() {
                        pending.push((e, depth + 1));
                    }
                }
                None => {
                    return Err(PassError::Translation(format!(
                        "gate {} is outside the basis and has no rewrite rule",
                        current.kind.label()
                    )));
                }
            }
        }
    }
    Ok(out)
}

pub struct BasisTranslate;

impl Pass for BasisTranslate {
    fn name(&self) -> &str {
        "BasisTranslate"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Basis
    }

    fn run(&self, dag: &mut DagCircuit, ctx: &mut PassContext) -> Result<(), PassError> {
        let translated = translate_circuit(&dag.to_circuit(), ctx.target)?;
        dag.replace_with(&translated)?;
        Ok(())
    }
}
