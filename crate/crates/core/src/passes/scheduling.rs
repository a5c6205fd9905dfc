//! As-soon-as-possible scheduling: assigns every instruction a start tick,
//! materializing idle gaps as explicit DELAY instructions.

use crate::circuit::{Circuit, GateKind};
use crate::dag::DagCircuit;
use crate::error::PassError;
use crate::framework::{keys, Pass, PassContext, PassKind, PassModule, PropertyValue};
use crate::target::Target;

fn instruction_duration(kind: &GateKind, qubits: &[usize], target: &Target) -> Result<u64, PassError> {
    match kind {
        GateKind::Delay(ticks) => Ok(*ticks),
        GateKind::Boxed { name, .. } => Err(PassError::MissingDuration(format!("BOX({name})"))),
        _ if qubits.len() == 1 => Ok(target.duration_1q(kind.label())),
        _ => Ok(target.duration_2q(qubits[0], qubits[1])),
    }
}

/// Schedules each instruction at the earliest tick when all its qubits are
/// free. Idle gaps before an instruction become DELAY fillers; nothing pads
/// the tail. The start tick of every output instruction and the overall
/// makespan land in the property set.
pub struct ASAPSchedule;

impl Pass for ASAPSchedule {
    fn name(&self) -> &str {
        "ASAPSchedule"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Scheduling
    }

    fn run(&self, dag: &mut DagCircuit, ctx: &mut PassContext) -> Result<(), PassError> {
        let source = dag.to_circuit();
        let mut scheduled = Circuit::new(source.num_qubits(), source.name.clone());
        let mut starts: Vec<u64> = Vec::with_capacity(source.instructions().len());
        let mut available = vec![0u64; source.num_qubits()];

        for instr in source.instructions() {
            let duration = instruction_duration(&instr.kind, &instr.qubits, ctx.target)?;
            let start = instr
                .qubits
                .iter()
                .map(|&q| available[q])
                .max()
                .expect("instructions act on at least one qubit");
            for &q in &instr.qubits {
                if available[q] < start {
                    scheduled.push(GateKind::Delay(start - available[q]), vec![q])?;
                    starts.push(available[q]);
                }
            }
            scheduled.push_instruction(instr.clone())?;
            starts.push(start);
            for &q in &instr.qubits {
                available[q] = start + duration;
            }
        }

        let makespan = available.iter().copied().max().unwrap_or(0);
        ctx.properties.set(
            keys::SCHEDULE_START_TICKS,
            PropertyValue::UIntList(starts),
        );
        ctx.properties
            .set(keys::SCHEDULE_MAKESPAN, PropertyValue::UInt(makespan));
        dag.replace_with(&scheduled)?;
        Ok(())
    }
}
