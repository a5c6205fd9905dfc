//! Circuit optimization passes: cancellation of adjacent inverse pairs and
//! resynthesis of single-qubit gate runs into the RZ/SX Euler form.
//!
//! Both passes keep a hard guarantee: the circuit's size never increases.

use std::f64::consts::PI;

use num_complex::Complex64;
use petgraph::stable_graph::NodeIndex;

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::dag::DagCircuit;
use crate::error::PassError;
use crate::framework::{Pass, PassContext, PassKind, PassModule};

/// Two RZ angles cancel when their sum is this close to zero.
pub const RZ_CANCELLATION_TOLERANCE: f64 = 1e-12;

/// Matrix elements and angles below this count as exactly zero during
/// resynthesis.
pub const RESYNTHESIS_TOLERANCE: f64 = 1e-12;

/// Removes adjacent gate pairs that multiply to the identity: equal
/// self-inverse gates (H, X, CX, SWAP) on identical qubit tuples, and RZ
/// pairs with opposite angles. Cancellations cascade until none remain.
pub struct InverseCancellation;

impl Pass for InverseCancellation {
    fn name(&self) -> &str {
        "InverseCancellation"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Optimization
    }

    fn run(&self, dag: &mut DagCircuit, _ctx: &mut PassContext) -> Result<(), PassError> {
        loop {
            let mut changed = false;
            for node in dag.op_nodes() {
                let partner = {
                    let Some(instr) = dag.instruction(node) else {
                        // Removed earlier in this sweep as someone's partner.
                        continue;
                    };
                    match cancellation_partner(dag, node, instr) {
                        Some(p) => p,
                        None => continue,
                    }
                };
                dag.remove_op(partner);
                dag.remove_op(node);
                changed = true;
            }
            if !changed {
                return Ok(());
            }
        }
    }
}

/// The immediate successor of `node` cancels it when both gates sit on the
/// same qubit tuple, are adjacent on every shared wire, and multiply to the
/// identity.
fn cancellation_partner(
    dag: &DagCircuit,
    node: NodeIndex,
    instr: &Instruction,
) -> Option<NodeIndex> {
    let successor = dag.wire_successor(node, instr.qubits[0])?;
    let next = dag.instruction(successor)?;
    if next.qubits != instr.qubits {
        return None;
    }
    for &q in &instr.qubits[1..] {
        if dag.wire_successor(node, q) != Some(successor) {
            return None;
        }
    }
    let cancels = match (&instr.kind, &next.kind) {
        (GateKind::Rz(a), GateKind::Rz(b)) => (a + b).abs() <= RZ_CANCELLATION_TOLERANCE,
        (a, b) => a.is_self_inverse() && a == b,
    };
    if cancels {
        Some(successor)
    } else {
        None
    }
}

/// Resynthesizes every maximal run of two or more consecutive H/X/SX/RZ
/// gates on a wire into at most RZ-SX-RZ-SX-RZ, keeping the shorter of the
/// run and its replacement.
pub struct Optimize1QGates;

impl Pass for Optimize1QGates {
    fn name(&self) -> &str {
        "Optimize1QGates"
    }

    fn kind(&self) -> PassKind {
        PassKind::Transformation
    }

    fn module(&self) -> PassModule {
        PassModule::Optimization
    }

    fn run(&self, dag: &mut DagCircuit, _ctx: &mut PassContext) -> Result<(), PassError> {
        let optimized = optimize_1q_runs(&dag.to_circuit());
        dag.replace_with(&optimized)?;
        Ok(())
    }
}

fn is_resynthesis_gate(kind: &GateKind) -> bool {
    matches!(
        kind,
        GateKind::H | GateKind::X | GateKind::Sx | GateKind::Rz(_)
    )
}

/// Pure form of [`Optimize1QGates`]: collects per-wire runs, flushing each
/// run when a multi-qubit gate (or DELAY or BOX) touches the wire.
pub fn optimize_1q_runs(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::new(circuit.num_qubits(), circuit.name.clone());
    let mut runs: Vec<Vec<Instruction>> = vec![Vec::new(); circuit.num_qubits()];
    for instr in circuit.instructions() {
        if instr.qubits.len() == 1 && is_resynthesis_gate(&instr.kind) {
            runs[instr.qubits[0]].push(instr.clone());
        } else {
            for &q in &instr.qubits {
                flush_run(&mut out, &mut runs[q], q);
            }
            out.push_instruction(instr.clone())
                .expect("instruction was valid in the source circuit");
        }
    }
    for q in 0..circuit.num_qubits() {
        flush_run(&mut out, &mut runs[q], q);
    }
    out
}

fn flush_run(out: &mut Circuit, run: &mut Vec<Instruction>, qubit: usize) {
    if run.len() >= 2 {
        let product = run
            .iter()
            .fold(identity_matrix(), |acc, instr| {
                matmul(gate_matrix(&instr.kind), acc)
            });
        let replacement = euler_zxzxz(product, qubit);
        if replacement.len() <= run.len() {
            for instr in replacement {
                out.push_instruction(instr).expect("resynthesis output is well formed");
            }
            run.clear();
            return;
        }
    }
    for instr in run.drain(..) {
        out.push_instruction(instr).expect("instruction was valid in the source circuit");
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn identity_matrix() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

fn matmul(a: Mat2, b: Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn gate_matrix(kind: &GateKind) -> Mat2 {
    let c = Complex64::new;
    match kind {
        GateKind::H => {
            let s = 1.0 / 2f64.sqrt();
            [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
        }
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::Sx => [
            [c(0.5, 0.5), c(0.5, -0.5)],
            [c(0.5, -0.5), c(0.5, 0.5)],
        ],
        GateKind::Rz(theta) => [
            [Complex64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
        ],
        other => unreachable!("no 2x2 matrix for {}", other.label()),
    }
}

/// Maps any angle into (-pi, pi].
fn normalize_angle(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = angle % two_pi;
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

fn push_rz(gates: &mut Vec<Instruction>, angle: f64, qubit: usize) {
    let angle = normalize_angle(angle);
    if angle.abs() > RESYNTHESIS_TOLERANCE {
        gates.push(
            Instruction::new(GateKind::Rz(angle), vec![qubit]).expect("finite normalized angle"),
        );
    }
}

/// Decomposes a single-qubit unitary, up to global phase, into at most
/// RZ-SX-RZ-SX-RZ (listed in application order). A unitary within tolerance
/// of the identity yields no gates, and a diagonal unitary yields a single
/// RZ.
pub fn euler_zxzxz(u: Mat2, qubit: usize) -> Vec<Instruction> {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let su = {
        let s = det.sqrt();
        [[u[0][0] / s, u[0][1] / s], [u[1][0] / s, u[1][1] / s]]
    };
    let sin_half = su[1][0].norm();
    let cos_half = su[0][0].norm();

    let mut gates = Vec::with_capacity(5);
    if sin_half <= RESYNTHESIS_TOLERANCE {
        // Diagonal: exactly an RZ up to phase (possibly the identity).
        push_rz(&mut gates, 2.0 * su[1][1].arg(), qubit);
        return gates;
    }

    let theta = 2.0 * sin_half.atan2(cos_half);
    let (phi, lambda) = if cos_half <= RESYNTHESIS_TOLERANCE {
        // Anti-diagonal: only the angle difference is determined.
        (2.0 * su[1][0].arg(), 0.0)
    } else {
        (
            su[1][0].arg() - su[0][0].arg(),
            -su[0][0].arg() - su[1][0].arg(),
        )
    };

    push_rz(&mut gates, lambda, qubit);
    gates.push(Instruction::new(GateKind::Sx, vec![qubit]).expect("valid"));
    push_rz(&mut gates, theta + PI, qubit);
    gates.push(Instruction::new(GateKind::Sx, vec![qubit]).expect("valid"));
    push_rz(&mut gates, phi + PI, qubit);
    gates
}
