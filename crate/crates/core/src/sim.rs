//! Small statevector simulator and the equivalence oracle used to prove
//! that compilation preserves semantics up to global phase and the routing
//! permutation.
//!
//! Qubit 0 is the least significant bit of a basis-state index.

use num_complex::Complex64;

use crate::circuit::{Circuit, GateKind};
use crate::error::SimError;

/// Hard cap for single-state simulation (memory guard).
pub const MAX_SIM_QUBITS: usize = 12;
/// Hard cap for the 2^n basis-state equivalence sweep.
pub const MAX_SWEEP_QUBITS: usize = 10;
/// Hard cap for full-unitary extraction.
pub const MAX_UNITARY_QUBITS: usize = 6;

#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// The basis state |index⟩.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { amps, num_qubits }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let abit = 1usize << a;
        let bbit = 1usize << b;
        for i in 0..self.amps.len() {
            if i & abit != 0 && i & bbit == 0 {
                self.amps.swap(i, i ^ abit ^ bbit);
            }
        }
    }

    fn apply_cp(&mut self, a: usize, b: usize, theta: f64) {
        let mask = (1usize << a) | (1usize << b);
        let phase = Complex64::from_polar(1.0, theta);
        for i in 0..self.amps.len() {
            if i & mask == mask {
                self.amps[i] *= phase;
            }
        }
    }

    fn apply(&mut self, kind: &GateKind, qubits: &[usize]) -> Result<(), SimError> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match kind {
            GateKind::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_1q(qubits[0], [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]);
            }
            GateKind::X => {
                self.apply_1q(qubits[0], [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
            }
            GateKind::Sx => {
                self.apply_1q(
                    qubits[0],
                    [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
                );
            }
            GateKind::Rz(theta) => {
                let e0 = Complex64::from_polar(1.0, -theta / 2.0);
                let e1 = Complex64::from_polar(1.0, theta / 2.0);
                self.apply_1q(qubits[0], [[e0, c(0.0, 0.0)], [c(0.0, 0.0), e1]]);
            }
            GateKind::Cp(theta) => self.apply_cp(qubits[0], qubits[1], *theta),
            GateKind::Cx => self.apply_cx(qubits[0], qubits[1]),
            GateKind::Swap => self.apply_swap(qubits[0], qubits[1]),
            GateKind::Delay(_) => {}
            GateKind::Boxed { .. } => return Err(SimError::UnexpandedBox),
        }
        debug_assert!(
            (self.norm() - 1.0).abs() < 1e-12,
            "norm drifted after {:?}",
            kind
        );
        Ok(())
    }
}

/// Applies the circuit to |input⟩.
pub fn simulate_from_basis(c: &Circuit, input: usize) -> Result<StateVector, SimError> {
    let n = c.num_qubits();
    if n > MAX_SIM_QUBITS {
        return Err(SimError::TooLarge {
            n,
            max: MAX_SIM_QUBITS,
        });
    }
    debug_assert!(input < (1 << n));
    let mut sv = StateVector::basis(n, input);
    for instr in c.instructions() {
        sv.apply(&instr.kind, &instr.qubits)?;
    }
    Ok(sv)
}

/// Applies the circuit to |0…0⟩.
pub fn simulate(c: &Circuit) -> Result<StateVector, SimError> {
    simulate_from_basis(c, 0)
}

/// Full 2^n × 2^n operator, row-major, built column by column.
pub fn unitary(c: &Circuit) -> Result<Vec<Vec<Complex64>>, SimError> {
    let n = c.num_qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(SimError::TooLarge {
            n,
            max: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut u = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let sv = simulate_from_basis(c, col)?;
        for (row, amp) in sv.amplitudes().iter().enumerate() {
            u[row][col] = *amp;
        }
    }
    Ok(u)
}

/// Moves bit `v` of `index` to bit `perm[v]`.
fn permute_index(index: usize, perm: &[usize]) -> usize {
    let mut out = 0usize;
    for (v, &w) in perm.iter().enumerate() {
        if index & (1 << v) != 0 {
            out |= 1 << w;
        }
    }
    out
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Outcome of an equivalence sweep.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Largest |observed − expected| amplitude difference over the sweep.
    pub max_deviation: f64,
    /// First basis input that exceeded the tolerance.
    pub failing_input: Option<usize>,
    /// The extracted common global phase.
    pub phase: Complex64,
}

/// Sweeps every computational basis input and checks that `c2` equals `c1`
/// with each qubit `v` relocated to wire `perm[v]`, up to one common global
/// phase. The phase is extracted from the first amplitude with magnitude
/// above 1e-10 and then held fixed for the whole sweep.
pub fn equivalence_report(
    c1: &Circuit,
    c2: &Circuit,
    perm: &[usize],
    tol: f64,
) -> Result<EquivalenceReport, SimError> {
    let n = c1.num_qubits();
    if c2.num_qubits() != n {
        return Err(SimError::QubitCountMismatch(n, c2.num_qubits()));
    }
    if n > MAX_SWEEP_QUBITS {
        return Err(SimError::TooLarge {
            n,
            max: MAX_SWEEP_QUBITS,
        });
    }
    if perm.len() != n || !is_permutation(perm) {
        return Err(SimError::BadPermutation {
            got: perm.len(),
            expected: n,
        });
    }
    let mut phase: Option<Complex64> = None;
    let mut max_deviation = 0.0f64;
    let mut failing_input = None;
    for input in 0..(1usize << n) {
        let s1 = simulate_from_basis(c1, input)?;
        let s2 = simulate_from_basis(c2, input)?;
        let mut input_deviation = 0.0f64;
        for (idx, &a1) in s1.amplitudes().iter().enumerate() {
            let a2 = s2.amplitudes()[permute_index(idx, perm)];
            if phase.is_none() && a1.norm() > 1e-10 {
                phase = Some(a2 / a1);
            }
            let expected = phase.unwrap_or(Complex64::new(1.0, 0.0)) * a1;
            input_deviation = input_deviation.max((a2 - expected).norm());
        }
        max_deviation = max_deviation.max(input_deviation);
        if input_deviation > tol && failing_input.is_none() {
            failing_input = Some(input);
        }
    }
    Ok(EquivalenceReport {
        equivalent: failing_input.is_none(),
        max_deviation,
        failing_input,
        phase: phase.unwrap_or(Complex64::new(1.0, 0.0)),
    })
}

/// Boolean form of [`equivalence_report`].
pub fn equivalent(c1: &Circuit, c2: &Circuit, perm: &[usize], tol: f64) -> Result<bool, SimError> {
    Ok(equivalence_report(c1, c2, perm, tol)?.equivalent)
}

/// Checks a compiled circuit against its source.
///
/// `virtual_to_physical` is the full placement over the target's wire count
/// (idle wires filled in by routing), and `output_permutation` gives the
/// final wire of each virtual in the same extended numbering. The source is
/// widened with idle wires, the compiled circuit is relabeled back to
/// virtual numbering, and the two are swept as equal-width circuits.
pub fn verify_compiled(
    original: &Circuit,
    compiled: &Circuit,
    virtual_to_physical: &[usize],
    output_permutation: &[usize],
    tol: f64,
) -> Result<EquivalenceReport, SimError> {
    let m = compiled.num_qubits();
    if virtual_to_physical.len() != m || !is_permutation(virtual_to_physical) {
        return Err(SimError::BadPermutation {
            got: virtual_to_physical.len(),
            expected: m,
        });
    }
    if original.num_qubits() > m {
        return Err(SimError::QubitCountMismatch(original.num_qubits(), m));
    }

    let mut widened = Circuit::new(m, original.name.clone());
    for instr in original.instructions() {
        widened
            .push_instruction(instr.clone())
            .expect("widening keeps instructions valid");
    }

    let mut physical_to_virtual = vec![0usize; m];
    for (v, &p) in virtual_to_physical.iter().enumerate() {
        physical_to_virtual[p] = v;
    }
    let mut relabeled = Circuit::new(m, compiled.name.clone());
    for instr in compiled.instructions() {
        let qubits = instr
            .qubits
            .iter()
            .map(|&p| physical_to_virtual[p])
            .collect();
        relabeled
            .push(instr.kind.clone(), qubits)
            .expect("relabeling by a bijection keeps instructions valid");
    }

    equivalence_report(&widened, &relabeled, output_permutation, tol)
}

/// True when two operators of equal dimension differ only by a global phase.
pub fn matrices_equal_up_to_phase(
    a: &[Vec<Complex64>],
    b: &[Vec<Complex64>],
    tol: f64,
) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut phase: Option<Complex64> = None;
    for (ra, rb) in a.iter().zip(b) {
        if ra.len() != rb.len() {
            return false;
        }
        for (&ea, &eb) in ra.iter().zip(rb) {
            if phase.is_none() && ea.norm() > 1e-10 {
                phase = Some(eb / ea);
            }
            let expected = phase.unwrap_or(Complex64::new(1.0, 0.0)) * ea;
            if (eb - expected).norm() > tol {
                return false;
            }
        }
    }
    true
}
