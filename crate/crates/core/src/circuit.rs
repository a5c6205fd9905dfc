//! Quantum circuit intermediate representation: the gate vocabulary, the
//! ordered-list circuit form, structural metrics, and generators for the two
//! benchmark workloads (QFT and GHZ state preparation).

use std::f64::consts::PI;
use std::fmt;

use crate::error::CircuitError;

/// The gate vocabulary.
///
/// `Boxed` denotes an unexpanded high-level operation (for example a whole
/// QFT block) that high-level synthesis later expands into elementary gates.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Sx,
    Rz(f64),
    Cp(f64),
    Cx,
    Swap,
    /// Idle period of the given number of time ticks on one qubit.
    Delay(u64),
    /// Unexpanded high-level operation spanning `arity` qubits.
    Boxed { name: String, arity: usize },
}

impl GateKind {
    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Sx | GateKind::Rz(_) | GateKind::Delay(_) => 1,
            GateKind::Cp(_) | GateKind::Cx | GateKind::Swap => 2,
            GateKind::Boxed { arity, .. } => *arity,
        }
    }

    /// Canonical upper-case name, as used in text serialization, the target
    /// basis set, and profiler reports.
    pub fn label(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Sx => "SX",
            GateKind::Rz(_) => "RZ",
            GateKind::Cp(_) => "CP",
            GateKind::Cx => "CX",
            GateKind::Swap => "SWAP",
            GateKind::Delay(_) => "DELAY",
            GateKind::Boxed { .. } => "BOX",
        }
    }

    /// True for gates that are their own inverse regardless of parameters.
    pub fn is_self_inverse(&self) -> bool {
        matches!(
            self,
            GateKind::H | GateKind::X | GateKind::Cx | GateKind::Swap
        )
    }

    fn validate(&self) -> Result<(), CircuitError> {
        match self {
            GateKind::Rz(theta) | GateKind::Cp(theta) => {
                if !theta.is_finite() {
                    return Err(CircuitError::NonFiniteAngle);
                }
            }
            GateKind::Boxed { name, arity } => {
                if *arity == 0 {
                    return Err(CircuitError::EmptyBox);
                }
                if name.is_empty()
                    || !name
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
                {
                    return Err(CircuitError::BadBoxName(name.clone()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// One gate application: a kind plus the ordered virtual qubits it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Instruction {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self, CircuitError> {
        kind.validate()?;
        if qubits.len() != kind.arity() {
            return Err(CircuitError::ArityMismatch {
                gate: kind.label().to_string(),
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(CircuitError::DuplicateQubit(*q));
            }
        }
        Ok(Instruction { kind, qubits })
    }

    /// True for two-qubit instructions, whatever the gate kind.
    pub fn is_two_qubit(&self) -> bool {
        self.qubits.len() == 2
    }

    /// Feeds the instruction's content (kind, parameters, qubits) into a
    /// hasher. Used by the debug-build contract check that analysis passes
    /// leave the circuit untouched.
    pub fn content_hash(&self, hasher: &mut impl std::hash::Hasher) {
        use std::hash::Hash;
        self.kind.label().hash(hasher);
        match &self.kind {
            GateKind::Rz(t) | GateKind::Cp(t) => t.to_bits().hash(hasher),
            GateKind::Delay(d) => d.hash(hasher),
            GateKind::Boxed { name, arity } => {
                name.hash(hasher);
                arity.hash(hasher);
            }
            _ => {}
        }
        self.qubits.hash(hasher);
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GateKind::Rz(t) | GateKind::Cp(t) => write!(f, "{}({})", self.kind.label(), t)?,
            GateKind::Delay(d) => write!(f, "DELAY({})", d)?,
            GateKind::Boxed { name, arity } => write!(f, "BOX({}, {})", name, arity)?,
            _ => write!(f, "{}", self.kind.label())?,
        }
        write!(f, " ")?;
        for (i, q) in self.qubits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "q{}", q)?;
        }
        Ok(())
    }
}

/// Structural cost figures for a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    /// Longest path in the layered schedule, counting every instruction
    /// (including delays and boxes) as one layer.
    pub depth: usize,
    /// Total instruction count.
    pub size: usize,
    /// Number of two-qubit instructions.
    pub two_qubit_count: usize,
}

/// An ordered gate sequence over virtual qubits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    instructions: Vec<Instruction>,
    pub name: String,
}

impl Circuit {
    pub fn new(num_qubits: usize, name: impl Into<String>) -> Self {
        Circuit {
            num_qubits,
            instructions: Vec::new(),
            name: name.into(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Appends an instruction after validating it against the circuit width.
    pub fn push(&mut self, kind: GateKind, qubits: Vec<usize>) -> Result<(), CircuitError> {
        let instr = Instruction::new(kind, qubits)?;
        for &q in &instr.qubits {
            if q >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        self.instructions.push(instr);
        Ok(())
    }

    pub fn push_instruction(&mut self, instr: Instruction) -> Result<(), CircuitError> {
        self.push(instr.kind, instr.qubits)
    }

    /// True if any instruction is an unexpanded box.
    pub fn has_boxes(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i.kind, GateKind::Boxed { .. }))
    }

    /// Depth, size, and two-qubit count in one walk.
    pub fn metrics(&self) -> Metrics {
        let mut wire_depth = vec![0usize; self.num_qubits];
        let mut depth = 0;
        let mut two_qubit_count = 0;
        for instr in &self.instructions {
            let level = 1 + instr
                .qubits
                .iter()
                .map(|&q| wire_depth[q])
                .max()
                .unwrap_or(0);
            for &q in &instr.qubits {
                wire_depth[q] = level;
            }
            depth = depth.max(level);
            if instr.is_two_qubit() {
                two_qubit_count += 1;
            }
        }
        Metrics {
            depth,
            size: self.instructions.len(),
            two_qubit_count,
        }
    }

    /// The instruction sequence restricted to one wire, in program order.
    pub fn wire_sequence(&self, qubit: usize) -> Vec<&Instruction> {
        self.instructions
            .iter()
            .filter(|i| i.qubits.contains(&qubit))
            .collect()
    }

    pub fn content_hash(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.num_qubits.hash(&mut h);
        for instr in &self.instructions {
            instr.content_hash(&mut h);
        }
        h.finish()
    }

    /// Text form: a `qubits <n>` header, then one instruction per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        for instr in &self.instructions {
            out.push_str(&instr.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text form produced by [`Circuit::to_text`].
    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match &mut circuit {
                None => {
                    let n = trimmed
                        .strip_prefix("qubits ")
                        .and_then(|rest| rest.trim().parse::<usize>().ok())
                        .ok_or_else(|| CircuitError::Parse {
                            line,
                            message: format!("expected `qubits <n>` header, got {:?}", trimmed),
                        })?;
                    circuit = Some(Circuit::new(n, ""));
                }
                Some(c) => {
                    let instr = parse_instruction(trimmed, line)?;
                    c.push_instruction(instr).map_err(|e| CircuitError::Parse {
                        line,
                        message: e.to_string(),
                    })?;
                }
            }
        }
        circuit.ok_or(CircuitError::Parse {
            line: 0,
            message: "empty input: missing `qubits <n>` header".to_string(),
        })
    }
}

fn parse_instruction(text: &str, line: usize) -> Result<Instruction, CircuitError> {
    let err = |message: String| CircuitError::Parse { line, message };
    // The head runs to the closing paren when parameters are present (they
    // may contain spaces, e.g. `BOX(qft, 3)`), otherwise to the first space.
    let (name, params, qubit_part) = match text.find('(') {
        Some(open) => {
            let close = open
                + 1
                + text[open + 1..]
                    .find(')')
                    .ok_or_else(|| err(format!("unclosed parameter list in {:?}", text)))?;
            (
                &text[..open],
                Some(&text[open + 1..close]),
                text[close + 1..].trim_start(),
            )
        }
        None => {
            let (head, rest) = text
                .split_once(' ')
                .ok_or_else(|| err(format!("expected `GATE q<i>...`, got {:?}", text)))?;
            (head, None, rest)
        }
    };
    let kind = match (name, params) {
        ("H", None) => GateKind::H,
        ("X", None) => GateKind::X,
        ("SX", None) => GateKind::Sx,
        ("CX", None) => GateKind::Cx,
        ("SWAP", None) => GateKind::Swap,
        ("RZ", Some(p)) => GateKind::Rz(
            p.trim()
                .parse()
                .map_err(|_| err(format!("bad RZ angle {:?}", p)))?,
        ),
        ("CP", Some(p)) => GateKind::Cp(
            p.trim()
                .parse()
                .map_err(|_| err(format!("bad CP angle {:?}", p)))?,
        ),
        ("DELAY", Some(p)) => GateKind::Delay(
            p.trim()
                .parse()
                .map_err(|_| err(format!("bad DELAY duration {:?}", p)))?,
        ),
        ("BOX", Some(p)) => {
            let (box_name, arity) = p
                .split_once(',')
                .ok_or_else(|| err(format!("expected `BOX(name, arity)`, got {:?}", p)))?;
            GateKind::Boxed {
                name: box_name.trim().to_string(),
                arity: arity
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad BOX arity {:?}", arity)))?,
            }
        }
        _ => return Err(err(format!("unknown gate {:?}", name))),
    };
    let mut qubits = Vec::new();
    for part in qubit_part.split(',') {
        let part = part.trim();
        let idx = part
            .strip_prefix('q')
            .and_then(|rest| rest.parse::<usize>().ok())
            .ok_or_else(|| err(format!("expected qubit like `q0`, got {:?}", part)))?;
        qubits.push(idx);
    }
    Instruction::new(kind, qubits).map_err(|e| err(e.to_string()))
}

/// Builds the n-qubit quantum Fourier transform.
///
/// With `boxed` set the circuit is a single unexpanded `BOX("qft", n)`;
/// otherwise it is the textbook construction: working from the most
/// significant qubit down, a Hadamard followed by controlled-phase rotations
/// CP(pi/2^k) from each less significant qubit, then the final qubit-reversal
/// swaps. Gate counts: n H, n(n-1)/2 CP, floor(n/2) SWAP.
pub fn build_qft(n: usize, boxed: bool) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::InvalidSize);
    }
    let mut c = Circuit::new(n, format!("qft{}", n));
    if boxed {
        c.push(
            GateKind::Boxed {
                name: "qft".to_string(),
                arity: n,
            },
            (0..n).collect(),
        )?;
        return Ok(c);
    }
    for i in (0..n).rev() {
        c.push(GateKind::H, vec![i])?;
        for k in 1..=i {
            c.push(GateKind::Cp(PI / 2f64.powi(k as i32)), vec![i - k, i])?;
        }
    }
    for i in 0..n / 2 {
        c.push(GateKind::Swap, vec![i, n - 1 - i])?;
    }
    Ok(c)
}

/// Builds the n-qubit GHZ state preparation: one Hadamard on qubit 0
/// followed by a nearest-neighbor CX chain, giving a path interaction graph.
pub fn build_ghz(n: usize) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::InvalidSize);
    }
    let mut c = Circuit::new(n, format!("ghz{}", n));
    c.push(GateKind::H, vec![0])?;
    for i in 0..n.saturating_sub(1) {
        c.push(GateKind::Cx, vec![i, i + 1])?;
    }
    Ok(c)
}
