//! Hardware target description: the coupling graph, the native basis set,
//! and per-gate duration/error tables, plus generators for line and grid
//! topologies and a line-oriented text format with bit-exact round trips.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::TargetError;

/// Duration in time ticks and error probability for one gate placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateCost {
    pub duration: u64,
    pub error: f64,
}

pub const DEFAULT_BASIS: [&str; 4] = ["CX", "RZ", "SX", "X"];

/// An immutable hardware model. Coupling is undirected; edge keys are stored
/// with the smaller qubit first.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    num_qubits: usize,
    basis: Vec<String>,
    edges: BTreeMap<(usize, usize), GateCost>,
    gate1q: BTreeMap<String, GateCost>,
    adjacency: Vec<Vec<usize>>,
}

impl Target {
    pub fn new(num_qubits: usize) -> Result<Self, TargetError> {
        if num_qubits == 0 {
            return Err(TargetError::InvalidSize);
        }
        Ok(Target {
            num_qubits,
            basis: DEFAULT_BASIS.iter().map(|s| s.to_string()).collect(),
            edges: BTreeMap::new(),
            gate1q: BTreeMap::new(),
            adjacency: vec![Vec::new(); num_qubits],
        })
    }

    /// Synthetic error rate used when a file or generator gives none: a
    /// deterministic gradient over qubit indices, so exhaustive layout
    /// scoring has a reproducible nontrivial objective.
    pub fn default_edge_error(&self, a: usize, b: usize) -> f64 {
        0.001 * (1.0 + (a + b) as f64 / self.num_qubits as f64)
    }

    pub fn add_edge(&mut self, a: usize, b: usize, cost: GateCost) -> Result<(), TargetError> {
        if a == b {
            return Err(TargetError::Invariant {
                field: "edge",
                message: format!("self-loop on qubit {}", a),
            });
        }
        for q in [a, b] {
            if q >= self.num_qubits {
                return Err(TargetError::Invariant {
                    field: "edge",
                    message: format!("qubit {} out of range for {} qubits", q, self.num_qubits),
                });
            }
        }
        if !(0.0..=1.0).contains(&cost.error) {
            return Err(TargetError::Invariant {
                field: "error",
                message: format!("edge ({a}, {b}) error {} outside [0, 1]", cost.error),
            });
        }
        let key = (a.min(b), a.max(b));
        if self.edges.insert(key, cost).is_none() {
            self.adjacency[a].push(b);
            self.adjacency[a].sort_unstable();
            self.adjacency[b].push(a);
            self.adjacency[b].sort_unstable();
        }
        Ok(())
    }

    /// Adds an edge with unit duration and the synthetic gradient error.
    pub fn add_edge_default(&mut self, a: usize, b: usize) -> Result<(), TargetError> {
        let cost = GateCost {
            duration: 1,
            error: self.default_edge_error(a, b),
        };
        self.add_edge(a, b, cost)
    }

    pub fn set_basis(&mut self, names: &[&str]) -> Result<(), TargetError> {
        if names.is_empty() {
            return Err(TargetError::Invariant {
                field: "basis",
                message: "basis must name at least one gate".to_string(),
            });
        }
        self.basis = names.iter().map(|s| s.to_string()).collect();
        Ok(())
    }

    pub fn set_gate1q(&mut self, name: &str, cost: GateCost) -> Result<(), TargetError> {
        if !(0.0..=1.0).contains(&cost.error) {
            return Err(TargetError::Invariant {
                field: "error",
                message: format!("gate {} error {} outside [0, 1]", name, cost.error),
            });
        }
        self.gate1q.insert(name.to_string(), cost);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn in_basis(&self, name: &str) -> bool {
        self.basis.iter().any(|b| b == name)
    }

    pub fn is_coupled(&self, a: usize, b: usize) -> bool {
        self.edges.contains_key(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &GateCost)> {
        self.edges.iter().map(|(&(a, b), cost)| (a, b, cost))
    }

    pub fn edge_cost(&self, a: usize, b: usize) -> Option<GateCost> {
        self.edges.get(&(a.min(b), a.max(b))).copied()
    }

    /// Error rate used when scoring a layout that maps an interaction onto
    /// the pair (a, b); non-coupled pairs fall back to the gradient default.
    pub fn edge_error(&self, a: usize, b: usize) -> f64 {
        self.edge_cost(a, b)
            .map(|c| c.error)
            .unwrap_or_else(|| self.default_edge_error(a, b))
    }

    pub fn duration_1q(&self, name: &str) -> u64 {
        self.gate1q.get(name).map(|c| c.duration).unwrap_or(1)
    }

    pub fn duration_2q(&self, a: usize, b: usize) -> u64 {
        self.edge_cost(a, b).map(|c| c.duration).unwrap_or(1)
    }

    pub fn is_connected(&self) -> bool {
        if self.num_qubits == 0 {
            return true;
        }
        let mut seen = vec![false; self.num_qubits];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(q) = stack.pop() {
            for &nb in &self.adjacency[q] {
                if !seen[nb] {
                    seen[nb] = true;
                    count += 1;
                    stack.push(nb);
                }
            }
        }
        count == self.num_qubits
    }

    /// Path-graph target: qubit i coupled to i+1.
    pub fn line(n: usize) -> Result<Self, TargetError> {
        let mut t = Target::new(n)?;
        for i in 0..n.saturating_sub(1) {
            t.add_edge_default(i, i + 1)?;
        }
        Ok(t)
    }

    /// Grid target in row-major numbering: qubit (r, c) is r·cols + c,
    /// coupled rightward and downward.
    pub fn grid(rows: usize, cols: usize) -> Result<Self, TargetError> {
        if rows == 0 || cols == 0 {
            return Err(TargetError::InvalidSize);
        }
        let mut t = Target::new(rows * cols)?;
        for r in 0..rows {
            for c in 0..cols {
                let q = r * cols + c;
                if c + 1 < cols {
                    t.add_edge_default(q, q + 1)?;
                }
                if r + 1 < rows {
                    t.add_edge_default(q, q + cols)?;
                }
            }
        }
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.num_qubits);
        out.push_str("basis");
        for name in &self.basis {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
        for (&(a, b), cost) in &self.edges {
            out.push_str(&format!("edge {} {} {} {}\n", a, b, cost.duration, cost.error));
        }
        for (name, cost) in &self.gate1q {
            out.push_str(&format!("gate1q {} {} {}\n", name, cost.duration, cost.error));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TargetError> {
        let mut target: Option<Target> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let directive = parts.next().expect("non-empty line has a first token");
            let rest: Vec<&str> = parts.collect();
            match (directive, &mut target) {
                ("qubits", slot @ None) => {
                    let n = rest
                        .first()
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|_| rest.len() == 1)
                        .ok_or_else(|| TargetError::Parse {
                            line,
                            message: "expected `qubits <n>`".to_string(),
                        })?;
                    *slot = Some(Target::new(n).map_err(|_| TargetError::Parse {
                        line,
                        message: "qubit count must be at least 1".to_string(),
                    })?);
                }
                ("qubits", Some(_)) => {
                    return Err(TargetError::Parse {
                        line,
                        message: "duplicate `qubits` line".to_string(),
                    })
                }
                (_, None) => {
                    return Err(TargetError::Parse {
                        line,
                        message: "first directive must be `qubits <n>`".to_string(),
                    })
                }
                ("basis", Some(t)) => {
                    if rest.is_empty() {
                        return Err(TargetError::Parse {
                            line,
                            message: "basis line lists no gates".to_string(),
                        });
                    }
                    t.basis = rest.iter().map(|s| s.to_string()).collect();
                }
                ("edge", Some(t)) => {
                    if rest.len() < 2 || rest.len() > 4 {
                        return Err(TargetError::Parse {
                            line,
                            message: "expected `edge <a> <b> [duration] [error]`".to_string(),
                        });
                    }
                    let a = parse_field::<usize>(rest[0], "edge endpoint", line)?;
                    let b = parse_field::<usize>(rest[1], "edge endpoint", line)?;
                    let duration = match rest.get(2) {
                        Some(s) => parse_field::<u64>(s, "edge duration", line)?,
                        None => 1,
                    };
                    let error = match rest.get(3) {
                        Some(s) => parse_field::<f64>(s, "edge error", line)?,
                        None => t.default_edge_error(a, b),
                    };
                    t.add_edge(a, b, GateCost { duration, error })?;
                }
                ("gate1q", Some(t)) => {
                    if rest.is_empty() || rest.len() > 3 {
                        return Err(TargetError::Parse {
                            line,
                            message: "expected `gate1q <name> [duration] [error]`".to_string(),
                        });
                    }
                    let duration = match rest.get(1) {
                        Some(s) => parse_field::<u64>(s, "gate duration", line)?,
                        None => 1,
                    };
                    let error = match rest.get(2) {
                        Some(s) => parse_field::<f64>(s, "gate error", line)?,
                        None => 0.0001,
                    };
                    t.set_gate1q(rest[0], GateCost { duration, error })?;
                }
                _ => {
                    return Err(TargetError::Parse {
                        line,
                        message: format!("unknown directive {:?}", directive),
                    })
                }
            }
        }
        target.ok_or(TargetError::Parse {
            line: 0,
            message: "empty input: missing `qubits <n>`".to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TargetError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TargetError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_field<T: std::str::FromStr>(
    s: &str,
    what: &str,
    line: usize,
) -> Result<T, TargetError> {
    s.parse().map_err(|_| TargetError::Parse {
        line,
        message: format!("bad {}: {:?}", what, s),
    })
}
