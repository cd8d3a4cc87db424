//! Quantum circuits: gate list, QASM subset, translation to diagrams,
//! renderers and statistics.

mod qasm;
mod render;
mod stats;
mod translate;

use std::fmt;

pub use qasm::{emit_qasm, parse_phase_expr, parse_qasm, QasmError};
pub use render::{diagram_to_dot, diagram_to_tikz};
pub use stats::{stats, Stats};
pub use translate::{circuit_to_diagram, ToffoliMode};

use crate::phase::Phase;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    /// `diag(1, e^{i phase})`.
    RZ(usize, Phase),
    /// `exp(-i phase X / 2)`.
    RX(usize, Phase),
    CX(usize, usize),
    CZ(usize, usize),
    Swap(usize, usize),
    CCX(usize, usize, usize),
    CCZ(usize, usize, usize),
    /// `e^{i phase * (x_a xor x_b xor ...)}` on a sorted, distinct qubit list.
    PhaseGadget(Vec<usize>, Phase),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        use Gate::*;
        match self {
            H(q) | X(q) | Y(q) | Z(q) | S(q) | Sdg(q) | T(q) | Tdg(q) | RZ(q, _) | RX(q, _) => vec![*q],
            CX(a, b) | CZ(a, b) | Swap(a, b) => vec![*a, *b],
            CCX(a, b, c) | CCZ(a, b, c) => vec![*a, *b, *c],
            PhaseGadget(qs, _) => qs.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        use Gate::*;
        match self {
            H(_) => "h",
            X(_) => "x",
            Y(_) => "y",
            Z(_) => "z",
            S(_) => "s",
            Sdg(_) => "sdg",
            T(_) => "t",
            Tdg(_) => "tdg",
            RZ(..) => "rz",
            RX(..) => "rx",
            CX(..) => "cx",
            CZ(..) => "cz",
            Swap(..) => "swap",
            CCX(..) => "ccx",
            CCZ(..) => "ccz",
            PhaseGadget(..) => "gadget",
        }
    }

    /// The inverse gate (exactly, including global phase).
    pub fn inverse(&self) -> Gate {
        use Gate::*;
        match self {
            S(q) => Sdg(*q),
            Sdg(q) => S(*q),
            T(q) => Tdg(*q),
            Tdg(q) => T(*q),
            RZ(q, p) => RZ(*q, -*p),
            RX(q, p) => RX(*q, -*p),
            PhaseGadget(qs, p) => PhaseGadget(qs.clone(), -*p),
            g => g.clone(),
        }
    }

    /// Whether the gate maps Paulis to Paulis.
    pub fn is_clifford(&self) -> bool {
        use Gate::*;
        match self {
            T(_) | Tdg(_) | CCX(..) | CCZ(..) => false,
            RZ(_, p) | RX(_, p) | PhaseGadget(_, p) => p.is_clifford(),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("gate {index} ({name}) uses qubit {qubit}, circuit has {qubits}")]
    OutOfRange { index: usize, name: &'static str, qubit: usize, qubits: usize },
    #[error("gate {index} ({name}) repeats a qubit")]
    Repeated { index: usize, name: &'static str },
    #[error("gate {index}: phase gadget needs a nonempty sorted qubit list")]
    BadGadget { index: usize },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Circuit { qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn with(mut self, g: Gate) -> Self {
        self.gates.push(g);
        self
    }

    /// Gates reversed and inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit { qubits: self.qubits, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Circuit {
        let mut c = self.clone();
        c.qubits = c.qubits.max(other.qubits);
        c.gates.extend(other.gates.iter().cloned());
        c
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            let name = g.name();
            if let Some(&qubit) = qs.iter().find(|&&q| q >= self.qubits) {
                return Err(CircuitError::OutOfRange { index, name, qubit, qubits: self.qubits });
            }
            if let Gate::PhaseGadget(..) = g {
                if qs.is_empty() || qs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CircuitError::BadGadget { index });
                }
            }
            let mut sorted = qs.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != qs.len() {
                return Err(CircuitError::Repeated { index, name });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        match self {
            Gate::RZ(_, p) | Gate::RX(_, p) | Gate::PhaseGadget(_, p) => {
                write!(f, "{}({}) {}", self.name(), p, qs.join(","))
            }
            _ => write!(f, "{} {}", self.name(), qs.join(",")),
        }
    }
}
