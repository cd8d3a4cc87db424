//! Circuit extraction from reduced Clifford diagrams: GF(2) elimination of
//! the input/output biadjacency matrix into CNOTs, with CZ, phase and
//! Hadamard layers on either side.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::diagram::{Diagram, EdgeKind, V};
use crate::phase::Phase;
use crate::rules::{self, Match, Rule};
use crate::simplify::{GraphLikeView, SimplifyError};
use crate::tensor::{circuit_matrix, proportional, EvalError, Proportion};

/// Dense matrix over GF(2), row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    pub rows: usize,
    pub cols: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, bits: vec![false; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b != 0);
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.bits[r * self.cols + c] = b;
    }

    /// `target ^= source`.
    pub fn apply(&mut self, op: RowOp) {
        for c in 0..self.cols {
            if self.get(op.source, c) {
                let i = op.target * self.cols + c;
                self.bits[i] = !self.bits[i];
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == (r == c)))
    }

    /// `M x` over GF(2), with `x` given as bits.
    pub fn mul_vec(&self, x: &[bool]) -> Vec<bool> {
        (0..self.rows).map(|r| (0..self.cols).filter(|&c| self.get(r, c) && x[c]).count() % 2 == 1).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// `target <- target xor source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RowOp {
    pub target: usize,
    pub source: usize,
}

/// Gauss-Jordan elimination; pivots are the lowest row index available.
/// Replaying the ops on `m` gives the returned matrix.
pub fn gauss_elim(m: &BitMatrix) -> (Vec<RowOp>, BitMatrix) {
    let mut m = m.clone();
    let mut ops = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| m.get(r, col)) else { continue };
        if p != row {
            // bring the pivot up by adding, keeping every op a CNOT
            let op = RowOp { target: row, source: p };
            m.apply(op);
            ops.push(op);
        }
        for r in 0..m.rows {
            if r != row && m.get(r, col) {
                let op = RowOp { target: r, source: row };
                m.apply(op);
                ops.push(op);
            }
        }
        row += 1;
    }
    (ops, m)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error("row op {0:?} out of range for {1} qubits")]
    OutOfRange(RowOp, usize),
    #[error("not extractable: {0}")]
    NotExtractable(String),
    #[error(transparent)]
    Simplify(#[from] SimplifyError),
}

/// CNOTs implementing the inverse of the elimination, i.e. `x -> M x` for
/// the matrix `M` the ops reduced to the identity.
pub fn cnot_circuit_of(ops: &[RowOp], n: usize) -> Result<Circuit, ExtractError> {
    let mut c = Circuit::new(n);
    for &op in ops.iter().rev() {
        if op.target >= n || op.source >= n || op.target == op.source {
            return Err(ExtractError::OutOfRange(op, n));
        }
        c.push(Gate::CX(op.source, op.target));
    }
    Ok(c)
}

fn phase_gates(q: usize, p: Phase) -> Result<Vec<Gate>, ExtractError> {
    let quarter = p.to_rational().filter(|r| (*r * 2).is_integer()).map(|r| ((r * 2).to_integer()).rem_euclid(4));
    Ok(match quarter {
        Some(0) => vec![],
        Some(1) => vec![Gate::S(q)],
        Some(2) => vec![Gate::Z(q)],
        Some(3) => vec![Gate::Sdg(q)],
        _ => return Err(ExtractError::NotExtractable(format!("non-Clifford phase {p} on qubit {q}"))),
    })
}

/// Each boundary gets its own spider; extra boundaries are split off with
/// identity spiders. Returns spider per input and per output.
fn separate_boundaries(d: &mut Diagram) -> (Vec<V>, Vec<V>) {
    let mut seen: BTreeMap<V, ()> = BTreeMap::new();
    let mut side = |d: &mut Diagram, bs: Vec<V>| -> Vec<V> {
        bs.into_iter()
            .map(|b| {
                let v = d.neighbors(b)[0];
                if seen.insert(v, ()).is_none() {
                    return v;
                }
                rules::apply(d, &Match::new(Rule::InsertIdentity, vec![v, b])).expect("boundary edge");
                let w = d.neighbors(b)[0];
                seen.insert(w, ());
                w
            })
            .collect()
    };
    let ins = side(d, d.inputs().to_vec());
    let outs = side(d, d.outputs().to_vec());
    (ins, outs)
}

/// Reads a circuit off a fully reduced Clifford diagram. The result equals
/// the diagram up to a nonzero scalar.
pub fn extract_circuit(g: &GraphLikeView) -> Result<Circuit, ExtractError> {
    let left = g.internal_spiders();
    if !left.is_empty() {
        return Err(SimplifyError::InternalSpiders(left.len()).into());
    }
    let mut d = g.diagram().clone();
    let n = d.inputs().len();
    if d.outputs().len() != n {
        return Err(ExtractError::NotExtractable(format!("{n} inputs but {} outputs", d.outputs().len())));
    }
    for (v, p) in g.phases() {
        if !p.is_clifford() {
            return Err(SimplifyError::NonClifford(v, p).into());
        }
    }
    let (us, vs) = separate_boundaries(&mut d);
    let in_q: BTreeMap<V, usize> = us.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let out_q: BTreeMap<V, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut c = Circuit::new(n);
    let mut bip = BitMatrix::zeros(n, n);
    for (i, &u) in us.iter().enumerate() {
        if d.edge_count(u, d.inputs()[i], EdgeKind::Hadamard) == 1 {
            c.push(Gate::H(i));
        }
    }
    for (i, &u) in us.iter().enumerate() {
        c.gates.extend(phase_gates(i, d.phase(u).unwrap())?);
    }
    for (i, &u) in us.iter().enumerate() {
        for w in d.neighbors(u) {
            if let Some(&j) = in_q.get(&w) {
                if i < j {
                    c.push(Gate::CZ(i, j));
                }
            } else if let Some(&j) = out_q.get(&w) {
                bip.set(j, i, true);
            }
        }
    }
    let (ops, reduced) = gauss_elim(&bip);
    if !reduced.is_identity() {
        return Err(ExtractError::NotExtractable("biadjacency matrix is singular".into()));
    }
    c.gates.extend(cnot_circuit_of(&ops, n)?.gates);
    for q in 0..n {
        c.push(Gate::H(q));
    }
    for (i, &v) in vs.iter().enumerate() {
        for w in d.neighbors(v) {
            if let Some(&j) = out_q.get(&w) {
                if i < j {
                    c.push(Gate::CZ(i, j));
                }
            }
        }
    }
    for (i, &v) in vs.iter().enumerate() {
        c.gates.extend(phase_gates(i, d.phase(v).unwrap())?);
    }
    for (i, &v) in vs.iter().enumerate() {
        if d.edge_count(v, d.outputs()[i], EdgeKind::Hadamard) == 1 {
            c.push(Gate::H(i));
        }
    }
    Ok(peephole(&c))
}

fn quarter_turns(g: &Gate) -> Option<(usize, u8)> {
    match *g {
        Gate::S(q) => Some((q, 1)),
        Gate::Z(q) => Some((q, 2)),
        Gate::Sdg(q) => Some((q, 3)),
        _ => None,
    }
}

fn same_gate(a: &Gate, b: &Gate) -> bool {
    match (a, b) {
        (Gate::CZ(p, q), Gate::CZ(r, s)) | (Gate::Swap(p, q), Gate::Swap(r, s)) => (p, q) == (r, s) || (p, q) == (s, r),
        _ => a == b,
    }
}

/// Cancels adjacent inverse pairs and merges S/Z/Sdg runs on a wire. The
/// result is the same unitary exactly.
pub fn peephole(c: &Circuit) -> Circuit {
    let mut out: Vec<Gate> = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let qs = g.qubits();
        let last = |out: &[Gate], q: usize| out.iter().rposition(|h| h.qubits().contains(&q));
        let j = last(&out, qs[0]);
        let prev = j.filter(|&j| qs.iter().all(|&q| last(&out, q) == Some(j)) && out[j].qubits().len() == qs.len());
        if let Some(j) = prev {
            if let (Some((q, a)), Some((_, b))) = (quarter_turns(&out[j]), quarter_turns(g)) {
                match (a + b) % 4 {
                    0 => {
                        out.remove(j);
                    }
                    1 => out[j] = Gate::S(q),
                    2 => out[j] = Gate::Z(q),
                    _ => out[j] = Gate::Sdg(q),
                }
                continue;
            }
            if same_gate(&out[j], &g.inverse()) {
                out.remove(j);
                continue;
            }
        }
        out.push(g.clone());
    }
    Circuit { qubits: c.qubits, gates: out }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ExtractionReport {
    pub proportional: bool,
    /// `original = lambda * extracted`, when proportional.
    pub lambda: Option<[f64; 2]>,
    pub max_deviation: f64,
}

impl ExtractionReport {
    /// Proportional with a unit-modulus factor.
    pub fn passed(&self, tol: f64) -> bool {
        self.proportional && self.lambda.is_some_and(|l| (Complex64::new(l[0], l[1]).norm() - 1.0).abs() <= tol)
    }
}

pub fn verify_extraction(original: &Circuit, extracted: &Circuit, tol: f64) -> Result<ExtractionReport, EvalError> {
    if original.qubits != extracted.qubits {
        return Err(EvalError::Shape(original.qubits, original.qubits, extracted.qubits, extracted.qubits));
    }
    let a = circuit_matrix(original)?;
    let b = circuit_matrix(extracted)?;
    let lambda = match proportional(&a, &b, tol)? {
        Some(Proportion::Factor(l)) => Some(l),
        _ => None,
    };
    let max_deviation = match lambda {
        Some(l) => a.data.iter().zip(&b.data).map(|(x, y)| (x - l * y).norm()).fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    Ok(ExtractionReport { proportional: lambda.is_some(), lambda: lambda.map(|l| [l.re, l.im]), max_deviation })
}
