//! Circuit equivalence by reducing `a` composed with the adjoint of `b`,
//! with a dense fallback at small widths, and single amplitudes.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{circuit_to_diagram, Circuit, ToffoliMode};
use crate::diagram::{Diagram, EdgeKind};
use crate::rules::{self, Strategy};
use crate::simplify::{clifford_amplitude, full_reduce};
use crate::tensor::{apply_gate, circuit_matrix, circuit_state, proportional, EvalError};

/// Widest circuit compared with full matrices.
pub const MATRIX_CAP: usize = 6;
/// Widest circuit compared numerically at all.
pub const NUMERIC_CAP: usize = 10;
const SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    /// The composite reduced to bare wires.
    EqualProved,
    EqualNumeric,
    Different,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::EqualProved => "equal (proved)",
            Verdict::EqualNumeric => "equal (numeric)",
            Verdict::Different => "different",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub toffoli_mode: ToffoliMode,
    pub tol: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { toffoli_mode: ToffoliMode::Hbox, tol: 1e-9, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub verdict: Verdict,
    /// Vertices left after reduction, boundaries included.
    pub residual_vertices: usize,
    /// `a = lambda * b` when found numerically.
    pub lambda: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquivError {
    #[error("circuits act on {0} and {1} qubits")]
    Width(usize, usize),
}

/// True when only `input_i -- output_i` plain wires remain.
pub fn is_bare_identity(d: &Diagram) -> bool {
    let n = d.inputs().len();
    n == d.outputs().len()
        && d.num_vertices() == 2 * n
        && !d.scalar.is_zero()
        && (0..n).all(|i| d.edge_count(d.inputs()[i], d.outputs()[i], EdgeKind::Plain) == 1)
}

/// Reduces the diagram of `a` after `b`'s adjoint.
pub fn reduce_composite(a: &Circuit, b: &Circuit, mode: ToffoliMode) -> Diagram {
    let da = circuit_to_diagram(a, mode);
    let db = circuit_to_diagram(b, mode);
    let mut d = db.adjoint().compose(&da).expect("equal widths");
    full_reduce(&mut d);
    rules::simplify(&mut d, &Strategy::Basic);
    d
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..1usize << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn run(c: &Circuit, mut s: Vec<Complex64>) -> Vec<Complex64> {
    for g in &c.gates {
        apply_gate(&mut s, c.qubits, g);
    }
    s
}

/// `Some(lambda)` if `a = lambda * b` on the sampled states.
fn sampled_ratio(a: &Circuit, b: &Circuit, opts: &VerifyOptions) -> Option<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lambda: Option<Complex64> = None;
    for _ in 0..SAMPLES {
        let s = random_state(&mut rng, a.qubits);
        let (x, y) = (run(a, s.clone()), run(b, s));
        let (k, big) = y.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, 0.0), |m, v| if v.1 > m.1 { v } else { m });
        if big <= opts.tol {
            return None;
        }
        let l = *lambda.get_or_insert(x[k] / y[k]);
        let scale = x.iter().map(|v| v.norm()).fold(1.0, f64::max);
        if x.iter().zip(&y).any(|(p, q)| (p - l * q).norm() > opts.tol * scale) {
            return None;
        }
    }
    lambda
}

pub fn verify(a: &Circuit, b: &Circuit, opts: &VerifyOptions) -> Result<VerifyReport, EquivError> {
    if a.qubits != b.qubits {
        return Err(EquivError::Width(a.qubits, b.qubits));
    }
    let d = reduce_composite(a, b, opts.toffoli_mode);
    let residual_vertices = d.num_vertices();
    if is_bare_identity(&d) {
        return Ok(VerifyReport { verdict: Verdict::EqualProved, residual_vertices, lambda: None });
    }
    log::debug!("composite left {residual_vertices} vertices, falling back to numerics");
    let n = a.qubits;
    let (verdict, lambda) = if n <= MATRIX_CAP {
        let (ma, mb) = (circuit_matrix(a).expect("narrow"), circuit_matrix(b).expect("narrow"));
        match proportional(&ma, &mb, opts.tol).expect("same shape").and_then(|p| p.factor()) {
            Some(l) => (Verdict::EqualNumeric, Some(l)),
            None => (Verdict::Different, None),
        }
    } else if n <= NUMERIC_CAP {
        match sampled_ratio(a, b, opts) {
            Some(l) => (Verdict::EqualNumeric, Some(l)),
            None => (Verdict::Different, None),
        }
    } else {
        (Verdict::Inconclusive, None)
    };
    Ok(VerifyReport { verdict, residual_vertices, lambda })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AmpError {
    #[error("bitstrings must have {0} bits")]
    Bits(usize),
    #[error("non-Clifford circuit on {0} qubits is too wide for the dense fallback")]
    TooWide(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `<output| c |input>`, diagrammatically for Clifford circuits.
pub fn amp(c: &Circuit, input: &[bool], output: &[bool]) -> Result<Complex64, AmpError> {
    if input.len() != c.qubits || output.len() != c.qubits {
        return Err(AmpError::Bits(c.qubits));
    }
    if c.is_clifford() {
        if let Ok(a) = clifford_amplitude(c, input, output) {
            return Ok(a);
        }
    }
    if c.qubits > NUMERIC_CAP {
        return Err(AmpError::TooWide(c.qubits));
    }
    let index = |bits: &[bool]| bits.iter().fold(0usize, |acc, &b| acc << 1 | usize::from(b));
    Ok(circuit_state(c, index(input))?[index(output)])
}
