//! Dense semantics: contract a diagram into its matrix, compare matrices up
//! to a scalar, and simulate circuits gate by gate as a reference.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::diagram::{Diagram, EdgeKind, VertexKind, V};

/// Largest `inputs + outputs` accepted by [`evaluate`].
pub const WIDTH_CAP: usize = 20;
/// Largest intermediate tensor rank during contraction.
const RANK_CAP: usize = 26;
/// Largest qubit count for [`circuit_matrix`].
pub const CIRCUIT_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("diagram too wide to evaluate ({0} open wires, cap {WIDTH_CAP})")]
    TooWide(usize),
    #[error("contraction would need a rank-{0} intermediate")]
    TooLarge(usize),
    #[error("H-boxes need the `zh` feature")]
    ZhDisabled,
    #[error("boundary {0} does not have exactly one edge")]
    BadBoundary(V),
    #[error("circuit has {0} qubits, dense cap is {CIRCUIT_CAP}")]
    CircuitTooWide(usize),
    #[error("shape mismatch: {0}x{1} against {2}x{3}")]
    Shape(usize, usize, usize, usize),
}

/// A `2^outputs x 2^inputs` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Tensor::zeros(dim, dim);
        for i in 0..dim {
            t.data[i * dim + i] = ONE;
        }
        t
    }

    pub fn scalar(c: Complex64) -> Self {
        Tensor { rows: 1, cols: 1, data: vec![c] }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Tensor { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Tensor { rows: r, cols: c, data: rows.iter().flat_map(|x| x.iter().map(|&v| Complex64::new(v, 0.0))).collect() }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn scale(&self, s: Complex64) -> Tensor {
        Tensor { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    /// `self * rhs` in the usual matrix sense.
    pub fn matmul(&self, rhs: &Tensor) -> Tensor {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Tensor::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn kron(&self, rhs: &Tensor) -> Tensor {
        let mut out = Tensor::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out.set(i * rhs.rows + k, j * rhs.cols + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Tensor {
        let mut out = Tensor::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn conjugate(&self) -> Tensor {
        Tensor { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn adjoint(&self) -> Tensor {
        self.transpose().conjugate()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Elementwise equality within `tol` (relative once entries exceed 1e3).
    pub fn approx_eq(&self, other: &Tensor, tol: f64) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs()).max(1e3) / 1e3;
        self.data.iter().zip(&other.data).all(|(a, b)| (a - b).norm() <= tol * scale)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

/// Outcome of a proportionality check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Proportion {
    /// `a = factor * b`, factor nonzero.
    Factor(Complex64),
    /// Both tensors vanish.
    BothZero,
}

impl Proportion {
    pub fn factor(self) -> Option<Complex64> {
        match self {
            Proportion::Factor(c) => Some(c),
            Proportion::BothZero => None,
        }
    }
}

/// Finds `lambda != 0` with `a = lambda * b` entrywise within `tol`.
pub fn proportional(a: &Tensor, b: &Tensor, tol: f64) -> Result<Option<Proportion>, EvalError> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(EvalError::Shape(a.rows, a.cols, b.rows, b.cols));
    }
    let scale = a.max_abs().max(b.max_abs()).max(1e3) / 1e3;
    let tol = tol * scale;
    let (k, bmax) = b
        .data
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x.norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if bmax <= tol {
        return Ok(if a.max_abs() <= tol { Some(Proportion::BothZero) } else { None });
    }
    let lambda = a.data[k] / b.data[k];
    if lambda.norm() <= tol {
        return Ok(None);
    }
    let ok = a.data.iter().zip(&b.data).all(|(x, y)| (x - lambda * y).norm() <= tol);
    Ok(ok.then_some(Proportion::Factor(lambda)))
}

/// A dense tensor whose axes are named by wire labels; the first label is
/// the most significant bit of the flat index.
#[derive(Clone, Debug)]
struct Node {
    labels: Vec<usize>,
    data: Vec<Complex64>,
}

impl Node {
    fn rank(&self) -> usize {
        self.labels.len()
    }

    fn permuted(&self, order: &[usize]) -> Node {
        if order == self.labels.as_slice() {
            return self.clone();
        }
        let r = self.rank();
        // old bit position (from the least significant end) for each new axis
        let src: Vec<usize> = order
            .iter()
            .map(|l| r - 1 - self.labels.iter().position(|x| x == l).expect("label present"))
            .collect();
        let mut data = vec![ZERO; self.data.len()];
        for (new_idx, slot) in data.iter_mut().enumerate() {
            let mut old = 0usize;
            for (axis, &s) in src.iter().enumerate() {
                if new_idx >> (r - 1 - axis) & 1 == 1 {
                    old |= 1 << s;
                }
            }
            *slot = self.data[old];
        }
        Node { labels: order.to_vec(), data }
    }
}

fn contract_pair(a: &Node, b: &Node) -> Node {
    let shared: Vec<usize> = a.labels.iter().copied().filter(|l| b.labels.contains(l)).collect();
    let free_a: Vec<usize> = a.labels.iter().copied().filter(|l| !shared.contains(l)).collect();
    let free_b: Vec<usize> = b.labels.iter().copied().filter(|l| !shared.contains(l)).collect();
    let pa = a.permuted(&[free_a.clone(), shared.clone()].concat());
    let pb = b.permuted(&[shared.clone(), free_b.clone()].concat());
    let (m, k, n) = (1usize << free_a.len(), 1usize << shared.len(), 1usize << free_b.len());
    let mut data = vec![ZERO; m * n];
    for i in 0..m {
        for s in 0..k {
            let x = pa.data[i * k + s];
            if x == ZERO {
                continue;
            }
            let row = &pb.data[s * n..(s + 1) * n];
            let out = &mut data[i * n..(i + 1) * n];
            for (o, y) in out.iter_mut().zip(row) {
                *o += x * y;
            }
        }
    }
    Node { labels: [free_a, free_b].concat(), data }
}

fn spider_data(kind: VertexKind, arity: usize) -> Vec<Complex64> {
    let size = 1usize << arity;
    match kind {
        VertexKind::Z(p) => {
            let mut v = vec![ZERO; size];
            v[0] += ONE;
            v[size - 1] += p.exp_i();
            v
        }
        VertexKind::X(p) => {
            let e = p.exp_i();
            let norm = FRAC_1_SQRT_2.powi(arity as i32);
            (0..size)
                .map(|x| {
                    let sign = if (x as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                    (ONE + e * sign) * norm
                })
                .collect()
        }
        VertexKind::H(a) => {
            let mut v = vec![ONE; size];
            v[size - 1] = a;
            v
        }
        VertexKind::B => unreachable!("boundaries carry no tensor"),
    }
}

/// The linear map of a diagram as a `2^|outputs| x 2^|inputs|` matrix.
pub fn evaluate(d: &Diagram) -> Result<Tensor, EvalError> {
    let width = d.inputs().len() + d.outputs().len();
    if width > WIDTH_CAP {
        return Err(EvalError::TooWide(width));
    }
    let mut next_label = 0usize;
    let mut fresh = || {
        next_label += 1;
        next_label - 1
    };
    let mut legs: HashMap<V, Vec<usize>> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    for (a, b, k) in d.edges() {
        let both_boundary = d.is_boundary(a) && d.is_boundary(b);
        if k == EdgeKind::Plain && a != b && !both_boundary {
            let l = fresh();
            legs.entry(a).or_default().push(l);
            legs.entry(b).or_default().push(l);
        } else {
            let (la, lb) = (fresh(), fresh());
            legs.entry(a).or_default().push(la);
            legs.entry(b).or_default().push(lb);
            let data = match k {
                EdgeKind::Plain => vec![ONE, ZERO, ZERO, ONE],
                EdgeKind::Hadamard => {
                    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                    vec![h, h, h, -h]
                }
            };
            nodes.push(Node { labels: vec![la, lb], data });
        }
    }
    for (v, kind) in d.vertices() {
        let l = legs.remove(&v).unwrap_or_default();
        match kind {
            VertexKind::B => {
                if l.len() != 1 {
                    return Err(EvalError::BadBoundary(v));
                }
                legs.insert(v, l);
            }
            VertexKind::H(_) if !cfg!(feature = "zh") => return Err(EvalError::ZhDisabled),
            _ => {
                let data = spider_data(kind, l.len());
                nodes.push(Node { labels: l, data });
            }
        }
    }
    let open: Vec<usize> = d.outputs().iter().chain(d.inputs()).map(|b| legs[b][0]).collect();

    let mut live: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
    loop {
        let alive: Vec<usize> = (0..live.len()).filter(|&i| live[i].is_some()).collect();
        if alive.len() <= 1 {
            break;
        }
        // cheapest pair sharing a wire; otherwise the two smallest factors
        let mut owner: HashMap<usize, usize> = HashMap::new();
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &alive {
            let n = live[i].as_ref().unwrap();
            for &l in &n.labels {
                if let Some(&j) = owner.get(&l) {
                    let other = live[j].as_ref().unwrap();
                    let shared = n.labels.iter().filter(|x| other.labels.contains(x)).count();
                    let cost = n.rank() + other.rank() - 2 * shared;
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, j, i));
                    }
                } else {
                    owner.insert(l, i);
                }
            }
        }
        let (i, j) = match best {
            Some((_, i, j)) => (i, j),
            None => {
                let mut by_size = alive.clone();
                by_size.sort_by_key(|&i| live[i].as_ref().unwrap().rank());
                (by_size[0], by_size[1])
            }
        };
        let (a, b) = (live[i].take().unwrap(), live[j].take().unwrap());
        let rank = a.rank() + b.rank();
        if rank > RANK_CAP + 2 * a.labels.iter().filter(|l| b.labels.contains(l)).count() {
            return Err(EvalError::TooLarge(rank));
        }
        live[i] = Some(contract_pair(&a, &b));
    }
    let result = live
        .into_iter()
        .flatten()
        .next()
        .unwrap_or(Node { labels: vec![], data: vec![ONE] })
        .permuted(&open);
    let s = d.scalar.value();
    Ok(Tensor {
        rows: 1 << d.outputs().len(),
        cols: 1 << d.inputs().len(),
        data: result.data.into_iter().map(|x| x * s).collect(),
    })
}

// ---- circuit reference simulation ----

fn bit(idx: usize, n: usize, q: usize) -> usize {
    idx >> (n - 1 - q) & 1
}

fn apply_1q(state: &mut [Complex64], n: usize, q: usize, m: [[Complex64; 2]; 2]) {
    let mask = 1usize << (n - 1 - q);
    for i in 0..state.len() {
        if i & mask == 0 {
            let (a, b) = (state[i], state[i | mask]);
            state[i] = m[0][0] * a + m[0][1] * b;
            state[i | mask] = m[1][0] * a + m[1][1] * b;
        }
    }
}

fn apply_diag(state: &mut [Complex64], f: impl Fn(usize) -> Complex64) {
    for (i, x) in state.iter_mut().enumerate() {
        *x *= f(i);
    }
}

fn apply_perm(state: &mut [Complex64], f: impl Fn(usize) -> usize) {
    let old = state.to_vec();
    for (i, x) in old.into_iter().enumerate() {
        state[f(i)] = x;
    }
}

/// Textbook matrix of a single-qubit gate, if `g` is one.
pub fn single_qubit_matrix(g: &Gate) -> Option<[[Complex64; 2]; 2]> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let h = FRAC_1_SQRT_2;
    let diag = |p: Complex64| [[ONE, ZERO], [ZERO, p]];
    Some(match g {
        Gate::H(_) => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        Gate::X(_) => [[ZERO, ONE], [ONE, ZERO]],
        Gate::Y(_) => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
        Gate::Z(_) => diag(c(-1.0, 0.0)),
        Gate::S(_) => diag(c(0.0, 1.0)),
        Gate::Sdg(_) => diag(c(0.0, -1.0)),
        Gate::T(_) => diag(c(h, h)),
        Gate::Tdg(_) => diag(c(h, -h)),
        Gate::RZ(_, p) => diag(p.exp_i()),
        Gate::RX(_, p) => {
            let t = p.to_radians() / 2.0;
            [[c(t.cos(), 0.0), c(0.0, -t.sin())], [c(0.0, -t.sin()), c(t.cos(), 0.0)]]
        }
        _ => return None,
    })
}

/// Applies one gate to a state vector over `n` qubits (qubit 0 is the most
/// significant bit).
pub fn apply_gate(state: &mut [Complex64], n: usize, g: &Gate) {
    if let Some(m) = single_qubit_matrix(g) {
        apply_1q(state, n, g.qubits()[0], m);
        return;
    }
    let flip = |i: usize, q: usize| i ^ (1 << (n - 1 - q));
    match g {
        Gate::CX(c, t) => apply_perm(state, |i| if bit(i, n, *c) == 1 { flip(i, *t) } else { i }),
        Gate::CZ(a, b) => apply_diag(state, |i| if bit(i, n, *a) & bit(i, n, *b) == 1 { -ONE } else { ONE }),
        Gate::Swap(a, b) => apply_perm(state, |i| {
            if bit(i, n, *a) != bit(i, n, *b) {
                flip(flip(i, *a), *b)
            } else {
                i
            }
        }),
        Gate::CCX(a, b, t) => {
            apply_perm(state, |i| if bit(i, n, *a) & bit(i, n, *b) == 1 { flip(i, *t) } else { i })
        }
        Gate::CCZ(a, b, c) => apply_diag(state, |i| {
            if bit(i, n, *a) & bit(i, n, *b) & bit(i, n, *c) == 1 {
                -ONE
            } else {
                ONE
            }
        }),
        Gate::PhaseGadget(qs, p) => {
            let e = p.exp_i();
            apply_diag(state, |i| if qs.iter().map(|&q| bit(i, n, q)).sum::<usize>() % 2 == 1 { e } else { ONE })
        }
        _ => unreachable!("single-qubit gates handled above"),
    }
}

/// `C |x>` for a computational basis input `x`.
pub fn circuit_state(c: &Circuit, input: usize) -> Result<Vec<Complex64>, EvalError> {
    if c.qubits > 24 {
        return Err(EvalError::CircuitTooWide(c.qubits));
    }
    let mut state = vec![ZERO; 1 << c.qubits];
    state[input] = ONE;
    for g in &c.gates {
        apply_gate(&mut state, c.qubits, g);
    }
    Ok(state)
}

/// Exact unitary of a circuit from textbook gate matrices.
pub fn circuit_matrix(c: &Circuit) -> Result<Tensor, EvalError> {
    if c.qubits > CIRCUIT_CAP {
        return Err(EvalError::CircuitTooWide(c.qubits));
    }
    let dim = 1usize << c.qubits;
    let mut t = Tensor::zeros(dim, dim);
    for col in 0..dim {
        let s = circuit_state(c, col)?;
        for (row, x) in s.into_iter().enumerate() {
            t.set(row, col, x);
        }
    }
    Ok(t)
}
