//! The diagram data model: an open multigraph of spiders, H-boxes and
//! boundary vertices, with a global scalar.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::phase::Phase;
use crate::scalar::Scalar;

/// Vertex id. Ids are never reused within one diagram.
pub type V = usize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VertexKind {
    Z(Phase),
    X(Phase),
    /// H-box with a complex label; the default label is -1.
    H(Complex64),
    B,
}

impl VertexKind {
    pub fn is_spider(&self) -> bool {
        matches!(self, VertexKind::Z(_) | VertexKind::X(_))
    }

    pub fn phase(&self) -> Option<Phase> {
        match self {
            VertexKind::Z(p) | VertexKind::X(p) => Some(*p),
            _ => None,
        }
    }

    pub fn color(&self) -> Option<Color> {
        match self {
            VertexKind::Z(_) => Some(Color::Z),
            VertexKind::X(_) => Some(Color::X),
            _ => None,
        }
    }
}

/// Spider colour, used to write rules once for both colours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Z,
    X,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Z => Color::X,
            Color::X => Color::Z,
        }
    }

    pub fn spider(self, phase: Phase) -> VertexKind {
        match self {
            Color::Z => VertexKind::Z(phase),
            Color::X => VertexKind::X(phase),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Plain,
    Hadamard,
}

impl EdgeKind {
    pub fn toggled(self) -> EdgeKind {
        match self {
            EdgeKind::Plain => EdgeKind::Hadamard,
            EdgeKind::Hadamard => EdgeKind::Plain,
        }
    }

    /// Kind of the wire obtained by joining two wires end to end.
    pub fn then(self, other: EdgeKind) -> EdgeKind {
        if self == other {
            EdgeKind::Plain
        } else {
            EdgeKind::Hadamard
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Multiplicity {
    plain: usize,
    had: usize,
}

impl Multiplicity {
    fn get(&self, k: EdgeKind) -> usize {
        match k {
            EdgeKind::Plain => self.plain,
            EdgeKind::Hadamard => self.had,
        }
    }

    fn get_mut(&mut self, k: EdgeKind) -> &mut usize {
        match k {
            EdgeKind::Plain => &mut self.plain,
            EdgeKind::Hadamard => &mut self.had,
        }
    }

    fn total(&self) -> usize {
        self.plain + self.had
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagramError {
    #[error("arity violation: {0}")]
    Arity(String),
    #[error("H-boxes need the `zh` feature")]
    ZhDisabled,
    #[error("composition mismatch: {0} outputs against {1} inputs")]
    ComposeMismatch(usize, usize),
    #[error("malformed boundary {0}")]
    BadBoundary(V),
}

/// Generator names accepted by [`Diagram::make_generator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    ZSpider,
    XSpider,
    HBox,
    Identity,
    Swap,
    Cup,
    Cap,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    None,
    Phase(Phase),
    Label(Complex64),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagram {
    vertices: BTreeMap<V, VertexKind>,
    adj: BTreeMap<V, BTreeMap<V, Multiplicity>>,
    inputs: Vec<V>,
    outputs: Vec<V>,
    pub scalar: Scalar,
    next_id: V,
}

impl Diagram {
    pub fn new() -> Self {
        Diagram::default()
    }

    // ---- vertices ----

    pub fn add_vertex(&mut self, kind: VertexKind) -> V {
        let v = self.next_id;
        self.next_id += 1;
        self.vertices.insert(v, kind);
        self.adj.entry(v).or_default();
        v
    }

    /// Insert with a caller-chosen id (used when loading files).
    pub fn add_vertex_with_id(&mut self, v: V, kind: VertexKind) {
        self.vertices.insert(v, kind);
        self.adj.entry(v).or_default();
        self.next_id = self.next_id.max(v + 1);
    }

    /// Removes `v`, its edges, and any mention in the boundary lists.
    pub fn remove_vertex(&mut self, v: V) {
        self.vertices.remove(&v);
        if let Some(nbrs) = self.adj.remove(&v) {
            for w in nbrs.keys() {
                if let Some(m) = self.adj.get_mut(w) {
                    m.remove(&v);
                }
            }
        }
        self.inputs.retain(|&x| x != v);
        self.outputs.retain(|&x| x != v);
    }

    pub fn contains(&self, v: V) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn kind(&self, v: V) -> Option<VertexKind> {
        self.vertices.get(&v).copied()
    }

    pub fn set_kind(&mut self, v: V, kind: VertexKind) {
        if let Some(k) = self.vertices.get_mut(&v) {
            *k = kind;
        }
    }

    pub fn phase(&self, v: V) -> Option<Phase> {
        self.kind(v).and_then(|k| k.phase())
    }

    pub fn set_phase(&mut self, v: V, p: Phase) {
        match self.vertices.get_mut(&v) {
            Some(VertexKind::Z(q)) | Some(VertexKind::X(q)) => *q = p,
            _ => {}
        }
    }

    pub fn add_to_phase(&mut self, v: V, p: Phase) {
        if let Some(q) = self.phase(v) {
            self.set_phase(v, q + p);
        }
    }

    pub fn is_boundary(&self, v: V) -> bool {
        matches!(self.kind(v), Some(VertexKind::B))
    }

    pub fn is_spider(&self, v: V) -> bool {
        self.kind(v).is_some_and(|k| k.is_spider())
    }

    pub fn vertices(&self) -> impl Iterator<Item = (V, VertexKind)> + '_ {
        self.vertices.iter().map(|(&v, &k)| (v, k))
    }

    pub fn vertex_ids(&self) -> Vec<V> {
        self.vertices.keys().copied().collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn next_id(&self) -> V {
        self.next_id
    }

    // ---- edges ----

    pub fn add_edge(&mut self, a: V, b: V, kind: EdgeKind) {
        *self.adj.entry(a).or_default().entry(b).or_default().get_mut(kind) += 1;
        if a != b {
            *self.adj.entry(b).or_default().entry(a).or_default().get_mut(kind) += 1;
        }
    }

    /// Removes one edge of the given kind; returns false if there was none.
    pub fn remove_edge(&mut self, a: V, b: V, kind: EdgeKind) -> bool {
        let ok = match self.adj.get_mut(&a).and_then(|m| m.get_mut(&b)) {
            Some(m) if m.get(kind) > 0 => {
                *m.get_mut(kind) -= 1;
                if m.total() == 0 {
                    self.adj.get_mut(&a).unwrap().remove(&b);
                }
                true
            }
            _ => false,
        };
        if ok && a != b {
            let m = self.adj.get_mut(&b).unwrap().get_mut(&a).unwrap();
            *m.get_mut(kind) -= 1;
            if m.total() == 0 {
                self.adj.get_mut(&b).unwrap().remove(&a);
            }
        }
        ok
    }

    /// Removes every edge between `a` and `b`.
    pub fn remove_edges_between(&mut self, a: V, b: V) {
        if let Some(m) = self.adj.get_mut(&a) {
            m.remove(&b);
        }
        if let Some(m) = self.adj.get_mut(&b) {
            m.remove(&a);
        }
    }

    pub fn edge_count(&self, a: V, b: V, kind: EdgeKind) -> usize {
        self.adj.get(&a).and_then(|m| m.get(&b)).map_or(0, |m| m.get(kind))
    }

    pub fn connected(&self, a: V, b: V) -> bool {
        self.adj.get(&a).is_some_and(|m| m.contains_key(&b))
    }

    /// Adds a Hadamard edge, or removes one if present. Returns true if added.
    pub fn toggle_hadamard(&mut self, a: V, b: V) -> bool {
        if self.remove_edge(a, b, EdgeKind::Hadamard) {
            false
        } else {
            self.add_edge(a, b, EdgeKind::Hadamard);
            true
        }
    }

    /// Distinct neighbours in ascending order (includes `v` for self-loops).
    pub fn neighbors(&self, v: V) -> Vec<V> {
        self.adj.get(&v).map(|m| m.keys().copied().collect()).unwrap_or_default()
    }

    /// Incident edges, one entry per edge; a self-loop appears once.
    pub fn incident(&self, v: V) -> Vec<(V, EdgeKind)> {
        let mut out = Vec::new();
        if let Some(m) = self.adj.get(&v) {
            for (&w, mult) in m {
                for _ in 0..mult.plain {
                    out.push((w, EdgeKind::Plain));
                }
                for _ in 0..mult.had {
                    out.push((w, EdgeKind::Hadamard));
                }
            }
        }
        out
    }

    /// Number of edge ends at `v`; self-loops count twice.
    pub fn degree(&self, v: V) -> usize {
        self.adj.get(&v).map_or(0, |m| {
            m.iter().map(|(&w, mult)| if w == v { 2 * mult.total() } else { mult.total() }).sum()
        })
    }

    pub fn self_loops(&self, v: V, kind: EdgeKind) -> usize {
        self.edge_count(v, v, kind)
    }

    /// Every edge once, as `(a, b, kind)` with `a <= b`, in id order.
    pub fn edges(&self) -> Vec<(V, V, EdgeKind)> {
        let mut out = Vec::new();
        for (&a, m) in &self.adj {
            for (&b, mult) in m.range(a..) {
                for _ in 0..mult.plain {
                    out.push((a, b, EdgeKind::Plain));
                }
                for _ in 0..mult.had {
                    out.push((a, b, EdgeKind::Hadamard));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|(&a, m)| m.range(a..).map(|(_, mult)| mult.total()).sum::<usize>()).sum()
    }

    pub fn num_hadamard_edges(&self) -> usize {
        self.adj.iter().map(|(&a, m)| m.range(a..).map(|(_, mult)| mult.had).sum::<usize>()).sum()
    }

    // ---- boundaries ----

    pub fn inputs(&self) -> &[V] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[V] {
        &self.outputs
    }

    pub fn set_inputs(&mut self, inputs: Vec<V>) {
        self.inputs = inputs;
    }

    pub fn set_outputs(&mut self, outputs: Vec<V>) {
        self.outputs = outputs;
    }

    pub fn add_input(&mut self) -> V {
        let v = self.add_vertex(VertexKind::B);
        self.inputs.push(v);
        v
    }

    pub fn add_output(&mut self) -> V {
        let v = self.add_vertex(VertexKind::B);
        self.outputs.push(v);
        v
    }

    // ---- construction ----

    /// A single generator with fresh boundaries, inputs first.
    pub fn make_generator(gen: Generator, n_in: usize, n_out: usize, param: Param) -> Result<Diagram, DiagramError> {
        let fixed = |want_in: usize, want_out: usize, name: &str| {
            if (n_in, n_out) != (want_in, want_out) {
                Err(DiagramError::Arity(format!("{name} is {want_in}->{want_out}, got {n_in}->{n_out}")))
            } else {
                Ok(())
            }
        };
        let mut d = Diagram::new();
        match gen {
            Generator::ZSpider | Generator::XSpider | Generator::HBox => {
                let kind = match (gen, param) {
                    (Generator::ZSpider, Param::Phase(p)) => VertexKind::Z(p),
                    (Generator::ZSpider, Param::None) => VertexKind::Z(Phase::zero()),
                    (Generator::XSpider, Param::Phase(p)) => VertexKind::X(p),
                    (Generator::XSpider, Param::None) => VertexKind::X(Phase::zero()),
                    (Generator::HBox, _) if !cfg!(feature = "zh") => return Err(DiagramError::ZhDisabled),
                    (Generator::HBox, Param::Label(a)) => VertexKind::H(a),
                    (Generator::HBox, Param::None) => VertexKind::H(Complex64::new(-1.0, 0.0)),
                    _ => return Err(DiagramError::Arity(format!("bad parameter {param:?} for {gen:?}"))),
                };
                let ins: Vec<V> = (0..n_in).map(|_| d.add_input()).collect();
                let c = d.add_vertex(kind);
                let outs: Vec<V> = (0..n_out).map(|_| d.add_output()).collect();
                for b in ins.into_iter().chain(outs) {
                    d.add_edge(b, c, EdgeKind::Plain);
                }
            }
            Generator::Identity => {
                fixed(1, 1, "identity")?;
                let i = d.add_input();
                let o = d.add_output();
                d.add_edge(i, o, EdgeKind::Plain);
            }
            Generator::Swap => {
                fixed(2, 2, "swap")?;
                let i0 = d.add_input();
                let i1 = d.add_input();
                let o0 = d.add_output();
                let o1 = d.add_output();
                d.add_edge(i0, o1, EdgeKind::Plain);
                d.add_edge(i1, o0, EdgeKind::Plain);
            }
            Generator::Cup => {
                fixed(0, 2, "cup")?;
                let o0 = d.add_output();
                let o1 = d.add_output();
                d.add_edge(o0, o1, EdgeKind::Plain);
            }
            Generator::Cap => {
                fixed(2, 0, "cap")?;
                let i0 = d.add_input();
                let i1 = d.add_input();
                d.add_edge(i0, i1, EdgeKind::Plain);
            }
        }
        Ok(d)
    }

    pub fn z_spider(n_in: usize, n_out: usize, phase: Phase) -> Diagram {
        Diagram::make_generator(Generator::ZSpider, n_in, n_out, Param::Phase(phase)).unwrap()
    }

    pub fn x_spider(n_in: usize, n_out: usize, phase: Phase) -> Diagram {
        Diagram::make_generator(Generator::XSpider, n_in, n_out, Param::Phase(phase)).unwrap()
    }

    /// `n` parallel bare wires.
    pub fn identity(n: usize) -> Diagram {
        let mut d = Diagram::new();
        for _ in 0..n {
            d = d.tensor(&Diagram::make_generator(Generator::Identity, 1, 1, Param::None).unwrap());
        }
        d
    }

    /// `|b_0 b_1 ...>` as X(b pi) states, normalized.
    pub fn basis_state(bits: &[bool]) -> Diagram {
        let mut d = Diagram::new();
        for &b in bits {
            let v = d.add_vertex(VertexKind::X(if b { Phase::pi() } else { Phase::zero() }));
            let o = d.add_output();
            d.add_edge(v, o, EdgeKind::Plain);
        }
        d.scalar = Scalar::sqrt2_pow(-(bits.len() as i32));
        d
    }

    /// Copies `other` into `self` under fresh ids; returns the id map.
    fn absorb(&mut self, other: &Diagram) -> BTreeMap<V, V> {
        let map: BTreeMap<V, V> = other.vertices.iter().map(|(&v, &k)| (v, self.add_vertex(k))).collect();
        for (a, b, k) in other.edges() {
            self.add_edge(map[&a], map[&b], k);
        }
        map
    }

    /// The sole edge of a boundary vertex.
    fn boundary_edge(&self, b: V) -> Result<(V, EdgeKind), DiagramError> {
        let inc = self.incident(b);
        if inc.len() != 1 || inc[0].0 == b {
            return Err(DiagramError::BadBoundary(b));
        }
        Ok(inc[0])
    }

    /// Joins boundary `o` to boundary `i`, deleting both.
    fn glue(&mut self, o: V, i: V) -> Result<(), DiagramError> {
        let (no, ko) = self.boundary_edge(o)?;
        if no == i {
            // a closed loop: trace of the identity or of a Hadamard
            self.scalar *= match ko {
                EdgeKind::Plain => Scalar::from_complex(Complex64::new(2.0, 0.0)),
                EdgeKind::Hadamard => Scalar::zero(),
            };
            self.remove_vertex(o);
            self.remove_vertex(i);
            return Ok(());
        }
        let (ni, ki) = self.boundary_edge(i)?;
        self.remove_vertex(o);
        self.remove_vertex(i);
        self.add_edge(no, ni, ko.then(ki));
        Ok(())
    }

    /// Sequential composition: `self` first, then `second`.
    pub fn compose(&self, second: &Diagram) -> Result<Diagram, DiagramError> {
        if self.outputs.len() != second.inputs.len() {
            return Err(DiagramError::ComposeMismatch(self.outputs.len(), second.inputs.len()));
        }
        let mut d = self.clone();
        let map = d.absorb(second);
        let outs = std::mem::take(&mut d.outputs);
        let second_in: Vec<V> = second.inputs.iter().map(|v| map[v]).collect();
        let second_out: Vec<V> = second.outputs.iter().map(|v| map[v]).collect();
        for (o, i) in outs.into_iter().zip(second_in) {
            d.glue(o, i)?;
        }
        d.outputs = second_out;
        d.scalar *= second.scalar;
        Ok(d)
    }

    /// Parallel composition: `self` on top of `bottom`.
    pub fn tensor(&self, bottom: &Diagram) -> Diagram {
        let mut d = self.clone();
        let map = d.absorb(bottom);
        d.inputs.extend(bottom.inputs.iter().map(|v| map[v]));
        d.outputs.extend(bottom.outputs.iter().map(|v| map[v]));
        d.scalar *= bottom.scalar;
        d
    }

    /// Inputs become outputs and vice versa; every generator is symmetric.
    pub fn transpose(&self) -> Diagram {
        let mut d = self.clone();
        std::mem::swap(&mut d.inputs, &mut d.outputs);
        d
    }

    pub fn conjugate(&self) -> Diagram {
        let mut d = self.clone();
        for k in d.vertices.values_mut() {
            match k {
                VertexKind::Z(p) | VertexKind::X(p) => *p = -*p,
                VertexKind::H(a) => *a = a.conj(),
                VertexKind::B => {}
            }
        }
        d.scalar = d.scalar.conj();
        d
    }

    pub fn adjoint(&self) -> Diagram {
        self.transpose().conjugate()
    }

    /// Checks the structural invariants; an empty report means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (&a, m) in &self.adj {
            for &b in m.keys() {
                if (!self.vertices.contains_key(&a) || !self.vertices.contains_key(&b))
                    && (a <= b || !self.adj.contains_key(&b)) {
                        out.push(Violation::new(ViolationKind::DanglingEdge, format!("edge {a}-{b}")));
                    }
            }
        }
        let mut listed: BTreeMap<V, usize> = BTreeMap::new();
        for &v in self.inputs.iter().chain(&self.outputs) {
            *listed.entry(v).or_default() += 1;
        }
        for (&v, &n) in &listed {
            if n > 1 {
                out.push(Violation::new(ViolationKind::BoundaryListedTwice, format!("vertex {v}")));
            }
            if !self.is_boundary(v) {
                out.push(Violation::new(ViolationKind::NotABoundary, format!("vertex {v}")));
            }
        }
        for (&v, k) in &self.vertices {
            match k {
                VertexKind::B => {
                    if self.degree(v) != 1 {
                        out.push(Violation::new(ViolationKind::BoundaryDegree, format!("vertex {v} has degree {}", self.degree(v))));
                    }
                    if !listed.contains_key(&v) {
                        out.push(Violation::new(ViolationKind::UnlistedBoundary, format!("vertex {v}")));
                    }
                }
                VertexKind::H(_)
                    if self.edge_count(v, v, EdgeKind::Plain) + self.edge_count(v, v, EdgeKind::Hadamard) > 0 => {
                        out.push(Violation::new(ViolationKind::SelfLoop, format!("H-box {v}")));
                    }
                _ => {}
            }
        }
        out
    }

    /// Edge-list view used for structural comparisons in tests.
    pub fn is_isomorphic_by_id(&self, other: &Diagram) -> bool {
        self.vertices == other.vertices
            && self.edges() == other.edges()
            && self.inputs == other.inputs
            && self.outputs == other.outputs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    BoundaryDegree,
    DanglingEdge,
    UnlistedBoundary,
    BoundaryListedTwice,
    NotABoundary,
    SelfLoop,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::BoundaryDegree => "boundary degree",
            ViolationKind::DanglingEdge => "dangling edge",
            ViolationKind::UnlistedBoundary => "unlisted boundary",
            ViolationKind::BoundaryListedTwice => "boundary listed twice",
            ViolationKind::NotABoundary => "listed vertex is not a boundary",
            ViolationKind::SelfLoop => "self-loop on non-spider",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, detail: String) -> Self {
        Violation { kind, detail }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.detail)
    }
}
