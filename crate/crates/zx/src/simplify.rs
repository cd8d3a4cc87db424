//! Graph-like diagrams and Clifford simplification: local complementation,
//! pivoting, full reduction, amplitudes and graph-state normal forms.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::circuit::{circuit_to_diagram, Circuit, ToffoliMode};
use crate::diagram::{Diagram, EdgeKind, VertexKind, V};
use crate::phase::Phase;
use crate::rules::{self, bind, ensure, fail, has_loops, Match, RewriteStep, Rule, RuleError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimplifyError {
    #[error("not graph-like: {0}")]
    NotGraphLike(String),
    #[error("H-box {0} cannot be expressed as a Hadamard edge")]
    ZhPresent(V),
    #[error("vertex {0} has non-Clifford phase {1}")]
    NonClifford(V, Phase),
    #[error("{0} internal spiders remain")]
    InternalSpiders(usize),
    #[error("expected a state (no inputs)")]
    NotAState,
}

/// A diagram known to satisfy the graph-like invariants: only Z spiders and
/// boundaries, single Hadamard edges between spiders, no self-loops, and
/// every boundary attached to one spider.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphLikeView {
    diagram: Diagram,
}

impl GraphLikeView {
    pub fn new(d: Diagram) -> Result<Self, SimplifyError> {
        check_graph_like(&d)?;
        Ok(GraphLikeView { diagram: d })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn into_diagram(self) -> Diagram {
        self.diagram
    }

    /// Spiders with no boundary neighbour.
    pub fn internal_spiders(&self) -> Vec<V> {
        internal_spiders(&self.diagram)
    }

    /// Boundary id to the spider it attaches to.
    pub fn attachments(&self) -> BTreeMap<V, V> {
        let d = &self.diagram;
        d.inputs().iter().chain(d.outputs()).map(|&b| (b, d.neighbors(b)[0])).collect()
    }

    pub fn phases(&self) -> BTreeMap<V, Phase> {
        self.diagram.vertices().filter_map(|(v, k)| k.phase().map(|p| (v, p))).collect()
    }

    /// Spider-to-spider adjacency (all Hadamard).
    pub fn adjacency(&self) -> BTreeMap<V, BTreeSet<V>> {
        let d = &self.diagram;
        d.vertices()
            .filter(|(_, k)| k.is_spider())
            .map(|(v, _)| (v, d.neighbors(v).into_iter().filter(|&w| d.is_spider(w)).collect()))
            .collect()
    }
}

pub fn check_graph_like(d: &Diagram) -> Result<(), SimplifyError> {
    let bad = |m: String| Err(SimplifyError::NotGraphLike(m));
    for (v, k) in d.vertices() {
        match k {
            VertexKind::Z(_) => {}
            VertexKind::B => {
                let n = d.neighbors(v);
                if n.len() != 1 || !d.is_spider(n[0]) {
                    return bad(format!("boundary {v} is not attached to a spider"));
                }
            }
            VertexKind::X(_) => return bad(format!("X spider {v}")),
            VertexKind::H(_) => return bad(format!("H-box {v}")),
        }
        if has_loops(d, v) {
            return bad(format!("self-loop on {v}"));
        }
    }
    for (a, b, k) in d.edges() {
        if d.is_spider(a) && d.is_spider(b) && (k != EdgeKind::Hadamard || d.edge_count(a, b, k) > 1) {
            return bad(format!("edge {a}-{b} is not a single Hadamard edge"));
        }
    }
    Ok(())
}

pub fn internal_spiders(d: &Diagram) -> Vec<V> {
    d.vertices()
        .filter(|(v, k)| k.is_spider() && !d.neighbors(*v).iter().any(|&w| d.is_boundary(w)))
        .map(|(v, _)| v)
        .collect()
}

/// A Z spider whose every edge is a single Hadamard edge to another Z
/// spider, i.e. one that lc and pivot can act on.
fn graph_vertex(d: &Diagram, v: V) -> bool {
    if !matches!(d.kind(v), Some(VertexKind::Z(_))) || has_loops(d, v) {
        return false;
    }
    let inc = d.incident(v);
    inc.len() == d.neighbors(v).len()
        && inc.iter().all(|&(w, k)| k == EdgeKind::Hadamard && matches!(d.kind(w), Some(VertexKind::Z(_))))
}

/// Neighbour pairs may only share single Hadamard edges.
fn simple_among(d: &Diagram, vs: &[V]) -> bool {
    vs.iter().enumerate().all(|(i, &a)| {
        vs[i + 1..].iter().all(|&b| d.edge_count(a, b, EdgeKind::Plain) == 0 && d.edge_count(a, b, EdgeKind::Hadamard) <= 1)
    })
}

fn toggle(d: &mut Diagram, a: V, b: V) -> Scalar {
    Scalar::sqrt2_pow(if d.toggle_hadamard(a, b) { 1 } else { -1 })
}

fn lc_candidate(d: &Diagram, v: V) -> bool {
    graph_vertex(d, v) && d.phase(v).unwrap().is_proper_clifford()
}

fn pivot_candidate(d: &Diagram, u: V) -> bool {
    graph_vertex(d, u) && d.phase(u).unwrap().is_pauli()
}

fn apply_lc(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [v] = bind(d, m)?;
    ensure(m.rule, lc_candidate(d, v), "needs an internal graph-like spider with phase +-pi/2")?;
    let ns = d.neighbors(v);
    ensure(m.rule, simple_among(d, &ns), "neighbourhood is not a simple graph")?;
    let alpha = d.phase(v).unwrap();
    let quarter = if alpha == Phase::new(1, 2) { Phase::new(1, 4) } else { Phase::new(-1, 4) };
    let mut corr = Scalar::sqrt2_pow(1 - ns.len() as i32) * Scalar::phase(quarter);
    d.remove_vertex(v);
    for (i, &a) in ns.iter().enumerate() {
        for &b in &ns[i + 1..] {
            corr *= toggle(d, a, b);
        }
        d.add_to_phase(a, -alpha);
    }
    Ok(corr)
}

fn apply_pivot(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [u, v] = bind(d, m)?;
    let r = m.rule;
    ensure(r, u != v && pivot_candidate(d, u) && pivot_candidate(d, v), "needs two internal Pauli spiders")?;
    ensure(r, d.connected(u, v), "spiders must be adjacent")?;
    let nu: BTreeSet<V> = d.neighbors(u).into_iter().filter(|&w| w != v).collect();
    let nv: BTreeSet<V> = d.neighbors(v).into_iter().filter(|&w| w != u).collect();
    let a: Vec<V> = nu.difference(&nv).copied().collect();
    let b: Vec<V> = nv.difference(&nu).copied().collect();
    let c: Vec<V> = nu.intersection(&nv).copied().collect();
    let all: Vec<V> = nu.union(&nv).copied().collect();
    ensure(r, simple_among(d, &all), "neighbourhood is not a simple graph")?;
    let pa = d.phase(u).unwrap();
    let pb = d.phase(v).unwrap();
    let both_pi = !pa.is_zero() && !pb.is_zero();
    let removed = (a.len() + b.len() + 2 * c.len() + 1) as i32;
    let mut corr = Scalar::sqrt2_pow(2 - removed);
    if both_pi {
        corr *= Complex64::new(-1.0, 0.0);
    }
    d.remove_vertex(u);
    d.remove_vertex(v);
    for (x, y) in [(&a, &b), (&a, &c), (&b, &c)] {
        for &p in x.iter() {
            for &q in y.iter() {
                corr *= toggle(d, p, q);
            }
        }
    }
    for &w in &a {
        d.add_to_phase(w, pb);
    }
    for &w in &b {
        d.add_to_phase(w, pa);
    }
    for &w in &c {
        d.add_to_phase(w, pa + pb + Phase::pi());
    }
    Ok(corr)
}

/// Detaches `v` from its boundaries with identity spiders, then removes
/// `u` and `v` by a pivot (Pauli `v`) or two local complementations.
fn apply_boundary_pivot(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [u, v] = bind(d, m)?;
    let r = m.rule;
    ensure(r, pivot_candidate(d, u), "first vertex must be an internal Pauli spider")?;
    ensure(r, d.connected(u, v) && u != v, "spiders must be adjacent")?;
    ensure(r, matches!(d.kind(v), Some(VertexKind::Z(p)) if p.is_clifford()), "second vertex must be a Clifford Z spider")?;
    let bs: Vec<V> = d.neighbors(v).into_iter().filter(|&w| d.is_boundary(w)).collect();
    ensure(r, !bs.is_empty(), "second vertex is not on the boundary")?;
    let mut work = d.clone();
    let mut corr = Scalar::one();
    for b in bs {
        rules::apply(&mut work, &Match::new(Rule::InsertIdentity, vec![v, b]))?;
    }
    let inner = |w: &mut Diagram, m: Match| -> Result<Scalar, RuleError> {
        let s = match m.rule {
            Rule::Pivot => apply_pivot(w, &m)?,
            _ => apply_lc(w, &m)?,
        };
        w.scalar *= s;
        Ok(s)
    };
    if work.phase(v).unwrap().is_pauli() {
        corr *= inner(&mut work, Match::new(Rule::Pivot, vec![u, v]))?;
    } else {
        corr *= inner(&mut work, Match::new(Rule::LocalComplement, vec![v]))?;
        corr *= inner(&mut work, Match::new(Rule::LocalComplement, vec![u]))?;
    }
    // the caller multiplies the correction in again
    work.scalar = d.scalar;
    *d = work;
    Ok(corr)
}

pub(crate) fn apply_rule(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    match m.rule {
        Rule::LocalComplement => apply_lc(d, m),
        Rule::Pivot => apply_pivot(d, m),
        Rule::BoundaryPivot => apply_boundary_pivot(d, m),
        r => fail(r, "not a graph-like rule"),
    }
}

fn boundary_pivot_target(d: &Diagram, u: V) -> Option<V> {
    d.neighbors(u).into_iter().find(|&v| {
        matches!(d.kind(v), Some(VertexKind::Z(p)) if p.is_clifford())
            && !has_loops(d, v)
            && d.neighbors(v).iter().any(|&w| d.is_boundary(w))
            && d.incident(v).iter().all(|&(w, k)| d.is_boundary(w) || (k == EdgeKind::Hadamard && d.is_spider(w)))
            && d.incident(v).len() == d.neighbors(v).len()
    })
}

pub(crate) fn find(rule: Rule, d: &Diagram) -> Vec<Match> {
    let ids = d.vertex_ids();
    match rule {
        Rule::LocalComplement => {
            ids.into_iter().filter(|&v| lc_candidate(d, v)).map(|v| Match::new(rule, vec![v])).collect()
        }
        Rule::Pivot => {
            let mut out = Vec::new();
            for u in ids {
                if pivot_candidate(d, u) {
                    for v in d.neighbors(u) {
                        if v > u && pivot_candidate(d, v) {
                            out.push(Match::new(rule, vec![u, v]));
                        }
                    }
                }
            }
            out
        }
        Rule::BoundaryPivot => ids
            .into_iter()
            .filter(|&u| pivot_candidate(d, u))
            .filter_map(|u| boundary_pivot_target(d, u).map(|v| Match::new(rule, vec![u, v])))
            .collect(),
        _ => Vec::new(),
    }
}

fn sweep(d: &mut Diagram, rule: Rule, trace: &mut Vec<RewriteStep>) -> usize {
    let mut n = 0;
    for m in rules::find(rule, d) {
        if let Ok(step) = rules::apply(d, &m) {
            trace.push(step);
            n += 1;
        }
    }
    n
}

/// Repeats `sweep` until the rule no longer applies.
fn exhaust(d: &mut Diagram, rule: Rule, trace: &mut Vec<RewriteStep>) -> usize {
    let mut total = 0;
    loop {
        let n = sweep(d, rule, trace);
        if n == 0 {
            return total;
        }
        total += n;
    }
}

/// Graph-like conversion in place; what cannot be converted (labelled
/// H-boxes) is left alone.
fn graph_like_in_place(d: &mut Diagram) -> Vec<RewriteStep> {
    let mut trace = Vec::new();
    for (v, k) in d.vertices().collect::<Vec<_>>() {
        if let VertexKind::X(_) = k {
            trace.push(rules::apply(d, &Match::new(Rule::ColorChange, vec![v])).expect("spider"));
        }
    }
    exhaust(d, Rule::CancelHH, &mut trace);
    exhaust(d, Rule::HBoxToEdge, &mut trace);
    loop {
        let n = exhaust(d, Rule::Fusion, &mut trace)
            + exhaust(d, Rule::RemoveSelfLoop, &mut trace)
            + exhaust(d, Rule::Hopf, &mut trace);
        if n == 0 {
            break;
        }
    }
    let boundaries: Vec<V> = d.inputs().iter().chain(d.outputs()).copied().collect();
    for b in boundaries {
        let a = d.neighbors(b)[0];
        if d.is_boundary(a) {
            trace.push(rules::apply(d, &Match::new(Rule::InsertIdentity, vec![a, b])).expect("boundary pair"));
        }
    }
    exhaust(d, Rule::AbsorbScalar, &mut trace);
    trace
}

/// Converts a ZX diagram into graph-like form, preserving its value.
pub fn to_graph_like(d: &Diagram) -> Result<(GraphLikeView, Vec<RewriteStep>), SimplifyError> {
    let mut d = d.clone();
    let trace = graph_like_in_place(&mut d);
    if let Some((v, _)) = d.vertices().find(|(_, k)| matches!(k, VertexKind::H(_))) {
        return Err(SimplifyError::ZhPresent(v));
    }
    Ok((GraphLikeView::new(d)?, trace))
}

/// Graph-like conversion followed by local complementation, pivoting and
/// boundary pivoting to a fixpoint, then phase-gadget fusion. Works in
/// place and returns the trace.
pub fn full_reduce(d: &mut Diagram) -> Vec<RewriteStep> {
    let mut trace = graph_like_in_place(d);
    let budget = 10 * d.num_vertices() + 100;
    for _ in 0..budget {
        let mut n = exhaust(d, Rule::LocalComplement, &mut trace) + exhaust(d, Rule::Pivot, &mut trace);
        if n == 0 {
            if let Some(m) = find(Rule::BoundaryPivot, d).into_iter().next() {
                if let Ok(step) = rules::apply(d, &m) {
                    trace.push(step);
                    n += 1;
                }
            }
        }
        n += exhaust(d, Rule::FusePhaseGadgets, &mut trace);
        n += exhaust(d, Rule::AbsorbScalar, &mut trace);
        if n == 0 {
            break;
        }
    }
    trace
}

/// [`full_reduce`] on a copy, returning the graph-like result.
pub fn full_reduce_view(d: &Diagram) -> Result<(GraphLikeView, Vec<RewriteStep>), SimplifyError> {
    let mut d = d.clone();
    let trace = full_reduce(&mut d);
    if let Some((v, _)) = d.vertices().find(|(_, k)| matches!(k, VertexKind::H(_))) {
        return Err(SimplifyError::ZhPresent(v));
    }
    Ok((GraphLikeView::new(d)?, trace))
}

fn first_non_clifford(d: &Diagram) -> Option<(V, Phase)> {
    d.vertices().find_map(|(v, k)| k.phase().filter(|p| !p.is_clifford()).map(|p| (v, p)))
}

/// `<output| c |input>` for a Clifford circuit, computed by reducing the
/// closed diagram to a scalar.
pub fn clifford_amplitude(c: &Circuit, input: &[bool], output: &[bool]) -> Result<Complex64, SimplifyError> {
    assert_eq!(input.len(), c.qubits, "input bitstring length");
    assert_eq!(output.len(), c.qubits, "output bitstring length");
    let body = circuit_to_diagram(c, ToffoliMode::Gadgets);
    if let Some((v, p)) = first_non_clifford(&body) {
        return Err(SimplifyError::NonClifford(v, p));
    }
    let d = Diagram::basis_state(input)
        .compose(&body)
        .and_then(|d| d.compose(&Diagram::basis_state(output).transpose()))
        .expect("widths match");
    let mut d = d;
    full_reduce(&mut d);
    if d.num_vertices() == 0 {
        return Ok(d.scalar.value());
    }
    let left = internal_spiders(&d).len();
    log::debug!("amplitude residue of {} vertices, contracting densely", d.num_vertices());
    crate::tensor::evaluate(&d).map(|t| t.data[0]).map_err(|_| SimplifyError::InternalSpiders(left))
}

/// Local Clifford on one output of a graph state: the spider phase, then
/// a Hadamard if the output wire carries one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalClifford {
    pub phase: Phase,
    pub hadamard: bool,
}

/// A Clifford state as a graph state with local Cliffords.
#[derive(Clone, Debug, PartialEq)]
pub struct Gslc {
    pub qubits: usize,
    /// Graph edges between qubits, `a < b`.
    pub edges: Vec<(usize, usize)>,
    pub local: Vec<LocalClifford>,
    pub scalar: Scalar,
}

impl Gslc {
    /// Rebuilds the state diagram: one Z spider per qubit.
    pub fn to_diagram(&self) -> Diagram {
        let mut d = Diagram::new();
        let vs: Vec<V> = self.local.iter().map(|lc| d.add_vertex(VertexKind::Z(lc.phase))).collect();
        for &(a, b) in &self.edges {
            d.add_edge(vs[a], vs[b], EdgeKind::Hadamard);
        }
        for (i, lc) in self.local.iter().enumerate() {
            let o = d.add_output();
            d.add_edge(vs[i], o, if lc.hadamard { EdgeKind::Hadamard } else { EdgeKind::Plain });
        }
        d.scalar = self.scalar;
        d
    }
}

pub fn gslc_form(state: &Diagram) -> Result<Gslc, SimplifyError> {
    if !state.inputs().is_empty() {
        return Err(SimplifyError::NotAState);
    }
    if let Some((v, p)) = first_non_clifford(state) {
        return Err(SimplifyError::NonClifford(v, p));
    }
    let (g, _) = full_reduce_view(state)?;
    let mut d = g.into_diagram();
    let left = internal_spiders(&d);
    if !left.is_empty() {
        return Err(SimplifyError::InternalSpiders(left.len()));
    }
    // one spider per output
    let mut owner: BTreeMap<V, usize> = BTreeMap::new();
    for (i, b) in d.outputs().to_vec().into_iter().enumerate() {
        let v = d.neighbors(b)[0];
        if owner.contains_key(&v) {
            let before = d.next_id();
            rules::apply(&mut d, &Match::new(Rule::InsertIdentity, vec![v, b])).expect("boundary edge");
            owner.insert(before, i);
        } else {
            owner.insert(v, i);
        }
    }
    let n = d.outputs().len();
    let mut local = vec![LocalClifford { phase: Phase::zero(), hadamard: false }; n];
    let mut edges = Vec::new();
    for (&v, &i) in &owner {
        let b = d.outputs()[i];
        local[i] = LocalClifford {
            phase: d.phase(v).unwrap(),
            hadamard: d.edge_count(v, b, EdgeKind::Hadamard) == 1,
        };
        for w in d.neighbors(v) {
            if let Some(&j) = owner.get(&w) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(Gslc { qubits: n, edges, local, scalar: d.scalar })
}
