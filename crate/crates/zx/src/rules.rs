//! Local rewrite rules with exact scalar bookkeeping, the match/apply
//! engine, trace replay, and rewrite strategies.
//!
//! Every rule is written once in terms of a spider colour `c` and its
//! opposite, so the colour-swapped variants come for free.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagram::{Color, Diagram, EdgeKind, VertexKind, V};
use crate::phase::Phase;
use crate::scalar::Scalar;

macro_rules! rules {
    ($($variant:ident => $name:literal,)*) => {
        /// Every rewrite the engine knows, addressable by name in traces.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Rule { $($variant,)* }

        impl Rule {
            pub const ALL: &'static [Rule] = &[$(Rule::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(Rule::$variant => $name,)* }
            }
        }

        impl FromStr for Rule {
            type Err = String;
            fn from_str(s: &str) -> Result<Rule, String> {
                match s {
                    $($name => Ok(Rule::$variant),)*
                    _ => Err(format!("unknown rule {s:?}")),
                }
            }
        }
    };
}

rules! {
    Fusion => "fusion",
    RemoveIdentity => "remove_identity",
    RemoveSelfLoop => "remove_self_loop",
    CancelHH => "cancel_hh",
    HBoxToEdge => "hbox_to_edge",
    PiCopy => "pi_copy",
    StateCopy => "state_copy",
    ColorChange => "color_change",
    Bialgebra => "bialgebra",
    Hopf => "hopf",
    FusePhaseGadgets => "fuse_phase_gadgets",
    EulerHadamardEdge => "euler_hadamard_edge",
    EulerHadamardBox => "euler_hadamard_box",
    AbsorbScalar => "absorb_scalar",
    InsertIdentity => "insert_identity",
    LocalComplement => "lc_simp",
    Pivot => "pivot_simp",
    BoundaryPivot => "boundary_pivot",
    HBoxFusion => "fuse_hbox",
    AbsorbOne => "absorb_one",
    ExplodeZero => "explode_zero",
    ZhBialgebra => "zh_bialgebra",
    UnitDecompose => "unit_decompose",
    MultiplyHBoxes => "multiply_hboxes",
    AverageHBoxes => "average_hboxes",
    Intro => "intro_rule",
    CczDecompose => "ccz_decompose",
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Rule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Rule, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A rule bound to concrete vertex ids. The meaning of each position is
/// fixed per rule (documented on the matcher).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub rule: Rule,
    pub vertices: Vec<V>,
}

impl Match {
    pub fn new(rule: Rule, vertices: Vec<V>) -> Self {
        Match { rule, vertices }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub vertices: i64,
    pub edges: i64,
}

/// One applied rewrite, as recorded in a trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub rule: Rule,
    pub vertices: Vec<V>,
    /// Factor multiplied into the diagram scalar, `[re, im]`.
    pub scalar: [f64; 2],
    pub delta: Delta,
}

impl RewriteStep {
    pub fn as_match(&self) -> Match {
        Match::new(self.rule, self.vertices.clone())
    }

    pub fn correction(&self) -> Complex64 {
        Complex64::new(self.scalar[0], self.scalar[1])
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RuleError {
    #[error("{0}: match is stale (vertex {1} is gone)")]
    Stale(Rule, V),
    #[error("{0}: {1}")]
    Precondition(Rule, String),
    #[error("{0}: expected {1} vertex ids, got {2}")]
    Shape(Rule, usize, usize),
}

pub(crate) fn fail<T>(rule: Rule, msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::Precondition(rule, msg.into()))
}

pub(crate) fn ensure(rule: Rule, cond: bool, msg: &str) -> Result<(), RuleError> {
    if cond {
        Ok(())
    } else {
        fail(rule, msg)
    }
}

/// Checks arity and liveness of a match.
pub(crate) fn bind<const N: usize>(d: &Diagram, m: &Match) -> Result<[V; N], RuleError> {
    let vs: [V; N] = m.vertices.clone().try_into().map_err(|_| RuleError::Shape(m.rule, N, m.vertices.len()))?;
    if let Some(&v) = vs.iter().find(|&&v| !d.contains(v)) {
        return Err(RuleError::Stale(m.rule, v));
    }
    Ok(vs)
}

pub(crate) fn color_of(d: &Diagram, v: V) -> Option<Color> {
    d.kind(v).and_then(|k| k.color())
}

pub(crate) fn has_loops(d: &Diagram, v: V) -> bool {
    d.connected(v, v)
}

/// Incident edges of `v` with one edge `(w, kind)` taken out.
pub(crate) fn incident_without(d: &Diagram, v: V, w: V, kind: EdgeKind) -> Vec<(V, EdgeKind)> {
    let mut inc = d.incident(v);
    if let Some(i) = inc.iter().position(|&e| e == (w, kind)) {
        inc.remove(i);
    }
    inc
}

pub(crate) fn minus_one() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

pub(crate) fn is_hadamard_box(k: Option<VertexKind>) -> bool {
    matches!(k, Some(VertexKind::H(a)) if (a - minus_one()).norm() < 1e-12)
}

// ---- matchers ----

/// `[u, v]`, `u < v`: same-colour spiders joined by a plain edge.
fn find_fusion(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for u in d.vertex_ids() {
        let Some(c) = color_of(d, u) else { continue };
        for v in d.neighbors(u) {
            if v > u && color_of(d, v) == Some(c) && d.edge_count(u, v, EdgeKind::Plain) > 0 {
                out.push(Match::new(Rule::Fusion, vec![u, v]));
            }
        }
    }
    out
}

fn find_by_vertex(d: &Diagram, rule: Rule, pred: impl Fn(&Diagram, V) -> bool) -> Vec<Match> {
    d.vertex_ids().into_iter().filter(|&v| pred(d, v)).map(|v| Match::new(rule, vec![v])).collect()
}

fn identity_ok(d: &Diagram, v: V) -> bool {
    if !d.is_spider(v) || !d.phase(v).unwrap().is_zero() || d.degree(v) != 2 || has_loops(d, v) {
        return false;
    }
    let inc = d.incident(v);
    inc[0].0 != inc[1].0 || d.is_spider(inc[0].0)
}

fn hbox_to_edge_ok(d: &Diagram, h: V) -> bool {
    if !is_hadamard_box(d.kind(h)) || d.degree(h) != 2 || has_loops(d, h) {
        return false;
    }
    let inc = d.incident(h);
    inc[0].0 != inc[1].0 || d.is_spider(inc[0].0)
}

/// `[h1, h2]`: two arity-2 Hadamard boxes joined by exactly one edge.
fn find_cancel_hh(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for h1 in d.vertex_ids() {
        if !hbox_to_edge_ok(d, h1) {
            continue;
        }
        for h2 in d.neighbors(h1) {
            if h2 > h1 && hbox_to_edge_ok(d, h2) && d.incident(h1).iter().filter(|e| e.0 == h2).count() == 1 {
                let a = d.incident(h1).into_iter().find(|e| e.0 != h2).unwrap().0;
                let b = d.incident(h2).into_iter().find(|e| e.0 != h1).unwrap().0;
                if a != b || d.is_spider(a) {
                    out.push(Match::new(Rule::CancelHH, vec![h1, h2]));
                }
            }
        }
    }
    out
}

/// `[x, z]`: an arity-2 pi spider plainly attached to a spider of the other
/// colour with no self-loops.
fn find_pi_copy(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for x in d.vertex_ids() {
        let Some(c) = color_of(d, x) else { continue };
        if d.phase(x) != Some(Phase::pi()) || d.degree(x) != 2 || has_loops(d, x) {
            continue;
        }
        for z in d.neighbors(x) {
            if color_of(d, z) == Some(c.other())
                && d.edge_count(x, z, EdgeKind::Plain) > 0
                && d.incident(x).iter().any(|e| e.0 != z)
                && !has_loops(d, z)
            {
                out.push(Match::new(Rule::PiCopy, vec![x, z]));
            }
        }
    }
    out
}

/// `[s, z]`: a Pauli-phase arity-1 spider plainly attached to a spider of
/// the other colour with no self-loops.
fn find_state_copy(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for s in d.vertex_ids() {
        let Some(c) = color_of(d, s) else { continue };
        if !d.phase(s).unwrap().is_pauli() || d.degree(s) != 1 {
            continue;
        }
        let (z, k) = d.incident(s)[0];
        if k == EdgeKind::Plain && color_of(d, z) == Some(c.other()) && !has_loops(d, z) {
            out.push(Match::new(Rule::StateCopy, vec![s, z]));
        }
    }
    out
}

/// `[z, x]`: phase-0 spiders of opposite colours joined by exactly one edge,
/// which is plain.
fn find_bialgebra(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for z in d.vertex_ids() {
        let Some(c) = color_of(d, z) else { continue };
        if !d.phase(z).unwrap().is_zero() || has_loops(d, z) {
            continue;
        }
        for x in d.neighbors(z) {
            if x > z
                && color_of(d, x) == Some(c.other())
                && d.phase(x).unwrap().is_zero()
                && !has_loops(d, x)
                && d.edge_count(z, x, EdgeKind::Plain) == 1
                && d.edge_count(z, x, EdgeKind::Hadamard) == 0
            {
                out.push(Match::new(Rule::Bialgebra, vec![z, x]));
            }
        }
    }
    out
}

fn hopf_kind(d: &Diagram, u: V, v: V) -> Option<EdgeKind> {
    let (cu, cv) = (color_of(d, u)?, color_of(d, v)?);
    let k = if cu == cv { EdgeKind::Hadamard } else { EdgeKind::Plain };
    (u != v && d.edge_count(u, v, k) >= 2).then_some(k)
}

/// `[u, v]`, `u < v`: two spiders with a pair of parallel edges that cancel.
fn find_hopf(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for u in d.vertex_ids() {
        for v in d.neighbors(u) {
            if v > u && hopf_kind(d, u, v).is_some() {
                out.push(Match::new(Rule::Hopf, vec![u, v]));
            }
        }
    }
    out
}

/// A phase gadget: hub, leaf, hub phase class, target set.
#[derive(Clone, Debug)]
struct Gadget {
    hub: V,
    leaf: V,
    targets: Vec<V>,
}

fn gadget_at(d: &Diagram, hub: V) -> Option<Gadget> {
    let c = color_of(d, hub)?;
    if !d.phase(hub)?.is_pauli() || has_loops(d, hub) {
        return None;
    }
    let kind = if c == Color::X { EdgeKind::Plain } else { EdgeKind::Hadamard };
    let inc = d.incident(hub);
    if inc.iter().any(|&(w, k)| k != kind || color_of(d, w) != Some(Color::Z)) {
        return None;
    }
    let nbrs = d.neighbors(hub);
    if nbrs.len() != inc.len() {
        return None;
    }
    let leaf = *nbrs.iter().find(|&&w| d.degree(w) == 1)?;
    let targets: Vec<V> = nbrs.into_iter().filter(|&w| w != leaf).collect();
    (!targets.is_empty()).then_some(Gadget { hub, leaf, targets })
}

/// `[hub1, leaf1, hub2, leaf2]`: two phase gadgets on the same targets.
fn find_fuse_phase_gadgets(d: &Diagram) -> Vec<Match> {
    let mut groups: BTreeMap<Vec<V>, Vec<Gadget>> = BTreeMap::new();
    for v in d.vertex_ids() {
        if let Some(g) = gadget_at(d, v) {
            groups.entry(g.targets.clone()).or_default().push(g);
        }
    }
    let mut out = Vec::new();
    for gs in groups.values() {
        for pair in gs.windows(2) {
            out.push(Match::new(Rule::FusePhaseGadgets, vec![pair[0].hub, pair[0].leaf, pair[1].hub, pair[1].leaf]));
        }
    }
    out
}

/// `[a, b]`, `a <= b`: one Hadamard edge.
fn find_euler_edge(d: &Diagram) -> Vec<Match> {
    let mut out: Vec<Match> = d
        .edges()
        .into_iter()
        .filter(|e| e.2 == EdgeKind::Hadamard)
        .map(|(a, b, _)| Match::new(Rule::EulerHadamardEdge, vec![a, b]))
        .collect();
    out.dedup();
    out
}

/// `[a, b]`: `b` is a boundary, `a` its neighbour.
fn find_insert_identity(d: &Diagram) -> Vec<Match> {
    d.inputs()
        .iter()
        .chain(d.outputs())
        .filter_map(|&b| d.incident(b).first().map(|&(a, _)| Match::new(Rule::InsertIdentity, vec![a, b])))
        .collect()
}

/// All current matches of `rule`, in ascending id order.
pub fn find(rule: Rule, d: &Diagram) -> Vec<Match> {
    match rule {
        Rule::Fusion => find_fusion(d),
        Rule::RemoveIdentity => find_by_vertex(d, rule, identity_ok),
        Rule::RemoveSelfLoop => find_by_vertex(d, rule, |d, v| d.is_spider(v) && has_loops(d, v)),
        Rule::CancelHH => find_cancel_hh(d),
        Rule::HBoxToEdge => find_by_vertex(d, rule, hbox_to_edge_ok),
        Rule::PiCopy => find_pi_copy(d),
        Rule::StateCopy => find_state_copy(d),
        Rule::ColorChange => find_by_vertex(d, rule, |d, v| d.is_spider(v)),
        Rule::Bialgebra => find_bialgebra(d),
        Rule::Hopf => find_hopf(d),
        Rule::FusePhaseGadgets => find_fuse_phase_gadgets(d),
        Rule::EulerHadamardEdge => find_euler_edge(d),
        Rule::EulerHadamardBox => find_by_vertex(d, rule, hbox_to_edge_ok),
        Rule::AbsorbScalar => {
            find_by_vertex(d, rule, |d, v| d.degree(v) == 0 && !d.is_boundary(v))
        }
        Rule::InsertIdentity => find_insert_identity(d),
        Rule::LocalComplement | Rule::Pivot | Rule::BoundaryPivot => crate::simplify::find(rule, d),
        _ => crate::zh::find(rule, d),
    }
}

// ---- appliers; each checks everything before mutating ----

fn apply_fusion(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [u, v] = bind(d, m)?;
    let r = m.rule;
    ensure(r, u != v, "needs two distinct spiders")?;
    let c = color_of(d, u);
    ensure(r, c.is_some() && c == color_of(d, v), "needs two spiders of one colour")?;
    let plain = d.edge_count(u, v, EdgeKind::Plain);
    ensure(r, plain > 0, "needs a plain edge")?;
    let had = d.edge_count(u, v, EdgeKind::Hadamard);
    d.remove_edges_between(u, v);
    for (w, k) in d.incident(v) {
        let w = if w == v { u } else { w };
        d.add_edge(u, w, k);
    }
    for _ in 1..plain {
        d.add_edge(u, u, EdgeKind::Plain);
    }
    for _ in 0..had {
        d.add_edge(u, u, EdgeKind::Hadamard);
    }
    let pv = d.phase(v).unwrap();
    d.add_to_phase(u, pv);
    d.remove_vertex(v);
    Ok(Scalar::one())
}

fn apply_remove_self_loop(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [v] = bind(d, m)?;
    ensure(m.rule, d.is_spider(v), "needs a spider")?;
    ensure(m.rule, has_loops(d, v), "no self-loop")?;
    let had = d.self_loops(v, EdgeKind::Hadamard);
    d.remove_edges_between(v, v);
    d.add_to_phase(v, Phase::pi().scale(had as i64));
    Ok(Scalar::sqrt2_pow(-(had as i32)))
}

fn apply_remove_identity(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [v] = bind(d, m)?;
    ensure(m.rule, identity_ok(d, v), "needs a phase-0 arity-2 spider")?;
    let inc = d.incident(v);
    let ((a, ka), (b, kb)) = (inc[0], inc[1]);
    d.remove_vertex(v);
    d.add_edge(a, b, ka.then(kb));
    Ok(Scalar::one())
}

fn apply_cancel_hh(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [h1, h2] = bind(d, m)?;
    let ok = h1 != h2
        && hbox_to_edge_ok(d, h1)
        && hbox_to_edge_ok(d, h2)
        && d.incident(h1).iter().filter(|e| e.0 == h2).count() == 1;
    ensure(m.rule, ok, "needs two arity-2 Hadamard boxes joined once")?;
    let mid = d.incident(h1).into_iter().find(|e| e.0 == h2).unwrap().1;
    let (a, k1) = d.incident(h1).into_iter().find(|e| e.0 != h2).unwrap();
    let (b, k3) = d.incident(h2).into_iter().find(|e| e.0 != h1).unwrap();
    ensure(m.rule, a != b || d.is_spider(a), "would leave a self-loop on a non-spider")?;
    d.remove_vertex(h1);
    d.remove_vertex(h2);
    d.add_edge(a, b, k1.then(mid).then(k3));
    Ok(Scalar::from_complex(Complex64::new(2.0, 0.0)))
}

fn apply_hbox_to_edge(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [h] = bind(d, m)?;
    ensure(m.rule, hbox_to_edge_ok(d, h), "needs an arity-2 Hadamard box")?;
    let inc = d.incident(h);
    let ((a, ka), (b, kb)) = (inc[0], inc[1]);
    d.remove_vertex(h);
    d.add_edge(a, b, ka.then(kb).toggled());
    Ok(Scalar::sqrt2_pow(1))
}

fn apply_pi_copy(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [x, z] = bind(d, m)?;
    let r = m.rule;
    let c = color_of(d, x);
    ensure(r, c.is_some() && d.phase(x) == Some(Phase::pi()), "first vertex must be a pi spider")?;
    let c = c.unwrap();
    ensure(r, d.degree(x) == 2 && !has_loops(d, x), "pi spider must have arity 2")?;
    ensure(r, color_of(d, z) == Some(c.other()), "second vertex must be a spider of the other colour")?;
    ensure(r, d.edge_count(x, z, EdgeKind::Plain) > 0, "needs a plain edge")?;
    ensure(r, !has_loops(d, z), "target spider has a self-loop")?;
    let Some((w, k)) = incident_without(d, x, z, EdgeKind::Plain).first().copied() else {
        return fail(r, "pi spider must have a second leg");
    };
    ensure(r, w != z, "both legs of the pi spider go to the target")?;
    let alpha = d.phase(z).unwrap();
    let others = incident_without(d, z, x, EdgeKind::Plain);
    d.remove_vertex(x);
    for (y, ky) in others {
        d.remove_edge(z, y, ky);
        let p = d.add_vertex(c.spider(Phase::pi()));
        d.add_edge(z, p, EdgeKind::Plain);
        d.add_edge(p, y, ky);
    }
    d.add_edge(w, z, k);
    d.set_phase(z, -alpha);
    Ok(Scalar::phase(alpha))
}

fn apply_state_copy(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [s, z] = bind(d, m)?;
    let r = m.rule;
    let c = color_of(d, s);
    ensure(r, c.is_some() && d.phase(s).unwrap().is_pauli(), "state must be a Pauli spider")?;
    let c = c.unwrap();
    ensure(r, d.degree(s) == 1 && d.edge_count(s, z, EdgeKind::Plain) == 1, "state must be one plain leg into the target")?;
    ensure(r, color_of(d, z) == Some(c.other()) && !has_loops(d, z), "target must be a loop-free spider of the other colour")?;
    let a = if d.phase(s).unwrap().is_zero() { 0 } else { 1 };
    let alpha = d.phase(z).unwrap();
    let others = incident_without(d, z, s, EdgeKind::Plain);
    let n = others.len() as i32;
    d.remove_vertex(s);
    d.remove_vertex(z);
    for (y, ky) in others {
        let q = d.add_vertex(c.spider(Phase::pi().scale(a)));
        d.add_edge(q, y, ky);
    }
    Ok(Scalar::sqrt2_pow(1 - n) * Scalar::phase(alpha.scale(a)))
}

pub(crate) fn color_change(d: &mut Diagram, v: V) {
    let inc: Vec<_> = d.incident(v).into_iter().filter(|e| e.0 != v).collect();
    for &(w, k) in &inc {
        d.remove_edge(v, w, k);
    }
    for (w, k) in inc {
        d.add_edge(v, w, k.toggled());
    }
    let k = match d.kind(v) {
        Some(VertexKind::Z(p)) => VertexKind::X(p),
        Some(VertexKind::X(p)) => VertexKind::Z(p),
        k => k.unwrap(),
    };
    d.set_kind(v, k);
}

fn apply_color_change(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [v] = bind(d, m)?;
    ensure(m.rule, d.is_spider(v), "needs a spider")?;
    color_change(d, v);
    Ok(Scalar::one())
}

fn apply_bialgebra(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [z, x] = bind(d, m)?;
    let r = m.rule;
    let c = color_of(d, z);
    ensure(r, c.is_some() && color_of(d, x) == c.map(Color::other), "needs spiders of opposite colours")?;
    let c = c.unwrap();
    ensure(r, d.phase(z).unwrap().is_zero() && d.phase(x).unwrap().is_zero(), "both phases must be 0")?;
    ensure(r, !has_loops(d, z) && !has_loops(d, x), "self-loops present")?;
    ensure(
        r,
        d.edge_count(z, x, EdgeKind::Plain) == 1 && d.edge_count(z, x, EdgeKind::Hadamard) == 0,
        "needs exactly one plain connecting edge",
    )?;
    let zs = incident_without(d, z, x, EdgeKind::Plain);
    let xs = incident_without(d, x, z, EdgeKind::Plain);
    let (n, k) = (zs.len() as i32, xs.len() as i32);
    d.remove_vertex(z);
    d.remove_vertex(x);
    let a: Vec<V> = zs
        .into_iter()
        .map(|(y, ky)| {
            let a = d.add_vertex(c.other().spider(Phase::zero()));
            d.add_edge(a, y, ky);
            a
        })
        .collect();
    let b: Vec<V> = xs
        .into_iter()
        .map(|(w, kw)| {
            let b = d.add_vertex(c.spider(Phase::zero()));
            d.add_edge(b, w, kw);
            b
        })
        .collect();
    for &ai in &a {
        for &bj in &b {
            d.add_edge(ai, bj, EdgeKind::Plain);
        }
    }
    Ok(Scalar::sqrt2_pow((n - 1) * (k - 1)))
}

fn apply_hopf(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [u, v] = bind(d, m)?;
    let Some(k) = hopf_kind(d, u, v) else {
        return fail(m.rule, "needs two cancelling parallel edges between spiders");
    };
    d.remove_edge(u, v, k);
    d.remove_edge(u, v, k);
    Ok(Scalar::from_complex(Complex64::new(0.5, 0.0)))
}

fn apply_fuse_phase_gadgets(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [h1, l1, h2, l2] = bind(d, m)?;
    let (Some(g1), Some(g2)) = (gadget_at(d, h1), gadget_at(d, h2)) else {
        return fail(m.rule, "not two phase gadgets");
    };
    ensure(m.rule, h1 != h2 && g1.leaf == l1 && g2.leaf == l2, "leaf mismatch")?;
    ensure(m.rule, g1.targets == g2.targets, "gadgets act on different targets")?;
    let k = g1.targets.len() as i32;
    let a1 = !d.phase(h1).unwrap().is_zero();
    let a2 = !d.phase(h2).unwrap().is_zero();
    let (p1, p2) = (d.phase(l1).unwrap(), d.phase(l2).unwrap());
    // a hub carrying pi flips the sign of its gadget and adds a global phase
    let merged = if a1 == a2 { p1 + p2 } else { p1 - p2 };
    let mut phase = Scalar::sqrt2_pow(1 - k);
    if a1 {
        phase *= Scalar::phase(p1 - merged);
    }
    if a2 {
        phase *= Scalar::phase(p2);
    }
    d.remove_vertex(h2);
    d.remove_vertex(l2);
    d.set_phase(l1, merged);
    Ok(phase)
}

/// Replaces a wire `a -k1- ... -k2- b` by an S, sqrt(X), S chain.
fn euler_chain(d: &mut Diagram, a: V, ka: EdgeKind, b: V, kb: EdgeKind) {
    let q = Phase::new(1, 2);
    let z1 = d.add_vertex(VertexKind::Z(q));
    let x = d.add_vertex(VertexKind::X(q));
    let z2 = d.add_vertex(VertexKind::Z(q));
    d.add_edge(a, z1, ka);
    d.add_edge(z1, x, EdgeKind::Plain);
    d.add_edge(x, z2, EdgeKind::Plain);
    d.add_edge(z2, b, kb);
}

fn apply_euler_edge(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [a, b] = bind(d, m)?;
    ensure(m.rule, d.remove_edge(a, b, EdgeKind::Hadamard), "no Hadamard edge")?;
    euler_chain(d, a, EdgeKind::Plain, b, EdgeKind::Plain);
    Ok(Scalar::phase(Phase::new(-1, 4)))
}

fn apply_euler_box(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [h] = bind(d, m)?;
    ensure(m.rule, hbox_to_edge_ok(d, h), "needs an arity-2 Hadamard box")?;
    let inc = d.incident(h);
    d.remove_vertex(h);
    euler_chain(d, inc[0].0, inc[0].1, inc[1].0, inc[1].1);
    Ok(Scalar::phase(Phase::new(-1, 4)) * Scalar::sqrt2_pow(1))
}

fn apply_absorb_scalar(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [v] = bind(d, m)?;
    ensure(m.rule, d.degree(v) == 0, "vertex still has edges")?;
    let value = match d.kind(v).unwrap() {
        VertexKind::Z(p) | VertexKind::X(p) => Complex64::new(1.0, 0.0) + p.exp_i(),
        VertexKind::H(a) => a,
        VertexKind::B => return fail(m.rule, "boundaries are not scalars"),
    };
    d.remove_vertex(v);
    Ok(Scalar::from_complex(value))
}

fn apply_insert_identity(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let [a, b] = bind(d, m)?;
    ensure(m.rule, d.is_boundary(b), "second vertex must be a boundary")?;
    let inc = d.incident(b);
    ensure(m.rule, inc.len() == 1 && inc[0].0 == a, "boundary is not attached to the first vertex")?;
    let k = inc[0].1;
    d.remove_edge(a, b, k);
    let w = d.add_vertex(VertexKind::Z(Phase::zero()));
    d.add_edge(a, w, EdgeKind::Hadamard);
    d.add_edge(w, b, k.toggled());
    Ok(Scalar::one())
}

/// Applies one match, multiplies in its scalar correction and returns the
/// trace record. On error the diagram is untouched.
pub fn apply(d: &mut Diagram, m: &Match) -> Result<RewriteStep, RuleError> {
    let (v0, e0) = (d.num_vertices() as i64, d.num_edges() as i64);
    let corr = match m.rule {
        Rule::Fusion => apply_fusion(d, m),
        Rule::RemoveIdentity => apply_remove_identity(d, m),
        Rule::RemoveSelfLoop => apply_remove_self_loop(d, m),
        Rule::CancelHH => apply_cancel_hh(d, m),
        Rule::HBoxToEdge => apply_hbox_to_edge(d, m),
        Rule::PiCopy => apply_pi_copy(d, m),
        Rule::StateCopy => apply_state_copy(d, m),
        Rule::ColorChange => apply_color_change(d, m),
        Rule::Bialgebra => apply_bialgebra(d, m),
        Rule::Hopf => apply_hopf(d, m),
        Rule::FusePhaseGadgets => apply_fuse_phase_gadgets(d, m),
        Rule::EulerHadamardEdge => apply_euler_edge(d, m),
        Rule::EulerHadamardBox => apply_euler_box(d, m),
        Rule::AbsorbScalar => apply_absorb_scalar(d, m),
        Rule::InsertIdentity => apply_insert_identity(d, m),
        Rule::LocalComplement | Rule::Pivot | Rule::BoundaryPivot => crate::simplify::apply_rule(d, m),
        _ => crate::zh::apply_rule(d, m),
    }?;
    d.scalar *= corr;
    let c = corr.value();
    log::trace!("{} {:?}", m.rule, m.vertices);
    Ok(RewriteStep {
        rule: m.rule,
        vertices: m.vertices.clone(),
        scalar: [c.re, c.im],
        delta: Delta { vertices: d.num_vertices() as i64 - v0, edges: d.num_edges() as i64 - e0 },
    })
}

/// Re-applies a recorded trace to a fresh copy of its input.
pub fn replay(d: &Diagram, trace: &[RewriteStep]) -> Result<Diagram, RuleError> {
    let mut d = d.clone();
    for step in trace {
        apply(&mut d, &step.as_match())?;
    }
    Ok(d)
}

/// One JSON object per line.
pub fn trace_to_jsonl(trace: &[RewriteStep]) -> String {
    trace.iter().map(|s| serde_json::to_string(s).expect("step serializes") + "\n").collect()
}

pub fn trace_from_jsonl(text: &str) -> Result<Vec<RewriteStep>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

// ---- strategies ----

#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Fusion, identity removal, copying, Hopf and Hadamard clean-up to a
    /// fixpoint.
    Basic,
    /// Graph-like conversion then local complementation and pivoting.
    CliffordFull,
    /// The listed rules, each applied exhaustively in turn, until nothing
    /// applies or the step budget runs out.
    Custom(Vec<Rule>),
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Strategy, String> {
        match s {
            "basic" => Ok(Strategy::Basic),
            "clifford_full" | "full" => Ok(Strategy::CliffordFull),
            _ => {
                let rules = s.split(',').map(|r| r.trim().parse()).collect::<Result<Vec<Rule>, _>>()?;
                Ok(Strategy::Custom(rules))
            }
        }
    }
}

fn step_budget(d: &Diagram) -> usize {
    10 * d.num_vertices().max(1) + 100
}

/// Applies every match of `rule` found up front, skipping ones an earlier
/// application invalidated. Returns how many applied.
fn sweep(d: &mut Diagram, rule: Rule, trace: &mut Vec<RewriteStep>, keep: impl Fn(&Diagram, &Match) -> bool) -> usize {
    let mut n = 0;
    for m in find(rule, d) {
        if keep(d, &m) {
            if let Ok(step) = apply(d, &m) {
                trace.push(step);
                n += 1;
            }
        }
    }
    n
}

/// More Hadamard than plain edges (ignoring loops), so a colour change
/// strictly reduces the Hadamard edge count.
fn hadamard_heavy(d: &Diagram, v: V) -> bool {
    let inc: Vec<_> = d.incident(v).into_iter().filter(|e| e.0 != v).collect();
    let h = inc.iter().filter(|e| e.1 == EdgeKind::Hadamard).count();
    2 * h > inc.len()
}

/// pi-copy that is immediately followed by fusing every copy into a
/// same-coloured neighbour, so the edge count drops overall.
fn pi_push_ok(d: &Diagram, m: &Match) -> bool {
    let (x, z) = (m.vertices[0], m.vertices[1]);
    let c = color_of(d, x);
    incident_without(d, z, x, EdgeKind::Plain)
        .iter()
        .all(|&(y, k)| k == EdgeKind::Plain && y != x && y != z && color_of(d, y) == c)
}

fn pi_push(d: &mut Diagram, trace: &mut Vec<RewriteStep>) -> usize {
    let mut n = 0;
    for m in find(Rule::PiCopy, d) {
        if !d.contains(m.vertices[0]) || !d.contains(m.vertices[1]) || !pi_push_ok(d, &m) {
            continue;
        }
        let first_new = d.next_id();
        let Ok(step) = apply(d, &m) else { continue };
        trace.push(step);
        n += 1;
        for p in first_new..d.next_id() {
            if let Some(&y) = d.neighbors(p).iter().find(|&&y| y != m.vertices[1]) {
                let fm = Match::new(Rule::Fusion, vec![y.min(p), y.max(p)]);
                if let Ok(step) = apply(d, &fm) {
                    trace.push(step);
                }
            }
        }
    }
    n
}

fn basic(d: &mut Diagram) -> Vec<RewriteStep> {
    let mut trace = Vec::new();
    let budget = step_budget(d);
    let all = |_: &Diagram, _: &Match| true;
    loop {
        let before = trace.len();
        sweep(d, Rule::Fusion, &mut trace, all);
        sweep(d, Rule::RemoveSelfLoop, &mut trace, all);
        sweep(d, Rule::RemoveIdentity, &mut trace, all);
        sweep(d, Rule::StateCopy, &mut trace, all);
        pi_push(d, &mut trace);
        sweep(d, Rule::Hopf, &mut trace, all);
        sweep(d, Rule::ColorChange, &mut trace, |d, m| hadamard_heavy(d, m.vertices[0]));
        sweep(d, Rule::CancelHH, &mut trace, all);
        sweep(d, Rule::HBoxToEdge, &mut trace, all);
        sweep(d, Rule::AbsorbScalar, &mut trace, all);
        if trace.len() == before {
            break;
        }
        if trace.len() > budget {
            log::warn!("basic simplification stopped after {} steps", trace.len());
            break;
        }
    }
    trace
}

fn custom(d: &mut Diagram, rules: &[Rule]) -> Vec<RewriteStep> {
    let mut trace = Vec::new();
    let budget = step_budget(d);
    loop {
        let before = trace.len();
        for &r in rules {
            for m in find(r, d) {
                if trace.len() >= budget {
                    break;
                }
                if let Ok(step) = apply(d, &m) {
                    trace.push(step);
                }
            }
        }
        if trace.len() == before || trace.len() >= budget {
            break;
        }
    }
    trace
}

/// Rewrites `d` in place and returns the trace.
pub fn simplify(d: &mut Diagram, strategy: &Strategy) -> Vec<RewriteStep> {
    match strategy {
        Strategy::Basic => basic(d),
        Strategy::CliffordFull => crate::simplify::full_reduce(d),
        Strategy::Custom(rules) => custom(d, rules),
    }
}
