//! H-boxes: their rewrite rules, Toffoli and controlled-gate builders, the
//! XOR/AND phase-polynomial transform, CCZ decomposition, and the
//! ancilla-assisted Toffoli constructions with four T gates.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};

use crate::circuit::{circuit_to_diagram, Circuit, Gate, ToffoliMode};
use crate::diagram::{Diagram, EdgeKind, VertexKind, V};
use crate::phase::Phase;
use crate::rules::{color_of, ensure, fail, has_loops, incident_without, minus_one, Match, Rule, RuleError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZhError {
    #[error("vertex {0} is not an H-box")]
    NotAnHBox(V),
    #[error("H-boxes need the `zh` feature")]
    Disabled,
}

fn label(d: &Diagram, v: V) -> Option<Complex64> {
    match d.kind(v) {
        Some(VertexKind::H(a)) => Some(a),
        _ => None,
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-12
}

fn is_z(d: &Diagram, v: V) -> bool {
    matches!(d.kind(v), Some(VertexKind::Z(_)))
}

/// Neighbours of an H-box if they are all Z spiders on single plain edges.
fn z_support(d: &Diagram, h: V) -> Option<BTreeSet<V>> {
    let inc = d.incident(h);
    let set: BTreeSet<V> = inc.iter().map(|e| e.0).collect();
    (set.len() == inc.len() && inc.iter().all(|&(w, k)| k == EdgeKind::Plain && is_z(d, w))).then_some(set)
}

fn bind_any(d: &Diagram, m: &Match, n: usize) -> Result<(), RuleError> {
    if m.vertices.len() != n {
        return Err(RuleError::Shape(m.rule, n, m.vertices.len()));
    }
    match m.vertices.iter().find(|&&v| !d.contains(v)) {
        Some(&v) => Err(RuleError::Stale(m.rule, v)),
        None => Ok(()),
    }
}

/// An arity-1 spider of `color` with phase `p` plainly attached to an H-box.
fn state_into_hbox(d: &Diagram, s: V, p: Phase) -> Option<V> {
    if color_of(d, s) != Some(crate::diagram::Color::X) || d.phase(s) != Some(p) || d.degree(s) != 1 {
        return None;
    }
    let (h, k) = d.incident(s)[0];
    (k == EdgeKind::Plain && label(d, h).is_some()).then_some(h)
}

// ---- matchers ----

fn find_hbox_fusion(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for h1 in d.vertex_ids() {
        if label(d, h1).is_none() {
            continue;
        }
        for w in d.neighbors(h1) {
            // direct Hadamard edge
            if w != h1
                && label(d, w).is_some_and(|b| close(b, minus_one()))
                && d.edge_count(h1, w, EdgeKind::Hadamard) == 1
                && d.edge_count(h1, w, EdgeKind::Plain) == 0
                && (h1 < w || !close(label(d, h1).unwrap(), minus_one()))
            {
                out.push(Match::new(Rule::HBoxFusion, vec![h1, w]));
            }
            // through an arity-2 Hadamard box
            if crate::rules::is_hadamard_box(d.kind(w)) && d.degree(w) == 2 && d.edge_count(h1, w, EdgeKind::Plain) == 1 {
                if let Some(&(h2, EdgeKind::Plain)) = incident_without(d, w, h1, EdgeKind::Plain).first() {
                    if h2 != h1
                        && h2 != w
                        && label(d, h2).is_some_and(|b| close(b, minus_one()))
                        && !d.connected(h1, h2)
                        && (h1 < h2 || !close(label(d, h1).unwrap(), minus_one()))
                    {
                        out.push(Match::new(Rule::HBoxFusion, vec![h1, w, h2]));
                    }
                }
            }
        }
    }
    out
}

fn find_state_into_hbox(d: &Diagram, rule: Rule, p: Phase) -> Vec<Match> {
    d.vertex_ids()
        .into_iter()
        .filter_map(|s| state_into_hbox(d, s, p).map(|h| Match::new(rule, vec![s, h])))
        .collect()
}

fn zh_bialgebra_ok(d: &Diagram, h: V, x: V) -> bool {
    label(d, h).is_some_and(|a| close(a, minus_one()))
        && matches!(d.kind(x), Some(VertexKind::X(p)) if p.is_zero())
        && !has_loops(d, x)
        && d.edge_count(h, x, EdgeKind::Plain) == 1
        && d.edge_count(h, x, EdgeKind::Hadamard) == 0
}

fn find_zh_bialgebra(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for h in d.vertex_ids() {
        for x in d.neighbors(h) {
            if zh_bialgebra_ok(d, h, x) {
                out.push(Match::new(Rule::ZhBialgebra, vec![h, x]));
            }
        }
    }
    out
}

fn find_multiply(d: &Diagram) -> Vec<Match> {
    let boxes: Vec<(V, BTreeSet<V>)> =
        d.vertex_ids().into_iter().filter(|&h| label(d, h).is_some()).filter_map(|h| z_support(d, h).map(|s| (h, s))).collect();
    let mut out = Vec::new();
    for (i, (h1, s1)) in boxes.iter().enumerate() {
        if let Some((h2, _)) = boxes[i + 1..].iter().find(|(_, s2)| s2 == s1) {
            out.push(Match::new(Rule::MultiplyHBoxes, vec![*h1, *h2]));
        }
    }
    out
}

/// The arity-2 X(pi) spider between two H-boxes, plus both supports
/// without it.
fn not_link(d: &Diagram, h1: V, x: V) -> Option<(V, BTreeSet<V>, BTreeSet<V>)> {
    if !matches!(d.kind(x), Some(VertexKind::X(p)) if p == Phase::pi()) || d.degree(x) != 2 || has_loops(d, x) {
        return None;
    }
    let inc = d.incident(x);
    if inc.iter().any(|e| e.1 != EdgeKind::Plain) {
        return None;
    }
    let h2 = if inc[0].0 == h1 { inc[1].0 } else if inc[1].0 == h1 { inc[0].0 } else { return None };
    if h2 == h1 || label(d, h2).is_none() {
        return None;
    }
    let rest = |h: V| -> Option<BTreeSet<V>> {
        let inc = incident_without(d, h, x, EdgeKind::Plain);
        let set: BTreeSet<V> = inc.iter().map(|e| e.0).collect();
        (set.len() == inc.len() && inc.iter().all(|&(w, k)| k == EdgeKind::Plain && is_z(d, w))).then_some(set)
    };
    Some((h2, rest(h1)?, rest(h2)?))
}

fn find_average(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for h1 in d.vertex_ids() {
        if label(d, h1).is_none() {
            continue;
        }
        for x in d.neighbors(h1) {
            if let Some((h2, s1, s2)) = not_link(d, h1, x) {
                if h1 < h2 && s1 == s2 {
                    out.push(Match::new(Rule::AverageHBoxes, vec![h1, x, h2]));
                }
            }
        }
    }
    out
}

/// `[h1, h2, z, x]`: equal-label boxes on a common support, `h1` wired to
/// Z spider `z` and `h2` wired to `z` through the NOT `x`.
fn intro_ok(d: &Diagram, h1: V, h2: V, z: V, x: V) -> bool {
    let (Some(a), Some(b)) = (label(d, h1), label(d, h2)) else { return false };
    if !close(a, b) || h1 == h2 || !is_z(d, z) || d.edge_count(h1, z, EdgeKind::Plain) != 1 {
        return false;
    }
    let x_ok = matches!(d.kind(x), Some(VertexKind::X(p)) if p == Phase::pi())
        && d.degree(x) == 2
        && d.edge_count(x, h2, EdgeKind::Plain) == 1
        && d.edge_count(x, z, EdgeKind::Plain) == 1;
    if !x_ok {
        return false;
    }
    let sup = |h: V, drop: V| -> Option<BTreeSet<V>> {
        let inc = incident_without(d, h, drop, EdgeKind::Plain);
        let set: BTreeSet<V> = inc.iter().map(|e| e.0).collect();
        (set.len() == inc.len() && inc.iter().all(|&(w, k)| k == EdgeKind::Plain && is_z(d, w))).then_some(set)
    };
    match (sup(h1, z), sup(h2, x)) {
        (Some(s1), Some(s2)) => s1 == s2 && !s1.contains(&z),
        _ => false,
    }
}

fn find_intro(d: &Diagram) -> Vec<Match> {
    let mut out = Vec::new();
    for h2 in d.vertex_ids() {
        if label(d, h2).is_none() {
            continue;
        }
        for x in d.neighbors(h2) {
            if !matches!(d.kind(x), Some(VertexKind::X(p)) if p == Phase::pi()) || d.degree(x) != 2 {
                continue;
            }
            let Some(&(z, _)) = incident_without(d, x, h2, EdgeKind::Plain).first() else { continue };
            for h1 in d.neighbors(z) {
                if intro_ok(d, h1, h2, z, x) {
                    out.push(Match::new(Rule::Intro, vec![h1, h2, z, x]));
                }
            }
        }
    }
    out
}

fn ccz_ok(d: &Diagram, h: V) -> bool {
    let Some(a) = label(d, h) else { return false };
    let n = d.degree(h);
    (a.norm() - 1.0).abs() < 1e-12 && (2..=3).contains(&n) && z_support(d, h).is_some()
}

pub(crate) fn find(rule: Rule, d: &Diagram) -> Vec<Match> {
    let by_vertex = |pred: &dyn Fn(V) -> bool| -> Vec<Match> {
        d.vertex_ids().into_iter().filter(|&v| pred(v)).map(|v| Match::new(rule, vec![v])).collect()
    };
    match rule {
        Rule::HBoxFusion => find_hbox_fusion(d),
        Rule::AbsorbOne => find_state_into_hbox(d, rule, Phase::pi()),
        Rule::ExplodeZero => find_state_into_hbox(d, rule, Phase::zero()),
        Rule::ZhBialgebra => find_zh_bialgebra(d),
        Rule::UnitDecompose => by_vertex(&|v| label(d, v).is_some_and(|a| close(a, Complex64::new(1.0, 0.0)))),
        Rule::MultiplyHBoxes => find_multiply(d),
        Rule::AverageHBoxes => find_average(d),
        Rule::Intro => find_intro(d),
        Rule::CczDecompose => by_vertex(&|v| ccz_ok(d, v)),
        _ => Vec::new(),
    }
}

// ---- appliers ----

fn apply_hbox_fusion(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    let r = m.rule;
    let (h1, mid, h2) = match m.vertices.as_slice() {
        [a, b] => (*a, None, *b),
        [a, m, b] => (*a, Some(*m), *b),
        vs => return Err(RuleError::Shape(r, 2, vs.len())),
    };
    bind_any(d, m, m.vertices.len())?;
    ensure(r, label(d, h1).is_some() && h1 != h2, "first vertex must be an H-box")?;
    ensure(r, label(d, h2).is_some_and(|b| close(b, minus_one())), "second box must carry the default label")?;
    let corr = match mid {
        None => {
            ensure(
                r,
                d.edge_count(h1, h2, EdgeKind::Hadamard) == 1 && d.edge_count(h1, h2, EdgeKind::Plain) == 0,
                "boxes must share exactly one Hadamard edge",
            )?;
            d.remove_edges_between(h1, h2);
            Scalar::sqrt2_pow(1)
        }
        Some(w) => {
            let ok = crate::rules::is_hadamard_box(d.kind(w))
                && d.degree(w) == 2
                && d.edge_count(h1, w, EdgeKind::Plain) == 1
                && d.edge_count(w, h2, EdgeKind::Plain) == 1
                && !d.connected(h1, h2);
            ensure(r, ok, "middle must be a Hadamard box on plain edges")?;
            d.remove_vertex(w);
            Scalar::sqrt2_pow(2)
        }
    };
    for (w, k) in d.incident(h2) {
        d.add_edge(h1, w, k);
    }
    d.remove_vertex(h2);
    Ok(corr)
}

fn apply_absorb_one(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 2)?;
    let (s, h) = (m.vertices[0], m.vertices[1]);
    ensure(m.rule, state_into_hbox(d, s, Phase::pi()) == Some(h), "needs an X(pi) state on an H-box")?;
    d.remove_vertex(s);
    Ok(Scalar::sqrt2_pow(1))
}

fn apply_explode_zero(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 2)?;
    let (s, h) = (m.vertices[0], m.vertices[1]);
    ensure(m.rule, state_into_hbox(d, s, Phase::zero()) == Some(h), "needs an X(0) state on an H-box")?;
    let others = incident_without(d, h, s, EdgeKind::Plain);
    d.remove_vertex(s);
    d.remove_vertex(h);
    for (w, k) in others {
        let z = d.add_vertex(VertexKind::Z(Phase::zero()));
        d.add_edge(z, w, k);
    }
    Ok(Scalar::sqrt2_pow(1))
}

fn apply_zh_bialgebra(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 2)?;
    let (h, x) = (m.vertices[0], m.vertices[1]);
    ensure(m.rule, zh_bialgebra_ok(d, h, x), "needs a default H-box plainly joined once to an X(0) spider")?;
    let hs = incident_without(d, h, x, EdgeKind::Plain);
    let xs = incident_without(d, x, h, EdgeKind::Plain);
    let mcount = xs.len() as i32;
    d.remove_vertex(h);
    d.remove_vertex(x);
    let zs: Vec<V> = hs
        .into_iter()
        .map(|(w, k)| {
            let z = d.add_vertex(VertexKind::Z(Phase::zero()));
            d.add_edge(z, w, k);
            z
        })
        .collect();
    for (w, k) in xs {
        let b = d.add_vertex(VertexKind::H(minus_one()));
        d.add_edge(b, w, k);
        for &z in &zs {
            d.add_edge(z, b, EdgeKind::Plain);
        }
    }
    Ok(Scalar::sqrt2_pow(1 - mcount))
}

fn apply_unit_decompose(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 1)?;
    let h = m.vertices[0];
    ensure(m.rule, label(d, h).is_some_and(|a| close(a, Complex64::new(1.0, 0.0))), "needs an H-box labelled 1")?;
    let inc = d.incident(h);
    d.remove_vertex(h);
    for (w, k) in inc {
        let z = d.add_vertex(VertexKind::Z(Phase::zero()));
        d.add_edge(z, w, k);
    }
    Ok(Scalar::one())
}

fn apply_multiply(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 2)?;
    let (h1, h2) = (m.vertices[0], m.vertices[1]);
    let (Some(a), Some(b)) = (label(d, h1), label(d, h2)) else {
        return fail(m.rule, "needs two H-boxes");
    };
    let (s1, s2) = (z_support(d, h1), z_support(d, h2));
    ensure(m.rule, h1 != h2 && s1.is_some() && s1 == s2, "boxes must sit on the same Z spiders")?;
    d.remove_vertex(h2);
    d.set_kind(h1, VertexKind::H(a * b));
    Ok(Scalar::one())
}

fn apply_average(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 3)?;
    let (h1, x, h2) = (m.vertices[0], m.vertices[1], m.vertices[2]);
    let Some((other, s1, s2)) = not_link(d, h1, x) else {
        return fail(m.rule, "boxes must be joined through an arity-2 X(pi)");
    };
    ensure(m.rule, other == h2 && s1 == s2, "boxes must sit on the same Z spiders")?;
    let (a, b) = (label(d, h1).unwrap(), label(d, h2).unwrap());
    d.remove_vertex(x);
    d.remove_vertex(h2);
    d.set_kind(h1, VertexKind::H((a + b) / 2.0));
    Ok(Scalar::from_complex(Complex64::new(2.0, 0.0)))
}

fn apply_intro(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 4)?;
    let [h1, h2, z, x] = [m.vertices[0], m.vertices[1], m.vertices[2], m.vertices[3]];
    ensure(m.rule, intro_ok(d, h1, h2, z, x), "pattern does not match")?;
    d.remove_vertex(h2);
    d.remove_vertex(x);
    d.remove_edge(h1, z, EdgeKind::Plain);
    Ok(Scalar::one())
}

/// Exact phase for `e^{i theta}` when theta is a multiple of pi/8.
fn phase_of_label(a: Complex64) -> Phase {
    let t = a.arg() / std::f64::consts::PI * 8.0;
    if (t - t.round()).abs() < 1e-9 {
        Phase::new(t.round() as i64, 8)
    } else {
        Phase::real(a.arg())
    }
}

fn gadget(d: &mut Diagram, targets: &[V], p: Phase) {
    let hub = d.add_vertex(VertexKind::X(Phase::zero()));
    let leaf = d.add_vertex(VertexKind::Z(p));
    d.add_edge(hub, leaf, EdgeKind::Plain);
    for &t in targets {
        d.add_edge(t, hub, EdgeKind::Plain);
    }
}

fn apply_ccz_decompose(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    bind_any(d, m, 1)?;
    let h = m.vertices[0];
    ensure(m.rule, ccz_ok(d, h), "needs an arity-2 or -3 phase-labelled H-box on Z spiders")?;
    let a = label(d, h).unwrap();
    let ts: Vec<V> = z_support(d, h).unwrap().into_iter().collect();
    d.remove_vertex(h);
    if close(a, Complex64::new(1.0, 0.0)) {
        return Ok(Scalar::one());
    }
    let alpha = phase_of_label(a);
    let k = ts.len() as i64;
    // a * x1 * ... * xk expanded into parities
    let share = |p: Phase| match p {
        Phase::Exact(r) => Phase::from_rational(r / num_rational::Rational64::from_integer(1 << (k - 1))),
        Phase::Real(x) => Phase::real(x / (1 << (k - 1)) as f64),
    };
    let unit = share(alpha);
    for &t in &ts {
        d.add_to_phase(t, unit);
    }
    let mut exponent = 0;
    for mask in 1u32..(1 << k) {
        let set: Vec<V> = (0..k as usize).filter(|i| mask >> i & 1 == 1).map(|i| ts[i]).collect();
        if set.len() < 2 {
            continue;
        }
        let p = if set.len().is_multiple_of(2) { -unit } else { unit };
        gadget(d, &set, p);
        exponent += set.len() as i32 - 1;
    }
    Ok(Scalar::sqrt2_pow(exponent))
}

pub(crate) fn apply_rule(d: &mut Diagram, m: &Match) -> Result<Scalar, RuleError> {
    if !cfg!(feature = "zh") {
        return fail(m.rule, "H-box rules need the `zh` feature");
    }
    match m.rule {
        Rule::HBoxFusion => apply_hbox_fusion(d, m),
        Rule::AbsorbOne => apply_absorb_one(d, m),
        Rule::ExplodeZero => apply_explode_zero(d, m),
        Rule::ZhBialgebra => apply_zh_bialgebra(d, m),
        Rule::UnitDecompose => apply_unit_decompose(d, m),
        Rule::MultiplyHBoxes => apply_multiply(d, m),
        Rule::AverageHBoxes => apply_average(d, m),
        Rule::Intro => apply_intro(d, m),
        Rule::CczDecompose => apply_ccz_decompose(d, m),
        r => fail(r, "not an H-box rule"),
    }
}

// ---- builders ----

/// Multiply-controlled X on `controls + 1` wires, target last.
pub fn toffoli_diagram(controls: usize) -> Result<Diagram, ZhError> {
    if !cfg!(feature = "zh") {
        return Err(ZhError::Disabled);
    }
    let mut d = Diagram::new();
    let n = controls + 1;
    let ins: Vec<V> = (0..n).map(|_| d.add_input()).collect();
    let h = d.add_vertex(VertexKind::H(minus_one()));
    let outs: Vec<V> = (0..n).map(|_| d.add_output()).collect();
    for q in 0..n {
        let z = d.add_vertex(VertexKind::Z(Phase::zero()));
        let k = if q == controls { EdgeKind::Hadamard } else { EdgeKind::Plain };
        d.add_edge(ins[q], z, k);
        d.add_edge(z, outs[q], k);
        d.add_edge(z, h, EdgeKind::Plain);
    }
    Ok(d)
}

/// Adds a control wire (appended as the last qubit) feeding H-box `hbox`.
/// With `activating = false` the wire enters through a NOT, so the gate
/// fires on |0> instead of |1>.
pub fn add_control(d: &Diagram, hbox: V, activating: bool) -> Result<Diagram, ZhError> {
    if label(d, hbox).is_none() {
        return Err(ZhError::NotAnHBox(hbox));
    }
    let mut d = d.clone();
    let i = d.add_input();
    let z = d.add_vertex(VertexKind::Z(Phase::zero()));
    let o = d.add_output();
    d.add_edge(i, z, EdgeKind::Plain);
    d.add_edge(z, o, EdgeKind::Plain);
    if activating {
        d.add_edge(z, hbox, EdgeKind::Plain);
    } else {
        let x = d.add_vertex(VertexKind::X(Phase::pi()));
        d.add_edge(z, x, EdgeKind::Plain);
        d.add_edge(x, hbox, EdgeKind::Plain);
    }
    Ok(d)
}

/// Number of spiders carrying an odd multiple of pi/4.
pub fn t_count(d: &Diagram) -> usize {
    d.vertices().filter(|(_, k)| k.phase().is_some_and(|p| p.is_t_like())).count()
}

// ---- Fourier transform of phase polynomials ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// `f(x) = sum_y c_y * (xor of x_i for i in y)`.
    Xor,
    /// `f(x) = sum_y c_y * (and of x_i for i in y)`.
    And,
}

/// Coefficients of a function on `n` bits, indexed by subset bitmask.
/// Entry 0 is the constant term in both encodings.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTable<T> {
    pub n: usize,
    pub encoding: Encoding,
    pub coeffs: Vec<T>,
}

impl<T: Num + Clone + FromPrimitive> FourierTable<T> {
    pub fn zeros(n: usize, encoding: Encoding) -> Self {
        FourierTable { n, encoding, coeffs: vec![T::zero(); 1 << n] }
    }

    pub fn new(n: usize, encoding: Encoding, coeffs: Vec<T>) -> Self {
        assert_eq!(coeffs.len(), 1 << n, "table needs 2^n coefficients");
        FourierTable { n, encoding, coeffs }
    }

    /// Evaluates the encoded function at the bit assignment `x`.
    pub fn eval(&self, x: usize) -> T {
        let mut acc = T::zero();
        for (y, c) in self.coeffs.iter().enumerate() {
            let term = match self.encoding {
                Encoding::Xor => (x & y).count_ones() % 2 == 1 || y == 0,
                Encoding::And => x & y == y,
            };
            if term {
                acc = acc + c.clone();
            }
        }
        acc
    }
}

fn pow_i64(b: i64, e: u32) -> i64 {
    b.pow(e)
}

pub fn xor_to_and<T: Num + Clone + FromPrimitive>(t: &FourierTable<T>) -> FourierTable<T> {
    assert_eq!(t.encoding, Encoding::Xor);
    let mut out = FourierTable::zeros(t.n, Encoding::And);
    out.coeffs[0] = t.coeffs[0].clone();
    for tm in 1..t.coeffs.len() {
        let w = T::from_i64(pow_i64(-2, tm.count_ones() - 1)).unwrap();
        let mut acc = T::zero();
        for s in 1..t.coeffs.len() {
            if s & tm == tm {
                acc = acc + t.coeffs[s].clone();
            }
        }
        out.coeffs[tm] = acc * w;
    }
    out
}

pub fn and_to_xor<T: Num + Clone + FromPrimitive>(t: &FourierTable<T>) -> FourierTable<T> {
    assert_eq!(t.encoding, Encoding::And);
    let mut out = FourierTable::zeros(t.n, Encoding::Xor);
    out.coeffs[0] = t.coeffs[0].clone();
    for s in 1..t.coeffs.len() {
        let sign = T::from_i64(if s.count_ones() % 2 == 1 { 1 } else { -1 }).unwrap();
        let mut acc = T::zero();
        for tm in 1..t.coeffs.len() {
            if tm & s == s {
                let den = T::from_i64(1 << (tm.count_ones() - 1)).unwrap();
                acc = acc + t.coeffs[tm].clone() / den;
            }
        }
        out.coeffs[s] = acc * sign;
    }
    out
}

// ---- four-T Toffoli constructions ----

/// A post-selected ancilla construction: the two measurement branches and
/// what each should equal (up to a scalar).
#[derive(Clone, Debug)]
pub struct AncillaConstruction {
    /// Ancilla projected onto |+>.
    pub plus: Diagram,
    /// Ancilla projected onto |->.
    pub minus: Diagram,
    /// What the |+> branch implements.
    pub reference: Circuit,
    /// Extra gates the |-> branch applies after `reference`.
    pub correction: Circuit,
}

/// Computes `a = x AND y` into an ancilla (qubit 3) starting from a
/// T-magic state, with three further T-like phases.
fn and_into_ancilla() -> Circuit {
    let q = Phase::new(1, 4);
    Circuit::new(4)
        .with(Gate::CX(0, 3))
        .with(Gate::CX(1, 3))
        .with(Gate::T(3))
        .with(Gate::PhaseGadget(vec![0, 3], -q))
        .with(Gate::PhaseGadget(vec![1, 3], -q))
        .with(Gate::H(3))
        .with(Gate::S(3))
}

/// Wraps a 4-qubit body: ancilla enters as a Z(pi/4) state and leaves
/// through `<+|` (Z(0) effect) or `<-|` (Z(pi) effect).
fn post_select(body: &Circuit, minus: bool) -> Diagram {
    let d = circuit_to_diagram(body, ToffoliMode::Gadgets);
    let mut pre = Diagram::identity(3);
    let s = pre.add_vertex(VertexKind::Z(Phase::new(1, 4)));
    let o = pre.add_output();
    pre.add_edge(s, o, EdgeKind::Plain);
    let mut post = Diagram::identity(3);
    let i = post.add_input();
    let e = post.add_vertex(VertexKind::Z(if minus { Phase::pi() } else { Phase::zero() }));
    post.add_edge(i, e, EdgeKind::Plain);
    pre.compose(&d).and_then(|x| x.compose(&post)).expect("widths match")
}

/// Toffoli on qubits (0, 1; target 2) from four T gates and a measured
/// ancilla; the |-> outcome needs a CZ on the controls.
pub fn build_jones_toffoli() -> AncillaConstruction {
    let body = and_into_ancilla().with(Gate::CX(3, 2));
    AncillaConstruction {
        plus: post_select(&body, false),
        minus: post_select(&body, true),
        reference: Circuit::new(3).with(Gate::CCX(0, 1, 2)),
        correction: Circuit::new(3).with(Gate::CZ(0, 1)),
    }
}

/// A compute/uncompute Toffoli pair around an S on the target, using one
/// four-T AND and a measurement-based uncompute; the |-> outcome needs CZ
/// on the controls and Z on the target.
pub fn build_gidney_pair() -> AncillaConstruction {
    let body = and_into_ancilla().with(Gate::CX(2, 3)).with(Gate::S(3));
    AncillaConstruction {
        plus: post_select(&body, false),
        minus: post_select(&body, true),
        reference: Circuit::new(3).with(Gate::CCX(0, 1, 2)).with(Gate::S(2)).with(Gate::CCX(0, 1, 2)),
        correction: Circuit::new(3).with(Gate::CZ(0, 1)).with(Gate::Z(2)),
    }
}
