//! Reference identities: circuit identities among Clifford gates and
//! phase gadgets, and the diagrammatic rewrite cheatsheets, each with a
//! checker that reports failures by name.

use num_complex::Complex64;
use zx::circuit::{circuit_to_diagram, Circuit, Gate, ToffoliMode};
use zx::equiv::{verify, Verdict, VerifyOptions};
use zx::rules::{apply, find, replay, trace_from_jsonl, trace_to_jsonl, Rule};
use zx::tensor::{circuit_matrix, evaluate, proportional};
use zx::{Diagram, EdgeKind, Phase, VertexKind, V};

pub const TOL: f64 = 1e-9;

// ---- circuit identities ----

pub type Builder = fn(Phase, Phase) -> (usize, Vec<Gate>, Vec<Gate>);

pub fn circuit_identities() -> Vec<(&'static str, Builder)> {
    use Gate::*;
    vec![
        ("z_phase_through_control", |a, _| (2, vec![CX(0, 1), RZ(0, a)], vec![RZ(0, a), CX(0, 1)])),
        ("x_phase_through_target", |a, _| (2, vec![CX(0, 1), RX(1, a)], vec![RX(1, a), CX(0, 1)])),
        ("x_copies_through_control", |_, _| (2, vec![X(0), CX(0, 1)], vec![CX(0, 1), X(0), X(1)])),
        ("z_copies_through_target", |_, _| (2, vec![Z(1), CX(0, 1)], vec![CX(0, 1), Z(0), Z(1)])),
        ("s_through_control", |_, _| (2, vec![S(0), CX(0, 1)], vec![CX(0, 1), S(0)])),
        ("v_through_target", |_, _| (2, vec![RX(1, Phase::new(1, 2)), CX(0, 1)], vec![CX(0, 1), RX(1, Phase::new(1, 2))])),
        ("cz_symmetric", |_, _| (2, vec![CZ(0, 1)], vec![CZ(1, 0)])),
        ("cz_from_cnot", |_, _| (2, vec![CZ(0, 1)], vec![H(1), CX(0, 1), H(1)])),
        ("cnot_reversal", |_, _| (2, vec![H(0), H(1), CX(0, 1), H(0), H(1)], vec![CX(1, 0)])),
        ("cnot_self_inverse", |_, _| (2, vec![CX(0, 1), CX(0, 1)], vec![])),
        ("cz_self_inverse", |_, _| (2, vec![CZ(0, 1), CZ(0, 1)], vec![])),
        ("three_cnots_swap", |_, _| (2, vec![CX(0, 1), CX(1, 0), CX(0, 1)], vec![Swap(0, 1)])),
        ("x_through_cz", |_, _| (2, vec![X(0), CZ(0, 1)], vec![CZ(0, 1), X(0), Z(1)])),
        ("z_phase_through_cz", |a, _| (2, vec![RZ(0, a), CZ(0, 1)], vec![CZ(0, 1), RZ(0, a)])),
        ("cz_conjugated_by_cnot", |_, _| (2, vec![CX(0, 1), CZ(0, 1), CX(0, 1)], vec![CZ(0, 1), Z(0)])),
        ("hadamard_swaps_colour", |a, _| (1, vec![H(0), RZ(0, a), H(0)], vec![RX(0, a)])),
        ("hzh_is_x", |_, _| (1, vec![H(0), Z(0), H(0)], vec![X(0)])),
        ("s_squared", |_, _| (1, vec![S(0), S(0)], vec![Z(0)])),
        ("v_squared", |_, _| (1, vec![RX(0, Phase::new(1, 2)), RX(0, Phase::new(1, 2))], vec![X(0)])),
        ("hadamard_euler_svs", |_, _| (1, vec![H(0)], vec![S(0), RX(0, Phase::new(1, 2)), S(0)])),
        ("hadamard_euler_vsv", |_, _| (1, vec![H(0)], vec![RX(0, Phase::new(1, 2)), S(0), RX(0, Phase::new(1, 2))])),
        ("y_is_xz", |_, _| (1, vec![Y(0)], vec![Z(0), X(0)])),
        ("phases_add", |a, b| (1, vec![RZ(0, a), RZ(0, b)], vec![RZ(0, a + b)])),
        ("gadget_as_ladder", |a, _| (2, vec![PhaseGadget(vec![0, 1], a)], vec![CX(0, 1), RZ(1, a), CX(0, 1)])),
        ("gadget_as_ladder_3", |a, _| {
            (3, vec![PhaseGadget(vec![0, 1, 2], a)], vec![CX(0, 2), CX(1, 2), RZ(2, a), CX(1, 2), CX(0, 2)])
        }),
        ("gadget_fusion", |a, b| {
            (2, vec![PhaseGadget(vec![0, 1], a), PhaseGadget(vec![0, 1], b)], vec![PhaseGadget(vec![0, 1], a + b)])
        }),
        ("gadgets_commute", |a, b| {
            (
                3,
                vec![PhaseGadget(vec![0, 1], a), PhaseGadget(vec![1, 2], b)],
                vec![PhaseGadget(vec![1, 2], b), PhaseGadget(vec![0, 1], a)],
            )
        }),
        ("gadget_collapses_under_cnot", |a, _| (2, vec![CX(1, 0), PhaseGadget(vec![0, 1], a), CX(1, 0)], vec![RZ(0, a)])),
        ("gadget_commutes_with_phase", |a, b| {
            (2, vec![RZ(0, b), PhaseGadget(vec![0, 1], a)], vec![PhaseGadget(vec![0, 1], a), RZ(0, b)])
        }),
        ("cnot_cascade", |_, _| (3, vec![CX(0, 1), CX(1, 2), CX(0, 1)], vec![CX(1, 2), CX(0, 2)])),
        ("cnots_share_control", |_, _| (3, vec![CX(0, 1), CX(0, 2)], vec![CX(0, 2), CX(0, 1)])),
        ("cnots_share_target", |_, _| (3, vec![CX(0, 2), CX(1, 2)], vec![CX(1, 2), CX(0, 2)])),
        ("swap_moves_phase", |a, _| (2, vec![Swap(0, 1), RZ(0, a), Swap(0, 1)], vec![RZ(1, a)])),
        ("xx_gadget_as_ladder", |a, _| {
            (2, vec![H(0), H(1), PhaseGadget(vec![0, 1], a), H(0), H(1)], vec![CX(0, 1), RX(0, a), CX(0, 1)])
        }),
    ]
}

pub fn circuit(n: usize, gates: Vec<Gate>) -> Circuit {
    Circuit { qubits: n, gates }
}

/// Both sides conjugated by Hadamards on every qubit.
pub fn colour_swapped(c: &Circuit) -> Circuit {
    let hs = Circuit { qubits: c.qubits, gates: (0..c.qubits).map(Gate::H).collect() };
    hs.then(c).then(&hs)
}

// ---- diagram cheatsheets ----

pub struct B {
    pub d: Diagram,
}

impl B {
    pub fn new() -> Self {
        B { d: Diagram::new() }
    }
    pub fn z(&mut self, p: Phase) -> V {
        self.d.add_vertex(VertexKind::Z(p))
    }
    pub fn x(&mut self, p: Phase) -> V {
        self.d.add_vertex(VertexKind::X(p))
    }
    pub fn h(&mut self, a: Complex64) -> V {
        self.d.add_vertex(VertexKind::H(a))
    }
    pub fn e(&mut self, a: V, b: V) {
        self.d.add_edge(a, b, EdgeKind::Plain);
    }
    pub fn he(&mut self, a: V, b: V) {
        self.d.add_edge(a, b, EdgeKind::Hadamard);
    }
    pub fn ins(&mut self, v: V, n: usize) {
        for _ in 0..n {
            let i = self.d.add_input();
            self.e(i, v);
        }
    }
    pub fn outs(&mut self, v: V, n: usize) {
        for _ in 0..n {
            let o = self.d.add_output();
            self.e(v, o);
        }
    }
    pub fn done(self) -> Diagram {
        self.d
    }
}

pub fn minus_one() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

pub type Pair = (Diagram, Diagram);

pub fn spider_fusion(a: Phase, b: Phase) -> Pair {
    let mut l = B::new();
    let (u, v) = (l.z(a), l.z(b));
    l.ins(u, 2);
    l.e(u, v);
    l.e(u, v);
    l.outs(u, 1);
    l.outs(v, 2);
    let mut r = B::new();
    let w = r.z(a + b);
    r.ins(w, 2);
    r.outs(w, 3);
    (l.done(), r.done())
}

pub fn identity_removal(_: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let v = l.z(Phase::zero());
    l.ins(v, 1);
    l.outs(v, 1);
    (l.done(), Diagram::identity(1))
}

pub fn hadamard_cancel(_: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let (h1, h2) = (l.h(minus_one()), l.h(minus_one()));
    l.ins(h1, 1);
    l.e(h1, h2);
    l.outs(h2, 1);
    (l.done(), Diagram::identity(1))
}

pub fn pi_commutation(a: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let (p, z) = (l.x(Phase::pi()), l.z(a));
    l.ins(p, 1);
    l.e(p, z);
    l.outs(z, 3);
    let mut r = B::new();
    let z = r.z(-a);
    r.ins(z, 1);
    for _ in 0..3 {
        let p = r.x(Phase::pi());
        r.e(z, p);
        r.outs(p, 1);
    }
    (l.done(), r.done())
}

pub fn state_copy(a: Phase, bit: Phase) -> Pair {
    let k = if bit.to_radians().sin() > 0.0 { Phase::pi() } else { Phase::zero() };
    let mut l = B::new();
    let (s, z) = (l.x(k), l.z(a));
    l.e(s, z);
    l.outs(z, 3);
    let mut r = B::new();
    for _ in 0..3 {
        let s = r.x(k);
        r.outs(s, 1);
    }
    (l.done(), r.done())
}

pub fn colour_change(a: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let x = l.x(a);
    for i in 0..4 {
        let hb = l.h(minus_one());
        l.e(hb, x);
        if i < 2 {
            l.ins(hb, 1);
        } else {
            l.outs(hb, 1);
        }
    }
    let mut r = B::new();
    let z = r.z(a);
    r.ins(z, 2);
    r.outs(z, 2);
    (l.done(), r.done())
}

pub fn bialgebra(m: usize, n: usize) -> Pair {
    let mut l = B::new();
    let (z, x) = (l.z(Phase::zero()), l.x(Phase::zero()));
    l.ins(z, m);
    l.e(z, x);
    l.outs(x, n);
    let mut r = B::new();
    let xs: Vec<V> = (0..m).map(|_| r.x(Phase::zero())).collect();
    let zs: Vec<V> = (0..n).map(|_| r.z(Phase::zero())).collect();
    for &x in &xs {
        r.ins(x, 1);
        for &z in &zs {
            r.e(x, z);
        }
    }
    for &z in &zs {
        r.outs(z, 1);
    }
    (l.done(), r.done())
}

pub fn hopf(_: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let (z, x) = (l.z(Phase::zero()), l.x(Phase::zero()));
    l.ins(z, 1);
    l.e(z, x);
    l.e(z, x);
    l.outs(x, 1);
    let mut r = B::new();
    let (z, x) = (r.z(Phase::zero()), r.x(Phase::zero()));
    r.ins(z, 1);
    r.outs(x, 1);
    (l.done(), r.done())
}

pub fn hadamard_self_loop(a: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let z = l.z(a);
    l.he(z, z);
    l.ins(z, 1);
    l.outs(z, 1);
    let mut r = B::new();
    let z = r.z(a + Phase::pi());
    r.ins(z, 1);
    r.outs(z, 1);
    (l.done(), r.done())
}

pub fn hopf_hadamard(a: Phase, b: Phase) -> Pair {
    let mut l = B::new();
    let (u, v) = (l.z(a), l.z(b));
    l.he(u, v);
    l.he(u, v);
    l.ins(u, 1);
    l.outs(v, 1);
    let mut r = B::new();
    let (u, v) = (r.z(a), r.z(b));
    r.ins(u, 1);
    r.outs(v, 1);
    (l.done(), r.done())
}

pub fn y_state(_: Phase, s: Phase) -> Pair {
    let sign = if s.to_radians().sin() >= 0.0 { 1 } else { -1 };
    let mut l = B::new();
    let x = l.x(Phase::new(-sign, 2));
    l.outs(x, 1);
    let mut r = B::new();
    let z = r.z(Phase::new(sign, 2));
    r.outs(z, 1);
    (l.done(), r.done())
}

pub fn gadget(b: &mut B, targets: &[V], p: Phase) {
    let hub = b.x(Phase::zero());
    let leaf = b.z(p);
    b.e(hub, leaf);
    for &t in targets {
        b.e(hub, t);
    }
}

pub fn gadget_fusion(a: Phase, c: Phase) -> Pair {
    let build = |ps: &[Phase]| {
        let mut b = B::new();
        let ts: Vec<V> = (0..2).map(|_| b.z(Phase::zero())).collect();
        for &t in &ts {
            b.ins(t, 1);
            b.outs(t, 1);
        }
        for &p in ps {
            gadget(&mut b, &ts, p);
        }
        b.done()
    };
    (build(&[a, c]), build(&[a + c]))
}

/// A +-pi/2 spider joined by Hadamard edges to three boundary spiders,
/// two of which are already adjacent.
pub fn local_complementation(a: Phase, s: Phase) -> Pair {
    let q = if s.to_radians().sin() >= 0.0 { Phase::new(1, 2) } else { Phase::new(-1, 2) };
    let phases = [a, Phase::zero(), Phase::new(1, 4)];
    let mut l = B::new();
    let v = l.z(q);
    let ns: Vec<V> = phases.iter().map(|&p| l.z(p)).collect();
    for &w in &ns {
        l.he(v, w);
        l.outs(w, 1);
    }
    l.he(ns[0], ns[1]);
    let mut r = B::new();
    let ns: Vec<V> = phases.iter().map(|&p| r.z(p - q)).collect();
    for &w in &ns {
        r.outs(w, 1);
    }
    r.he(ns[0], ns[2]);
    r.he(ns[1], ns[2]);
    (l.done(), r.done())
}

/// Adjacent Pauli spiders u (a pi) and v (b pi) with neighbourhoods
/// A = {p}, B = {q}, C = {s}.
pub fn pivot(a: Phase, b: Phase) -> Pair {
    let (pa, pb) = (if a.to_radians().sin() > 0.0 { Phase::pi() } else { Phase::zero() }, if b.to_radians().sin() > 0.0 { Phase::pi() } else { Phase::zero() });
    let mut l = B::new();
    let (u, v) = (l.z(pa), l.z(pb));
    let (p, q, s) = (l.z(Phase::new(1, 4)), l.z(Phase::zero()), l.z(Phase::new(1, 2)));
    l.he(u, v);
    l.he(u, p);
    l.he(v, q);
    l.he(u, s);
    l.he(v, s);
    for w in [p, q, s] {
        l.outs(w, 1);
    }
    let mut r = B::new();
    let (p, q, s) = (r.z(Phase::new(1, 4) + pb), r.z(pa), r.z(Phase::new(1, 2) + pa + pb + Phase::pi()));
    r.he(p, q);
    r.he(p, s);
    r.he(q, s);
    for w in [p, q, s] {
        r.outs(w, 1);
    }
    (l.done(), r.done())
}

pub fn hadamard_euler(_: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let hb = l.h(minus_one());
    l.ins(hb, 1);
    l.outs(hb, 1);
    let mut r = B::new();
    let (z1, x, z2) = (r.z(Phase::new(1, 2)), r.x(Phase::new(1, 2)), r.z(Phase::new(1, 2)));
    r.ins(z1, 1);
    r.e(z1, x);
    r.e(x, z2);
    r.outs(z2, 1);
    (l.done(), r.done())
}

pub fn cup_is_spider(_: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let z = l.z(Phase::zero());
    l.outs(z, 2);
    let mut cup = Diagram::new();
    let (o1, o2) = (cup.add_output(), cup.add_output());
    cup.add_edge(o1, o2, EdgeKind::Plain);
    (l.done(), cup)
}

// ZH identities

pub fn hbox_state(_: Phase, _: Phase) -> Pair {
    // a unary H-box labelled e^{ia} on a Z spider is a Z(a) phase
    let a = Phase::new(1, 3);
    let mut l = B::new();
    let z = l.z(Phase::zero());
    let hb = l.h(a.exp_i());
    l.e(z, hb);
    l.ins(z, 1);
    l.outs(z, 1);
    let mut r = B::new();
    let z = r.z(a);
    r.ins(z, 1);
    r.outs(z, 1);
    (l.done(), r.done())
}

pub fn hbox_fusion(_: Phase, _: Phase) -> Pair {
    let a = Complex64::new(0.5, 2.0);
    let mut l = B::new();
    let (h1, m, h2) = (l.h(a), l.h(minus_one()), l.h(minus_one()));
    l.e(h1, m);
    l.e(m, h2);
    l.ins(h1, 2);
    l.outs(h2, 2);
    let mut r = B::new();
    let hb = r.h(a);
    r.ins(hb, 2);
    r.outs(hb, 2);
    (l.done(), r.done())
}

pub fn hbox_and_gate(_: Phase, _: Phase) -> Pair {
    // an X(pi) state on a phase-free H-box leg leaves the rest unchanged
    let mut l = B::new();
    let hb = l.h(minus_one());
    let s = l.x(Phase::pi());
    l.e(s, hb);
    l.ins(hb, 2);
    let mut r = B::new();
    let hb = r.h(minus_one());
    r.ins(hb, 2);
    (l.done(), r.done())
}

pub fn hbox_unit(_: Phase, _: Phase) -> Pair {
    let mut l = B::new();
    let hb = l.h(Complex64::new(1.0, 0.0));
    l.ins(hb, 1);
    l.outs(hb, 2);
    let mut r = B::new();
    let z = r.z(Phase::zero());
    r.ins(z, 1);
    for _ in 0..2 {
        let s = r.z(Phase::zero());
        r.outs(s, 1);
    }
    (l.done(), r.done())
}

pub fn toffoli_form(_: Phase, _: Phase) -> Pair {
    let c = Circuit::new(3).with(Gate::CCX(0, 1, 2));
    (zx::zh::toffoli_diagram(2).unwrap(), circuit_to_diagram(&c, ToffoliMode::Gadgets))
}

pub fn ccz_fourier(_: Phase, _: Phase) -> Pair {
    let c = Circuit::new(3).with(Gate::CCZ(0, 1, 2));
    (circuit_to_diagram(&c, ToffoliMode::Hbox), circuit_to_diagram(&c, ToffoliMode::Gadgets))
}

pub type Rewrite = fn(Phase, Phase) -> Pair;

pub fn cheatsheet() -> Vec<(&'static str, Rewrite)> {
    vec![
        ("spider_fusion", spider_fusion),
        ("identity_removal", identity_removal),
        ("hadamard_cancel", hadamard_cancel),
        ("pi_commutation", pi_commutation),
        ("state_copy", state_copy),
        ("colour_change", colour_change),
        ("bialgebra_2x2", |_, _| bialgebra(2, 2)),
        ("bialgebra_3x2", |_, _| bialgebra(3, 2)),
        ("bialgebra_1x3", |_, _| bialgebra(1, 3)),
        ("hopf", hopf),
        ("hadamard_self_loop", hadamard_self_loop),
        ("hopf_hadamard", hopf_hadamard),
        ("y_state", y_state),
        ("gadget_fusion", gadget_fusion),
        ("local_complementation", local_complementation),
        ("pivot", pivot),
        ("hadamard_euler", hadamard_euler),
        ("cup_is_spider", cup_is_spider),
        ("hbox_state", hbox_state),
        ("hbox_fusion", hbox_fusion),
        ("hbox_and_gate", hbox_and_gate),
        ("hbox_unit", hbox_unit),
        ("toffoli_form", toffoli_form),
        ("ccz_fourier", ccz_fourier),
    ]
}


// ---- checkers ----

fn circuit_pair(name: &str, a: &Circuit, b: &Circuit) -> Result<(), String> {
    let (ma, mb) = (circuit_matrix(a).map_err(|e| e.to_string())?, circuit_matrix(b).map_err(|e| e.to_string())?);
    if proportional(&ma, &mb, TOL).ok().flatten().and_then(|p| p.factor()).is_none() {
        return Err(format!("{name}: matrices differ"));
    }
    for mode in [ToffoliMode::Hbox, ToffoliMode::Gadgets] {
        let da = evaluate(&circuit_to_diagram(a, mode)).map_err(|e| e.to_string())?;
        let db = evaluate(&circuit_to_diagram(b, mode)).map_err(|e| e.to_string())?;
        if !(da.approx_eq(&ma, TOL) && db.approx_eq(&mb, TOL)) {
            return Err(format!("{name}: diagram semantics ({mode:?})"));
        }
    }
    match verify(a, b, &VerifyOptions::default()).map_err(|e| e.to_string())?.verdict {
        Verdict::EqualProved | Verdict::EqualNumeric => Ok(()),
        v => Err(format!("{name}: verify said {v}")),
    }
}

/// Checks every circuit identity plain, with phases negated, daggered and
/// conjugated by Hadamards. Returns the number of checks and the failures.
pub fn check_circuit_identities() -> (usize, Vec<String>) {
    let angles = [(Phase::new(1, 4), Phase::new(3, 2)), (Phase::real(0.3), Phase::real(-1.1)), (Phase::pi(), Phase::new(1, 3))];
    let (mut checked, mut failed) = (0, Vec::new());
    for (name, build) in circuit_identities() {
        for &(a, b) in &angles {
            for (sign, tag) in [(1, "plain"), (-1, "negated")] {
                let (n, l, r) = build(a.scale(sign), b.scale(sign));
                let (l, r) = (circuit(n, l), circuit(n, r));
                let cases = [
                    (format!("{name}/{tag}"), l.clone(), r.clone()),
                    (format!("{name}/{tag}/dagger"), l.inverse(), r.inverse()),
                    (format!("{name}/{tag}/colour"), colour_swapped(&l), colour_swapped(&r)),
                ];
                for (label, l, r) in cases {
                    checked += 1;
                    if let Err(e) = circuit_pair(&label, &l, &r) {
                        failed.push(e);
                    }
                }
            }
        }
    }
    (checked, failed)
}

fn diagram_pair(name: &str, l: &Diagram, r: &Diagram) -> Result<(), String> {
    let (a, b) = (evaluate(l).map_err(|e| e.to_string())?, evaluate(r).map_err(|e| e.to_string())?);
    match proportional(&a, &b, TOL).ok().flatten().and_then(|p| p.factor()) {
        Some(_) => Ok(()),
        None => Err(format!("{name}: not proportional")),
    }
}

fn has_hbox(d: &Diagram) -> bool {
    d.vertices().any(|(_, k)| matches!(k, VertexKind::H(_)))
}

/// Checks every cheatsheet rewrite, also transposed, conjugated, and with
/// colours swapped where the pair has no H-boxes.
pub fn check_cheatsheet() -> (usize, Vec<String>) {
    let angles = [
        (Phase::new(1, 4), Phase::new(1, 2)),
        (Phase::real(1.3), Phase::real(-0.4)),
        (Phase::new(5, 3), Phase::new(3, 2)),
        (Phase::zero(), Phase::pi()),
    ];
    let (mut checked, mut failed) = (0, Vec::new());
    for (name, build) in cheatsheet() {
        for &(a, b) in &angles {
            let (l, r) = build(a, b);
            let mut cases = vec![
                (name.to_string(), l.clone(), r.clone()),
                (format!("{name}/flipped"), l.transpose(), r.transpose()),
                (format!("{name}/negated"), l.conjugate(), r.conjugate()),
            ];
            if !has_hbox(&l) && !has_hbox(&r) {
                cases.push((format!("{name}/colours"), super::swap_colours(&l), super::swap_colours(&r)));
            }
            for (label, l, r) in cases {
                checked += 1;
                if let Err(e) = diagram_pair(&label, &l, &r) {
                    failed.push(e);
                }
            }
        }
    }
    (checked, failed)
}

/// Applies a planted instance of every rule, round-trips the step through
/// JSON lines and replays it on the original diagram.
pub fn check_trace_replay(seeds: u64) -> (usize, Vec<String>) {
    let (mut checked, mut failed) = (0, Vec::new());
    for &rule in Rule::ALL {
        let mut replayed = 0;
        for seed in 0..seeds {
            let mut g = super::Gen::new(seed * 7919 + rule as u64);
            super::plant(rule, &mut g);
            let start = g.d.clone();
            let Some(m) = find(rule, &start).into_iter().next() else { continue };
            let mut d = start.clone();
            let step = match apply(&mut d, &m) {
                Ok(s) => s,
                Err(e) => {
                    failed.push(format!("{rule} seed {seed}: {e}"));
                    continue;
                }
            };
            let trace = trace_from_jsonl(&trace_to_jsonl(std::slice::from_ref(&step)));
            let ok = match trace {
                Ok(t) => t[0].rule == rule
                    && replay(&start, &t).is_ok_and(|again| again.is_isomorphic_by_id(&d) && again.scalar == d.scalar),
                Err(_) => false,
            };
            checked += 1;
            replayed += 1;
            if !ok {
                failed.push(format!("{rule} seed {seed}: replay diverged"));
            }
        }
        if replayed == 0 {
            failed.push(format!("{rule}: never matched"));
        }
    }
    (checked, failed)
}
