//! Random diagrams with a planted instance of a chosen rule, and the
//! reference corpora.
#![allow(dead_code)]

pub mod corpora;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zx::rules::Rule;
use zx::{Diagram, EdgeKind, Phase, VertexKind, V};

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub d: Diagram,
    boundaries: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), d: Diagram::new(), boundaries: 0 }
    }

    fn phase(&mut self) -> Phase {
        if self.rng.gen_bool(0.1) {
            Phase::real(self.rng.gen_range(-3.0..3.0))
        } else {
            Phase::new(self.rng.gen_range(0..8), 4)
        }
    }

    fn pauli(&mut self) -> Phase {
        if self.rng.gen_bool(0.5) { Phase::zero() } else { Phase::pi() }
    }

    fn kind(&mut self) -> EdgeKind {
        if self.rng.gen_bool(0.5) { EdgeKind::Plain } else { EdgeKind::Hadamard }
    }

    fn spider(&mut self) -> VertexKind {
        let p = self.phase();
        if self.rng.gen_bool(0.5) { VertexKind::Z(p) } else { VertexKind::X(p) }
    }

    fn label(&mut self) -> Complex64 {
        let choices = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            Complex64::new(0.5, -0.25),
            Complex64::new(2.0, 0.0),
        ];
        choices[self.rng.gen_range(0..choices.len())]
    }

    fn add(&mut self, k: VertexKind) -> V {
        self.d.add_vertex(k)
    }

    /// A leg from `v` to a boundary or to a fresh random spider.
    fn leg(&mut self, v: V, k: EdgeKind) {
        if self.boundaries < 4 && self.rng.gen_bool(0.6) {
            self.boundaries += 1;
            let b = if self.rng.gen_bool(0.5) { self.d.add_input() } else { self.d.add_output() };
            self.d.add_edge(v, b, k);
        } else {
            let k2 = self.spider();
            let w = self.add(k2);
            self.d.add_edge(v, w, k);
            if self.rng.gen_bool(0.5) {
                let k3 = self.kind();
                self.leg_to_boundary(w, k3);
            }
        }
    }

    fn leg_to_boundary(&mut self, v: V, k: EdgeKind) {
        if self.boundaries < 4 {
            self.boundaries += 1;
            let b = if self.rng.gen_bool(0.5) { self.d.add_input() } else { self.d.add_output() };
            self.d.add_edge(v, b, k);
        }
    }

    fn legs(&mut self, v: V, lo: usize, hi: usize) {
        let n = self.rng.gen_range(lo..=hi);
        for _ in 0..n {
            let k = self.kind();
            self.leg(v, k);
        }
    }

    /// A Z spider with random legs, joined plainly to `v`.
    fn z_neighbour(&mut self, v: V) -> V {
        let p = self.phase();
        let z = self.add(VertexKind::Z(p));
        self.d.add_edge(v, z, EdgeKind::Plain);
        self.legs(z, 0, 1);
        z
    }

    fn graph_neighbours(&mut self, centre: &[V], n: usize) -> Vec<V> {
        let ns: Vec<V> = (0..n)
            .map(|_| {
                let p = self.phase();
                self.add(VertexKind::Z(p))
            })
            .collect();
        for &w in &ns {
            for &c in centre {
                if self.rng.gen_bool(0.7) {
                    self.d.add_edge(c, w, EdgeKind::Hadamard);
                }
            }
            let k = self.kind();
            if self.rng.gen_bool(0.6) {
                self.leg(w, k);
            }
        }
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                if self.rng.gen_bool(0.4) {
                    self.d.add_edge(ns[i], ns[j], EdgeKind::Hadamard);
                }
            }
        }
        ns
    }
}

pub fn plant(rule: Rule, g: &mut Gen) {
    use VertexKind::*;
    match rule {
        Rule::Fusion => {
            let p = g.phase();
            let q = g.phase();
            let (u, v) = if g.rng.gen_bool(0.5) { (g.add(Z(p)), g.add(Z(q))) } else { (g.add(X(p)), g.add(X(q))) };
            g.d.add_edge(u, v, EdgeKind::Plain);
            if g.rng.gen_bool(0.3) {
                let k = g.kind();
                g.d.add_edge(u, v, k);
            }
            g.legs(u, 0, 2);
            g.legs(v, 0, 2);
        }
        Rule::RemoveIdentity => {
            let k = g.spider();
            let v = g.add(k);
            g.d.set_phase(v, Phase::zero());
            g.legs(v, 2, 2);
        }
        Rule::RemoveSelfLoop => {
            let k = g.spider();
            let v = g.add(k);
            for _ in 0..g.rng.gen_range(1..=2) {
                let k = g.kind();
                g.d.add_edge(v, v, k);
            }
            g.legs(v, 1, 2);
        }
        Rule::CancelHH | Rule::HBoxToEdge | Rule::EulerHadamardBox => {
            let h1 = g.add(H(Complex64::new(-1.0, 0.0)));
            if rule == Rule::CancelHH {
                let h2 = g.add(H(Complex64::new(-1.0, 0.0)));
                let k = g.kind();
                g.d.add_edge(h1, h2, k);
                g.legs(h1, 1, 1);
                g.legs(h2, 1, 1);
            } else {
                g.legs(h1, 2, 2);
            }
        }
        Rule::PiCopy | Rule::StateCopy => {
            let p = if rule == Rule::PiCopy { Phase::pi() } else { g.pauli() };
            let q = g.phase();
            let (x, z) = if g.rng.gen_bool(0.5) { (g.add(X(p)), g.add(Z(q))) } else { (g.add(Z(p)), g.add(X(q))) };
            g.d.add_edge(x, z, EdgeKind::Plain);
            if rule == Rule::PiCopy {
                g.legs(x, 1, 1);
            }
            g.legs(z, 0, 3);
        }
        Rule::ColorChange => {
            let k = g.spider();
            let v = g.add(k);
            g.legs(v, 0, 3);
            if g.rng.gen_bool(0.3) {
                let k = g.kind();
                g.d.add_edge(v, v, k);
            }
        }
        Rule::Bialgebra => {
            let z = g.add(Z(Phase::zero()));
            let x = g.add(X(Phase::zero()));
            g.d.add_edge(z, x, EdgeKind::Plain);
            g.legs(z, 1, 3);
            g.legs(x, 1, 3);
        }
        Rule::Hopf => {
            let p = g.phase();
            let q = g.phase();
            let u = g.add(Z(p));
            if g.rng.gen_bool(0.5) {
                let v = g.add(X(q));
                g.d.add_edge(u, v, EdgeKind::Plain);
                g.d.add_edge(u, v, EdgeKind::Plain);
                g.legs(u, 0, 2);
                g.legs(v, 0, 2);
            } else {
                let v = g.add(Z(q));
                g.d.add_edge(u, v, EdgeKind::Hadamard);
                g.d.add_edge(u, v, EdgeKind::Hadamard);
                g.legs(u, 0, 2);
                g.legs(v, 0, 2);
            }
        }
        Rule::FusePhaseGadgets => {
            let n = g.rng.gen_range(1..=3);
            let ts: Vec<V> = (0..n)
                .map(|_| {
                    let p = g.phase();
                    let t = g.add(Z(p));
                    g.legs(t, 0, 1);
                    t
                })
                .collect();
            let x_hub = g.rng.gen_bool(0.5);
            for _ in 0..2 {
                let hp = g.pauli();
                let lp = g.phase();
                let (hub, kind) = if x_hub { (g.add(X(hp)), EdgeKind::Plain) } else { (g.add(Z(hp)), EdgeKind::Hadamard) };
                let leaf = g.add(Z(lp));
                g.d.add_edge(hub, leaf, kind);
                for &t in &ts {
                    g.d.add_edge(hub, t, kind);
                }
            }
        }
        Rule::EulerHadamardEdge => {
            let a = g.spider();
            let b = g.spider();
            let (a, b) = (g.add(a), g.add(b));
            g.d.add_edge(a, b, EdgeKind::Hadamard);
            g.legs(a, 0, 2);
            g.legs(b, 0, 2);
        }
        Rule::AbsorbScalar => {
            let k = if g.rng.gen_bool(0.3) {
                let l = g.label();
                H(l)
            } else {
                g.spider()
            };
            g.add(k);
            let other = g.spider();
            let v = g.add(other);
            g.legs(v, 1, 2);
        }
        Rule::InsertIdentity => {
            let k = g.spider();
            let v = g.add(k);
            let e = g.kind();
            g.leg_to_boundary(v, e);
            g.legs(v, 0, 2);
        }
        Rule::LocalComplement => {
            let p = if g.rng.gen_bool(0.5) { Phase::new(1, 2) } else { Phase::new(-1, 2) };
            let v = g.add(Z(p));
            let n = g.rng.gen_range(1..=4);
            g.graph_neighbours(&[v], n);
        }
        Rule::Pivot | Rule::BoundaryPivot => {
            let p = g.pauli();
            let u = g.add(Z(p));
            let q = if rule == Rule::Pivot { g.pauli() } else { Phase::new(g.rng.gen_range(0..4), 2) };
            let v = g.add(Z(q));
            g.d.add_edge(u, v, EdgeKind::Hadamard);
            let n = g.rng.gen_range(0..=3);
            g.graph_neighbours(&[u, v], n);
            if rule == Rule::BoundaryPivot {
                for _ in 0..g.rng.gen_range(1..=2) {
                    let k = g.kind();
                    g.leg_to_boundary(v, k);
                }
            }
        }
        Rule::HBoxFusion => {
            let l = g.label();
            let h1 = g.add(H(l));
            let h2 = g.add(H(Complex64::new(-1.0, 0.0)));
            if g.rng.gen_bool(0.5) {
                g.d.add_edge(h1, h2, EdgeKind::Hadamard);
            } else {
                let m = g.add(H(Complex64::new(-1.0, 0.0)));
                g.d.add_edge(h1, m, EdgeKind::Plain);
                g.d.add_edge(m, h2, EdgeKind::Plain);
            }
            g.legs(h1, 0, 2);
            g.legs(h2, 0, 2);
        }
        Rule::AbsorbOne | Rule::ExplodeZero => {
            let l = g.label();
            let h = g.add(H(l));
            let p = if rule == Rule::AbsorbOne { Phase::pi() } else { Phase::zero() };
            let s = g.add(X(p));
            g.d.add_edge(s, h, EdgeKind::Plain);
            g.legs(h, 0, 3);
        }
        Rule::ZhBialgebra => {
            let h = g.add(H(Complex64::new(-1.0, 0.0)));
            let x = g.add(X(Phase::zero()));
            g.d.add_edge(h, x, EdgeKind::Plain);
            g.legs(h, 0, 3);
            g.legs(x, 0, 3);
        }
        Rule::UnitDecompose => {
            let h = g.add(H(Complex64::new(1.0, 0.0)));
            g.legs(h, 0, 3);
        }
        Rule::MultiplyHBoxes | Rule::AverageHBoxes | Rule::Intro => {
            let a = g.label();
            let b = if rule == Rule::Intro { a } else { g.label() };
            let h1 = g.add(H(a));
            let h2 = g.add(H(b));
            let n = g.rng.gen_range(0..=2);
            for _ in 0..n {
                let z = g.z_neighbour(h1);
                g.d.add_edge(h2, z, EdgeKind::Plain);
            }
            match rule {
                Rule::AverageHBoxes => {
                    let x = g.add(X(Phase::pi()));
                    g.d.add_edge(h1, x, EdgeKind::Plain);
                    g.d.add_edge(x, h2, EdgeKind::Plain);
                }
                Rule::Intro => {
                    let p = g.phase();
                    let z = g.add(Z(p));
                    g.legs(z, 0, 2);
                    let x = g.add(X(Phase::pi()));
                    g.d.add_edge(h1, z, EdgeKind::Plain);
                    g.d.add_edge(h2, x, EdgeKind::Plain);
                    g.d.add_edge(x, z, EdgeKind::Plain);
                }
                _ => {}
            }
        }
        Rule::CczDecompose => {
            let t = Phase::new(g.rng.gen_range(0..8), 4).exp_i();
            let l = if g.rng.gen_bool(0.8) { t } else { Complex64::from_polar(1.0, 0.3) };
            let h = g.add(H(l));
            for _ in 0..g.rng.gen_range(2..=3) {
                g.z_neighbour(h);
            }
        }
    }
}

pub fn swap_colours(d: &Diagram) -> Diagram {
    let mut d = d.clone();
    for (v, k) in d.vertices().collect::<Vec<_>>() {
        match k {
            VertexKind::Z(p) => d.set_kind(v, VertexKind::X(p)),
            VertexKind::X(p) => d.set_kind(v, VertexKind::Z(p)),
            _ => {}
        }
    }
    d
}


/// Applies each match of `rule` to a fresh copy of `d` and compares exact
/// tensors. Returns how many applied and a description of each failure.
pub fn check_matches(rule: Rule, d: &Diagram, seed: u64, tol: f64) -> (usize, Vec<String>) {
    let Ok(before) = zx::tensor::evaluate(d) else { return (0, Vec::new()) };
    let (mut applied, mut failed) = (0, Vec::new());
    for m in zx::rules::find(rule, d) {
        let mut e = d.clone();
        let step = match zx::rules::apply(&mut e, &m) {
            Ok(s) => s,
            Err(err) => {
                failed.push(format!("{rule} seed {seed}: found match failed: {err}"));
                continue;
            }
        };
        applied += 1;
        if !e.validate().is_empty() {
            failed.push(format!("{rule} seed {seed}: invalid result {:?}", e.validate()));
            continue;
        }
        match zx::tensor::evaluate(&e) {
            Ok(after) if before.approx_eq(&after, tol) => {}
            Ok(after) => failed.push(format!(
                "{rule} seed {seed} match {:?} (scalar {:?}) changed the tensor\nbefore {before:?}\nafter {after:?}",
                m.vertices, step.scalar
            )),
            Err(err) => failed.push(format!("{rule} seed {seed}: result not evaluable: {err}")),
        }
    }
    (applied, failed)
}

/// Soundness of `rule` over `seeds` planted diagrams and their colour swaps.
pub fn check_soundness(rule: Rule, seeds: u64, tol: f64) -> (usize, Vec<String>) {
    let (mut n, mut failed) = (0, Vec::new());
    for seed in 0..seeds {
        let mut g = Gen::new(seed * 1000 + rule as u64);
        plant(rule, &mut g);
        for d in [g.d.clone(), swap_colours(&g.d)] {
            let (k, f) = check_matches(rule, &d, seed, tol);
            n += k;
            failed.extend(f);
        }
    }
    (n, failed)
}
