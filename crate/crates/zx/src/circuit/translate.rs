//! Gate-by-gate translation of circuits into diagrams. Scalars are applied
//! as gates are added so the result evaluates to the circuit's unitary
//! exactly.

use num_complex::Complex64;

use super::{Circuit, Gate};
use crate::diagram::{Diagram, EdgeKind, VertexKind, V};
use crate::phase::Phase;
use crate::scalar::Scalar;

/// How CCX and CCZ are translated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ToffoliMode {
    /// One arity-3 H-box on three Z spiders.
    #[default]
    Hbox,
    /// Three T phases and four phase gadgets.
    Gadgets,
}

impl std::str::FromStr for ToffoliMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hbox" => Ok(ToffoliMode::Hbox),
            "gadgets" => Ok(ToffoliMode::Gadgets),
            _ => Err(format!("unknown toffoli mode {s:?} (hbox|gadgets)")),
        }
    }
}

struct Builder {
    d: Diagram,
    frontier: Vec<V>,
    pending: Vec<EdgeKind>,
}

impl Builder {
    fn spider(&mut self, q: usize, kind: VertexKind) -> V {
        let v = self.d.add_vertex(kind);
        self.d.add_edge(self.frontier[q], v, self.pending[q]);
        self.frontier[q] = v;
        self.pending[q] = EdgeKind::Plain;
        v
    }

    fn z(&mut self, q: usize, p: Phase) -> V {
        self.spider(q, VertexKind::Z(p))
    }

    fn x(&mut self, q: usize, p: Phase) -> V {
        self.spider(q, VertexKind::X(p))
    }

    fn hadamard(&mut self, q: usize) {
        self.pending[q] = self.pending[q].toggled();
    }

    fn scale(&mut self, s: Scalar) {
        self.d.scalar *= s;
    }

    fn gadget(&mut self, qs: &[usize], p: Phase) {
        match qs {
            [] => {}
            [q] => {
                self.z(*q, p);
            }
            _ => {
                let hub = self.d.add_vertex(VertexKind::X(Phase::zero()));
                let leaf = self.d.add_vertex(VertexKind::Z(p));
                self.d.add_edge(hub, leaf, EdgeKind::Plain);
                for &q in qs {
                    let v = self.z(q, Phase::zero());
                    self.d.add_edge(v, hub, EdgeKind::Plain);
                }
                self.scale(Scalar::sqrt2_pow(qs.len() as i32 - 1));
            }
        }
    }

    fn ccz(&mut self, a: usize, b: usize, c: usize, mode: ToffoliMode) {
        if mode == ToffoliMode::Hbox && cfg!(feature = "zh") {
            let h = self.d.add_vertex(VertexKind::H(Complex64::new(-1.0, 0.0)));
            for q in [a, b, c] {
                let v = self.z(q, Phase::zero());
                self.d.add_edge(v, h, EdgeKind::Plain);
            }
        } else {
            // abc = (a + b + c - a^b - a^c - b^c + a^b^c) / 4
            let t = Phase::new(1, 4);
            for q in [a, b, c] {
                self.z(q, t);
            }
            let mut pairs = [[a, b], [a, c], [b, c]];
            for p in pairs.iter_mut() {
                p.sort_unstable();
                self.gadget(p, -t);
            }
            let mut all = [a, b, c];
            all.sort_unstable();
            self.gadget(&all, t);
        }
    }
}

pub fn circuit_to_diagram(c: &Circuit, mode: ToffoliMode) -> Diagram {
    let mut d = Diagram::new();
    let frontier: Vec<V> = (0..c.qubits).map(|_| d.add_input()).collect();
    let mut b = Builder { d, frontier, pending: vec![EdgeKind::Plain; c.qubits] };
    for g in &c.gates {
        match g {
            Gate::H(q) => b.hadamard(*q),
            Gate::X(q) => {
                b.x(*q, Phase::pi());
            }
            Gate::Y(q) => {
                b.z(*q, Phase::pi());
                b.x(*q, Phase::pi());
                b.scale(Scalar::from_complex(Complex64::new(0.0, 1.0)));
            }
            Gate::Z(q) => {
                b.z(*q, Phase::pi());
            }
            Gate::S(q) => {
                b.z(*q, Phase::new(1, 2));
            }
            Gate::Sdg(q) => {
                b.z(*q, Phase::new(3, 2));
            }
            Gate::T(q) => {
                b.z(*q, Phase::new(1, 4));
            }
            Gate::Tdg(q) => {
                b.z(*q, Phase::new(7, 4));
            }
            Gate::RZ(q, p) => {
                b.z(*q, *p);
            }
            Gate::RX(q, p) => {
                b.x(*q, *p);
                // the X spider is e^{ip/2} RX(p)
                b.scale(Scalar::from_complex(Complex64::from_polar(1.0, -p.to_radians() / 2.0)));
            }
            Gate::CX(ctl, tgt) => {
                let u = b.z(*ctl, Phase::zero());
                let v = b.x(*tgt, Phase::zero());
                b.d.add_edge(u, v, EdgeKind::Plain);
                b.scale(Scalar::sqrt2_pow(1));
            }
            Gate::CZ(x, y) => {
                let u = b.z(*x, Phase::zero());
                let v = b.z(*y, Phase::zero());
                b.d.add_edge(u, v, EdgeKind::Hadamard);
                b.scale(Scalar::sqrt2_pow(1));
            }
            Gate::Swap(x, y) => {
                b.frontier.swap(*x, *y);
                b.pending.swap(*x, *y);
            }
            Gate::CCZ(x, y, z) => b.ccz(*x, *y, *z, mode),
            Gate::CCX(x, y, t) => {
                b.hadamard(*t);
                b.ccz(*x, *y, *t, mode);
                b.hadamard(*t);
            }
            Gate::PhaseGadget(qs, p) => b.gadget(qs, *p),
        }
    }
    let Builder { mut d, frontier, pending } = b;
    for (v, k) in frontier.into_iter().zip(pending) {
        let o = d.add_output();
        d.add_edge(v, o, k);
    }
    d
}
