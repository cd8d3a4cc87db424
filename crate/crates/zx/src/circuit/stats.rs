use std::fmt;

use super::{Circuit, Gate};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Stats {
    pub t_count: usize,
    pub two_qubit_count: usize,
    pub total: usize,
    pub depth: usize,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gates={} t={} 2q={} depth={}", self.total, self.t_count, self.two_qubit_count, self.depth)
    }
}

fn t_cost(g: &Gate) -> usize {
    match g {
        Gate::T(_) | Gate::Tdg(_) => 1,
        Gate::RZ(_, p) | Gate::RX(_, p) | Gate::PhaseGadget(_, p) => usize::from(p.is_t_like()),
        Gate::CCX(..) | Gate::CCZ(..) => 7,
        _ => 0,
    }
}

pub fn stats(c: &Circuit) -> Stats {
    let mut level = vec![0usize; c.qubits];
    let mut depth = 0;
    for g in &c.gates {
        let qs = g.qubits();
        let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for q in qs {
            level[q] = l;
        }
        depth = depth.max(l);
    }
    Stats {
        t_count: c.gates.iter().map(t_cost).sum(),
        two_qubit_count: c.gates.iter().filter(|g| g.qubits().len() == 2).count(),
        total: c.gates.len(),
        depth,
    }
}
