//! Graphviz and TikZ output. Z spiders are white circles, X spiders grey
//! circles, H-boxes squares, Hadamard edges dashed; inputs sit on the left
//! and outputs on the right.

use crate::diagram::{Diagram, EdgeKind, VertexKind};

fn label(k: VertexKind) -> String {
    match k {
        VertexKind::Z(p) | VertexKind::X(p) if p.is_zero() => String::new(),
        VertexKind::Z(p) | VertexKind::X(p) => p.to_string(),
        VertexKind::H(a) if a == num_complex::Complex64::new(-1.0, 0.0) => String::new(),
        VertexKind::H(a) => format!("{a}"),
        VertexKind::B => String::new(),
    }
}

pub fn diagram_to_dot(d: &Diagram) -> String {
    let mut s = String::from("graph zx {\n  rankdir=LR;\n  node [fontsize=10];\n");
    for (v, k) in d.vertices() {
        let attrs = match k {
            VertexKind::Z(_) => "shape=circle, style=filled, fillcolor=white".to_string(),
            VertexKind::X(_) => "shape=circle, style=filled, fillcolor=gray".to_string(),
            VertexKind::H(_) => "shape=square, style=filled, fillcolor=yellow".to_string(),
            VertexKind::B => "shape=point".to_string(),
        };
        s += &format!("  v{v} [{attrs}, label=\"{}\"];\n", label(k));
    }
    for (name, list) in [("min", d.inputs()), ("max", d.outputs())] {
        if !list.is_empty() {
            let ids: Vec<String> = list.iter().map(|v| format!("v{v}")).collect();
            s += &format!("  {{ rank={name}; {} }}\n", ids.join("; "));
        }
    }
    for (a, b, k) in d.edges() {
        let style = if k == EdgeKind::Hadamard { " [style=dashed, color=blue]" } else { "" };
        s += &format!("  v{a} -- v{b}{style};\n");
    }
    s + "}\n"
}

pub fn diagram_to_tikz(d: &Diagram) -> String {
    let mut s = String::from(
        "\\begin{tikzpicture}\n\
         \\tikzstyle{Z}=[circle, draw, fill=white, inner sep=1pt]\n\
         \\tikzstyle{X}=[circle, draw, fill=gray!60, inner sep=1pt]\n\
         \\tikzstyle{H}=[rectangle, draw, fill=yellow, inner sep=2pt]\n\
         \\tikzstyle{B}=[inner sep=0pt]\n\
         \\tikzstyle{hadamard}=[dashed, blue]\n",
    );
    // boundaries at the sides; interior vertices in a grid by id order
    let interior: Vec<_> = d.vertices().filter(|(v, _)| !d.inputs().contains(v) && !d.outputs().contains(v)).collect();
    let cols = (interior.len() as f64).sqrt().ceil().max(1.0) as usize;
    let right = cols as f64 + 1.0;
    for (v, k) in d.vertices() {
        let (x, y) = if let Some(i) = d.inputs().iter().position(|&b| b == v) {
            (0.0, -(i as f64))
        } else if let Some(i) = d.outputs().iter().position(|&b| b == v) {
            (right, -(i as f64))
        } else {
            let i = interior.iter().position(|&(w, _)| w == v).unwrap();
            (1.0 + (i % cols) as f64, -((i / cols) as f64))
        };
        let style = match k {
            VertexKind::Z(_) => "Z",
            VertexKind::X(_) => "X",
            VertexKind::H(_) => "H",
            VertexKind::B => "B",
        };
        s += &format!("\\node [style={style}] (v{v}) at ({x}, {y}) {{${}$}};\n", label(k).replace("pi", "\\pi"));
    }
    for (a, b, k) in d.edges() {
        let style = if k == EdgeKind::Hadamard { "[style=hadamard] " } else { "" };
        s += &format!("\\draw {style}(v{a}) to (v{b});\n");
    }
    s + "\\end{tikzpicture}\n"
}
