//! `.zx.json` reading and writing.

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, EdgeKind, VertexKind, Violation, V};
use crate::phase::Phase;
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid diagram: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PhaseJson {
    Exact([i64; 2]),
    Real { real: f64 },
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: V,
    kind: String,
    phase: Option<PhaseJson>,
    label: Option<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    vertices: Vec<VertexJson>,
    edges: Vec<(V, V, String)>,
    inputs: Vec<V>,
    outputs: Vec<V>,
    scalar: [f64; 2],
}

fn phase_json(p: Phase) -> PhaseJson {
    match p {
        Phase::Exact(r) => PhaseJson::Exact([*r.numer(), *r.denom()]),
        Phase::Real(x) => PhaseJson::Real { real: x },
    }
}

pub fn to_json(d: &Diagram) -> String {
    let vertices = d
        .vertices()
        .map(|(id, k)| {
            let (kind, phase, label) = match k {
                VertexKind::Z(p) => ("Z", Some(phase_json(p)), None),
                VertexKind::X(p) => ("X", Some(phase_json(p)), None),
                VertexKind::H(a) => ("H", None, Some([a.re, a.im])),
                VertexKind::B => ("B", None, None),
            };
            VertexJson { id, kind: kind.into(), phase, label }
        })
        .collect();
    let edges = d
        .edges()
        .into_iter()
        .map(|(a, b, k)| (a, b, if k == EdgeKind::Plain { "P" } else { "H" }.to_string()))
        .collect();
    let s = d.scalar.value();
    let doc = DiagramJson {
        vertices,
        edges,
        inputs: d.inputs().to_vec(),
        outputs: d.outputs().to_vec(),
        scalar: [s.re, s.im],
    };
    serde_json::to_string(&doc).expect("diagram serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Diagram, JsonError> {
    let doc: DiagramJson = serde_json::from_str(text).map_err(|e| JsonError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let mut d = Diagram::new();
    for v in doc.vertices {
        if d.contains(v.id) {
            return Err(JsonError::Schema(format!("duplicate vertex id {}", v.id)));
        }
        let phase = match v.phase {
            None => Phase::zero(),
            Some(PhaseJson::Exact([n, den])) => {
                if den <= 0 {
                    return Err(JsonError::Schema(format!("vertex {}: denominator must be positive", v.id)));
                }
                Phase::from_rational(Rational64::new(n, den))
            }
            Some(PhaseJson::Real { real }) => Phase::real(real),
        };
        let kind = match v.kind.as_str() {
            "Z" => VertexKind::Z(phase),
            "X" => VertexKind::X(phase),
            "H" => {
                let [re, im] = v.label.unwrap_or([-1.0, 0.0]);
                VertexKind::H(Complex64::new(re, im))
            }
            "B" => VertexKind::B,
            other => return Err(JsonError::Schema(format!("vertex {}: unknown kind {other:?}", v.id))),
        };
        d.add_vertex_with_id(v.id, kind);
    }
    for (a, b, k) in doc.edges {
        let kind = match k.as_str() {
            "P" => EdgeKind::Plain,
            "H" => EdgeKind::Hadamard,
            other => return Err(JsonError::Schema(format!("edge {a}-{b}: unknown kind {other:?}"))),
        };
        d.add_edge(a, b, kind);
    }
    d.set_inputs(doc.inputs);
    d.set_outputs(doc.outputs);
    d.scalar = Scalar::from_complex(Complex64::new(doc.scalar[0], doc.scalar[1]));
    let report = d.validate();
    if !report.is_empty() {
        return Err(JsonError::Invalid(report));
    }
    Ok(d)
}
