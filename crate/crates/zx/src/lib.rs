//! ZX and ZH diagrams: construction, tensor semantics, rewriting,
//! Clifford simplification and circuit extraction.

pub mod circuit;
pub mod diagram;
pub mod equiv;
pub mod extract;
pub mod json;
pub mod phase;
pub mod rules;
pub mod scalar;
pub mod simplify;
pub mod tensor;
pub mod zh;

pub use diagram::{Color, Diagram, EdgeKind, VertexKind, V};
pub use phase::Phase;
pub use scalar::Scalar;
