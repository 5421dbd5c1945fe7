//! Train track representatives of free group outer automorphisms.
//!
//! The crate verifies train track structure of graph self-maps, computes
//! dilatations and eigenmetrics, searches for Nielsen paths, builds local,
//! stable and ideal Whitehead graphs, decomposes maps into Stallings folds and
//! decides whether an automorphism has a lone axis in Outer Space. Lone-axis
//! automorphisms get a canonical axis signature used to detect conjugate
//! powers.

pub mod axes;
pub mod cli;
pub mod document;
pub mod error;
pub mod folds;
pub mod graph;
pub mod halfint;
pub mod iso;
pub mod nielsen;
pub mod spectral;
pub mod traintrack;
pub mod whitehead;

pub use error::{Error, Result};
pub use graph::{apply_map, compose, power, tighten, Direction, Edge, EdgePair, EdgePath, GraphMap, MarkedGraph, Turn, Vertex, VertexId};
pub use halfint::HalfInt;
