//! Bratteli diagrams: exact dimension arithmetic, telescoping and bounded
//! equivalence search, stationary dimension-group invariants, ordered
//! diagrams with Vershik dynamics, and subfactor tower diagrams.

pub mod diagram;
pub mod dimension_group;
pub mod equivalence;
pub mod error;
pub mod generators;
pub mod io;
pub mod matrix;
pub mod perron;
pub mod quadratic;
pub mod simplicity;
pub mod towers;
pub mod vershik;

pub use diagram::{BratteliDiagram, DimensionVector};
pub use error::DiagramError;
pub use matrix::Matrix;
