//! Combinatorial 1-Sullivan diagrams: enumeration of cells, exact integral
//! homology, discrete Morse flows, and operations on homology classes.

pub mod chain;
pub mod complex;
pub mod diagram;
pub mod homology;
pub mod morse;
pub mod ops;
pub mod perm;
pub mod verify;

pub use chain::Chain;
pub use complex::{build_complex, BuildOptions, ChainComplex, ComplexError, Component};
pub use diagram::{Diagram, DiagramError, Flavor, Ghost, TopType, ValidationError};
pub use homology::{homology, is_boundary, HomologyError, HomologyGroup};
pub use morse::flow::{build_matching, classify, restrict_matching, FlowMatching, Status};
pub use morse::{morse_complex, CellularGraph, Matching, MorseComplex, MorseError};
pub use ops::OpsError;
pub use perm::{Permutation, Symbol};
