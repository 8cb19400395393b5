//! Named homology classes, composition along incoming boundaries, the maps
//! between the four flavors, and evaluation of diagrams as operations on
//! Hochschild chains of `Z[x]/(x²)`.

pub mod classes;
pub mod compose;
pub mod hochschild;
pub mod maps;

use thiserror::Error;

use crate::complex::ComplexError;
use crate::diagram::{DiagramError, Flavor};

pub use classes::{big_gamma, big_omega, eta, gamma, mu, omega, zeta};
pub use compose::{compose, compose_chains};
pub use hochschild::{evaluate, DualNumbers, Frobenius, Resolution, Tensor};
pub use maps::{forget_enumeration, forget_leaves, stabilize, transfer_preimages};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpsError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{0}")]
    Range(String),
    #[error("{leaves} leaves but {inputs} inputs")]
    Arity { leaves: usize, inputs: usize },
    #[error("expected flavor {expected}, found {found}")]
    Flavor { expected: Flavor, found: Flavor },
    #[error("ghost S{ghost} of {cell} is not a disk")]
    UnsupportedGhost { ghost: usize, cell: String },
}

fn expect_flavor(found: Flavor, expected: &[Flavor]) -> Result<(), OpsError> {
    if expected.contains(&found) {
        Ok(())
    } else {
        Err(OpsError::Flavor { expected: expected[0], found })
    }
}
