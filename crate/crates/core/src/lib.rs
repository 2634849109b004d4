//! Combinatorics of virtual strings: encodings, homotopy moves, the
//! u-polynomial, based matrices, Gauss words on the sphere, the string
//! cobracket and the skein polynomial of arrow diagrams.

pub mod cli;
pub mod error;
pub mod gauss;
pub mod homotopy;
pub mod invariants;
pub mod lie;
pub mod model;
pub mod skein;

pub use error::{Error, Result};
pub use model::{ArrowDiagram, CanonicalCode, VirtualString};
