//! Nonlocal games built from CSS codes: exact classical values via Walsh
//! spectra, graph-state standard forms, statevector strategies,
//! contextual-fraction linear programs and transfer-matrix bounds.

pub mod boolfn;
pub mod contextuality;
pub mod cssgame;
pub mod dyadic;
pub mod error;
pub mod exec;
pub mod f2;
pub mod graphstate;
pub mod quantum;
pub mod statmech;
pub mod strategy;

pub use boolfn::{AnfPolynomial, BooleanFunction, WalshSpectrum};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use exec::Exec;
pub use f2::{BitMatrix, BitVector};
pub use graphstate::{Graph, Hypergraph};
pub use quantum::StateVector;
