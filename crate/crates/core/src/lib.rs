//! Spectral analysis of banded Toeplitz matrices from their Laurent symbols:
//! limiting eigenvalue sets, class-R certification via Jordan curves in
//! b^{-1}(R), limiting measures and their densities, and the associated
//! Jacobi operators and orthogonal polynomials.

pub mod dd;
pub mod eig;
pub mod error;
pub mod quad;
pub mod roots;
pub mod symbol;

pub use error::{Error, Result};
pub use symbol::{compose_entire, Symbol, SymbolLike, TruncatedSymbol};

pub mod curve;
pub mod toeplitz;
pub mod limitset;
pub mod net;
pub mod moments;
pub mod measure;
pub mod jacobi;
