//! Dimer models on contracting square-hexagon lattices.
//!
//! * [`partitions`]: Young diagrams, interlacing, Schur polynomials.
//! * [`lattice`]: the lattice R(Ω, ǎ, X, Y, n) and its boundary data.
//! * [`dimer`]: perfect matchings, the interlacing-chain bijection, exact
//!   partition functions and Boltzmann sampling.
//! * [`limitshape`]: limit measures, liquid-region density, frozen
//!   boundaries, cloud curves and disconnected components.

pub mod dimer;
pub mod error;
pub mod io;
pub mod lattice;
pub mod limitshape;
pub mod partitions;
pub mod poly;
pub mod quad;

pub use error::{DimerError, FormatError, LatticeError, LimitError, NumericError, PartitionError};

/// Exact rational numbers used for all combinatorial quantities.
pub type Rational = num::BigRational;
