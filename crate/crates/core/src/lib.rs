//! Exact construction, verification and fast evaluation of non-separable
//! multidimensional wavelet filter banks built by the prime coset sum.

pub mod arith;
pub mod cosetsum;
pub mod error;
pub mod filterbank;
pub mod filters;
pub mod lattice;
pub mod polyphase;
pub mod transform;

pub use arith::{Cyclotomic, Rational};
pub use error::{Error, Result};
pub use filters::{Filter1D, FilterND, MaskDiagnostics};
pub use lattice::{Convention, CosetSystem, MultiIndex};
