//! Exact time-dependent propagators of nearest-neighbour tight-binding
//! Hamiltonians on the chain, dimer chain, square, triangular and honeycomb
//! lattices, with the special functions they need, brute-force oracles,
//! second-quantized few-body amplitudes, lattice operator algebra and
//! continuum-limit checks.

pub mod algebra;
pub mod continuum;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod manybody;
pub mod oracle;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;
