//! Special functions: Bessel J (integer and half-integer order), spherical
//! Bessel, orthonormal Legendre at zero, two-index Bessel functions and the
//! coefficients C_q^{mn}.

pub mod bessel;
pub mod cq;
pub mod legendre;
pub mod two_index;

pub use bessel::{
    bessel_j, bessel_j_half, bessel_j_range, bessel_y, j_signed, spherical_j, spherical_j_range,
};
pub use cq::{build_coefficient_table, cq_coefficient, CoefficientTable, CqMethod};
pub use legendre::{assoc_legendre_zero, legendre_zero_column};
pub use two_index::two_index_bessel;
