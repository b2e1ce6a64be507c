//! Exact linear algebra over a [`Field`](crate::field::Field).

pub mod lp;
mod matrix;
mod subspace;

pub use matrix::{dot, is_zero_vec, solve_linear, unit_vector, vec_add, vec_scale, vec_sub, Echelon, Matrix};
pub use subspace::{kernel, Subspace};

/// Canonical reduced row-echelon form (see [`Matrix::rref`]).
pub fn rref<F: crate::field::Field>(m: &Matrix<F>) -> Echelon<F> {
    m.rref()
}
