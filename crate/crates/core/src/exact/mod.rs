//! Exact linear algebra over Q. Everything downstream that makes a discrete
//! decision (ranks, squarefree tests, eigenvalues) goes through here.

mod eigen;
mod matrix;
mod poly;
mod rat;
mod subspace;

pub use eigen::{
    characteristic_polynomial, is_eigenvector, minimal_polynomial, rational_eigen_decomposition,
    EigenDecomposition,
};
pub use matrix::{
    add_vec, combine, dot, ints, is_zero_vector, scale_vec, sub_vec, unit_vector, zero_vector,
    RatMat, Vector,
};
pub use poly::Poly;
pub use rat::{ParseRatError, Rat};
pub use subspace::{DirectSum, SpanSolver, Subspace};

/// Reduced row echelon form with pivot columns.
pub fn rref(m: &RatMat) -> (RatMat, Vec<usize>) {
    m.rref()
}

/// Null space basis in the rref parametrization.
pub fn kernel(m: &RatMat) -> Vec<Vector> {
    m.kernel()
}

pub fn is_squarefree(p: &Poly) -> crate::Result<bool> {
    p.is_squarefree()
}
