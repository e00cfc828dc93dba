//! Dense linear algebra: matrices, Cholesky solves and the symmetric
//! eigensolver.

mod cholesky;
mod eigen;
mod matrix;

pub use cholesky::{solve_spd, Cholesky};
pub use eigen::{sym_eig, SymEigResult};
pub use matrix::{axpy, dot, max_abs, norm2, Matrix};
