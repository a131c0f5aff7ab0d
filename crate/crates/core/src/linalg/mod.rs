//! Sparse storage, a sparse direct LU factorization and the damped Newton
//! driver shared by the static, optimal control and time-marching solvers.

mod lu;
mod newton;
mod sparse;

pub use lu::{solve_linear, SparseLu};
pub use newton::{newton_solve, NewtonConfig, NewtonReport};
pub use sparse::{SparseMatrix, TripletMatrix};

pub(crate) fn norm2(v: &[f64]) -> f64 {
    crate::norm(v)
}
