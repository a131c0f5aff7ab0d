//! Optimal trajectory feed-forward control for geometrically exact strings.
//!
//! The crate discretizes the first-order optimality system of a tracking
//! problem for a hanging, geometrically exact string on a structured
//! space-time finite element mesh. Only the position field `r` and its
//! adjoint `w` are approximated; the control is recovered afterwards as
//! `u = -w(0, t)`. A semi-discrete implicit midpoint integrator is provided
//! to verify the resulting control by forward simulation.
//!
//! Module map:
//!
//! * [`model`] constitutive law, body force and the desired output trajectory
//! * [`mesh`] structured spatial / space-time meshes, shape functions, quadrature
//! * [`linalg`] sparse storage, sparse direct LU and a damped Newton driver
//! * [`statics`] semi-discrete string model and static equilibrium
//! * [`ocp`] space-time optimality system, its Jacobian and the solver
//! * [`simulate`] implicit midpoint time marching and tracking metrics
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
// Index loops mirror the component formulas; `!(x > 0.0)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod ocp;
pub mod simulate;
pub mod statics;

pub use error::{Error, Result};

/// Spatial vector padded to three components. Components at index `>= dim`
/// are zero and ignored.
pub type Vec3 = [f64; 3];
/// Second-order tensor, padded like [`Vec3`].
pub type Mat3 = [[f64; 3]; 3];
/// Third-order tensor, padded like [`Vec3`].
pub type Tensor3 = [[[f64; 3]; 3]; 3];

#[inline]
pub(crate) fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}
