//! Finite element solver for the Dirichlet boundary control problem
//!
//! ```text
//! min J(u) = 1/2 ||y - y_d||^2 + gamma/2 ||u||^2_{L2(boundary)}
//!   -Laplace(y) = f in the domain,  y = u on the boundary
//! ```
//!
//! The control is eliminated: the state `y` and adjoint `z` are found from one
//! coupled linear system and the control is recovered as the boundary trace of
//! the discrete state.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: rectangle triangulations, uniform refinement, VTK output
//! - [`elements`]: Lagrange P1/P2 reference bases and quadrature rules
//! - [`assembly`]: dof numbering, sparse matrices and the coupled block system
//! - [`linalg`]: direct and block-elimination solvers for the coupled system
//! - [`analysis`]: error norms, convergence orders and property verifiers
//! - [`expr`]: the arithmetic expression language used by problem configs
//! - [`function`]: the scalar and vector field traits consumed by assembly and error norms
//! - [`problem`]: problem definitions, the built-in registry and study drivers

pub mod analysis;
pub mod assembly;
pub mod elements;
pub mod error;
pub mod expr;
pub mod function;
pub mod linalg;
pub mod mesh;
pub mod problem;

pub use error::{Error, Result};
