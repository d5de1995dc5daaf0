//! Reference Lagrange elements and quadrature.
//!
//! The reference triangle is `{(x, y) : x >= 0, y >= 0, x + y <= 1}` with
//! barycentric coordinates `l0 = 1 - x - y`, `l1 = x`, `l2 = y`. The reference
//! segment is `[0, 1]`.

mod basis;
mod quadrature;

pub use basis::{eval_basis, BasisValues, Degree, ReferenceBasis, MAX_NODES};
pub use quadrature::{
    gauss_legendre, segment_quadrature, triangle_quadrature, QuadratureRule, SegmentRule, TriangleRule,
};
