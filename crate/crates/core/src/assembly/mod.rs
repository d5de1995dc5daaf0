//! Degrees of freedom, global finite element operators and the coupled
//! state/adjoint system.

mod dofmap;
mod operators;
mod sparse;
mod system;

pub use dofmap::DofMap;
pub use operators::{
    assemble_boundary_load, assemble_boundary_mass, assemble_load, assemble_load_with, assemble_mass,
    assemble_mass_ordered, assemble_stiffness, assemble_stiffness_ordered, local_boundary_mass, local_mass,
    local_stiffness,
};
pub use sparse::{CsrMatrix, TripletBuilder};
pub use system::{build_block_system, BlockSystem};

/// Matrix type used for every global operator.
pub type SparseMatrix = CsrMatrix;

/// Affine map `x = origin + J xi` from the reference triangle onto a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub origin: [f64; 2],
    /// Row-major Jacobian; its columns are the edges `p1 - p0` and `p2 - p0`.
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    inv: [[f64; 2]; 2],
}

impl AffineMap {
    pub fn new(p: [[f64; 2]; 3]) -> Self {
        let jac = [[p[1][0] - p[0][0], p[2][0] - p[0][0]], [p[1][1] - p[0][1], p[2][1] - p[0][1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        AffineMap { origin: p[0], jac, det, inv }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn inverse(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        [self.inv[0][0] * d[0] + self.inv[0][1] * d[1], self.inv[1][0] * d[0] + self.inv[1][1] * d[1]]
    }

    /// Physical gradient `J^{-T} g` of a reference gradient `g`.
    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [self.inv[0][0] * g[0] + self.inv[1][0] * g[1], self.inv[0][1] * g[0] + self.inv[1][1] * g[1]]
    }
}
