use std::sync::Arc;

use crate::elements::{Degree, ReferenceBasis, MAX_NODES};
use crate::function::ScalarFn;
use crate::mesh::TriMesh;
use crate::Result;

use super::AffineMap;

const NONE: usize = usize::MAX;

/// Global numbering of the Lagrange nodes of a mesh.
///
/// Vertex dofs come first and keep the mesh vertex indices; for P2 the edge
/// midpoint dofs follow in the mesh's edge-table order. Local dofs of a cell
/// follow the reference element: vertices, then midpoints of the local edges
/// `(v0, v1)`, `(v1, v2)`, `(v2, v0)`.
#[derive(Debug, Clone)]
pub struct DofMap {
    mesh: Arc<TriMesh>,
    degree: Degree,
    cell_dofs: Vec<[usize; MAX_NODES]>,
    coords: Vec<[f64; 2]>,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    interior_pos: Vec<usize>,
    boundary_pos: Vec<usize>,
    /// Per boundary edge: start dof, end dof, midpoint dof (P2 only).
    facets: Vec<[usize; 3]>,
}

impl DofMap {
    pub fn new(mesh: Arc<TriMesh>, degree: Degree) -> Self {
        let nv = mesh.num_vertices();
        let mut coords = mesh.vertices.clone();
        let mut cell_dofs: Vec<[usize; MAX_NODES]> = mesh
            .triangles
            .iter()
            .map(|t| {
                let mut d = [NONE; MAX_NODES];
                d[..3].copy_from_slice(t);
                d
            })
            .collect();
        let mut on_boundary = vec![false; nv];
        for e in &mesh.boundary_edges {
            on_boundary[e.vertices[0]] = true;
            on_boundary[e.vertices[1]] = true;
        }
        let mut facets: Vec<[usize; 3]> =
            mesh.boundary_edges.iter().map(|e| [e.vertices[0], e.vertices[1], NONE]).collect();

        if degree == Degree::P2 {
            let (edges, tri_edges) = mesh.edge_table();
            for &[a, b] in &edges {
                let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
                coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            }
            for (d, te) in cell_dofs.iter_mut().zip(&tri_edges) {
                for k in 0..3 {
                    d[3 + k] = nv + te[k];
                }
            }
            on_boundary.resize(nv + edges.len(), false);
            let index: std::collections::HashMap<[usize; 2], usize> =
                edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
            for f in &mut facets {
                let key = [f[0].min(f[1]), f[0].max(f[1])];
                let m = nv + index[&key];
                on_boundary[m] = true;
                f[2] = m;
            }
        }

        let n = coords.len();
        let mut boundary = Vec::new();
        let mut interior = Vec::new();
        let mut interior_pos = vec![NONE; n];
        let mut boundary_pos = vec![NONE; n];
        for i in 0..n {
            if on_boundary[i] {
                boundary_pos[i] = boundary.len();
                boundary.push(i);
            } else {
                interior_pos[i] = interior.len();
                interior.push(i);
            }
        }
        DofMap { mesh, degree, cell_dofs, coords, boundary, interior, interior_pos, boundary_pos, facets }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn basis(&self) -> ReferenceBasis {
        ReferenceBasis::new(self.degree)
    }

    pub fn num_dofs(&self) -> usize {
        self.coords.len()
    }

    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn num_boundary(&self) -> usize {
        self.boundary.len()
    }

    /// Global dofs of cell `t` in reference-element order.
    pub fn cell_dofs(&self, t: usize) -> &[usize] {
        &self.cell_dofs[t][..self.degree.num_nodes()]
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    /// Boundary dofs, ascending.
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior dofs, ascending.
    pub fn interior_dofs(&self) -> &[usize] {
        &self.interior
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary_pos[dof] != NONE
    }

    /// Position of `dof` in [`Self::interior_dofs`].
    pub fn interior_index(&self, dof: usize) -> Option<usize> {
        Some(self.interior_pos[dof]).filter(|&p| p != NONE)
    }

    /// Position of `dof` in [`Self::boundary_dofs`].
    pub fn boundary_index(&self, dof: usize) -> Option<usize> {
        Some(self.boundary_pos[dof]).filter(|&p| p != NONE)
    }

    /// Dofs on each boundary edge in edge-trace order: start, end, then the
    /// midpoint for P2.
    pub fn facet_dofs(&self, e: usize) -> &[usize] {
        &self.facets[e][..self.degree.order() as usize + 1]
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn facet_endpoints(&self, e: usize) -> [[f64; 2]; 2] {
        [self.coords[self.facets[e][0]], self.coords[self.facets[e][1]]]
    }

    pub fn element_map(&self, t: usize) -> AffineMap {
        AffineMap::new(self.mesh.triangle_coords(t))
    }

    /// Nodal interpolant of `g`.
    pub fn interpolate(&self, g: &dyn ScalarFn) -> Result<Vec<f64>> {
        self.coords.iter().map(|&p| g.eval(p)).collect()
    }
}
