//! Triangulations of axis-aligned rectangles.
//!
//! Meshes start from the 8-triangle layout on a 2x2 grid of squares and are
//! refined globally. Every triangle is stored with its *peak* first: the
//! vertex opposite the edge that the next bisection splits. For the right
//! triangles produced here the peak is always the right-angle vertex, so the
//! refinement edge is the hypotenuse.

mod vtk;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use vtk::{export_vtk, write_vtk};

/// Marker attached to every boundary edge. The whole of the boundary is a
/// single Dirichlet control boundary.
pub const BOUNDARY_MARKER: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let r = Rect { x0, y0, x1, y1 };
        r.validate()?;
        Ok(r)
    }

    pub fn unit_square() -> Self {
        Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite());
        if !finite || !(self.x1 > self.x0) || !(self.y1 > self.y0) {
            return Err(Error::InvalidGeometry(format!(
                "rectangle [{}, {}] x [{}, {}] must have positive width and height",
                self.x0, self.x1, self.y0, self.y1
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    pub fn contains_on_boundary(&self, p: [f64; 2]) -> bool {
        let tol = 1e-12 * self.width().max(self.height());
        (p[0] - self.x0).abs() <= tol
            || (p[0] - self.x1).abs() <= tol
            || (p[1] - self.y0).abs() <= tol
            || (p[1] - self.y1).abs() <= tol
    }
}

/// Diagonal pattern of the 2x2 squares in the initial mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialLayout {
    /// Every square split by its lower-left to upper-right diagonal.
    #[default]
    Uniform,
    /// Diagonals alternate in a checkerboard, giving a union-jack pattern.
    Alternating,
}

/// How one level of uniform refinement splits a triangle into four.
///
/// Both rules place the new vertices at the three edge midpoints and create
/// four children congruent to the parent up to scaling; they differ only in
/// how the children are connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// Two rounds of newest-vertex bisection.
    #[default]
    Bisection,
    /// Regular (red) 1:4 split with an inner midpoint triangle.
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    /// Endpoints, ordered so the domain lies to the left.
    pub vertices: [usize; 2],
    pub marker: u32,
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples, peak vertex first.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub level: usize,
    pub h_max: f64,
    pub rect: Rect,
    pub layout: InitialLayout,
    pub refinement: Refinement,
    /// `parents[l][t]` is the level-`l` triangle containing triangle `t` of level `l + 1`.
    parents: Vec<Vec<u32>>,
}

/// Builds the 8-triangle mesh on a 2x2 grid of congruent squares.
pub fn make_initial_mesh(rect: Rect, layout: InitialLayout) -> Result<TriMesh> {
    rect.validate()?;
    let xs = [rect.x0, 0.5 * (rect.x0 + rect.x1), rect.x1];
    let ys = [rect.y0, 0.5 * (rect.y0 + rect.y1), rect.y1];
    let mut vertices = Vec::with_capacity(9);
    for y in ys {
        for x in xs {
            vertices.push([x, y]);
        }
    }
    let mut triangles = Vec::with_capacity(8);
    for j in 0..2 {
        for i in 0..2 {
            let sw = 3 * j + i;
            let se = sw + 1;
            let ne = sw + 4;
            let nw = sw + 3;
            let forward = match layout {
                InitialLayout::Uniform => true,
                InitialLayout::Alternating => (i + j) % 2 == 0,
            };
            if forward {
                triangles.push([se, ne, sw]);
                triangles.push([nw, sw, ne]);
            } else {
                triangles.push([sw, se, nw]);
                triangles.push([ne, nw, se]);
            }
        }
    }
    let mut mesh = TriMesh {
        vertices,
        triangles,
        boundary_edges: Vec::new(),
        level: 0,
        h_max: 0.0,
        rect,
        layout,
        refinement: Refinement::default(),
        parents: Vec::new(),
    };
    mesh.boundary_edges = mesh
        .edge_counts()
        .into_iter()
        .filter(|(_, c)| *c == 1)
        .map(|(e, _)| e)
        .collect::<Vec<_>>()
        .into_iter()
        .map(|e| BoundaryEdge { vertices: mesh.oriented_boundary_edge(e), marker: BOUNDARY_MARKER })
        .collect();
    mesh.boundary_edges.sort_by_key(|e| e.vertices);
    mesh.h_max = mesh.compute_h_max();
    Ok(mesh)
}

/// Unit-square mesh after `levels` uniform refinements.
pub fn unit_square_mesh(levels: usize, refinement: Refinement) -> TriMesh {
    let mut mesh = make_initial_mesh(Rect::unit_square(), InitialLayout::Uniform)
        .expect("unit square is valid");
    mesh.refinement = refinement;
    for _ in 0..levels {
        mesh = refine_uniform(&mesh);
    }
    mesh
}

struct MidpointCache {
    map: HashMap<(usize, usize), usize>,
}

impl MidpointCache {
    fn new() -> Self {
        MidpointCache { map: HashMap::new() }
    }

    fn get(&mut self, vertices: &mut Vec<[f64; 2]>, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        *self.map.entry(key).or_insert_with(|| {
            let (pa, pb) = (vertices[a], vertices[b]);
            vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            vertices.len() - 1
        })
    }
}

fn bisect(
    vertices: &mut Vec<[f64; 2]>,
    triangles: &[[usize; 3]],
    cache: &mut MidpointCache,
) -> (Vec<[usize; 3]>, Vec<u32>) {
    let mut out = Vec::with_capacity(2 * triangles.len());
    let mut parent = Vec::with_capacity(2 * triangles.len());
    for (t, &[p, a, b]) in triangles.iter().enumerate() {
        let m = cache.get(vertices, a, b);
        out.push([m, p, a]);
        out.push([m, b, p]);
        parent.push(t as u32);
        parent.push(t as u32);
    }
    (out, parent)
}

/// Splits every triangle into four children through its edge midpoints.
///
/// Existing vertices keep their indices; new midpoint vertices are appended
/// in triangle visiting order, so the output is deterministic.
pub fn refine_uniform(mesh: &TriMesh) -> TriMesh {
    let mut vertices = mesh.vertices.clone();
    let mut cache = MidpointCache::new();
    let (triangles, parent) = match mesh.refinement {
        Refinement::Bisection => {
            let (once, p1) = bisect(&mut vertices, &mesh.triangles, &mut cache);
            let (twice, p2) = bisect(&mut vertices, &once, &mut cache);
            let parent = p2.iter().map(|&c| p1[c as usize]).collect();
            (twice, parent)
        }
        Refinement::Red => {
            let mut tris = Vec::with_capacity(4 * mesh.triangles.len());
            let mut parent = Vec::with_capacity(4 * mesh.triangles.len());
            for (t, &[p, a, b]) in mesh.triangles.iter().enumerate() {
                let pa = cache.get(&mut vertices, p, a);
                let ab = cache.get(&mut vertices, a, b);
                let bp = cache.get(&mut vertices, b, p);
                tris.push([p, pa, bp]);
                tris.push([pa, a, ab]);
                tris.push([bp, ab, b]);
                tris.push([ab, bp, pa]);
                parent.extend([t as u32; 4]);
            }
            (tris, parent)
        }
    };
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let [a, b] = e.vertices;
        let m = cache.get(&mut vertices, a, b);
        boundary_edges.push(BoundaryEdge { vertices: [a, m], marker: e.marker });
        boundary_edges.push(BoundaryEdge { vertices: [m, b], marker: e.marker });
    }
    let mut parents = mesh.parents.clone();
    parents.push(parent);
    let mut out = TriMesh {
        vertices,
        triangles,
        boundary_edges,
        level: mesh.level + 1,
        h_max: 0.0,
        rect: mesh.rect,
        layout: mesh.layout,
        refinement: mesh.refinement,
        parents,
    };
    out.h_max = out.compute_h_max();
    out
}

impl TriMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_coords(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_coords(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.triangle_coords(t);
        (0..3).map(|i| dist(p[i], p[(i + 1) % 3])).fold(0.0, f64::max)
    }

    /// Diameter of the inscribed circle of triangle `t`.
    pub fn inscribed_diameter(&self, t: usize) -> f64 {
        let p = self.triangle_coords(t);
        let perimeter: f64 = (0..3).map(|i| dist(p[i], p[(i + 1) % 3])).sum();
        4.0 * self.signed_area(t).abs() / perimeter
    }

    /// Largest ratio of element diameter to inscribed diameter.
    pub fn shape_regularity(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.diameter(t) / self.inscribed_diameter(t))
            .fold(0.0, f64::max)
    }

    /// `h_max / min_K diam(K)`; 1 when all elements have the same size.
    pub fn quasi_uniformity(&self) -> f64 {
        let min = (0..self.num_triangles()).map(|t| self.diameter(t)).fold(f64::INFINITY, f64::min);
        self.h_max / min
    }

    fn compute_h_max(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.diameter(t)).fold(0.0, f64::max)
    }

    /// Every undirected edge with the number of triangles sharing it, sorted.
    pub fn edge_counts(&self) -> Vec<([usize; 2], usize)> {
        let mut counts: HashMap<[usize; 2], usize> = HashMap::new();
        for tri in &self.triangles {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                *counts.entry([a.min(b), a.max(b)]).or_insert(0) += 1;
            }
        }
        let mut v: Vec<_> = counts.into_iter().collect();
        v.sort_unstable();
        v
    }

    /// Unique edges plus, for each triangle, the indices of its local edges
    /// `(v0, v1)`, `(v1, v2)`, `(v2, v0)`. Edges are numbered in first-visit order.
    pub fn edge_table(&self) -> (Vec<[usize; 2]>, Vec<[usize; 3]>) {
        let mut index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut tri_edges = Vec::with_capacity(self.num_triangles());
        for tri in &self.triangles {
            let mut local = [0; 3];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                local[i] = *index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
            }
            tri_edges.push(local);
        }
        (edges, tri_edges)
    }

    fn oriented_boundary_edge(&self, e: [usize; 2]) -> [usize; 2] {
        for tri in &self.triangles {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                if [a.min(b), a.max(b)] == e {
                    return [a, b];
                }
            }
        }
        e
    }

    pub fn boundary_edge_length(&self, e: &BoundaryEdge) -> f64 {
        dist(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]])
    }

    pub fn is_boundary_vertex(&self) -> Vec<bool> {
        let mut flags = vec![false; self.num_vertices()];
        for e in &self.boundary_edges {
            flags[e.vertices[0]] = true;
            flags[e.vertices[1]] = true;
        }
        flags
    }

    /// Index of the level-`level` ancestor of triangle `t`.
    pub fn ancestor(&self, t: usize, level: usize) -> usize {
        assert!(level <= self.level, "ancestor level {level} above mesh level {}", self.level);
        let mut t = t;
        for l in (level..self.level).rev() {
            t = self.parents[l][t] as usize;
        }
        t
    }

    /// Checks the structural invariants, returning the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        for t in 0..self.num_triangles() {
            if self.signed_area(t) <= 0.0 {
                return Err(Error::InvalidGeometry(format!("triangle {t} is not counterclockwise")));
            }
        }
        let counts = self.edge_counts();
        let mut boundary = Vec::new();
        for (e, c) in &counts {
            match c {
                1 => boundary.push(*e),
                2 => {}
                _ => return Err(Error::InvalidGeometry(format!("edge {e:?} shared by {c} triangles"))),
            }
        }
        let mut tagged: Vec<[usize; 2]> = self
            .boundary_edges
            .iter()
            .map(|e| [e.vertices[0].min(e.vertices[1]), e.vertices[0].max(e.vertices[1])])
            .collect();
        tagged.sort_unstable();
        if tagged != boundary {
            return Err(Error::InvalidGeometry("boundary edge tags do not match topology".into()));
        }
        for e in &self.boundary_edges {
            let [a, b] = e.vertices;
            let mid = [
                0.5 * (self.vertices[a][0] + self.vertices[b][0]),
                0.5 * (self.vertices[a][1] + self.vertices[b][1]),
            ];
            if !self.rect.contains_on_boundary(self.vertices[a])
                || !self.rect.contains_on_boundary(self.vertices[b])
                || !self.rect.contains_on_boundary(mid)
            {
                return Err(Error::InvalidGeometry(format!("boundary edge {:?} off the rectangle", e.vertices)));
            }
        }
        Ok(())
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
