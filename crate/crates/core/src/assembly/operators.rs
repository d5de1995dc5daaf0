use crate::elements::{segment_quadrature, triangle_quadrature, BasisValues, Degree, ReferenceBasis, MAX_NODES};
use crate::function::ScalarFn;
use crate::Result;

use super::{AffineMap, CsrMatrix, DofMap, TripletBuilder};

type Local = [[f64; MAX_NODES]; MAX_NODES];

fn matrix_exactness(degree: Degree) -> u32 {
    2 * degree.order()
}

fn load_exactness(degree: Degree) -> u32 {
    2 * degree.order() + 2
}

fn reference_tables(degree: Degree, exactness: u32) -> (Vec<BasisValues>, Vec<f64>, Vec<[f64; 2]>) {
    let rule = triangle_quadrature(exactness).expect("exactness within supported range");
    let basis = ReferenceBasis::new(degree);
    (rule.points.iter().map(|&p| basis.eval(p)).collect(), rule.weights.clone(), rule.points)
}

/// Element stiffness matrix `(grad phi_j, grad phi_i)_K` for the triangle `p`.
pub fn local_stiffness(p: [[f64; 2]; 3], degree: Degree) -> Vec<Vec<f64>> {
    let (tab, w, _) = reference_tables(degree, matrix_exactness(degree));
    let mut a = [[0.0; MAX_NODES]; MAX_NODES];
    stiffness_kernel(&AffineMap::new(p), &tab, &w, degree.num_nodes(), &mut a);
    trim(&a, degree.num_nodes())
}

/// Element mass matrix `(phi_j, phi_i)_K` for the triangle `p`.
pub fn local_mass(p: [[f64; 2]; 3], degree: Degree) -> Vec<Vec<f64>> {
    let (tab, w, _) = reference_tables(degree, matrix_exactness(degree));
    let mut a = [[0.0; MAX_NODES]; MAX_NODES];
    mass_kernel(&AffineMap::new(p), &tab, &w, degree.num_nodes(), &mut a);
    trim(&a, degree.num_nodes())
}

/// Mass matrix of the edge trace basis on a segment of length `length`,
/// ordered start, end, midpoint.
pub fn local_boundary_mass(length: f64, degree: Degree) -> Vec<Vec<f64>> {
    let n = degree.order() as usize + 1;
    let rule = segment_quadrature(matrix_exactness(degree)).expect("supported exactness");
    let basis = ReferenceBasis::new(degree);
    let mut a = vec![vec![0.0; n]; n];
    for ([t], w) in rule.iter() {
        let (v, _) = basis.eval_edge(t);
        for i in 0..n {
            for j in 0..n {
                a[i][j] += length * w * v[i] * v[j];
            }
        }
    }
    a
}

fn trim(a: &Local, n: usize) -> Vec<Vec<f64>> {
    a[..n].iter().map(|r| r[..n].to_vec()).collect()
}

fn stiffness_kernel(map: &AffineMap, tab: &[BasisValues], w: &[f64], n: usize, a: &mut Local) {
    let area = map.area();
    for (bv, &wq) in tab.iter().zip(w) {
        let mut g = [[0.0; 2]; MAX_NODES];
        for i in 0..n {
            g[i] = map.grad(bv.grads[i]);
        }
        let s = 2.0 * area * wq;
        for i in 0..n {
            for j in 0..n {
                a[i][j] += s * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
}

fn mass_kernel(map: &AffineMap, tab: &[BasisValues], w: &[f64], n: usize, a: &mut Local) {
    let area = map.area();
    for (bv, &wq) in tab.iter().zip(w) {
        let s = 2.0 * area * wq;
        for i in 0..n {
            for j in 0..n {
                a[i][j] += s * bv.values[i] * bv.values[j];
            }
        }
    }
}

type Kernel = fn(&AffineMap, &[BasisValues], &[f64], usize, &mut Local);

fn assemble_cells(dm: &DofMap, order: &mut dyn Iterator<Item = usize>, kernel: Kernel) -> CsrMatrix {
    let degree = dm.degree();
    let n = degree.num_nodes();
    let (tab, w, _) = reference_tables(degree, matrix_exactness(degree));
    let nt = dm.mesh().num_triangles();
    let mut b = TripletBuilder::with_capacity(dm.num_dofs(), dm.num_dofs(), nt * n * n);
    for t in order {
        let mut a = [[0.0; MAX_NODES]; MAX_NODES];
        kernel(&dm.element_map(t), &tab, &w, n, &mut a);
        let dofs = dm.cell_dofs(t);
        for i in 0..n {
            for j in 0..n {
                b.push(dofs[i], dofs[j], a[i][j]);
            }
        }
    }
    b.build()
}

/// Global stiffness matrix `K_ij = (grad phi_j, grad phi_i)`.
pub fn assemble_stiffness(dm: &DofMap) -> CsrMatrix {
    assemble_cells(dm, &mut (0..dm.mesh().num_triangles()), stiffness_kernel)
}

/// [`assemble_stiffness`] visiting the cells in `order`.
pub fn assemble_stiffness_ordered(dm: &DofMap, order: &[usize]) -> CsrMatrix {
    assemble_cells(dm, &mut order.iter().copied(), stiffness_kernel)
}

/// Global mass matrix `M_ij = (phi_j, phi_i)`.
pub fn assemble_mass(dm: &DofMap) -> CsrMatrix {
    assemble_cells(dm, &mut (0..dm.mesh().num_triangles()), mass_kernel)
}

/// [`assemble_mass`] visiting the cells in `order`.
pub fn assemble_mass_ordered(dm: &DofMap, order: &[usize]) -> CsrMatrix {
    assemble_cells(dm, &mut order.iter().copied(), mass_kernel)
}

/// Boundary mass matrix `(phi_j, phi_i)_Gamma`; zero outside boundary rows/columns.
pub fn assemble_boundary_mass(dm: &DofMap) -> CsrMatrix {
    let n = dm.degree().order() as usize + 1;
    let mut b = TripletBuilder::with_capacity(dm.num_dofs(), dm.num_dofs(), dm.num_facets() * n * n);
    for e in 0..dm.num_facets() {
        let [p, q] = dm.facet_endpoints(e);
        let local = local_boundary_mass(crate::mesh::dist(p, q), dm.degree());
        let dofs = dm.facet_dofs(e);
        for i in 0..n {
            for j in 0..n {
                b.push(dofs[i], dofs[j], local[i][j]);
            }
        }
    }
    b.build()
}

/// Load vector `(g, phi_i)` with quadrature exact to degree `2k + 2`.
pub fn assemble_load(dm: &DofMap, g: &dyn ScalarFn) -> Result<Vec<f64>> {
    assemble_load_with(dm, g, load_exactness(dm.degree()))
}

/// Load vector `(g, phi_i)` with a triangle rule of the given exactness.
pub fn assemble_load_with(dm: &DofMap, g: &dyn ScalarFn, exactness: u32) -> Result<Vec<f64>> {
    let n = dm.degree().num_nodes();
    let (tab, w, pts) = reference_tables_checked(dm.degree(), exactness)?;
    let mut out = vec![0.0; dm.num_dofs()];
    for t in 0..dm.mesh().num_triangles() {
        let map = dm.element_map(t);
        let s = 2.0 * map.area();
        let dofs = dm.cell_dofs(t);
        for ((bv, &wq), &xi) in tab.iter().zip(&w).zip(&pts) {
            let gv = g.eval(map.map(xi))?;
            for i in 0..n {
                out[dofs[i]] += s * wq * gv * bv.values[i];
            }
        }
    }
    Ok(out)
}

fn reference_tables_checked(degree: Degree, exactness: u32) -> Result<(Vec<BasisValues>, Vec<f64>, Vec<[f64; 2]>)> {
    triangle_quadrature(exactness)?;
    Ok(reference_tables(degree, exactness))
}

/// Boundary load `(q, phi_i)_Gamma` with a Gauss rule of the given exactness.
pub fn assemble_boundary_load(dm: &DofMap, q: &dyn ScalarFn, exactness: u32) -> Result<Vec<f64>> {
    let rule = segment_quadrature(exactness)?;
    let basis = dm.basis();
    let mut out = vec![0.0; dm.num_dofs()];
    for e in 0..dm.num_facets() {
        let [a, b] = dm.facet_endpoints(e);
        let len = crate::mesh::dist(a, b);
        let dofs = dm.facet_dofs(e);
        for ([t], w) in rule.iter() {
            let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let qv = q.eval(x)?;
            let (v, _) = basis.eval_edge(t);
            for (i, &d) in dofs.iter().enumerate() {
                out[d] += len * w * qv * v[i];
            }
        }
    }
    Ok(out)
}
