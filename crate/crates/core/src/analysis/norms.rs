use std::collections::HashMap;

use crate::elements::{segment_quadrature, triangle_quadrature, BasisValues, Degree, ReferenceBasis};
use crate::function::{ScalarFn, VectorFn};
use crate::mesh::{dist, TriMesh};
use crate::{Error, Result};

use super::FemField;

/// Quadrature exactness used for error norms: `2k + 2`.
pub fn error_exactness(degree: Degree) -> u32 {
    2 * degree.order() + 2
}

struct CellTables {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    basis: Vec<BasisValues>,
}

fn cell_tables(degree: Degree) -> CellTables {
    let rule = triangle_quadrature(error_exactness(degree)).expect("supported exactness");
    let b = ReferenceBasis::new(degree);
    CellTables { basis: rule.points.iter().map(|&p| b.eval(p)).collect(), points: rule.points, weights: rule.weights }
}

/// `||u_h - u||_{L2}`.
pub fn error_l2(field: &FemField, exact: &dyn ScalarFn) -> Result<f64> {
    let dm = field.dofmap();
    let tab = cell_tables(dm.degree());
    let c = field.coefficients();
    let mut sum = 0.0;
    for t in 0..dm.mesh().num_triangles() {
        let map = dm.element_map(t);
        let dofs = dm.cell_dofs(t);
        let s = 2.0 * map.area();
        for ((bv, &w), &xi) in tab.basis.iter().zip(&tab.weights).zip(&tab.points) {
            let uh: f64 = dofs.iter().zip(bv.values()).map(|(&d, v)| c[d] * v).sum();
            let e = uh - exact.eval(map.map(xi))?;
            sum += s * w * e * e;
        }
    }
    Ok(sum.sqrt())
}

/// `||grad(u_h - u)||_{L2}`.
pub fn error_h1_semi(field: &FemField, exact_grad: &dyn VectorFn) -> Result<f64> {
    let dm = field.dofmap();
    let tab = cell_tables(dm.degree());
    let c = field.coefficients();
    let mut sum = 0.0;
    for t in 0..dm.mesh().num_triangles() {
        let map = dm.element_map(t);
        let dofs = dm.cell_dofs(t);
        let s = 2.0 * map.area();
        for ((bv, &w), &xi) in tab.basis.iter().zip(&tab.weights).zip(&tab.points) {
            let mut g = [0.0; 2];
            for (&d, r) in dofs.iter().zip(bv.grads()) {
                let p = map.grad(*r);
                g[0] += c[d] * p[0];
                g[1] += c[d] * p[1];
            }
            let ge = exact_grad.eval(map.map(xi))?;
            sum += s * w * ((g[0] - ge[0]).powi(2) + (g[1] - ge[1]).powi(2));
        }
    }
    Ok(sum.sqrt())
}

/// `||u_h - u||_{L2(Gamma)}` over the boundary trace.
pub fn error_l2_boundary(field: &FemField, exact: &dyn ScalarFn) -> Result<f64> {
    let dm = field.dofmap();
    let rule = segment_quadrature(error_exactness(dm.degree()))?;
    let mut sum = 0.0;
    for e in 0..dm.num_facets() {
        let [a, b] = dm.facet_endpoints(e);
        let len = dist(a, b);
        for ([s], w) in rule.iter() {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let d = field.eval_on_facet(e, s) - exact.eval(x)?;
            sum += len * w * d * d;
        }
    }
    Ok(sum.sqrt())
}

pub fn norm_l2(field: &FemField) -> f64 {
    error_l2(field, &crate::function::Zero).expect("zero function cannot fail")
}

pub fn norm_l2_boundary(field: &FemField) -> f64 {
    error_l2_boundary(field, &crate::function::Zero).expect("zero function cannot fail")
}

pub fn seminorm_h1(field: &FemField) -> f64 {
    error_h1_semi(field, &crate::function::Zero).expect("zero function cannot fail")
}

/// Errors of a coarse field measured against a field on a nested finer mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceErrors {
    pub l2: f64,
    pub h1_semi: f64,
    pub l2_boundary: f64,
}

fn check_nested(coarse: &TriMesh, fine: &TriMesh) -> Result<()> {
    if coarse.rect != fine.rect
        || coarse.layout != fine.layout
        || coarse.refinement != fine.refinement
        || coarse.level > fine.level
    {
        return Err(Error::Config(format!(
            "reference mesh (level {}) is not a refinement of the level-{} mesh",
            fine.level, coarse.level
        )));
    }
    Ok(())
}

/// For every boundary edge of `mesh`, the triangle that contains it.
pub(crate) fn boundary_edge_cells(mesh: &TriMesh) -> Vec<usize> {
    let mut owner: HashMap<[usize; 2], usize> = HashMap::with_capacity(3 * mesh.boundary_edges.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for i in 0..3 {
            owner.insert([tri[i], tri[(i + 1) % 3]], t);
        }
    }
    mesh.boundary_edges.iter().map(|e| owner[&e.vertices]).collect()
}

/// `L2`, `H1`-seminorm and boundary `L2` norms of `coarse - fine`, where the
/// fine field lives on a refinement of the coarse field's mesh.
pub fn errors_against_reference(coarse: &FemField, fine: &FemField) -> Result<ReferenceErrors> {
    let cd = coarse.dofmap();
    let fd = fine.dofmap();
    let (cm, fm) = (cd.mesh(), fd.mesh());
    check_nested(cm, fm)?;
    let tab = cell_tables(cd.degree().max(fd.degree()));
    let fb = ReferenceBasis::new(fd.degree());
    let fine_tab: Vec<BasisValues> = tab.points.iter().map(|&p| fb.eval(p)).collect();
    let fc = fine.coefficients();
    let coarse_maps: Vec<_> = (0..cm.num_triangles()).map(|t| cd.element_map(t)).collect();

    let (mut l2, mut h1) = (0.0, 0.0);
    for t in 0..fm.num_triangles() {
        let tc = fm.ancestor(t, cm.level);
        let cmap = &coarse_maps[tc];
        let map = fd.element_map(t);
        let dofs = fd.cell_dofs(t);
        let s = 2.0 * map.area();
        for ((bv, &w), &xi) in fine_tab.iter().zip(&tab.weights).zip(&tab.points) {
            let x = map.map(xi);
            let xc = cmap.inverse(x);
            let mut vf = 0.0;
            let mut gf = [0.0; 2];
            for ((&d, v), r) in dofs.iter().zip(bv.values()).zip(bv.grads()) {
                vf += fc[d] * v;
                let p = map.grad(*r);
                gf[0] += fc[d] * p[0];
                gf[1] += fc[d] * p[1];
            }
            let vc = coarse.eval_in_cell(tc, xc);
            let gc = coarse.grad_in_cell(tc, xc);
            l2 += s * w * (vc - vf).powi(2);
            h1 += s * w * ((gc[0] - gf[0]).powi(2) + (gc[1] - gf[1]).powi(2));
        }
    }

    let rule = segment_quadrature(error_exactness(cd.degree().max(fd.degree())))?;
    let cells = boundary_edge_cells(fm);
    let mut lb = 0.0;
    for e in 0..fd.num_facets() {
        let tc = fm.ancestor(cells[e], cm.level);
        let [a, b] = fd.facet_endpoints(e);
        let len = dist(a, b);
        for ([s], w) in rule.iter() {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let d = coarse.eval_in_cell(tc, coarse_maps[tc].inverse(x)) - fine.eval_on_facet(e, s);
            lb += len * w * d * d;
        }
    }
    Ok(ReferenceErrors { l2: l2.sqrt(), h1_semi: h1.sqrt(), l2_boundary: lb.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::DofMap;
    use crate::mesh::{unit_square_mesh, Refinement};
    use std::sync::Arc;

    fn dm(level: usize, degree: Degree) -> Arc<DofMap> {
        Arc::new(DofMap::new(Arc::new(unit_square_mesh(level, Refinement::Bisection)), degree))
    }

    #[test]
    fn interpolants_of_reproduced_polynomials_have_zero_error() {
        let lin = |x: [f64; 2]| 0.3 + 2.0 * x[0] - x[1];
        let lin_g = |_: [f64; 2]| [2.0, -1.0];
        let f = FemField::interpolate(dm(2, Degree::P1), &lin).unwrap();
        assert!(error_l2(&f, &lin).unwrap() < 1e-13);
        assert!(error_h1_semi(&f, &lin_g).unwrap() < 1e-13);
        assert!(error_l2_boundary(&f, &lin).unwrap() < 1e-13);

        let quad = |x: [f64; 2]| x[0] * x[0] - x[0] * x[1] + 0.5 * x[1];
        let quad_g = |x: [f64; 2]| [2.0 * x[0] - x[1], -x[0] + 0.5];
        let f = FemField::interpolate(dm(1, Degree::P2), &quad).unwrap();
        assert!(error_l2(&f, &quad).unwrap() < 1e-13);
        assert!(error_h1_semi(&f, &quad_g).unwrap() < 1e-13);
        assert!(error_l2_boundary(&f, &quad).unwrap() < 1e-13);
    }

    #[test]
    fn constants_and_known_norms() {
        let one = FemField::interpolate(dm(1, Degree::P1), &|_: [f64; 2]| 1.0).unwrap();
        assert!((norm_l2(&one) - 1.0).abs() < 1e-14);
        assert!((norm_l2_boundary(&one) - 2.0).abs() < 1e-14);
        assert!(seminorm_h1(&one) < 1e-14);
        assert!(error_l2(&one, &|_: [f64; 2]| 1.0).unwrap() < 1e-15);
    }

    #[test]
    fn reference_errors_of_identical_fields_vanish() {
        let g = |x: [f64; 2]| (3.0 * x[0]).sin() * x[1];
        let coarse = FemField::interpolate(dm(1, Degree::P1), &g).unwrap();
        // Prolongation of a P1 field is exact on nested meshes, so the
        // coarse interpolant equals its own prolongation.
        let fine_dm = dm(3, Degree::P1);
        let pro: Vec<f64> = {
            let fm = fine_dm.mesh();
            let cm = coarse.dofmap().mesh().clone();
            let mut v = vec![0.0; fine_dm.num_dofs()];
            for t in 0..fm.num_triangles() {
                let tc = fm.ancestor(t, cm.level);
                let cmap = coarse.dofmap().element_map(tc);
                for &d in fine_dm.cell_dofs(t) {
                    v[d] = coarse.eval_in_cell(tc, cmap.inverse(fine_dm.coords()[d]));
                }
            }
            v
        };
        let fine = FemField::new(fine_dm, pro).unwrap();
        let e = errors_against_reference(&coarse, &fine).unwrap();
        assert!(e.l2 < 1e-14 && e.h1_semi < 1e-13 && e.l2_boundary < 1e-14, "{e:?}");
    }

    #[test]
    fn reference_errors_match_exact_errors_for_polynomials() {
        // Against a P2 fine field reproducing a quadratic exactly, the
        // reference errors equal the errors against the analytic function.
        let q = |x: [f64; 2]| x[0] * x[0] + x[0] * x[1] - x[1];
        let qg = |x: [f64; 2]| [2.0 * x[0] + x[1], x[0] - 1.0];
        let coarse = FemField::interpolate(dm(1, Degree::P1), &q).unwrap();
        let fine = FemField::interpolate(dm(2, Degree::P2), &q).unwrap();
        let e = errors_against_reference(&coarse, &fine).unwrap();
        assert!((e.l2 - error_l2(&coarse, &q).unwrap()).abs() < 1e-14);
        assert!((e.h1_semi - error_h1_semi(&coarse, &qg).unwrap()).abs() < 1e-13);
        assert!((e.l2_boundary - error_l2_boundary(&coarse, &q).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn non_nested_reference_rejected() {
        let a = FemField::zero(dm(2, Degree::P1));
        let b = FemField::zero(dm(1, Degree::P1));
        assert!(errors_against_reference(&a, &b).is_err());
    }
}
