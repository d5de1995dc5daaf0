use crate::assembly::{assemble_boundary_load, assemble_boundary_mass, DofMap};
use crate::function::ScalarFn;
use crate::linalg::ProfileCholesky;
use crate::Result;

use super::norms::error_exactness;

/// `L2(Gamma)` projection of `q` onto the trace space.
///
/// Returns coefficients ordered as `dm.boundary_dofs()`, characterised by
/// `(q - P q, chi)_Gamma = 0` for every boundary basis function `chi`.
pub fn boundary_l2_projection(dm: &DofMap, q: &dyn ScalarFn) -> Result<Vec<f64>> {
    let bnd = dm.boundary_dofs();
    let m = assemble_boundary_mass(dm).select_rows(bnd).select_cols(bnd);
    let load = assemble_boundary_load(dm, q, error_exactness(dm.degree()) + 2)?;
    let rhs: Vec<f64> = bnd.iter().map(|&i| load[i]).collect();
    Ok(ProfileCholesky::factor(&m)?.solve(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Degree;
    use crate::mesh::{unit_square_mesh, Refinement};
    use std::sync::Arc;

    fn dm(level: usize, degree: Degree) -> DofMap {
        DofMap::new(Arc::new(unit_square_mesh(level, Refinement::Bisection)), degree)
    }

    #[test]
    fn reproduces_trace_space_members() {
        for degree in [Degree::P1, Degree::P2] {
            let d = dm(2, degree);
            let g = |x: [f64; 2]| if degree == Degree::P1 { 1.0 + x[0] - 2.0 * x[1] } else { x[0] * x[0] - x[1] };
            let p = boundary_l2_projection(&d, &g).unwrap();
            for (&i, v) in d.boundary_dofs().iter().zip(&p) {
                assert!((v - g(d.coords()[i])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_projects_to_zero() {
        let d = dm(1, Degree::P1);
        assert!(boundary_l2_projection(&d, &|_: [f64; 2]| 0.0).unwrap().iter().all(|&v| v == 0.0));
    }
}
