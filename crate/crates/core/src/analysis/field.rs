use std::sync::Arc;

use crate::assembly::DofMap;
use crate::function::ScalarFn;
use crate::{Error, Result};

/// A finite element function: coefficients over every dof of a [`DofMap`].
///
/// Fields of the homogeneous space (vanishing on the boundary) are stored
/// zero-extended.
#[derive(Debug, Clone)]
pub struct FemField {
    dofmap: Arc<DofMap>,
    coeffs: Vec<f64>,
}

impl FemField {
    pub fn new(dofmap: Arc<DofMap>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dofmap.num_dofs() {
            return Err(Error::Dimension(format!(
                "field has {} coefficients, dofmap has {} dofs",
                coeffs.len(),
                dofmap.num_dofs()
            )));
        }
        Ok(FemField { dofmap, coeffs })
    }

    pub fn zero(dofmap: Arc<DofMap>) -> Self {
        let n = dofmap.num_dofs();
        FemField { dofmap, coeffs: vec![0.0; n] }
    }

    /// Zero extension of interior coefficients (ordered as `interior_dofs`).
    pub fn from_interior(dofmap: Arc<DofMap>, interior: &[f64]) -> Result<Self> {
        if interior.len() != dofmap.num_interior() {
            return Err(Error::Dimension(format!(
                "{} interior coefficients for {} interior dofs",
                interior.len(),
                dofmap.num_interior()
            )));
        }
        let mut coeffs = vec![0.0; dofmap.num_dofs()];
        for (&i, &v) in dofmap.interior_dofs().iter().zip(interior) {
            coeffs[i] = v;
        }
        Ok(FemField { dofmap, coeffs })
    }

    pub fn interpolate(dofmap: Arc<DofMap>, g: &dyn ScalarFn) -> Result<Self> {
        let coeffs = dofmap.interpolate(g)?;
        Ok(FemField { dofmap, coeffs })
    }

    pub fn dofmap(&self) -> &DofMap {
        &self.dofmap
    }

    pub fn dofmap_arc(&self) -> &Arc<DofMap> {
        &self.dofmap
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coeffs
    }

    /// The field with its interior coefficients set to zero: the discrete
    /// extension of its boundary trace that vanishes at interior nodes.
    pub fn boundary_part(&self) -> FemField {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &i in self.dofmap.boundary_dofs() {
            coeffs[i] = self.coeffs[i];
        }
        FemField { dofmap: self.dofmap.clone(), coeffs }
    }

    /// Boundary coefficients, ordered as `boundary_dofs`.
    pub fn trace(&self) -> Vec<f64> {
        self.dofmap.boundary_dofs().iter().map(|&i| self.coeffs[i]).collect()
    }

    /// Largest boundary coefficient magnitude; zero for homogeneous fields.
    pub fn max_boundary_value(&self) -> f64 {
        self.dofmap.boundary_dofs().iter().fold(0.0, |m, &i| m.max(self.coeffs[i].abs()))
    }

    /// Value in cell `t` at reference point `xi`.
    pub fn eval_in_cell(&self, t: usize, xi: [f64; 2]) -> f64 {
        let bv = self.dofmap.basis().eval(xi);
        self.dofmap.cell_dofs(t).iter().zip(bv.values()).map(|(&d, v)| self.coeffs[d] * v).sum()
    }

    /// Physical gradient in cell `t` at reference point `xi`.
    pub fn grad_in_cell(&self, t: usize, xi: [f64; 2]) -> [f64; 2] {
        let bv = self.dofmap.basis().eval(xi);
        let map = self.dofmap.element_map(t);
        let mut g = [0.0; 2];
        for (&d, r) in self.dofmap.cell_dofs(t).iter().zip(bv.grads()) {
            let p = map.grad(*r);
            g[0] += self.coeffs[d] * p[0];
            g[1] += self.coeffs[d] * p[1];
        }
        g
    }

    /// Trace values on boundary facet `e` at parameter `s` in `[0, 1]`.
    pub fn eval_on_facet(&self, e: usize, s: f64) -> f64 {
        let (v, n) = self.dofmap.basis().eval_edge(s);
        self.dofmap.facet_dofs(e).iter().zip(&v[..n]).map(|(&d, v)| self.coeffs[d] * v).sum()
    }
}
