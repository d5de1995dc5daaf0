use crate::function::ScalarFn;
use crate::{Error, Result};

use super::{assemble_boundary_mass, assemble_load, assemble_mass, assemble_stiffness, CsrMatrix, DofMap, TripletBuilder};

/// The coupled state/adjoint system
///
/// ```text
/// [ A  0 ] [Y]   [F]
/// [ B  C ] [Z] = [G]
/// ```
///
/// `Y` holds all `N` state dofs, `Z` the `|I|` interior adjoint dofs. The
/// first block row tests the state equation with interior functions, the
/// second tests the adjoint equation with every basis function.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    /// `|I| x N`: stiffness rows of interior test functions.
    pub a: CsrMatrix,
    /// `N x N`: `-(gamma M_Gamma + M)`.
    pub b: CsrMatrix,
    /// `N x |I|`: stiffness columns of interior trial functions.
    pub c: CsrMatrix,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub gamma: f64,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub boundary_mass: CsrMatrix,
    pub interior: Vec<usize>,
}

impl BlockSystem {
    pub fn num_state(&self) -> usize {
        self.b.nrows()
    }

    pub fn num_adjoint(&self) -> usize {
        self.a.nrows()
    }

    /// `N + |I|`.
    pub fn dim(&self) -> usize {
        self.num_state() + self.num_adjoint()
    }

    /// The assembled square matrix, rows `[A 0; B C]`, columns `(Y, Z)`.
    pub fn coupled_matrix(&self) -> CsrMatrix {
        let n = self.num_state();
        let ni = self.num_adjoint();
        let mut t = TripletBuilder::with_capacity(n + ni, n + ni, self.a.nnz() + self.b.nnz() + self.c.nnz());
        for (i, j, v) in self.a.triplets() {
            t.push(i, j, v);
        }
        for (i, j, v) in self.b.triplets() {
            t.push(ni + i, j, v);
        }
        for (i, j, v) in self.c.triplets() {
            t.push(ni + i, n + j, v);
        }
        t.build()
    }

    /// `(F, G)`.
    pub fn rhs(&self) -> Vec<f64> {
        self.f.iter().chain(&self.g).copied().collect()
    }

    /// Residuals `(F - A Y, G - B Y - C Z)` of both block rows.
    pub fn residuals(&self, y: &[f64], z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let ay = self.a.spmv(y)?;
        let by = self.b.spmv(y)?;
        let cz = self.c.spmv(z)?;
        let r1 = self.f.iter().zip(&ay).map(|(f, a)| f - a).collect();
        let r2 = (0..self.g.len()).map(|i| self.g[i] - by[i] - cz[i]).collect();
        Ok((r1, r2))
    }
}

/// Assembles the coupled system for regularisation `gamma`, source `f` and
/// target state `y_d`.
pub fn build_block_system(dm: &DofMap, gamma: f64, f: &dyn ScalarFn, y_d: &dyn ScalarFn) -> Result<BlockSystem> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Config(format!("regularisation parameter gamma must be positive, got {gamma}")));
    }
    let interior = dm.interior_dofs().to_vec();
    let stiffness = assemble_stiffness(dm);
    let mass = assemble_mass(dm);
    let boundary_mass = assemble_boundary_mass(dm);
    let a = stiffness.select_rows(&interior);
    let c = stiffness.select_cols(&interior);
    let b = mass.linear_combination(-1.0, &boundary_mass, -gamma)?;
    let load_f = assemble_load(dm, f)?;
    let f = interior.iter().map(|&i| load_f[i]).collect();
    let g = assemble_load(dm, y_d)?.into_iter().map(|v| -v).collect();
    Ok(BlockSystem { a, b, c, f, g, gamma, stiffness, mass, boundary_mass, interior })
}
