use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::assembly::CsrMatrix;
use crate::{Error, Result};

/// Sparse LU with fill-reducing column ordering and partial pivoting.
pub(super) struct SparseLu {
    lu: Lu<usize, f64>,
    n: usize,
}

impl SparseLu {
    pub fn factor(m: &CsrMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!("LU needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        let triplets: Vec<Triplet<usize, usize, f64>> = m.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(m.nrows(), m.ncols(), &triplets)
            .map_err(|e| Error::Solver(format!("sparse matrix construction failed: {e:?}")))?;
        let lu = a.sp_lu().map_err(|e| Error::Solver(format!("LU factorization failed: {e:?}")))?;
        Ok(SparseLu { lu, n: m.nrows() })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::Dimension(format!("rhs length {} for a {}-square factor", b.len(), self.n)));
        }
        let mut x = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        Ok((0..self.n).map(|i| x[(i, 0)]).collect())
    }
}
