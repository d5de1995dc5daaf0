use crate::assembly::{BlockSystem, CsrMatrix};
use crate::{Error, Result};

use super::profile::{dense_cholesky, dense_cholesky_solve, ProfileCholesky};

/// Boundary Schur complement solver.
///
/// With `K = A_I` (interior stiffness) the first block row gives
/// `Y_I = K^{-1}(F - A_B Y_B)` and the interior rows of the second give
/// `Z = K^{-1}(G_I - B_II Y_I - B_IB Y_B)`. The remaining boundary rows form
/// `S Y_B = r` with `S = Phi^T B Phi`, `Phi = [-K^{-1} A_B; I]`, which is
/// symmetric negative definite because `B` is.
pub(super) struct BlockElimination {
    n: usize,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    k: ProfileCholesky,
    a_b: CsrMatrix,
    b_ii: CsrMatrix,
    b_ib: CsrMatrix,
    b_bi: CsrMatrix,
    b_bb: CsrMatrix,
    c_b: CsrMatrix,
    /// Cholesky factor of `-S`, row-major.
    schur: Vec<f64>,
}

fn sub(v: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| v[i]).collect()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

impl BlockElimination {
    pub fn new(s: &BlockSystem) -> Result<Self> {
        let n = s.num_state();
        let ni = s.num_adjoint();
        if s.interior.len() != ni {
            return Err(Error::Dimension(format!(
                "block elimination needs the interior dof list ({} entries for {ni} adjoint rows)",
                s.interior.len()
            )));
        }
        let mut is_int = vec![false; n];
        for &i in &s.interior {
            is_int[i] = true;
        }
        let interior = s.interior.clone();
        let boundary: Vec<usize> = (0..n).filter(|&i| !is_int[i]).collect();

        let k_mat = s.a.select_cols(&interior);
        let c_i = s.c.select_rows(&interior);
        let scale = k_mat.values().iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if k_mat.max_abs_diff(&c_i.transpose())? > 1e-12 * scale || k_mat.asymmetry().unwrap_or(0.0) > 1e-12 * scale {
            return Err(Error::Solver("block elimination requires A_I = C_I^T symmetric".into()));
        }
        let k = ProfileCholesky::factor(&k_mat)?;
        let a_b = s.a.select_cols(&boundary);
        let b_i = s.b.select_rows(&interior);
        let b_b = s.b.select_rows(&boundary);
        let mut e = BlockElimination {
            n,
            b_ii: b_i.select_cols(&interior),
            b_ib: b_i.select_cols(&boundary),
            b_bi: b_b.select_cols(&interior),
            b_bb: b_b.select_cols(&boundary),
            c_b: s.c.select_rows(&boundary),
            interior,
            boundary,
            k,
            a_b,
            schur: Vec::new(),
        };
        e.build_schur()?;
        Ok(e)
    }

    fn build_schur(&mut self) -> Result<()> {
        let nb = self.boundary.len();
        let mut neg_s = vec![0.0; nb * nb];
        let at_b = self.a_b.transpose();
        for j in 0..nb {
            // w = -K^{-1} A_B e_j
            let col: Vec<f64> = {
                let mut c = vec![0.0; self.interior.len()];
                for (i, v) in at_b.row(j) {
                    c[i] = v;
                }
                c
            };
            let mut w = self.k.solve(&col);
            w.iter_mut().for_each(|v| *v = -*v);
            let mut ej = vec![0.0; nb];
            ej[j] = 1.0;
            let mut v = self.b_ii.spmv(&w)?;
            axpy(&mut v, 1.0, &self.b_ib.spmv(&ej)?);
            v.iter_mut().for_each(|x| *x = -*x);
            let kv = self.k.solve(&v);
            let mut sj = self.b_bi.spmv(&w)?;
            axpy(&mut sj, 1.0, &self.b_bb.spmv(&ej)?);
            axpy(&mut sj, 1.0, &self.c_b.spmv(&kv)?);
            for i in 0..nb {
                neg_s[i * nb + j] = -sj[i];
            }
        }
        for i in 0..nb {
            for j in 0..i {
                let m = 0.5 * (neg_s[i * nb + j] + neg_s[j * nb + i]);
                neg_s[i * nb + j] = m;
                neg_s[j * nb + i] = m;
            }
        }
        dense_cholesky(&mut neg_s, nb)?;
        self.schur = neg_s;
        Ok(())
    }

    /// Solves for the full rhs `(F, G)`, returning `(Y, Z)` concatenated.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let ni = self.interior.len();
        if rhs.len() != ni + self.n {
            return Err(Error::Dimension(format!("rhs length {} for system of size {}", rhs.len(), ni + self.n)));
        }
        let (f, g) = rhs.split_at(ni);
        let g_i = sub(g, &self.interior);
        let g_b = sub(g, &self.boundary);

        let y_i0 = self.k.solve(f);
        let mut t = g_i.clone();
        axpy(&mut t, -1.0, &self.b_ii.spmv(&y_i0)?);
        let z0 = self.k.solve(&t);
        let mut r = g_b;
        axpy(&mut r, -1.0, &self.b_bi.spmv(&y_i0)?);
        axpy(&mut r, -1.0, &self.c_b.spmv(&z0)?);
        r.iter_mut().for_each(|v| *v = -*v);
        dense_cholesky_solve(&self.schur, self.boundary.len(), &mut r);
        let y_b = r;

        let mut t = f.to_vec();
        axpy(&mut t, -1.0, &self.a_b.spmv(&y_b)?);
        let y_i = self.k.solve(&t);
        let mut t = g_i;
        axpy(&mut t, -1.0, &self.b_ii.spmv(&y_i)?);
        axpy(&mut t, -1.0, &self.b_ib.spmv(&y_b)?);
        let z = self.k.solve(&t);

        let mut out = vec![0.0; self.n + ni];
        for (k, &i) in self.interior.iter().enumerate() {
            out[i] = y_i[k];
        }
        for (k, &i) in self.boundary.iter().enumerate() {
            out[i] = y_b[k];
        }
        out[self.n..].copy_from_slice(&z);
        Ok(out)
    }
}
