use std::collections::VecDeque;

use crate::assembly::CsrMatrix;
use crate::{Error, Result};

/// Reverse Cuthill-McKee ordering of a structurally symmetric matrix.
///
/// Returns `perm` with `perm[new] = old`. Each connected component starts
/// from a minimum-degree vertex; neighbours are queued by increasing degree.
pub fn reverse_cuthill_mckee(m: &CsrMatrix) -> Vec<usize> {
    let n = m.nrows();
    let degree: Vec<usize> = (0..n).map(|i| m.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    let mut queue = VecDeque::new();
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = m.row(v).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nb.sort_by_key(|&j| (degree[j], j));
            for j in nb {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (skyline) Cholesky factor `P A P^T = L L^T` of a symmetric
/// positive definite matrix, stored row by row from the first nonzero column.
#[derive(Debug, Clone)]
pub struct ProfileCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl ProfileCholesky {
    /// Factors `m` after reordering with [`reverse_cuthill_mckee`].
    pub fn factor(m: &CsrMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!("Cholesky needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        let n = m.nrows();
        let perm = reverse_cuthill_mckee(m);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for (j, _) in m.row(old) {
                first[new] = first[new].min(inv[j]);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for (new, &old) in perm.iter().enumerate() {
            for (j, v) in m.row(old) {
                let c = inv[j];
                if c <= new {
                    data[start[new] + c - first[new]] = v;
                }
            }
        }
        let mut f = ProfileCholesky { perm, first, start, data };
        f.decompose()?;
        Ok(f)
    }

    fn decompose(&mut self) -> Result<()> {
        let n = self.first.len();
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.start[i];
            for j in fi..i {
                let fj = self.first[j];
                let rj = self.start[j];
                let k0 = fi.max(fj);
                let mut s = self.data[ri + j - fi];
                for k in k0..j {
                    s -= self.data[ri + k - fi] * self.data[rj + k - fj];
                }
                self.data[ri + j - fi] = s / self.data[rj + j - fj];
            }
            let mut d = self.data[ri + i - fi];
            for k in fi..i {
                let l = self.data[ri + k - fi];
                d -= l * l;
            }
            if !(d > 0.0) {
                return Err(Error::Solver(format!("matrix is not positive definite (pivot {i} = {d:e})")));
            }
            self.data[ri + i - fi] = d.sqrt();
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Stored entries of the factor.
    pub fn profile_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length");
        let mut x: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let ri = self.start[i];
            let mut s = x[i];
            for k in fi..i {
                s -= self.data[ri + k - fi] * x[k];
            }
            x[i] = s / self.data[ri + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let ri = self.start[i];
            x[i] /= self.data[ri + i - fi];
            let xi = x[i];
            for k in fi..i {
                x[k] -= self.data[ri + k - fi] * xi;
            }
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

/// In-place dense Cholesky of a row-major symmetric positive definite matrix.
pub(super) fn dense_cholesky(a: &mut [f64], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::Solver(format!("Schur complement is not definite (pivot {j} = {d:e})")));
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    Ok(())
}

pub(super) fn dense_cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}
