//! Compressed sparse row matrices.

use std::io::{BufRead, Write};

use crate::{Error, Result};

/// Unsorted `(row, col, value)` entries; duplicates are summed on conversion.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        TripletBuilder { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols, "({i}, {j}) outside {}x{}", self.nrows, self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sums duplicates (in insertion order) and drops exact zeros.
    pub fn build(mut self) -> CsrMatrix {
        // Stable sort keeps the summation order of duplicates deterministic.
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values = Vec::with_capacity(self.entries.len());
        let mut k = 0;
        while k < self.entries.len() {
            let (i, j, mut v) = self.entries[k];
            k += 1;
            while k < self.entries.len() && self.entries[k].0 == i && self.entries[k].1 == j {
                v += self.entries[k].2;
                k += 1;
            }
            if v != 0.0 {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix { nrows: n, ncols: n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), values: vec![1.0; n] }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut b = TripletBuilder::new(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols, "ragged dense matrix");
            for (j, &v) in r.iter().enumerate() {
                b.push(i, j, v);
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = self * x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(Error::Dimension(format!("spmv: matrix has {} columns, vector has {}", self.ncols, x.len())));
        }
        Ok((0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect())
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut b = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for (i, j, v) in self.triplets() {
            b.push(j, i, v);
        }
        b.build()
    }

    /// Rows `rows` of `self`, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &i in rows {
            for (j, v) in self.row(i) {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows: rows.len(), ncols: self.ncols, row_ptr, col_idx, values }
    }

    /// Columns `cols` of `self`, renumbered `0..cols.len()` in that order.
    pub fn select_cols(&self, cols: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.ncols];
        for (k, &j) in cols.iter().enumerate() {
            map[j] = k;
        }
        let mut b = TripletBuilder::new(self.nrows, cols.len());
        for (i, j, v) in self.triplets() {
            if map[j] != usize::MAX {
                b.push(i, map[j], v);
            }
        }
        b.build()
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Result<CsrMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::Dimension(format!(
                "cannot combine {}x{} with {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut b = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for (i, j, v) in self.triplets() {
            b.push(i, j, alpha * v);
        }
        for (i, j, v) in other.triplets() {
            b.push(i, j, beta * v);
        }
        Ok(b.build())
    }

    pub fn scaled(&self, alpha: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= alpha);
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.values[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|a_ij - a_ji|`; `None` for non-square matrices.
    pub fn asymmetry(&self) -> Option<f64> {
        if self.nrows != self.ncols {
            return None;
        }
        Some(self.triplets().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max))
    }

    /// Largest absolute entry difference to `other` (same shape required).
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> Result<f64> {
        let d = self.linear_combination(1.0, other, -1.0)?;
        Ok(d.values.iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    /// Matrix Market `coordinate real general` with 1-based indices.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
        }
        Ok(())
    }

    /// Reads `coordinate real general` or `symmetric` Matrix Market data.
    pub fn read_matrix_market<R: BufRead>(r: R) -> Result<CsrMatrix> {
        let bad = |msg: &str| Error::Config(format!("matrix market: {msg}"));
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))??;
        let h = header.to_ascii_lowercase();
        let fields: Vec<&str> = h.split_whitespace().collect();
        if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
            return Err(bad("expected '%%MatrixMarket matrix coordinate ...' header"));
        }
        if fields[3] != "real" && fields[3] != "integer" {
            return Err(bad("only real/integer fields are supported"));
        }
        let symmetric = match fields[4] {
            "general" => false,
            "symmetric" => true,
            other => return Err(bad(&format!("unsupported symmetry '{other}'"))),
        };
        let mut size = None;
        let mut builder = None;
        for line in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            let nums: Vec<&str> = t.split_whitespace().collect();
            if size.is_none() {
                if nums.len() != 3 {
                    return Err(bad("size line must have three entries"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("bad size line"));
                let (m, n, nnz) = (p(nums[0])?, p(nums[1])?, p(nums[2])?);
                size = Some((m, n));
                builder = Some(TripletBuilder::with_capacity(m, n, nnz));
                continue;
            }
            let (m, n) = size.unwrap();
            if nums.len() != 3 {
                return Err(bad(&format!("bad entry line '{t}'")));
            }
            let i: usize = nums[0].parse().map_err(|_| bad("bad row index"))?;
            let j: usize = nums[1].parse().map_err(|_| bad("bad column index"))?;
            let v: f64 = nums[2].parse().map_err(|_| bad("bad value"))?;
            if i == 0 || j == 0 || i > m || j > n {
                return Err(bad(&format!("entry ({i}, {j}) outside {m}x{n}")));
            }
            let b = builder.as_mut().unwrap();
            b.push(i - 1, j - 1, v);
            if symmetric && i != j {
                b.push(j - 1, i - 1, v);
            }
        }
        builder.map(TripletBuilder::build).ok_or_else(|| bad("missing size line"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn build_sums_and_drops_zeros() {
        let mut b = TripletBuilder::new(2, 3);
        b.push(1, 2, 1.0);
        b.push(0, 1, 2.0);
        b.push(1, 2, -1.0);
        b.push(0, 0, 3.0);
        b.push(0, 1, 0.5);
        let m = b.build();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 2.5);
        assert_eq!(m.get(1, 2), 0.0);
        assert_eq!(m.col_idx(), &[0, 1]);
    }

    #[test]
    fn spmv_identity_zero_and_dense() {
        let x = vec![1.0, -2.0, 3.5];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x);
        assert_eq!(CsrMatrix::zeros(2, 3).spmv(&x).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(CsrMatrix::identity(2).spmv(&x), Err(Error::Dimension(_))));

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let dense: Vec<Vec<f64>> =
            (0..5).map(|_| (0..5).map(|_| if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect()).collect();
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = CsrMatrix::from_dense(&dense).spmv(&x).unwrap();
        for i in 0..5 {
            let expect: f64 = (0..5).map(|j| dense[i][j] * x[j]).sum();
            assert!((y[i] - expect).abs() <= 1e-15);
        }
    }

    #[test]
    fn selections_and_transpose() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, 3.0, 4.0], vec![5.0, 0.0, 6.0]]);
        let r = m.select_rows(&[2, 0]);
        assert_eq!(r.to_dense(), vec![vec![5.0, 0.0, 6.0], vec![1.0, 2.0, 0.0]]);
        let c = m.select_cols(&[1]);
        assert_eq!(c.to_dense(), vec![vec![2.0], vec![3.0], vec![0.0]]);
        assert_eq!(m.transpose().get(0, 2), 5.0);
        assert_eq!(m.asymmetry(), Some(5.0));
    }

    #[test]
    fn matrix_market_round_trip() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 0.1, 0.0], vec![0.0, -3.25e-7, 4.0]]);
        let mut buf = Vec::new();
        m.write_matrix_market(&mut buf).unwrap();
        let back = CsrMatrix::read_matrix_market(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_market_symmetric_and_errors() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 2.0\n2 1 1.0\n";
        let m = CsrMatrix::read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(m.to_dense(), vec![vec![2.0, 1.0], vec![1.0, 0.0]]);
        assert!(CsrMatrix::read_matrix_market("garbage\n".as_bytes()).is_err());
        let oob = "%%MatrixMarket matrix coordinate real general\n1 1 1\n2 1 1.0\n";
        assert!(CsrMatrix::read_matrix_market(oob.as_bytes()).is_err());
    }
}
