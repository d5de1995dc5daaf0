//! Solvers for the coupled block system.
//!
//! Two independent routes are provided. [`SolverMethod::DirectLu`] factors
//! the full nonsymmetric `(N + |I|)`-square matrix with a sparse LU and
//! polishes the result by iterative refinement. [`SolverMethod::BlockElimination`]
//! exploits the block structure: both block rows are driven by the interior
//! stiffness `K_II`, so eliminating the interior state and the adjoint leaves a
//! dense symmetric negative definite system for the boundary state alone.

mod direct;
mod elimination;
mod profile;

use serde::{Deserialize, Serialize};

use crate::assembly::{BlockSystem, CsrMatrix};
use crate::{Error, Result};

pub use profile::{reverse_cuthill_mckee, ProfileCholesky};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    #[default]
    DirectLu,
    BlockElimination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: SolverMethod,
    /// Backward error `||b - Ax|| / (||A|| ||x|| + ||b||)` required of the full system.
    pub tolerance: f64,
    /// Cap on iterative-refinement sweeps.
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { method: SolverMethod::DirectLu, tolerance: 1e-12, max_iterations: 5 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Config(format!("solver tolerance must lie in (0, 1), got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("solver max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSolution {
    /// State coefficients over all `N` dofs.
    pub y: Vec<f64>,
    /// Adjoint coefficients over the `|I|` interior dofs.
    pub z: Vec<f64>,
    /// Final relative residual of the full system.
    pub residual: f64,
    /// Refinement sweeps performed after the initial solve.
    pub iterations: usize,
}

/// Solves `[A 0; B C] (Y, Z) = (F, G)`.
pub fn solve_block(system: &BlockSystem, cfg: &SolverConfig) -> Result<BlockSolution> {
    cfg.validate()?;
    check_dimensions(system)?;
    let matrix = system.coupled_matrix();
    let rhs = system.rhs();
    let n = system.num_state();
    let (x, iterations, residual) = match cfg.method {
        SolverMethod::DirectLu => {
            let lu = direct::SparseLu::factor(&matrix)?;
            refine(&matrix, &rhs, lu.solve(&rhs)?, cfg, |r| lu.solve(r))?
        }
        SolverMethod::BlockElimination => {
            let elim = elimination::BlockElimination::new(system)?;
            refine(&matrix, &rhs, elim.solve(&rhs)?, cfg, |r| elim.solve(r))?
        }
    };
    Ok(BlockSolution { y: x[..n].to_vec(), z: x[n..].to_vec(), residual, iterations })
}

/// Sparse matrix-vector product.
pub fn spmv(m: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    m.spmv(x)
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Normwise backward error `||b - Ax|| / (||A|| ||x|| + ||b||)` in the
/// infinity norm; zero for `x = 0, b = 0`.
pub fn relative_residual(m: &CsrMatrix, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = m.spmv(x)?;
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    Ok(backward_error(norm_inf(&r), m.norm_inf() * norm_inf(x) + norm_inf(b)))
}

/// `r / scale`, or `r` itself when the scale vanishes.
pub fn backward_error(r: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

fn check_dimensions(s: &BlockSystem) -> Result<()> {
    let n = s.b.nrows();
    let ni = s.a.nrows();
    let ok = s.a.ncols() == n
        && s.b.ncols() == n
        && s.c.nrows() == n
        && s.c.ncols() == ni
        && s.f.len() == ni
        && s.g.len() == n;
    if !ok {
        return Err(Error::Dimension(format!(
            "inconsistent block system: A {}x{}, B {}x{}, C {}x{}, F {}, G {}",
            s.a.nrows(),
            s.a.ncols(),
            s.b.nrows(),
            s.b.ncols(),
            s.c.nrows(),
            s.c.ncols(),
            s.f.len(),
            s.g.len()
        )));
    }
    Ok(())
}

fn refine(
    m: &CsrMatrix,
    b: &[f64],
    mut x: Vec<f64>,
    cfg: &SolverConfig,
    solve: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<(Vec<f64>, usize, f64)> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("factorization produced non-finite values (singular system)".into()));
    }
    let mut res = relative_residual(m, &x, b)?;
    let mut it = 0;
    while res > cfg.tolerance {
        if it == cfg.max_iterations {
            return Err(Error::IterationLimit { iterations: it, residual: res });
        }
        let ax = m.spmv(&x)?;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let d = solve(&r)?;
        x.iter_mut().zip(&d).for_each(|(x, d)| *x += d);
        res = relative_residual(m, &x, b)?;
        it += 1;
    }
    Ok((x, it, res))
}
