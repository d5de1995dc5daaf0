use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    block_residuals, error_h1_semi, error_l2, error_l2_boundary, errors_against_reference, BlockResiduals,
    ConvergenceReport, FemField, Norm,
};
use crate::assembly::{build_block_system, BlockSystem, DofMap};
use crate::linalg::{solve_block, BlockSolution};
use crate::mesh::{make_initial_mesh, refine_uniform, TriMesh};
use crate::{Error, Result};

use super::cache::{self, CachedReference};
use super::{Problem, ProblemSpec};

/// The level-`level` mesh of the problem's domain.
pub fn build_mesh(spec: &ProblemSpec, level: usize) -> Result<TriMesh> {
    let mut mesh = make_initial_mesh(spec.domain, spec.layout)?;
    mesh.refinement = spec.refinement;
    for _ in 0..level {
        mesh = refine_uniform(&mesh);
    }
    Ok(mesh)
}

#[derive(Debug, Clone)]
pub struct LevelSolution {
    pub level: usize,
    pub dofmap: Arc<DofMap>,
    pub system: BlockSystem,
    pub solution: BlockSolution,
    /// Discrete state; its boundary trace is the discrete control.
    pub y: FemField,
    /// Discrete adjoint, zero on the boundary.
    pub z: FemField,
    pub residuals: BlockResiduals,
}

impl LevelSolution {
    pub fn summary(&self) -> LevelSummary {
        let mesh = self.dofmap.mesh();
        LevelSummary {
            level: self.level,
            h: mesh.h_max,
            elements: mesh.num_triangles(),
            dofs: self.dofmap.num_dofs(),
            unknowns: self.system.dim(),
            residual: self.solution.residual,
            refinement_steps: self.solution.iterations,
            state_residual: self.residuals.state,
            adjoint_residual: self.residuals.adjoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub h: f64,
    pub elements: usize,
    pub dofs: usize,
    pub unknowns: usize,
    /// Relative residual of the full coupled system.
    pub residual: f64,
    pub refinement_steps: usize,
    pub state_residual: f64,
    pub adjoint_residual: f64,
}

/// Assembles and solves the coupled system on level `level`.
pub fn solve_level(problem: &Problem, level: usize) -> Result<LevelSolution> {
    let spec = &problem.spec;
    let mesh = Arc::new(build_mesh(spec, level)?);
    let dofmap = Arc::new(DofMap::new(mesh, spec.degree));
    let system = build_block_system(&dofmap, spec.gamma, &problem.f, &problem.y_d)?;
    let solution = solve_block(&system, &spec.solver)?;
    let residuals = block_residuals(&system, &solution.y, &solution.z)?;
    let y = FemField::new(dofmap.clone(), solution.y.clone())?;
    let z = FemField::from_interior(dofmap.clone(), &solution.z)?;
    Ok(LevelSolution { level, dofmap, system, solution, y, z, residuals })
}

fn reference_key(spec: &ProblemSpec, level: usize) -> String {
    let key = serde_json::json!({
        "domain": spec.domain,
        "gamma": spec.gamma,
        "degree": spec.degree,
        "constants": spec.constants,
        "f": spec.f,
        "y_d": spec.y_d,
        "level": level,
        "refinement": spec.refinement,
        "layout": spec.layout,
    });
    hex::encode(Sha256::digest(key.to_string().as_bytes()))
}

/// State and adjoint on the problem's reference level, read from or written
/// to the cache in `dir`. The flag reports a cache hit.
pub fn reference_solution(problem: &Problem, dir: &Path) -> Result<(FemField, FemField, bool)> {
    let spec = &problem.spec;
    let level = spec
        .reference_level
        .ok_or_else(|| Error::Config(format!("problem '{}' has no reference level", spec.name)))?;
    let hash = reference_key(spec, level);
    let dofmap = Arc::new(DofMap::new(Arc::new(build_mesh(spec, level)?), spec.degree));
    if let Some(entry) = cache::load(dir, &hash, level) {
        if let (Ok(y), Ok(z)) = (FemField::new(dofmap.clone(), entry.y), FemField::new(dofmap.clone(), entry.z)) {
            return Ok((y, z, true));
        }
    }
    let sol = solve_level(problem, level)?;
    let entry = CachedReference {
        config_hash: hash,
        level,
        y: sol.y.coefficients().to_vec(),
        z: sol.z.coefficients().to_vec(),
    };
    cache::store(dir, &entry)?;
    Ok((sol.y, sol.z, false))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutcome {
    pub report: ConvergenceReport,
    pub levels: Vec<LevelSummary>,
    /// Whether the reference solution came from the cache (reference studies only).
    pub reference_cached: Option<bool>,
}

/// Solves every configured level and measures the errors, against the exact
/// solution when one is configured and the cached reference solution otherwise.
pub fn convergence_study(problem: &Problem, cache_dir: &Path) -> Result<StudyOutcome> {
    let spec = &problem.spec;
    if problem.exact.is_none() && spec.reference_level.is_none() {
        return Err(Error::Config(format!(
            "problem '{}' needs an exact solution or a reference level for a convergence study",
            spec.name
        )));
    }
    let reference = match (&problem.exact, spec.reference_level) {
        (None, Some(_)) => Some(reference_solution(problem, cache_dir)?),
        _ => None,
    };
    let mut levels = Vec::new();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for level in spec.levels.iter() {
        let sol = solve_level(problem, level)?;
        let e = match (&problem.exact, &reference) {
            (Some(ex), _) => vec![
                error_h1_semi(&sol.y, &ex.grad_y)?,
                error_h1_semi(&sol.z, &ex.grad_z)?,
                error_l2_boundary(&sol.y, &ex.u)?,
                error_l2(&sol.y, &ex.y)?,
                error_l2(&sol.z, &ex.z)?,
            ],
            (None, Some((yr, zr, _))) => {
                let ey = errors_against_reference(&sol.y, yr)?;
                let ez = errors_against_reference(&sol.z, zr)?;
                vec![ey.h1_semi, ez.h1_semi, ey.l2_boundary, ey.l2, ez.l2]
            }
            (None, None) => unreachable!("checked above"),
        };
        rows.push((level, sol.dofmap.mesh().h_max));
        errors.push(e);
        levels.push(sol.summary());
    }
    let report = ConvergenceReport::new(&spec.name, spec.gamma, spec.degree.order(), Norm::ALL.to_vec(), &rows, &errors);
    Ok(StudyOutcome { report, levels, reference_cached: reference.map(|r| r.2) })
}
