use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_boundary_mass, assemble_stiffness, BlockSystem, CsrMatrix, DofMap};
use crate::function::{ScalarFn, VectorFn};
use crate::linalg::{backward_error, norm_inf};
use crate::{Error, Result};

use super::{error_h1_semi, error_l2, norm_l2, norm_l2_boundary, seminorm_h_half_boundary, FemField};

/// Default seed of the boundary-bubble verifier.
pub const BUBBLE_SEED: u64 = 0x5eed_b0b1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleEstimate {
    /// `max ||grad theta|| h^{1/2} / ||theta||_Gamma` over the trials.
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub h: f64,
    pub trials: usize,
    pub seed: u64,
}

fn quad_form(m: &CsrMatrix, x: &[f64]) -> f64 {
    m.triplets().map(|(i, j, v)| x[i] * v * x[j]).sum()
}

fn bubble_ratio(k: &CsrMatrix, mb: &CsrMatrix, theta: &[f64], h: f64) -> f64 {
    (quad_form(k, theta) * h / quad_form(mb, theta)).sqrt()
}

/// Inverse estimate for discrete functions vanishing at every interior node.
///
/// Draws `trials` fields with coefficients uniform in `[-1, 1]` on the
/// boundary dofs and zero elsewhere; identically zero draws are redrawn.
pub fn verify_boundary_bubble_estimate(dm: &DofMap, trials: usize, seed: u64) -> Result<BubbleEstimate> {
    if trials == 0 {
        return Err(Error::Config("boundary bubble verifier needs at least one trial".into()));
    }
    let k = assemble_stiffness(dm);
    let mb = assemble_boundary_mass(dm);
    let h = dm.mesh().h_max;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = vec![0.0; dm.num_dofs()];
    let (mut max, mut min) = (0.0f64, f64::INFINITY);
    let mut done = 0;
    while done < trials {
        for &i in dm.boundary_dofs() {
            theta[i] = rng.gen_range(-1.0..=1.0);
        }
        if dm.boundary_dofs().iter().all(|&i| theta[i] == 0.0) {
            continue;
        }
        let r = bubble_ratio(&k, &mb, &theta, h);
        max = max.max(r);
        min = min.min(r);
        done += 1;
    }
    Ok(BubbleEstimate { max_ratio: max, min_ratio: min, h, trials, seed })
}

/// The bubble ratio of the single boundary basis function at `dof`.
pub fn boundary_hat_ratio(dm: &DofMap, dof: usize) -> Result<f64> {
    if !dm.is_boundary(dof) {
        return Err(Error::Config(format!("dof {dof} is not a boundary dof")));
    }
    let mut theta = vec![0.0; dm.num_dofs()];
    theta[dof] = 1.0;
    Ok(bubble_ratio(&assemble_stiffness(dm), &assemble_boundary_mass(dm), &theta, dm.mesh().h_max))
}

/// `||y - y_h|| / ||grad(y - y_h)||`; `None` when the gradient error vanishes.
pub fn verify_l2_controlled_by_h1(y: &FemField, exact: &dyn ScalarFn, exact_grad: &dyn VectorFn) -> Result<Option<f64>> {
    let h1 = error_h1_semi(y, exact_grad)?;
    if !(h1 > 0.0) {
        return Ok(None);
    }
    Ok(Some(error_l2(y, exact)? / h1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityMeasures {
    /// `gamma^{1/2} ||y_h||_Gamma + ||y_h||`
    pub energy: f64,
    /// `|y_h|_{1/2, Gamma}`
    pub half: f64,
}

/// The two quantities bounded uniformly in `h` by the discrete stability theory.
pub fn verify_discrete_stability(y: &FemField, gamma: f64) -> Result<StabilityMeasures> {
    if !(gamma > 0.0) {
        return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
    }
    Ok(StabilityMeasures {
        energy: gamma.sqrt() * norm_l2_boundary(y) + norm_l2(y),
        half: seminorm_h_half_boundary(y),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockResiduals {
    /// `||F - A Y|| / (||A|| ||Y|| + ||F||)`.
    pub state: f64,
    /// `||G - B Y - C Z|| / (||B|| ||Y|| + ||C|| ||Z|| + ||G||)`.
    pub adjoint: f64,
}

/// Normwise backward errors (infinity norm) of the two block rows.
pub fn block_residuals(system: &BlockSystem, y: &[f64], z: &[f64]) -> Result<BlockResiduals> {
    let (r1, r2) = system.residuals(y, z)?;
    let (ny, nz) = (norm_inf(y), norm_inf(z));
    Ok(BlockResiduals {
        state: backward_error(norm_inf(&r1), system.a.norm_inf() * ny + norm_inf(&system.f)),
        adjoint: backward_error(
            norm_inf(&r2),
            system.b.norm_inf() * ny + system.c.norm_inf() * nz + norm_inf(&system.g),
        ),
    })
}

/// `max / min` of a positive sequence.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}
