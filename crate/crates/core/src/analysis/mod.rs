//! Error norms, convergence orders and numerical checks of the stability and
//! inverse estimates.

mod field;
mod half;
mod norms;
mod projection;
mod report;
mod verify;

pub use field::FemField;
pub use half::seminorm_h_half_boundary;
pub use norms::{
    error_exactness, error_h1_semi, error_l2, error_l2_boundary, errors_against_reference, norm_l2, norm_l2_boundary,
    seminorm_h1, ReferenceErrors,
};
pub use projection::boundary_l2_projection;
pub use report::{compute_eoc, format_sig, ConvergenceReport, LevelRow, Norm};
pub use verify::{
    block_residuals, boundary_hat_ratio, spread, verify_boundary_bubble_estimate, verify_discrete_stability,
    verify_l2_controlled_by_h1, BlockResiduals, BubbleEstimate, StabilityMeasures, BUBBLE_SEED,
};
