use serde::{Deserialize, Serialize};

use crate::analysis::{
    spread, verify_boundary_bubble_estimate, verify_discrete_stability, verify_l2_controlled_by_h1, BUBBLE_SEED,
};
use crate::expr::BoundExpr;
use crate::linalg::norm_inf;
use crate::Result;

use super::study::solve_level;
use super::{LevelRange, Problem};

pub const DEFAULT_VERIFY_LEVELS: LevelRange = LevelRange { min: 1, max: 6 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Levels to run; defaults to [`DEFAULT_VERIFY_LEVELS`].
    pub levels: Option<LevelRange>,
    pub bubble_trials: usize,
    pub seed: u64,
    /// Absolute bound on `||Y||_inf + ||Z||_inf` for homogeneous data.
    pub zero_tolerance: f64,
    /// Bound on the relative block-row residuals.
    pub residual_tolerance: f64,
    pub bubble_spread: f64,
    /// Bound on `max / first` of the `L2`/`H1` error ratio.
    pub ratio_growth: f64,
    /// Stability sequences are compared from this level on.
    pub stability_from: usize,
    pub stability_spread: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            levels: None,
            bubble_trials: 100,
            seed: BUBBLE_SEED,
            zero_tolerance: 1e-10,
            residual_tolerance: 1e-10,
            bubble_spread: 2.0,
            ratio_growth: 3.0,
            stability_from: 2,
            stability_spread: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Per-level values the check was decided on.
    pub values: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub problem: String,
    pub gamma: f64,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn bounded(name: &str, values: Vec<(usize, f64)>, limit: f64) -> Check {
    let v: Vec<f64> = values.iter().map(|p| p.1).collect();
    if v.len() < 2 {
        return Check { name: name.into(), passed: true, detail: "fewer than two levels; nothing to compare".into(), values };
    }
    let s = spread(&v);
    Check { name: name.into(), passed: s.is_finite() && s <= limit, detail: format!("max/min = {s:.4} (limit {limit})"), values }
}

/// The ratio may shrink under refinement but must not exceed `limit` times
/// its first value, and must end below where it started.
fn no_growth(name: &str, values: Vec<(usize, f64)>, limit: f64) -> Check {
    let Some(&(_, first)) = values.first() else {
        return Check { name: name.into(), passed: true, detail: "not applicable (zero error)".into(), values };
    };
    let max = values.iter().map(|p| p.1).fold(0.0, f64::max);
    let last = values.last().map_or(first, |p| p.1);
    let growth = max / first;
    let passed = growth <= limit && (values.len() < 2 || last < first);
    let detail = format!("max/first = {growth:.4} (limit {limit}), first {first:.4e}, last {last:.4e}");
    Check { name: name.into(), passed, detail, values }
}

fn below(name: &str, values: Vec<(usize, f64)>, limit: f64) -> Check {
    let worst = values.iter().map(|p| p.1).fold(0.0, f64::max);
    Check { name: name.into(), passed: worst <= limit, detail: format!("max = {worst:.3e} (limit {limit:.1e})"), values }
}

/// Runs the property suite: homogeneous data, block-row residuals, the
/// boundary inverse estimate, the `L2`/`H1` error ratio (with an exact
/// solution) and the discrete stability bounds.
pub fn run_verification(problem: &Problem, opts: &VerifyOptions) -> Result<VerificationReport> {
    let spec = &problem.spec;
    let levels = opts.levels.unwrap_or(DEFAULT_VERIFY_LEVELS);
    let mut homogeneous = problem.clone();
    let none = crate::expr::Constants::new();
    homogeneous.f = BoundExpr::parse("0", &none)?;
    homogeneous.y_d = BoundExpr::parse("0", &none)?;

    let (mut zero, mut state, mut adjoint, mut bubble, mut ratio, mut energy, mut half) =
        (vec![], vec![], vec![], vec![], vec![], vec![], vec![]);
    for level in levels.iter() {
        let h = solve_level(&homogeneous, level)?;
        zero.push((level, norm_inf(&h.solution.y) + norm_inf(&h.solution.z)));

        let sol = solve_level(problem, level)?;
        state.push((level, sol.residuals.state));
        adjoint.push((level, sol.residuals.adjoint));
        bubble.push((level, verify_boundary_bubble_estimate(&sol.dofmap, opts.bubble_trials, opts.seed)?.max_ratio));
        if let Some(ex) = &problem.exact {
            if let Some(r) = verify_l2_controlled_by_h1(&sol.y, &ex.y, &ex.grad_y)? {
                ratio.push((level, r));
            }
        }
        if level >= opts.stability_from {
            let m = verify_discrete_stability(&sol.y, spec.gamma)?;
            energy.push((level, m.energy));
            half.push((level, m.half));
        }
    }

    let mut checks = vec![
        below("homogeneous_data_zero_solution", zero, opts.zero_tolerance),
        below("galerkin_orthogonality", state, opts.residual_tolerance),
        below("adjoint_consistency", adjoint, opts.residual_tolerance),
        bounded("boundary_bubble_inverse_estimate", bubble, opts.bubble_spread),
    ];
    if problem.exact.is_some() {
        checks.push(no_growth("l2_controlled_by_h1", ratio, opts.ratio_growth));
    }
    checks.push(bounded("stability_energy", energy, opts.stability_spread));
    checks.push(bounded("stability_h_half", half, opts.stability_spread));
    Ok(VerificationReport { problem: spec.name.clone(), gamma: spec.gamma, seed: opts.seed, checks })
}
