use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Error quantities tracked by convergence studies, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// `||grad(y - y_h)||`
    GradY,
    /// `||grad(z - z_h)||`
    GradZ,
    /// `||u - u_h||_{L2(Gamma)}`, i.e. the boundary error of the state.
    U,
    /// `||y - y_h||`
    Y,
    /// `||z - z_h||`
    Z,
}

impl Norm {
    pub const ALL: [Norm; 5] = [Norm::GradY, Norm::GradZ, Norm::U, Norm::Y, Norm::Z];

    pub fn key(self) -> &'static str {
        match self {
            Norm::GradY => "grad_y",
            Norm::GradZ => "grad_z",
            Norm::U => "u",
            Norm::Y => "y",
            Norm::Z => "z",
        }
    }
}

/// Estimated orders `log2(e_{l-1} / e_l)`; undefined for the first entry and
/// wherever an error vanishes.
pub fn compute_eoc(errors: &[f64]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(errors.len());
    for i in 0..errors.len() {
        out.push(if i == 0 || !(errors[i] > 0.0) || !(errors[i - 1] > 0.0) {
            None
        } else {
            Some((errors[i - 1] / errors[i]).log2())
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub h: f64,
    /// One entry per report norm, same order as [`ConvergenceReport::norms`].
    pub errors: Vec<f64>,
    pub eoc: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub problem: String,
    pub gamma: f64,
    pub degree: u32,
    pub norms: Vec<Norm>,
    pub rows: Vec<LevelRow>,
}

impl ConvergenceReport {
    /// Builds rows from per-level errors (`errors[level_index][norm_index]`).
    pub fn new(problem: &str, gamma: f64, degree: u32, norms: Vec<Norm>, levels: &[(usize, f64)], errors: &[Vec<f64>]) -> Self {
        let eocs: Vec<Vec<Option<f64>>> =
            (0..norms.len()).map(|k| compute_eoc(&errors.iter().map(|e| e[k]).collect::<Vec<_>>())).collect();
        let rows = levels
            .iter()
            .enumerate()
            .map(|(i, &(level, h))| LevelRow {
                level,
                h,
                errors: errors[i].clone(),
                eoc: (0..norms.len()).map(|k| eocs[k][i]).collect(),
            })
            .collect();
        ConvergenceReport { problem: problem.to_string(), gamma, degree, norms, rows }
    }

    fn index(&self, norm: Norm) -> Option<usize> {
        self.norms.iter().position(|&n| n == norm)
    }

    pub fn column(&self, norm: Norm) -> Option<Vec<f64>> {
        let k = self.index(norm)?;
        Some(self.rows.iter().map(|r| r.errors[k]).collect())
    }

    pub fn eoc_column(&self, norm: Norm) -> Option<Vec<Option<f64>>> {
        let k = self.index(norm)?;
        Some(self.rows.iter().map(|r| r.eoc[k]).collect())
    }

    /// CSV with `level,h` followed by an `(error, order)` pair per norm.
    /// Numbers carry six significant digits; undefined orders are empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,h");
        for n in &self.norms {
            let _ = write!(s, ",{0},order_{0}", n.key());
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{}", r.level, format_sig(r.h));
            for (e, o) in r.errors.iter().zip(&r.eoc) {
                let _ = write!(s, ",{},{}", format_sig(*e), o.map(format_sig).unwrap_or_default());
            }
            s.push('\n');
        }
        s
    }
}

/// Six significant digits; fixed notation for moderate magnitudes,
/// scientific otherwise.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // Rounding can carry into a new digit (9.999995 -> "10.00000").
        let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
        if digits.trim_start_matches('0').len() > 6 && decimals > 0 {
            let d = decimals - 1;
            return format!("{v:.d$}");
        }
        s
    } else {
        format!("{v:.5e}")
    }
}
