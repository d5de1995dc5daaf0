//! Problem definitions: the JSON configuration format, the built-in
//! registry and the drivers that turn a problem into solves, convergence
//! reports and verification runs.

mod cache;
mod record;
mod study;
mod suite;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::elements::Degree;
use crate::expr::{BoundExpr, BoundGradient, Constants};
use crate::linalg::SolverConfig;
use crate::mesh::{InitialLayout, Rect, Refinement};
use crate::{Error, Result};

pub use cache::{cache_dir, CACHE_ENV};
pub use record::RunRecord;
pub use study::{
    build_mesh, convergence_study, reference_solution, solve_level, LevelSolution, LevelSummary, StudyOutcome,
};
pub use suite::{run_verification, Check, VerificationReport, VerifyOptions, DEFAULT_VERIFY_LEVELS};

/// Largest refinement level accepted from configuration.
pub const MAX_LEVEL: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRange {
    pub min: usize,
    pub max: usize,
}

impl LevelRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.min..=self.max
    }
}

/// Analytic solution used for errors against an exact solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSolution {
    pub y: String,
    pub grad_y: [String; 2],
    pub z: String,
    pub grad_z: [String; 2],
    /// Optimal control on the boundary; defaults to `y`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Rect,
    pub gamma: f64,
    #[serde(default = "default_degree")]
    pub degree: Degree,
    /// Extra named constants for the expressions (`gamma` is always bound).
    #[serde(default)]
    pub constants: Constants,
    pub f: String,
    pub y_d: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactSolution>,
    pub levels: LevelRange,
    /// Level of the reference solution used when no exact solution is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_level: Option<usize>,
    #[serde(default)]
    pub refinement: Refinement,
    #[serde(default)]
    pub layout: InitialLayout,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_degree() -> Degree {
    Degree::P1
}

/// Names accepted by [`builtin`].
pub const BUILTINS: [&str; 2] = ["example1", "example2"];

/// Manufactured solution on the unit square with quadratic state and a
/// quartic adjoint.
pub fn example1(gamma: f64) -> ProblemSpec {
    ProblemSpec {
        name: "example1".into(),
        domain: Rect::unit_square(),
        gamma,
        degree: Degree::P1,
        constants: Constants::new(),
        f: "-4/gamma".into(),
        y_d: "(2 + 1/gamma)*(x1^2 - x1 + x2^2 - x2)".into(),
        exact: Some(ExactSolution {
            y: "(x1^2 - x1 + x2^2 - x2)/gamma".into(),
            grad_y: ["(2*x1 - 1)/gamma".into(), "(2*x2 - 1)/gamma".into()],
            z: "(x1^2 - x1)*(x2^2 - x2)".into(),
            grad_z: ["(2*x1 - 1)*(x2^2 - x2)".into(), "(x1^2 - x1)*(2*x2 - 1)".into()],
            u: Some("(x1^2 - x1 + x2^2 - x2)/gamma".into()),
        }),
        levels: LevelRange { min: 0, max: 5 },
        reference_level: None,
        refinement: Refinement::default(),
        layout: InitialLayout::default(),
        solver: SolverConfig::default(),
    }
}

/// Source-free problem on `(0, 1/4)^2` with a nearly constant target whose
/// optimal control is singular at the corners; no closed-form solution.
pub fn example2(gamma: f64) -> ProblemSpec {
    ProblemSpec {
        name: "example2".into(),
        domain: Rect { x0: 0.0, y0: 0.0, x1: 0.25, y1: 0.25 },
        gamma,
        degree: Degree::P1,
        constants: [("s".to_string(), 1e-5)].into_iter().collect(),
        f: "0".into(),
        y_d: "(x1^2 + x2^2)^s".into(),
        exact: None,
        levels: LevelRange { min: 2, max: 6 },
        reference_level: Some(7),
        refinement: Refinement::default(),
        layout: InitialLayout::default(),
        solver: SolverConfig::default(),
    }
}

/// A registry entry with `gamma = 1`.
pub fn builtin(name: &str) -> Option<ProblemSpec> {
    match name {
        "example1" => Some(example1(1.0)),
        "example2" => Some(example2(1.0)),
        _ => None,
    }
}

/// Compiled expressions of a validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub f: BoundExpr,
    pub y_d: BoundExpr,
    pub exact: Option<CompiledExact>,
}

#[derive(Debug, Clone)]
pub struct CompiledExact {
    pub y: BoundExpr,
    pub grad_y: BoundGradient,
    pub z: BoundExpr,
    pub grad_z: BoundGradient,
    pub u: BoundExpr,
}

impl ProblemSpec {
    /// Parses a configuration document. A `"base"` key naming a built-in
    /// problem supplies defaults for every key the document omits.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text)?;
        let obj = doc.as_object_mut().ok_or_else(|| Error::Config("configuration must be a JSON object".into()))?;
        let spec_value = match obj.remove("base") {
            None => Value::Object(obj.clone()),
            Some(Value::String(base)) => {
                let spec = builtin(&base).ok_or_else(|| Error::Config(format!("unknown base problem '{base}'")))?;
                let mut merged = serde_json::to_value(spec)?;
                let m = merged.as_object_mut().expect("spec serialises to an object");
                for (k, v) in obj.iter() {
                    m.insert(k.clone(), v.clone());
                }
                merged
            }
            Some(_) => return Err(Error::Config("'base' must be a string".into())),
        };
        let spec: ProblemSpec =
            serde_json::from_value(spec_value).map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Loads a configuration: a built-in name or a path to a JSON file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some(spec) = builtin(name_or_path) {
            return Ok(spec);
        }
        let path = std::path::Path::new(name_or_path);
        if !path.exists() {
            return Err(Error::Config(format!(
                "'{name_or_path}' is neither a built-in problem ({}) nor an existing file",
                BUILTINS.join(", ")
            )));
        }
        ProblemSpec::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec is serialisable")
    }

    /// Constants bound in every expression: the declared ones plus `gamma`.
    pub fn bound_constants(&self) -> Constants {
        let mut c = self.constants.clone();
        c.insert("gamma".into(), self.gamma);
        c
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be positive and finite, got {}", self.gamma)));
        }
        self.domain.validate()?;
        if self.levels.min > self.levels.max {
            return Err(Error::Config(format!("empty level range {}..={}", self.levels.min, self.levels.max)));
        }
        if self.levels.max > MAX_LEVEL {
            return Err(Error::Config(format!("level {} exceeds the maximum {MAX_LEVEL}", self.levels.max)));
        }
        if let Some(r) = self.reference_level {
            if r <= self.levels.max || r > MAX_LEVEL {
                return Err(Error::Config(format!(
                    "reference level {r} must exceed the finest study level {} and be at most {MAX_LEVEL}",
                    self.levels.max
                )));
            }
        }
        self.solver.validate()?;
        self.compile().map(|_| ())
    }

    pub fn compile(&self) -> Result<Problem> {
        let c = self.bound_constants();
        let bind = |what: &str, text: &str| {
            BoundExpr::parse(text, &c).map_err(|e| Error::Config(format!("expression '{what}' = \"{text}\": {e}")))
        };
        let grad = |what: &str, g: &[String; 2]| -> Result<BoundGradient> {
            Ok(BoundGradient(bind(&format!("{what}[0]"), &g[0])?, bind(&format!("{what}[1]"), &g[1])?))
        };
        let exact = match &self.exact {
            None => None,
            Some(e) => Some(CompiledExact {
                y: bind("exact.y", &e.y)?,
                grad_y: grad("exact.grad_y", &e.grad_y)?,
                z: bind("exact.z", &e.z)?,
                grad_z: grad("exact.grad_z", &e.grad_z)?,
                u: bind("exact.u", e.u.as_deref().unwrap_or(&e.y))?,
            }),
        };
        Ok(Problem { spec: self.clone(), f: bind("f", &self.f)?, y_d: bind("y_d", &self.y_d)?, exact })
    }

    /// SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("spec is serialisable")))
    }
}
