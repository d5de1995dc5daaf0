//! Point-evaluable fields on the physical domain.
//!
//! Closures implement the traits directly; parsed expressions implement them
//! through [`crate::expr::BoundExpr`] and [`crate::expr::BoundGradient`].

use crate::Result;

pub trait ScalarFn: Sync {
    fn eval(&self, x: [f64; 2]) -> Result<f64>;
}

pub trait VectorFn: Sync {
    fn eval(&self, x: [f64; 2]) -> Result<[f64; 2]>;
}

impl<F: Fn([f64; 2]) -> f64 + Sync> ScalarFn for F {
    fn eval(&self, x: [f64; 2]) -> Result<f64> {
        Ok(self(x))
    }
}

impl<F: Fn([f64; 2]) -> [f64; 2] + Sync> VectorFn for F {
    fn eval(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        Ok(self(x))
    }
}

/// The zero function.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ScalarFn for Zero {
    fn eval(&self, _: [f64; 2]) -> Result<f64> {
        Ok(0.0)
    }
}

impl VectorFn for Zero {
    fn eval(&self, _: [f64; 2]) -> Result<[f64; 2]> {
        Ok([0.0, 0.0])
    }
}
