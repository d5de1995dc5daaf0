use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest local node count over supported degrees.
pub const MAX_NODES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Degree {
    P1,
    P2,
}

impl Degree {
    pub fn new(k: u32) -> Result<Self> {
        match k {
            1 => Ok(Degree::P1),
            2 => Ok(Degree::P2),
            _ => Err(Error::Config(format!("unsupported polynomial degree {k} (expected 1 or 2)"))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Degree::P1 => 1,
            Degree::P2 => 2,
        }
    }

    /// Local nodes on a triangle.
    pub fn num_nodes(self) -> usize {
        match self {
            Degree::P1 => 3,
            Degree::P2 => 6,
        }
    }

    /// Local nodes on an edge.
    pub fn num_edge_nodes(self) -> usize {
        self.order() as usize + 1
    }
}

impl TryFrom<u32> for Degree {
    type Error = Error;
    fn try_from(k: u32) -> Result<Self> {
        Degree::new(k)
    }
}

impl From<Degree> for u32 {
    fn from(d: Degree) -> u32 {
        d.order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisValues {
    pub len: usize,
    pub values: [f64; MAX_NODES],
    /// Gradients with respect to the reference coordinates.
    pub grads: [[f64; 2]; MAX_NODES],
}

impl BasisValues {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn grads(&self) -> &[[f64; 2]] {
        &self.grads[..self.len]
    }
}

/// Nodal Lagrange basis of degree 1 or 2 on the reference triangle.
///
/// Nodes are numbered vertices first (`(0,0)`, `(1,0)`, `(0,1)`), then for P2
/// the midpoints of edges `(v0,v1)`, `(v1,v2)`, `(v2,v0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceBasis {
    degree: Degree,
}

impl ReferenceBasis {
    pub fn new(degree: Degree) -> Self {
        ReferenceBasis { degree }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn num_nodes(&self) -> usize {
        self.degree.num_nodes()
    }

    pub fn nodes(&self) -> &'static [[f64; 2]] {
        const NODES: [[f64; 2]; 6] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]];
        &NODES[..self.num_nodes()]
    }

    pub fn eval(&self, p: [f64; 2]) -> BasisValues {
        let (x, y) = (p[0], p[1]);
        let l = [1.0 - x - y, x, y];
        let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        let mut out = BasisValues { len: self.num_nodes(), values: [0.0; MAX_NODES], grads: [[0.0; 2]; MAX_NODES] };
        match self.degree {
            Degree::P1 => {
                out.values[..3].copy_from_slice(&l);
                out.grads[..3].copy_from_slice(&dl);
            }
            Degree::P2 => {
                for i in 0..3 {
                    out.values[i] = l[i] * (2.0 * l[i] - 1.0);
                    let s = 4.0 * l[i] - 1.0;
                    out.grads[i] = [s * dl[i][0], s * dl[i][1]];
                }
                for (k, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
                    out.values[3 + k] = 4.0 * l[i] * l[j];
                    out.grads[3 + k] = [
                        4.0 * (dl[i][0] * l[j] + l[i] * dl[j][0]),
                        4.0 * (dl[i][1] * l[j] + l[i] * dl[j][1]),
                    ];
                }
            }
        }
        out
    }

    /// Values of the edge basis on the reference segment at `t`, ordered
    /// start vertex, end vertex, then (P2) the midpoint.
    pub fn eval_edge(&self, t: f64) -> ([f64; 3], usize) {
        match self.degree {
            Degree::P1 => ([1.0 - t, t, 0.0], 2),
            Degree::P2 => ([(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)], 3),
        }
    }
}

/// Basis values and reference gradients of degree `k` at a reference point.
///
/// The point is expected inside the reference triangle; polynomials are
/// evaluated as-is outside it.
pub fn eval_basis(k: u32, point: [f64; 2]) -> Result<BasisValues> {
    Ok(ReferenceBasis::new(Degree::new(k)?).eval(point))
}
