//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use dirichlet_control::analysis::FemField;
use dirichlet_control::elements::Degree;

/// Exact barycentric integration on a triangle:
/// `int_K l0^a l1^b l2^c = 2|K| a! b! c! / (a + b + c + 2)!`.
pub mod bary {
    use super::Degree;

    pub type Poly = Vec<([u32; 3], f64)>;

    pub fn fact(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    pub fn mul(p: &Poly, q: &Poly) -> Poly {
        let mut out = Vec::new();
        for (a, x) in p {
            for (b, y) in q {
                out.push(([a[0] + b[0], a[1] + b[1], a[2] + b[2]], x * y));
            }
        }
        out
    }

    pub fn integrate(p: &Poly, area: f64) -> f64 {
        p.iter()
            .map(|(e, c)| c * 2.0 * area * fact(e[0]) * fact(e[1]) * fact(e[2]) / fact(e[0] + e[1] + e[2] + 2))
            .sum()
    }

    pub fn lam(i: usize) -> [u32; 3] {
        let mut e = [0; 3];
        e[i] = 1;
        e
    }

    pub fn lam2(i: usize, j: usize) -> [u32; 3] {
        let mut e = lam(i);
        e[j] += 1;
        e
    }

    pub const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

    /// Basis function `i` as a polynomial in barycentrics.
    pub fn basis(k: Degree, i: usize) -> Poly {
        match (k, i) {
            (Degree::P1, _) => vec![(lam(i), 1.0)],
            (Degree::P2, 0..=2) => vec![(lam2(i, i), 2.0), (lam(i), -1.0)],
            (Degree::P2, _) => {
                let (a, b) = EDGES[i - 3];
                vec![(lam2(a, b), 4.0)]
            }
        }
    }

    /// Gradient of basis `i` as `sum_m q_m grad(l_m)`.
    pub fn basis_grad(k: Degree, i: usize) -> [Poly; 3] {
        let mut g: [Poly; 3] = Default::default();
        match (k, i) {
            (Degree::P1, _) => g[i] = vec![([0; 3], 1.0)],
            (Degree::P2, 0..=2) => g[i] = vec![(lam(i), 4.0), ([0; 3], -1.0)],
            (Degree::P2, _) => {
                let (a, b) = EDGES[i - 3];
                g[a] = vec![(lam(b), 4.0)];
                g[b] = vec![(lam(a), 4.0)];
            }
        }
        g
    }

    pub fn area(p: [[f64; 2]; 3]) -> f64 {
        0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
    }

    pub fn grad_lambda(p: [[f64; 2]; 3]) -> [[f64; 2]; 3] {
        let a2 = 2.0 * area(p);
        let mut g = [[0.0; 2]; 3];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            g[i] = [(p[j][1] - p[k][1]) / a2, (p[k][0] - p[j][0]) / a2];
        }
        g
    }

    pub fn oracle_mass(p: [[f64; 2]; 3], k: Degree) -> Vec<Vec<f64>> {
        let n = k.num_nodes();
        (0..n).map(|i| (0..n).map(|j| integrate(&mul(&basis(k, i), &basis(k, j)), area(p))).collect()).collect()
    }

    pub fn oracle_stiffness(p: [[f64; 2]; 3], k: Degree) -> Vec<Vec<f64>> {
        let n = k.num_nodes();
        let gl = grad_lambda(p);
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            let gi = basis_grad(k, i);
            for j in 0..n {
                let gj = basis_grad(k, j);
                for m in 0..3 {
                    for q in 0..3 {
                        let dot = gl[m][0] * gl[q][0] + gl[m][1] * gl[q][1];
                        a[i][j] += dot * integrate(&mul(&gi[m], &gj[q]), area(p));
                    }
                }
            }
        }
        a
    }

    /// `int_0^L` of products of the edge basis (start, end, midpoint) using
    /// `int mu0^a mu1^b = L a! b! / (a + b + 1)!`.
    pub fn oracle_boundary_mass(len: f64, k: Degree) -> Vec<Vec<f64>> {
        let edge: Vec<Vec<([u32; 2], f64)>> = match k {
            Degree::P1 => vec![vec![([1, 0], 1.0)], vec![([0, 1], 1.0)]],
            Degree::P2 => vec![
                vec![([2, 0], 2.0), ([1, 0], -1.0)],
                vec![([0, 2], 2.0), ([0, 1], -1.0)],
                vec![([1, 1], 4.0)],
            ],
        };
        let n = edge.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                for (e, x) in &edge[i] {
                    for (f, y) in &edge[j] {
                        let (p, q) = (e[0] + f[0], e[1] + f[1]);
                        a[i][j] += x * y * len * fact(p) * fact(q) / fact(p + q + 1);
                    }
                }
            }
        }
        a
    }
}

/// `|v|_{1/2}` of the boundary trace of `field` by a dense midpoint double sum
/// over `m` sub-segments per boundary facet. Self-interactions of a
/// sub-segment are integrated exactly for the quadratic interpolant of the
/// trace through its end and midpoint values.
pub fn half_seminorm_dense(field: &FemField, m: usize) -> f64 {
    let dm = field.dofmap();
    let delta = 1.0 / m as f64;
    let mut pts = Vec::new();
    let mut sum = 0.0;
    for e in 0..dm.num_facets() {
        let [a, b] = dm.facet_endpoints(e);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        for k in 0..m {
            let s0 = k as f64 * delta;
            let v0 = field.eval_on_facet(e, s0);
            let vm = field.eval_on_facet(e, s0 + 0.5 * delta);
            let v1 = field.eval_on_facet(e, s0 + delta);
            let (b1, c1) = (-3.0 * v0 + 4.0 * vm - v1, 2.0 * v0 - 4.0 * vm + 2.0 * v1);
            sum += b1 * b1 + 2.0 * b1 * c1 + 7.0 / 6.0 * c1 * c1;
            let s = s0 + 0.5 * delta;
            pts.push(([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])], vm, len * delta));
        }
    }
    for (i, &(x, vx, wx)) in pts.iter().enumerate() {
        for (j, &(y, vy, wy)) in pts.iter().enumerate() {
            if i != j {
                let r2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
                sum += wx * wy * (vx - vy).powi(2) / r2;
            }
        }
    }
    sum.sqrt()
}

pub fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn scale(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().fold(1.0, |m, v| m.max(v.abs()))
}
