//! The `H^{1/2}(Gamma)` Aronszajn-Slobodeckij seminorm of a discrete trace,
//!
//! ```text
//! |v|^2 = int_Gamma int_Gamma |v(x) - v(y)|^2 / |x - y|^2 ds(x) ds(y).
//! ```
//!
//! On a boundary facet the trace is a polynomial `a + b s + c s^2` in the
//! facet parameter, so the self-interaction reduces to the divided
//! difference `b + c (s + t)` and is integrated in closed form. Facets
//! sharing a vertex have a bounded but non-smooth integrand at the shared
//! corner and are integrated on a geometrically graded grid; all other pairs
//! use a tensor Gauss rule.

use crate::elements::gauss_legendre;

use super::FemField;

const GRADED_LEVELS: u32 = 4;
const NEAR_POINTS: usize = 8;
const FAR_POINTS: usize = 6;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: [f64; 2],
    d: [f64; 2],
    len: f64,
    /// Trace `p[0] + p[1] s + p[2] s^2`.
    p: [f64; 3],
    start: usize,
    end: usize,
}

impl Panel {
    fn value(&self, s: f64) -> f64 {
        self.p[0] + s * (self.p[1] + s * self.p[2])
    }

    fn point(&self, s: f64) -> [f64; 2] {
        [self.a[0] + s * self.d[0], self.a[1] + s * self.d[1]]
    }

    /// Closed-form self-interaction: `L^2 int int (b + c(s+t))^2 / L^2`.
    fn self_term(&self) -> f64 {
        let (b, c) = (self.p[1], self.p[2]);
        b * b + 2.0 * b * c + 7.0 / 6.0 * c * c
    }
}

fn panels(field: &FemField) -> Vec<Panel> {
    let dm = field.dofmap();
    let c = field.coefficients();
    (0..dm.num_facets())
        .map(|e| {
            let dofs = dm.facet_dofs(e);
            let [a, b] = dm.facet_endpoints(e);
            let (v0, v1) = (c[dofs[0]], c[dofs[1]]);
            let p = if dofs.len() == 3 {
                let vm = c[dofs[2]];
                [v0, -3.0 * v0 - v1 + 4.0 * vm, 2.0 * v0 + 2.0 * v1 - 4.0 * vm]
            } else {
                [v0, v1 - v0, 0.0]
            };
            let d = [b[0] - a[0], b[1] - a[1]];
            Panel { a, d, len: crate::mesh::dist(a, b), p, start: dofs[0], end: dofs[1] }
        })
        .collect()
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn unit_rule(n: usize) -> Rule {
    let (x, w) = gauss_legendre(n);
    Rule { x: x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w: w.iter().map(|w| 0.5 * w).collect() }
}

/// `int_{s0}^{s0+hs} int_{t0}^{t0+ht} k(s, t)` by tensor Gauss.
fn tensor(rule: &Rule, s0: f64, hs: f64, t0: f64, ht: f64, k: &impl Fn(f64, f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for (xs, ws) in rule.x.iter().zip(&rule.w) {
        for (xt, wt) in rule.x.iter().zip(&rule.w) {
            sum += ws * wt * k(s0 + hs * xs, t0 + ht * xt);
        }
    }
    hs * ht * sum
}

/// Graded integration over `[0,1]^2` for a kernel whose roughness sits at
/// the origin.
fn graded(rule: &Rule, k: &impl Fn(f64, f64) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut h = 1.0;
    for _ in 0..GRADED_LEVELS {
        let m = 0.5 * h;
        sum += tensor(rule, m, m, 0.0, m, k);
        sum += tensor(rule, 0.0, m, m, m, k);
        sum += tensor(rule, m, m, m, m, k);
        h = m;
    }
    sum + tensor(rule, 0.0, h, 0.0, h, k)
}

fn pair(e: &Panel, f: &Panel, near: &Rule, far: &Rule) -> f64 {
    let scale = e.len * f.len;
    let kernel = |s: f64, t: f64| {
        let (x, y) = (e.point(s), f.point(t));
        let r2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
        (e.value(s) - f.value(t)).powi(2) / r2
    };
    // Parametrise both panels from the shared vertex, if any.
    if e.end == f.start {
        scale * graded(near, &|s, t| kernel(1.0 - s, t))
    } else if e.start == f.end {
        scale * graded(near, &|s, t| kernel(s, 1.0 - t))
    } else if e.start == f.start {
        scale * graded(near, &kernel)
    } else if e.end == f.end {
        scale * graded(near, &|s, t| kernel(1.0 - s, 1.0 - t))
    } else {
        scale * tensor(far, 0.0, 1.0, 0.0, 1.0, &kernel)
    }
}

/// `|v|_{1/2, Gamma}` of the boundary trace of `field`.
pub fn seminorm_h_half_boundary(field: &FemField) -> f64 {
    let ps = panels(field);
    let near = unit_rule(NEAR_POINTS);
    let far = unit_rule(FAR_POINTS);
    let mut sum: f64 = ps.iter().map(Panel::self_term).sum();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            sum += 2.0 * pair(&ps[i], &ps[j], &near, &far);
        }
    }
    sum.max(0.0).sqrt()
}
