use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    /// Polynomials of total degree up to this are integrated exactly.
    pub degree: u32,
}

pub type TriangleRule = QuadratureRule<2>;
pub type SegmentRule = QuadratureRule<1>;

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; D], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn([f64; D]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

const MAX_TRIANGLE_DEGREE: u32 = 6;
const MAX_SEGMENT_POINTS: usize = 20;

// Symmetric rules (Dunavant), weights normalised to area 1; scaled by 1/2 below.
const D4_A: f64 = 0.445_948_490_915_964_886_318_329_253_883;
const D4_WA: f64 = 0.223_381_589_678_011_465_944_457_478_042;
const D4_B: f64 = 0.091_576_213_509_770_743_459_571_463_402;
const D4_WB: f64 = 0.109_951_743_655_321_867_388_875_855_291;

const D6_A: f64 = 0.063_089_014_491_502_228_340_331_602_870;
const D6_WA: f64 = 0.050_844_906_370_206_816_920_936_809_106;
const D6_B: f64 = 0.249_286_745_170_910_421_291_638_553_107;
const D6_WB: f64 = 0.116_786_275_726_379_366_030_690_538_344;
const D6_C1: f64 = 0.053_145_049_844_816_947_353_249_671_631;
const D6_C2: f64 = 0.310_352_451_033_784_405_416_607_733_956;
const D6_WC: f64 = 0.082_851_075_618_373_575_193_553_456_421;

fn orbit3(a: f64, w: f64, pts: &mut Vec<[f64; 2]>, ws: &mut Vec<f64>) {
    let b = 1.0 - 2.0 * a;
    for p in [[a, a], [b, a], [a, b]] {
        pts.push(p);
        ws.push(0.5 * w);
    }
}

fn orbit6(a: f64, b: f64, w: f64, pts: &mut Vec<[f64; 2]>, ws: &mut Vec<f64>) {
    let c = 1.0 - a - b;
    for p in [[a, b], [b, a], [a, c], [c, a], [b, c], [c, b]] {
        pts.push(p);
        ws.push(0.5 * w);
    }
}

/// Symmetric rule on the reference triangle exact for degree `exactness`.
pub fn triangle_quadrature(exactness: u32) -> Result<TriangleRule> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let degree = match exactness {
        0 | 1 => {
            points.push([1.0 / 3.0, 1.0 / 3.0]);
            weights.push(0.5);
            1
        }
        2 => {
            orbit3(1.0 / 6.0, 1.0 / 3.0, &mut points, &mut weights);
            2
        }
        3 | 4 => {
            orbit3(D4_A, D4_WA, &mut points, &mut weights);
            orbit3(D4_B, D4_WB, &mut points, &mut weights);
            4
        }
        5 => {
            let s15 = 15f64.sqrt();
            points.push([1.0 / 3.0, 1.0 / 3.0]);
            weights.push(0.5 * 9.0 / 40.0);
            orbit3((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0, &mut points, &mut weights);
            orbit3((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0, &mut points, &mut weights);
            5
        }
        6 => {
            orbit3(D6_A, D6_WA, &mut points, &mut weights);
            orbit3(D6_B, D6_WB, &mut points, &mut weights);
            orbit6(D6_C1, D6_C2, D6_WC, &mut points, &mut weights);
            6
        }
        _ => {
            return Err(Error::Config(format!(
                "triangle quadrature of exactness {exactness} not available (max {MAX_TRIANGLE_DEGREE})"
            )))
        }
    };
    Ok(QuadratureRule { points, weights, degree })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            // p0 = P_n(z), p1 = P_{n-1}(z)
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss rule on the unit segment `[0, 1]` exact for degree `exactness`.
pub fn segment_quadrature(exactness: u32) -> Result<SegmentRule> {
    let n = (exactness as usize + 2) / 2;
    if n > MAX_SEGMENT_POINTS {
        return Err(Error::Config(format!(
            "segment quadrature of exactness {exactness} not available (max {})",
            2 * MAX_SEGMENT_POINTS - 1
        )));
    }
    let n = n.max(1);
    let (x, w) = gauss_legendre(n);
    Ok(QuadratureRule {
        points: x.iter().map(|&t| [0.5 * (t + 1.0)]).collect(),
        weights: w.iter().map(|&v| 0.5 * v).collect(),
        degree: (2 * n - 1) as u32,
    })
}
