//! Real spherical harmonics on `S²`, orthonormal for the normalized surface
//! measure, so that `Σ_m Y_{l,m}(x) Y_{l,m}(y) = (2l+1) P_l(⟨x,y⟩)`.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sphere::SpherePoint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Number of harmonics of degree `≤ t`.
pub fn harmonic_count(t: usize) -> usize {
    (t + 1) * (t + 1)
}

/// Flat index of `Y_{l,m}` in the `l² + l + m` ordering.
pub fn harmonic_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Precomputed recurrence coefficients for evaluating all harmonics up to `t`.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    t: usize,
    diag: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl HarmonicBasis {
    pub fn new(t: usize) -> Self {
        let mut diag = vec![1.0; t + 1];
        for m in 1..=t {
            let mf = m as f64;
            diag[m] = diag[m - 1] * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
        }
        let mut a = vec![0.0; (t + 1) * (t + 1)];
        let mut b = vec![0.0; (t + 1) * (t + 1)];
        for m in 0..=t {
            for l in (m + 2)..=t {
                let (lf, mf) = (l as f64, m as f64);
                let k = l * (t + 1) + m;
                a[k] = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - mf) * (lf + mf))).sqrt();
                b[k] = ((2.0 * lf + 1.0) * (lf + mf - 1.0) * (lf - mf - 1.0)
                    / ((lf - mf) * (lf + mf) * (2.0 * lf - 3.0)))
                    .sqrt();
            }
        }
        Self { t, diag, a, b }
    }

    pub fn degree(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        harmonic_count(self.t)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes every `Y_{l,m}(p)`, `l ≤ t`, into `out` (length `(t+1)²`).
    pub fn eval_into(&self, p: &[f64], out: &mut [f64]) {
        let t = self.t;
        let (x, y, z) = (p[0], p[1], p[2]);
        // (x + iy)^m carries the sin^m θ factor and the longitude dependence
        let (mut cm, mut sm) = (1.0, 0.0);
        for m in 0..=t {
            let scale = if m == 0 { 1.0 } else { SQRT_2 };
            let mut q_prev = self.diag[m];
            let mut q = 0.0;
            for l in m..=t {
                let val = if l == m {
                    q_prev
                } else if l == m + 1 {
                    q = (2.0 * m as f64 + 3.0).sqrt() * z * q_prev;
                    q
                } else {
                    let k = l * (t + 1) + m;
                    let next = self.a[k] * z * q - self.b[k] * q_prev;
                    q_prev = q;
                    q = next;
                    next
                };
                if m == 0 {
                    out[l * l + l] = val;
                } else {
                    out[l * l + l + m] = scale * val * cm;
                    out[l * l + l - m] = scale * val * sm;
                }
            }
            let (nc, ns) = (cm * x - sm * y, cm * y + sm * x);
            cm = nc;
            sm = ns;
        }
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(p, &mut out);
        out
    }
}

/// Single harmonic `Y_{l,m}(p)` on `S²`.
pub fn sh_eval(l: usize, m: i64, p: &SpherePoint) -> Result<f64> {
    if p.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: p.ambient_dim(),
        });
    }
    if m.unsigned_abs() as usize > l {
        return Err(Error::ParameterOutOfRange(format!("|m| = {} > l = {l}", m.abs())));
    }
    Ok(HarmonicBasis::new(l).eval(p.coords())[harmonic_index(l, m)])
}

/// `f = Σ c_{l,m} Y_{l,m}` with `l ≤ t`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPolynomial {
    t: usize,
    coeffs: Vec<f64>,
}

impl HarmonicPolynomial {
    pub fn new(t: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != harmonic_count(t) {
            return Err(Error::DimensionMismatch {
                expected: harmonic_count(t),
                got: coeffs.len(),
            });
        }
        Ok(Self { t, coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            t: 0,
            coeffs: vec![c],
        }
    }

    pub fn degree(&self) -> usize {
        self.t
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, l: usize, m: i64) -> f64 {
        self.coeffs[harmonic_index(l, m)]
    }

    /// Exact `L²(S²)` norm under the normalized measure.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn eval_with(&self, basis: &HarmonicBasis, p: &[f64], scratch: &mut [f64]) -> f64 {
        basis.eval_into(p, scratch);
        self.coeffs.iter().zip(scratch.iter()).map(|(c, y)| c * y).sum()
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let basis = HarmonicBasis::new(self.t);
        let mut scratch = vec![0.0; basis.len()];
        self.eval_with(&basis, p, &mut scratch)
    }
}

#[derive(Serialize, Deserialize)]
struct HarmonicDocument {
    t: usize,
    coeffs: Vec<(usize, i64, f64)>,
}

impl Serialize for HarmonicPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for l in 0..=self.t {
            for m in -(l as i64)..=(l as i64) {
                coeffs.push((l, m, self.coeff(l, m)));
            }
        }
        HarmonicDocument { t: self.t, coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HarmonicPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = HarmonicDocument::deserialize(d)?;
        let mut coeffs = vec![0.0; harmonic_count(doc.t)];
        for (l, m, c) in doc.coeffs {
            if l > doc.t || m.unsigned_abs() as usize > l {
                return Err(serde::de::Error::custom(format!("invalid index ({l},{m})")));
            }
            coeffs[harmonic_index(l, m)] = c;
        }
        Ok(Self { t: doc.t, coeffs })
    }
}

/// I.i.d. standard normal coefficients for every `Y_{l,m}`, `l ≤ t`.
pub fn random_harmonic(t: usize, seed: u64) -> HarmonicPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..harmonic_count(t))
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    HarmonicPolynomial { t, coeffs }
}

/// Product rule on `S²`: Gauss-Legendre in `cos θ` times the uniform rule in
/// longitude, weights summing to one.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    n_theta: usize,
}

impl SphereGrid {
    pub fn new(n_theta: usize) -> Self {
        let n_theta = n_theta.max(2);
        let n_phi = 2 * n_theta;
        let gl = GaussLegendre::new(n_theta);
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (&u, &w) in gl.nodes().iter().zip(gl.weights()) {
            let z = 2.0 * u - 1.0;
            let r = (1.0 - z * z).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
                points.push([r * phi.cos(), r * phi.sin(), z]);
                weights.push(w / n_phi as f64);
            }
        }
        Self {
            points,
            weights,
            n_theta,
        }
    }

    /// Grid exact for polynomials of degree `≤ degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1)
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
}

/// `‖f‖_{L^p(S²)}` under the normalized measure. `p = ∞` takes the maximum
/// over a grid twice as fine, then polishes the best candidates by a local
/// pattern search on the sphere.
pub fn sphere_lp_norm<F>(f: F, p: f64, resolution: usize) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    if p.is_infinite() {
        return sphere_sup_norm(&f, resolution, &[]);
    }
    let grid = SphereGrid::new(resolution);
    let total: f64 = grid
        .points()
        .iter()
        .zip(grid.weights())
        .map(|(x, w)| w * f(x).abs().powf(p))
        .sum();
    total.powf(1.0 / p)
}

/// Supremum of `|f|` over the sphere, seeded from a grid and any extra points.
pub fn sphere_sup_norm<F>(f: &F, resolution: usize, extra_seeds: &[[f64; 3]]) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let grid = SphereGrid::new(2 * resolution.max(2));
    let mut scored: Vec<([f64; 3], f64)> = grid
        .points()
        .iter()
        .chain(extra_seeds)
        .map(|x| (*x, f(x).abs()))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let step = PI / grid.n_theta() as f64;
    scored
        .iter()
        .take(8)
        .map(|(x, v)| polish_max(f, *x, *v, step))
        .chain(extra_seeds.iter().map(|x| polish_max(f, *x, f(x).abs(), step)))
        .fold(0.0, f64::max)
}

pub(crate) fn polish_max<F>(f: &F, start: [f64; 3], start_val: f64, mut step: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = start;
    let mut best = start_val;
    while step > 1e-9 {
        let (e1, e2) = tangent_frame(&x);
        let mut improved = false;
        for dir in [e1, e2, neg(e1), neg(e2)] {
            let cand = normalize([
                x[0] + step * dir[0],
                x[1] + step * dir[1],
                x[2] + step * dir[2],
            ]);
            let v = f(&cand).abs();
            if v > best {
                best = v;
                x = cand;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

fn neg(v: [f64; 3]) -> [f64; 3] {
    [-v[0], -v[1], -v[2]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Orthonormal tangent pair at `x`.
pub fn tangent_frame(x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if x[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let c = crate::sphere::cross(&helper, x);
    let e1 = normalize(c);
    let e2 = crate::sphere::cross(x, &e1);
    (e1, e2)
}
