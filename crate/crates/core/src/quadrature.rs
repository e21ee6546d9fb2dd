//! Gauss-Legendre rules and the dyadic refinement loop shared by all path
//! integrals.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Environment variable overriding the default absolute tolerance.
pub const TOLERANCE_ENV: &str = "GEOCYCLE_QUAD_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_segment: usize,
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_segment: 32,
            tolerance: 1e-12,
            max_refinements: 6,
        }
    }
}

impl QuadratureSpec {
    pub fn new(nodes_per_segment: usize, tolerance: f64, max_refinements: usize) -> Result<Self> {
        if nodes_per_segment < 2 {
            return Err(Error::ParameterOutOfRange(format!(
                "nodes_per_segment must be >= 2, got {nodes_per_segment}"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if max_refinements == 0 {
            return Err(Error::ParameterOutOfRange(
                "max_refinements must be positive".into(),
            ));
        }
        Ok(Self {
            nodes_per_segment,
            tolerance,
            max_refinements,
        })
    }

    /// Default spec, with the tolerance taken from `GEOCYCLE_QUAD_TOL` when set.
    pub fn from_env() -> Result<Self> {
        let mut spec = Self::default();
        if let Ok(raw) = std::env::var(TOLERANCE_ENV) {
            let tol: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{TOLERANCE_ENV}={raw:?} is not a number")))?;
            spec = Self::new(spec.nodes_per_segment, tol, spec.max_refinements)?;
        }
        Ok(spec)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Gauss-Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        // roots are symmetric, solve for the upper half by Newton on P_n
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1,1] -> [0,1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Composite rule on `[0,1]` split into `pieces` equal subintervals.
    pub fn composite(&self, pieces: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 1.0 / pieces as f64;
        (0..pieces).flat_map(move |k| {
            let a = k as f64 * h;
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(move |(&x, &w)| (a + h * x, h * w))
        })
    }

    /// Apply the composite rule to a vector-valued integrand, accumulating into `out`.
    pub fn integrate_into<F>(&self, pieces: usize, f: &mut F, scratch: &mut [f64], out: &mut [f64])
    where
        F: FnMut(f64, &mut [f64]),
    {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (s, w) in self.composite(pieces) {
            f(s, scratch);
            for (o, v) in out.iter_mut().zip(scratch.iter()) {
                *o += w * v;
            }
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate a vector-valued function over `[0, 1]`, doubling the number of
/// composite pieces until two successive estimates agree to `spec.tolerance`
/// in every component.
pub fn integrate_unit_interval<F>(mut f: F, width: usize, spec: &QuadratureSpec) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    let rule = GaussLegendre::new(spec.nodes_per_segment);
    integrate_unit_interval_with(&rule, &mut f, width, spec)
}

pub(crate) fn integrate_unit_interval_with<F>(
    rule: &GaussLegendre,
    f: &mut F,
    width: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut scratch = vec![0.0; width];
    let mut previous = vec![0.0; width];
    let mut current = vec![0.0; width];
    rule.integrate_into(1, f, &mut scratch, &mut previous);
    let mut worst = (0.0, 0.0);
    for level in 1..=spec.max_refinements {
        rule.integrate_into(1 << level, f, &mut scratch, &mut current);
        let mut max_diff = 0.0f64;
        for (&p, &c) in previous.iter().zip(&current) {
            let d = (c - p).abs();
            if !(d <= max_diff) {
                max_diff = d;
                worst = (p, c);
            }
        }
        if max_diff < spec.tolerance {
            return Ok(current);
        }
        std::mem::swap(&mut previous, &mut current);
    }
    Err(Error::QuadratureNonConvergence {
        previous: worst.0,
        current: worst.1,
    })
}
