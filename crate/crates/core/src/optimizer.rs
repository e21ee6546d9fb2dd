//! Minimization of `‖L‖²_t` over the control points of a geodesic cycle on `S²`.
//!
//! Points live in ambient coordinates and are renormalized after every step.
//! Gradients are central differences projected onto the tangent planes; a
//! perturbation of one point only changes its two adjacent arcs, so each
//! difference quotient re-integrates two arcs instead of the whole cycle.

use crate::error::{Error, Result};
use crate::harmonics::HarmonicBasis;
use crate::quadrature::GaussLegendre;
use crate::sphere::{GeodesicCycle, SpherePoint, ZERO_ARC};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// Gauss-Legendre nodes per arc in the objective. The integrands are
/// trigonometric polynomials of low frequency, so the fixed rule is exact to
/// roundoff and keeps the objective a smooth function of the points.
pub const OBJECTIVE_NODES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub grad_step: f64,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub stop_objective: f64,
    pub stop_grad_norm: f64,
    /// Iteration window and threshold for stall detection.
    pub stall_window: usize,
    pub stall_improvement: f64,
    /// Stalls are only declared while the objective is above this level.
    pub stall_floor: f64,
    pub seed: u64,
    /// Standard deviation of a tangential Gaussian perturbation of the
    /// initial points; zero leaves them untouched.
    pub perturbation: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            grad_step: 1e-6,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            stop_objective: 1e-20,
            stop_grad_norm: 1e-12,
            stall_window: 500,
            stall_improvement: 1e-16,
            stall_floor: 1e-8,
            seed: 0,
            perturbation: 0.0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.armijo_shrink > 0.0 && self.armijo_shrink < 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "armijo_shrink must lie in (0,1), got {}",
                self.armijo_shrink
            )));
        }
        if !(self.stop_objective > 0.0) {
            return Err(Error::ParameterOutOfRange("stop_objective must be positive".into()));
        }
        if !(self.grad_step > 0.0 && self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::ParameterOutOfRange("grad_step and armijo_c must be positive, armijo_c < 1".into()));
        }
        if !(self.perturbation >= 0.0) {
            return Err(Error::ParameterOutOfRange("perturbation must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ObjectiveTolerance,
    GradientTolerance,
    Stalled,
    LineSearchFailure,
    MaxIterations,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeTrace {
    pub objectives: Vec<f64>,
    pub final_points: Vec<SpherePoint>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub final_objective: f64,
    pub final_grad_norm: f64,
}

impl OptimizeTrace {
    pub fn final_cycle(&self) -> Result<GeodesicCycle> {
        GeodesicCycle::new(self.final_points.clone())
    }

    /// CSV with header `iter,objective`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,objective")?;
        for (i, f) in self.objectives.iter().enumerate() {
            writeln!(w, "{i},{f:e}")?;
        }
        Ok(())
    }
}

/// Evaluator for `‖L‖²_t` as a function of control points on `S²`.
#[derive(Debug, Clone)]
pub struct WceObjective {
    t: usize,
    basis: HarmonicBasis,
    rule: GaussLegendre,
}

type Pts = [[f64; 3]];

fn normalized(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

fn to_arrays(points: &[SpherePoint]) -> Result<Vec<[f64; 3]>> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    points
        .iter()
        .map(|p| match p.coords() {
            [x, y, z] => Ok([*x, *y, *z]),
            c => Err(Error::DimensionMismatch { expected: 3, got: c.len() }),
        })
        .collect()
}

impl WceObjective {
    pub fn new(t: usize) -> Self {
        Self {
            t,
            basis: HarmonicBasis::new(t),
            rule: GaussLegendre::new(OBJECTIVE_NODES),
        }
    }

    pub fn degree(&self) -> usize {
        self.t
    }

    fn width(&self) -> usize {
        self.basis.len()
    }

    /// Writes `∫_arc Y` into `out` and returns the arc length.
    fn arc_moments(&self, a: &[f64; 3], b: &[f64; 3], out: &mut [f64], scratch: &mut [f64]) -> Result<f64> {
        out.iter_mut().for_each(|v| *v = 0.0);
        let c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
        let len = c.acos();
        let sin_len = len.sin();
        if len > PI / 2.0 && sin_len < 1e-12 {
            return Err(Error::Antipodal);
        }
        if len < ZERO_ARC {
            return Ok(0.0);
        }
        for (&s, &w) in self.rule.nodes().iter().zip(self.rule.weights()) {
            let ca = ((1.0 - s) * len).sin() / sin_len;
            let cb = (s * len).sin() / sin_len;
            let p = [ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2]];
            self.basis.eval_into(&p, scratch);
            let wl = w * len;
            for (o, y) in out.iter_mut().zip(scratch.iter()) {
                *o += wl * y;
            }
        }
        Ok(len)
    }

    fn objective_from_totals(&self, totals: &[f64], length: f64) -> Result<f64> {
        if !(length > 0.0) {
            return Err(Error::ZeroLength);
        }
        Ok(totals[1..].iter().map(|v| (v / length).powi(2)).sum())
    }

    /// Per-arc moments and lengths, arc `j` joining point `j` to `j+1`.
    fn all_arcs(&self, pts: &Pts) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let n = pts.len();
        let mut scratch = vec![0.0; self.width()];
        let mut moments = Vec::with_capacity(n);
        let mut lengths = Vec::with_capacity(n);
        for j in 0..n {
            let mut m = vec![0.0; self.width()];
            lengths.push(self.arc_moments(&pts[j], &pts[(j + 1) % n], &mut m, &mut scratch)?);
            moments.push(m);
        }
        Ok((moments, lengths))
    }

    fn value_arrays(&self, pts: &Pts) -> Result<f64> {
        let (moments, lengths) = self.all_arcs(pts)?;
        let mut totals = vec![0.0; self.width()];
        for m in &moments {
            for (t, v) in totals.iter_mut().zip(m) {
                *t += v;
            }
        }
        self.objective_from_totals(&totals, lengths.iter().sum())
    }

    /// `‖L‖²_t` of the cycle through the (renormalized) points.
    pub fn value(&self, points: &[SpherePoint]) -> Result<f64> {
        let pts: Vec<[f64; 3]> = to_arrays(points)?.into_iter().map(normalized).collect();
        self.value_arrays(&pts)
    }

    /// Objective and tangent-projected central-difference gradient.
    fn value_and_gradient(&self, pts: &Pts, h: f64) -> Result<(f64, Vec<[f64; 3]>)> {
        let n = pts.len();
        let w = self.width();
        let (moments, lengths) = self.all_arcs(pts)?;
        let mut totals = vec![0.0; w];
        for m in &moments {
            for (t, v) in totals.iter_mut().zip(m) {
                *t += v;
            }
        }
        let length: f64 = lengths.iter().sum();
        let value = self.objective_from_totals(&totals, length)?;

        let mut scratch = vec![0.0; w];
        let mut m_in = vec![0.0; w];
        let mut m_out = vec![0.0; w];
        let mut shifted = vec![0.0; w];
        let mut grad = vec![[0.0; 3]; n];
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let mut raw = [0.0; 3];
            for (c, r) in raw.iter_mut().enumerate() {
                let mut eval = |sign: f64| -> Result<f64> {
                    let mut q = pts[i];
                    q[c] += sign * h;
                    let q = normalized(q);
                    let l_in = self.arc_moments(&pts[prev], &q, &mut m_in, &mut scratch)?;
                    let l_out = self.arc_moments(&q, &pts[next], &mut m_out, &mut scratch)?;
                    for k in 0..w {
                        shifted[k] = totals[k] - moments[prev][k] - moments[i][k] + m_in[k] + m_out[k];
                    }
                    let len = length - lengths[prev] - lengths[i] + l_in + l_out;
                    self.objective_from_totals(&shifted, len)
                };
                *r = (eval(1.0)? - eval(-1.0)?) / (2.0 * h);
            }
            let x = pts[i];
            let d = raw[0] * x[0] + raw[1] * x[1] + raw[2] * x[2];
            grad[i] = [raw[0] - d * x[0], raw[1] - d * x[1], raw[2] - d * x[2]];
        }
        Ok((value, grad))
    }

    /// Tangent-projected central-difference gradient with step `h`.
    pub fn gradient(&self, points: &[SpherePoint], h: f64) -> Result<Vec<[f64; 3]>> {
        let pts: Vec<[f64; 3]> = to_arrays(points)?.into_iter().map(normalized).collect();
        Ok(self.value_and_gradient(&pts, h)?.1)
    }
}

/// `‖L‖²_t` of the geodesic cycle through `points`.
pub fn objective(points: &[SpherePoint], t: usize) -> Result<f64> {
    WceObjective::new(t).value(points)
}

/// Tangent-projected finite-difference gradient of [`objective`].
pub fn gradient(points: &[SpherePoint], t: usize, config: &OptimizerConfig) -> Result<Vec<[f64; 3]>> {
    WceObjective::new(t).gradient(points, config.grad_step)
}

fn flat_norm(g: &[[f64; 3]]) -> f64 {
    g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn perturb(pts: &mut [[f64; 3]], sigma: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in pts.iter_mut() {
        let v: [f64; 3] = [
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        ];
        let d = v[0] * p[0] + v[1] * p[1] + v[2] * p[2];
        *p = normalized([
            p[0] + sigma * (v[0] - d * p[0]),
            p[1] + sigma * (v[1] - d * p[1]),
            p[2] + sigma * (v[2] - d * p[2]),
        ]);
    }
}

/// Projected gradient descent with Armijo backtracking from `init`.
///
/// The first trial step of each line search is the Barzilai-Borwein step of
/// the previous iteration; accepted steps always satisfy the Armijo
/// condition, so the objective sequence is non-increasing.
pub fn minimize(init: &[SpherePoint], t: usize, config: &OptimizerConfig) -> Result<OptimizeTrace> {
    config.validate()?;
    let obj = WceObjective::new(t);
    let mut x: Vec<[f64; 3]> = to_arrays(init)?.into_iter().map(normalized).collect();
    if config.perturbation > 0.0 {
        perturb(&mut x, config.perturbation, config.seed);
    }
    let (mut f, mut g) = obj.value_and_gradient(&x, config.grad_step)?;
    let mut objectives = vec![f];
    let mut step = 1.0;
    let mut iterations = 0;
    let reason = loop {
        let gn = flat_norm(&g);
        if f <= config.stop_objective {
            break StopReason::ObjectiveTolerance;
        }
        if gn <= config.stop_grad_norm {
            break StopReason::GradientTolerance;
        }
        if iterations >= config.max_iters {
            break StopReason::MaxIterations;
        }
        if iterations >= config.stall_window
            && f > config.stall_floor
            && objectives[iterations - config.stall_window] - f < config.stall_improvement
        {
            break StopReason::Stalled;
        }
        let g2 = gn * gn;
        let mut alpha = step;
        let accepted = loop {
            let trial: Vec<[f64; 3]> = x
                .iter()
                .zip(&g)
                .map(|(p, d)| normalized([p[0] - alpha * d[0], p[1] - alpha * d[1], p[2] - alpha * d[2]]))
                .collect();
            // an antipodal trial is rejected like any other failed step
            if let Ok(ft) = obj.value_arrays(&trial) {
                if ft <= f - config.armijo_c * alpha * g2 {
                    break Some((trial, ft));
                }
            }
            alpha *= config.armijo_shrink;
            if alpha * gn < 1e-300 || alpha < 1e-30 {
                break None;
            }
        };
        let Some((x_new, f_new)) = accepted else {
            break StopReason::LineSearchFailure;
        };
        let (f_new2, g_new) = obj.value_and_gradient(&x_new, config.grad_step)?;
        debug_assert!((f_new2 - f_new).abs() <= 1e-12 * f_new.max(1e-300) || f_new2 == f_new);
        let mut ss = 0.0;
        let mut sy = 0.0;
        for j in 0..x.len() {
            for c in 0..3 {
                let s = x_new[j][c] - x[j][c];
                ss += s * s;
                sy += s * (g_new[j][c] - g[j][c]);
            }
        }
        step = if sy > 0.0 { (ss / sy).clamp(1e-12, 1e6) } else { (alpha * 2.0).min(1e6) };
        x = x_new;
        f = f_new;
        g = g_new;
        iterations += 1;
        objectives.push(f);
    };
    let final_points = x
        .iter()
        .map(|p| SpherePoint::new(p.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimizeTrace {
        final_objective: f,
        final_grad_norm: flat_norm(&g),
        converged: matches!(reason, StopReason::ObjectiveTolerance | StopReason::GradientTolerance),
        stop_reason: reason,
        iterations,
        objectives,
        final_points,
    })
}
