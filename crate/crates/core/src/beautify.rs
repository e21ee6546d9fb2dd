//! Parameter equations of the beautified families and their roots.
//!
//! `Γ^(t,a)` is a `t`-design cycle exactly when `h_t(sin a) = 0`, the cube
//! family `γ^(α,β)` when `u(α,β) = v(α,β) = 0`, and the smooth curves
//! `γ^(t,a)` when `(1/ℓ)∫(x² − z²) = 0`. Every root is re-checked with
//! [`verify_design`].

use crate::curve::Curve;
use crate::design::verify_design;
use crate::error::{Error, Result};
use crate::families::{geo_cube, geo_octa, geo_tetra, smooth_s2};
use crate::quadrature::QuadratureSpec;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Iteration cap shared by all solvers.
pub const MAX_ITERATIONS: usize = 200;

/// Box `[1/4, 2/5] × [1/2, 9/10]` containing the cube-family root.
pub const CUBE_BOX: [[f64; 2]; 2] = [[0.25, 0.4], [0.5, 0.9]];

/// Newton start for the cube system.
pub const CUBE_START: [f64; 2] = [0.33, 0.70];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Geo2,
    Geo3,
    Cube,
    Smooth2,
    Smooth3,
}

impl Target {
    pub const ALL: [Target; 5] = [Target::Geo2, Target::Geo3, Target::Cube, Target::Smooth2, Target::Smooth3];

    pub fn name(self) -> &'static str {
        match self {
            Target::Geo2 => "geo2",
            Target::Geo3 => "geo3",
            Target::Cube => "cube",
            Target::Smooth2 => "smooth2",
            Target::Smooth3 => "smooth3",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown target '{s}' (geo2, geo3, cube, smooth2, smooth3)")))
    }
}

/// A certified root.
///
/// `root` solves the defining equation and lies strictly inside `bracket`;
/// `value` is the family parameter derived from it (`a_t = arcsin α_t` for
/// the geodesic families, otherwise equal to `root`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootResult {
    pub target: String,
    pub value: Vec<f64>,
    pub root: Vec<f64>,
    pub residual: f64,
    pub bracket: Vec<[f64; 2]>,
    pub iterations: usize,
    pub design_degree: u32,
    pub design_residual: f64,
}

/// `h₂(α) = (2α²−1) arccos(α²−1) − 3α√(2−α²)(α²−1)`.
pub fn h2(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    (2.0 * a2 - 1.0) * (a2 - 1.0).acos() - 3.0 * alpha * (2.0 - a2).sqrt() * (a2 - 1.0)
}

/// `h₃(α) = (3α²−2) arccos(3α²/2 − 1) − 3α√(12−9α²)(α²−1)`.
pub fn h3(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    (3.0 * a2 - 2.0) * (1.5 * a2 - 1.0).acos() - 3.0 * alpha * (12.0 - 9.0 * a2).sqrt() * (a2 - 1.0)
}

/// First cube identity, left side minus right side:
/// `(α−β)(1−β²)^{3/2}√(2−(α+β)²) − (β³ − β⁵ + α²β(β²−3))`.
pub fn cube_u(alpha: f64, beta: f64) -> f64 {
    let (a, b) = (alpha, beta);
    let s = a + b;
    (a - b) * (1.0 - b * b).powf(1.5) * (2.0 - s * s).sqrt() - (b.powi(3) - b.powi(5) + a * a * b * (b * b - 3.0))
}

/// Second cube identity, right side minus left side.
pub fn cube_v(alpha: f64, beta: f64) -> f64 {
    let (a, b) = (alpha, beta);
    let s = a + b;
    let w = 2.0 - s * s;
    let lhs = 2.0 * (1.0 - b * b) * (1.0 - 2.0 * (a * a - a * b + b * b)) * (s * s - 1.0).acos()
        + (1.0 - 3.0 * a * a - b * b) * w * (1.0 - 2.0 * b * b).acos();
    let rhs = 6.0
        * (1.0 - a * a - b * b)
        * ((1.0 - b * b) * s * w.sqrt() - b * (1.0 - b * b).sqrt() * w);
    rhs - lhs
}

/// Number of strict sign changes of `f` on `n` equispaced points of `(lo, hi]`.
pub fn count_sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> usize {
    let mut changes = 0;
    let mut prev = f(lo + (hi - lo) / n as f64);
    for k in 2..=n {
        let v = f(lo + (hi - lo) * k as f64 / n as f64);
        if v * prev < 0.0 {
            changes += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    changes
}

/// Bisection on a sign change of `f` over `[lo, hi]`, run until the bracket
/// cannot shrink further. Returns the final bracket and iteration count.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<([f64; 2], usize)> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(([lo, lo], 0));
    }
    if fhi == 0.0 {
        return Ok(([hi, hi], 0));
    }
    if flo * fhi > 0.0 {
        return Err(Error::NoBracket(format!(
            "f({lo}) = {flo:e} and f({hi}) = {fhi:e} have the same sign"
        )));
    }
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        iterations += 1;
        if fm == 0.0 {
            return Ok(([mid, mid], iterations));
        }
        if fm * flo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(([lo, hi], iterations))
}

/// Newton polishing with a central-difference derivative, kept inside
/// `bracket`; returns the point with the smallest `|f|` seen.
fn newton_polish<F: Fn(f64) -> f64>(f: &F, x0: f64, bracket: [f64; 2]) -> (f64, usize) {
    let mut best = (x0, f(x0).abs());
    let mut x = x0;
    let mut iterations = 0;
    for _ in 0..20 {
        let fx = f(x);
        if fx == 0.0 {
            return (x, iterations);
        }
        let h = 1e-7 * x.abs().max(1e-3);
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        iterations += 1;
        if !(next > bracket[0] && next < bracket[1]) || next == x {
            break;
        }
        x = next;
        let v = f(x).abs();
        if v < best.1 {
            best = (x, v);
        } else {
            break;
        }
    }
    (best.0, iterations)
}

fn interior(bracket: [f64; 2], x: f64) -> [f64; 2] {
    // widen a collapsed bracket by one ulp on each side so the root is interior
    if bracket[0] < x && x < bracket[1] {
        bracket
    } else {
        [bracket[0].min(x).next_down(), bracket[1].max(x).next_up()]
    }
}

/// Root `α_t ∈ (0, 1)` of `h_t` and the parameter `a_t = arcsin α_t` of the
/// `t`-design cycle `Γ^(t,a_t)`.
pub fn solve_geo(t: u32) -> Result<RootResult> {
    let h: fn(f64) -> f64 = match t {
        2 => h2,
        3 => h3,
        _ => return Err(Error::ParameterOutOfRange(format!("geodesic families exist for t = 2, 3, got {t}"))),
    };
    let (bracket, bis_iters) = bisect(|a| Ok(h(a)), 1e-3, 1.0, 1e-12)?;
    let (alpha, newton_iters) = newton_polish(&h, 0.5 * (bracket[0] + bracket[1]), [bracket[0] - 1e-12, bracket[1] + 1e-12]);
    let value = alpha.asin();
    let cycle = if t == 2 { geo_tetra(value)? } else { geo_octa(value)? };
    let report = verify_design(Curve::Geodesic(&cycle), t, 1e-9, &QuadratureSpec::from_env()?)?;
    Ok(RootResult {
        target: format!("geo{t}"),
        value: vec![value],
        root: vec![alpha],
        residual: h(alpha).abs(),
        bracket: vec![interior(bracket, alpha)],
        iterations: bis_iters + newton_iters,
        design_degree: t,
        design_residual: report.max_abs_residual,
    })
}

/// Outcome of the Poincaré-Miranda sign check on the cube box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirandaCheck {
    /// `max u(1/4, β)`, must be negative.
    pub u_left_max: f64,
    /// `min u(2/5, β)`, must be positive.
    pub u_right_min: f64,
    /// `max v(α, 1/2)`, must be negative.
    pub v_bottom_max: f64,
    /// `min v(α, 9/10)`, must be positive.
    pub v_top_min: f64,
}

impl MirandaCheck {
    pub fn holds(&self) -> bool {
        self.u_left_max < 0.0 && self.u_right_min > 0.0 && self.v_bottom_max < 0.0 && self.v_top_min > 0.0
    }
}

/// Sample the sign conditions of `u` and `v` on the edges of [`CUBE_BOX`].
pub fn miranda_check(samples: usize) -> MirandaCheck {
    let [[a0, a1], [b0, b1]] = CUBE_BOX;
    let grid = |lo: f64, hi: f64| (0..samples).map(move |k| lo + (hi - lo) * k as f64 / (samples - 1) as f64);
    MirandaCheck {
        u_left_max: grid(b0, b1).map(|b| cube_u(a0, b)).fold(f64::MIN, f64::max),
        u_right_min: grid(b0, b1).map(|b| cube_u(a1, b)).fold(f64::MAX, f64::min),
        v_bottom_max: grid(a0, a1).map(|a| cube_v(a, b0)).fold(f64::MIN, f64::max),
        v_top_min: grid(a0, a1).map(|a| cube_v(a, b1)).fold(f64::MAX, f64::min),
    }
}

fn in_box(p: [f64; 2]) -> bool {
    let [[a0, a1], [b0, b1]] = CUBE_BOX;
    p[0] >= a0 && p[0] <= a1 && p[1] >= b0 && p[1] <= b1
}

fn cube_residual(p: [f64; 2]) -> [f64; 2] {
    [cube_u(p[0], p[1]), cube_v(p[0], p[1])]
}

fn inf_norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Damped Newton iteration for `(u, v) = 0` from `start`. Returns `None`
/// when an iterate leaves the box or the line search fails.
fn cube_newton(start: [f64; 2], iterations: &mut usize) -> Option<[f64; 2]> {
    let mut p = start;
    let mut f = cube_residual(p);
    for _ in 0..100 {
        if inf_norm(f) <= 1e-15 {
            return Some(p);
        }
        let h = 1e-7;
        let du = |i: usize| {
            let mut plus = p;
            let mut minus = p;
            plus[i] += h;
            minus[i] -= h;
            let (fp, fm) = (cube_residual(plus), cube_residual(minus));
            [(fp[0] - fm[0]) / (2.0 * h), (fp[1] - fm[1]) / (2.0 * h)]
        };
        let (ca, cb) = (du(0), du(1));
        let det = ca[0] * cb[1] - cb[0] * ca[1];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = [
            -(cb[1] * f[0] - cb[0] * f[1]) / det,
            -(-ca[1] * f[0] + ca[0] * f[1]) / det,
        ];
        *iterations += 1;
        let mut lambda = 1.0;
        loop {
            let q = [p[0] + lambda * step[0], p[1] + lambda * step[1]];
            if !in_box(q) {
                return None;
            }
            let fq = cube_residual(q);
            if inf_norm(fq) < inf_norm(f) {
                p = q;
                f = fq;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                // no further decrease possible: converged to roundoff
                return (inf_norm(f) <= 1e-13).then_some(p);
            }
        }
    }
    (inf_norm(f) <= 1e-13).then_some(p)
}

/// Root `(α₀, β₀)` of the cube system, after certifying the sign conditions
/// on the box edges with `1000` samples each.
pub fn solve_cube() -> Result<RootResult> {
    let check = miranda_check(1000);
    if !check.holds() {
        return Err(Error::NoBracket(format!("sign conditions fail on the box edges: {check:?}")));
    }
    let mut iterations = 0;
    let center = [
        0.5 * (CUBE_BOX[0][0] + CUBE_BOX[0][1]),
        0.5 * (CUBE_BOX[1][0] + CUBE_BOX[1][1]),
    ];
    let root = cube_newton(CUBE_START, &mut iterations)
        .or_else(|| cube_newton(center, &mut iterations))
        .ok_or_else(|| Error::SolverFailure("Newton iteration left the box from both starts".into()))?;
    let cycle = geo_cube(root[0], root[1])?;
    let report = verify_design(Curve::Geodesic(&cycle), 3, 1e-9, &QuadratureSpec::from_env()?)?;
    Ok(RootResult {
        target: "cube".into(),
        value: root.to_vec(),
        root: root.to_vec(),
        residual: inf_norm(cube_residual(root)),
        bracket: CUBE_BOX.to_vec(),
        iterations,
        design_degree: 3,
        design_residual: report.max_abs_residual,
    })
}

/// `(1/ℓ)∫_{γ^(t,a)} (x² − z²)`, which vanishes exactly at the design parameter.
pub fn smooth_residual(t: u32, a: f64, quad: &QuadratureSpec) -> Result<f64> {
    let curve = smooth_s2(t, a)?;
    let v = curve.integrate_many(
        |p, out| {
            out[0] = 1.0;
            out[1] = p[0] * p[0] - p[2] * p[2];
        },
        2,
        quad,
    )?;
    Ok(v[1] / v[0])
}

/// Parameter `a_t ∈ (1/2, 1)` of the smooth `t`-design curve `γ^(t,a_t)`.
///
/// By symmetry every other degree-`≤ t` condition holds for all `a`, so the
/// `x² − z²` average is the only equation to solve.
pub fn solve_smooth(t: u32) -> Result<RootResult> {
    if !(t == 2 || t == 3) {
        return Err(Error::ParameterOutOfRange(format!("smooth design curves are solved for t = 2, 3, got {t}")));
    }
    let quad = QuadratureSpec::from_env()?;
    let (bracket, iterations) = bisect(|a| smooth_residual(t, a, &quad), 0.5, 1.0, 1e-13)?;
    let root = 0.5 * (bracket[0] + bracket[1]);
    let curve = smooth_s2(t, root)?;
    let report = verify_design(Curve::Smooth(&curve), t, 1e-8, &quad)?;
    Ok(RootResult {
        target: format!("smooth{t}"),
        value: vec![root],
        root: vec![root],
        residual: smooth_residual(t, root, &quad)?.abs(),
        bracket: vec![interior(bracket, root)],
        iterations,
        design_degree: t,
        design_residual: report.max_abs_residual,
    })
}

pub fn solve(target: Target) -> Result<RootResult> {
    match target {
        Target::Geo2 => solve_geo(2),
        Target::Geo3 => solve_geo(3),
        Target::Cube => solve_cube(),
        Target::Smooth2 => solve_smooth(2),
        Target::Smooth3 => solve_smooth(3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn h_anchor_values() {
        assert!((h2(1.0) - PI / 2.0).abs() < 1e-15);
        assert!((h3(1.0) - PI / 3.0).abs() < 1e-15);
        assert!(h3(1.0) > 0.0);
        assert!(h2(0.1) < 0.0);
        assert!(h2(0.456157).abs() <= 1e-5);
        assert!(h3(0.434837).abs() <= 1e-5);
    }

    #[test]
    fn h_roots_are_unique() {
        assert_eq!(count_sign_changes(h2, 0.0, 1.0, 10_000), 1);
        assert_eq!(count_sign_changes(h3, 0.0, 1.0, 10_000), 1);
    }

    #[test]
    fn geo_roots() {
        let r2 = solve_geo(2).unwrap();
        assert!((r2.value[0] - 0.47367).abs() < 1e-5);
        assert!((r2.root[0] - 0.456157).abs() < 1e-6);
        assert!(r2.residual <= 1e-13);
        assert!(r2.design_residual <= 1e-9);
        assert!(r2.bracket[0][0] < r2.root[0] && r2.root[0] < r2.bracket[0][1]);
        let r3 = solve_geo(3).unwrap();
        assert!((r3.value[0] - 0.449858).abs() < 1e-6);
        assert!(r3.residual <= 1e-13);
        assert!(r3.design_residual <= 1e-9);
        assert!(r3.iterations <= MAX_ITERATIONS);
        assert!(solve_geo(4).is_err());
    }

    #[test]
    fn cube_sign_conditions() {
        for b in [0.5, 0.7, 0.9] {
            assert!(cube_u(0.25, b) < 0.0);
            assert!(cube_u(0.4, b) > 0.0);
        }
        for a in [0.25, 0.32, 0.4] {
            assert!(cube_v(a, 0.5) < 0.0);
            assert!(cube_v(a, 0.9) > 0.0);
        }
        assert!(miranda_check(1000).holds());
    }

    #[test]
    fn cube_root() {
        let r = solve_cube().unwrap();
        assert!((r.value[0] - 0.381612286088763).abs() < 1e-12);
        assert!((r.value[1] - 0.767717328937887).abs() < 1e-12);
        assert!(cube_u(r.value[0], r.value[1]).abs() <= 1e-12);
        assert!(cube_v(r.value[0], r.value[1]).abs() <= 1e-12);
        assert!(r.residual <= 1e-13);
        assert!(r.design_residual <= 1e-9);
    }

    #[test]
    fn bisect_reports_missing_bracket() {
        assert!(matches!(
            bisect(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12),
            Err(Error::NoBracket(_))
        ));
        let (b, it) = bisect(|x| Ok(x - 0.3), 0.0, 1.0, 1e-12).unwrap();
        assert!(b[0] <= 0.3 && 0.3 <= b[1]);
        assert!(it <= MAX_ITERATIONS);
    }

    #[test]
    fn targets_parse() {
        for t in Target::ALL {
            assert_eq!(t.name().parse::<Target>().unwrap(), t);
        }
        assert!("geo4".parse::<Target>().is_err());
    }
}
