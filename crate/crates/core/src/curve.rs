//! Smooth closed curves and the `Curve` trait shared with geodesic cycles.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit_interval_with, GaussLegendre, QuadratureSpec};
use crate::sphere::{cross, cycle_enclosed_area, dot, norm, GeodesicCycle};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type VectorMap = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Closed curve `[0,1] → S^d` given by analytic position and derivative maps.
#[derive(Clone)]
pub struct ParametricCurve {
    label: String,
    ambient_dim: usize,
    position: VectorMap,
    velocity: VectorMap,
    acceleration: Option<VectorMap>,
    closed: bool,
    /// Smooth pieces of `[0,1]` used by the composite rule on the first level.
    base_segments: usize,
}

impl fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve")
            .field("label", &self.label)
            .field("ambient_dim", &self.ambient_dim)
            .field("closed", &self.closed)
            .finish()
    }
}

impl ParametricCurve {
    pub fn new(
        label: impl Into<String>,
        ambient_dim: usize,
        position: VectorMap,
        velocity: VectorMap,
        acceleration: Option<VectorMap>,
    ) -> Result<Self> {
        if ambient_dim < 3 {
            return Err(Error::DimensionTooSmall(ambient_dim));
        }
        let p0 = position(0.0);
        if p0.len() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                got: p0.len(),
            });
        }
        let p1 = position(1.0);
        let closed = p0.iter().zip(&p1).all(|(a, b)| (a - b).abs() <= 1e-10);
        Ok(Self {
            label: label.into(),
            ambient_dim,
            position,
            velocity,
            acceleration,
            closed,
            base_segments: 1,
        })
    }

    pub fn with_base_segments(mut self, segments: usize) -> Self {
        self.base_segments = segments.max(1);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn position(&self, s: f64) -> Vec<f64> {
        (self.position)(s)
    }

    pub fn velocity(&self, s: f64) -> Vec<f64> {
        (self.velocity)(s)
    }

    pub fn acceleration(&self, s: f64) -> Option<Vec<f64>> {
        self.acceleration.as_ref().map(|a| a(s))
    }

    pub fn speed(&self, s: f64) -> f64 {
        norm(&self.velocity(s))
    }

    /// Maximum deviation between the analytic velocity and a central
    /// difference of the position over `samples` points.
    pub fn velocity_check(&self, samples: usize, h: f64) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..samples {
            let s = (k as f64 + 0.5) / samples as f64;
            let plus = self.position(s + h);
            let minus = self.position(s - h);
            let v = self.velocity(s);
            for i in 0..self.ambient_dim {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                worst = worst.max((fd - v[i]).abs());
            }
        }
        worst
    }

    /// `∫_γ f_k` for every component of a vector-valued integrand.
    pub fn integrate_many<F>(&self, mut f: F, width: usize, quad: &QuadratureSpec) -> Result<Vec<f64>>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let rule = GaussLegendre::new(quad.nodes_per_segment);
        let pieces = self.base_segments;
        let mut total = vec![0.0; width];
        for k in 0..pieces {
            let a = k as f64 / pieces as f64;
            let h = 1.0 / pieces as f64;
            let mut integrand = |s: f64, out: &mut [f64]| {
                let t = a + h * s;
                let p = self.position(t);
                let speed = self.speed(t);
                f(&p, out);
                out.iter_mut().for_each(|v| *v *= speed * h);
            };
            let part = integrate_unit_interval_with(&rule, &mut integrand, width, quad)?;
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        Ok(total)
    }

    /// `∫₀¹ ⟨γ̈, γ × γ̇⟩ / ‖γ̇‖² ds` (unnormalized total geodesic curvature).
    pub fn total_geodesic_curvature(&self, quad: &QuadratureSpec) -> Result<f64> {
        if self.ambient_dim != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: self.ambient_dim,
            });
        }
        let acc = self.acceleration.as_ref().ok_or(Error::MissingAcceleration)?;
        let rule = GaussLegendre::new(quad.nodes_per_segment);
        let mut integrand = |s: f64, out: &mut [f64]| {
            let p = self.position(s);
            let v = self.velocity(s);
            let a = acc(s);
            out[0] = dot(&a, &cross(&p, &v)) / dot(&v, &v);
        };
        Ok(integrate_unit_interval_with(&rule, &mut integrand, 1, quad)?[0])
    }
}

/// `∫_γ f = ∫₀¹ f(γ(s)) ‖γ̇(s)‖ ds`.
pub fn integrate_smooth<F>(curve: &ParametricCurve, f: F, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    curve
        .integrate_many(|p, out| out[0] = f(p), 1, quad)
        .map(|v| v[0])
}

/// Either kind of closed curve handled by design verification.
#[derive(Debug, Clone, Copy)]
pub enum Curve<'a> {
    Geodesic(&'a GeodesicCycle),
    Smooth(&'a ParametricCurve),
}

impl<'a> From<&'a GeodesicCycle> for Curve<'a> {
    fn from(c: &'a GeodesicCycle) -> Self {
        Curve::Geodesic(c)
    }
}

impl<'a> From<&'a ParametricCurve> for Curve<'a> {
    fn from(c: &'a ParametricCurve) -> Self {
        Curve::Smooth(c)
    }
}

impl Curve<'_> {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Curve::Geodesic(c) => c.ambient_dim(),
            Curve::Smooth(c) => c.ambient_dim(),
        }
    }

    pub fn integrate_many<F>(&self, f: F, width: usize, quad: &QuadratureSpec) -> Result<Vec<f64>>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        match self {
            Curve::Geodesic(c) => c.integrate_many(f, width, quad),
            Curve::Smooth(c) => c.integrate_many(f, width, quad),
        }
    }

    pub fn length(&self, quad: &QuadratureSpec) -> Result<f64> {
        match self {
            Curve::Geodesic(c) => Ok(c.length()),
            Curve::Smooth(c) => integrate_smooth(c, |_| 1.0, quad),
        }
    }

    /// Point and speed at `s ∈ [0,1]`. Geodesic cycles give each arc an equal
    /// share `1/n` of the parameter interval.
    pub fn sample(&self, s: f64) -> (Vec<f64>, f64) {
        match self {
            Curve::Smooth(c) => (c.position(s), c.speed(s)),
            Curve::Geodesic(c) => {
                let n = c.len();
                let scaled = (s.clamp(0.0, 1.0) * n as f64).min(n as f64);
                let j = (scaled.floor() as usize).min(n - 1);
                let local = scaled - j as f64;
                let arc = &c.arcs()[j];
                let mut p = vec![0.0; c.ambient_dim()];
                arc.eval_into(local, &mut p);
                (p, n as f64 * arc.length())
            }
        }
    }
}

/// Normalized enclosed area `1/2 − (1/4π) ∫ k_g` of a closed curve on `S²`.
pub fn enclosed_area(curve: Curve<'_>, quad: &QuadratureSpec) -> Result<f64> {
    match curve {
        Curve::Geodesic(c) => cycle_enclosed_area(c),
        Curve::Smooth(c) => Ok(0.5 - c.total_geodesic_curvature(quad)? / (4.0 * PI)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn great_circle() -> ParametricCurve {
        ParametricCurve::new(
            "equator",
            3,
            Arc::new(|s: f64| vec![(TAU * s).cos(), (TAU * s).sin(), 0.0]),
            Arc::new(|s: f64| vec![-TAU * (TAU * s).sin(), TAU * (TAU * s).cos(), 0.0]),
            Some(Arc::new(|s: f64| {
                vec![-TAU * TAU * (TAU * s).cos(), -TAU * TAU * (TAU * s).sin(), 0.0]
            })),
        )
        .unwrap()
    }

    fn small_circle(theta: f64) -> ParametricCurve {
        let (st, ct) = theta.sin_cos();
        ParametricCurve::new(
            "cap",
            3,
            Arc::new(move |s: f64| vec![st * (TAU * s).cos(), st * (TAU * s).sin(), ct]),
            Arc::new(move |s: f64| vec![-TAU * st * (TAU * s).sin(), TAU * st * (TAU * s).cos(), 0.0]),
            Some(Arc::new(move |s: f64| {
                vec![-TAU * TAU * st * (TAU * s).cos(), -TAU * TAU * st * (TAU * s).sin(), 0.0]
            })),
        )
        .unwrap()
    }

    #[test]
    fn great_circle_length_and_odd_integral() {
        let c = great_circle();
        let q = QuadratureSpec::default();
        assert!(c.is_closed());
        assert!((integrate_smooth(&c, |_| 1.0, &q).unwrap() - TAU).abs() < 1e-12);
        assert!(integrate_smooth(&c, |p| p[2], &q).unwrap().abs() < 1e-15);
        assert!(c.velocity_check(50, 1e-5) < 1e-6);
    }

    #[test]
    fn areas() {
        let q = QuadratureSpec::default();
        let a = enclosed_area(Curve::Smooth(&great_circle()), &q).unwrap();
        assert!((a - 0.5).abs() < 1e-12);
        // counter-clockwise small circle around the north pole encloses its cap
        let theta = 0.7;
        let a = enclosed_area(Curve::Smooth(&small_circle(theta)), &q).unwrap();
        assert!((a - (1.0 - theta.cos()) / 2.0).abs() < 1e-12, "{a}");
    }

    #[test]
    fn missing_acceleration_is_reported() {
        let c = ParametricCurve::new(
            "noacc",
            3,
            Arc::new(|s: f64| vec![(TAU * s).cos(), (TAU * s).sin(), 0.0]),
            Arc::new(|s: f64| vec![-TAU * (TAU * s).sin(), TAU * (TAU * s).cos(), 0.0]),
            None,
        )
        .unwrap();
        assert_eq!(
            enclosed_area(Curve::Smooth(&c), &QuadratureSpec::default()).unwrap_err(),
            Error::MissingAcceleration
        );
    }

    #[test]
    fn geodesic_sampling_has_piecewise_constant_speed() {
        let c = GeodesicCycle::from_coords(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        let curve = Curve::Geodesic(&c);
        let (p0, v0) = curve.sample(0.0);
        let (p1, v1) = curve.sample(1.0);
        assert_eq!(v0, v1);
        for (a, b) in p0.iter().zip(&p1) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((v0 - 3.0 * PI / 2.0).abs() < 1e-14);
    }
}
