//! Points, geodesic arcs and geodesic cycles on `S^d`.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit_interval_with, GaussLegendre, QuadratureSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Arcs shorter than this are treated as constant maps.
pub const ZERO_ARC: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unit vector in `R^{d+1}`, `d >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Normalizes `coords` onto the sphere. Vectors already within 1e-15 of
    /// unit length are kept bit-for-bit so serialized cycles round-trip exactly.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        let n = norm(&coords);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Degenerate);
        }
        let coords = if (n - 1.0).abs() <= 1e-15 {
            coords
        } else {
            coords.into_iter().map(|c| c / n).collect()
        };
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(coords.to_vec())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    /// Dimension `d` of the sphere `S^d`.
    pub fn sphere_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn antipode(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot(&self.coords, &other.coords)
    }
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.coords
    }
}

/// Geodesic distance `arccos⟨x, y⟩` with the inner product clamped to `[-1, 1]`.
pub fn distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: x.ambient_dim(),
            got: y.ambient_dim(),
        });
    }
    Ok(x.dot(y).clamp(-1.0, 1.0).acos())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicArc {
    start: SpherePoint,
    end: SpherePoint,
    length: f64,
    sin_length: f64,
}

impl GeodesicArc {
    pub fn new(start: SpherePoint, end: SpherePoint) -> Result<Self> {
        let length = distance(&start, &end)?;
        let sin_length = length.sin();
        if length > PI / 2.0 && sin_length < 1e-12 {
            return Err(Error::Antipodal);
        }
        Ok(Self {
            start,
            end,
            length,
            sin_length,
        })
    }

    pub fn start(&self) -> &SpherePoint {
        &self.start
    }

    pub fn end(&self) -> &SpherePoint {
        &self.end
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_degenerate(&self) -> bool {
        self.length < ZERO_ARC
    }

    /// Writes `γ_{x,y}(s)` into `out`.
    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        let x = self.start.coords();
        if self.is_degenerate() {
            out.copy_from_slice(x);
            return;
        }
        let y = self.end.coords();
        let a = ((1.0 - s) * self.length).sin() / self.sin_length;
        let b = (s * self.length).sin() / self.sin_length;
        for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
            *o = a * xi + b * yi;
        }
    }

    pub fn eval(&self, s: f64) -> SpherePoint {
        let mut out = vec![0.0; self.start.ambient_dim()];
        self.eval_into(s, &mut out);
        SpherePoint { coords: out }
    }

    /// Unit tangent at the start, pointing towards `end`.
    pub fn start_tangent(&self) -> Vec<f64> {
        tangent_towards(self.start.coords(), self.end.coords())
    }

    /// Unit tangent at the end, in the direction of travel.
    pub fn end_tangent(&self) -> Vec<f64> {
        tangent_towards(self.end.coords(), self.start.coords())
            .into_iter()
            .map(|v| -v)
            .collect()
    }
}

fn tangent_towards(from: &[f64], to: &[f64]) -> Vec<f64> {
    let c = dot(from, to);
    let v: Vec<f64> = to.iter().zip(from).map(|(t, f)| t - c * f).collect();
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

/// Evaluate an arc at `s ∈ [0, 1]`.
pub fn arc_eval(arc: &GeodesicArc, s: f64) -> SpherePoint {
    arc.eval(s)
}

/// Closed curve through `x_1, …, x_n, x_1` along geodesic arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCycle {
    points: Vec<SpherePoint>,
    arcs: Vec<GeodesicArc>,
    length: f64,
}

impl GeodesicCycle {
    pub fn new(points: Vec<SpherePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        let dim = points[0].ambient_dim();
        if let Some(p) = points.iter().find(|p| p.ambient_dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.ambient_dim(),
            });
        }
        let n = points.len();
        let arcs = (0..n)
            .map(|j| GeodesicArc::new(points[j].clone(), points[(j + 1) % n].clone()))
            .collect::<Result<Vec<_>>>()?;
        let length: f64 = arcs.iter().map(GeodesicArc::length).sum();
        if !(length > 0.0) {
            return Err(Error::ZeroLength);
        }
        Ok(Self {
            points,
            arcs,
            length,
        })
    }

    /// Build from raw coordinate rows, normalizing each row.
    pub fn from_coords<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let pts = rows
            .iter()
            .map(|r| SpherePoint::from_slice(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }

    pub fn control_points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn arcs(&self) -> &[GeodesicArc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].ambient_dim()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn reversed(&self) -> Self {
        let mut pts = self.points.clone();
        pts.reverse();
        Self::new(pts).expect("reversal of a valid cycle is valid")
    }

    /// Path integral of a vector-valued integrand; component `k` of the
    /// result is `∫_γ f_k`.
    pub fn integrate_many<F>(&self, mut f: F, width: usize, quad: &QuadratureSpec) -> Result<Vec<f64>>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let rule = GaussLegendre::new(quad.nodes_per_segment);
        let mut total = vec![0.0; width];
        let mut point = vec![0.0; self.ambient_dim()];
        for arc in self.arcs.iter().filter(|a| !a.is_degenerate()) {
            let ell = arc.length();
            // tolerance applies to ℓ·∫₀¹, so scale it for the unit-interval loop
            let arc_spec = quad.with_tolerance(quad.tolerance / ell.max(1.0));
            let mut integrand = |s: f64, out: &mut [f64]| {
                arc.eval_into(s, &mut point);
                f(&point, out);
            };
            let part = integrate_unit_interval_with(&rule, &mut integrand, width, &arc_spec)?;
            for (t, p) in total.iter_mut().zip(part) {
                *t += ell * p;
            }
        }
        Ok(total)
    }

    /// Closed-form tangent data for `turning_angles`: consecutive duplicates
    /// are merged first.
    fn merged_points(&self) -> Vec<&SpherePoint> {
        let mut out: Vec<&SpherePoint> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if out.last().is_none_or(|q| distance(q, p).unwrap() >= ZERO_ARC) {
                out.push(p);
            }
        }
        while out.len() > 1 && distance(out[0], out[out.len() - 1]).unwrap() < ZERO_ARC {
            out.pop();
        }
        out
    }
}

pub fn cycle_length(cycle: &GeodesicCycle) -> f64 {
    cycle.length()
}

/// `∫_γ f = Σ_j ℓ_j ∫₀¹ f(γ_j(s)) ds`.
pub fn integrate_cycle<F>(cycle: &GeodesicCycle, f: F, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    cycle
        .integrate_many(|p, out| out[0] = f(p), 1, quad)
        .map(|v| v[0])
}

/// Signed exterior angle at each control point of a cycle on `S²`.
pub fn turning_angles(cycle: &GeodesicCycle) -> Result<Vec<f64>> {
    if cycle.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: cycle.ambient_dim(),
        });
    }
    let pts = cycle.merged_points();
    let n = pts.len();
    if n < 2 {
        return Err(Error::Degenerate);
    }
    let mut angles = Vec::with_capacity(n);
    for j in 0..n {
        let prev = pts[(j + n - 1) % n].coords();
        let cur = pts[j].coords();
        let next = pts[(j + 1) % n].coords();
        let incoming: Vec<f64> = tangent_towards(cur, prev).into_iter().map(|v| -v).collect();
        let outgoing = tangent_towards(cur, next);
        if incoming.iter().chain(&outgoing).any(|v| !v.is_finite()) {
            return Err(Error::Degenerate);
        }
        let sin = dot(cur, &cross(&incoming, &outgoing));
        let cos = dot(&incoming, &outgoing);
        angles.push(sin.atan2(cos));
    }
    Ok(angles)
}

/// Normalized area to the left of a geodesic cycle on `S²` via Gauss-Bonnet:
/// `1/2 − (Σ turning angles) / 4π`.
pub fn cycle_enclosed_area(cycle: &GeodesicCycle) -> Result<f64> {
    let total: f64 = turning_angles(cycle)?.iter().sum();
    Ok(0.5 - total / (4.0 * PI))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleDocument {
    pub dim: usize,
    pub control_points: Vec<Vec<f64>>,
    pub closed: bool,
}

impl From<&GeodesicCycle> for CycleDocument {
    fn from(c: &GeodesicCycle) -> Self {
        Self {
            dim: c.ambient_dim(),
            control_points: c.points.iter().map(|p| p.coords.clone()).collect(),
            closed: true,
        }
    }
}

impl TryFrom<CycleDocument> for GeodesicCycle {
    type Error = Error;
    fn try_from(doc: CycleDocument) -> Result<Self> {
        if !doc.closed {
            return Err(Error::Parse("geodesic cycles must be closed".into()));
        }
        if let Some(row) = doc.control_points.iter().find(|r| r.len() != doc.dim) {
            return Err(Error::DimensionMismatch {
                expected: doc.dim,
                got: row.len(),
            });
        }
        GeodesicCycle::from_coords(&doc.control_points)
    }
}

impl Serialize for GeodesicCycle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycleDocument::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeodesicCycle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = CycleDocument::deserialize(d)?;
        GeodesicCycle::try_from(doc).map_err(serde::de::Error::custom)
    }
}
