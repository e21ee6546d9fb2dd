//! Explicit curve families and the Platonic Hamiltonian cycles.

use crate::curve::{Curve, ParametricCurve, VectorMap};
use crate::error::{Error, Result};
use crate::sphere::{GeodesicCycle, SpherePoint};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solid {
    Tetra,
    Octa,
    Cube,
    Icosa,
    Dodeca,
}

impl Solid {
    pub const ALL: [Solid; 5] = [Solid::Tetra, Solid::Octa, Solid::Cube, Solid::Icosa, Solid::Dodeca];

    pub fn name(self) -> &'static str {
        match self {
            Solid::Tetra => "tetra",
            Solid::Octa => "octa",
            Solid::Cube => "cube",
            Solid::Icosa => "icosa",
            Solid::Dodeca => "dodeca",
        }
    }
}

impl FromStr for Solid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Solid::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown solid '{s}'")))
    }
}

/// A member of one of the curve families, identified by its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    SmoothS2 { t: u32, a: f64 },
    OddSphere { kind: u32, m: usize },
    GeoTetra { a: f64 },
    GeoOcta { a: f64 },
    GeoCube { alpha: f64, beta: f64 },
    Platonic(Solid),
}

/// A constructed family member.
#[derive(Debug, Clone)]
pub enum FamilyCurve {
    Geodesic(GeodesicCycle),
    Smooth(ParametricCurve),
}

impl FamilyCurve {
    pub fn as_curve(&self) -> Curve<'_> {
        match self {
            FamilyCurve::Geodesic(c) => Curve::Geodesic(c),
            FamilyCurve::Smooth(c) => Curve::Smooth(c),
        }
    }

    pub fn geodesic(&self) -> Option<&GeodesicCycle> {
        match self {
            FamilyCurve::Geodesic(c) => Some(c),
            FamilyCurve::Smooth(_) => None,
        }
    }
}

impl FamilySpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilySpec::SmoothS2 { .. } => "smooth",
            FamilySpec::OddSphere { .. } => "odd",
            FamilySpec::GeoTetra { .. } => "geo-tetra",
            FamilySpec::GeoOcta { .. } => "geo-octa",
            FamilySpec::GeoCube { .. } => "geo-cube",
            FamilySpec::Platonic(_) => "platonic",
        }
    }

    /// Parameters as `(key, value)` pairs in canonical order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        match self {
            FamilySpec::SmoothS2 { t, a } => vec![("t", t.to_string()), ("a", a.to_string())],
            FamilySpec::OddSphere { kind, m } => {
                vec![("kind", kind.to_string()), ("m", m.to_string())]
            }
            FamilySpec::GeoTetra { a } | FamilySpec::GeoOcta { a } => vec![("a", a.to_string())],
            FamilySpec::GeoCube { alpha, beta } => {
                vec![("alpha", alpha.to_string()), ("beta", beta.to_string())]
            }
            FamilySpec::Platonic(s) => vec![("solid", s.name().to_string())],
        }
    }

    /// Build from a family name and raw `key=value` parameters.
    pub fn from_parts(family: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let real = |k: &str| -> Result<f64> {
            let raw = params
                .get(k)
                .ok_or_else(|| Error::Parse(format!("{family}: missing parameter '{k}'")))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{family}: '{k}={raw}' is not a number")))
        };
        let int = |k: &str| -> Result<u64> {
            let raw = params
                .get(k)
                .ok_or_else(|| Error::Parse(format!("{family}: missing parameter '{k}'")))?;
            raw.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("{family}: '{k}={raw}' is not an integer")))
        };
        let allowed: &[&str] = match family {
            "smooth" => &["t", "a"],
            "odd" => &["kind", "m"],
            "geo-tetra" | "geo-octa" => &["a"],
            "geo-cube" => &["alpha", "beta"],
            "platonic" => &["solid"],
            _ => return Err(Error::Parse(format!("unknown family '{family}'"))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("{family}: unexpected parameter '{k}'")));
        }
        let spec = match family {
            "smooth" => FamilySpec::SmoothS2 {
                t: int("t")? as u32,
                a: real("a")?,
            },
            "odd" => FamilySpec::OddSphere {
                kind: int("kind")? as u32,
                m: int("m")? as usize,
            },
            "geo-tetra" => FamilySpec::GeoTetra { a: real("a")? },
            "geo-octa" => FamilySpec::GeoOcta { a: real("a")? },
            "geo-cube" => FamilySpec::GeoCube {
                alpha: real("alpha")?,
                beta: real("beta")?,
            },
            _ => FamilySpec::Platonic(
                params
                    .get("solid")
                    .ok_or_else(|| Error::Parse("platonic: missing solid".into()))?
                    .parse()?,
            ),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::SmoothS2 { t, a } => check_smooth(t, a),
            FamilySpec::OddSphere { kind, m } => check_odd(kind, m),
            FamilySpec::GeoTetra { a } | FamilySpec::GeoOcta { a } => check_geo_angle(a),
            FamilySpec::GeoCube { alpha, beta } => check_cube(alpha, beta),
            FamilySpec::Platonic(_) => Ok(()),
        }
    }

    pub fn build(&self) -> Result<FamilyCurve> {
        Ok(match *self {
            FamilySpec::SmoothS2 { t, a } => FamilyCurve::Smooth(smooth_s2(t, a)?),
            FamilySpec::OddSphere { kind, m } => FamilyCurve::Smooth(odd_sphere(kind, m)?),
            FamilySpec::GeoTetra { a } => FamilyCurve::Geodesic(geo_tetra(a)?),
            FamilySpec::GeoOcta { a } => FamilyCurve::Geodesic(geo_octa(a)?),
            FamilySpec::GeoCube { alpha, beta } => FamilyCurve::Geodesic(geo_cube(alpha, beta)?),
            FamilySpec::Platonic(s) => FamilyCurve::Geodesic(platonic_cycle(s)),
        })
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Parses `family:key=value,key=value`, or `platonic:<solid>`.
    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let family = family.trim();
        let mut params = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            match item.split_once('=') {
                Some((k, v)) => {
                    params.insert(k.trim().to_string(), v.trim().to_string());
                }
                None if family == "platonic" => {
                    params.insert("solid".to_string(), item.to_string());
                }
                None => return Err(Error::Parse(format!("expected key=value, got '{item}'"))),
            }
        }
        FamilySpec::from_parts(family, &params)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}:{}", self.family_name(), params.join(","))
    }
}

/// JSON form `{"family": "geo-tetra", "params": {"a": 0.47}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl TryFrom<FamilyDocument> for FamilySpec {
    type Error = Error;

    fn try_from(doc: FamilyDocument) -> Result<Self> {
        let params = doc
            .params
            .into_iter()
            .map(|(k, v)| {
                let s = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(Error::Parse(format!("parameter '{k}': unsupported value {other}"))),
                };
                Ok((k, s))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        FamilySpec::from_parts(&doc.family, &params)
    }
}

impl From<&FamilySpec> for FamilyDocument {
    fn from(spec: &FamilySpec) -> Self {
        let params = match spec {
            FamilySpec::SmoothS2 { t, a } => vec![("t", (*t).into()), ("a", (*a).into())],
            FamilySpec::OddSphere { kind, m } => vec![("kind", (*kind).into()), ("m", (*m).into())],
            FamilySpec::GeoTetra { a } | FamilySpec::GeoOcta { a } => vec![("a", (*a).into())],
            FamilySpec::GeoCube { alpha, beta } => {
                vec![("alpha", (*alpha).into()), ("beta", (*beta).into())]
            }
            FamilySpec::Platonic(s) => vec![("solid", s.name().into())],
        };
        FamilyDocument {
            family: spec.family_name().to_string(),
            params: params
                .into_iter()
                .map(|(k, v): (&str, serde_json::Value)| (k.to_string(), v))
                .collect(),
        }
    }
}

fn check_smooth(t: u32, a: f64) -> Result<()> {
    if !(1..=3).contains(&t) {
        return Err(Error::ParameterOutOfRange(format!("smooth: t must be 1, 2 or 3, got {t}")));
    }
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::ParameterOutOfRange(format!("smooth: a must lie in [0,1], got {a}")));
    }
    Ok(())
}

fn check_odd(kind: u32, m: usize) -> Result<()> {
    if !(1..=3).contains(&kind) {
        return Err(Error::ParameterOutOfRange(format!("odd: kind must be 1, 2 or 3, got {kind}")));
    }
    if m < 2 {
        return Err(Error::ParameterOutOfRange(format!("odd: m must be at least 2, got {m}")));
    }
    Ok(())
}

fn check_geo_angle(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= FRAC_PI_2) {
        return Err(Error::ParameterOutOfRange(format!("a must lie in (0, pi/2], got {a}")));
    }
    Ok(())
}

fn check_cube(alpha: f64, beta: f64) -> Result<()> {
    // α = β is admitted so that the cube itself belongs to the family
    if !(alpha > 0.0 && alpha <= beta && alpha * alpha + beta * beta < 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "geo-cube: need 0 < alpha <= beta and alpha^2 + beta^2 < 1, got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

/// `γ^(t,a)(s) = (a cos 2πs + (1−a) cos 2π(2t−1)s,
///               a sin 2πs − (1−a) sin 2π(2t−1)s,
///               2√(a(1−a)) sin 2πts)`.
pub fn smooth_s2(t: u32, a: f64) -> Result<ParametricCurve> {
    check_smooth(t, a)?;
    let k = (2 * t - 1) as f64;
    let tf = t as f64;
    let b = 2.0 * (a * (1.0 - a)).sqrt();
    let c = 1.0 - a;
    let w = TAU;
    let position: VectorMap = Arc::new(move |s: f64| {
        let (s1, c1) = (w * s).sin_cos();
        let (sk, ck) = (k * w * s).sin_cos();
        vec![a * c1 + c * ck, a * s1 - c * sk, b * (tf * w * s).sin()]
    });
    let velocity: VectorMap = Arc::new(move |s: f64| {
        let (s1, c1) = (w * s).sin_cos();
        let (sk, ck) = (k * w * s).sin_cos();
        vec![
            -w * (a * s1 + c * k * sk),
            w * (a * c1 - c * k * ck),
            b * tf * w * (tf * w * s).cos(),
        ]
    });
    let acceleration: VectorMap = Arc::new(move |s: f64| {
        let (s1, c1) = (w * s).sin_cos();
        let (sk, ck) = (k * w * s).sin_cos();
        let w2 = w * w;
        vec![
            -w2 * (a * c1 + c * k * k * ck),
            -w2 * (a * s1 - c * k * k * sk),
            -b * tf * tf * w2 * (tf * w * s).sin(),
        ]
    });
    Ok(
        ParametricCurve::new(format!("smooth:t={t},a={a}"), 3, position, velocity, Some(acceleration))?
            .with_base_segments(4 * t as usize),
    )
}

/// `γ^(2,a)` at this parameter has the regular tetrahedron as its vertex set.
pub const SMOOTH_TETRA_PARAMETER: f64 = 0.908_248_290_463_863;

/// `γ^(3,a)` at this parameter has the octahedron as its vertex set; at
/// `a = 1/2` all six vertices collapse onto the poles.
pub const SMOOTH_OCTA_PARAMETER: f64 = 0.908_248_290_463_863;

/// The `2t` curvature vertices `γ^(t,a)((2j−1)/(4t))`, `j = 1..2t`.
pub fn smooth_vertices(t: u32, a: f64) -> Result<Vec<SpherePoint>> {
    let curve = smooth_s2(t, a)?;
    (1..=2 * t)
        .map(|j| SpherePoint::new(curve.position((2 * j - 1) as f64 / (4 * t) as f64)))
        .collect()
}

/// Frequencies of the circle blocks: `1..m` for kind 2, `1,3,…,2m−1` for
/// kind 3 and all ones for kind 1 (a great circle).
fn odd_frequencies(kind: u32, m: usize) -> Vec<f64> {
    (1..=m)
        .map(|k| match kind {
            1 => 1.0,
            2 => k as f64,
            _ => (2 * k - 1) as f64,
        })
        .collect()
}

/// `γ^(kind)(s) = (c(k_1 s), …, c(k_m s))/√m ∈ S^{2m−1}` with
/// `c(s) = (cos 2πs, sin 2πs)`.
pub fn odd_sphere(kind: u32, m: usize) -> Result<ParametricCurve> {
    check_odd(kind, m)?;
    let freqs = Arc::new(odd_frequencies(kind, m));
    let scale = 1.0 / (m as f64).sqrt();
    let f1 = freqs.clone();
    let position: VectorMap = Arc::new(move |s: f64| {
        f1.iter()
            .flat_map(|&k| {
                let (sn, cs) = (TAU * k * s).sin_cos();
                [scale * cs, scale * sn]
            })
            .collect()
    });
    let f2 = freqs.clone();
    let velocity: VectorMap = Arc::new(move |s: f64| {
        f2.iter()
            .flat_map(|&k| {
                let (sn, cs) = (TAU * k * s).sin_cos();
                let w = scale * TAU * k;
                [-w * sn, w * cs]
            })
            .collect()
    });
    let f3 = freqs;
    let acceleration: VectorMap = Arc::new(move |s: f64| {
        f3.iter()
            .flat_map(|&k| {
                let (sn, cs) = (TAU * k * s).sin_cos();
                let w2 = scale * (TAU * k).powi(2);
                [-w2 * cs, -w2 * sn]
            })
            .collect()
    });
    let segments = 2 * m.max(2);
    Ok(ParametricCurve::new(
        format!("odd:kind={kind},m={m}"),
        2 * m,
        position,
        velocity,
        Some(acceleration),
    )?
    .with_base_segments(segments))
}

/// Sample points of the odd-sphere curves that form point designs:
/// `s = j/(2m+1)` for kind 2 and `s = j/(4m)` for kind 3.
pub fn odd_sphere_points(kind: u32, m: usize) -> Result<Vec<SpherePoint>> {
    let curve = odd_sphere(kind, m)?;
    let count = match kind {
        2 => 2 * m + 1,
        3 => 4 * m,
        _ => {
            return Err(Error::ParameterOutOfRange(format!(
                "odd: point sets exist for kind 2 and 3, got {kind}"
            )))
        }
    };
    (1..=count)
        .map(|j| SpherePoint::new(curve.position(j as f64 / count as f64)))
        .collect()
}

fn cycle(rows: &[[f64; 3]]) -> Result<GeodesicCycle> {
    GeodesicCycle::from_coords(rows)
}

/// `Γ^(2,a)` through `(sin a, 0, cos a), (0, sin a, −cos a), (−sin a, 0, cos a), (0, −sin a, −cos a)`.
pub fn geo_tetra(a: f64) -> Result<GeodesicCycle> {
    check_geo_angle(a)?;
    let (s, c) = a.sin_cos();
    cycle(&[[s, 0.0, c], [0.0, s, -c], [-s, 0.0, c], [0.0, -s, -c]])
}

/// `Γ^(3,a)` through `y_1, y_2, y_3` and their antipodes `y_4 = −y_1`, ….
pub fn geo_octa(a: f64) -> Result<GeodesicCycle> {
    check_geo_angle(a)?;
    let (s, c) = a.sin_cos();
    let h = 3f64.sqrt() / 2.0;
    let y1 = [s, 0.0, c];
    let y2 = [0.5 * s, h * s, -c];
    let y3 = [-0.5 * s, h * s, c];
    let neg = |v: [f64; 3]| [-v[0], -v[1], -v[2]];
    cycle(&[y1, y2, y3, neg(y1), neg(y2), neg(y3)])
}

/// Eight-point cycle `γ^(α,β)` with `q = √(1−α²−β²)`.
pub fn geo_cube(alpha: f64, beta: f64) -> Result<GeodesicCycle> {
    check_cube(alpha, beta)?;
    let q = (1.0 - alpha * alpha - beta * beta).sqrt();
    let (al, be) = (alpha, beta);
    cycle(&[
        [al, be, q],
        [be, al, -q],
        [-be, al, -q],
        [-al, be, q],
        [-al, -be, q],
        [-be, -al, -q],
        [be, -al, -q],
        [al, -be, q],
    ])
}

/// Icosahedron vertices `(0, ±1, ±φ)` and cyclic permutations.
pub fn icosahedron_vertices() -> Vec<[f64; 3]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(12);
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            v.push([0.0, s1, s2 * phi]);
            v.push([s1, s2 * phi, 0.0]);
            v.push([s2 * phi, 0.0, s1]);
        }
    }
    v
}

/// Dodecahedron vertices `(±1, ±1, ±1)` followed by `(0, ±1/φ, ±φ)` and
/// cyclic permutations.
pub fn dodecahedron_vertices() -> Vec<[f64; 3]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v = Vec::with_capacity(20);
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                v.push([a, b, c]);
            }
        }
    }
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            v.push([0.0, s1 / phi, s2 * phi]);
            v.push([s1 / phi, s2 * phi, 0.0]);
            v.push([s2 * phi, 0.0, s1 / phi]);
        }
    }
    v
}

/// Hamiltonian vertex orders into [`icosahedron_vertices`] and
/// [`dodecahedron_vertices`].
pub const ICOSA_ORDER: [usize; 12] = [0, 1, 2, 4, 6, 5, 10, 9, 8, 3, 11, 7];
pub const DODECA_ORDER: [usize; 20] = [0, 8, 4, 13, 6, 14, 2, 10, 16, 1, 11, 17, 3, 12, 18, 7, 19, 5, 15, 9];

/// Spherical Hamiltonian cycle along the edges of a Platonic solid.
///
/// Tetrahedron, octahedron and cube are the members `Γ^(2,arctan √2)`,
/// `Γ^(3,arctan √2)` and `γ^(1/√3,1/√3)` of their families; icosahedron and
/// dodecahedron use the fixed orders above.
pub fn platonic_cycle(solid: Solid) -> GeodesicCycle {
    let magic = 2f64.sqrt().atan();
    let built = match solid {
        Solid::Tetra => geo_tetra(magic),
        Solid::Octa => geo_octa(magic),
        Solid::Cube => {
            let c = 1.0 / 3f64.sqrt();
            geo_cube(c, c)
        }
        Solid::Icosa => {
            let v = icosahedron_vertices();
            cycle(&ICOSA_ORDER.map(|i| v[i]))
        }
        Solid::Dodeca => {
            let v = dodecahedron_vertices();
            cycle(&DODECA_ORDER.map(|i| v[i]))
        }
    };
    built.expect("Platonic cycles are valid by construction")
}

/// Number of vertices of a solid.
pub fn solid_vertex_count(solid: Solid) -> usize {
    match solid {
        Solid::Tetra => 4,
        Solid::Octa => 6,
        Solid::Cube => 8,
        Solid::Icosa => 12,
        Solid::Dodeca => 20,
    }
}

/// Inner product of adjacent vertices of each solid.
pub fn solid_edge_cosine(solid: Solid) -> f64 {
    match solid {
        Solid::Tetra => -1.0 / 3.0,
        Solid::Octa => 0.0,
        Solid::Cube => 1.0 / 3.0,
        Solid::Icosa => 1.0 / 5f64.sqrt(),
        Solid::Dodeca => 5f64.sqrt() / 3.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{point_design_residual, verify_design, DESIGN_TOLERANCE};
    use crate::quadrature::QuadratureSpec;
    use crate::sphere::{dot, norm};
    use proptest::prelude::*;

    fn avg(c: &GeodesicCycle, f: impl Fn(&[f64]) -> f64) -> f64 {
        crate::sphere::integrate_cycle(c, f, &QuadratureSpec::default()).unwrap() / c.length()
    }

    #[test]
    fn parsing_round_trips() {
        for s in [
            "geo-tetra:a=0.47367",
            "smooth:t=2,a=0.7778",
            "odd:kind=3,m=3",
            "geo-octa:a=0.4",
            "geo-cube:alpha=0.3,beta=0.7",
            "platonic:solid=icosa",
        ] {
            let spec: FamilySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            let doc = FamilyDocument::from(&spec);
            let json = serde_json::to_string(&doc).unwrap();
            let back: FamilyDocument = serde_json::from_str(&json).unwrap();
            assert_eq!(FamilySpec::try_from(back).unwrap(), spec);
        }
        assert_eq!(
            "platonic:tetra".parse::<FamilySpec>().unwrap(),
            FamilySpec::Platonic(Solid::Tetra)
        );
    }

    #[test]
    fn parsing_rejects_bad_input() {
        for s in [
            "geo-tetra:a=2.0",
            "geo-tetra:a=0",
            "smooth:t=4,a=0.5",
            "smooth:t=2,a=1.5",
            "odd:kind=2,m=1",
            "geo-cube:alpha=0.8,beta=0.7",
            "geo-cube:alpha=0.6,beta=0.9",
            "platonic:prism",
            "nope:a=1",
            "geo-tetra:b=0.3",
            "geo-tetra:a=x",
        ] {
            assert!(s.parse::<FamilySpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn smooth_curves_are_on_the_sphere_and_consistent() {
        for t in 1..=3 {
            for a in [0.0, 0.3, 0.7778, 1.0] {
                let c = smooth_s2(t, a).unwrap();
                assert!(c.is_closed());
                for k in 0..=10_000 {
                    let p = c.position(k as f64 / 10_000.0);
                    assert!((norm(&p) - 1.0).abs() < 1e-12);
                }
                assert!(c.velocity_check(97, 1e-5) < 1e-6);
            }
        }
    }

    #[test]
    fn smooth_t1_is_a_great_circle() {
        let c = smooth_s2(1, 0.37).unwrap();
        let r = verify_design(Curve::Smooth(&c), 1, DESIGN_TOLERANCE, &QuadratureSpec::default()).unwrap();
        assert!(r.is_design, "{}", r.max_abs_residual);
        let len = Curve::Smooth(&c).length(&QuadratureSpec::default()).unwrap();
        assert!((len - TAU).abs() < 1e-12);
    }

    #[test]
    fn smooth_vertex_point_designs() {
        let pts = smooth_vertices(2, SMOOTH_TETRA_PARAMETER).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(point_design_residual(&pts, 2).unwrap() <= 1e-12);
        let pts = smooth_vertices(3, SMOOTH_OCTA_PARAMETER).unwrap();
        assert_eq!(pts.len(), 6);
        assert!(point_design_residual(&pts, 3).unwrap() <= 1e-12);
    }

    #[test]
    fn vertex_parameters() {
        assert!((SMOOTH_TETRA_PARAMETER - (0.5 + 1.0 / 6f64.sqrt())).abs() < 1e-15);
        let poles = smooth_vertices(3, 0.5).unwrap();
        assert!(poles.iter().all(|p| p.coords()[2].abs() > 1.0 - 1e-12));
    }

    #[test]
    fn odd_sphere_point_designs() {
        for m in [2, 3] {
            let p2 = odd_sphere_points(2, m).unwrap();
            assert!(point_design_residual(&p2, 2).unwrap() <= 1e-12);
            let p3 = odd_sphere_points(3, m).unwrap();
            assert!(point_design_residual(&p3, 3).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn odd_sphere_curves_are_designs() {
        let q = QuadratureSpec::default();
        let c = odd_sphere(3, 3).unwrap();
        assert_eq!(c.ambient_dim(), 6);
        assert!(c.velocity_check(31, 1e-5) < 1e-6);
        assert!(verify_design(Curve::Smooth(&c), 3, DESIGN_TOLERANCE, &q).unwrap().is_design);
        let c = odd_sphere(2, 2).unwrap();
        assert!(verify_design(Curve::Smooth(&c), 2, DESIGN_TOLERANCE, &q).unwrap().is_design);
        let c = odd_sphere(1, 2).unwrap();
        assert!(verify_design(Curve::Smooth(&c), 1, DESIGN_TOLERANCE, &q).unwrap().is_design);
    }

    #[test]
    fn geo_tetra_special_parameters() {
        let c = geo_tetra(2f64.sqrt().atan()).unwrap();
        let p = c.control_points();
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!((p[i].dot(&p[j]) + 1.0 / 3.0).abs() < 1e-12);
            }
        }
        let eq = geo_tetra(FRAC_PI_2).unwrap();
        assert!((avg(&eq, |x| x[0] * x[0]) - 0.5).abs() < 1e-12);
        assert!((avg(&eq, |x| x[0] * x[0] - x[2] * x[2]) - 0.5).abs() < 1e-12);
        let flat = geo_tetra(1e-3).unwrap();
        assert!((avg(&flat, |x| x[0] * x[0]) - 0.25).abs() < 5e-3);
        assert!((avg(&flat, |x| x[2] * x[2]) - 0.5).abs() < 5e-3);
    }

    #[test]
    fn geo_tetra_symmetries_are_exact() {
        let c = geo_tetra(0.81).unwrap();
        let p = c.control_points();
        let (x1, x3) = (p[0].coords(), p[2].coords());
        assert_eq!([-x1[0], x1[1], x1[2]], [x3[0], x3[1], x3[2]]);
        let o = geo_octa(0.63).unwrap();
        let q = o.control_points();
        for k in 0..3 {
            let (a, b) = (q[k].coords(), q[k + 3].coords());
            assert!(a.iter().zip(b).all(|(u, v)| *u == -*v));
        }
    }

    #[test]
    fn octa_at_magic_angle_is_the_octahedron() {
        let c = geo_octa(2f64.sqrt().atan()).unwrap();
        let p = c.control_points();
        for i in 0..6 {
            for j in 0..6 {
                let d = p[i].dot(&p[j]);
                let expected = if i == j {
                    1.0
                } else if (i + 3) % 6 == j {
                    -1.0
                } else {
                    0.0
                };
                assert!((d - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn platonic_cycles() {
        for solid in Solid::ALL {
            let c = platonic_cycle(solid);
            let n = solid_vertex_count(solid);
            assert_eq!(c.len(), n);
            let pts = c.control_points();
            for p in pts {
                assert!((norm(p.coords()) - 1.0).abs() < 1e-14);
            }
            // distinct vertices, and consecutive ones joined by an edge
            for i in 0..n {
                for j in (i + 1)..n {
                    assert!(pts[i].dot(&pts[j]) < 1.0 - 1e-9);
                }
                let d = pts[i].dot(&pts[(i + 1) % n]);
                assert!((d - solid_edge_cosine(solid)).abs() < 1e-12, "{solid:?} {i}");
            }
            // edge cosine is the largest off-diagonal inner product
            let max_off = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| pts[i].dot(&pts[j]))
                .fold(f64::MIN, f64::max);
            assert!((max_off - solid_edge_cosine(solid)).abs() < 1e-12);
        }
        let tet = platonic_cycle(Solid::Tetra);
        assert!((tet.length() - 4.0 * (-1.0f64 / 3.0).acos()).abs() < 1e-12);
        let mut icosa = ICOSA_ORDER.to_vec();
        icosa.sort();
        assert_eq!(icosa, (0..12).collect::<Vec<_>>());
        let mut dodeca = DODECA_ORDER.to_vec();
        dodeca.sort();
        assert_eq!(dodeca, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn cube_at_center_is_the_cube() {
        let c = 1.0 / 3f64.sqrt();
        let cyc = geo_cube(c, c).unwrap();
        for p in cyc.control_points() {
            for x in p.coords() {
                assert!((x.abs() - c).abs() < 1e-15);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn octa_family_is_antipodal_and_balanced(a in 0.05f64..FRAC_PI_2) {
            let c = geo_octa(a).unwrap();
            for f in [
                (|x: &[f64]| x[0]) as fn(&[f64]) -> f64,
                |x| x[2],
                |x| x[0] * x[1] * x[2],
                |x| x[2].powi(3),
                |x| x[0] * x[0] * x[1],
            ] {
                prop_assert!(avg(&c, f).abs() <= 1e-10);
            }
            prop_assert!((avg(&c, |x| x[0] * x[0]) - avg(&c, |x| x[1] * x[1])).abs() <= 1e-10);
        }

        #[test]
        fn cube_family_symmetries(alpha in 0.05f64..0.6, frac in 0.0f64..1.0) {
            let beta_max = (1.0 - alpha * alpha).sqrt() - 1e-3;
            prop_assume!(beta_max > alpha);
            let beta = alpha + frac * (beta_max - alpha);
            let c = geo_cube(alpha, beta).unwrap();
            let odd: [fn(&[f64]) -> f64; 11] = [
                |x| x[0], |x| x[1], |x| x[2],
                |x| x[0] * x[0] * x[1], |x| x[0] * x[1] * x[1], |x| x[0] * x[1] * x[2],
                |x| x[0] * x[2] * x[2], |x| x[1] * x[2] * x[2],
                |x| x[0].powi(3), |x| x[1].powi(3), |x| x[2].powi(3),
            ];
            for f in odd {
                prop_assert!(avg(&c, f).abs() <= 1e-10);
            }
            // (x² + y²)z = z − z³ integrates to zero
            let d = avg(&c, |x| x[0] * x[0] * x[2]) + avg(&c, |x| x[1] * x[1] * x[2]);
            prop_assert!(d.abs() <= 1e-10);
            prop_assert!((avg(&c, |x| x[0] * x[0]) - avg(&c, |x| x[1] * x[1])).abs() <= 1e-10);
            for p in c.control_points() {
                prop_assert!((dot(p.coords(), p.coords()) - 1.0).abs() < 1e-14);
            }
        }

        #[test]
        fn smooth_norm_is_one(a in 0.0f64..1.0, s in 0.0f64..1.0, t in 1u32..4) {
            let c = smooth_s2(t, a).unwrap();
            prop_assert!((norm(&c.position(s)) - 1.0).abs() < 1e-12);
        }
    }
}
