//! t-design verification and the worst-case integration error `‖L‖_t`.
//!
//! `verify_design` checks `(1/ℓ)∫_γ x^α = ∫_{S^d} x^α` monomial by monomial.
//! On `S²` the worst-case error over the unit ball of `Π_t` is computed two
//! ways: from harmonic moments of the curve ([`wce_moments`]) and from the
//! double integral of the Legendre kernel ([`wce_double_integral`]), which
//! only serves as an independent check.

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::harmonics::{harmonic_count, random_harmonic, HarmonicBasis};
use crate::poly::{legendre_all, monomial_basis, sphere_moment, MultiIndex};
use crate::quadrature::{GaussLegendre, QuadratureSpec};
use crate::sphere::{dot, GeodesicCycle};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

/// Default tolerance on the largest monomial residual.
pub const DESIGN_TOLERANCE: f64 = 1e-9;

/// Cycles with more arcs than this are refused by the O(n²) oracle.
pub const DOUBLE_INTEGRAL_MAX_ARCS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub degree: u32,
    #[serde(serialize_with = "residuals_by_exponent")]
    pub residuals: BTreeMap<MultiIndex, f64>,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub is_design: bool,
    pub length: f64,
}

fn residuals_by_exponent<S: Serializer>(
    map: &BTreeMap<MultiIndex, f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        m.serialize_entry(&k.to_string(), v)?;
    }
    m.end()
}

impl DesignReport {
    pub fn residual(&self, exponents: &[u32]) -> Option<f64> {
        self.residuals.get(&MultiIndex(exponents.to_vec())).copied()
    }
}

/// Normalized path integrals `(1/ℓ)∫_γ x^α` for every `α` with `|α| ≤ t`.
pub fn monomial_averages(
    curve: Curve<'_>,
    t: u32,
    quad: &QuadratureSpec,
) -> Result<(Vec<MultiIndex>, Vec<f64>, f64)> {
    let dim = curve.ambient_dim();
    let basis = monomial_basis(t, dim);
    let tmax = t as usize;
    let mut powers = vec![0.0; dim * (tmax + 1)];
    let integrals = curve.integrate_many(
        |p, out| {
            for (i, &xi) in p.iter().enumerate() {
                let row = &mut powers[i * (tmax + 1)..(i + 1) * (tmax + 1)];
                row[0] = 1.0;
                for e in 1..=tmax {
                    row[e] = row[e - 1] * xi;
                }
            }
            for (o, alpha) in out.iter_mut().zip(&basis) {
                *o = alpha
                    .exponents()
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| powers[i * (tmax + 1) + e as usize])
                    .product();
            }
        },
        basis.len(),
        quad,
    )?;
    // the zero multi-index comes first in lexicographic order
    let length = match curve {
        Curve::Geodesic(c) => c.length(),
        Curve::Smooth(_) => integrals[0],
    };
    if !(length > 0.0) {
        return Err(Error::ZeroLength);
    }
    let averages = integrals.iter().map(|v| v / length).collect();
    Ok((basis, averages, length))
}

/// Check the t-design identity on every monomial of degree `≤ t`.
pub fn verify_design(
    curve: Curve<'_>,
    t: u32,
    tol: f64,
    quad: &QuadratureSpec,
) -> Result<DesignReport> {
    let (basis, averages, length) = monomial_averages(curve, t, quad)?;
    let mut residuals = BTreeMap::new();
    let mut max_abs = 0.0f64;
    for (alpha, avg) in basis.into_iter().zip(averages) {
        let r = avg - sphere_moment(&alpha)?;
        max_abs = max_abs.max(r.abs());
        residuals.insert(alpha, r);
    }
    Ok(DesignReport {
        degree: t,
        residuals,
        max_abs_residual: max_abs,
        tolerance: tol,
        is_design: max_abs <= tol,
        length,
    })
}

/// Per-degree squared moments `Σ_m |(1/ℓ)∫_γ Y_{l,m}|²` for `l = 0..=t`.
pub fn harmonic_moment_terms(curve: Curve<'_>, t: usize, quad: &QuadratureSpec) -> Result<Vec<f64>> {
    if curve.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: curve.ambient_dim(),
        });
    }
    let basis = HarmonicBasis::new(t);
    let integrals = curve.integrate_many(|p, out| basis.eval_into(p, out), basis.len(), quad)?;
    let length = match curve {
        Curve::Geodesic(c) => c.length(),
        Curve::Smooth(_) => integrals[0],
    };
    Ok((0..=t)
        .map(|l| {
            integrals[l * l..(l + 1) * (l + 1)]
                .iter()
                .map(|v| (v / length).powi(2))
                .sum()
        })
        .collect())
}

/// `‖L‖_t` from the harmonic moments of the curve (requires `S²`).
pub fn wce_moments(curve: Curve<'_>, t: usize, quad: &QuadratureSpec) -> Result<f64> {
    let terms = harmonic_moment_terms(curve, t, quad)?;
    Ok(terms[1..].iter().sum::<f64>().sqrt())
}

/// Per-degree terms `(2l+1)/ℓ² ∫∫ P_l(⟨γ(r),γ(s)⟩) |γ̇(r)||γ̇(s)| dr ds`,
/// `l = 1..=t`, by tensor Gauss-Legendre on every pair of arcs.
pub fn wce_double_integral_terms(cycle: &GeodesicCycle, t: usize, nodes: usize) -> Result<Vec<f64>> {
    if cycle.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: cycle.ambient_dim(),
        });
    }
    if cycle.len() > DOUBLE_INTEGRAL_MAX_ARCS {
        return Err(Error::ParameterOutOfRange(format!(
            "double-integral oracle limited to {DOUBLE_INTEGRAL_MAX_ARCS} arcs, got {}",
            cycle.len()
        )));
    }
    let rule = GaussLegendre::new(nodes);
    // weighted sample points per arc: (point, ℓ_j w_k)
    let samples: Vec<Vec<([f64; 3], f64)>> = cycle
        .arcs()
        .iter()
        .map(|arc| {
            rule.nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&s, &w)| {
                    let mut p = [0.0; 3];
                    arc.eval_into(s, &mut p);
                    (p, w * arc.length())
                })
                .collect()
        })
        .collect();
    let mut terms = vec![0.0; t + 1];
    let mut pl = vec![0.0; t + 1];
    for a in &samples {
        for b in &samples {
            for (x, wx) in a {
                for (y, wy) in b {
                    let c = dot(x, y).clamp(-1.0, 1.0);
                    legendre_all(t, c, &mut pl);
                    let w = wx * wy;
                    for l in 1..=t {
                        terms[l] += w * pl[l];
                    }
                }
            }
        }
    }
    let ell2 = cycle.length().powi(2);
    Ok((1..=t)
        .map(|l| (2 * l + 1) as f64 * terms[l] / ell2)
        .collect())
}

/// `‖L‖_t` from the Legendre-kernel double integral.
pub fn wce_double_integral(cycle: &GeodesicCycle, t: usize) -> Result<f64> {
    let terms = wce_double_integral_terms(cycle, t, 32)?;
    Ok(terms.iter().sum::<f64>().max(0.0).sqrt())
}

/// Largest residual `|(1/N)Σ_j x_j^α − ∫ x^α|` of a point set over all
/// monomials of degree `≤ t`.
pub fn point_design_residual(points: &[crate::sphere::SpherePoint], t: u32) -> Result<f64> {
    let first = points.first().ok_or(Error::TooFewPoints(0))?;
    let dim = first.ambient_dim();
    let mut worst = 0.0f64;
    for alpha in monomial_basis(t, dim) {
        let mut avg = 0.0;
        for p in points {
            if p.ambient_dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.ambient_dim(),
                });
            }
            avg += alpha.eval(p.coords());
        }
        avg /= points.len() as f64;
        worst = worst.max((avg - sphere_moment(&alpha)?).abs());
    }
    Ok(worst)
}

/// Gram matrix `(1/ℓ)∫_γ Y_i Y_j` over all harmonics of degree `≤ t`.
fn curve_gram(curve: Curve<'_>, t: usize, quad: &QuadratureSpec) -> Result<Vec<f64>> {
    let basis = HarmonicBasis::new(t);
    let n = basis.len();
    let mut y = vec![0.0; n];
    let integrals = curve.integrate_many(
        |p, out| {
            basis.eval_into(p, &mut y);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = y[i] * y[j];
                }
            }
        },
        n * n,
        quad,
    )?;
    let length = integrals[0];
    Ok(integrals.into_iter().map(|v| v / length).collect())
}

/// For a `2t`-design curve on `S²`, the largest deviation of
/// `(1/ℓ)∫_γ |f|² / ‖f‖²_{L²}` from one over random `f ∈ Π_t`.
pub fn design_mz_identity(
    curve: Curve<'_>,
    t: usize,
    num_samples: usize,
    seed: u64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let required = 2 * t as u32;
    let report = verify_design(curve, required, DESIGN_TOLERANCE, quad)?;
    if !report.is_design {
        return Err(Error::NotADesign {
            required: required as usize,
            residual: report.max_abs_residual,
        });
    }
    let gram = curve_gram(curve, t, quad)?;
    let n = harmonic_count(t);
    let mut worst = 0.0f64;
    for k in 0..num_samples {
        let f = random_harmonic(t, sample_seed(seed, k as u64));
        worst = worst.max((quadratic_ratio(&gram, f.coeffs(), n) - 1.0).abs());
    }
    Ok(worst)
}

pub(crate) fn quadratic_ratio(gram: &[f64], c: &[f64], n: usize) -> f64 {
    let mut num = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| gram[i * n + j] * c[j]).sum();
        num += c[i] * row;
    }
    num / c.iter().map(|v| v * v).sum::<f64>()
}

/// Deterministic per-sample seed derived from `(seed, index)`.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SpherePoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn great_circle() -> GeodesicCycle {
        GeodesicCycle::from_coords(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
        ])
        .unwrap()
    }

    fn tetra_cycle() -> GeodesicCycle {
        GeodesicCycle::from_coords(&[
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ])
        .unwrap()
    }

    fn random_cycle(rng: &mut ChaCha8Rng, n: usize) -> GeodesicCycle {
        let pts: Vec<SpherePoint> = (0..n)
            .map(|_| {
                SpherePoint::new(vec![
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ])
                .unwrap()
            })
            .collect();
        GeodesicCycle::new(pts).unwrap()
    }

    #[test]
    fn great_circle_is_one_design_only() {
        let q = QuadratureSpec::default();
        let c = great_circle();
        let r = verify_design(Curve::Geodesic(&c), 1, DESIGN_TOLERANCE, &q).unwrap();
        assert!(r.is_design, "{}", r.max_abs_residual);
        assert!(r.residual(&[0, 0, 0]).unwrap().abs() < 1e-14);
        let r2 = verify_design(Curve::Geodesic(&c), 2, DESIGN_TOLERANCE, &q).unwrap();
        assert!(!r2.is_design);
        assert!(wce_moments(Curve::Geodesic(&c), 1, &q).unwrap() < 1e-10);
        // square root of a roundoff-sized sum
        assert!(wce_double_integral(&c, 1).unwrap() < 1e-7);
    }

    #[test]
    fn tetrahedron_cycle_is_a_one_design_but_not_two() {
        let q = QuadratureSpec::default();
        let c = tetra_cycle();
        let r = verify_design(Curve::Geodesic(&c), 1, DESIGN_TOLERANCE, &q).unwrap();
        assert!(r.is_design, "{}", r.max_abs_residual);
        let r = verify_design(Curve::Geodesic(&c), 2, DESIGN_TOLERANCE, &q).unwrap();
        assert!(!r.is_design);
        assert!(r.max_abs_residual > 1e-3);
    }

    #[test]
    fn report_json_keys_are_exponent_tuples() {
        let q = QuadratureSpec::default();
        let r = verify_design(Curve::Geodesic(&great_circle()), 1, DESIGN_TOLERANCE, &q).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert!(v["residuals"]["0,0,1"].is_number());
        assert_eq!(v["is_design"], true);
    }

    #[test]
    fn moments_match_double_integral_oracle() {
        let q = QuadratureSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..10 {
            let c = random_cycle(&mut rng, 6);
            let t = 1 + k % 4;
            let a = wce_moments(Curve::Geodesic(&c), t, &q).unwrap();
            let b = wce_double_integral(&c, t).unwrap();
            assert!((a - b).abs() < 1e-8, "t={t}: {a} vs {b}");
            for term in wce_double_integral_terms(&c, t, 32).unwrap() {
                assert!(term >= -1e-10);
            }
        }
    }

    #[test]
    fn wce_is_monotone_in_degree() {
        let q = QuadratureSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let c = random_cycle(&mut rng, 7);
            let mut last = 0.0;
            for t in 1..6 {
                let w = wce_moments(Curve::Geodesic(&c), t, &q).unwrap();
                assert!(last <= w + 1e-12);
                last = w;
            }
        }
    }

    #[test]
    fn design_at_t_implies_design_below() {
        let q = QuadratureSpec::default();
        let c = great_circle();
        // a great circle is also exact on all odd monomials of degree 3
        let r3 = verify_design(Curve::Geodesic(&c), 3, 1.0, &q).unwrap();
        let r1 = verify_design(Curve::Geodesic(&c), 1, 1.0, &q).unwrap();
        assert!(r1.max_abs_residual <= r3.max_abs_residual);
    }

    #[test]
    fn mz_identity_requires_a_2t_design() {
        let q = QuadratureSpec::default();
        let err = design_mz_identity(Curve::Geodesic(&great_circle()), 1, 10, 0, &q).unwrap_err();
        assert!(matches!(err, Error::NotADesign { required: 2, .. }));
        // t = 0 only needs a 0-design, and constants give ratio exactly one
        let dev = design_mz_identity(Curve::Geodesic(&tetra_cycle()), 0, 20, 5, &q).unwrap();
        assert!(dev < 1e-14);
    }

    #[test]
    fn double_integral_refuses_large_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_cycle(&mut rng, DOUBLE_INTEGRAL_MAX_ARCS + 1);
        assert!(wce_double_integral(&c, 2).is_err());
    }

    #[test]
    fn sample_seeds_differ() {
        let a: Vec<u64> = (0..100).map(|i| sample_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort();
        b.dedup();
        assert_eq!(a.len(), b.len());
    }
}
