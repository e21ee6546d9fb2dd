//! Monomials on the sphere: Legendre polynomials, exact moments and the
//! monomial basis of `Π_t` used for design verification.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Legendre polynomial `P_l(x)` normalized by `P_l(1) = 1`.
pub fn legendre_eval(l: usize, x: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..l {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// All Legendre values `P_0(x), …, P_t(x)`.
pub fn legendre_all(t: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if t >= 1 {
        out[1] = x;
    }
    for k in 1..t {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Exponent vector of a monomial `x_0^{a_0} ⋯ x_d^{a_d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self(vec![0; ambient_dim])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn has_odd_exponent(&self) -> bool {
        self.0.iter().any(|e| e % 2 == 1)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Normalized-measure moment `∫_{S^d} x^α` with `d = alpha.len() - 1`.
///
/// Odd multi-indices return exactly zero. For `α = 2β` the moment is
/// `∏ (2β_i − 1)!! / ∏_{k<|β|} (d + 1 + 2k)`, accumulated as a product of
/// paired ratios so that nothing overflows for large degrees.
pub fn sphere_moment(alpha: &MultiIndex) -> Result<f64> {
    let ambient = alpha.ambient_dim();
    if ambient < 3 {
        return Err(Error::DimensionTooSmall(ambient));
    }
    if alpha.has_odd_exponent() {
        return Ok(0.0);
    }
    let mut numer: Vec<f64> = Vec::new();
    for &e in alpha.exponents() {
        for k in 1..=(e / 2) {
            numer.push((2 * k - 1) as f64);
        }
    }
    let half_degree = numer.len();
    let mut value = 1.0;
    for (k, n) in numer.into_iter().enumerate() {
        value *= n / (ambient as f64 + 2.0 * k as f64);
    }
    debug_assert_eq!(half_degree as u32 * 2, alpha.degree());
    Ok(value)
}

/// All multi-indices of total degree `≤ t` in `ambient_dim` variables, in
/// lexicographic order.
pub fn monomial_basis(t: u32, ambient_dim: usize) -> Vec<MultiIndex> {
    fn rec(pos: usize, remaining: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos == cur.len() {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for e in 0..=remaining {
            cur[pos] = e;
            rec(pos + 1, remaining - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; ambient_dim];
    rec(0, t, &mut cur, &mut out);
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Polynomial in monomial form with merged coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialPolynomial {
    terms: Vec<(MultiIndex, f64)>,
    degree: u32,
}

impl MonomialPolynomial {
    pub fn new(terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut merged: Vec<(MultiIndex, f64)> = Vec::new();
        let mut dim = None;
        for (idx, c) in terms {
            match dim {
                None => dim = Some(idx.ambient_dim()),
                Some(d) if d != idx.ambient_dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: idx.ambient_dim(),
                    })
                }
                _ => {}
            }
            if let Some(slot) = merged.iter_mut().find(|(m, _)| *m == idx) {
                slot.1 += c;
            } else {
                merged.push((idx, c));
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        let degree = merged.iter().map(|(m, _)| m.degree()).max().unwrap_or(0);
        Ok(Self {
            terms: merged,
            degree,
        })
    }

    pub fn terms(&self) -> &[(MultiIndex, f64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    pub fn sphere_integral(&self) -> Result<f64> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            total += c * sphere_moment(m)?;
        }
        Ok(total)
    }
}
