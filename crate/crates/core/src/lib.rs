//! Spherical t-design curves.
//!
//! Geodesic cycles and smooth closed curves on `S^d` whose normalized path
//! integral reproduces the sphere average of every polynomial of degree `≤ t`,
//! together with the numerical machinery to find, certify and use them:
//!
//! - [`sphere`] and [`curve`]: geometry, path integrals, Gauss-Bonnet areas.
//! - [`poly`] and [`harmonics`]: exact sphere moments, real spherical harmonics.
//! - [`design`]: monomial residuals and the worst-case error `‖L‖_t`.
//! - [`families`]: the explicit curve families and Platonic Hamiltonian cycles.
//! - [`beautify`]: parameter equations and certified roots.
//! - [`optimizer`]: projected gradient descent on control points.
//! - [`mz`]: Marcinkiewicz-Zygmund cycles built from equal-area partitions.
//! - [`cli`]: the `geocycle` command-line tool.

pub mod beautify;
pub mod cli;
pub mod curve;
pub mod design;
pub mod error;
pub mod families;
pub mod harmonics;
pub mod mz;
pub mod optimizer;
pub mod poly;
pub mod quadrature;
pub mod sphere;

pub use error::{Error, Result};
