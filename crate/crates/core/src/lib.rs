//! Dispersion interactions of metal nanoparticles, summed over macroscopic
//! geometries.
//!
//! The crate computes two- and three-body dispersion energies between small
//! Drude-metal spheres from frequency integrals over imaginary frequency,
//! then assembles macroscopic interactions by summing those pair and triplet
//! laws over filled half-spaces and slabs at close-packing density. Exact
//! reflection-coefficient results for the same geometries are implemented
//! independently, so every summed quantity has a closed-form cross-check.
//!
//! Everything runs in reduced units: `hbar = c = epsilon_0 = 1`, lengths in
//! one common unit, frequencies in inverse length. Every public energy comes
//! back as an [`EnergyResult`] carrying a dimensionless coefficient, a scale
//! tag describing the restoring factor, an error estimate, and evaluation
//! metadata. See `docs/derivations.md` for the closed forms and reductions
//! the implementation and its tests rely on.
//!
//! # Quickstart
//!
//! ```
//! use casimir_core::kernels::{u2_retarded, u3_retarded, Triangle};
//!
//! // Retarded pair energy of two unit-radius perfect-conductor spheres.
//! let pair = u2_retarded(1.0, 1.0).unwrap();
//! assert!((pair.coefficient + 23.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-12);
//!
//! // Equilateral triplets repel, collinear ones attract.
//! let eq = u3_retarded(1.0, &Triangle::new(1.0, 1.0, 1.0).unwrap()).unwrap();
//! let line = u3_retarded(1.0, &Triangle::new(1.0, 1.0, 2.0).unwrap()).unwrap();
//! assert!(eq.coefficient > 0.0 && line.coefficient < 0.0);
//!
//! // Pairwise sum over a half-space has a closed form.
//! let w2 = casimir_core::halfspace::w2_cp_analytic();
//! assert!((w2.coefficient + 69.0 / (160.0 * std::f64::consts::PI)).abs() < 1e-15);
//! ```

pub mod convergence;
pub mod halfspace;
pub mod kernels;
pub mod macroscopic;
pub mod material;
pub mod quadrature;
pub mod slabs;

pub use kernels::{EnergyResult, Regime, ScaleTag, Triangle};
pub use material::Material;
pub use quadrature::{IntegralResult, QuadratureSpec, Transform};

/// Library error type. Non-convergence of an integral is not an error; it is
/// reported through [`IntegralResult::converged`] and result metadata.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid material: {0}")]
    Material(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
