//! Two parallel half-spaces of close-packed spheres separated by a gap `d`:
//! pairwise and triplet energies per unit area, and their comparison with
//! the ideal-mirror value. Coefficients are dimensionless on the
//! `hbar c/d^3` scale; the close-packing density makes them independent of
//! the sphere radius.

use crate::kernels::{EnergyResult, Regime, ResultMetadata, ScaleTag};
use crate::macroscopic::casimir_ideal_per_area;
use crate::quadrature::{integrate_adaptive_nd, QuadratureSpec};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Two half-spaces of close-packed radius-`rho` spheres with a vacuum gap
/// `d` between their faces.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SlabConfig {
    pub d: f64,
    pub rho: f64,
}

impl SlabConfig {
    pub fn new(d: f64, rho: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Geometry(format!("gap must be positive, got {d}")));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::Geometry(format!("sphere radius must be positive, got {rho}")));
        }
        Ok(SlabConfig { d, rho })
    }

    /// Close-packing number density `3/(4 pi rho^3)`.
    pub fn density(&self) -> f64 {
        3.0 / (4.0 * PI * self.rho.powi(3))
    }
}

/// Pairwise plate sum in closed form: `-69/(640 pi^2)` per unit area.
pub fn w2_per_area_analytic() -> EnergyResult {
    EnergyResult::closed_form(-69.0 / (640.0 * PI * PI), ScaleTag::HbarCOverD3, Regime::Retarded)
}

/// Pairwise plate sum by 2D quadrature. The four in-plane coordinates are
/// integrated out analytically (`int d^2s (s^2+h^2)^(-7/2) = 2 pi/(5 h^5)`),
/// leaving the two slab depths, each mapped to `[0,1)` by `z = d t/(1-t)`.
/// Computed at the configured geometry and rescaled, which doubles as a
/// check that the coefficient is geometry-free (`rho^6 N^2` is a pure
/// number at close packing).
pub fn w2_per_area_numeric(cfg: &SlabConfig, quad: &QuadratureSpec) -> Result<EnergyResult> {
    let d = cfg.d;
    let n = cfg.density();
    let prefactor = -23.0 * cfg.rho.powi(6) * n * n / 10.0;
    let integral = integrate_adaptive_nd(
        |u| {
            let (t1, t2) = (u[0], u[1]);
            if t1 >= 1.0 || t2 >= 1.0 {
                return 0.0;
            }
            let z1 = -d * t1 / (1.0 - t1);
            let z2 = d + d * t2 / (1.0 - t2);
            let jac = d / ((1.0 - t1) * (1.0 - t1)) * d / ((1.0 - t2) * (1.0 - t2));
            let val = jac / (z2 - z1).powi(5);
            if val.is_finite() {
                val
            } else {
                0.0
            }
        },
        &[(0.0, 1.0), (0.0, 1.0)],
        quad,
    )?;
    Ok(EnergyResult {
        coefficient: prefactor * integral.value * d.powi(3),
        scale: ScaleTag::HbarCOverD3,
        error_estimate: prefactor.abs() * integral.error_estimate * d.powi(3),
        metadata: ResultMetadata {
            regime: Regime::Retarded,
            converged: integral.converged,
            evaluations: integral.evaluations,
            warnings: Vec::new(),
        },
    })
}

/// Triplet plate sum in closed form, `111/(896 pi^2)` per unit area, from
/// the exact particle/half-space triplet coefficient.
pub fn w3_per_area_exact() -> EnergyResult {
    EnergyResult::closed_form(111.0 / (896.0 * PI * PI), ScaleTag::HbarCOverD3, Regime::Retarded)
}

/// Triplet plate sum from a particle/half-space triplet coefficient `C`
/// (exact or numerically extrapolated): integrating `C rho^3/z^4` over the
/// minority particle's depth for both mixed configurations gives `C/(2 pi)`
/// per unit area. Error, convergence and warnings carry over.
pub fn w3_per_area_from_cp(cp: &EnergyResult) -> Result<EnergyResult> {
    if cp.scale != ScaleTag::HbarCRho3OverD4 {
        return Err(Error::InvalidInput(format!(
            "triplet plate sum needs a particle/half-space coefficient, got scale {}",
            cp.scale
        )));
    }
    Ok(EnergyResult {
        coefficient: cp.coefficient / (2.0 * PI),
        scale: ScaleTag::HbarCOverD3,
        error_estimate: cp.error_estimate / (2.0 * PI),
        metadata: cp.metadata.clone(),
    })
}

/// `w2_per_area / casimir_ideal`: the share of the ideal-mirror energy the
/// pairwise sum reproduces, `621/(8 pi^4) = 0.7969...`.
pub fn pairwise_fraction() -> f64 {
    w2_per_area_analytic().coefficient / casimir_ideal_per_area().coefficient
}

/// `|w3| / |w2| = 185/161`: the triplet term is slightly larger than the
/// pairwise one (and opposite in sign).
pub fn triplet_to_pair_ratio() -> f64 {
    (w3_per_area_exact().coefficient / w2_per_area_analytic().coefficient).abs()
}

/// `(w2 + w3) / casimir_ideal = -81/(7 pi^4)`: the two-plus-three-body
/// partial sum overshoots into net repulsion, so truncating the many-body
/// series at third order is not a usable approximation of the total.
pub fn partial_sum_vs_ideal() -> f64 {
    (w2_per_area_analytic().coefficient + w3_per_area_exact().coefficient)
        / casimir_ideal_per_area().coefficient
}

/// Everything the plate geometry yields, in one record.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SlabSummary {
    pub w2_per_area: f64,
    pub w3_per_area: f64,
    pub partial_sum: f64,
    pub casimir_ideal: f64,
    pub pairwise_fraction: f64,
    pub triplet_to_pair_ratio: f64,
    pub partial_sum_vs_ideal: f64,
}

pub fn summary() -> SlabSummary {
    let w2 = w2_per_area_analytic().coefficient;
    let w3 = w3_per_area_exact().coefficient;
    let ideal = casimir_ideal_per_area().coefficient;
    SlabSummary {
        w2_per_area: w2,
        w3_per_area: w3,
        partial_sum: w2 + w3,
        casimir_ideal: ideal,
        pairwise_fraction: w2 / ideal,
        triplet_to_pair_ratio: (w3 / w2).abs(),
        partial_sum_vs_ideal: (w2 + w3) / ideal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_values() {
        assert_relative_eq!(w2_per_area_analytic().coefficient, -0.010_923_7, max_relative = 1e-5);
        assert_relative_eq!(w3_per_area_exact().coefficient, 0.012_552_1, max_relative = 1e-5);
    }

    #[test]
    fn numeric_matches_closed_form_independent_of_geometry() {
        let quad = QuadratureSpec::default().with_rel_tol(1e-9);
        for (d, rho) in [(1.0, 1.0), (2.5, 0.3), (0.04, 0.002)] {
            let cfg = SlabConfig::new(d, rho).unwrap();
            let w = w2_per_area_numeric(&cfg, &quad).unwrap();
            assert!(w.metadata.converged);
            assert_relative_eq!(
                w.coefficient,
                w2_per_area_analytic().coefficient,
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn triplet_from_exact_cp_coefficient() {
        let cp = EnergyResult::closed_form(
            111.0 / (448.0 * PI),
            ScaleTag::HbarCRho3OverD4,
            Regime::Retarded,
        );
        let w3 = w3_per_area_from_cp(&cp).unwrap();
        assert_relative_eq!(w3.coefficient, w3_per_area_exact().coefficient, max_relative = 1e-14);
        assert!(w3_per_area_from_cp(&w3).is_err());
    }

    #[test]
    fn ratios() {
        let pi4 = PI.powi(4);
        assert_relative_eq!(pairwise_fraction(), 621.0 / (8.0 * pi4), max_relative = 1e-13);
        assert_relative_eq!(pairwise_fraction(), 0.796_897, max_relative = 1e-6);
        assert_relative_eq!(triplet_to_pair_ratio(), 185.0 / 161.0, max_relative = 1e-13);
        assert_relative_eq!(partial_sum_vs_ideal(), -81.0 / (7.0 * pi4), max_relative = 1e-12);
        assert_relative_eq!(partial_sum_vs_ideal(), -0.118_792, max_relative = 1e-5);
        let s = summary();
        assert!(s.partial_sum > 0.0 && s.casimir_ideal < 0.0);
        assert_relative_eq!(s.partial_sum_vs_ideal, partial_sum_vs_ideal());
    }
}
