//! Fully retarded particle/half-space energy from the macroscopic
//! (reflection-coefficient) route, and its expansion in the reduced density
//! `x = alpha N / eps0`. Order `x^n` of the expansion isolates the n-body
//! term of the microscopic sum, which is how the two routes cross-validate.
//!
//! Coefficients are dimensionless on the `hbar c rho^3/d^4` scale.

use crate::kernels::{EnergyResult, Regime, ResultMetadata, ScaleTag};
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Half-space permittivity (static value; the geometry is fully retarded so
/// only the zero-frequency response enters).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Permittivity {
    Finite(f64),
    Infinite,
}

/// Clausius-Mossotti closure `(eps-1)/(eps+2) = x/3`:
/// `eps(x) = (3 + 2x)/(3 - x)`. `x = 3` (close packing of unit reduced
/// polarizability) maps to an infinite permittivity. Domain `-3/2 < x <= 3`
/// keeps the permittivity positive; small negative values are admitted so
/// central finite differences around `x = 0` stay in-domain.
pub fn epsilon_from_density(x: f64) -> Result<Permittivity> {
    if !x.is_finite() || x <= -1.5 || x > 3.0 {
        return Err(Error::InvalidInput(format!(
            "reduced density must lie in (-3/2, 3], got {x}"
        )));
    }
    if x == 3.0 {
        Ok(Permittivity::Infinite)
    } else {
        Ok(Permittivity::Finite((3.0 + 2.0 * x) / (3.0 - x)))
    }
}

fn integrand(eps: f64, v: f64) -> f64 {
    let s = (eps - 1.0 + v * v).sqrt();
    let r_p = (eps * v - s) / (eps * v + s);
    let r_s = (v - s) / (v + s);
    let v2 = v * v;
    let v4 = v2 * v2;
    (2.0 / v2 - 1.0 / v4) * r_p - r_s / v4
}

/// Energy coefficient of a unit-reduced-polarizability sphere facing a
/// half-space of permittivity `eps`:
/// `-(3/(16 pi)) int_1^inf dv [(2/v^2 - 1/v^4) r_p - (1/v^4) r_s]`.
/// The ideal-mirror limit is handled in closed form (`-3/(8 pi)`).
pub fn w_total(eps: Permittivity, quad: &QuadratureSpec) -> Result<EnergyResult> {
    match eps {
        Permittivity::Infinite => Ok(EnergyResult::closed_form(
            -3.0 / (8.0 * PI),
            ScaleTag::HbarCRho3OverD4,
            Regime::Retarded,
        )),
        Permittivity::Finite(e) => {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidInput(format!("permittivity must be positive, got {e}")));
            }
            let integral = integrate_semi_infinite(|x| integrand(e, 1.0 + x), quad)?;
            let scale = 3.0 / (16.0 * PI);
            Ok(EnergyResult {
                coefficient: -scale * integral.value,
                scale: ScaleTag::HbarCRho3OverD4,
                error_estimate: scale * integral.error_estimate,
                metadata: ResultMetadata {
                    regime: Regime::Retarded,
                    converged: integral.converged,
                    evaluations: integral.evaluations,
                    warnings: Vec::new(),
                },
            })
        }
    }
}

/// Exact expansion coefficients of `w_total(eps(x))` at close packing:
/// order 1 gives `-69/(160 pi)` (the pairwise half-space sum), order 2
/// gives `+111/(448 pi)` (the triplet sum).
pub fn many_body_coefficient_exact(order: u32) -> Result<f64> {
    match order {
        1 => Ok(-69.0 / (160.0 * PI)),
        2 => Ok(111.0 / (448.0 * PI)),
        _ => Err(Error::InvalidInput(format!("only orders 1 and 2 are tabulated, got {order}"))),
    }
}

const FD_STEPS: [f64; 2] = [1e-3, 1e-4];

/// n-body coefficient extracted numerically: central finite differences of
/// `w_total(eps(x))` in `x` at 0, two step sizes Richardson-combined
/// against the even-power error series, then evaluated at `x = 3`. The
/// differencing needs function values far below the step-cancellation
/// level, so pass a tight quadrature spec (relative 1e-12 or so).
pub fn many_body_coefficient(order: u32, quad: &QuadratureSpec) -> Result<EnergyResult> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidInput(format!("only orders 1 and 2 are supported, got {order}")));
    }
    let w = |x: f64| -> Result<(f64, f64, u64)> {
        let r = w_total(epsilon_from_density(x)?, quad)?;
        if !r.metadata.converged {
            return Err(Error::InvalidInput(format!(
                "reflection integral did not converge at density {x}"
            )));
        }
        Ok((r.coefficient, r.error_estimate, r.metadata.evaluations))
    };
    let mut derivs = [0.0; 2];
    let mut noise = [0.0; 2];
    let mut evaluations = 0;
    for (i, &h) in FD_STEPS.iter().enumerate() {
        let (wp, ep, np) = w(h)?;
        let (wm, em, nm) = w(-h)?;
        evaluations += np + nm;
        if order == 1 {
            derivs[i] = (wp - wm) / (2.0 * h);
            noise[i] = (ep + em) / (2.0 * h);
        } else {
            let (w0, e0, n0) = w(0.0)?;
            evaluations += n0;
            derivs[i] = (wp - 2.0 * w0 + wm) / (h * h);
            noise[i] = (ep + 2.0 * e0 + em) / (h * h);
        }
    }
    // Central differences err in even powers of h; with steps h and h/10
    // one elimination leaves O(h^4).
    let ratio2 = (FD_STEPS[1] / FD_STEPS[0]).powi(2);
    let correction = (derivs[1] - derivs[0]) * ratio2 / (1.0 - ratio2);
    let derivative = derivs[1] + correction;
    // d^n W / dx^n at 0 over n! times x^n at x = 3; n! cancels for n = 1,
    // halves for n = 2, and 3^n restores the close-packing value.
    let at_packing = match order {
        1 => derivative * 3.0,
        _ => derivative / 2.0 * 9.0,
    };
    let error_scale = match order {
        1 => 3.0,
        _ => 4.5,
    };
    Ok(EnergyResult {
        coefficient: at_packing,
        scale: ScaleTag::HbarCRho3OverD4,
        error_estimate: error_scale * (correction.abs() + noise[1]),
        metadata: ResultMetadata {
            regime: Regime::Retarded,
            converged: true,
            evaluations,
            warnings: Vec::new(),
        },
    })
}

/// Order-1 coefficient by direct integration of the density-linearized
/// integrand `(2v^4 - 2v^2 + 1)/(2 v^6)`, an independent check on the
/// finite-difference path (the two must agree to quadrature accuracy).
pub fn many_body_order1_linearized(quad: &QuadratureSpec) -> Result<EnergyResult> {
    let integral = integrate_semi_infinite(
        |x| {
            let v = 1.0 + x;
            let v2 = v * v;
            (2.0 * v2 * v2 - 2.0 * v2 + 1.0) / (2.0 * v2 * v2 * v2)
        },
        quad,
    )?;
    let scale = 3.0 / (16.0 * PI) * 3.0;
    Ok(EnergyResult {
        coefficient: -scale * integral.value,
        scale: ScaleTag::HbarCRho3OverD4,
        error_estimate: scale * integral.error_estimate,
        metadata: ResultMetadata {
            regime: Regime::Retarded,
            converged: integral.converged,
            evaluations: integral.evaluations,
            warnings: Vec::new(),
        },
    })
}

/// Ideal-mirror plate/plate energy per unit area, `-pi^2/720` on the
/// `hbar c/d^3` scale. Reference value for the slab ratios.
pub fn casimir_ideal_per_area() -> EnergyResult {
    EnergyResult::closed_form(-PI * PI / 720.0, ScaleTag::HbarCOverD3, Regime::Retarded)
}

/// The two-plus-three-body partial sum next to the all-orders total, on the
/// `hbar c rho^3/d^4` scale. The residual (four-body and up, plus
/// close-packing corrections beyond the dilute closure) is a result in its
/// own right: it shows how non-additive the dense system is.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct PartialSumReport {
    pub order1: f64,
    pub order2: f64,
    pub partial_sum: f64,
    pub total: f64,
    pub residual: f64,
}

pub fn partial_sum_report() -> PartialSumReport {
    let order1 = -69.0 / (160.0 * PI);
    let order2 = 111.0 / (448.0 * PI);
    let total = -3.0 / (8.0 * PI);
    PartialSumReport {
        order1,
        order2,
        partial_sum: order1 + order2,
        total,
        residual: total - (order1 + order2),
    }
}
