//! Two- and three-body dispersion energies of small metal spheres, as
//! frequency integrals plus their short- and long-distance closed forms.
//!
//! Conventions: reduced units (`hbar = c = eps0 = 1`, lengths in metres).
//! Ops returning an [`EnergyResult`] put the fully evaluated reduced-unit
//! energy in `coefficient` with scale [`ScaleTag::ReducedEnergy`]; the
//! geometry-summed modules instead return a dimensionless coefficient with
//! the scale it multiplies.

use crate::material::Material;
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};
use crate::{Error, Result};
use std::f64::consts::PI;

/// What the `coefficient` of an [`EnergyResult`] multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleTag {
    /// The value is already a reduced-unit energy (lengths in metres).
    ReducedEnergy,
    /// Particle/half-space coefficient, multiplies `hbar c rho^3 / d^4`.
    HbarCRho3OverD4,
    /// Per-unit-area plate coefficient, multiplies `hbar c / d^3`.
    HbarCOverD3,
    /// Pure number.
    Dimensionless,
}

impl std::fmt::Display for ScaleTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScaleTag::ReducedEnergy => "hbar*c/m",
            ScaleTag::HbarCRho3OverD4 => "hbar*c*rho^3/d^4",
            ScaleTag::HbarCOverD3 => "hbar*c/d^3",
            ScaleTag::Dimensionless => "1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NonRetarded,
    Retarded,
    FullIntegral,
}

/// How the caller wants the distance regime chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeRequest {
    Auto,
    NonRetarded,
    Retarded,
    Full,
}

/// Window edges for automatic regime selection, in units of the plasma
/// wavelength. Distances below `nonretarded_max * lambda_p` use the
/// short-distance form, above `retarded_min * lambda_p` the long-distance
/// one, the full integral otherwise.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct RegimeThresholds {
    pub nonretarded_max: f64,
    pub retarded_min: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds { nonretarded_max: 0.02, retarded_min: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// `gamma/omega_p > 0.1`: the first-order damping expansion inside the
    /// short-distance closed form is dubious.
    DampingSeriesValidity,
    /// A closed-form limit was forced outside its distance window.
    OutsideIntendedRegime,
    /// Ladder differences are not shrinking; the extrapolated value is suspect.
    ExtrapolationUnstable,
    /// Lattice truncation tail exceeds 1% of the sum it corrects.
    TailTruncation,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Warning::DampingSeriesValidity => {
                "damping is large relative to the plasma frequency; the first-order closed form may be inaccurate"
            }
            Warning::OutsideIntendedRegime => {
                "closed-form limit evaluated outside its distance window; prefer the full integral"
            }
            Warning::ExtrapolationUnstable => {
                "extrapolation ladder differences are not shrinking; the limit value is unreliable"
            }
            Warning::TailTruncation => {
                "lattice truncation tail exceeds 1% of the sum; increase the extent"
            }
        })
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ResultMetadata {
    pub regime: Regime,
    pub converged: bool,
    pub evaluations: u64,
    pub warnings: Vec<Warning>,
}

impl ResultMetadata {
    pub fn closed_form(regime: Regime) -> Self {
        ResultMetadata { regime, converged: true, evaluations: 0, warnings: Vec::new() }
    }
}

/// An energy (or energy coefficient) with an honest error estimate and the
/// provenance needed to judge it.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EnergyResult {
    pub coefficient: f64,
    pub scale: ScaleTag,
    pub error_estimate: f64,
    pub metadata: ResultMetadata,
}

impl EnergyResult {
    pub fn closed_form(coefficient: f64, scale: ScaleTag, regime: Regime) -> Self {
        EnergyResult {
            coefficient,
            scale,
            error_estimate: 0.0,
            metadata: ResultMetadata::closed_form(regime),
        }
    }

    pub fn with_warning(mut self, warning: Warning) -> Self {
        self.metadata.warnings.push(warning);
        self
    }
}

/// Law-of-cosines angle cosines (opposite sides `a`, `b`, `c` in that
/// order), clamped to `[-1, 1]` against roundoff on thin triangles.
pub fn triangle_cosines(a: f64, b: f64, c: f64) -> [f64; 3] {
    let cos = |opp: f64, s1: f64, s2: f64| {
        ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0)
    };
    [cos(a, b, c), cos(b, c, a), cos(c, a, b)]
}

/// Three side lengths satisfying the weak triangle inequality (degenerate
/// collinear configurations are allowed).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Triangle {
    a: f64,
    b: f64,
    c: f64,
}

impl Triangle {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for s in [a, b, c] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Geometry(format!("triangle sides must be positive, got {a}, {b}, {c}")));
            }
        }
        if a > b + c || b > c + a || c > a + b {
            return Err(Error::Geometry(format!("sides {a}, {b}, {c} violate the triangle inequality")));
        }
        Ok(Triangle { a, b, c })
    }

    pub fn equilateral(s: f64) -> Result<Self> {
        Triangle::new(s, s, s)
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn cos_angles(&self) -> [f64; 3] {
        triangle_cosines(self.a, self.b, self.c)
    }

    pub fn max_side(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }

    pub fn min_side(&self) -> f64 {
        self.a.min(self.b).min(self.c)
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Triangle::new(self.a * k, self.b * k, self.c * k)
    }
}

/// Two-body frequency kernel `e^(-2x) (3 + 6x + 5x^2 + 2x^3 + x^4)`.
/// `g2(0) = 3`; integrates to 23/4 over `[0, inf)`.
pub fn g2(x: f64) -> f64 {
    (-2.0 * x).exp() * (3.0 + x * (6.0 + x * (5.0 + x * (2.0 + x))))
}

/// Three-body frequency kernel. Arguments are the three scaled side lengths
/// `(a xi, b xi, c xi)` and the angle cosines of the triangle (opposite the
/// respective sides). `g3(0,0,0) = 3 (1 + 3 cosA cosB cosC)`.
pub fn g3(x: f64, y: f64, z: f64, cos_angles: [f64; 3]) -> f64 {
    let f = |t: f64| 1.0 + t * (1.0 + t);
    let g = |t: f64| 3.0 + t * (3.0 + t);
    let [ca, cb, cc] = cos_angles;
    let (fx, fy, fz) = (f(x), f(y), f(z));
    let (gx, gy, gz) = (g(x), g(y), g(z));
    (-(x + y + z)).exp()
        * (3.0 * fx * fy * fz - gx * fy * fz - fx * gy * fz - fx * fy * gz
            + fx * gy * gz * ca * ca
            + gx * fy * gz * cb * cb
            + gx * gy * fz * cc * cc
            + gx * gy * gz * ca * cb * cc)
}

/// Long-distance three-body geometric factor `f(a,b,c)`, scaling as
/// length^-10. No validation: callers guarantee a weak triangle. Returns 0
/// when the `1/(a^3 b^3 c^3 (a+b+c))` denominator overflows.
pub fn retarded_triplet_factor(a: f64, b: f64, c: f64) -> f64 {
    let s1 = a + b + c;
    let r2 = (a * a + b * b + c * c) / (s1 * s1);
    let r3 = (a * a * a + b * b * b + c * c * c) / (s1 * s1 * s1);
    let f1 = 9.0 + r2 * (-39.0 + 54.0 * r2) + r3 * (22.0 - 65.0 * r2 + 20.0 * r3);
    let f3 = 1.0 + r2 * (39.0 - 72.0 * r2) + r3 * (-17.0 + 75.0 * r2 - 20.0 * r3);
    let f2 = |p: f64, q: f64, r: f64| {
        3.0 * (p * p / (s1 * s1)
            + 3.0 * p * p * (q + r) / (s1 * s1 * s1)
            + 4.0 * q * r * (3.0 * p * p - q * r) / s1.powi(4)
            - 20.0 * p * q * q * r * r / s1.powi(5))
    };
    let [ca, cb, cc] = triangle_cosines(a, b, c);
    let bracket = f1
        + f2(a, b, c) * ca * ca
        + f2(b, c, a) * cb * cb
        + f2(c, a, b) * cc * cc
        + f3 * ca * cb * cc;
    let denom = a.powi(3) * b.powi(3) * c.powi(3) * s1;
    if denom.is_finite() {
        bracket / denom
    } else {
        0.0
    }
}

fn check_distance(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidInput(format!("separation must be positive, got {r}")));
    }
    Ok(())
}

fn drude_params(m: &Material, what: &str) -> Result<(f64, f64)> {
    match *m {
        Material::Drude { omega_p, gamma, .. } => Ok((omega_p, gamma)),
        Material::PerfectConductor { .. } => Err(Error::Material(format!(
            "{what} needs a finite plasma frequency; the ideal metal has no short-distance limit"
        ))),
    }
}

/// Short-distance pair energy, first order in the damping:
/// `-(sqrt3/4) (omega_p - 2 sqrt3 gamma/pi) rho^6/r^6`. The error estimate
/// covers the truncated damping series only, not the neglected retardation.
pub fn u2_nonretarded(m: &Material, r: f64) -> Result<EnergyResult> {
    check_distance(r)?;
    let (omega_p, gamma) = drude_params(m, "the short-distance pair form")?;
    let rho = m.radius();
    let geom = rho.powi(6) / r.powi(6);
    let coefficient = -(3f64.sqrt() / 4.0) * (omega_p - 2.0 * 3f64.sqrt() * gamma / PI) * geom;
    let mut out = EnergyResult::closed_form(coefficient, ScaleTag::ReducedEnergy, Regime::NonRetarded);
    out.error_estimate = (3f64.sqrt() / 4.0) * omega_p * geom * m.damping_ratio().powi(2);
    if m.damping_ratio() > 0.1 {
        out = out.with_warning(Warning::DampingSeriesValidity);
    }
    Ok(out)
}

/// Long-distance pair energy `-(23/(4 pi)) rho^6/r^7`. Material-independent
/// because every metal's reduced polarizability is 1 at zero frequency.
pub fn u2_retarded(rho: f64, r: f64) -> Result<EnergyResult> {
    check_distance(r)?;
    check_distance(rho)?;
    let coefficient = -(23.0 / (4.0 * PI)) * rho.powi(6) / r.powi(7);
    Ok(EnergyResult::closed_form(coefficient, ScaleTag::ReducedEnergy, Regime::Retarded))
}

/// Pair energy by direct frequency integration,
/// `-(1/pi)(rho^6/r^7) int_0^inf alpha~(u/r)^2 g2(u) du` (integrated in the
/// dimensionless variable `u = xi r` so the kernel scale never degenerates).
/// Exact in the damping; for the ideal metal it reproduces the
/// long-distance closed form identically.
pub fn u2_full(m: &Material, r: f64, quad: &QuadratureSpec) -> Result<EnergyResult> {
    check_distance(r)?;
    let rho = m.radius();
    let integral = integrate_semi_infinite(
        |u| {
            let a = m.reduced_polarizability(u / r).unwrap_or(0.0);
            a * a * g2(u)
        },
        quad,
    )?;
    let scale = rho.powi(6) / (PI * r.powi(7));
    Ok(EnergyResult {
        coefficient: -scale * integral.value,
        scale: ScaleTag::ReducedEnergy,
        error_estimate: scale * integral.error_estimate,
        metadata: ResultMetadata {
            regime: Regime::FullIntegral,
            converged: integral.converged,
            evaluations: integral.evaluations,
            warnings: Vec::new(),
        },
    })
}

/// Short-distance triplet energy, first order in the damping:
/// `(3 sqrt3/16)(omega_p - 8 sqrt3 gamma/(3 pi)) (1 + 3 cosA cosB cosC)
/// rho^9/(a^3 b^3 c^3)`. Positive (repulsive) for fat triangles, negative
/// near collinear ones.
pub fn u3_nonretarded(m: &Material, t: &Triangle) -> Result<EnergyResult> {
    let (omega_p, gamma) = drude_params(m, "the short-distance triplet form")?;
    let rho = m.radius();
    let [a, b, c] = t.sides();
    let [ca, cb, cc] = t.cos_angles();
    let geom = (1.0 + 3.0 * ca * cb * cc) * rho.powi(9) / (a * b * c).powi(3);
    let coefficient =
        (3.0 * 3f64.sqrt() / 16.0) * (omega_p - 8.0 * 3f64.sqrt() * gamma / (3.0 * PI)) * geom;
    let mut out = EnergyResult::closed_form(coefficient, ScaleTag::ReducedEnergy, Regime::NonRetarded);
    out.error_estimate =
        (3.0 * 3f64.sqrt() / 16.0) * omega_p * geom.abs() * m.damping_ratio().powi(2);
    if m.damping_ratio() > 0.1 {
        out = out.with_warning(Warning::DampingSeriesValidity);
    }
    Ok(out)
}

/// Long-distance triplet energy `(4/pi) rho^9 f(a,b,c)` with the closed-form
/// geometric factor. Material-independent, exact for the ideal metal.
pub fn u3_retarded(rho: f64, t: &Triangle) -> Result<EnergyResult> {
    check_distance(rho)?;
    let [a, b, c] = t.sides();
    let coefficient = (4.0 / PI) * rho.powi(9) * retarded_triplet_factor(a, b, c);
    Ok(EnergyResult::closed_form(coefficient, ScaleTag::ReducedEnergy, Regime::Retarded))
}

/// Triplet energy by direct frequency integration,
/// `(1/pi)(rho^9/(a^3 b^3 c^3)) int alpha~^3 g3(a xi, b xi, c xi) dxi`,
/// integrated in `u = (a+b+c) xi`.
pub fn u3_full(m: &Material, t: &Triangle, quad: &QuadratureSpec) -> Result<EnergyResult> {
    let rho = m.radius();
    let [a, b, c] = t.sides();
    let cos_angles = t.cos_angles();
    let s1 = a + b + c;
    let integral = integrate_semi_infinite(
        |u| {
            let alpha = m.reduced_polarizability(u / s1).unwrap_or(0.0);
            alpha.powi(3) * g3(a * u / s1, b * u / s1, c * u / s1, cos_angles)
        },
        quad,
    )?;
    let scale = rho.powi(9) / (PI * (a * b * c).powi(3) * s1);
    Ok(EnergyResult {
        coefficient: scale * integral.value,
        scale: ScaleTag::ReducedEnergy,
        error_estimate: scale * integral.error_estimate,
        metadata: ResultMetadata {
            regime: Regime::FullIntegral,
            converged: integral.converged,
            evaluations: integral.evaluations,
            warnings: Vec::new(),
        },
    })
}

fn resolve_regime(
    m: &Material,
    shortest: f64,
    longest: f64,
    request: RegimeRequest,
    thresholds: &RegimeThresholds,
) -> (Regime, bool) {
    let lambda_p = m.plasma_wavelength();
    match request {
        RegimeRequest::Full => (Regime::FullIntegral, false),
        RegimeRequest::NonRetarded => {
            let outside = m.is_perfect_conductor() || longest >= thresholds.nonretarded_max * lambda_p;
            (Regime::NonRetarded, outside)
        }
        RegimeRequest::Retarded => {
            let outside =
                !m.is_perfect_conductor() && shortest <= thresholds.retarded_min * lambda_p;
            (Regime::Retarded, outside)
        }
        RegimeRequest::Auto => {
            if m.is_perfect_conductor() {
                // alpha~ == 1 makes the long-distance form exact at every r.
                (Regime::Retarded, false)
            } else if longest < thresholds.nonretarded_max * lambda_p {
                (Regime::NonRetarded, false)
            } else if shortest > thresholds.retarded_min * lambda_p {
                (Regime::Retarded, false)
            } else {
                (Regime::FullIntegral, false)
            }
        }
    }
}

/// Pair energy with regime dispatch. `Auto` picks the closed form whose
/// window contains `r` (the full integral in between); forcing a closed
/// form outside its window succeeds but is flagged.
pub fn pair_energy(
    m: &Material,
    r: f64,
    request: RegimeRequest,
    thresholds: &RegimeThresholds,
    quad: &QuadratureSpec,
) -> Result<EnergyResult> {
    check_distance(r)?;
    let (regime, outside) = resolve_regime(m, r, r, request, thresholds);
    let mut out = match regime {
        Regime::NonRetarded => u2_nonretarded(m, r)?,
        Regime::Retarded => u2_retarded(m.radius(), r)?,
        Regime::FullIntegral => u2_full(m, r, quad)?,
    };
    if outside {
        out = out.with_warning(Warning::OutsideIntendedRegime);
    }
    Ok(out)
}

/// Triplet energy with regime dispatch. The short-distance window requires
/// the longest side inside it, the long-distance window the shortest.
pub fn triplet_energy(
    m: &Material,
    t: &Triangle,
    request: RegimeRequest,
    thresholds: &RegimeThresholds,
    quad: &QuadratureSpec,
) -> Result<EnergyResult> {
    let (regime, outside) = resolve_regime(m, t.min_side(), t.max_side(), request, thresholds);
    let mut out = match regime {
        Regime::NonRetarded => u3_nonretarded(m, t)?,
        Regime::Retarded => u3_retarded(m.radius(), t)?,
        Regime::FullIntegral => u3_full(m, t, quad)?,
    };
    if outside {
        out = out.with_warning(Warning::OutsideIntendedRegime);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn g2_closed_points() {
        assert_relative_eq!(g2(0.0), 3.0);
        assert_relative_eq!(g2(1.0), 17.0 * (-2f64).exp(), max_relative = 1e-15);
        assert_eq!(g2(1e4), 0.0);
    }

    #[test]
    fn g3_zero_argument_reduces_to_angular_form() {
        let equi = [0.5, 0.5, 0.5];
        assert_relative_eq!(g3(0.0, 0.0, 0.0, equi), 3.0 * (1.0 + 3.0 / 8.0));
        let collinear = [1.0, 1.0, -1.0];
        assert_relative_eq!(g3(0.0, 0.0, 0.0, collinear), -6.0);
    }

    #[test]
    fn triangle_validation_and_cosines() {
        assert!(Triangle::new(1.0, 1.0, 3.0).is_err());
        assert!(Triangle::new(1.0, -1.0, 1.0).is_err());
        assert!(Triangle::new(1.0, f64::NAN, 1.0).is_err());
        assert!(Triangle::new(1.0, 1.0, 2.0).is_ok());
        let t = Triangle::new(3.0, 4.0, 5.0).unwrap();
        let [ca, cb, cc] = t.cos_angles();
        assert_relative_eq!(ca, 0.8);
        assert_relative_eq!(cb, 0.6);
        assert_relative_eq!(cc, 0.0);
        assert_relative_eq!(t.max_side(), 5.0);
        assert_relative_eq!(t.min_side(), 3.0);
    }

    #[test]
    fn pair_long_distance_value_and_scaling() {
        let u = u2_retarded(1.0, 1.0).unwrap();
        assert_relative_eq!(u.coefficient, -23.0 / (4.0 * PI), max_relative = 1e-15);
        assert_eq!(u.scale, ScaleTag::ReducedEnergy);
        let doubled = u2_retarded(1.0, 2.0).unwrap();
        assert_relative_eq!(doubled.coefficient / u.coefficient, 2f64.powi(-7), max_relative = 1e-14);
    }

    #[test]
    fn pair_short_distance_matches_formula_and_flags_damping() {
        let m = Material::drude(2.0, 0.0, 0.5).unwrap();
        let u = u2_nonretarded(&m, 0.25).unwrap();
        let expect = -(3f64.sqrt() / 4.0) * 2.0 * 0.5f64.powi(6) / 0.25f64.powi(6);
        assert_relative_eq!(u.coefficient, expect, max_relative = 1e-14);
        assert!(u.metadata.warnings.is_empty());
        assert_eq!(u.error_estimate, 0.0);

        let damped = Material::drude(1.0, 0.2, 0.5).unwrap();
        let u = u2_nonretarded(&damped, 0.25).unwrap();
        assert!(u.metadata.warnings.contains(&Warning::DampingSeriesValidity));
        assert!(u.error_estimate > 0.0);

        let pc = Material::preset("perfect").unwrap();
        assert!(u2_nonretarded(&pc, 1.0).is_err());
        assert!(u3_nonretarded(&pc, &Triangle::equilateral(1.0).unwrap()).is_err());
    }

    #[test]
    fn pair_full_integral_reaches_both_limits() {
        let quad = QuadratureSpec::default().with_rel_tol(1e-8);
        let m = Material::drude(1.0, 0.0, 0.3).unwrap();
        let lambda_p = m.plasma_wavelength();

        let r = lambda_p / 200.0;
        let full = u2_full(&m, r, &quad).unwrap();
        let nonret = u2_nonretarded(&m, r).unwrap();
        assert_relative_eq!(full.coefficient, nonret.coefficient, max_relative = 0.01);
        assert!(full.metadata.converged);

        let r = 200.0 * lambda_p;
        let full = u2_full(&m, r, &quad).unwrap();
        let ret = u2_retarded(0.3, r).unwrap();
        assert_relative_eq!(full.coefficient, ret.coefficient, max_relative = 0.01);
    }

    #[test]
    fn ideal_metal_pair_integral_is_exactly_the_long_distance_form() {
        let quad = QuadratureSpec::default().with_rel_tol(1e-10);
        let pc = Material::perfect_conductor(1.0).unwrap();
        for r in [0.3, 1.0, 7.0] {
            let full = u2_full(&pc, r, &quad).unwrap();
            let closed = u2_retarded(1.0, r).unwrap();
            assert_relative_eq!(full.coefficient, closed.coefficient, max_relative = 1e-9);
        }
    }

    #[test]
    fn triplet_long_distance_equilateral_and_scaling() {
        let t = Triangle::equilateral(1.0).unwrap();
        let u = u3_retarded(1.0, &t).unwrap();
        assert_relative_eq!(u.coefficient, (4.0 / PI) * 316.0 / 243.0, max_relative = 1e-13);
        assert!(u.coefficient > 0.0);

        let t2 = t.scaled(2.0).unwrap();
        let u2 = u3_retarded(1.0, &t2).unwrap();
        assert_relative_eq!(u2.coefficient / u.coefficient, 2f64.powi(-10), max_relative = 1e-12);

        let collinear = Triangle::new(1.0, 1.0, 2.0).unwrap();
        assert!(u3_retarded(1.0, &collinear).unwrap().coefficient < 0.0);
    }

    #[test]
    fn triplet_full_integral_matches_closed_forms() {
        let quad = QuadratureSpec::default().with_rel_tol(1e-9);
        let pc = Material::perfect_conductor(1.0).unwrap();
        for t in [
            Triangle::new(3.0, 4.0, 5.0).unwrap(),
            Triangle::equilateral(2.0).unwrap(),
            Triangle::new(1.0, 1.0, 1.9).unwrap(),
        ] {
            let full = u3_full(&pc, &t, &quad).unwrap();
            let closed = u3_retarded(1.0, &t).unwrap();
            assert_relative_eq!(full.coefficient, closed.coefficient, max_relative = 1e-8);
        }

        let m = Material::drude(1.0, 0.0, 0.2).unwrap();
        let lambda_p = m.plasma_wavelength();
        let small = Triangle::equilateral(lambda_p / 300.0).unwrap();
        let full = u3_full(&m, &small, &quad).unwrap();
        let nonret = u3_nonretarded(&m, &small).unwrap();
        assert_relative_eq!(full.coefficient, nonret.coefficient, max_relative = 0.01);
    }

    #[test]
    fn near_coincidence_bracket_has_the_documented_angular_form() {
        // Third particle far away, pair separation c -> 0 at approach
        // direction cosine t: the bracket tends to (7 - 21 t^2)/8.
        let (big, small) = (2.0, 1e-5);
        for t in [0.0, 0.5, 1.0] {
            let a = big;
            let b = big - t * small;
            let c = small;
            let s1 = a + b + c;
            let bracket = retarded_triplet_factor(a, b, c) * a.powi(3) * b.powi(3) * c.powi(3) * s1;
            assert_relative_eq!(bracket, (7.0 - 21.0 * t * t) / 8.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn triplet_factor_survives_huge_sides() {
        let f = retarded_triplet_factor(1e300, 1e300, 1e300);
        assert_eq!(f, 0.0);
        assert!(retarded_triplet_factor(1e30, 1e30, 1e30).is_finite());
    }

    #[test]
    fn auto_dispatch_picks_the_window() {
        let quad = QuadratureSpec::default();
        let thresholds = RegimeThresholds::default();
        let gold = Material::gold();
        let lambda_p = gold.plasma_wavelength();

        let near = pair_energy(&gold, lambda_p / 100.0, RegimeRequest::Auto, &thresholds, &quad).unwrap();
        assert_eq!(near.metadata.regime, Regime::NonRetarded);
        assert!(near.metadata.warnings.is_empty());

        let far = pair_energy(&gold, 100.0 * lambda_p, RegimeRequest::Auto, &thresholds, &quad).unwrap();
        assert_eq!(far.metadata.regime, Regime::Retarded);

        let mid = pair_energy(&gold, lambda_p, RegimeRequest::Auto, &thresholds, &quad).unwrap();
        assert_eq!(mid.metadata.regime, Regime::FullIntegral);
        assert!(mid.metadata.evaluations > 0);

        let pc = Material::preset("perfect").unwrap();
        let any = pair_energy(&pc, 1e-9, RegimeRequest::Auto, &thresholds, &quad).unwrap();
        assert_eq!(any.metadata.regime, Regime::Retarded);
    }

    #[test]
    fn forcing_a_closed_form_outside_its_window_is_flagged() {
        let quad = QuadratureSpec::default();
        let thresholds = RegimeThresholds::default();
        let gold = Material::gold();
        let lambda_p = gold.plasma_wavelength();

        let forced = pair_energy(&gold, lambda_p, RegimeRequest::NonRetarded, &thresholds, &quad).unwrap();
        assert!(forced.metadata.warnings.contains(&Warning::OutsideIntendedRegime));

        let forced = pair_energy(&gold, lambda_p, RegimeRequest::Retarded, &thresholds, &quad).unwrap();
        assert!(forced.metadata.warnings.contains(&Warning::OutsideIntendedRegime));

        let t = Triangle::equilateral(lambda_p).unwrap();
        let forced = triplet_energy(&gold, &t, RegimeRequest::Retarded, &thresholds, &quad).unwrap();
        assert!(forced.metadata.warnings.contains(&Warning::OutsideIntendedRegime));

        let ok = triplet_energy(&gold, &t, RegimeRequest::Full, &thresholds, &quad).unwrap();
        assert!(ok.metadata.warnings.is_empty());
    }
}
