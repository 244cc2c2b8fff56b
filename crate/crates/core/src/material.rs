//! Dissipative metal model evaluated at imaginary frequency.
//!
//! All quantities are in reduced units (`hbar = c = eps0 = 1`) with the
//! metre as the base length, so frequencies are stored as inverse metres.
//! Config files speak SI (`omega_p`, `gamma` in 1/s, `radius` in m) and are
//! converted on load.

use crate::{Error, Result};

/// SI boundary: frequencies in 1/s divide by this to become inverse metres.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Homogeneous metal sphere small enough to respond as a point dipole.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Material {
    /// Dissipative metal: plasma frequency and damping rate in inverse
    /// metres, sphere radius in metres.
    Drude { omega_p: f64, gamma: f64, radius: f64 },
    /// Ideal-metal limit: unit reduced polarizability at every frequency.
    PerfectConductor { radius: f64 },
}

impl Material {
    pub fn drude(omega_p: f64, gamma: f64, radius: f64) -> Result<Self> {
        if !(omega_p.is_finite() && omega_p > 0.0) {
            return Err(Error::Material(format!("plasma frequency must be positive, got {omega_p}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Material(format!("damping rate must be non-negative, got {gamma}")));
        }
        Self::check_radius(radius)?;
        Ok(Material::Drude { omega_p, gamma, radius })
    }

    pub fn perfect_conductor(radius: f64) -> Result<Self> {
        Self::check_radius(radius)?;
        Ok(Material::PerfectConductor { radius })
    }

    fn check_radius(radius: f64) -> Result<()> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Material(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(())
    }

    /// Gold sphere of 1 nm radius (plasma frequency 1.38e16 1/s, damping
    /// 1.075e14 1/s, converted to inverse metres).
    pub fn gold() -> Self {
        Material::Drude {
            omega_p: 1.38e16 / SPEED_OF_LIGHT,
            gamma: 1.075e14 / SPEED_OF_LIGHT,
            radius: 1e-9,
        }
    }

    /// Named presets accepted by the CLI: `gold`, `perfect`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "gold" => Some(Self::gold()),
            // Unit radius keeps the perfect-conductor preset scale-free.
            "perfect" => Some(Material::PerfectConductor { radius: 1.0 }),
            _ => None,
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            Material::Drude { radius, .. } | Material::PerfectConductor { radius } => radius,
        }
    }

    pub fn is_perfect_conductor(&self) -> bool {
        matches!(self, Material::PerfectConductor { .. })
    }

    /// Damping-to-plasma ratio; zero for the ideal metal. The first-order
    /// short-distance closed forms assume this is small.
    pub fn damping_ratio(&self) -> f64 {
        match *self {
            Material::Drude { omega_p, gamma, .. } => gamma / omega_p,
            Material::PerfectConductor { .. } => 0.0,
        }
    }

    /// Plasma wavelength `2 pi / omega_p`, the length that separates the
    /// short- and long-distance regimes. Zero for the ideal metal, whose
    /// response has no intrinsic scale.
    pub fn plasma_wavelength(&self) -> f64 {
        match *self {
            Material::Drude { omega_p, .. } => 2.0 * std::f64::consts::PI / omega_p,
            Material::PerfectConductor { .. } => 0.0,
        }
    }

    /// Permittivity on the imaginary frequency axis,
    /// `eps(i xi) = 1 + omega_p^2 / (xi^2 + gamma xi)`.
    ///
    /// Diverges as `xi -> 0` (static metallic screening); the ideal metal is
    /// infinite at every frequency.
    pub fn permittivity_at_imag_freq(&self, xi: f64) -> Result<f64> {
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(Error::InvalidInput(format!("imaginary frequency must be >= 0, got {xi}")));
        }
        Ok(match *self {
            Material::Drude { omega_p, gamma, .. } => 1.0 + omega_p * omega_p / (xi * xi + gamma * xi),
            Material::PerfectConductor { .. } => f64::INFINITY,
        })
    }

    /// Reduced dipole polarizability `alpha(i xi) / (4 pi eps0 rho^3)`:
    /// `omega_p^2 / (3 xi^2 + 3 gamma xi + omega_p^2)`, which is 1 at zero
    /// frequency for any metal and identically 1 for the ideal one.
    pub fn reduced_polarizability(&self, xi: f64) -> Result<f64> {
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(Error::InvalidInput(format!("imaginary frequency must be >= 0, got {xi}")));
        }
        Ok(match *self {
            Material::Drude { omega_p, gamma, .. } => {
                let wp2 = omega_p * omega_p;
                wp2 / (3.0 * xi * xi + 3.0 * gamma * xi + wp2)
            }
            Material::PerfectConductor { .. } => 1.0,
        })
    }

    /// Parses a `key = value` config. Keys: `omega_p` and `gamma` in 1/s,
    /// `radius` in m, `perfect_conductor` as true/false. Blank lines and
    /// `#` comments are skipped; unknown keys are errors rather than typos
    /// silently changing the physics. `gamma` defaults to 0.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut omega_p = None;
        let mut gamma = None;
        let mut radius = None;
        let mut perfect = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got {line:?}", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let parse = |what: &str| -> Result<f64> {
                value.parse::<f64>().map_err(|_| {
                    Error::Config(format!("line {}: {what} is not a number: {value:?}", lineno + 1))
                })
            };
            match key {
                "omega_p" => omega_p = Some(parse("omega_p")? / SPEED_OF_LIGHT),
                "gamma" => gamma = Some(parse("gamma")? / SPEED_OF_LIGHT),
                "radius" => radius = Some(parse("radius")?),
                "perfect_conductor" => {
                    perfect = match value {
                        "true" => true,
                        "false" => false,
                        _ => {
                            return Err(Error::Config(format!(
                                "line {}: perfect_conductor must be true or false, got {value:?}",
                                lineno + 1
                            )))
                        }
                    }
                }
                _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        let radius = radius.ok_or_else(|| Error::Config("missing key: radius".into()))?;
        if perfect {
            if omega_p.is_some() || gamma.is_some() {
                return Err(Error::Config(
                    "perfect_conductor = true does not take omega_p or gamma".into(),
                ));
            }
            Self::perfect_conductor(radius)
        } else {
            let omega_p = omega_p.ok_or_else(|| Error::Config("missing key: omega_p".into()))?;
            Self::drude(omega_p, gamma.unwrap_or(0.0), radius)
        }
    }

    pub fn from_config_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_config_str(&text)
    }
}
