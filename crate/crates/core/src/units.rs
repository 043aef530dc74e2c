//! SI boundary of the crate.
//!
//! Everything outside this module works in dimensionless form: rotation as
//! `u = ΩR/v`, flux as `γ_B = eBR²/(2ħ)` (the number of elementary quanta
//! `2πħ/e` threading the ring), energies in units of `ħv/R` and angular
//! momenta in units of `ħ`. The helpers here are the only place where Tesla,
//! metres and seconds are turned into those numbers and back.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible `|u|`; the closed forms diverge as the cut approaches
/// the excitation speed.
pub const U_GUARD: f64 = 1.0 - 1e-12;

/// Mass per unit length of a 1 mm aluminium wire, `πρd²/4` with
/// `ρ = 2.7e3 kg/m³`.
pub const ALUMINIUM_WIRE_MU: f64 = PI * 2.7e3 * 1e-6 / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Elementary charge, C.
    pub e: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

impl PhysicalConstants {
    pub const CODATA: Self = Self {
        hbar: 1.054_571_817e-34,
        c: 2.997_924_58e8,
        e: 1.602_176_634e-19,
        k_b: 1.380_649e-23,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("hbar", self.hbar), ("c", self.c), ("e", self.e), ("k_b", self.k_b)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("constant {name} must be finite and positive, got {value}")));
            }
        }
        Ok(())
    }

    /// Elementary flux quantum `2πħ/e` of a unit-charge scalar, in Weber.
    pub fn flux_quantum(&self) -> f64 {
        2.0 * PI * self.hbar / self.e
    }
}

/// Number of real massless degrees of freedom on the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Degeneracy(u8);

impl Degeneracy {
    pub const NEUTRAL: Self = Self(1);
    pub const CHARGED: Self = Self(2);
    pub const NANOTUBE: Self = Self(4);

    pub fn new(d: u8) -> Result<Self> {
        match d {
            1 | 2 | 4 => Ok(Self(d)),
            _ => Err(Error::InvalidInput(format!("degeneracy must be 1, 2 or 4, got {d}"))),
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn factor(self) -> f64 {
        f64::from(self.0)
    }

    pub fn is_charged(self) -> bool {
        self.0 > 1
    }
}

impl TryFrom<u8> for Degeneracy {
    type Error = Error;
    fn try_from(d: u8) -> Result<Self> {
        Self::new(d)
    }
}

impl From<Degeneracy> for u8 {
    fn from(d: Degeneracy) -> u8 {
        d.0
    }
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    /// Excitation speed `v`, m/s.
    pub wave_speed: f64,
    /// Linear mass density `μ`, kg/m.
    pub linear_mass_density: f64,
    pub degeneracy: Degeneracy,
    pub charged: bool,
}

impl MaterialSpec {
    pub fn new(wave_speed: f64, linear_mass_density: f64, degeneracy: Degeneracy, consts: &PhysicalConstants) -> Result<Self> {
        let spec = Self { wave_speed, linear_mass_density, degeneracy, charged: degeneracy.is_charged() };
        spec.validate(consts)?;
        Ok(spec)
    }

    pub fn validate(&self, consts: &PhysicalConstants) -> Result<()> {
        if !(self.wave_speed.is_finite() && self.wave_speed > 0.0) {
            return Err(Error::InvalidInput(format!("wave speed must be positive, got {}", self.wave_speed)));
        }
        if self.wave_speed > consts.c {
            return Err(Error::InvalidInput(format!(
                "wave speed {} exceeds the speed of light {}",
                self.wave_speed, consts.c
            )));
        }
        if !(self.linear_mass_density.is_finite() && self.linear_mass_density >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "linear mass density must be non-negative, got {}",
                self.linear_mass_density
            )));
        }
        if self.charged != self.degeneracy.is_charged() {
            return Err(Error::InvalidInput(format!(
                "degeneracy {} is inconsistent with charged = {}",
                self.degeneracy, self.charged
            )));
        }
        Ok(())
    }

    pub fn preset(preset: Preset, consts: &PhysicalConstants) -> Self {
        match preset {
            Preset::PhotonNeutral => Self {
                wave_speed: consts.c,
                linear_mass_density: ALUMINIUM_WIRE_MU,
                degeneracy: Degeneracy::NEUTRAL,
                charged: false,
            },
            Preset::PhotonCharged => Self {
                wave_speed: consts.c,
                linear_mass_density: ALUMINIUM_WIRE_MU,
                degeneracy: Degeneracy::CHARGED,
                charged: true,
            },
            Preset::Nanotube => Self {
                wave_speed: 8.1e5,
                linear_mass_density: 3.24e-15,
                degeneracy: Degeneracy::NANOTUBE,
                charged: true,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    PhotonNeutral,
    PhotonCharged,
    Nanotube,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::PhotonNeutral, Preset::PhotonCharged, Preset::Nanotube];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PhotonNeutral => "photon-neutral",
            Preset::PhotonCharged => "photon-charged",
            Preset::Nanotube => "nanotube",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown material preset {s:?}")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RingGeometry {
    radius: f64,
    wave_speed: f64,
}

impl RingGeometry {
    pub fn new(radius: f64, wave_speed: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        if !(wave_speed.is_finite() && wave_speed > 0.0) {
            return Err(Error::InvalidInput(format!("wave speed must be positive, got {wave_speed}")));
        }
        Ok(Self { radius, wave_speed })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn wave_speed(&self) -> f64 {
        self.wave_speed
    }

    /// `v/R`, the inverse light-crossing time of one radian.
    pub fn fundamental_frequency(&self) -> f64 {
        self.wave_speed / self.radius
    }
}

/// Dimensionless rotation and flux of a ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessState {
    pub u: f64,
    pub gamma_b: f64,
}

pub fn check_u(u: f64) -> Result<()> {
    if !u.is_finite() || u.abs() >= U_GUARD {
        return Err(Error::SuperluminalCut { u });
    }
    Ok(())
}

/// `γ_B = eBR²/(2ħ)`; sign follows `B`.
pub fn gamma_b(b_field: f64, radius: f64, consts: &PhysicalConstants) -> f64 {
    consts.e * b_field * radius * radius / (2.0 * consts.hbar)
}

/// Field strength that threads `gamma_b` elementary quanta through a ring of
/// the given radius.
pub fn b_field_for_gamma(gamma_b: f64, radius: f64, consts: &PhysicalConstants) -> f64 {
    2.0 * consts.hbar * gamma_b / (consts.e * radius * radius)
}

pub fn dimensionless_state(
    b_field: f64,
    radius: f64,
    omega: f64,
    material: &MaterialSpec,
    consts: &PhysicalConstants,
) -> Result<DimensionlessState> {
    if !b_field.is_finite() {
        return Err(Error::InvalidInput(format!("magnetic field must be finite, got {b_field}")));
    }
    let geometry = RingGeometry::new(radius, material.wave_speed)?;
    let u = omega / geometry.fundamental_frequency();
    check_u(u)?;
    if !material.charged && b_field != 0.0 {
        return Err(Error::NeutralWithFlux { gamma_b: gamma_b(b_field, radius, consts) });
    }
    Ok(DimensionlessState { u, gamma_b: gamma_b(b_field, radius, consts) })
}

/// Inverse of [`dimensionless_state`]: returns `(Ω, B)` in SI.
pub fn from_dimensionless(state: DimensionlessState, geometry: &RingGeometry, consts: &PhysicalConstants) -> (f64, f64) {
    (state.u * geometry.fundamental_frequency(), b_field_for_gamma(state.gamma_b, geometry.radius(), consts))
}

/// `ħv/R` in Joules: the unit of every dimensionless energy in the crate.
pub fn energy_scale(geometry: &RingGeometry, consts: &PhysicalConstants) -> f64 {
    consts.hbar * geometry.wave_speed() / geometry.radius()
}

/// Unit of moment of inertia, `ħR/v`, in kg·m².
pub fn inertia_scale(geometry: &RingGeometry, consts: &PhysicalConstants) -> f64 {
    consts.hbar * geometry.radius() / geometry.wave_speed()
}

/// Optional overrides for a material, merged over a preset or used whole
/// for a new named material.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialOverride {
    pub wave_speed: Option<f64>,
    pub linear_mass_density: Option<f64>,
    pub degeneracy: Option<u8>,
    pub charged: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsOverride {
    pub hbar: Option<f64>,
    pub c: Option<f64>,
    pub e: Option<f64>,
    pub k_b: Option<f64>,
}

/// Contents of the JSON config file (see `schemas/config.schema.json`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub constants: ConstantsOverride,
    #[serde(default)]
    pub materials: BTreeMap<String, MaterialOverride>,
}

impl Config {
    /// Parses and validates a config document. Every material entry must
    /// resolve to a valid [`MaterialSpec`].
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.constants()?;
        for name in config.materials.keys() {
            config.material(name)?;
        }
        Ok(config)
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        let base = PhysicalConstants::CODATA;
        let o = &self.constants;
        let consts = PhysicalConstants {
            hbar: o.hbar.unwrap_or(base.hbar),
            c: o.c.unwrap_or(base.c),
            e: o.e.unwrap_or(base.e),
            k_b: o.k_b.unwrap_or(base.k_b),
        };
        consts.validate()?;
        Ok(consts)
    }

    /// Resolves a material by name: a preset with optional overrides, or a
    /// fully specified custom entry.
    pub fn material(&self, name: &str) -> Result<MaterialSpec> {
        let consts = self.constants()?;
        let base = name.parse::<Preset>().ok().map(|p| MaterialSpec::preset(p, &consts));
        let over = self.materials.get(name);
        let spec = match (base, over) {
            (Some(base), None) => base,
            (base, Some(o)) => {
                let degeneracy = match (o.degeneracy, base) {
                    (Some(d), _) => Degeneracy::new(d)?,
                    (None, Some(b)) => b.degeneracy,
                    (None, None) => return Err(Error::Config(format!("material {name:?} needs a degeneracy"))),
                };
                let wave_speed = o
                    .wave_speed
                    .or(base.map(|b| b.wave_speed))
                    .ok_or_else(|| Error::Config(format!("material {name:?} needs a wave_speed")))?;
                let linear_mass_density = o
                    .linear_mass_density
                    .or(base.map(|b| b.linear_mass_density))
                    .ok_or_else(|| Error::Config(format!("material {name:?} needs a linear_mass_density")))?;
                MaterialSpec {
                    wave_speed,
                    linear_mass_density,
                    degeneracy,
                    charged: o
                        .charged
                        .or(base.map(|b| b.charged))
                        .unwrap_or(degeneracy.is_charged()),
                }
            }
            (None, None) => return Err(Error::InvalidInput(format!("unknown material {name:?}"))),
        };
        spec.validate(&consts)?;
        Ok(spec)
    }
}
