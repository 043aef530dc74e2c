//! A massive ring: classical rotor energy plus the zero-point energy of the
//! field it carries, and the search for a rotating ground state.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{self, band_state_for, prefactor, Frame, MagneticBackground, Side};
use crate::units::{check_u, MaterialSpec, PhysicalConstants, RingGeometry, U_GUARD};

/// Bands searched by [`ground_state`] unless told otherwise.
pub const DEFAULT_N_MAX: i64 = 64;

/// Above this `|u|` the nonrelativistic rotor energy is only indicative.
pub const NONRELATIVISTIC_U: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviceSpec {
    pub geometry: RingGeometry,
    pub material: MaterialSpec,
    pub background: MagneticBackground,
    /// Classical moment of inertia of one ring, kg·m².
    pub i_cl: f64,
    /// Number of identical rings operated together.
    pub array_count: u64,
    pub constants: PhysicalConstants,
}

impl DeviceSpec {
    /// Single ring with `I_cl = 2πμR³`.
    pub fn new(b_field: f64, radius: f64, material: MaterialSpec, consts: PhysicalConstants) -> Result<Self> {
        consts.validate()?;
        material.validate(&consts)?;
        let geometry = RingGeometry::new(radius, material.wave_speed)?;
        let background = MagneticBackground::new(b_field, radius, &consts);
        if !material.degeneracy.is_charged() && background.gamma_b != 0.0 {
            return Err(Error::NeutralWithFlux { gamma_b: background.gamma_b });
        }
        let i_cl = TAU * material.linear_mass_density * radius.powi(3);
        Ok(Self { geometry, material, background, i_cl, array_count: 1, constants: consts })
    }

    pub fn with_i_cl(mut self, i_cl: f64) -> Result<Self> {
        if !(i_cl >= 0.0 && i_cl.is_finite()) {
            return Err(Error::InvalidInput(format!("classical moment of inertia must be nonnegative, got {i_cl}")));
        }
        self.i_cl = i_cl;
        Ok(self)
    }

    pub fn radius(&self) -> f64 {
        self.geometry.radius()
    }

    pub fn wave_speed(&self) -> f64 {
        self.geometry.wave_speed()
    }

    pub fn gamma_b(&self) -> f64 {
        self.background.gamma_b
    }

    pub fn u(&self, omega: f64) -> f64 {
        omega / self.geometry.fundamental_frequency()
    }

    pub fn omega(&self, u: f64) -> f64 {
        u * self.geometry.fundamental_frequency()
    }

    /// `ħv/R`
    pub fn energy_unit(&self) -> f64 {
        self.constants.hbar * self.wave_speed() / self.radius()
    }

    fn count(&self) -> f64 {
        self.array_count as f64
    }

    /// `Ω_ch = ħv/(e|B|R³)`.
    pub fn characteristic_frequency(&self) -> Result<f64> {
        spectrum::characteristic_frequency(self.background.b_field, self.radius(), self.wave_speed(), &self.constants)
    }

    /// Quadratic coefficient of the total energy in `Ω` inside band `m`.
    pub fn band_curvature(&self, m: i64) -> f64 {
        let d = self.material.degeneracy.factor();
        let zp_inertia = self.constants.hbar * self.radius() / self.wave_speed();
        self.count() * (0.5 * self.i_cl - d / 48.0 * prefactor(m) as f64 * zp_inertia)
    }
}

pub fn classical_energy(omega: f64, spec: &DeviceSpec) -> Result<f64> {
    check_u(spec.u(omega))?;
    Ok(spec.count() * 0.5 * spec.i_cl * omega * omega)
}

pub fn zero_point_energy(omega: f64, spec: &DeviceSpec, side: Side) -> Result<f64> {
    let e = spectrum::zp_energy_sided(spec.u(omega), spec.gamma_b(), spec.material.degeneracy, Frame::Lab, side)?;
    Ok(spec.count() * e * spec.energy_unit())
}

/// Zero-point plus classical energy, in joules.
pub fn total_energy(omega: f64, spec: &DeviceSpec, side: Side) -> Result<f64> {
    Ok(zero_point_energy(omega, spec, side)? + classical_energy(omega, spec)?)
}

/// Total energy with the band fixed, so that a band edge reached through a
/// rounded `u → Ω → u` trip stays in the intended band.
pub fn band_energy(omega: f64, m: i64, spec: &DeviceSpec) -> Result<f64> {
    let u = spec.u(omega);
    check_u(u)?;
    let d = spec.material.degeneracy.factor();
    let zp = -d / 48.0 * prefactor(m) as f64 * (1.0 + u * u) * spec.energy_unit();
    Ok(spec.count() * zp + classical_energy(omega, spec)?)
}

/// Total angular momentum with the band fixed.
pub fn band_angular_momentum(omega: f64, m: i64, spec: &DeviceSpec) -> Result<f64> {
    let u = spec.u(omega);
    check_u(u)?;
    let d = spec.material.degeneracy.factor();
    let zp = -d / 24.0 * prefactor(m) as f64 * u * spec.constants.hbar;
    Ok(spec.count() * (zp + spec.i_cl * omega))
}

/// Zero-point plus classical angular momentum, in J·s.
pub fn total_angular_momentum(omega: f64, spec: &DeviceSpec, side: Side) -> Result<f64> {
    let l = spectrum::zp_angular_momentum_sided(spec.u(omega), spec.gamma_b(), spec.material.degeneracy, side)?;
    Ok(spec.count() * (l * spec.constants.hbar + spec.i_cl * omega))
}

/// Gap `E(nΩ_ch) − E(0)` from the nonrelativistic closed forms: the rotor
/// energy at `nΩ_ch` against the `6n(n+1)` part of the zero-point prefactor.
pub fn desk_gap(spec: &DeviceSpec, n: i64) -> Result<f64> {
    let w = n as f64 * spec.characteristic_frequency()?;
    let d = spec.material.degeneracy.factor();
    let zp = d / 48.0 * 6.0 * (n * (n + 1)) as f64 * spec.energy_unit();
    Ok(spec.count() * (0.5 * spec.i_cl * w * w - zp))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundState {
    pub omega_star: f64,
    pub band: i64,
    pub energy: f64,
    pub is_rotating: bool,
    pub degenerate_pair: bool,
    /// `2π/Ω*`; absent for a static ground state.
    pub period: Option<f64>,
    pub barrier: f64,
    pub barrier_temperature: f64,
    pub status: Status,
    /// The winning candidate has `|u|` above [`NONRELATIVISTIC_U`].
    pub nonrelativistic_warning: bool,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    omega: f64,
    band: i64,
    energy: f64,
}

fn better(a: Candidate, b: Candidate) -> Candidate {
    if b.energy < a.energy || (b.energy == a.energy && b.omega.abs() < a.omega.abs()) {
        b
    } else {
        a
    }
}

/// Energy jump across the first band boundary, `N·d·ħv/(4R)`.
pub fn barrier(spec: &DeviceSpec) -> f64 {
    spec.count() * spec.material.degeneracy.factor() * 0.25 * spec.energy_unit()
}

/// Global minimum of the total energy over `Ω ≥ 0`, searching the static
/// point, every band edge up to band `n_max`, and the relativistic guard.
pub fn ground_state(spec: &DeviceSpec, n_max: i64) -> Result<GroundState> {
    if n_max < 1 {
        return Err(Error::InvalidInput(format!("n_max must be at least 1, got {n_max}")));
    }
    // E(Ω, γ) = E(−Ω, −γ) = E(Ω, −γ), so search Ω ≥ 0 with γ ≥ 0.
    let mut spec = *spec;
    spec.background.gamma_b = spec.background.gamma_b.abs();
    let gamma = spec.gamma_b();
    let static_energy = total_energy(0.0, &spec, Side::Above)?;
    let start = Candidate { omega: 0.0, band: 0, energy: static_energy };

    let (best, outermost) = if gamma == 0.0 {
        // a single band reaching the relativistic guard
        let omega = spec.omega(U_GUARD);
        let guard = Candidate { omega, band: 0, energy: band_energy(omega, 0, &spec)? };
        let best = if spec.band_curvature(0) < 0.0 { better(start, guard) } else { start };
        (best, 0)
    } else {
        let band_best = (0..=n_max)
            .into_par_iter()
            .map(|m| -> Result<Candidate> {
                let b = band_state_for(m, gamma);
                let (lo, hi) = (b.lower_edge_u, b.upper_edge_u.min(U_GUARD));
                let u = if spec.band_curvature(m) < 0.0 { hi } else { lo };
                let omega = spec.omega(u);
                Ok(Candidate { omega, band: m, energy: band_energy(omega, m, &spec)? })
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(start, better);
        (band_best, n_max)
    };

    let is_rotating = best.omega != 0.0;
    let status = if spec.band_curvature(outermost) < 0.0 { Status::Unbounded } else { Status::Ok };
    let barrier = barrier(&spec);
    Ok(GroundState {
        omega_star: best.omega,
        band: best.band,
        energy: best.energy,
        is_rotating,
        degenerate_pair: is_rotating,
        period: is_rotating.then(|| TAU / best.omega),
        barrier,
        barrier_temperature: barrier / spec.constants.k_b,
        status,
        nonrelativistic_warning: spec.u(best.omega).abs() > NONRELATIVISTIC_U,
    })
}

/// Smallest radius at which rotation wins, `√(4πμħv/d)/(e|B|)`.
pub fn critical_radius(b_field: f64, material: &MaterialSpec, consts: &PhysicalConstants) -> Result<f64> {
    if b_field == 0.0 {
        return Err(Error::NoFlux);
    }
    if !(material.linear_mass_density > 0.0) {
        return Err(Error::InvalidInput("critical radius needs a positive linear mass density".into()));
    }
    let d = material.degeneracy.factor();
    let num = 4.0 * PI * material.linear_mass_density * consts.hbar * material.wave_speed / d;
    Ok(num.sqrt() / (consts.e * b_field.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    /// `2π/Ω_ch`, s.
    pub period: f64,
    /// Barrier, J.
    pub delta_e: f64,
    /// Barrier temperature, K.
    pub temperature: f64,
    /// `R < R_c`: no rotating ground state is expected.
    pub below_critical: bool,
}

pub fn operating_point(spec: &DeviceSpec) -> Result<OperatingPoint> {
    let w = spec.characteristic_frequency()?;
    let delta_e = barrier(spec);
    let below_critical = match critical_radius(spec.background.b_field, &spec.material, &spec.constants) {
        Ok(rc) => spec.radius() < rc,
        Err(_) => true,
    };
    Ok(OperatingPoint { period: TAU / w, delta_e, temperature: delta_e / spec.constants.k_b, below_critical })
}

/// `n` identical rings operated together.
pub fn array_scale(n: u64, spec: &DeviceSpec) -> Result<DeviceSpec> {
    if n == 0 {
        return Err(Error::InvalidInput("array count must be at least 1".into()));
    }
    let mut out = *spec;
    out.array_count = spec
        .array_count
        .checked_mul(n)
        .ok_or_else(|| Error::InvalidInput("array count overflows".into()))?;
    Ok(out)
}
