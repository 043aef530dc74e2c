//! Band structure of a charged field on a rotating ring in a magnetic field,
//! and the closed-form zero-point observables that follow from it.
//!
//! Everything here is dimensionless: energies in `ħv/R`, angular momenta in
//! `ħ`, the rotation as `u = ΩR/v`. The field content enters only through
//! the degeneracy `d`, which multiplies the real-scalar result.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{check_u, Degeneracy, PhysicalConstants, RingGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Lab,
    Corotating,
}

impl FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lab" => Ok(Frame::Lab),
            "corotating" => Ok(Frame::Corotating),
            other => Err(Error::InvalidInput(format!("unknown frame {other:?} (lab|corotating)"))),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::Lab => "lab",
            Frame::Corotating => "corotating",
        })
    }
}

/// Which one-sided limit to take at a band boundary, along the `u` axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagneticBackground {
    pub b_field: f64,
    /// `πBR²`, in webers.
    pub flux: f64,
    pub gamma_b: f64,
}

impl MagneticBackground {
    pub fn new(b_field: f64, radius: f64, consts: &PhysicalConstants) -> Self {
        let flux = std::f64::consts::PI * b_field * radius * radius;
        let gamma_b = consts.e * flux / (2.0 * std::f64::consts::PI * consts.hbar);
        Self { b_field, flux, gamma_b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationState {
    pub omega: f64,
    pub u: f64,
}

impl RotationState {
    pub fn new(omega: f64, geometry: &RingGeometry) -> Result<Self> {
        let u = omega / geometry.fundamental_frequency();
        check_u(u)?;
        Ok(Self { omega, u })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandState {
    #[serde(rename = "M")]
    pub m: i64,
    pub lower_edge_u: f64,
    pub upper_edge_u: f64,
    pub prefactor: i64,
}

/// Single-particle poles `ω_m = a·m − s` of the rotating charged problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSpectrum {
    pub slope_a: f64,
    pub shift_s: f64,
}

impl PoleSpectrum {
    pub fn new(u: f64, gamma_b: f64) -> Self {
        Self { slope_a: 0.5 * (1.0 - u * u), shift_s: gamma_b * u }
    }

    pub fn pole(&self, m: i64) -> f64 {
        self.slope_a * m as f64 - self.shift_s
    }

    /// Poles that crossed zero: `m > 0` with `ω_m < 0`, or `m < 0` with
    /// `ω_m > 0`. Counted by brute force up to `|m| ≤ limit`.
    pub fn crossed(&self, limit: i64) -> (usize, usize) {
        let pos = (1..=limit).filter(|&m| self.pole(m) < 0.0).count();
        let neg = (1..=limit).filter(|&m| self.pole(-m) > 0.0).count();
        (pos, neg)
    }
}

/// `2γ_B u/(1 − u²)`, whose floor is the band index.
pub fn band_argument(u: f64, gamma_b: f64) -> f64 {
    2.0 * gamma_b * u / ((1.0 - u) * (1.0 + u))
}

pub fn band_index(u: f64, gamma_b: f64) -> i64 {
    band_argument(u, gamma_b).floor() as i64
}

/// `Some(n)` when `u` sits exactly on the boundary between bands `n−1` and
/// `n` (the `u = 0` crossing is harmless and never reported).
pub fn boundary_at(u: f64, gamma_b: f64) -> Option<i64> {
    let arg = band_argument(u, gamma_b);
    (arg != 0.0 && arg == arg.floor()).then_some(arg as i64)
}

/// Band index with an explicit one-sided limit at a boundary.
pub fn band_index_sided(u: f64, gamma_b: f64, side: Side) -> i64 {
    match boundary_at(u, gamma_b) {
        None => band_index(u, gamma_b),
        Some(n) => {
            // The argument grows with u when γ_B > 0.
            let upward = (side == Side::Above) == (gamma_b > 0.0);
            if upward {
                n
            } else {
                n - 1
            }
        }
    }
}

pub fn prefactor(m: i64) -> i64 {
    1 + 6 * m * (m + 1)
}

/// Root in (−1, 1) of `n u² + 2γ_B u − n = 0`, without cancellation.
fn boundary_root(n: i64, gamma_b: f64) -> f64 {
    let n = n as f64;
    n / (gamma_b + gamma_b.signum() * gamma_b.hypot(n))
}

/// `u` at which the band argument equals `n`.
pub fn band_boundary(n: i64, gamma_b: f64) -> Result<f64> {
    if gamma_b == 0.0 {
        return Err(Error::NoFlux);
    }
    if n == 0 {
        return Err(Error::InvalidInput("band boundary index must be nonzero".into()));
    }
    Ok(boundary_root(n, gamma_b))
}

pub fn band_state(u: f64, gamma_b: f64) -> BandState {
    band_state_for(band_index(u, gamma_b), gamma_b)
}

/// Edges of band `m` along the `u` axis (the whole interval when γ_B = 0).
pub fn band_state_for(m: i64, gamma_b: f64) -> BandState {
    let edge = |n: i64| if n == 0 { 0.0 } else { boundary_root(n, gamma_b) };
    let (lower_edge_u, upper_edge_u) = if gamma_b == 0.0 {
        (-1.0, 1.0)
    } else if gamma_b > 0.0 {
        (edge(m), edge(m + 1))
    } else {
        (edge(m + 1), edge(m))
    };
    BandState { m, lower_edge_u, upper_edge_u, prefactor: prefactor(m) }
}

/// `Ω_ch = ħv/(e|B|R³)`, the spacing of band boundaries in `Ω`.
pub fn characteristic_frequency(b_field: f64, radius: f64, wave_speed: f64, consts: &PhysicalConstants) -> Result<f64> {
    if b_field == 0.0 {
        return Err(Error::NoFlux);
    }
    Ok(consts.hbar * wave_speed / (consts.e * b_field.abs() * radius.powi(3)))
}

fn check_inputs(u: f64, gamma_b: f64, d: Degeneracy) -> Result<()> {
    check_u(u)?;
    if !d.is_charged() && gamma_b != 0.0 {
        return Err(Error::NeutralWithFlux { gamma_b });
    }
    Ok(())
}

fn energy_for_band(m: i64, u: f64, d: Degeneracy, frame: Frame) -> f64 {
    let sign = match frame {
        Frame::Lab => 1.0,
        Frame::Corotating => -1.0,
    };
    -d.factor() / 48.0 * prefactor(m) as f64 * (1.0 + sign * u * u)
}

/// Zero-point energy in units `ħv/R`; on a boundary the upper band is used.
pub fn zp_energy(u: f64, gamma_b: f64, d: Degeneracy, frame: Frame) -> Result<f64> {
    check_inputs(u, gamma_b, d)?;
    Ok(energy_for_band(band_index(u, gamma_b), u, d, frame))
}

pub fn zp_energy_sided(u: f64, gamma_b: f64, d: Degeneracy, frame: Frame, side: Side) -> Result<f64> {
    check_inputs(u, gamma_b, d)?;
    Ok(energy_for_band(band_index_sided(u, gamma_b, side), u, d, frame))
}

/// Zero-point angular momentum in units of `ħ`.
pub fn zp_angular_momentum(u: f64, gamma_b: f64, d: Degeneracy) -> Result<f64> {
    check_inputs(u, gamma_b, d)?;
    if let Some(n) = boundary_at(u, gamma_b) {
        return Err(Error::OnBandBoundary { u, n });
    }
    Ok(-d.factor() / 24.0 * prefactor(band_index(u, gamma_b)) as f64 * u)
}

pub fn zp_angular_momentum_sided(u: f64, gamma_b: f64, d: Degeneracy, side: Side) -> Result<f64> {
    check_inputs(u, gamma_b, d)?;
    Ok(-d.factor() / 24.0 * prefactor(band_index_sided(u, gamma_b, side)) as f64 * u)
}

/// `−d·ħR/(24v)`, in kg·m².
pub fn zp_moment_of_inertia(radius: f64, wave_speed: f64, d: Degeneracy, consts: &PhysicalConstants) -> f64 {
    -d.factor() * consts.hbar * radius / (24.0 * wave_speed)
}

pub fn enhancement_factor(gamma_b: f64) -> Result<f64> {
    if gamma_b == 0.0 {
        return Err(Error::NoFlux);
    }
    Ok(24.0 * gamma_b * gamma_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumEstimate {
    pub value: f64,
    /// Band index at the evaluation point.
    #[serde(rename = "M")]
    pub m: i64,
    /// False when fewer than ten bands have been crossed; the estimate is
    /// then only indicative.
    pub in_regime: bool,
}

/// Many-band approximation `−(d/2)γ_B²u²`.
pub fn zp_energy_continuum(u: f64, gamma_b: f64, d: Degeneracy) -> Result<ContinuumEstimate> {
    check_inputs(u, gamma_b, d)?;
    let m = band_index(u, gamma_b);
    let crossed = m.max(-m - 1);
    Ok(ContinuumEstimate {
        value: -0.5 * d.factor() * gamma_b * gamma_b * u * u,
        m,
        in_regime: crossed >= 10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const C: PhysicalConstants = PhysicalConstants::CODATA;
    const D1: Degeneracy = Degeneracy::NEUTRAL;
    const D2: Degeneracy = Degeneracy::CHARGED;

    #[test]
    fn band_index_examples() {
        assert_eq!(band_index(0.0, 500.0), 0);
        assert_eq!(band_index(1.0001e-3, 500.0), 1);
        assert_eq!(band_index(-1.0001e-3, 500.0), -2);
        assert_eq!(prefactor(1), 13);
        assert_eq!(prefactor(-2), 13);
    }

    #[test]
    fn boundary_examples() {
        let u1 = band_boundary(1, 500.0).unwrap();
        // direct quadratic formula as oracle
        let naive = (-500.0 + (500.0f64 * 500.0 + 1.0).sqrt()) / 1.0;
        assert_relative_eq!(u1, naive, max_relative = 1e-9);
        assert_abs_diff_eq!(u1, 9.99999e-4, epsilon = 1e-9);
        assert_eq!(band_boundary(-1, 500.0).unwrap(), -u1);
        let g = 1e7;
        assert_relative_eq!(band_boundary(3, g).unwrap() * 2.0 * g / 3.0, 1.0, max_relative = 1e-12);
        assert_eq!(band_boundary(1, 0.0), Err(Error::NoFlux));
    }

    #[test]
    fn boundary_consistency() {
        for &g in &[3.0, 500.0, 1.3e4] {
            for n in -6i64..=6 {
                if n == 0 {
                    continue;
                }
                let un = band_boundary(n, g).unwrap();
                let (hi, lo) = if un > 0.0 { (un * (1.0 + 1e-9), un * (1.0 - 1e-9)) } else { (un * (1.0 - 1e-9), un * (1.0 + 1e-9)) };
                assert_eq!(band_index(hi, g), n, "n={n} g={g}");
                assert_eq!(band_index(lo, g), n - 1, "n={n} g={g}");
            }
        }
    }

    #[test]
    fn sided_limits() {
        // γ_B = 0.75, u = 0.5 gives an argument of exactly 1.
        let (u, g) = (0.5, 0.75);
        assert_eq!(boundary_at(u, g), Some(1));
        assert_eq!(band_index_sided(u, g, Side::Above), 1);
        assert_eq!(band_index_sided(u, g, Side::Below), 0);
        assert_eq!(band_index_sided(u, -g, Side::Below), -1);
        assert_eq!(band_index_sided(u, -g, Side::Above), -2);
        assert!(matches!(zp_angular_momentum(u, g, D2), Err(Error::OnBandBoundary { n: 1, .. })));
        assert_eq!(zp_energy(u, g, D2, Frame::Lab).unwrap(), zp_energy_sided(u, g, D2, Frame::Lab, Side::Above).unwrap());
    }

    #[test]
    fn band_edges_bracket() {
        for &(u, g) in &[(2e-3, 500.0), (-2e-3, 500.0), (2e-3, -500.0), (0.3, 7.0)] {
            let b = band_state(u, g);
            assert!(b.lower_edge_u <= u && u < b.upper_edge_u, "{b:?} u={u}");
        }
    }

    #[test]
    fn pole_count_matches_index() {
        for &(u, g) in &[(1.0001e-3, 500.0), (0.01, 500.0), (0.37, 40.0), (-0.01, 500.0), (-0.2, 33.0)] {
            let m = band_index(u, g);
            let (pos, neg) = PoleSpectrum::new(u, g).crossed(100_000);
            if u > 0.0 {
                assert_eq!(pos as i64, m);
                assert_eq!(neg, 0);
            } else {
                assert_eq!(neg as i64, -m - 1);
                assert_eq!(pos, 0);
            }
        }
    }

    #[test]
    fn energy_examples() {
        assert_abs_diff_eq!(zp_energy(0.0, 0.0, D1, Frame::Lab).unwrap(), -1.0 / 48.0, epsilon = 1e-15);
        let u = band_boundary(1, 500.0).unwrap();
        let e = zp_energy_sided(u, 500.0, D2, Frame::Lab, Side::Above).unwrap();
        assert_abs_diff_eq!(e, -13.0 / 24.0, epsilon = 1e-6);
        assert_abs_diff_eq!(zp_energy(0.5, 0.0, D1, Frame::Corotating).unwrap(), -0.015625, epsilon = 1e-15);
        assert!(matches!(zp_energy(0.1, 3.0, D1, Frame::Lab), Err(Error::NeutralWithFlux { .. })));
        assert!(matches!(zp_energy(1.0, 0.0, D1, Frame::Lab), Err(Error::SuperluminalCut { .. })));
    }

    #[test]
    fn angular_momentum_examples() {
        assert_eq!(zp_angular_momentum(0.0, 500.0, D2).unwrap(), 0.0);
        assert_abs_diff_eq!(zp_angular_momentum(1.5e-3, 500.0, D2).unwrap(), -1.625e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(zp_angular_momentum(0.3, 0.0, D1).unwrap(), -0.3 / 24.0, epsilon = 1e-15);
    }

    #[test]
    fn moment_of_inertia_examples() {
        let i = zp_moment_of_inertia(1.0, C.c, D1, &C);
        assert_relative_eq!(i, -1.466e-44, max_relative = 1e-3);
        assert_relative_eq!(zp_moment_of_inertia(2.0, C.c, D1, &C), 2.0 * i);
        assert_relative_eq!(zp_moment_of_inertia(1e-4, 8.1e5, Degeneracy::NANOTUBE, &C), -2.17e-48, max_relative = 2e-3);
    }

    #[test]
    fn characteristic_frequency_examples() {
        let f = |b, r, v| characteristic_frequency(b, r, v, &C).unwrap();
        assert_relative_eq!(f(100.0, 1e-2, C.c), 1.975e-3, max_relative = 1e-3);
        assert_relative_eq!(f(1.0, 1e-3, C.c), 197.5, max_relative = 1e-3);
        let w = f(50.0, 1.164e-4, 8.1e5);
        assert_relative_eq!(w, 6.73, max_relative = 6e-3);
        assert_relative_eq!(2.0 * std::f64::consts::PI / w, 0.93, max_relative = 1e-3);
        assert_relative_eq!(2.0 * std::f64::consts::PI / w, 0.92, max_relative = 0.05);
        // equals (v/R)/(2γ_B)
        let bg = MagneticBackground::new(1.0, 1e-3, &C);
        assert_relative_eq!(f(1.0, 1e-3, C.c), C.c / 1e-3 / (2.0 * bg.gamma_b), max_relative = 1e-12);
        assert_eq!(characteristic_frequency(0.0, 1.0, 1.0, &C), Err(Error::NoFlux));
    }

    #[test]
    fn enhancement_examples() {
        let g = |b: f64, r: f64| MagneticBackground::new(b, r, &C).gamma_b;
        let f1 = enhancement_factor(g(1.0, 1e-2)).unwrap();
        assert_relative_eq!(f1, 1.39e23, max_relative = 5e-3);
        assert_relative_eq!(enhancement_factor(g(1.0, 1e-4)).unwrap(), 1.39e15, max_relative = 5e-3);
        assert_relative_eq!(enhancement_factor(2.0 * g(1.0, 1e-2)).unwrap(), 4.0 * f1, max_relative = 1e-14);
        // f = 6/(Ω_ch R/v)²
        let w = characteristic_frequency(1.0, 1e-2, C.c, &C).unwrap();
        assert_relative_eq!(f1, 6.0 / (w * 1e-2 / C.c).powi(2), max_relative = 1e-12);
        assert_eq!(prefactor(8), 433);
        assert_eq!(prefactor(9), 541);
    }

    #[test]
    fn continuum_limit() {
        let est = zp_energy_continuum(0.1, 500.0, D2).unwrap();
        assert_abs_diff_eq!(est.value, -25.0 * 100.0, epsilon = 1e-9);
        assert!(est.in_regime);
        let (u, g) = (1e-2, 1e5);
        let exact = zp_energy(u, g, D2, Frame::Lab).unwrap();
        let approx = zp_energy_continuum(u, g, D2).unwrap().value;
        assert_relative_eq!(exact / approx, 1.0, max_relative = 1e-3);
        assert!(!zp_energy_continuum(5e-4, 500.0, D2).unwrap().in_regime);
    }

    #[test]
    fn neutral_limit_of_charged() {
        for &u in &[0.0, 0.2, -0.7] {
            for frame in [Frame::Lab, Frame::Corotating] {
                let c = zp_energy(u, 0.0, D2, frame).unwrap();
                let n = zp_energy(u, 0.0, D1, frame).unwrap();
                assert_eq!(c, 2.0 * n);
            }
        }
    }

    #[test]
    fn thermodynamic_identity_in_band() {
        // E is quadratic in u inside a band, so a central difference with a
        // step that stays inside the band is exact up to rounding.
        for &(u, g, d) in &[(0.3, 0.0, D1), (1.5e-3, 500.0, D2), (0.02, 500.0, Degeneracy::NANOTUBE), (-0.4, 2.0, D2)] {
            let b = band_state(u, g);
            let h = 0.2 * (b.upper_edge_u - b.lower_edge_u).min(2.0 * (u - b.lower_edge_u)).min(2.0 * (b.upper_edge_u - u));
            let e = |x| zp_energy(x, g, d, Frame::Lab).unwrap();
            let et = |x| zp_energy(x, g, d, Frame::Corotating).unwrap();
            let l = zp_angular_momentum(u, g, d).unwrap();
            assert_relative_eq!((e(u + h) - e(u - h)) / (2.0 * h), l, max_relative = 1e-8);
            assert_relative_eq!(-(et(u + h) - et(u - h)) / (2.0 * h), l, max_relative = 1e-8);
            assert_relative_eq!(et(u), e(u) - u * l, max_relative = 1e-14);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn parity(u in -0.99f64..0.99, g in 0.0f64..1e4) {
                prop_assume!(boundary_at(u, g).is_none() && boundary_at(-u, g).is_none());
                let m = band_index(u, g);
                let mm = band_index(-u, g);
                prop_assume!(mm == -m - 1 || u == 0.0);
                prop_assert_eq!(zp_energy(-u, g, D2, Frame::Lab).unwrap(), zp_energy(u, g, D2, Frame::Lab).unwrap());
                prop_assert_eq!(zp_angular_momentum(-u, g, D2).unwrap(), -zp_angular_momentum(u, g, D2).unwrap());
            }

            #[test]
            fn mirror_index(u in 1e-6f64..0.99, g in 0.0f64..1e4) {
                let arg = band_argument(u, g);
                prop_assume!(arg != arg.floor());
                prop_assert_eq!(band_index(-u, g), -band_index(u, g) - 1);
            }

            #[test]
            fn legendre(u in -0.99f64..0.99, g in -1e3f64..1e3) {
                prop_assume!(boundary_at(u, g).is_none());
                let e = zp_energy(u, g, D2, Frame::Lab).unwrap();
                let et = zp_energy(u, g, D2, Frame::Corotating).unwrap();
                let l = zp_angular_momentum(u, g, D2).unwrap();
                prop_assert!((et - (e - u * l)).abs() <= 1e-12 * e.abs().max(1.0));
            }

            #[test]
            fn prefactor_symmetric(m in -10_000i64..10_000) {
                prop_assert_eq!(prefactor(m), prefactor(-m - 1));
                prop_assert!(prefactor(m) >= 1);
            }
        }
    }
}
