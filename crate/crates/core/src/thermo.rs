//! Energy as a function of angular momentum, the corotating-frame energy,
//! and numerical checks of the relations `L = ∂E/∂Ω = −∂Ẽ/∂Ω` and of the
//! one-sided limit `∂E/∂L → Ω*` at a rotating ground state.

use rayon::prelude::*;
use serde::Serialize;

use crate::device::{band_angular_momentum, band_energy, ground_state, total_angular_momentum, total_energy, DeviceSpec, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::spectrum::{self, band_index, band_index_sided, band_state_for, boundary_at, Frame, Side};
use crate::units::U_GUARD;

/// Grid points closer than this (relative) to a band boundary are moved off it.
pub const BOUNDARY_SNAP: f64 = 1e-9;
/// Interior points a band needs before it is checked.
pub const MIN_BAND_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorotatingEnergy {
    /// Zero-point part as `E − ΩL`, J.
    pub zp_legendre: f64,
    /// Zero-point part from the `(1 − u²)` closed form, J.
    pub zp_closed: f64,
    /// `E_total − Ω·L_total`, J.
    pub total: f64,
}

/// Energy in the frame rotating with the cut. `side` is required on a band
/// boundary.
pub fn corotating_energy(omega: f64, spec: &DeviceSpec, side: Option<Side>) -> Result<CorotatingEnergy> {
    let u = spec.u(omega);
    let side = match (side, boundary_at(u, spec.gamma_b())) {
        (Some(s), _) => s,
        (None, None) => Side::Above,
        (None, Some(n)) => return Err(Error::OnBandBoundary { u, n }),
    };
    let d = spec.material.degeneracy;
    let count = spec.array_count as f64;
    let unit = spec.energy_unit();
    let e = spectrum::zp_energy_sided(u, spec.gamma_b(), d, Frame::Lab, side)? * unit;
    let l = spectrum::zp_angular_momentum_sided(u, spec.gamma_b(), d, side)? * spec.constants.hbar;
    let closed = spectrum::zp_energy_sided(u, spec.gamma_b(), d, Frame::Corotating, side)? * unit;
    let total = total_energy(omega, spec, side)? - omega * total_angular_momentum(omega, spec, side)?;
    Ok(CorotatingEnergy { zp_legendre: count * (e - omega * l), zp_closed: count * closed, total })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ELPoint {
    pub omega: f64,
    pub l_total: f64,
    pub e_total: f64,
    pub band: i64,
    pub boundary_flag: bool,
}

/// `Ω` of the boundary where the band argument equals `n`.
fn boundary_omega(spec: &DeviceSpec, n: i64) -> Result<f64> {
    Ok(spec.omega(spectrum::band_boundary(n, spec.gamma_b())?))
}

/// Moves `omega` off a nearby boundary, keeping it on its own side.
fn snap(spec: &DeviceSpec, omega: f64) -> Result<f64> {
    let g = spec.gamma_b();
    if g == 0.0 || omega == 0.0 {
        return Ok(omega);
    }
    let arg = spectrum::band_argument(spec.u(omega), g);
    let n = arg.round();
    if n == 0.0 || (arg - n).abs() > BOUNDARY_SNAP * arg.abs() {
        return Ok(omega);
    }
    let wb = boundary_omega(spec, n as i64)?;
    let away = if omega >= wb { 1.0 + BOUNDARY_SNAP } else { 1.0 - BOUNDARY_SNAP };
    // scale the magnitude, so "above" means further from the origin
    let moved = if (omega >= wb) == (wb > 0.0) { wb * away.max(1.0 / away) } else { wb * away.min(1.0 / away) };
    Ok(moved)
}

fn point(spec: &DeviceSpec, omega: f64, band: i64, boundary_flag: bool) -> Result<ELPoint> {
    Ok(ELPoint {
        omega,
        l_total: band_angular_momentum(omega, band, spec)?,
        e_total: band_energy(omega, band, spec)?,
        band,
        boundary_flag,
    })
}

/// Parametric `(L(Ω), E(Ω))` samples in increasing `Ω`. Every crossed band
/// boundary contributes both one-sided limits, flagged. The `u = 0` change
/// of label between bands −1 and 0 is not a discontinuity and is not flagged.
pub fn el_curve(spec: &DeviceSpec, omega_grid: &[f64]) -> Result<Vec<ELPoint>> {
    let mut grid = omega_grid
        .iter()
        .map(|&w| {
            crate::units::check_u(spec.u(w))?;
            snap(spec, w)
        })
        .collect::<Result<Vec<_>>>()?;
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let g = spec.gamma_b();
    let mut out: Vec<ELPoint> = Vec::with_capacity(grid.len());
    for (i, &w) in grid.iter().enumerate() {
        let m = band_index(spec.u(w), g);
        if i > 0 {
            let prev = grid[i - 1];
            let pm = band_index(spec.u(prev), g);
            if pm != m {
                let (lo, hi) = (pm.min(m), pm.max(m));
                let mut crossings = ((lo + 1)..=hi)
                    .filter(|&n| n != 0)
                    .map(|n| boundary_omega(spec, n))
                    .collect::<Result<Vec<_>>>()?;
                crossings.sort_by(f64::total_cmp);
                for wb in crossings {
                    let ub = spec.u(wb);
                    for side in [Side::Below, Side::Above] {
                        let band = match boundary_at(ub, g) {
                            Some(_) => band_index_sided(ub, g, side),
                            // rounding moved the image off the exact boundary
                            None => {
                                let n = spectrum::band_argument(ub, g).round() as i64;
                                let upward = (side == Side::Above) == (g > 0.0);
                                if upward { n } else { n - 1 }
                            }
                        };
                        out.push(point(spec, wb, band, true)?);
                    }
                }
            }
        }
        out.push(point(spec, w, m, false)?);
    }
    Ok(out)
}

/// `k` evenly spaced points strictly inside band `m`.
pub fn band_grid(spec: &DeviceSpec, m: i64, k: usize) -> Vec<f64> {
    let b = band_state_for(m, spec.gamma_b());
    let (lo, hi) = (b.lower_edge_u.max(-U_GUARD), b.upper_edge_u.min(U_GUARD));
    (1..=k)
        .map(|i| spec.omega(lo + (hi - lo) * i as f64 / (k + 1) as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneSidedCheck {
    pub omega_star: f64,
    pub band: i64,
    /// One-sided `∂E/∂L` on the side where the ground-state band continues.
    pub slope: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub band: i64,
    pub points: usize,
    /// max relative `|L − ∂E/∂Ω|`
    pub l_vs_energy_slope: f64,
    /// max relative `|L + ∂Ẽ/∂Ω|`
    pub l_vs_corotating_slope: f64,
    /// max relative `|(E − ΩL) − Ẽ_closed|` for the zero-point part
    pub legendre_gap: f64,
    pub ground_state: OneSidedCheck,
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Three-point one-sided derivative of `f` at `x` with step `h` (either
/// sign), refined once by step halving.
fn one_sided(f: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let stencil = |h: f64| -> Result<f64> { Ok((-3.0 * f(x)? + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h)) };
    let (coarse, fine) = (stencil(h)?, stencil(0.5 * h)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Ground-state one-sided limit of `∂E/∂L` against `Ω*`.
pub fn ground_state_slope(spec: &DeviceSpec, n_max: i64) -> Result<OneSidedCheck> {
    let mut positive = *spec;
    positive.background.gamma_b = spec.gamma_b().abs();
    let spec = &positive;
    let gs = ground_state(spec, n_max)?;
    let m = gs.band;
    let b = band_state_for(m, spec.gamma_b());
    let (lo, hi) = (b.lower_edge_u.max(-U_GUARD), b.upper_edge_u.min(U_GUARD));
    let width = spec.omega(hi - lo);
    // step into the band from whichever edge the minimum sits on
    let h = if spec.u(gs.omega_star) < 0.5 * (lo + hi) { 1e-4 * width } else { -1e-4 * width };
    let de = one_sided(&|w| band_energy(w, m, spec), gs.omega_star, h)?;
    let dl = one_sided(&|w| band_angular_momentum(w, m, spec), gs.omega_star, h)?;
    let slope = de / dl;
    let residual = if gs.omega_star == 0.0 {
        slope.abs() / spec.geometry.fundamental_frequency()
    } else {
        rel(slope, gs.omega_star)
    };
    Ok(OneSidedCheck { omega_star: gs.omega_star, band: m, slope, residual })
}

/// Thermodynamic residuals for band `m`, using the points of `omega_grid`
/// that fall strictly inside it.
pub fn consistency_report(spec: &DeviceSpec, m: i64, omega_grid: &[f64]) -> Result<ConsistencyReport> {
    let g = spec.gamma_b();
    let b = band_state_for(m, g);
    let (lo, hi) = (b.lower_edge_u.max(-U_GUARD), b.upper_edge_u.min(U_GUARD));
    let inside: Vec<f64> = omega_grid
        .iter()
        .copied()
        .filter(|&w| {
            let u = spec.u(w);
            u > lo && u < hi && band_index(u, g) == m
        })
        .collect();
    if inside.len() < MIN_BAND_POINTS {
        return Err(Error::InsufficientPoints { band: m, found: inside.len(), needed: MIN_BAND_POINTS });
    }

    let residuals = inside
        .par_iter()
        .map(|&w| -> Result<(f64, f64, f64)> {
            let u = spec.u(w);
            // E is quadratic in Ω inside a band, so a wide central step is exact
            let h = spec.omega(0.2 * (u - lo).min(hi - u));
            let e = |x: f64| band_energy(x, m, spec);
            let et = |x: f64| -> Result<f64> { Ok(band_energy(x, m, spec)? - x * band_angular_momentum(x, m, spec)?) };
            let l = band_angular_momentum(w, m, spec)?;
            let de = (e(w + h)? - e(w - h)?) / (2.0 * h);
            let det = (et(w + h)? - et(w - h)?) / (2.0 * h);
            let co = corotating_energy(w, spec, Some(Side::Above))?;
            Ok((rel(l, de), rel(l, -det), rel(co.zp_legendre, co.zp_closed)))
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |k: fn(&(f64, f64, f64)) -> f64| residuals.iter().map(k).fold(0.0, f64::max);

    Ok(ConsistencyReport {
        band: m,
        points: inside.len(),
        l_vs_energy_slope: max(|r| r.0),
        l_vs_corotating_slope: max(|r| r.1),
        legendre_gap: max(|r| r.2),
        ground_state: ground_state_slope(spec, DEFAULT_N_MAX)?,
    })
}

/// Largest mismatch between flagged discontinuities of an E(L) curve and
/// the band-boundary images, plus the number of unflagged band jumps.
pub fn discontinuity_placement(spec: &DeviceSpec, curve: &[ELPoint]) -> Result<(f64, usize)> {
    let mut worst = 0.0f64;
    let mut stray = 0;
    for pair in curve.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let jump = spectrum::prefactor(a.band) != spectrum::prefactor(b.band);
        if a.boundary_flag && b.boundary_flag && a.omega == b.omega {
            // boundary n separates bands n − 1 and n
            let expected = boundary_omega(spec, a.band.max(b.band))?;
            worst = worst.max(rel(a.omega, expected));
        } else if jump {
            stray += 1;
        }
    }
    Ok((worst, stray))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::Status;
    use crate::units::{b_field_for_gamma, MaterialSpec, PhysicalConstants, Preset};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const C: PhysicalConstants = PhysicalConstants::CODATA;

    fn ring500() -> DeviceSpec {
        let material = MaterialSpec::preset(Preset::PhotonCharged, &C);
        let b = b_field_for_gamma(500.0, 1.0, &C);
        DeviceSpec::new(b, 1.0, material, C).unwrap().with_i_cl(8e5 * C.hbar / C.c).unwrap()
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn corotating_examples() {
        let spec = ring500();
        let unit = spec.energy_unit();
        let c0 = corotating_energy(0.0, &spec, None).unwrap();
        assert_eq!(c0.total, total_energy(0.0, &spec, Side::Above).unwrap());

        let u = 1.5e-3;
        let c = corotating_energy(spec.omega(u), &spec, None).unwrap();
        assert_relative_eq!(c.zp_closed / unit, -13.0 * (1.0 - u * u) / 24.0, max_relative = 1e-12);
        assert_relative_eq!(c.zp_legendre, c.zp_closed, max_relative = 1e-14);

        let material = MaterialSpec::preset(Preset::PhotonNeutral, &C);
        let neutral = DeviceSpec::new(0.0, 1.0, material, C).unwrap();
        let c = corotating_energy(neutral.omega(0.5), &neutral, None).unwrap();
        assert_relative_eq!(c.zp_closed / neutral.energy_unit(), -0.75 / 48.0, max_relative = 1e-14);

        let edge = spec.omega(spectrum::band_boundary(1, spec.gamma_b()).unwrap());
        let on = spec.u(edge);
        if boundary_at(on, spec.gamma_b()).is_some() {
            assert!(matches!(corotating_energy(edge, &spec, None), Err(Error::OnBandBoundary { .. })));
        }
    }

    #[test]
    fn el_curve_reference_ring() {
        let spec = ring500();
        let w1 = boundary_omega(&spec, 1).unwrap();
        let curve = el_curve(&spec, &linspace(-3.5 * w1, 3.5 * w1, 141)).unwrap();
        assert!(curve.windows(2).all(|p| p[0].omega <= p[1].omega));
        let zero = curve.iter().find(|p| p.omega == 0.0).unwrap();
        assert_eq!(zero.l_total, 0.0);
        assert_eq!(zero.e_total, total_energy(0.0, &spec, Side::Above).unwrap());

        let flagged = curve.iter().filter(|p| p.boundary_flag).count();
        assert_eq!(flagged, 2 * 6);
        let (worst, stray) = discontinuity_placement(&spec, &curve).unwrap();
        assert!(worst <= 1e-15, "{worst}");
        assert_eq!(stray, 0);

        // two symmetric minima at L ≠ 0, at the first boundary images
        let min = curve.iter().fold(curve[0], |a, &p| if p.e_total < a.e_total { p } else { a });
        assert!(min.boundary_flag && min.l_total != 0.0);
        let mirror = curve.iter().filter(|p| (p.e_total - min.e_total).abs() <= 1e-12 * min.e_total.abs()).count();
        assert_eq!(mirror, 2);
        assert_relative_eq!(min.omega.abs(), w1, max_relative = 1e-15);
    }

    #[test]
    fn el_curve_without_field() {
        let material = MaterialSpec::preset(Preset::PhotonCharged, &C);
        let spec = DeviceSpec::new(0.0, 1.0, material, C).unwrap().with_i_cl(1.0).unwrap();
        let curve = el_curve(&spec, &linspace(-1e3, 1e3, 101)).unwrap();
        assert!(curve.iter().all(|p| !p.boundary_flag && p.band == 0));
        let min = curve.iter().fold(curve[0], |a, &p| if p.e_total < a.e_total { p } else { a });
        assert_eq!(min.l_total, 0.0);
    }

    #[test]
    fn convex_within_bands() {
        let spec = ring500();
        let w1 = boundary_omega(&spec, 1).unwrap();
        let curve = el_curve(&spec, &linspace(0.0, 4.5 * w1, 301)).unwrap();
        for seg in curve.split(|p| p.boundary_flag) {
            for t in seg.windows(3) {
                let s1 = (t[1].e_total - t[0].e_total) / (t[1].l_total - t[0].l_total);
                let s2 = (t[2].e_total - t[1].e_total) / (t[2].l_total - t[1].l_total);
                assert!(s2 >= s1 * (1.0 - 1e-9), "{s1} {s2}");
            }
        }
    }

    #[test]
    fn snapping() {
        let spec = ring500();
        let w1 = boundary_omega(&spec, 1).unwrap();
        let curve = el_curve(&spec, &[0.0, w1, 2.0 * w1 * 0.99]).unwrap();
        let on_grid: Vec<_> = curve.iter().filter(|p| !p.boundary_flag).collect();
        assert!(on_grid.iter().all(|p| boundary_at(spec.u(p.omega), spec.gamma_b()).is_none()));
        assert_relative_eq!(on_grid[1].omega, w1 * (1.0 + BOUNDARY_SNAP), max_relative = 1e-15);
    }

    #[test]
    fn report_band1() {
        let spec = ring500();
        let grid = band_grid(&spec, 1, 9);
        let r = consistency_report(&spec, 1, &grid).unwrap();
        assert_eq!(r.points, 9);
        assert!(r.l_vs_energy_slope <= 1e-8, "{r:?}");
        assert!(r.l_vs_corotating_slope <= 1e-8, "{r:?}");
        assert!(r.legendre_gap <= 1e-14, "{r:?}");
        assert_eq!(r.ground_state.band, 1);
        assert!(r.ground_state.residual <= 1e-6, "{r:?}");
    }

    #[test]
    fn report_band0_symmetric() {
        let spec = ring500();
        let w1 = boundary_omega(&spec, 1).unwrap();
        let grid = linspace(-0.9 * w1, 0.9 * w1, 11);
        // u = 0 belongs to band 0; negative points sit in band −1
        let r = consistency_report(&spec, 0, &grid).unwrap();
        assert!(r.l_vs_energy_slope <= 1e-8);
        let at_zero = consistency_report(&spec, 0, &[0.0, 0.1 * w1, 0.2 * w1, 0.3 * w1, 0.4 * w1]);
        assert!(matches!(at_zero, Err(Error::InsufficientPoints { .. })));
        assert!(matches!(consistency_report(&spec, 1, &grid), Err(Error::InsufficientPoints { found: 0, .. })));
    }

    #[test]
    fn static_ground_state_slope() {
        let material = MaterialSpec::preset(Preset::PhotonCharged, &C);
        let spec = DeviceSpec::new(0.0, 1.0, material, C).unwrap().with_i_cl(1.0).unwrap();
        let check = ground_state_slope(&spec, DEFAULT_N_MAX).unwrap();
        assert_eq!(check.omega_star, 0.0);
        assert_abs_diff_eq!(check.residual, 0.0, epsilon = 1e-12);
        assert_eq!(ground_state(&spec, DEFAULT_N_MAX).unwrap().status, Status::Ok);
    }
}
