//! Green's functions of the ring with a Dirichlet cut, and point-split
//! extraction of the zero-point energy and angular-momentum densities.
//!
//! This is the second, independent route to the energies in
//! [`crate::spectrum`]. Derivatives are taken analytically from the closed
//! form of 𝒢, the time split is done numerically, and the `1/δt²`
//! divergence is removed by [`crate::regsum::extract_finite_part_with`].
//!
//! Units: `R = v = ħ = 1`; `u` is the rotation `ΩR/v`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regsum::{extract_finite_part_with, geometric_grid, FinitePartFit, FitOptions};
use crate::spectrum::{band_index, boundary_at};
use crate::units::{check_u, Degeneracy};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Closer than this to the image light cone, the log is treated as singular.
pub const LIGHTCONE_EPS: f64 = 1e-13;
/// Minimum distance kept from the jumps of `Im 𝒢`.
pub const KINK_EPS: f64 = 1e-6;
/// Angles at which densities are extracted and compared.
pub const PROBE_ANGLES: [f64; 3] = [0.5, 2.0, 4.0];

/// `x` reduced to `[0, 2π)`.
pub fn mod_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `cos a − cos b` as a product, accurate when `a ≈ ±b`.
fn cos_diff(a: f64, b: f64) -> f64 {
    -2.0 * (0.5 * (a + b)).sin() * (0.5 * (a - b)).sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitPoint {
    pub t: f64,
    pub t_prime: f64,
    pub phi: f64,
    pub phi_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensAux {
    pub alpha: f64,
    pub n_start: i64,
    pub s_correction: Complex64,
    pub phase: Complex64,
}

fn check_lightcone(x: f64, y: f64, z: f64) -> Result<(f64, f64)> {
    let plus = cos_diff(x + y, z);
    let minus = cos_diff(x - y, z);
    if plus.abs() < LIGHTCONE_EPS || minus.abs() < LIGHTCONE_EPS {
        return Err(Error::LightconeSingular { x, y, z });
    }
    Ok((plus, minus))
}

/// `𝒢(x, y, z) = Σ_{m≥1} sin(mx) sin(my) e^{−imz}/m` in closed form.
pub fn calg_closed(x: f64, y: f64, z: f64) -> Result<Complex64> {
    let (plus, minus) = check_lightcone(x, y, z)?;
    let re = 0.25 * (plus / minus).abs().ln();
    let im = -0.125 * (mod_2pi(z - x - y) + mod_2pi(z + x + y) - mod_2pi(z - x + y) - mod_2pi(z + x - y));
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: Complex64,
    /// `|last term|/η`.
    pub tail_bound: f64,
}

/// Partial sum of 𝒢 with `z → z − iη`.
pub fn calg_series(x: f64, y: f64, z: f64, eta: f64, m_max: u64) -> Result<SeriesEval> {
    if !(eta > 0.0) {
        return Err(Error::InvalidInput(format!("damping must be positive, got {eta}")));
    }
    if m_max < 1000 {
        return Err(Error::InvalidInput(format!("m_max must be at least 1000, got {m_max}")));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = 0.0;
    for m in 1..=m_max {
        let mf = m as f64;
        let amp = (mf * x).sin() * (mf * y).sin() / mf * (-mf * eta).exp();
        let term = Complex64::from_polar(amp, -mf * z);
        sum += term;
        last = term.norm();
    }
    Ok(SeriesEval { value: sum, tail_bound: last / eta })
}

/// Second derivatives in the variables `(x, y, z)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Hessian {
    pub xx: Complex64,
    pub yy: Complex64,
    pub zz: Complex64,
    pub xy: Complex64,
    pub xz: Complex64,
    pub yz: Complex64,
}

impl Hessian {
    /// `Σ_ij a_i b_j H_ij`.
    pub fn bilinear(&self, a: [f64; 3], b: [f64; 3]) -> Complex64 {
        let h = [[self.xx, self.xy, self.xz], [self.xy, self.yy, self.yz], [self.xz, self.yz, self.zz]];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += h[i][j] * (a[i] * b[j]);
            }
        }
        acc
    }
}

impl std::ops::Add for Hessian {
    type Output = Hessian;

    fn add(self, o: Hessian) -> Hessian {
        Hessian {
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            zz: self.zz + o.zz,
            xy: self.xy + o.xy,
            xz: self.xz + o.xz,
            yz: self.yz + o.yz,
        }
    }
}

impl std::ops::Mul<f64> for Hessian {
    type Output = Hessian;

    fn mul(self, k: f64) -> Hessian {
        Hessian {
            xx: self.xx * k,
            yy: self.yy * k,
            zz: self.zz * k,
            xy: self.xy * k,
            xz: self.xz * k,
            yz: self.yz * k,
        }
    }
}

/// Second derivatives of `L(a, z) = ln|cos a − cos z|`.
struct LogSecond {
    aa: f64,
    zz: f64,
    az: f64,
}

fn log_second(a: f64, z: f64) -> LogSecond {
    let d = cos_diff(a, z);
    let (sa, ca) = a.sin_cos();
    let (sz, cz) = z.sin_cos();
    LogSecond {
        aa: -ca / d - sa * sa / (d * d),
        zz: cz / d - sz * sz / (d * d),
        az: sa * sz / (d * d),
    }
}

/// Hessian of 𝒢. The imaginary part is piecewise constant, so only the log
/// contributes away from its jumps.
pub fn calg_hessian(x: f64, y: f64, z: f64) -> Result<Hessian> {
    check_lightcone(x, y, z)?;
    Ok(log_hessian(x + y, x - y, z))
}

/// Same, from `s = x + y` and `d = x − y` supplied separately so that a
/// small `d` keeps full relative precision.
fn log_hessian(sum: f64, diff: f64, z: f64) -> Hessian {
    let s = log_second(sum, z);
    let d = log_second(diff, z);
    let re = |v: f64| Complex64::new(0.25 * v, 0.0);
    Hessian {
        xx: re(s.aa - d.aa),
        yy: re(s.aa - d.aa),
        zz: re(s.zz - d.zz),
        xy: re(s.aa + d.aa),
        xz: re(s.az - d.az),
        yz: re(s.az + d.az),
    }
}

/// `h_m = sin(mx) sin(my) e^{−imz}/m`.
fn h_term(m: i64, x: f64, y: f64, z: f64) -> Complex64 {
    let mf = m as f64;
    Complex64::from_polar(1.0, -mf * z) * ((mf * x).sin() * (mf * y).sin() / mf)
}

fn h_hessian(m: i64, x: f64, y: f64, z: f64) -> Hessian {
    let mf = m as f64;
    let e = Complex64::from_polar(1.0, -mf * z);
    let (sx, cx) = (mf * x).sin_cos();
    let (sy, cy) = (mf * y).sin_cos();
    Hessian {
        xx: e * (-mf * sx * sy),
        yy: e * (-mf * sx * sy),
        zz: e * (-mf * sx * sy),
        xy: e * (mf * cx * cy),
        xz: -I * e * (mf * cx * sy),
        yz: -I * e * (mf * sx * cy),
    }
}

/// Range of `m` and overall sign of the finite correction for start `n`.
fn s_terms(n: i64) -> (std::ops::Range<i64>, f64) {
    if n > 1 {
        (1..n, -1.0)
    } else if n < 0 {
        (n..0, 1.0)
    } else {
        (0..0, 0.0)
    }
}

/// Finite correction `S[h_m, N]`.
pub fn s_correction(n: i64, x: f64, y: f64, z: f64) -> Complex64 {
    let (range, sign) = s_terms(n);
    range.map(|m| h_term(m, x, y, z)).sum::<Complex64>() * sign
}

fn s_hessian(n: i64, x: f64, y: f64, z: f64) -> Hessian {
    let (range, sign) = s_terms(n);
    range.map(|m| h_hessian(m, x, y, z)).fold(Hessian::default(), |a, b| a + b) * sign
}

/// Start index of the finite correction.
pub fn n_start(m: i64, alpha: f64) -> i64 {
    if alpha > 0.0 {
        m + 1
    } else {
        -m
    }
}

/// Rotating-frame composite arguments `(X, X', Z)`.
fn composite(u: f64, pts: &SplitPoint) -> (f64, f64, f64) {
    let xa = mod_2pi(pts.phi - u * pts.t);
    let xb = mod_2pi(pts.phi_prime - u * pts.t_prime);
    let z = (1.0 - u * u) * (pts.t - pts.t_prime) - u * (xa - xb);
    (xa, xb, z)
}

/// Green's function of a neutral field on the ring with a cut rotating at `u`.
pub fn greens_neutral(u: f64, pts: &SplitPoint) -> Result<Complex64> {
    check_u(u)?;
    let (xa, xb, z) = composite(u, pts);
    if xa == 0.0 || xb == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(I / PI * calg_closed(0.5 * xa, 0.5 * xb, 0.5 * z.abs())?)
}

/// Green's function of a charged field threaded by flux `γ_B`.
pub fn greens_charged(u: f64, gamma_b: f64, pts: &SplitPoint) -> Result<(Complex64, GreensAux)> {
    check_u(u)?;
    let (xa, xb, z) = composite(u, pts);
    let alpha = (pts.t - pts.t_prime) - u * (xa - xb) / (1.0 - u * u);
    if alpha == 0.0 {
        return Err(Error::AlphaZero);
    }
    let n = n_start(band_index(u, gamma_b), alpha);
    let phase = Complex64::from_polar(1.0, gamma_b * (u * (pts.t - pts.t_prime) + xa - xb));
    if xa == 0.0 || xb == 0.0 {
        let aux = GreensAux { alpha, n_start: n, s_correction: Complex64::new(0.0, 0.0), phase };
        return Ok((Complex64::new(0.0, 0.0), aux));
    }
    let (x, y, zz) = (0.5 * xa, 0.5 * xb, 0.5 * z.abs());
    let s = s_correction(n, x, y, zz);
    let value = phase * (I / PI) * (calg_closed(x, y, zz)? + s);
    Ok((value, GreensAux { alpha, n_start: n, s_correction: s, phase }))
}

/// Which bilinear density a split evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    /// `T^{00}`
    Energy,
    /// `T^{φ0}`
    AngularMomentum,
}

/// Distance of `z ± s`, `z ± d` from the jumps of `Im 𝒢`.
fn kink_distance(sum: f64, diff: f64, z: f64) -> f64 {
    [z - sum, z + sum, z - diff, z + diff]
        .into_iter()
        .map(|a| {
            let r = mod_2pi(a);
            r.min(TAU - r)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Arguments of a purely temporal split of length `dt > 0` at rotating-frame
/// angle `xa`: the earlier point sits at `X' = X + u·dt` and `Z = dt`.
/// Returned as `(x, y, x − y, z)`, with `x − y` formed without cancellation.
fn split_arguments(u: f64, xa: f64, dt: f64) -> Result<(f64, f64, f64, f64)> {
    let xb = xa + u * dt;
    if !(xa > 0.0 && xa < TAU && xb > 0.0 && xb < TAU) {
        return Err(Error::InvalidInput(format!("split at X = {xa}, dt = {dt} crosses the cut")));
    }
    Ok((0.5 * xa, 0.5 * xb, -0.5 * u * dt, 0.5 * dt))
}

/// Per-degree-of-freedom density at one split, before subtraction.
pub fn point_split_raw(density: Density, u: f64, gamma_b: f64, xa: f64, dt: f64) -> Result<f64> {
    check_u(u)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("time split must be positive, got {dt}")));
    }
    let (x, y, d, z) = split_arguments(u, xa, dt)?;
    let sum = x + y;
    if kink_distance(sum, d, z) < KINK_EPS {
        return Err(Error::LightconeSingular { x, y, z });
    }
    check_lightcone(x, y, z)?;
    // α = dt/(1 − u²) > 0
    let n = n_start(band_index(u, gamma_b), 1.0);
    let h = log_hessian(sum, d, z) + s_hessian(n, x, y, z);
    let jt = [-0.5 * u, 0.0, 0.5];
    let jtp = [0.0, -0.5 * u, -0.5];
    let jp = [0.5, 0.0, -0.5 * u];
    let jpp = [0.0, 0.5, 0.5 * u];
    let value = match density {
        Density::Energy => (h.bilinear(jt, jtp) + h.bilinear(jp, jpp)) / (2.0 * PI),
        Density::AngularMomentum => -(h.bilinear(jt, jpp) + h.bilinear(jp, jtp)) / (2.0 * PI),
    };
    Ok(value.re)
}

/// Default split magnitudes: 8 points, geometric, from 1e-3 to 1e-1.
pub fn default_dt_grid() -> Vec<f64> {
    geometric_grid(1e-3, 1e-1, 8)
}

/// Moves grid points that land within [`KINK_EPS`] of a jump of `Im 𝒢`.
pub fn clear_kinks(u: f64, xa: f64, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&dt| {
            let mut dt = dt;
            for _ in 0..64 {
                match split_arguments(u, xa, dt) {
                    Ok((x, y, d, z)) if kink_distance(x + y, d, z) < KINK_EPS => {}
                    _ => break,
                }
                dt *= 1.0 + 1e-3;
            }
            dt
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions {
    pub max_condition: f64,
    /// Fit residual allowed on top of `relative_residual·|finite part|`.
    pub absolute_residual: f64,
    /// Residual allowed per unit finite part; higher bands carry larger
    /// `δt⁴` terms.
    pub relative_residual: f64,
    /// Allowed relative spread of the finite part over [`PROBE_ANGLES`].
    pub angle_tolerance: f64,
    /// Allowed relative deviation of the divergence from `−1/(2π)`.
    pub divergence_tolerance: f64,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            max_condition: 1e12,
            absolute_residual: 1e-7,
            relative_residual: 1e-4,
            angle_tolerance: 1e-6,
            divergence_tolerance: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityExtraction {
    pub dt_grid: Vec<f64>,
    /// Per degree of freedom, at the first probe angle.
    pub raw_values: Vec<f64>,
    pub finite_density: f64,
    /// Coefficient of `1/δt²`, per degree of freedom.
    pub divergence_coeff: f64,
    pub angles: Vec<f64>,
    pub finite_by_angle: Vec<f64>,
    pub fit_residual: f64,
}

/// Fit of the split density at one rotating-frame angle.
pub fn extract_at_angle(
    density: Density,
    u: f64,
    gamma_b: f64,
    xa: f64,
    dt_grid: &[f64],
    opts: &ExtractionOptions,
) -> Result<FinitePartFit> {
    let grid = clear_kinks(u, xa, dt_grid);
    let samples = grid
        .iter()
        .map(|&dt| point_split_raw(density, u, gamma_b, xa, dt).map(|v| (dt, v)))
        .collect::<Result<Vec<_>>>()?;
    let fit_opts = FitOptions { max_condition: opts.max_condition, residual_tolerance: f64::INFINITY };
    let mut fit = extract_finite_part_with(&samples, &fit_opts)?;
    let tolerance = opts.absolute_residual + opts.relative_residual * fit.finite_part().abs();
    fit.reliable = fit.residual <= tolerance;
    if !fit.reliable {
        return Err(Error::FitUnreliable { residual: fit.residual, tolerance });
    }
    Ok(fit)
}

fn check_field(u: f64, gamma_b: f64, d: Degeneracy) -> Result<()> {
    check_u(u)?;
    if !d.is_charged() && gamma_b != 0.0 {
        return Err(Error::NeutralWithFlux { gamma_b });
    }
    Ok(())
}

pub fn t00_pointsplit(u: f64, gamma_b: f64, d: Degeneracy, dt_grid: &[f64]) -> Result<DensityExtraction> {
    t00_pointsplit_with(u, gamma_b, d, dt_grid, &ExtractionOptions::default())
}

pub fn t00_pointsplit_with(
    u: f64,
    gamma_b: f64,
    d: Degeneracy,
    dt_grid: &[f64],
    opts: &ExtractionOptions,
) -> Result<DensityExtraction> {
    check_field(u, gamma_b, d)?;
    let fits = PROBE_ANGLES
        .iter()
        .map(|&xa| extract_at_angle(Density::Energy, u, gamma_b, xa, dt_grid, opts))
        .collect::<Result<Vec<_>>>()?;

    let finite_by_angle: Vec<f64> = fits.iter().map(|f| d.factor() * f.finite_part()).collect();
    let scale = finite_by_angle.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let spread = finite_by_angle.iter().fold(0.0f64, |a, v| a.max((v - finite_by_angle[0]).abs()));
    if spread > opts.angle_tolerance * scale {
        return Err(Error::FitUnreliable { residual: spread / scale, tolerance: opts.angle_tolerance });
    }
    let divergence_coeff = fits.iter().map(|f| f.divergence()).sum::<f64>() / fits.len() as f64;
    let expected = -1.0 / (2.0 * PI);
    let miss = (divergence_coeff / expected - 1.0).abs();
    if miss > opts.divergence_tolerance {
        return Err(Error::FitUnreliable { residual: miss, tolerance: opts.divergence_tolerance });
    }
    let first = &fits[0];
    Ok(DensityExtraction {
        dt_grid: first.epsilons.clone(),
        raw_values: first.samples.clone(),
        finite_density: finite_by_angle.iter().sum::<f64>() / finite_by_angle.len() as f64,
        divergence_coeff,
        angles: PROBE_ANGLES.to_vec(),
        finite_by_angle,
        fit_residual: fits.iter().map(|f| f.residual).fold(0.0, f64::max),
    })
}

/// Angular-momentum density `T^{φ0}`, extracted by point splitting.
pub fn tphi0_density(u: f64, gamma_b: f64, d: Degeneracy) -> Result<f64> {
    check_field(u, gamma_b, d)?;
    if let Some(n) = boundary_at(u, gamma_b) {
        return Err(Error::OnBandBoundary { u, n });
    }
    let opts = ExtractionOptions::default();
    let fit = extract_at_angle(Density::AngularMomentum, u, gamma_b, PROBE_ANGLES[1], &default_dt_grid(), &opts)?;
    Ok(d.factor() * fit.finite_part())
}

/// `T^{φφ}` just behind the cut minus just ahead of it, at rotating-frame
/// distance `offset` from the cut on either side.
pub fn pressure_difference(u: f64, gamma_b: f64, d: Degeneracy, offset: f64) -> Result<f64> {
    check_field(u, gamma_b, d)?;
    let opts = ExtractionOptions::default();
    let grid = default_dt_grid();
    let at = |xa: f64| -> Result<f64> {
        let fit = extract_at_angle(Density::Energy, u, gamma_b, xa, &grid, &opts)?;
        Ok(-d.factor() * fit.finite_part())
    };
    Ok(at(TAU - offset)? - at(offset)?)
}
