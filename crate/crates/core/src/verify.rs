//! Cross-checks between independent routes to the same numbers. Each check
//! reports a residual against a tolerance; the suite passes iff all do.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::device::{band_energy, critical_radius, DeviceSpec};
use crate::error::{Error, Result};
use crate::greens::{default_dt_grid, pressure_difference, t00_pointsplit};
use crate::regsum::{heat_kernel_finite_part, rational_to_f64, zeta_neg_int};
use crate::spectrum::{band_argument, band_boundary, band_state_for, characteristic_frequency, prefactor};
use crate::thermo::{band_grid, consistency_report, discontinuity_placement, el_curve};
use crate::units::{b_field_for_gamma, Degeneracy, MaterialSpec, PhysicalConstants, Preset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quick,
    Full,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Mode::Quick),
            "full" => Ok(Mode::Full),
            _ => Err(Error::InvalidInput(format!("unknown verify mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub mode: Mode,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub ok: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            write!(f, "{tag} {:<40} residual {:.3e} (tol {:.1e})", c.name, c.measured, c.tolerance)?;
            if let Some(e) = &c.error {
                write!(f, "  error: {e}")?;
            }
            writeln!(f)?;
        }
        write!(f, "{} passed, {} failed", self.passed, self.failed)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check(name: impl Into<String>, tolerance: f64, measured: Result<f64>) -> Check {
    let name = name.into();
    match measured {
        Ok(m) => Check { name, measured: m, tolerance, pass: m <= tolerance, error: None },
        Err(e) => Check { name, measured: f64::NAN, tolerance, pass: false, error: Some(e.to_string()) },
    }
}

/// Closed-form `T^{00}` in units of `ħv/R²`.
fn t00_closed(u: f64, gamma_b: f64, d: Degeneracy) -> f64 {
    let m = crate::spectrum::band_index(u, gamma_b);
    -d.factor() * prefactor(m) as f64 * (1.0 + u * u) / (96.0 * PI)
}

fn density_check(u: f64, gamma_b: f64, d: Degeneracy) -> Result<f64> {
    let ex = t00_pointsplit(u, gamma_b, d, &default_dt_grid())?;
    Ok(rel(ex.finite_density, t00_closed(u, gamma_b, d)))
}

/// Ring with γ_B = 500, R = 1 m, v = c, I_cl = 8e5·ħR/c.
pub fn reference_device(consts: &PhysicalConstants) -> Result<DeviceSpec> {
    let material = MaterialSpec::preset(Preset::PhotonCharged, consts);
    let b = b_field_for_gamma(500.0, 1.0, consts);
    DeviceSpec::new(b, 1.0, material, *consts)?.with_i_cl(8e5 * consts.hbar / consts.c)
}

/// Reference scales in SI, independent of the supplied constants.
const OMEGA_CH_1T_1CM: f64 = 0.197_33;
const RC_NANOTUBE_50T: f64 = 1.164e-4;

fn quick(consts: &PhysicalConstants) -> Vec<Check> {
    vec![
        check("zeta(-1) exact rational", 0.0, zeta_neg_int(1).map(|z| (rational_to_f64(z) + 1.0 / 12.0).abs())),
        check("zeta(-1) heat-kernel finite part", 1e-8, heat_kernel_finite_part().map(|f| (f.finite_part() + 1.0 / 12.0).abs())),
        check("static density -1/(96 pi)", 1e-6, density_check(0.0, 0.0, Degeneracy::NEUTRAL)),
        check("neutral rotating density u=0.5", 1e-5, density_check(0.5, 0.0, Degeneracy::NEUTRAL)),
        check("charged density band 1", 1e-4, density_check(1.5e-3, 500.0, Degeneracy::CHARGED)),
        check(
            "omega_ch at 1 T, 1 cm",
            1e-3,
            characteristic_frequency(1.0, 1e-2, consts.c, consts).map(|w| rel(w, OMEGA_CH_1T_1CM)),
        ),
        check(
            "critical radius, nanotube at 50 T",
            1e-2,
            critical_radius(50.0, &MaterialSpec::preset(Preset::Nanotube, consts), consts).map(|r| rel(r, RC_NANOTUBE_50T)),
        ),
    ]
}

fn full(consts: &PhysicalConstants) -> Vec<Check> {
    let mut out = Vec::new();
    for m in [0, 1, 2, 5] {
        let b = band_state_for(m, 500.0);
        let u = 0.5 * (b.lower_edge_u + b.upper_edge_u);
        out.push(check(format!("charged density band {m}"), 1e-4, density_check(u, 500.0, Degeneracy::CHARGED)));
    }
    out.push(check(
        "band boundaries integral",
        1e-12,
        (1..=10)
            .map(|n| band_boundary(n, 500.0).map(|u| (band_argument(u, 500.0) - n as f64).abs() / n as f64))
            .try_fold(0.0f64, |a, r| r.map(|r| a.max(r))),
    ));
    for (label, u, g, d) in [
        ("static", 0.0, 0.0, Degeneracy::NEUTRAL),
        ("rotating", 0.4, 0.0, Degeneracy::NEUTRAL),
        ("charged", 1.5e-3, 500.0, Degeneracy::CHARGED),
    ] {
        out.push(check(format!("no force on cut, {label}"), 1e-8, pressure_difference(u, g, d, 0.2).map(f64::abs)));
    }

    let spec = reference_device(consts);
    let report = spec.clone().and_then(|s| consistency_report(&s, 1, &band_grid(&s, 1, 9)));
    let field = |f: fn(&crate::thermo::ConsistencyReport) -> f64| report.as_ref().map(f).map_err(Clone::clone);
    out.push(check("thermo L vs dE/dOmega", 1e-8, field(|r| r.l_vs_energy_slope)));
    out.push(check("thermo L vs -dE~/dOmega", 1e-8, field(|r| r.l_vs_corotating_slope)));
    out.push(check("thermo Legendre gap", 1e-12, field(|r| r.legendre_gap)));
    out.push(check("thermo one-sided dE/dL at minimum", 1e-6, field(|r| r.ground_state.residual)));

    let placement = spec.clone().and_then(|s| {
        let w1 = s.omega(band_boundary(1, s.gamma_b())?);
        let grid: Vec<f64> = (0..=140).map(|i| w1 * (-3.5 + 0.05 * i as f64)).collect();
        let curve = el_curve(&s, &grid)?;
        let (worst, stray) = discontinuity_placement(&s, &curve)?;
        Ok(if stray > 0 { f64::INFINITY } else { worst })
    });
    out.push(check("E(L) discontinuity placement", 1e-12, placement));

    let parity = spec.clone().and_then(|s| {
        let mut worst = 0.0f64;
        for m in 0..=5 {
            for w in band_grid(&s, m, 7) {
                let a = band_energy(w, m, &s)?;
                let b = band_energy(-w, -m - 1, &s)?;
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    });
    out.push(check("parity E(-Omega) = E(Omega)", 0.0, parity));
    out
}

pub fn run(mode: Mode, consts: &PhysicalConstants) -> Report {
    let mut checks = quick(consts);
    if mode == Mode::Full {
        checks.extend(full(consts));
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    Report { mode, checks, passed, failed, ok: failed == 0 }
}
