use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use rotovac_core::device::{
    array_scale, classical_energy, critical_radius as rc, ground_state as find_ground_state, operating_point, total_angular_momentum,
    total_energy, zero_point_energy, DeviceSpec, Status,
};
use rotovac_core::spectrum::{band_boundary, band_index, prefactor, Frame, Side};
use rotovac_core::thermo::{corotating_energy, el_curve as curve};
use rotovac_core::units::{check_u, Config, PhysicalConstants};
use rotovac_core::{table, verify as checks, Error};

use crate::manifest::{inputs_of, RunManifest};
use crate::output::{emit_rows, io_err, json_bytes, CliError, Sink};
use crate::{DeviceArgs, Format, FrameArg, RangeArgs, ReportFormat};

pub fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(io_err(p))?;
            Ok(Config::from_json_str(&text)?)
        }
    }
}

fn material(config: &Config, name: &str, v: Option<f64>, mu: Option<f64>) -> Result<rotovac_core::units::MaterialSpec, CliError> {
    let mut m = config.material(name)?;
    if let Some(v) = v {
        m.wave_speed = v;
    }
    if let Some(mu) = mu {
        m.linear_mass_density = mu;
    }
    m.validate(&config.constants()?)?;
    Ok(m)
}

fn device(config: &Config, a: &DeviceArgs) -> Result<DeviceSpec, CliError> {
    let consts = config.constants()?;
    let mut spec = DeviceSpec::new(a.b, a.r, material(config, &a.material, a.v, a.mu)?, consts)?;
    if let Some(i) = a.i_cl {
        spec = spec.with_i_cl(i)?;
    }
    Ok(array_scale(a.n_rings, &spec)?)
}

fn outputs(sink: &Sink, svg: Option<&Path>) -> Vec<String> {
    let mut out = vec![sink.name()];
    out.extend(svg.map(|p| p.display().to_string()));
    out
}

fn with_extra<T: Serialize>(args: &T, extra: &[(&str, String)]) -> BTreeMap<String, String> {
    let mut m = inputs_of(args);
    m.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    m
}

#[derive(Serialize)]
struct BandRow {
    n: i64,
    #[serde(rename = "omega_lower[1/s]")]
    omega_lower: f64,
    #[serde(rename = "omega_upper[1/s]")]
    omega_upper: f64,
    #[serde(rename = "prefactor[1]")]
    prefactor: i64,
}

pub fn bands(config: &Config, a: &DeviceArgs, n: i64, format: Format, sink: &Sink) -> Result<(), CliError> {
    if n < 1 {
        return Err(CliError::Usage(format!("--n must be at least 1, got {n}")));
    }
    if a.b < 0.0 {
        return Err(CliError::Usage(format!("--B must be positive, got {}", a.b)));
    }
    let spec = device(config, a)?;
    let g = spec.gamma_b();
    let rows = (1..=n)
        .map(|k| -> Result<BandRow, Error> {
            Ok(BandRow {
                n: k,
                omega_lower: spec.omega(band_boundary(k, g)?),
                omega_upper: spec.omega(band_boundary(k + 1, g)?),
                prefactor: prefactor(k),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let m = RunManifest::new("bands", with_extra(a, &[("n", n.to_string())]), &spec.constants, outputs(sink, None));
    emit_rows(sink, &m, format, &rows)
}

fn omega_grid(spec: &DeviceSpec, r: &RangeArgs) -> Result<Vec<f64>, CliError> {
    if r.samples == 0 {
        return Err(Error::InvalidInput("empty data: --samples must be at least 1".into()).into());
    }
    let default = if spec.gamma_b() != 0.0 {
        3.5 * spec.omega(band_boundary(1, spec.gamma_b().abs())?)
    } else {
        0.5 * spec.omega(1.0)
    };
    let lo = r.omega_min.unwrap_or(-default);
    let hi = r.omega_max.unwrap_or(default);
    if !(lo <= hi) {
        return Err(CliError::Usage(format!("empty range [{lo}, {hi}]")));
    }
    check_u(spec.u(lo))?;
    check_u(spec.u(hi))?;
    let n = r.samples;
    Ok((0..n)
        .map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect())
}

/// Band-boundary images inside `[lo, hi]`, for plot ticks.
fn boundary_ticks(spec: &DeviceSpec, lo: f64, hi: f64) -> Vec<f64> {
    let g = spec.gamma_b();
    if g == 0.0 {
        return Vec::new();
    }
    let (ml, mh) = (band_index(spec.u(lo), g), band_index(spec.u(hi), g));
    (ml.min(mh) + 1..=ml.max(mh))
        .filter(|&n| n != 0)
        .filter_map(|n| band_boundary(n, g).ok().map(|u| spec.omega(u)))
        .collect()
}

#[derive(Serialize)]
struct EnergyRow {
    #[serde(rename = "omega[1/s]")]
    omega: f64,
    #[serde(rename = "u[1]")]
    u: f64,
    band: i64,
    #[serde(rename = "E_zp[J]")]
    e_zp: f64,
    #[serde(rename = "E_cl[J]")]
    e_cl: f64,
    #[serde(rename = "E_total[J]")]
    e_total: f64,
    #[serde(rename = "L_total[J*s]")]
    l_total: f64,
}

fn energy_row(spec: &DeviceSpec, w: f64, frame: Frame) -> Result<EnergyRow, Error> {
    let side = Side::Above;
    let l_total = total_angular_momentum(w, spec, side)?;
    let (e_zp, e_cl, e_total) = match frame {
        Frame::Lab => (zero_point_energy(w, spec, side)?, classical_energy(w, spec)?, total_energy(w, spec, side)?),
        Frame::Corotating => {
            let c = corotating_energy(w, spec, Some(side))?;
            (c.zp_closed, -classical_energy(w, spec)?, c.total)
        }
    };
    Ok(EnergyRow { omega: w, u: spec.u(w), band: band_index(spec.u(w), spec.gamma_b()), e_zp, e_cl, e_total, l_total })
}

fn write_svg(path: &Path, body: String) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(io_err(path))
}

pub fn energy_curve(
    config: &Config,
    a: &DeviceArgs,
    r: &RangeArgs,
    frame: FrameArg,
    format: Format,
    svg: Option<&Path>,
    sink: &Sink,
) -> Result<(), CliError> {
    let spec = device(config, a)?;
    let grid = omega_grid(&spec, r)?;
    let rows = grid.iter().map(|&w| energy_row(&spec, w, frame.into())).collect::<Result<Vec<_>, _>>()?;
    let mut inputs = with_extra(a, &[]);
    inputs.extend(inputs_of(r));
    inputs.extend(inputs_of(&serde_json::json!({ "frame": frame })));
    let m = RunManifest::new("energy-curve", inputs, &spec.constants, outputs(sink, svg));
    if let Some(p) = svg {
        let mut segments: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut last = None;
        for row in &rows {
            if last != Some(row.band) {
                segments.push(Vec::new());
                last = Some(row.band);
            }
            segments.last_mut().expect("pushed").push((row.omega, row.e_total));
        }
        let ticks = boundary_ticks(&spec, grid[0], grid[grid.len() - 1]);
        write_svg(p, crate::svg::line_plot(&segments, &ticks, "omega [1/s]", "E_total [J]", &m.digest))?;
    }
    emit_rows(sink, &m, format, &rows)
}

#[derive(Serialize)]
struct GroundStateOut {
    omega_star: f64,
    period: Option<f64>,
    band: i64,
    energy: f64,
    barrier: f64,
    barrier_temperature: f64,
    is_rotating: bool,
    degenerate_pair: bool,
    status: Status,
    nonrelativistic_warning: bool,
    gamma_b: f64,
    radius: f64,
}

pub fn ground_state(config: &Config, a: &DeviceArgs, n_max: i64, sink: &Sink) -> Result<(), CliError> {
    let spec = device(config, a)?;
    let gs = find_ground_state(&spec, n_max)?;
    let out = GroundStateOut {
        omega_star: gs.omega_star,
        period: gs.period,
        band: gs.band,
        energy: gs.energy,
        barrier: gs.barrier,
        barrier_temperature: gs.barrier_temperature,
        is_rotating: gs.is_rotating,
        degenerate_pair: gs.degenerate_pair,
        status: gs.status,
        nonrelativistic_warning: gs.nonrelativistic_warning,
        gamma_b: spec.gamma_b(),
        radius: spec.radius(),
    };
    let m = RunManifest::new("ground-state", with_extra(a, &[("n_max", n_max.to_string())]), &spec.constants, outputs(sink, None));
    sink.write(&json_bytes(&m, out)?)
}

#[derive(Serialize)]
struct CriticalRow {
    #[serde(rename = "B[T]")]
    b: f64,
    #[serde(rename = "R_c[m]")]
    r_c: f64,
    #[serde(rename = "period[s]")]
    period: f64,
    #[serde(rename = "delta_E[J]")]
    delta_e: f64,
    #[serde(rename = "delta_E[eV]")]
    delta_e_ev: f64,
    #[serde(rename = "T[K]")]
    temperature: f64,
}

pub fn critical_radius(
    config: &Config,
    b: f64,
    name: &str,
    v: Option<f64>,
    mu: Option<f64>,
    format: Format,
    sink: &Sink,
) -> Result<(), CliError> {
    let consts = config.constants()?;
    let mat = material(config, name, v, mu)?;
    let r_c = rc(b, &mat, &consts)?;
    let op = operating_point(&DeviceSpec::new(b, r_c, mat, consts)?)?;
    let row = CriticalRow { b, r_c, period: op.period, delta_e: op.delta_e, delta_e_ev: op.delta_e / consts.e, temperature: op.temperature };
    let inputs = inputs_of(&serde_json::json!({ "B": b, "material": name, "v": v, "mu": mu }));
    let m = RunManifest::new("critical-radius", inputs, &consts, outputs(sink, None));
    emit_rows(sink, &m, format, &[row])
}

#[derive(Serialize)]
struct TableRow {
    #[serde(rename = "B[T]")]
    b: f64,
    #[serde(rename = "R[m]")]
    r: f64,
    quantity: &'static str,
    unit: &'static str,
    computed: f64,
    quoted: f64,
    #[serde(rename = "ratio[1]")]
    ratio: f64,
    within_tolerance: bool,
}

pub fn table1(config: &Config, format: Format, sink: &Sink) -> Result<(), CliError> {
    let consts = config.constants()?;
    let rows: Vec<TableRow> = table::table(&consts)?
        .into_iter()
        .flat_map(|row| {
            row.entries.into_iter().map(move |e| TableRow {
                b: row.b_field,
                r: row.radius,
                quantity: e.quantity,
                unit: e.unit,
                computed: e.computed,
                quoted: e.quoted,
                ratio: e.ratio,
                within_tolerance: e.within,
            })
        })
        .collect();
    let inputs = inputs_of(&serde_json::json!({ "ratio_tolerance": table::RATIO_TOLERANCE }));
    let m = RunManifest::new("table1", inputs, &consts, outputs(sink, None));
    emit_rows(sink, &m, format, &rows)
}

#[derive(Serialize)]
struct ElRow {
    #[serde(rename = "omega[1/s]")]
    omega: f64,
    #[serde(rename = "L_total[J*s]")]
    l_total: f64,
    #[serde(rename = "E_total[J]")]
    e_total: f64,
    band: i64,
    boundary_flag: bool,
}

pub fn el_curve(config: &Config, a: &DeviceArgs, r: &RangeArgs, format: Format, svg: Option<&Path>, sink: &Sink) -> Result<(), CliError> {
    let spec = device(config, a)?;
    let grid = omega_grid(&spec, r)?;
    let pts = curve(&spec, &grid)?;
    let rows: Vec<ElRow> = pts
        .iter()
        .map(|p| ElRow { omega: p.omega, l_total: p.l_total, e_total: p.e_total, band: p.band, boundary_flag: p.boundary_flag })
        .collect();
    let mut inputs = with_extra(a, &[]);
    inputs.extend(inputs_of(r));
    let m = RunManifest::new("el-curve", inputs, &spec.constants, outputs(sink, svg));
    if let Some(p) = svg {
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for (i, row) in rows.iter().enumerate() {
            // a flagged pair closes one branch and opens the next
            if row.boundary_flag && i > 0 && rows[i - 1].boundary_flag && rows[i - 1].omega == row.omega {
                segments.push(Vec::new());
            }
            segments.last_mut().expect("nonempty").push((row.l_total, row.e_total));
        }
        let ticks: Vec<f64> = rows.iter().filter(|r| r.boundary_flag).map(|r| r.l_total).collect();
        write_svg(p, crate::svg::line_plot(&segments, &ticks, "L_total [J s]", "E_total [J]", &m.digest))?;
    }
    emit_rows(sink, &m, format, &rows)
}

pub fn verify(config: &Config, full: bool, format: ReportFormat, sink: &Sink) -> Result<(), CliError> {
    let consts: PhysicalConstants = config.constants()?;
    let mode = if full { checks::Mode::Full } else { checks::Mode::Quick };
    let report = checks::run(mode, &consts);
    let inputs = inputs_of(&serde_json::json!({ "mode": mode }));
    let m = RunManifest::new("verify", inputs, &consts, outputs(sink, None));
    let bytes = match format {
        ReportFormat::Text => format!("# manifest_digest: {}\n{report}\n", m.digest).into_bytes(),
        ReportFormat::Json => json_bytes(&m, &report)?,
    };
    sink.write(&bytes)?;
    if report.ok {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(names.join(", ")))
    }
}
