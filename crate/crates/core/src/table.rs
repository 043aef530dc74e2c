//! Characteristic scales of a charged ring (v = c) for a few field and
//! radius choices, set against commonly quoted one-figure values.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::Result;
use crate::spectrum::{characteristic_frequency, enhancement_factor};
use crate::units::{gamma_b, PhysicalConstants};

/// Largest accepted ratio, either way, between computed and quoted values.
pub const RATIO_TOLERANCE: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quoted {
    pub omega_ch: f64,
    pub period: f64,
    pub continuity: f64,
    pub enhancement: f64,
}

/// Field (T), radius (m), quoted values.
pub const ROWS: [(f64, f64, Quoted); 4] = [
    (100.0, 1e-2, Quoted { omega_ch: 2e-3, period: 3200.0, continuity: 7e-14, enhancement: 2e27 }),
    (1.0, 1e-2, Quoted { omega_ch: 0.2, period: 32.0, continuity: 7e-12, enhancement: 2e23 }),
    (1.0, 1e-3, Quoted { omega_ch: 200.0, period: 0.03, continuity: 7e-10, enhancement: 2e19 }),
    (1.0, 1e-4, Quoted { omega_ch: 2e6, period: 3e-5, continuity: 7e-8, enhancement: 2e15 }),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub quantity: &'static str,
    pub unit: &'static str,
    pub computed: f64,
    pub quoted: f64,
    /// computed / quoted
    pub ratio: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub b_field: f64,
    pub radius: f64,
    pub entries: Vec<Entry>,
}

fn entry(quantity: &'static str, unit: &'static str, computed: f64, quoted: f64) -> Entry {
    let ratio = computed / quoted;
    Entry { quantity, unit, computed, quoted, ratio, within: ratio.max(1.0 / ratio) <= RATIO_TOLERANCE }
}

pub fn row(b_field: f64, radius: f64, quoted: &Quoted, consts: &PhysicalConstants) -> Result<Row> {
    let w = characteristic_frequency(b_field, radius, consts.c, consts)?;
    let f = enhancement_factor(gamma_b(b_field, radius, consts))?;
    Ok(Row {
        b_field,
        radius,
        entries: vec![
            entry("omega_ch", "1/s", w, quoted.omega_ch),
            entry("period", "s", TAU / w, quoted.period),
            entry("omega_ch_r_over_c", "1", w * radius / consts.c, quoted.continuity),
            entry("enhancement", "1", f, quoted.enhancement),
        ],
    })
}

pub fn table(consts: &PhysicalConstants) -> Result<Vec<Row>> {
    ROWS.iter().map(|(b, r, q)| row(*b, *r, q, consts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const C: PhysicalConstants = PhysicalConstants::CODATA;

    #[test]
    fn computed_values() {
        let t = table(&C).unwrap();
        assert_eq!(t.iter().map(|r| r.entries.len()).sum::<usize>(), 16);
        // ħ/(eBR³)·c with B = 100 T, R = 1 cm
        let w = 1.054_571_817e-34 * 299_792_458.0 / (1.602_176_634e-19 * 100.0 * 1e-6);
        assert_relative_eq!(t[0].entries[0].computed, w, max_relative = 1e-12);
        assert_relative_eq!(t[0].entries[0].computed, 1.975e-3, max_relative = 1e-3);
        assert_relative_eq!(t[0].entries[1].computed, 3181.0, max_relative = 1e-3);
        assert_relative_eq!(t[3].entries[0].computed, 1.975e5, max_relative = 1e-3);
        // f = 24γ², γ = eBR²/(2ħ)
        let g = 1.602_176_634e-19 * 1e-4 / (2.0 * 1.054_571_817e-34);
        assert_relative_eq!(t[1].entries[3].computed, 24.0 * g * g, max_relative = 1e-12);
    }

    #[test]
    fn only_the_smallest_ring_frequency_is_off() {
        let t = table(&C).unwrap();
        let off: Vec<_> = t
            .iter()
            .flat_map(|r| r.entries.iter().map(move |e| (r.radius, e.quantity, e.within)))
            .filter(|e| !e.2)
            .collect();
        assert_eq!(off, vec![(1e-4, "omega_ch", false)]);
    }
}
