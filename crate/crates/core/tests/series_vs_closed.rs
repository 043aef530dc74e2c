//! The damped mode sum against the closed form on a grid of points away
//! from the light cone. The damping enters at first order, so the sums at
//! η and η/2 are combined to cancel it.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rotovac_core::greens::{calg_closed, calg_series};

/// Smallest distance of `z ± (x ± y)` from the light cone, mod 2π.
fn cone_distance(x: f64, y: f64, z: f64) -> f64 {
    [z - x - y, z + x + y, z - x + y, z + x - y]
        .into_iter()
        .map(|a| {
            let r = a.rem_euclid(TAU);
            r.min(TAU - r)
        })
        .fold(f64::INFINITY, f64::min)
}

fn damped(x: f64, y: f64, z: f64, eta: f64) -> Complex64 {
    // terms below e^{-40} are dropped
    let m_max = ((40.0 / eta) as u64).max(1000);
    calg_series(x, y, z, eta, m_max).unwrap().value
}

fn extrapolated(x: f64, y: f64, z: f64, eta: f64) -> Complex64 {
    2.0 * damped(x, y, z, 0.5 * eta) - damped(x, y, z, eta)
}

fn grid() -> Vec<(f64, f64, f64, f64)> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut out = Vec::with_capacity(100);
    while out.len() < 100 {
        let (x, y, z) = (rng.random_range(0.05..PI - 0.05), rng.random_range(0.05..PI - 0.05), rng.random_range(0.05..TAU - 0.05));
        let d = cone_distance(x, y, z);
        if d > 0.2 {
            out.push((x, y, z, d));
        }
    }
    out
}

#[test]
fn closed_form_matches_series_on_grid() {
    let eta = 2e-3;
    let mut worst = 0.0f64;
    for (x, y, z, d) in grid() {
        let closed = calg_closed(x, y, z).unwrap();
        let series = extrapolated(x, y, z, eta);
        // remaining error is second order in η, scaled by the curvature near the cone
        let tol = 10.0 * eta * eta / (d * d);
        let err = (closed - series).norm();
        assert!(err <= tol, "({x}, {y}, {z}): {closed} vs {series}, err {err:e} > {tol:e}");
        worst = worst.max(err);
    }
    assert!(worst > 0.0);
}

#[test]
fn extrapolation_is_regulator_independent() {
    for (x, y, z, d) in grid().into_iter().take(25) {
        let a = extrapolated(x, y, z, 2e-3);
        let b = extrapolated(x, y, z, 1e-3);
        // halving η shrinks the residual O(η²) term by four
        let closed = calg_closed(x, y, z).unwrap();
        let (ea, eb) = ((a - closed).norm(), (b - closed).norm());
        assert!((a - b).norm() <= 10.0 * 4e-6 / (d * d), "({x}, {y}, {z})");
        assert!(eb <= 0.3 * ea + 1e-12, "({x}, {y}, {z}): {ea:e} -> {eb:e}");
    }
}
