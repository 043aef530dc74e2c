//! Regularised mode sums.
//!
//! Two independent handles on `Σ m`: analytic continuation of ζ at negative
//! integers (exact rationals from the Bernoulli numbers) and exponential
//! damping `Σ m e^{-εm}` followed by extraction of the ε-independent term.
//! The second route is generic: [`extract_finite_part`] fits any sampled
//! function to `c₋₂/ε² + c₀ + c₂ε²`, which is also how `greens` removes the
//! short-distance divergence of point-split densities.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Highest `n` accepted by [`zeta_neg_int`].
pub const ZETA_MAX_N: u32 = 20;

const BERNOULLI_LEN: usize = ZETA_MAX_N as usize + 2;

fn binomial(n: i128, k: i128) -> i128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Bernoulli numbers `B_0..=B_21`, with `B_1 = -1/2`.
pub fn bernoulli_table() -> &'static [Rational; BERNOULLI_LEN] {
    static TABLE: OnceLock<[Rational; BERNOULLI_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b = [Rational::from_integer(0); BERNOULLI_LEN];
        b[0] = Rational::from_integer(1);
        for n in 1..BERNOULLI_LEN {
            // Σ_{k=0}^{n} C(n+1, k) B_k = 0
            let np1 = n as i128 + 1;
            let acc = (0..n).fold(Rational::from_integer(0), |acc, k| {
                acc + b[k] * Rational::from_integer(binomial(np1, k as i128))
            });
            b[n] = -acc / Rational::from_integer(np1);
        }
        b
    })
}

/// `ζ(-n)` as an exact rational, `(-1)^n B_{n+1}/(n+1)`.
pub fn zeta_neg_int(n: u32) -> Result<Rational> {
    if n > ZETA_MAX_N {
        return Err(Error::OutOfRange { n, max: ZETA_MAX_N });
    }
    let b = bernoulli_table()[n as usize + 1];
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    Ok(b * Rational::from_integer(sign) / Rational::from_integer(i128::from(n) + 1))
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `Σ_{m≥1} m e^{-εm} = 1/(4 sinh²(ε/2)) = 1/ε² - 1/12 + ε²/240 + O(ε⁴)`.
pub fn heat_kernel_linear_sum(eps: f64) -> f64 {
    let s = (0.5 * eps).sinh();
    0.25 / (s * s)
}

/// `n` points from `start` to `end`, equally spaced in log.
pub fn geometric_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && start > 0.0 && end > 0.0);
    let ratio = (end / start).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => start,
            i if i == n - 1 => end,
            i => start * (ratio * i as f64).exp(),
        })
        .collect()
}

/// Eight damping parameters from 0.2 down to 0.01.
pub fn default_epsilon_grid() -> Vec<f64> {
    geometric_grid(0.2, 0.01, 8)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Upper bound on the condition number of the (column-scaled) normal
    /// equations.
    pub max_condition: f64,
    /// Largest acceptable absolute residual before the fit is flagged.
    pub residual_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_condition: 1e12, residual_tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinitePartFit {
    /// Strictly decreasing damping parameters.
    pub epsilons: Vec<f64>,
    pub samples: Vec<f64>,
    /// `(c₋₂, c₀, c₂)`.
    pub model_coeffs: (f64, f64, f64),
    /// Max absolute deviation between samples and the fitted model.
    pub residual: f64,
    pub condition_number: f64,
    pub reliable: bool,
}

impl FinitePartFit {
    pub fn finite_part(&self) -> f64 {
        self.model_coeffs.1
    }

    pub fn divergence(&self) -> f64 {
        self.model_coeffs.0
    }

    pub fn model(&self, eps: f64) -> f64 {
        let (a, b, c) = self.model_coeffs;
        a / (eps * eps) + b + c * eps * eps
    }
}

/// Weighted least-squares fit of `(ε, value)` samples to `c₋₂/ε² + c₀ + c₂ε²`.
pub fn extract_finite_part(samples: &[(f64, f64)]) -> Result<FinitePartFit> {
    extract_finite_part_with(samples, &FitOptions::default())
}

pub fn extract_finite_part_with(samples: &[(f64, f64)], opts: &FitOptions) -> Result<FinitePartFit> {
    if samples.len() < 4 {
        return Err(Error::InsufficientSamples { reason: format!("got {} samples", samples.len()) });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    for w in sorted.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InsufficientSamples { reason: format!("duplicate epsilon {}", w[0].0) });
        }
    }
    for &(eps, value) in &sorted {
        if !(eps > 0.0 && eps <= 1.0) || !value.is_finite() {
            return Err(Error::InsufficientSamples { reason: format!("sample ({eps}, {value}) out of domain") });
        }
    }
    let (largest, smallest) = (sorted[0].0, sorted[sorted.len() - 1].0);
    if largest / smallest < 10.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientSamples {
            reason: format!("epsilons span {largest}..{smallest}, less than a decade"),
        });
    }

    let n = sorted.len();
    // Rows weighted by 1/ε²: the unmodelled ε⁴ term lives at large ε.
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let e2 = sorted[i].0 * sorted[i].0;
        match j {
            0 => 1.0 / (e2 * e2),
            1 => 1.0 / e2,
            _ => 1.0,
        }
    });
    let norms: Vec<f64> = (0..3).map(|j| design.column(j).norm()).collect();
    let mut scaled = design.clone();
    for (j, norm) in norms.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / norm);
    }
    let rhs = DVector::from_iterator(n, sorted.iter().map(|s| s.1 / (s.0 * s.0)));

    let svd = scaled.svd(true, true);
    let (smax, smin) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let cond = (smax / smin).powi(2);
    if !cond.is_finite() || cond > opts.max_condition {
        return Err(Error::IllConditioned { cond, bound: opts.max_condition });
    }
    let coeffs = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidInput(format!("least-squares solve failed: {e}")))?;
    let c = [coeffs[0] / norms[0], coeffs[1] / norms[1], coeffs[2] / norms[2]];

    let mut fit = FinitePartFit {
        epsilons: sorted.iter().map(|s| s.0).collect(),
        samples: sorted.iter().map(|s| s.1).collect(),
        model_coeffs: (c[0], c[1], c[2]),
        residual: 0.0,
        condition_number: cond,
        reliable: true,
    };
    fit.residual = sorted
        .iter()
        .map(|&(eps, value)| (value - fit.model(eps)).abs())
        .fold(0.0, f64::max);
    fit.reliable = fit.residual <= opts.residual_tolerance;
    Ok(fit)
}

/// Finite part of `Σ m` via heat-kernel damping on the default grid.
pub fn heat_kernel_finite_part() -> Result<FinitePartFit> {
    let samples: Vec<_> = default_epsilon_grid()
        .into_iter()
        .map(|e| (e, heat_kernel_linear_sum(e)))
        .collect();
    extract_finite_part(&samples)
}
