//! Grid estimators for the Bloch, Besov and `L^p_{λ_ω}` norms. Every
//! estimate reports how much it moved under the last grid refinement.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::pairwise_sum;
use crate::projection::{DiskSample, PolarGrid};
use crate::series::PowerSeries;
use crate::weights::RadialWeight;

/// Growth per refinement that counts toward divergence.
pub const DIVERGENCE_GROWTH: f64 = 0.10;
/// Consecutive growths needed to declare a norm infinite.
pub const DIVERGENCE_STREAK: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    Bloch,
    Besov { p: f64, order: usize },
    LpLambda { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub function: String,
    pub kind: NormKind,
    /// Finest estimate, or `+∞` when divergence was detected.
    pub value: f64,
    pub radial_nodes: usize,
    pub angles: usize,
    /// `|last − previous|` over the refinement history.
    pub refinement_delta: f64,
    /// Estimates from the coarsest grid to the finest.
    pub history: Vec<f64>,
    pub diverged: bool,
}

impl NormReport {
    fn from_history(
        function: String,
        kind: NormKind,
        history: Vec<f64>,
        radial_nodes: usize,
        angles: usize,
    ) -> Self {
        let diverged = detect_divergence(&history);
        let last = *history.last().expect("at least one estimate");
        let delta = match history.len() {
            0 | 1 => f64::NAN,
            n => (history[n - 1] - history[n - 2]).abs(),
        };
        Self {
            function,
            kind,
            value: if diverged { f64::INFINITY } else { last },
            radial_nodes,
            angles,
            refinement_delta: delta,
            history,
            diverged,
        }
    }

    /// Largest relative change between consecutive refinements.
    pub fn max_relative_change(&self) -> f64 {
        self.history
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / w[0].abs())
            .fold(0.0, f64::max)
    }
}

/// Infinite values, or [`DIVERGENCE_STREAK`] consecutive growths above
/// [`DIVERGENCE_GROWTH`].
pub fn detect_divergence(history: &[f64]) -> bool {
    if history.iter().any(|v| !v.is_finite()) {
        return true;
    }
    let mut streak = 0;
    for w in history.windows(2) {
        if w[1] > w[0] * (1.0 + DIVERGENCE_GROWTH) {
            streak += 1;
            if streak >= DIVERGENCE_STREAK {
                return true;
            }
        } else {
            streak = 0;
        }
    }
    false
}

/// Scan parameters for the Bloch seminorm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub radial: usize,
    pub angles: usize,
    pub r_max: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            radial: 200,
            angles: 256,
            r_max: crate::series::DEFAULT_RHO_MAX,
        }
    }
}

/// `sup (1 − |z|²)|f′(z)| + |f(0)|` over `|z| ≤ r_max`. Each pass scans the
/// grid and then polishes the best point by a shrinking pattern search; the
/// second pass doubles the scan.
pub fn bloch_seminorm(f: &PowerSeries, scan: &ScanGrid) -> Result<NormReport> {
    if !(scan.r_max > 0.0 && scan.r_max < 1.0) {
        return Err(Error::Domain(format!(
            "scan radius {} is outside (0, 1)",
            scan.r_max
        )));
    }
    let d = f.derivative();
    let coarse = bloch_pass(&d, scan.radial, scan.angles, scan.r_max);
    let fine = bloch_pass(&d, 2 * scan.radial, 2 * scan.angles, scan.r_max);
    let f0 = f.coeff(0).norm();
    Ok(NormReport::from_history(
        f.to_string(),
        NormKind::Bloch,
        vec![coarse + f0, fine + f0],
        2 * scan.radial,
        2 * scan.angles,
    ))
}

fn bloch_pass(d: &PowerSeries, radial: usize, angles: usize, r_max: f64) -> f64 {
    let value = |r: f64, th: f64| (1.0 - r * r) * d.horner(Complex64::from_polar(r, th)).norm();
    // uniform radii plus logit-uniform radii that crowd toward r_max
    let t_max = (r_max / (1.0 - r_max)).ln();
    let radii: Vec<f64> = (0..radial)
        .map(|i| r_max * i as f64 / (radial - 1) as f64)
        .chain((0..radial).map(|i| {
            let t = t_max * i as f64 / (radial - 1) as f64;
            1.0 / (1.0 + (-t).exp())
        }))
        .collect();
    let dth = std::f64::consts::TAU / angles as f64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for &r in &radii {
        for m in 0..angles {
            let th = m as f64 * dth;
            let v = value(r, th);
            if v > best.2 {
                best = (r, th, v);
            }
        }
    }
    // pattern search around the best node
    let (mut r, mut th, mut v) = best;
    let mut step_r = r_max / radial as f64;
    let mut step_t = dth;
    while step_r > 1e-13 || step_t > 1e-13 {
        let mut moved = false;
        for (cr, ct) in [(step_r, 0.0), (-step_r, 0.0), (0.0, step_t), (0.0, -step_t)] {
            let nr = (r + cr).clamp(0.0, r_max);
            let nv = value(nr, th + ct);
            if nv > v {
                (r, th, v) = (nr, th + ct, nv);
                moved = true;
            }
        }
        if !moved {
            step_r *= 0.5;
            step_t *= 0.5;
        }
    }
    v
}

/// Refinement levels used by the Besov and `L^p_{λ_ω}` estimators.
pub const REFINEMENTS: usize = 3;

/// `(∫ |f^{(N)}|^p (1−|z|)^{Np} dλ)^{1/p} + Σ_{j<N} |f^{(j)}(0)|` with
/// `dλ = dA/(1−|z|²)²`, on `grid` and [`REFINEMENTS`] successive doublings.
pub fn besov_norm(f: &PowerSeries, p: f64, order: usize, grid: &PolarGrid) -> Result<NormReport> {
    if order < 2 {
        return Err(Error::Domain(format!(
            "Besov derivative order must be at least 2, got {order}"
        )));
    }
    if !(p >= 1.0) || !(order as f64 * p > 1.0) {
        return Err(Error::Domain(format!(
            "Besov norm needs p ≥ 1 and Np > 1, got p = {p}, N = {order}"
        )));
    }
    let deriv = f.nth_derivative(order);
    let mut head = 0.0;
    let mut fact = 1.0;
    for j in 0..order {
        if j > 0 {
            fact *= j as f64;
        }
        head += fact * f.coeff(j).norm();
    }
    let mut history = Vec::with_capacity(REFINEMENTS + 1);
    let mut g = grid.clone();
    for level in 0..=REFINEMENTS {
        if level > 0 {
            g = g.refined(2)?;
        }
        let np = order as f64 * p;
        let mut terms = Vec::with_capacity(g.radial_len());
        for (j, pt) in g.nodes().iter().enumerate() {
            // a_j (1−r)^{Np} / (1−r²)² with a_j = 2 r λ_j r(1−r)
            let w = 2.0 * pt.r * pt.r * g.logit_weight(j) * ((np - 1.0) * pt.ln_x).exp()
                / ((1.0 + pt.r) * (1.0 + pt.r));
            if w == 0.0 {
                continue;
            }
            let ring = g.ring_values(deriv.coeffs(), j)?;
            let mean = pairwise_sum(&ring.iter().map(|v| v.norm().powf(p)).collect::<Vec<_>>())
                / g.angles() as f64;
            terms.push(w * mean);
        }
        history.push(pairwise_sum(&terms).powf(1.0 / p) + head);
    }
    Ok(NormReport::from_history(
        f.to_string(),
        NormKind::Besov { p, order },
        history,
        g.radial_len(),
        g.angles(),
    ))
}

/// `(∫ |g|^p dλ_ω)^{1/p}` with `dλ_ω = ω dA / (ω̂(z)(1−|z|))`. Factored
/// samples are re-evaluated on [`REFINEMENTS`] doublings of their grid;
/// plain samples yield a single estimate and a `NaN` delta.
pub fn lp_lambda_omega_norm(g: &DiskSample, omega: &RadialWeight, p: f64) -> Result<NormReport> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must be at least 1, got {p}")));
    }
    let mut history = vec![lp_lambda_once(g, omega, p)?];
    let mut last_grid = g.grid().clone();
    if g.factored().is_some() {
        for _ in 0..REFINEMENTS {
            last_grid = last_grid.refined(2)?;
            history.push(lp_lambda_once(&g.resampled(&last_grid)?, omega, p)?);
        }
    }
    Ok(NormReport::from_history(
        omega.label(),
        NormKind::LpLambda { p },
        history,
        last_grid.radial_len(),
        last_grid.angles(),
    ))
}

fn lp_lambda_once(g: &DiskSample, omega: &RadialWeight, p: f64) -> Result<f64> {
    let grid = g.grid();
    let mut terms = Vec::with_capacity(grid.radial_len());
    for (j, pt) in grid.nodes().iter().enumerate() {
        let ring = &g.values()[j];
        let mean = pairwise_sum(&ring.iter().map(|v| v.norm().powf(p)).collect::<Vec<_>>())
            / grid.angles() as f64;
        if mean == 0.0 {
            continue;
        }
        let a = grid.weighted_area(j, omega)?;
        if a == 0.0 {
            continue;
        }
        // in logs: near the boundary `ω̂·(1−r)` underflows long before the
        // term itself does
        let tail = omega.tail_point(pt)?;
        terms.push((a.ln() - tail.ln() - pt.ln_x + mean.ln()).exp());
    }
    Ok(pairwise_sum(&terms).powf(1.0 / p))
}
