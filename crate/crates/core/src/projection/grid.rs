//! Polar quadrature grids for integrals over the disk against `dA`.
//!
//! Radial nodes come from a fixed double-exponential rule in the logit
//! variable, split at `r = 1/2` and at the weight breakpoints, so they
//! cluster toward both `0` and `1`. Angles are equispaced; the trapezoid rule
//! integrates trigonometric polynomials of degree below `M` exactly.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::coords::{logit, RadialPoint};
use crate::error::{Error, Result};
use crate::quadrature::{fixed_rule, Interval};
use crate::weights::RadialWeight;

/// Fewest nodes a single radial segment may receive.
const MIN_SEGMENT_NODES: usize = 8;

#[derive(Clone)]
pub struct PolarGrid {
    nodes: Vec<RadialPoint>,
    /// Weights in the logit variable: `∫ F(t) dt ≈ Σ λ_j F(t_j)`.
    logit_weights: Vec<f64>,
    angles: usize,
    /// The `radial` argument the grid was built with.
    radial_budget: usize,
    breakpoints: Vec<f64>,
    fft_inverse: Arc<dyn Fft<f64>>,
    fft_forward: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PolarGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolarGrid")
            .field("radial_nodes", &self.nodes.len())
            .field("angles", &self.angles)
            .finish()
    }
}

impl PolarGrid {
    /// Grid with `radial` nodes on the two outer half-lines (plus `radial/8`
    /// on each piece between breakpoints), split at `1/2` and `breakpoints`, and
    /// `angles` equispaced angles.
    pub fn new(radial: usize, angles: usize, breakpoints: &[f64]) -> Result<Self> {
        if radial < 2 * MIN_SEGMENT_NODES {
            return Err(Error::Domain(format!(
                "a polar grid needs at least {} radial nodes, got {radial}",
                2 * MIN_SEGMENT_NODES
            )));
        }
        if angles < 1 {
            return Err(Error::Domain(
                "a polar grid needs at least one angle".into(),
            ));
        }
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .filter(|&&b| b > 0.0 && b < 1.0)
            .map(|&b| logit(b))
            .chain(std::iter::once(0.0))
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut segments = Vec::with_capacity(cuts.len() + 1);
        segments.push(Interval::Lower(cuts[0]));
        for w in cuts.windows(2) {
            segments.push(Interval::Finite(w[0], w[1]));
        }
        segments.push(Interval::Upper(cuts[cuts.len() - 1]));
        // The two half-lines carry the slow double-exponential decay toward
        // r = 0 and r = 1 and take half the budget each; on bounded pieces
        // between breakpoints the rule converges much faster.
        let ends = radial / 2;
        let inner = (radial / 8).max(MIN_SEGMENT_NODES);

        let mut nodes = Vec::with_capacity(2 * ends + inner * (segments.len() - 2));
        let mut logit_weights = Vec::with_capacity(nodes.capacity());
        for seg in segments {
            let per = match seg {
                Interval::Finite(..) => inner,
                _ => ends,
            };
            for (t, w) in fixed_rule(seg, per) {
                nodes.push(RadialPoint::from_logit(t));
                logit_weights.push(w);
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            nodes,
            logit_weights,
            angles,
            radial_budget: radial,
            breakpoints: breakpoints.to_vec(),
            fft_inverse: planner.plan_fft_inverse(angles),
            fft_forward: planner.plan_fft_forward(angles),
        })
    }

    /// Grid whose radial splits follow the breakpoints of `w`.
    pub fn for_weight(w: &RadialWeight, radial: usize, angles: usize) -> Result<Self> {
        Self::new(radial, angles, &w.breakpoints())
    }

    pub fn radial_len(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[RadialPoint] {
        &self.nodes
    }

    pub fn angles(&self) -> usize {
        self.angles
    }

    pub fn angle(&self, m: usize) -> f64 {
        std::f64::consts::TAU * m as f64 / self.angles as f64
    }

    /// Highest degree `k` for which `ξ^k conj(ξ)^n` with `n ≤ k` is
    /// integrated exactly in angle: `⌊(M − 1)/2⌋`.
    pub fn max_resolvable_degree(&self) -> usize {
        (self.angles - 1) / 2
    }

    /// `a_j` with `∫_𝔻 g dA ≈ Σ_j a_j · mean_θ g(r_j e^{iθ})`.
    pub fn area_weight(&self, j: usize) -> f64 {
        let p = &self.nodes[j];
        2.0 * p.r * self.logit_weights[j] * p.jacobian()
    }

    /// `a_j ω(r_j)`, formed from the scaled weight so that weights singular
    /// at the boundary stay finite.
    pub fn weighted_area(&self, j: usize, w: &RadialWeight) -> Result<f64> {
        let p = &self.nodes[j];
        Ok(2.0 * p.r * self.logit_weights[j] * p.r * w.scaled(p)?)
    }

    /// `∫_0^1 F(r) dr ≈ Σ_j dr_weight(j) F(r_j)`.
    pub fn dr_weight(&self, j: usize) -> f64 {
        self.logit_weights[j] * self.nodes[j].jacobian()
    }

    pub fn logit_weight(&self, j: usize) -> f64 {
        self.logit_weights[j]
    }

    /// Discrete moment `Σ_j a_j ω(r_j) r_j^{2k}` of the grid, for `k ≤ n`.
    pub fn discrete_moments(&self, w: &RadialWeight, n: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; n + 1];
        for j in 0..self.radial_len() {
            let a = self.weighted_area(j, w)?;
            if a == 0.0 {
                continue;
            }
            let ln_r2 = 2.0 * self.nodes[j].ln_r;
            for (k, o) in out.iter_mut().enumerate() {
                *o += a * (k as f64 * ln_r2).exp();
            }
        }
        Ok(out)
    }

    /// Values of `Σ_k c_k r^k e^{ikθ_m}` on the ring `r = r_j`. Coefficients
    /// beyond `M − 1` would alias and are rejected.
    pub fn ring_values(&self, coeffs: &[Complex64], j: usize) -> Result<Vec<Complex64>> {
        if coeffs.len() > self.angles {
            return Err(Error::UnderResolved {
                requested: coeffs.len() - 1,
                max: self.angles - 1,
            });
        }
        let ln_r = self.nodes[j].ln_r;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.angles];
        for (k, (&c, b)) in coeffs.iter().zip(buf.iter_mut()).enumerate() {
            if c != Complex64::new(0.0, 0.0) {
                let rk = if k == 0 { 1.0 } else { (k as f64 * ln_r).exp() };
                *b = c * rk;
            }
        }
        self.fft_inverse.process(&mut buf);
        Ok(buf)
    }

    /// Angular Fourier coefficients `mean_θ g e^{−ikθ}` of one ring,
    /// indexed by `k mod M`.
    pub fn ring_fourier(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.fft_forward.process(&mut buf);
        let scale = 1.0 / self.angles as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }

    /// Grid with `factor` times the radial nodes and angles, same splits.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(
            self.radial_budget * factor,
            self.angles * factor,
            &self.breakpoints,
        )
    }

    /// Same radial nodes with a different angle count.
    pub fn with_angles(&self, angles: usize) -> Result<Self> {
        Self::new(self.radial_budget, angles, &self.breakpoints)
    }
}
