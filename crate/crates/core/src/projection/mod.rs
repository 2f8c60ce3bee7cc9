//! The weighted Bergman projection `P_ω` on sampled disk functions, and two
//! explicit pre-image constructions.
//!
//! `P_ω g` has Taylor coefficients `⟨g, ξ^k⟩_ω / ω_k`. On a polar grid the
//! angular part is a discrete Fourier transform and the radial part a
//! weighted sum; for functions of the form `u(|ξ|) h(ξ)` angular
//! orthogonality reduces the projection to one-dimensional integrals.

mod grid;

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::classify;
use crate::coords::{integrate_logit, RadialPoint};
use crate::error::{Error, Result};
use crate::operators::FracDerivative;
use crate::quadrature::Options;
use crate::series::PowerSeries;
use crate::weights::{RadialWeight, WeightKind};

pub use grid::PolarGrid;

/// Relative tolerance of the one-dimensional profile moments.
const PROFILE_TOL: f64 = 1e-12;

/// Radial factor `u(r)` of a factored sample `c + u(|ξ|) h(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    Constant(f64),
    /// `(1 − r)^α`
    OneMinusRPower(f64),
    /// `ω̂(r) / (r ω(r))` for the given weight. The analytic factor must
    /// vanish at the origin, which removes the `1/r`.
    RegularRatio(RadialWeight),
}

impl RadialProfile {
    /// `u(r)` for `r > 0`; the regular ratio's limit at `r = 1` is taken as 0.
    pub fn value(&self, p: &RadialPoint) -> Result<f64> {
        match self {
            RadialProfile::Constant(c) => Ok(*c),
            RadialProfile::OneMinusRPower(a) => Ok((a * p.ln_x).exp()),
            RadialProfile::RegularRatio(w) => {
                if p.r == 0.0 {
                    return Err(Error::Domain(
                        "the regular profile is singular at r = 0".into(),
                    ));
                }
                Ok(self.ratio_without_r(w, p)? / p.r)
            }
        }
    }

    /// `ω̂(r)/ω(r)`, computed as `ω̂ / (ω(1 − r)) · (1 − r)`.
    fn ratio_without_r(&self, w: &RadialWeight, p: &RadialPoint) -> Result<f64> {
        if p.x == 0.0 {
            return Ok(0.0);
        }
        let s = w.scaled(p)?;
        if s == 0.0 {
            return Err(Error::WeightRejected(format!(
                "{w} vanishes at r = {}, so ω̂/ω is unbounded there",
                p.r
            )));
        }
        Ok(w.tail_point(p)? / s * p.x)
    }

    /// `(uω)_k = 2∫_0^1 r^{2k+1} u(r) ω(r) dr`.
    pub fn weighted_moment(&self, omega: &RadialWeight, k: usize) -> Result<f64> {
        match self {
            RadialProfile::Constant(c) => Ok(c * omega.moment(k)?),
            RadialProfile::OneMinusRPower(a) => omega.alpha_shift(*a)?.moment(k),
            RadialProfile::RegularRatio(w) => {
                let same = w.ptr_eq(omega) || w == omega;
                let est = integrate_logit(
                    None,
                    None,
                    &omega.breakpoints(),
                    |q| {
                        // 2 r^{2k+1} u ω · r(1 − r)
                        let mono = 2.0 * ((2 * k + 1) as f64 * q.ln_r).exp();
                        if same {
                            Ok(mono * w.tail_point(q)? * q.x)
                        } else {
                            let s = omega.scaled(q)?;
                            if s == 0.0 {
                                return Ok(0.0);
                            }
                            Ok(mono * self.ratio_without_r(w, q)? * s)
                        }
                    },
                    &Options::with_rel_tol(PROFILE_TOL),
                )?;
                Ok(est.value)
            }
        }
    }
}

/// `g(ξ) = constant + u(|ξ|) · analytic(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factored {
    pub profile: RadialProfile,
    pub analytic: PowerSeries,
    pub constant: Complex64,
}

impl Factored {
    pub fn new(profile: RadialProfile, analytic: PowerSeries, constant: Complex64) -> Result<Self> {
        if matches!(profile, RadialProfile::RegularRatio(_)) && analytic.coeff(0).norm() != 0.0 {
            return Err(Error::Domain(
                "the regular profile needs an analytic factor vanishing at the origin".into(),
            ));
        }
        Ok(Self {
            profile,
            analytic,
            constant,
        })
    }

    /// Value at `ξ = r e^{iθ}`.
    pub fn eval(&self, r: f64, theta: f64) -> Result<Complex64> {
        let p = RadialPoint::new(r)?;
        let z = Complex64::from_polar(r, theta);
        let v = match &self.profile {
            RadialProfile::RegularRatio(w) => {
                // u·h = (ω̂/ω) e^{iθ} (h/z), continuous through the origin
                let q = self.analytic.shift_down();
                self.profile_ratio(w, &p)? * Complex64::from_polar(1.0, theta) * q.horner(z)
            }
            other => other.value(&p)? * self.analytic.horner(z),
        };
        Ok(self.constant + v)
    }

    fn profile_ratio(&self, w: &RadialWeight, p: &RadialPoint) -> Result<f64> {
        self.profile.ratio_without_r(w, p)
    }

    /// Values on every ring of `grid`.
    fn sample(&self, grid: &PolarGrid) -> Result<Vec<Vec<Complex64>>> {
        let regular = matches!(self.profile, RadialProfile::RegularRatio(_));
        let series = if regular {
            self.analytic.shift_down()
        } else {
            self.analytic.clone()
        };
        let phases: Vec<Complex64> = (0..grid.angles())
            .map(|m| Complex64::from_polar(1.0, grid.angle(m)))
            .collect();
        let mut out = Vec::with_capacity(grid.radial_len());
        for (j, p) in grid.nodes().iter().enumerate() {
            let mut ring = grid.ring_values(series.coeffs(), j)?;
            match &self.profile {
                RadialProfile::RegularRatio(w) => {
                    let u = self.profile_ratio(w, p)?;
                    for (v, ph) in ring.iter_mut().zip(&phases) {
                        *v = self.constant + *v * *ph * u;
                    }
                }
                other => {
                    let u = other.value(p)?;
                    for v in ring.iter_mut() {
                        *v = self.constant + *v * u;
                    }
                }
            }
            out.push(ring);
        }
        Ok(out)
    }
}

/// Values of a function on a polar grid, optionally with the factored form
/// they were sampled from.
#[derive(Debug, Clone)]
pub struct DiskSample {
    grid: PolarGrid,
    values: Vec<Vec<Complex64>>,
    factored: Option<Factored>,
}

impl DiskSample {
    pub fn from_fn<F: Fn(Complex64) -> Complex64>(grid: &PolarGrid, f: F) -> Self {
        let values = grid
            .nodes()
            .iter()
            .map(|p| {
                (0..grid.angles())
                    .map(|m| f(Complex64::from_polar(p.r, grid.angle(m))))
                    .collect()
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
            factored: None,
        }
    }

    pub fn from_factored(grid: &PolarGrid, factored: Factored) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            values: factored.sample(grid)?,
            factored: Some(factored),
        })
    }

    /// An analytic function, kept in factored form with `u ≡ 1`.
    pub fn from_series(grid: &PolarGrid, f: &PowerSeries) -> Result<Self> {
        let fac = Factored::new(
            RadialProfile::Constant(1.0),
            f.clone(),
            Complex64::new(0.0, 0.0),
        )?;
        Self::from_factored(grid, fac)
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn factored(&self) -> Option<&Factored> {
        self.factored.as_ref()
    }

    /// The same function on another grid; only factored samples can move.
    pub fn resampled(&self, grid: &PolarGrid) -> Result<Self> {
        match &self.factored {
            Some(f) => Self::from_factored(grid, f.clone()),
            None => Err(Error::Domain(
                "only factored samples can be resampled".into(),
            )),
        }
    }

    pub fn sup_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|ring| ring.iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }
}

/// `P_ω g` truncated at degree `n`, from grid values. The inner products are
/// normalised by the grid's own discrete moments, so analytic polynomials
/// are reproduced to rounding and the radial quadrature error only enters
/// through genuinely non-analytic factors.
pub fn project(omega: &RadialWeight, g: &DiskSample, n: usize) -> Result<PowerSeries> {
    let grid = g.grid();
    if n > grid.max_resolvable_degree() {
        return Err(Error::UnderResolved {
            requested: n,
            max: grid.max_resolvable_degree(),
        });
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut norms = vec![0.0; n + 1];
    for (j, p) in grid.nodes().iter().enumerate() {
        let a = grid.weighted_area(j, omega)?;
        if a == 0.0 {
            continue;
        }
        let fourier = grid.ring_fourier(&g.values()[j]);
        for k in 0..=n {
            let rk = (k as f64 * p.ln_r).exp();
            acc[k] += fourier[k] * (a * rk);
            norms[k] += a * rk * rk;
        }
    }
    Ok(PowerSeries::new(
        acc.iter().zip(&norms).map(|(c, d)| c / d).collect(),
    ))
}

/// `P_ω g` for `g = c + u(|ξ|) h(ξ)`: coefficient `k` is `h_k (uω)_k / ω_k`,
/// plus `c` at `k = 0`.
pub fn project_factored(omega: &RadialWeight, g: &Factored, n: usize) -> Result<PowerSeries> {
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let hk = g.analytic.coeff(k);
        let mut c = if hk.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            hk * (g.profile.weighted_moment(omega, k)? / omega.moment(k)?)
        };
        if k == 0 {
            c += g.constant;
        }
        coeffs.push(c);
    }
    Ok(PowerSeries::new(coeffs))
}

/// Whether a pre-image construction consults the classifier first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Classify,
    Force,
}

/// `g_α = (1 − |z|)^α R^{ω,ω_α} h`, which is bounded and projects to `h`
/// for weights in the doubling class.
pub fn preimage_bloch(
    omega: &RadialWeight,
    h: &PowerSeries,
    alpha: f64,
    grid: &PolarGrid,
    gate: Gate,
) -> Result<DiskSample> {
    let factored = bloch_factored(omega, h, alpha, gate)?;
    DiskSample::from_factored(grid, factored)
}

/// The factored form of [`preimage_bloch`], without sampling.
pub fn bloch_factored(
    omega: &RadialWeight,
    h: &PowerSeries,
    alpha: f64,
    gate: Gate,
) -> Result<Factored> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "the pre-image exponent must be positive, got {alpha}"
        )));
    }
    if gate == Gate::Classify {
        let report = classify(omega, 2.0)?;
        if !report.doubling {
            return Err(Error::WeightRejected(format!(
                "{omega} is not classified as doubling from above and below; pass the force flag to override"
            )));
        }
    }
    let r = FracDerivative::build(omega, &omega.alpha_shift(alpha)?, h.degree())?;
    Factored::new(
        RadialProfile::OneMinusRPower(alpha),
        r.apply(h)?,
        Complex64::new(0.0, 0.0),
    )
}

/// `f(0) + ω̂(z)/(|z|ω(z)) (2zf′ + f − f(0))`, a pre-image of `f` for
/// strictly positive regular weights.
pub fn preimage_regular(
    omega: &RadialWeight,
    f: &PowerSeries,
    grid: &PolarGrid,
    gate: Gate,
) -> Result<DiskSample> {
    let factored = regular_factored(omega, f, gate)?;
    DiskSample::from_factored(grid, factored)
}

pub fn regular_factored(omega: &RadialWeight, f: &PowerSeries, gate: Gate) -> Result<Factored> {
    if !omega.strictly_positive() || matches!(omega.kind(), WeightKind::ZeroAnnulus { .. }) {
        return Err(Error::WeightRejected(format!(
            "{omega} vanishes on part of the disk; ω̂/ω is unbounded there and the explicit pre-image may fail to be bounded"
        )));
    }
    if gate == Gate::Classify {
        let report = classify(omega, 2.0)?;
        if !report.regular.verdict {
            return Err(Error::WeightRejected(format!(
                "{omega} is not classified as regular; pass the force flag to override"
            )));
        }
    }
    let f0 = f.coeff(0);
    let mut analytic = f
        .derivative()
        .mul_z()
        .scale(Complex64::new(2.0, 0.0))
        .add(f);
    analytic = analytic.sub(&PowerSeries::constant(f0)).resized(f.degree());
    Factored::new(RadialProfile::RegularRatio(omega.clone()), analytic, f0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayPoint {
    pub r: f64,
    pub max_abs: f64,
}

/// `max_θ |g_α(r e^{iθ})|` at each radius, for polynomial `h`.
pub fn little_bloch_decay(
    omega: &RadialWeight,
    h: &PowerSeries,
    alpha: f64,
    radii: &[f64],
) -> Result<Vec<DecayPoint>> {
    let g = bloch_factored(omega, h, alpha, Gate::Force)?;
    let angles = 8 * h.degree() + 64;
    radii
        .iter()
        .map(|&r| {
            let mut best: f64 = 0.0;
            for m in 0..angles {
                let theta = std::f64::consts::TAU * m as f64 / angles as f64;
                best = best.max(g.eval(r, theta)?.norm());
            }
            Ok(DecayPoint { r, max_abs: best })
        })
        .collect()
}
