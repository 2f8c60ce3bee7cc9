//! Moment identities behind the transforms, the two Littlewood–Paley
//! identities, and ratio probes for the asymptotic comparisons used by the
//! pre-image constructions.

use num_complex::Complex64;
use serde::Serialize;

use crate::coords::{integrate_logit, RadialPoint};
use crate::error::{Error, Result};
use crate::operators::FracDerivative;
use crate::quadrature::Options;
use crate::series::PowerSeries;
use crate::weights::{MomentTable, RadialWeight};

/// Per-index relative deviations of a moment identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentIdentityRows {
    pub weight: String,
    /// `(n, lhs, rhs, |lhs − rhs| / scale)`
    pub rows: Vec<(usize, f64, f64, f64)>,
}

impl MomentIdentityRows {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.3).fold(0.0, f64::max)
    }
}

/// `(ω_+)_n` against `ω_n/(n+1)`, relative to `ω_n`, for `n ≤ max_index`.
pub fn plus_moment_identity(w: &RadialWeight, max_index: usize) -> Result<MomentIdentityRows> {
    let base = w.moments_upto(max_index)?;
    let plus = w.plus().moments_upto(max_index)?;
    let rows = (0..=max_index)
        .map(|n| {
            let want = base.value(n) / (n + 1) as f64;
            (
                n,
                plus.value(n),
                want,
                (plus.value(n) - want).abs() / base.value(n),
            )
        })
        .collect();
    Ok(MomentIdentityRows {
        weight: w.label(),
        rows,
    })
}

/// `ω*_n` against `ω_{n+1}/(4(n+1)²)`, relative to `ω*_n`.
pub fn star_moment_identity(w: &RadialWeight, max_index: usize) -> Result<MomentIdentityRows> {
    let base = w.moments_upto(max_index + 1)?;
    let star = w.star().moments_upto(max_index)?;
    let rows = (0..=max_index)
        .map(|n| {
            let m = (n + 1) as f64;
            let want = base.value(n + 1) / (4.0 * m * m);
            (
                n,
                star.value(n),
                want,
                (star.value(n) - want).abs() / star.value(n),
            )
        })
        .collect();
    Ok(MomentIdentityRows {
        weight: w.label(),
        rows,
    })
}

/// `ω_n = 4n² ω*_{n−1}` for `1 ≤ n ≤ max_index` and `ω_0 = ω(𝔻)`, the
/// coefficient-level content of the classical identity.
pub fn moment_lp_skeleton(w: &RadialWeight, max_index: usize) -> Result<MomentIdentityRows> {
    let base = w.moments_upto(max_index)?;
    let star = w.star().moments_upto(max_index.saturating_sub(1))?;
    let mass = w.total_mass()?;
    let mut rows = vec![(0, base.value(0), mass, (base.value(0) - mass).abs() / mass)];
    for n in 1..=max_index {
        let nn = n as f64;
        let rhs = 4.0 * nn * nn * star.value(n - 1);
        rows.push((
            n,
            base.value(n),
            rhs,
            (base.value(n) - rhs).abs() / base.value(n),
        ));
    }
    Ok(MomentIdentityRows {
        weight: w.label(),
        rows,
    })
}

/// Moment tables for the classical identity
/// `⟨f,g⟩_ω = 4⟨f′,g′⟩_{ω*} + ω(𝔻) f(0) conj(g(0))`, prepared once for
/// polynomials up to a fixed degree.
#[derive(Debug, Clone)]
pub struct LpIdentity {
    degree: usize,
    omega: MomentTable,
    star: MomentTable,
    r2: MomentTable,
    mass: f64,
}

impl LpIdentity {
    pub fn new(omega: &RadialWeight, degree: usize) -> Result<Self> {
        let degree = degree.max(1);
        Ok(Self {
            degree,
            omega: omega.moments_upto(degree)?,
            star: omega.star().moments_upto(degree - 1)?,
            r2: omega.times_r2().moments_upto(degree - 1)?,
            mass: omega.total_mass()?,
        })
    }

    fn fit(&self, f: &PowerSeries, g: &PowerSeries) -> Result<(PowerSeries, PowerSeries)> {
        let n = f.degree().max(g.degree());
        if n > self.degree {
            return Err(Error::DegreeOverflow {
                degree: n,
                max: self.degree,
            });
        }
        Ok((f.resized(self.degree), g.resized(self.degree)))
    }

    /// `⟨f,g⟩_ω`
    pub fn pairing(&self, f: &PowerSeries, g: &PowerSeries) -> Result<Complex64> {
        let (f, g) = self.fit(f, g)?;
        f.inner_product_radial(&g, &self.omega)
    }

    /// Absolute residual `|⟨f,g⟩_ω − 4⟨f′,g′⟩_{ω*} − ω(𝔻) f(0) conj(g(0))|`.
    pub fn residual(&self, f: &PowerSeries, g: &PowerSeries) -> Result<f64> {
        let (f, g) = self.fit(f, g)?;
        let lhs = f.inner_product_radial(&g, &self.omega)?;
        let rhs = 4.0
            * f.derivative()
                .inner_product_radial(&g.derivative(), &self.star)?
            + self.mass * f.coeff(0) * g.coeff(0).conj();
        Ok((lhs - rhs).norm())
    }

    /// Absolute residual of `⟨f₀, g₀⟩_{|·|²ω} = 4⟨f′, g′⟩_{ω*}` with
    /// `f₀ = (f − f(0))/z`.
    pub fn shifted_residual(&self, f: &PowerSeries, g: &PowerSeries) -> Result<f64> {
        let (f, g) = self.fit(f, g)?;
        let lhs = f
            .shift_down()
            .inner_product_radial(&g.shift_down(), &self.r2)?;
        let rhs = 4.0
            * f.derivative()
                .inner_product_radial(&g.derivative(), &self.star)?;
        Ok((lhs - rhs).norm())
    }
}

/// See [`LpIdentity::residual`].
pub fn lp_identity_residual(f: &PowerSeries, g: &PowerSeries, omega: &RadialWeight) -> Result<f64> {
    LpIdentity::new(omega, f.degree().max(g.degree()))?.residual(f, g)
}

/// See [`LpIdentity::shifted_residual`].
pub fn lp_shifted_residual(f: &PowerSeries, g: &PowerSeries, omega: &RadialWeight) -> Result<f64> {
    LpIdentity::new(omega, f.degree().max(g.degree()))?.shifted_residual(f, g)
}

/// Operators and tables for
/// `⟨f,g⟩_ω = ⟨R^{η,η_{+N}}f, R^{ν,ν_{+M}}g⟩_{ω_{+N+M}}`.
#[derive(Debug, Clone)]
pub struct FracLpIdentity {
    degree: usize,
    omega: MomentTable,
    left: Option<FracDerivative>,
    right: Option<FracDerivative>,
    shifted: MomentTable,
}

impl FracLpIdentity {
    pub fn new(
        omega: &RadialWeight,
        eta: &RadialWeight,
        nu: &RadialWeight,
        n_plus: u32,
        m_plus: u32,
        degree: usize,
    ) -> Result<Self> {
        let op = |w: &RadialWeight, order: u32| -> Result<Option<FracDerivative>> {
            if order == 0 {
                Ok(None)
            } else {
                FracDerivative::build(w, &w.plus_n(order), degree).map(Some)
            }
        };
        let omega_m = omega.moments_upto(degree)?;
        let shifted = if n_plus + m_plus == 0 {
            omega_m.clone()
        } else {
            omega.plus_n(n_plus + m_plus).moments_upto(degree)?
        };
        Ok(Self {
            degree,
            omega: omega_m,
            left: op(eta, n_plus)?,
            right: op(nu, m_plus)?,
            shifted,
        })
    }

    /// `|lhs − rhs| / Σ_k |f_k||g_k| ω_k`; the scale keeps cancellation in
    /// `⟨f,g⟩_ω` from inflating the residual.
    pub fn residual(&self, f: &PowerSeries, g: &PowerSeries) -> Result<f64> {
        let n = f.degree().max(g.degree());
        if n > self.degree {
            return Err(Error::DegreeOverflow {
                degree: n,
                max: self.degree,
            });
        }
        let (f, g) = (f.resized(self.degree), g.resized(self.degree));
        let scale: f64 = (0..=self.degree)
            .map(|k| f.coeff(k).norm() * g.coeff(k).norm() * self.omega.value(k))
            .sum();
        if scale == 0.0 {
            return Ok(0.0);
        }
        let lhs = f.inner_product_radial(&g, &self.omega)?;
        let apply = |r: &Option<FracDerivative>, h: &PowerSeries| match r {
            Some(r) => r.apply(h),
            None => Ok(h.clone()),
        };
        let rhs =
            apply(&self.left, &f)?.inner_product_radial(&apply(&self.right, &g)?, &self.shifted)?;
        Ok((lhs - rhs).norm() / scale)
    }
}

/// See [`FracLpIdentity::residual`].
pub fn frac_lp_residual(
    f: &PowerSeries,
    g: &PowerSeries,
    omega: &RadialWeight,
    eta: &RadialWeight,
    nu: &RadialWeight,
    n_plus: u32,
    m_plus: u32,
) -> Result<f64> {
    FracLpIdentity::new(omega, eta, nu, n_plus, m_plus, f.degree().max(g.degree()))?.residual(f, g)
}

/// The comparisons probed by [`asymptotic_ratio_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// `ω̂̂(r) / (ω̂(r)(1 − r))`
    HatHat,
    /// `∫_r^1 ω(s)(1−s)^{α−1}/ω̂(s) ds / (1 − r)^{α−1}`, for `α > 1`.
    RatioPower,
    /// `ω*(r) / (ω̂(r)(1 − r))`
    StarTail,
    /// `∫_r^1 ω(s)(1−s)^α ds / (ω̂(r)(1 − r)^α)`
    AlphaTail,
}

impl std::str::FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hat-hat" | "hathat" => Ok(Self::HatHat),
            "ratio-power" => Ok(Self::RatioPower),
            "star-tail" => Ok(Self::StarTail),
            "alpha-tail" => Ok(Self::AlphaTail),
            other => Err(Error::Config(format!("unknown probe kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeCurve {
    pub kind: ProbeKind,
    pub weight: String,
    pub alpha: f64,
    /// `(r, ratio)`; radii where a tail underflowed are dropped.
    pub points: Vec<(f64, f64)>,
    pub underflow: bool,
}

impl ProbeCurve {
    /// `max/min` of the ratio over the curve.
    pub fn spread(&self) -> f64 {
        let max = self
            .points
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self
            .points
            .iter()
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min);
        max / min
    }
}

const PROBE_TOL: f64 = 1e-11;

pub fn asymptotic_ratio_probe(
    kind: ProbeKind,
    w: &RadialWeight,
    alpha: f64,
    radii: &[f64],
) -> Result<ProbeCurve> {
    match kind {
        ProbeKind::RatioPower if !(alpha > 1.0) => {
            return Err(Error::Domain(format!(
                "the ratio-power integral diverges for the unit weight unless α > 1, got {alpha}"
            )))
        }
        ProbeKind::AlphaTail if !(alpha > -1.0) => {
            return Err(Error::Domain(format!("α must exceed −1, got {alpha}")))
        }
        _ => {}
    }
    let opts = Options::with_rel_tol(PROBE_TOL);
    let bps = w.breakpoints();
    let hat_hat = w.tilde().alpha_shift(1.0)?;
    let star = w.star();
    let mut points = Vec::with_capacity(radii.len());
    let mut underflow = false;
    for &r in radii {
        let p = RadialPoint::new(r)?;
        let tail = w.tail_point(&p)?;
        if !(tail > 0.0) {
            underflow = true;
            continue;
        }
        let ratio = match kind {
            ProbeKind::HatHat => hat_hat.tail_point(&p)? / (tail * p.x),
            ProbeKind::StarTail => star.eval_point(&p)? / (tail * p.x),
            ProbeKind::AlphaTail => {
                let num = integrate_logit(
                    Some(&p),
                    None,
                    &bps,
                    |q| Ok(w.scaled(q)? * q.r * (alpha * q.ln_x).exp()),
                    &opts,
                )?;
                num.value / (tail * (alpha * p.ln_x).exp())
            }
            ProbeKind::RatioPower => {
                let mut lost = false;
                let num = integrate_logit(
                    Some(&p),
                    None,
                    &bps,
                    |q| {
                        let s = w.scaled(q)?;
                        if s == 0.0 {
                            return Ok(0.0);
                        }
                        let t = w.tail_point(q)?;
                        if t == 0.0 {
                            lost = true;
                            return Ok(0.0);
                        }
                        Ok(s / t * q.r * ((alpha - 1.0) * q.ln_x).exp())
                    },
                    &opts,
                )?;
                underflow |= lost;
                num.value / ((alpha - 1.0) * p.ln_x).exp()
            }
        };
        points.push((r, ratio));
    }
    Ok(ProbeCurve {
        kind,
        weight: w.label(),
        alpha,
        points,
        underflow,
    })
}

/// `r = 1 − 10^{−e}` for `e` from 0.3 to `max_exp` in `steps` steps.
pub fn probe_radii(max_exp: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| 1.0 - 10f64.powf(-(0.3 + (max_exp - 0.3) * i as f64 / (steps - 1) as f64)))
        .collect()
}
