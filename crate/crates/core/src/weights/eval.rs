//! Pointwise values and tail integrals.

use statrs::function::beta::{beta, beta_reg};

use super::{RadialWeight, Transform, WeightKind, INNER_TOL};
use crate::coords::{integrate_logit, RadialPoint};
use crate::error::{Error, Result};
use crate::quadrature::{self, Interval, Options};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl RadialWeight {
    /// `ω(r)` for `r ∈ [0, 1)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        let p = RadialPoint::new(r)?;
        self.eval_point(&p)
    }

    pub fn eval_point(&self, p: &RadialPoint) -> Result<f64> {
        match self.kind() {
            WeightKind::Standard { alpha } => Ok(if *alpha == 0.0 {
                1.0
            } else {
                (alpha * (p.ln_x + p.r.ln_1p())).exp()
            }),
            WeightKind::Logarithmic { beta } => Ok((-p.ln_x - beta * (1.0 - p.ln_x).ln()).exp()),
            WeightKind::Exponential { c } => Ok((-c * (-p.ln_x).exp()).exp()),
            WeightKind::ZeroAnnulus { base, a, b } => {
                if (*a..=*b).contains(&p.r) {
                    Ok(0.0)
                } else {
                    base.eval_point(p)
                }
            }
            WeightKind::Tabulated(t) => Ok(t.value(p.r)),
            WeightKind::Transformed { op, base } => match op {
                Transform::AlphaShift { alpha } => {
                    Ok(shift_factor(*alpha, p) * base.eval_point(p)?)
                }
                Transform::MultiplyR2 => Ok(p.r * p.r * base.eval_point(p)?),
                Transform::Plus { .. } | Transform::Star | Transform::Tilde => self.memoized(p),
            },
        }
    }

    /// `ω(r)(1 − r)`, evaluated without forming `1 − r` where the weight is
    /// singular at the boundary. Integrals in the logit variable consume
    /// this form.
    pub fn scaled(&self, p: &RadialPoint) -> Result<f64> {
        match self.kind() {
            WeightKind::Standard { alpha } => {
                Ok(((alpha + 1.0) * p.ln_x + alpha * p.r.ln_1p()).exp())
            }
            WeightKind::Logarithmic { beta } => Ok((1.0 - p.ln_x).powf(-beta)),
            WeightKind::Exponential { c } => Ok((p.ln_x - c * (-p.ln_x).exp()).exp()),
            WeightKind::ZeroAnnulus { base, a, b } => {
                if (*a..=*b).contains(&p.r) {
                    Ok(0.0)
                } else {
                    base.scaled(p)
                }
            }
            WeightKind::Tabulated(t) => Ok(t.value(p.r) * p.x),
            WeightKind::Transformed { op, base } => match op {
                Transform::AlphaShift { alpha } => Ok(shift_factor(*alpha, p) * base.scaled(p)?),
                Transform::MultiplyR2 => Ok(p.r * p.r * base.scaled(p)?),
                Transform::Tilde => base.tail_point(p),
                // both transforms stay bounded as r → 1
                Transform::Plus { .. } | Transform::Star => {
                    if p.x == 0.0 {
                        Ok(0.0)
                    } else {
                        Ok(p.x * self.memoized(p)?)
                    }
                }
            },
        }
    }

    fn memoized(&self, p: &RadialPoint) -> Result<f64> {
        if let Some(v) = self.memo_get(p) {
            return Ok(v);
        }
        let v = self.transform_value(p)?;
        self.memo_put(p, v);
        Ok(v)
    }

    /// Reduced one-dimensional forms of the integral transforms.
    fn transform_value(&self, p: &RadialPoint) -> Result<f64> {
        let WeightKind::Transformed { op, base } = self.kind() else {
            unreachable!("only transformed weights are memoized")
        };
        let opts = Options::with_rel_tol(INNER_TOL);
        let bps = base.breakpoints();
        let standard_zero = matches!(base.kind(), WeightKind::Standard { alpha } if *alpha == 0.0);
        match op {
            Transform::Plus { order } => {
                if p.ln_r == f64::NEG_INFINITY {
                    return Err(Error::LogSingularity);
                }
                let n = *order;
                if standard_zero {
                    // 2^N (−log r)^N / N!
                    return Ok((2.0 * -p.ln_r).powi(n as i32) / factorial(n));
                }
                // ω_{+N}(r) = 2^N/(N−1)! ∫_r^1 ω(s) log(s/r)^{N−1} ds/s
                let v = log_kernel_integral(base, p, &bps, &opts, |_, v| v.powi(n as i32 - 1))?;
                Ok(2f64.powi(n as i32) / factorial(n - 1) * v)
            }
            Transform::Star => {
                if p.ln_r == f64::NEG_INFINITY {
                    return Err(Error::LogSingularity);
                }
                if standard_zero {
                    return Ok(star_of_unit_weight(p));
                }
                log_kernel_integral(base, p, &bps, &opts, |q, v| q.r * q.r * v)
            }
            Transform::Tilde => Ok(base.tail_point(p)? / p.x),
            Transform::AlphaShift { .. } | Transform::MultiplyR2 => {
                unreachable!("pointwise transforms")
            }
        }
    }

    /// Tail integral `ω̂(r) = ∫_r^1 ω(s) ds`.
    pub fn tail_hat(&self, r: f64) -> Result<f64> {
        let p = RadialPoint::new(r)?;
        self.tail_point(&p)
    }

    pub fn tail_point(&self, p: &RadialPoint) -> Result<f64> {
        if let Some(v) = self.closed_form_tail(p) {
            return Ok(v);
        }
        self.tail_by_quadrature(p, INNER_TOL)
    }

    /// `ω̂(r)` by quadrature of the weight itself, ignoring closed forms.
    pub fn tail_by_quadrature(&self, p: &RadialPoint, rel_tol: f64) -> Result<f64> {
        let opts = Options::with_rel_tol(rel_tol);
        let est = integrate_logit(
            Some(p),
            None,
            &self.breakpoints(),
            |q| Ok(q.r * self.scaled(q)?),
            &opts,
        )?;
        Ok(est.value)
    }

    /// Exact `ω̂(r)` where a formula is known.
    pub fn closed_form_tail(&self, p: &RadialPoint) -> Option<f64> {
        match self.kind() {
            WeightKind::Standard { alpha } => {
                if *alpha == 0.0 {
                    Some(p.x)
                } else {
                    // u = s²: ½ B(½, α+1) I_{1−r²}(α+1, ½)
                    let one_minus_r2 = (p.x * (1.0 + p.r)).min(1.0);
                    Some(0.5 * beta(0.5, alpha + 1.0) * beta_reg(alpha + 1.0, 0.5, one_minus_r2))
                }
            }
            WeightKind::Logarithmic { beta } => {
                Some((1.0 - p.ln_x).powf(1.0 - beta) / (beta - 1.0))
            }
            WeightKind::ZeroAnnulus { base, a, b } => {
                let at = |r: f64| base.closed_form_tail(&RadialPoint::from_r_unchecked(r));
                if p.r >= *b {
                    base.closed_form_tail(p)
                } else if p.r >= *a {
                    at(*b)
                } else {
                    Some(base.closed_form_tail(p)? - at(*a)? + at(*b)?)
                }
            }
            WeightKind::Transformed {
                op: Transform::AlphaShift { alpha },
                base,
            } if matches!(base.kind(), WeightKind::Standard { alpha: a0 } if *a0 == 0.0) => {
                Some(((alpha + 1.0) * p.ln_x).exp() / (alpha + 1.0))
            }
            _ => None,
        }
    }
}

/// `∫_r^1 ω(s) k(s, log(s/r)) ds/s` for the transforms with logarithmic
/// kernels. Above `s = 1/2` the integral runs in the logit variable. Below
/// it, when `r < 1/4`, it runs in `w = log(1/2) − log s`: `log(s/r)` is then
/// formed as `L − w` with `L = log(1/2) − log r`, which stays accurate even
/// when `log r` is so large that `log s − log r` would cancel to noise.
fn log_kernel_integral<K>(
    base: &RadialWeight,
    p: &RadialPoint,
    bps: &[f64],
    opts: &Options,
    k: K,
) -> Result<f64>
where
    K: Fn(&RadialPoint, f64) -> f64,
{
    if p.r >= 0.25 {
        let est = integrate_logit(
            Some(p),
            None,
            bps,
            |q| Ok(base.scaled(q)? * k(q, q.ln_r - p.ln_r)),
            opts,
        )?;
        return Ok(est.value);
    }
    let half = RadialPoint::from_r_unchecked(0.5);
    let upper = integrate_logit(
        Some(&half),
        None,
        bps,
        |q| Ok(base.scaled(q)? * k(q, q.ln_r - p.ln_r)),
        opts,
    )?;
    let ln_half = -std::f64::consts::LN_2;
    let span = ln_half - p.ln_r;
    let mut cuts: Vec<f64> = bps
        .iter()
        .filter(|&&b| b > p.r && b < 0.5)
        .map(|&b| ln_half - b.ln())
        // s = e^{-40}/2 separates the region where s² still matters from
        // the stretch where only the growth of log(s/r) does
        .chain([0.0, span.min(40.0), span])
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut lower = 0.0;
    let mut error = 0.0;
    for seg in cuts.windows(2) {
        let mut failure = None;
        let est = quadrature::integrate(
            |w| {
                let q = RadialPoint::from_ln_r(ln_half - w);
                match base.eval_point(&q) {
                    Ok(v) => v * k(&q, (span - w).max(0.0)),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            Interval::Finite(seg[0], seg[1]),
            opts,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let est = match est {
            Err(Error::NonConvergence { estimate, error }) => quadrature::Estimate {
                value: estimate,
                error,
                evaluations: 0,
            },
            other => other?,
        };
        lower += est.value;
        error += est.error;
    }
    let total = upper.value + lower;
    if error + upper.error > opts.rel_tol.max(1e-15) * total.abs() * 10.0 {
        return Err(Error::NonConvergence {
            estimate: total,
            error,
        });
    }
    Ok(total)
}

#[inline]
fn shift_factor(alpha: f64, p: &RadialPoint) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        (alpha * p.ln_x).exp()
    }
}

/// `∫_r^1 s log(s/r) ds = −log(r)/2 − (1 − r²)/4`, with a series near `r = 1`
/// where the two terms cancel.
fn star_of_unit_weight(p: &RadialPoint) -> f64 {
    let x = p.x;
    if x < 0.1 {
        // x²/2 + Σ_{k≥3} x^k / (2k)
        let mut sum = 0.5 * x * x;
        let mut xk = x * x;
        for k in 3..40 {
            xk *= x;
            let term = xk / (2.0 * k as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    } else {
        -0.5 * p.ln_r - 0.25 * p.x * (1.0 + p.r)
    }
}
