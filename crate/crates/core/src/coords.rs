//! Points of `[0, 1)` carried together with `1 − r` and both logarithms.
//!
//! Every radial integral in the crate runs in the logit variable
//! `t = ln(r / (1 − r))`, so neither endpoint ever has to be resolved in `r`
//! itself. Weights with slowly decaying tails near `r = 1` (the logarithmic
//! family keeps mass at `1 − r < 1e-300`) are integrated without loss this way.

use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, Interval, Options};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r: f64,
    /// `1 − r`
    pub x: f64,
    pub ln_r: f64,
    /// `ln(1 − r)`
    pub ln_x: f64,
}

#[inline]
fn softplus(y: f64) -> f64 {
    y.max(0.0) + (-y.abs()).exp().ln_1p()
}

impl RadialPoint {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("radius {r} is outside [0, 1)")));
        }
        Ok(Self::from_r_unchecked(r))
    }

    pub(crate) fn from_r_unchecked(r: f64) -> Self {
        Self {
            r,
            x: 1.0 - r,
            ln_r: r.ln(),
            ln_x: (-r).ln_1p(),
        }
    }

    /// Point with `ln r` given, for radii too small to carry `r` itself.
    pub fn from_ln_r(ln_r: f64) -> Self {
        let r = ln_r.exp();
        Self {
            r,
            x: -ln_r.exp_m1(),
            ln_r,
            ln_x: (-r).ln_1p(),
        }
    }

    /// Point with `1 − r = x`, accurate even when `r` rounds to one.
    pub fn from_complement(x: f64) -> Self {
        Self {
            r: 1.0 - x,
            x,
            ln_r: (-x).ln_1p(),
            ln_x: x.ln(),
        }
    }

    pub fn from_logit(t: f64) -> Self {
        let ln_r = -softplus(-t);
        let ln_x = -softplus(t);
        Self {
            r: ln_r.exp(),
            x: ln_x.exp(),
            ln_r,
            ln_x,
        }
    }

    pub fn logit(&self) -> f64 {
        self.ln_r - self.ln_x
    }

    /// `s(1 − s)`, the Jacobian `ds/dt`.
    pub fn jacobian(&self) -> f64 {
        (self.ln_r + self.ln_x).exp()
    }

    pub(crate) fn memo_key(&self) -> (u64, u64) {
        (self.ln_r.to_bits(), self.ln_x.to_bits())
    }
}

pub(crate) fn logit(r: f64) -> f64 {
    RadialPoint::from_r_unchecked(r).logit()
}

/// Integrates over `lo < s < hi` in the logit variable. `f` receives the
/// point and must return the integrand already multiplied by `s(1 − s)`.
/// `None` bounds mean `0` and `1`. The range is split at `s = 1/2` and at
/// every breakpoint strictly inside it.
pub fn integrate_logit<F>(
    lo: Option<&RadialPoint>,
    hi: Option<&RadialPoint>,
    breakpoints: &[f64],
    mut f: F,
    opts: &Options,
) -> Result<Estimate>
where
    F: FnMut(&RadialPoint) -> Result<f64>,
{
    // r = 0 and r = 1 have infinite logits; treat them as open ends
    let t_lo = lo.map(RadialPoint::logit).filter(|t| t.is_finite());
    let t_hi = hi.map(RadialPoint::logit).filter(|t| t.is_finite());
    if let (Some(a), Some(b)) = (t_lo, t_hi) {
        if a >= b {
            return Ok(Estimate::exact(0.0));
        }
    }
    let inside = |t: f64| t_lo.is_none_or(|a| t > a) && t_hi.is_none_or(|b| t < b);
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .map(|&b| logit(b))
        .chain(std::iter::once(0.0))
        .filter(|&t| t.is_finite() && inside(t))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = Estimate::exact(0.0);
    let mut unsettled = false;
    let mut g = |t: f64| f(&RadialPoint::from_logit(t));
    let mut left = t_lo;
    for &c in &cuts {
        let iv = match left {
            None => Interval::Lower(c),
            Some(a) => Interval::Finite(a, c),
        };
        total = total + segment(&mut g, iv, opts, &mut unsettled)?;
        left = Some(c);
    }
    let iv = match (left, t_hi) {
        (Some(a), Some(b)) => Interval::Finite(a, b),
        (Some(a), None) => Interval::Upper(a),
        (None, Some(b)) => Interval::Lower(b),
        // unreachable: 0 is always a cut when both ends are open
        (None, None) => Interval::Upper(0.0),
    };
    total = total + segment(&mut g, iv, opts, &mut unsettled)?;
    // a segment carrying a negligible share of the integral may miss its own
    // relative target; only the combined error has to meet the tolerance
    if unsettled && total.error > opts.abs_tol.max(opts.rel_tol * total.value.abs()) {
        return Err(Error::NonConvergence {
            estimate: total.value,
            error: total.error,
        });
    }
    Ok(total)
}

fn segment<G>(g: &mut G, iv: Interval, opts: &Options, unsettled: &mut bool) -> Result<Estimate>
where
    G: FnMut(f64) -> Result<f64>,
{
    // failures of the integrand itself must not pass for slow convergence
    let mut failure = None;
    let est = quadrature::integrate(
        |t| match g(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        iv,
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    match est {
        Err(Error::NonConvergence { estimate, error }) => {
            *unsettled = true;
            Ok(Estimate {
                value: estimate,
                error,
                evaluations: 0,
            })
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logit_round_trip() {
        for &r in &[1e-300, 1e-5, 0.25, 0.5, 0.9, 1.0 - 1e-12] {
            let p = RadialPoint::new(r).unwrap();
            let q = RadialPoint::from_logit(p.logit());
            assert!((q.r - r).abs() <= 1e-15 * r.max(1e-300) + 1e-300);
            assert!((q.x - p.x).abs() <= 1e-13 * p.x);
        }
    }

    #[test]
    fn far_points_keep_their_logarithms() {
        let p = RadialPoint::from_logit(2000.0);
        assert_eq!(p.r, 1.0);
        assert_eq!(p.x, 0.0);
        assert!((p.ln_x + 2000.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_radii_outside_the_disk() {
        assert!(RadialPoint::new(1.0).is_err());
        assert!(RadialPoint::new(-0.1).is_err());
    }

    #[test]
    fn integrates_plain_functions() {
        let opts = Options::with_rel_tol(1e-12);
        // ∫_0^1 s^3 ds
        let est =
            integrate_logit(None, None, &[], |p| Ok(p.r.powi(3) * p.jacobian()), &opts).unwrap();
        assert!((est.value - 0.25).abs() < 1e-13);
        // ∫_{0.3}^{0.8} ds with a breakpoint
        let lo = RadialPoint::new(0.3).unwrap();
        let hi = RadialPoint::new(0.8).unwrap();
        let est =
            integrate_logit(Some(&lo), Some(&hi), &[0.6], |p| Ok(p.jacobian()), &opts).unwrap();
        assert!((est.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn logarithmic_tail_mass_is_captured() {
        // ∫_0^1 ds / ((1−s)(1 − ln(1−s))²) = 1, most of it is invisible in r
        let opts = Options::with_rel_tol(1e-12);
        let est =
            integrate_logit(None, None, &[], |p| Ok(p.r / (1.0 - p.ln_x).powi(2)), &opts).unwrap();
        assert!((est.value - 1.0).abs() < 1e-11, "{}", est.value);
    }
}
