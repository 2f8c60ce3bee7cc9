//! Double-exponential quadrature.
//!
//! Finite intervals use the tanh-sinh map, half-infinite intervals the
//! exp-sinh map. The adaptive driver halves the step until two successive
//! levels agree; the reported error is the last level difference, floored
//! at the rounding noise of the sum.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Half-width of the tanh-sinh window in the `u` variable.
const FINITE_WINDOW: f64 = 3.6;
/// Window toward the finite end of a half-infinite interval.
const NEAR_WINDOW: f64 = 4.5;
/// Window toward infinity; `exp(π/2·sinh(6))` is about 1e137.
const FAR_WINDOW: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Finite(f64, f64),
    /// `[a, ∞)`
    Upper(f64),
    /// `(−∞, b]`
    Lower(f64),
}

impl Interval {
    fn window(&self) -> (f64, f64) {
        match self {
            Interval::Finite(..) => (-FINITE_WINDOW, FINITE_WINDOW),
            Interval::Upper(_) | Interval::Lower(_) => (-NEAR_WINDOW, FAR_WINDOW),
        }
    }

    fn grid_window(&self) -> (f64, f64) {
        match self {
            Interval::Finite(..) => (-3.2, 3.2),
            Interval::Upper(_) | Interval::Lower(_) => (-3.8, 3.6),
        }
    }

    fn touches_end(&self, t: f64) -> bool {
        match *self {
            Interval::Finite(a, b) => t == a || t == b,
            Interval::Upper(a) => t == a,
            Interval::Lower(b) => t == b,
        }
    }

    /// Maps `u` to the abscissa and the Jacobian `dt/du`.
    #[inline]
    fn map(&self, u: f64) -> (f64, f64) {
        let s = FRAC_PI_2 * u.sinh();
        let ds = FRAC_PI_2 * u.cosh();
        match *self {
            Interval::Finite(a, b) => {
                let d = 0.5 * (b - a);
                // sech²(s) written to avoid overflow of cosh for large |s|
                let e = (-2.0 * s.abs()).exp();
                let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
                // measure from the nearer endpoint so nodes never collapse onto it
                let gap = 2.0 * d * e / (1.0 + e);
                let t = if s >= 0.0 { b - gap } else { a + gap };
                (t, d * ds * sech2)
            }
            Interval::Upper(a) => {
                let e = s.exp();
                (a + e, ds * e)
            }
            Interval::Lower(b) => {
                let e = s.exp();
                (b - e, ds * e)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_level: u32,
    pub max_level: u32,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            min_level: 3,
            max_level: 10,
        }
    }
}

impl Options {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: f64::EPSILON * value.abs(),
            evaluations: 0,
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

/// Adaptive double-exponential integration of `f` over `interval`.
pub fn integrate<F>(mut f: F, interval: Interval, opts: &Options) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    if let Interval::Finite(a, b) = interval {
        if a == b {
            return Ok(Estimate::exact(0.0));
        }
    }
    let (lo, hi) = interval.window();
    let mut acc = 0.0;
    let mut abs_acc = 0.0;
    let mut evaluations = 0usize;

    let mut sweep = |nodes: &mut dyn Iterator<Item = f64>, acc: &mut f64, abs_acc: &mut f64| {
        for u in nodes {
            let (t, w) = interval.map(u);
            if w == 0.0 || !t.is_finite() || interval.touches_end(t) {
                continue;
            }
            let v = f(t);
            evaluations += 1;
            let term = w * v;
            if !term.is_finite() {
                return Err(Error::Integration(format!(
                    "non-finite integrand {v} at abscissa {t:e}"
                )));
            }
            *acc += term;
            *abs_acc += term.abs();
        }
        Ok(())
    };

    // level 0: integer nodes
    sweep(
        &mut (lo.ceil() as i64..=hi.floor() as i64).map(|k| k as f64),
        &mut acc,
        &mut abs_acc,
    )?;
    let mut h = 1.0;
    let mut previous = h * acc;
    let mut error = f64::INFINITY;

    for level in 1..=opts.max_level {
        h *= 0.5;
        // odd multiples of the new step
        let first = (lo / h).ceil() as i64;
        let first = if first % 2 == 0 { first + 1 } else { first };
        let last = (hi / h).floor() as i64;
        let step = h;
        sweep(
            &mut (first..=last).step_by(2).map(|j| j as f64 * step),
            &mut acc,
            &mut abs_acc,
        )?;
        let current = h * acc;
        let noise = 64.0 * f64::EPSILON * h * abs_acc;
        error = (current - previous).abs().max(noise);
        previous = current;
        // values below the normal range cannot carry a relative tolerance
        let target = opts
            .abs_tol
            .max(opts.rel_tol * current.abs())
            .max(noise)
            .max(f64::MIN_POSITIVE);
        if level >= opts.min_level && error <= target {
            return Ok(Estimate {
                value: current,
                error,
                evaluations,
            });
        }
    }
    Err(Error::NonConvergence {
        estimate: previous,
        error,
    })
}

/// Like [`integrate`], for integrands that can fail. The first failure aborts
/// the result (remaining nodes see a zero contribution).
pub fn try_integrate<F>(mut f: F, interval: Interval, opts: &Options) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut failure = None;
    let est = integrate(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        interval,
        opts,
    );
    match failure {
        Some(e) => Err(e),
        None => est,
    }
}

/// Fixed-size double-exponential rule with `n` nodes, as `(abscissa, weight)`
/// pairs. Used by discretisations that need the same nodes for many
/// integrands.
pub fn fixed_rule(interval: Interval, n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "a fixed rule needs at least two nodes");
    let (lo, hi) = interval.grid_window();
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let (t, w) = interval.map(lo + i as f64 * h);
            (t, w * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_on_unit_interval() {
        let est = integrate(|t| t * t, Interval::Finite(0.0, 1.0), &Options::default()).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 t^{-1/2} dt = 2
        let est = integrate(
            |t| t.powf(-0.5),
            Interval::Finite(0.0, 1.0),
            &Options::with_rel_tol(1e-14),
        )
        .unwrap();
        assert!((est.value - 2.0).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn half_infinite_intervals() {
        let opts = Options::default();
        let est = integrate(|t| (-t).exp(), Interval::Upper(0.0), &opts).unwrap();
        assert!((est.value - 1.0).abs() < 1e-13);
        // algebraic decay
        let est = integrate(|t| 1.0 / (1.0 + t).powi(2), Interval::Upper(0.0), &opts).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        let est = integrate(|t| t.exp(), Interval::Lower(0.0), &opts).unwrap();
        assert!((est.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn empty_interval_is_zero() {
        let est = integrate(|_| 1.0, Interval::Finite(0.3, 0.3), &Options::default()).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn nan_integrand_is_reported() {
        let err = integrate(
            |_| f64::NAN,
            Interval::Finite(0.0, 1.0),
            &Options::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integration(_)));
    }

    #[test]
    fn failure_propagates_from_fallible_integrand() {
        let err = try_integrate(
            |t| {
                if t > 0.5 {
                    Err(Error::LogSingularity)
                } else {
                    Ok(1.0)
                }
            },
            Interval::Finite(0.0, 1.0),
            &Options::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::LogSingularity);
    }

    #[test]
    fn oscillatory_integrand_needs_levels() {
        let opts = Options {
            max_level: 1,
            min_level: 1,
            ..Options::default()
        };
        let res = integrate(|t| (40.0 * t).sin(), Interval::Finite(0.0, 10.0), &opts);
        assert!(matches!(res, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn fixed_rule_integrates_smooth_functions() {
        let rule = fixed_rule(Interval::Finite(-1.0, 2.0), 60);
        let s: f64 = rule.iter().map(|&(t, w)| w * t.cos()).sum();
        assert!((s - (2f64.sin() + 1f64.sin())).abs() < 1e-12);
        let rule = fixed_rule(Interval::Upper(1.0), 80);
        let s: f64 = rule.iter().map(|&(t, w)| w * (-t).exp()).sum();
        assert!((s - (-1f64).exp()).abs() < 1e-11, "{s}");
    }
}
