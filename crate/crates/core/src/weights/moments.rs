//! Moments `ω_n = 2∫_0^1 r^{2n+1} ω(r) dr` and moment tables.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use super::{RadialWeight, Transform, WeightKind, MOMENT_TOL};
use crate::coords::{integrate_logit, RadialPoint};
use crate::error::{Error, Result};
use crate::quadrature::{Estimate, Options};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentMethod::ClosedForm => "closed_form",
            MomentMethod::Quadrature => "quadrature",
        })
    }
}

/// Moments `ω_0..ω_N` of one weight with absolute error estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub weight: String,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub method: MomentMethod,
}

impl MomentTable {
    /// Highest index `N` held by the table.
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Checks positivity and strict decrease.
    pub fn check_invariants(&self) -> Result<()> {
        for (n, &v) in self.values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Integration(format!(
                    "moment {n} of {} is {v}",
                    self.weight
                )));
            }
        }
        for (n, w) in self.values.windows(2).enumerate() {
            if !(w[1] < w[0]) {
                return Err(Error::Integration(format!(
                    "moments of {} are not decreasing at n = {}",
                    self.weight,
                    n + 1
                )));
            }
        }
        Ok(())
    }

    /// CSV with columns `n,value,abs_error,method`, values at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,abs_error,method\n");
        for (n, (v, e)) in self.values.iter().zip(&self.errors).enumerate() {
            let _ = writeln!(out, "{n},{v:.16e},{e:.16e},{}", self.method);
        }
        out
    }

    pub fn from_csv(weight: &str, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(0, "empty moment table"))?;
        if header.trim() != "n,value,abs_error,method" {
            return Err(Error::parse(0, format!("unexpected header `{header}`")));
        }
        let mut values = Vec::new();
        let mut errors = Vec::new();
        let mut method = None;
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            let bad = |msg: &str| Error::parse(i + 1, msg.to_string());
            if cols.len() != 4 {
                return Err(bad("expected four columns"));
            }
            let n: usize = cols[0].parse().map_err(|_| bad("bad index"))?;
            if n != values.len() {
                return Err(bad("indices must be consecutive from 0"));
            }
            values.push(cols[1].parse().map_err(|_| bad("bad value"))?);
            errors.push(cols[2].parse().map_err(|_| bad("bad error"))?);
            let m = match cols[3].trim() {
                "closed_form" => MomentMethod::ClosedForm,
                "quadrature" => MomentMethod::Quadrature,
                _ => return Err(bad("unknown method")),
            };
            if method.is_some_and(|prev| prev != m) {
                return Err(bad("mixed methods in one table"));
            }
            method = Some(m);
        }
        Ok(MomentTable {
            weight: weight.to_string(),
            values,
            errors,
            method: method.ok_or_else(|| Error::parse(1, "no rows"))?,
        })
    }
}

/// Outcome of checking a closed-form moment rule against quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub max_rel_dev_coarse: f64,
    pub max_rel_dev_fine: f64,
    pub passed: bool,
}

impl RadialWeight {
    pub fn has_moment_oracle(&self) -> bool {
        self.closed_form_moment(0).is_some()
    }

    /// Exact moments: the Beta integral for the standard family,
    /// `2B(2n+2, α+1)` for `(1 − r)^α`.
    pub fn closed_form_moment(&self, n: usize) -> Option<f64> {
        match self.kind() {
            WeightKind::Standard { alpha } => {
                // B(n+1, α+1) by B(k+1, b) = B(k, b)·k/(k+b)
                let b = alpha + 1.0;
                let mut v = 1.0 / b;
                for k in 1..=n {
                    let k = k as f64;
                    v *= k / (k + b);
                }
                Some(v)
            }
            WeightKind::Transformed {
                op: Transform::AlphaShift { alpha },
                base,
            } if matches!(base.kind(), WeightKind::Standard { alpha: a0 } if *a0 == 0.0) => {
                let b = alpha + 1.0;
                // B(2, b) = 1/(b(b+1))
                let mut v = 1.0 / (b * (b + 1.0));
                for k in 1..=n {
                    let a = (2 * k) as f64;
                    v *= a / (a + b) * (a + 1.0) / (a + 1.0 + b);
                }
                Some(2.0 * v)
            }
            _ => None,
        }
    }

    /// `ω_n` at the default tolerance.
    pub fn moment(&self, n: usize) -> Result<f64> {
        Ok(self.moment_estimate(n, MOMENT_TOL)?.0.value)
    }

    /// `ω_n` with its error estimate, using the closed form when one exists.
    pub fn moment_estimate(&self, n: usize, rel_tol: f64) -> Result<(Estimate, MomentMethod)> {
        if let Some(v) = self.closed_form_moment(n) {
            return Ok((Estimate::exact(v), MomentMethod::ClosedForm));
        }
        if let WeightKind::ZeroAnnulus { base, a, b } = self.kind() {
            if let Some(full) = base.closed_form_moment(n) {
                let lo = RadialPoint::from_r_unchecked(*a);
                let hi = RadialPoint::from_r_unchecked(*b);
                let hole = integrate_logit(
                    Some(&lo),
                    Some(&hi),
                    &[],
                    |p| weighted_kernel(n, p, base),
                    &Options::with_rel_tol(rel_tol * 1e-2),
                )?;
                let est = Estimate {
                    value: full - hole.value,
                    error: hole.error + f64::EPSILON * full,
                    evaluations: hole.evaluations,
                };
                return Ok((est, MomentMethod::Quadrature));
            }
        }
        Ok((
            self.moment_by_quadrature(n, rel_tol)?,
            MomentMethod::Quadrature,
        ))
    }

    /// `ω_n` by quadrature of the weight, ignoring any closed form.
    pub fn moment_by_quadrature(&self, n: usize, rel_tol: f64) -> Result<Estimate> {
        integrate_logit(
            None,
            None,
            &self.breakpoints(),
            |p| weighted_kernel(n, p, self),
            &Options::with_rel_tol(rel_tol),
        )
    }

    /// Table of `ω_0..ω_N`. Fails if the computed values violate positivity
    /// or strict decrease.
    pub fn moments_upto(&self, max_index: usize) -> Result<MomentTable> {
        let mut values = Vec::with_capacity(max_index + 1);
        let mut errors = Vec::with_capacity(max_index + 1);
        let method = if let Some(first) = self.closed_form_moment(0) {
            // run the recurrence once instead of restarting it per index
            values.push(first);
            self.extend_closed_form(&mut values, max_index);
            errors.extend(values.iter().map(|v| f64::EPSILON * v));
            MomentMethod::ClosedForm
        } else {
            for n in 0..=max_index {
                let (est, _) = self.moment_estimate(n, MOMENT_TOL)?;
                values.push(est.value);
                errors.push(est.error);
            }
            MomentMethod::Quadrature
        };
        let table = MomentTable {
            weight: self.label(),
            values,
            errors,
            method,
        };
        table.check_invariants()?;
        Ok(table)
    }

    fn extend_closed_form(&self, values: &mut Vec<f64>, max_index: usize) {
        match self.kind() {
            WeightKind::Standard { alpha } => {
                let b = alpha + 1.0;
                for k in 1..=max_index {
                    let k = k as f64;
                    let prev = *values.last().unwrap();
                    values.push(prev * k / (k + b));
                }
            }
            WeightKind::Transformed {
                op: Transform::AlphaShift { alpha },
                ..
            } => {
                let b = alpha + 1.0;
                for k in 1..=max_index {
                    let a = (2 * k) as f64;
                    let prev = *values.last().unwrap();
                    values.push(prev * a / (a + b) * (a + 1.0) / (a + 1.0 + b));
                }
            }
            _ => unreachable!("no closed form"),
        }
    }

    /// Compares the closed-form moment rule with quadrature at two
    /// tolerances for `n ≤ max_index`. Weights without a rule pass trivially.
    pub fn validate_moment_oracle(&self, max_index: usize) -> Result<OracleCheck> {
        let mut coarse: f64 = 0.0;
        let mut fine: f64 = 0.0;
        for n in 0..=max_index {
            let Some(exact) = self.closed_form_moment(n) else {
                return Ok(OracleCheck {
                    max_rel_dev_coarse: 0.0,
                    max_rel_dev_fine: 0.0,
                    passed: true,
                });
            };
            let c = self.moment_by_quadrature(n, 1e-8)?.value;
            let f = self.moment_by_quadrature(n, 1e-12)?.value;
            coarse = coarse.max((c - exact).abs() / exact);
            fine = fine.max((f - exact).abs() / exact);
        }
        Ok(OracleCheck {
            max_rel_dev_coarse: coarse,
            max_rel_dev_fine: fine,
            passed: coarse <= 1e-7 && fine <= 1e-10,
        })
    }
}

/// `2 r^{2n+1} · r`, the moment integrand in the logit variable once the
/// weight supplies `ω(r)(1 − r)`.
#[inline]
fn moment_kernel(n: usize, p: &RadialPoint) -> f64 {
    2.0 * ((2 * n + 2) as f64 * p.ln_r).exp()
}

/// `moment_kernel · ω(r)(1 − r)`. Where the kernel underflows the weight is
/// not evaluated at all: transforms with logarithmic growth at the origin
/// overflow there, while the product is zero.
#[inline]
fn weighted_kernel(n: usize, p: &RadialPoint, w: &RadialWeight) -> Result<f64> {
    let k = moment_kernel(n, p);
    if k == 0.0 {
        return Ok(0.0);
    }
    Ok(k * w.scaled(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_w(a: f64) -> RadialWeight {
        RadialWeight::standard(a).unwrap()
    }

    #[test]
    fn trivial_moments() {
        assert_eq!(std_w(0.0).moment(3).unwrap(), 0.25);
        assert!((std_w(1.0).moment(0).unwrap() - 0.5).abs() < 1e-16);
        let t = std_w(0.0).moments_upto(4).unwrap();
        for (n, v) in t.values.iter().enumerate() {
            assert!((v - 1.0 / (n as f64 + 1.0)).abs() < 1e-16);
        }
        assert_eq!(t.method, MomentMethod::ClosedForm);
        assert_eq!(
            std_w(1.0).total_mass().unwrap(),
            std_w(1.0).moment(0).unwrap()
        );
    }

    #[test]
    fn beta_oracle_agrees_with_quadrature() {
        for a in [-0.5, 0.0, 1.0, 1.5, 3.25] {
            let check = std_w(a).validate_moment_oracle(60).unwrap();
            assert!(check.passed, "alpha={a}: {check:?}");
        }
        let shifted = std_w(0.0).alpha_shift(0.5).unwrap();
        let check = shifted.validate_moment_oracle(60).unwrap();
        assert!(check.passed, "{check:?}");
        // explicit values: (1 − r)^1 has moments 1/3, 1/10
        let s1 = std_w(0.0).alpha_shift(1.0).unwrap();
        assert!((s1.moment(0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!((s1.moment(1).unwrap() - 0.1).abs() < 1e-16);
    }

    #[test]
    fn logarithmic_moments_are_self_consistent() {
        let w = RadialWeight::logarithmic(2.0).unwrap();
        let t = w.moments_upto(50).unwrap();
        assert_eq!(t.method, MomentMethod::Quadrature);
        for n in 0..=50 {
            assert!(t.errors[n] <= 1e-10 * t.values[n], "n={n}");
            let tight = w.moment_by_quadrature(n, 1e-13).unwrap().value;
            assert!((tight - t.values[n]).abs() <= 1e-10 * tight);
        }
        // ω_0 = 2∫_0^1 ω̂ = 2∫_0^∞ e^{−u}/(1+u) du = 2e·E₁(1)
        assert!(
            (t.values[0] - 2.0 * 0.596_347_362_323_194_1).abs() < 1e-12,
            "{}",
            t.values[0]
        );
    }

    #[test]
    fn zero_annulus_hybrid_matches_full_quadrature() {
        let z = RadialWeight::zero_annulus(&std_w(1.0), 0.3, 0.4).unwrap();
        for n in [0, 1, 5, 40] {
            let hybrid = z.moment(n).unwrap();
            let full = z.moment_by_quadrature(n, 1e-12).unwrap().value;
            assert!((hybrid - full).abs() <= 1e-11 * full, "n={n}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let t = RadialWeight::logarithmic(2.0)
            .unwrap()
            .moments_upto(5)
            .unwrap();
        let back = MomentTable::from_csv(&t.weight, &t.to_csv()).unwrap();
        assert_eq!(back, t);
        assert!(MomentTable::from_csv("w", "n,value\n0,1").is_err());
    }
}
