//! Radial weights on the unit disk.
//!
//! A [`RadialWeight`] is an immutable, cheaply clonable handle. Besides the
//! four base families it carries the transforms used throughout the crate:
//!
//! | transform | definition |
//! |---|---|
//! | `ω_{+N}` | `ω_+(r) = 2∫_r^1 ω(s) ds/s`, applied `N` times |
//! | `ω*` | `∫_r^1 ω(s) s log(s/r) ds` |
//! | `ω_α` | `(1 − r)^α ω(r)` |
//! | `ω̃` | `ω̂(r) / (1 − r)` |
//! | `|·|²ω` | `r² ω(r)` |
//!
//! The standard family is unnormalised: `Standard(α)` is `(1 − r²)^α`.
//! Moments are `ω_n = 2∫_0^1 r^{2n+1} ω(r) dr`, the moments of the
//! normalised area measure.

mod eval;
mod moments;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::coords::RadialPoint;
use crate::error::{Error, Result};

pub use moments::{MomentMethod, MomentTable, OracleCheck};
pub use parse::parse_weight_spec;

/// Relative tolerance for moments computed by quadrature.
pub const MOMENT_TOL: f64 = 1e-10;
/// Relative tolerance for the inner integrals of plus, star and tilde
/// transforms; tighter than [`MOMENT_TOL`] so outer integrals can reach it.
pub(crate) const INNER_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `ω_{+order}`; consecutive plus transforms are merged.
    Plus {
        order: u32,
    },
    Star,
    AlphaShift {
        alpha: f64,
    },
    Tilde,
    MultiplyR2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(
                "a tabulated weight needs at least two samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Domain(
                    "tabulated radii must be strictly increasing".into(),
                ));
            }
        }
        if samples[0].0 < 0.0 || samples[samples.len() - 1].0 >= 1.0 {
            return Err(Error::Domain("tabulated radii must lie in [0, 1)".into()));
        }
        if samples.iter().any(|s| !(s.1 >= 0.0) || !s.1.is_finite()) {
            return Err(Error::Domain(
                "tabulated values must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            radii: samples.iter().map(|s| s.0).collect(),
            values: samples.iter().map(|s| s.1).collect(),
        })
    }

    /// Piecewise-linear interpolation, constant beyond the first and last sample.
    pub fn value(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.values[0];
        }
        if r >= self.radii[n - 1] {
            return self.values[n - 1];
        }
        let i = self.radii.partition_point(|&s| s <= r) - 1;
        let (r0, r1) = (self.radii[i], self.radii[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radii.iter().copied().zip(self.values.iter().copied())
    }
}

#[derive(Debug, Clone)]
pub enum WeightKind {
    /// `(1 − r²)^α`, `α > −1`
    Standard {
        alpha: f64,
    },
    /// `1 / ((1 − r)(1 − log(1 − r))^β)`, `β > 1`
    Logarithmic {
        beta: f64,
    },
    /// The base weight, set to zero on `[a, b]`.
    ZeroAnnulus {
        base: RadialWeight,
        a: f64,
        b: f64,
    },
    /// `exp(−c / (1 − r))`; a negative control for the doubling classes.
    Exponential {
        c: f64,
    },
    Tabulated(Tabulated),
    Transformed {
        op: Transform,
        base: RadialWeight,
    },
}

struct Node {
    kind: WeightKind,
    /// Pointwise values of transformed weights whose evaluation is itself a
    /// quadrature. Written at most once per key.
    memo: RwLock<HashMap<(u64, u64), f64>>,
}

#[derive(Clone)]
pub struct RadialWeight(Arc<Node>);

impl RadialWeight {
    fn from_kind(kind: WeightKind) -> Self {
        RadialWeight(Arc::new(Node {
            kind,
            memo: RwLock::new(HashMap::new()),
        }))
    }

    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "standard weight needs alpha > -1, got {alpha}"
            )));
        }
        Ok(Self::from_kind(WeightKind::Standard { alpha }))
    }

    pub fn logarithmic(beta: f64) -> Result<Self> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::Domain(format!(
                "logarithmic weight needs beta > 1, got {beta}"
            )));
        }
        Ok(Self::from_kind(WeightKind::Logarithmic { beta }))
    }

    pub fn exponential(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "exponential weight needs c > 0, got {c}"
            )));
        }
        Ok(Self::from_kind(WeightKind::Exponential { c }))
    }

    pub fn zero_annulus(base: &RadialWeight, a: f64, b: f64) -> Result<Self> {
        if !(0.0 < a && a < b && b < 1.0) {
            return Err(Error::Domain(format!(
                "zero annulus needs 0 < a < b < 1, got [{a}, {b}]"
            )));
        }
        Ok(Self::from_kind(WeightKind::ZeroAnnulus {
            base: base.clone(),
            a,
            b,
        }))
    }

    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        let table = Tabulated::new(samples)?;
        if !table.values.iter().any(|&v| v > 0.0) {
            return Err(Error::Domain("tabulated weight is identically zero".into()));
        }
        Ok(Self::from_kind(WeightKind::Tabulated(table)))
    }

    fn transformed(&self, op: Transform) -> Self {
        Self::from_kind(WeightKind::Transformed {
            op,
            base: self.clone(),
        })
    }

    /// `ω_+`. Applying it to `ω_{+N}` yields `ω_{+(N+1)}` over the same base.
    pub fn plus(&self) -> Self {
        self.plus_n(1)
    }

    /// `ω_{+n}`; `n = 0` returns the weight itself.
    pub fn plus_n(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        match &self.0.kind {
            WeightKind::Transformed {
                op: Transform::Plus { order },
                base,
            } => base.transformed(Transform::Plus { order: order + n }),
            _ => self.transformed(Transform::Plus { order: n }),
        }
    }

    pub fn star(&self) -> Self {
        self.transformed(Transform::Star)
    }

    /// `ω_α(r) = (1 − r)^α ω(r)`.
    pub fn alpha_shift(&self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "alpha shift needs alpha >= 0, got {alpha}"
            )));
        }
        Ok(self.transformed(Transform::AlphaShift { alpha }))
    }

    pub fn tilde(&self) -> Self {
        self.transformed(Transform::Tilde)
    }

    /// `|·|²ω`
    pub fn times_r2(&self) -> Self {
        self.transformed(Transform::MultiplyR2)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.0.kind
    }

    /// Canonical mini-language rendering; doubles as the weight identifier.
    pub fn label(&self) -> String {
        self.to_string()
    }

    pub fn ptr_eq(&self, other: &RadialWeight) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Radii where the weight (or an ancestor) is discontinuous or kinked.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match &self.0.kind {
            WeightKind::ZeroAnnulus { base, a, b } => {
                out.push(*a);
                out.push(*b);
                base.collect_breakpoints(out);
            }
            WeightKind::Tabulated(t) => out.extend(t.radii.iter().copied().filter(|&r| r > 0.0)),
            WeightKind::Transformed { base, .. } => base.collect_breakpoints(out),
            _ => {}
        }
    }

    /// Whether the weight is strictly positive on `(0, 1)`.
    pub fn strictly_positive(&self) -> bool {
        match &self.0.kind {
            WeightKind::Standard { .. }
            | WeightKind::Logarithmic { .. }
            | WeightKind::Exponential { .. } => true,
            WeightKind::ZeroAnnulus { .. } => false,
            WeightKind::Tabulated(t) => t.values.iter().all(|&v| v > 0.0),
            WeightKind::Transformed { op, base } => match op {
                // positive wherever the tail of the base is
                Transform::Plus { .. } | Transform::Star | Transform::Tilde => true,
                Transform::AlphaShift { .. } | Transform::MultiplyR2 => base.strictly_positive(),
            },
        }
    }

    /// Total mass `ω(𝔻) = ∫_𝔻 ω dA`, which is the zeroth moment.
    pub fn total_mass(&self) -> Result<f64> {
        self.moment(0)
    }

    fn memo_get(&self, p: &RadialPoint) -> Option<f64> {
        self.0.memo.read().ok()?.get(&p.memo_key()).copied()
    }

    fn memo_put(&self, p: &RadialPoint, v: f64) {
        if let Ok(mut m) = self.0.memo.write() {
            m.entry(p.memo_key()).or_insert(v);
        }
    }
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialWeight({self})")
    }
}

impl PartialEq for RadialWeight {
    fn eq(&self, other: &Self) -> bool {
        self.ptr_eq(other) || self.label() == other.label()
    }
}

impl fmt::Display for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            WeightKind::Standard { alpha } => write!(f, "std:alpha={alpha}"),
            WeightKind::Logarithmic { beta } => write!(f, "log:beta={beta}"),
            WeightKind::Exponential { c } => write!(f, "exp:c={c}"),
            WeightKind::ZeroAnnulus { base, a, b } => write!(f, "zero:[{a},{b}]:{base}"),
            WeightKind::Tabulated(t) => {
                write!(f, "tab:[")?;
                for (i, (r, v)) in t.samples().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}/{v}")?;
                }
                write!(f, "]")
            }
            WeightKind::Transformed { op, base } => {
                // a zero-annulus base would swallow the suffix when parsed back
                if matches!(base.kind(), WeightKind::ZeroAnnulus { .. }) {
                    write!(f, "({base})")?;
                } else {
                    write!(f, "{base}")?;
                }
                match op {
                    Transform::Plus { order } => {
                        for _ in 0..*order {
                            write!(f, "+")?;
                        }
                        Ok(())
                    }
                    Transform::Star => write!(f, "*"),
                    Transform::Tilde => write!(f, "~"),
                    Transform::AlphaShift { alpha } => write!(f, "^alpha={alpha}"),
                    Transform::MultiplyR2 => write!(f, "@r2"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate_parameters() {
        assert!(RadialWeight::standard(-1.0).is_err());
        assert!(RadialWeight::logarithmic(1.0).is_err());
        assert!(RadialWeight::exponential(0.0).is_err());
        let s = RadialWeight::standard(0.0).unwrap();
        assert!(RadialWeight::zero_annulus(&s, 0.5, 0.4).is_err());
        assert!(RadialWeight::zero_annulus(&s, 0.0, 0.4).is_err());
        assert!(s.alpha_shift(-0.5).is_err());
        assert!(RadialWeight::tabulated(&[(0.0, 1.0)]).is_err());
        assert!(RadialWeight::tabulated(&[(0.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn plus_transforms_merge() {
        let s = RadialWeight::standard(0.0).unwrap();
        let w = s.plus().plus().plus();
        match w.kind() {
            WeightKind::Transformed {
                op: Transform::Plus { order },
                base,
            } => {
                assert_eq!(*order, 3);
                assert!(base.ptr_eq(&s));
            }
            k => panic!("unexpected {k:?}"),
        }
        assert_eq!(w.label(), "std:alpha=0+++");
        assert!(s.plus_n(0).ptr_eq(&s));
    }

    #[test]
    fn labels_and_breakpoints() {
        let s = RadialWeight::standard(1.0).unwrap();
        let z = RadialWeight::zero_annulus(&s, 0.3, 0.4).unwrap();
        assert_eq!(z.label(), "zero:[0.3,0.4]:std:alpha=1");
        assert_eq!(z.star().label(), "(zero:[0.3,0.4]:std:alpha=1)*");
        assert_eq!(z.plus().breakpoints(), vec![0.3, 0.4]);
        assert!(!z.strictly_positive());
        assert!(z.tilde().strictly_positive());
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let t = Tabulated::new(&[(0.0, 1.0), (0.5, 3.0), (0.9, 1.0)]).unwrap();
        assert_eq!(t.value(0.25), 2.0);
        assert_eq!(t.value(0.95), 1.0);
        assert!((t.value(0.7) - 2.0).abs() < 1e-15);
    }
}
