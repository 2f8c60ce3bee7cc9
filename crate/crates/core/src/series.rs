//! Truncated power series `f(z) = Σ_{k≤N} c_k z^k` on the unit disk.
//!
//! Every identity in the crate is checked at the level of Taylor
//! coefficients, so the series type is deliberately small: dense complex
//! coefficients, exact coefficientwise operations, and Horner evaluation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::weights::MomentTable;

/// Default truncation degree for series literals without `@N`.
pub const DEFAULT_DEGREE: usize = 256;
/// Default evaluation radius covered by the truncation budget.
pub const DEFAULT_RHO_MAX: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    rho_max: f64,
}

impl PowerSeries {
    /// Builds a series from its Taylor coefficients. An empty list is the
    /// zero series of degree 0.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        Self {
            coeffs,
            rho_max: DEFAULT_RHO_MAX,
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); degree + 1])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `z^k`
    pub fn monomial(k: usize) -> Self {
        let mut s = Self::zero(k);
        s.coeffs[k] = Complex64::new(1.0, 0.0);
        s
    }

    /// Coefficients `0, 1, 1/2, 1/3, …` of `log(1/(1 − z))`.
    pub fn logfn(degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        for (k, v) in c.iter_mut().enumerate().skip(1) {
            *v = 1.0 / k as f64;
        }
        Self::from_real(&c)
    }

    /// All-ones coefficients, the truncation of `1/(1 − z)`.
    pub fn geom(degree: usize) -> Self {
        Self::from_real(&vec![1.0; degree + 1])
    }

    /// Polynomial of the given degree with coefficients uniform in the unit
    /// square of ℂ.
    pub fn random<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Self {
        Self::new(
            (0..=degree)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
    }

    pub fn with_rho_max(mut self, rho_max: f64) -> Self {
        self.rho_max = rho_max;
        self
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`, zero beyond the truncation degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Truncation bound `max|c_k| ρ^{N+1}/(1 − ρ)` for the tail of the
    /// underlying function, assuming its coefficients stay below `max|c_k|`.
    pub fn truncation_bound(&self, rho: f64) -> f64 {
        self.max_abs_coeff() * rho.powi(self.degree() as i32 + 1) / (1.0 - rho)
    }

    /// Horner evaluation. Points beyond `ρ_max` are evaluated but logged,
    /// since the truncation error budget no longer covers them.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let m = z.norm();
        if !(m < 1.0) {
            return Err(Error::Domain(format!(
                "|z| = {m} is not inside the unit disk"
            )));
        }
        if m > self.rho_max {
            log::warn!(
                "evaluating a degree-{} series at |z| = {m} beyond the budget radius {}",
                self.degree(),
                self.rho_max
            );
        }
        Ok(self.horner(z))
    }

    /// Evaluation without the domain check; for points known to be inside.
    pub(crate) fn horner(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero(0).with_rho_max(self.rho_max);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
        .with_rho_max(self.rho_max)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// `f_r(z) = f(rz)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!(
                "dilation radius {r} is outside (0, 1)"
            )));
        }
        let mut rk = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let v = c * rk;
                rk *= r;
                v
            })
            .collect();
        Ok(Self::new(coeffs).with_rho_max(self.rho_max))
    }

    /// Coefficient multiplier `c_k ↦ m_k c_k`.
    pub fn multiplier_apply(&self, m: &[f64]) -> Result<Self> {
        if m.len() < self.coeffs.len() {
            return Err(Error::LengthMismatch {
                expected: self.coeffs.len(),
                got: m.len(),
            });
        }
        Ok(
            Self::new(self.coeffs.iter().zip(m).map(|(&c, &mk)| c * mk).collect())
                .with_rho_max(self.rho_max),
        )
    }

    /// `⟨f, g⟩_ω = Σ f_k conj(g_k) ω_k`, by orthogonality of monomials
    /// under radial weights.
    pub fn inner_product_radial(
        &self,
        other: &PowerSeries,
        moments: &MomentTable,
    ) -> Result<Complex64> {
        let n = self.coeffs.len().min(other.coeffs.len());
        // terms beyond the shorter series vanish, but the table must still
        // cover the shorter degree
        if moments.len() < n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: moments.len(),
            });
        }
        Ok((0..n)
            .map(|k| self.coeffs[k] * other.coeffs[k].conj() * moments.value(k))
            .sum())
    }

    /// `(f − f(0))/z`
    pub fn shift_down(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero(0).with_rho_max(self.rho_max);
        }
        Self::new(self.coeffs[1..].to_vec()).with_rho_max(self.rho_max)
    }

    /// `z f(z)`
    pub fn mul_z(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(Complex64::new(0.0, 0.0));
        c.extend_from_slice(&self.coeffs);
        Self::new(c).with_rho_max(self.rho_max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect()).with_rho_max(self.rho_max)
    }

    pub fn add(&self, other: &PowerSeries) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
            .with_rho_max(self.rho_max)
    }

    pub fn sub(&self, other: &PowerSeries) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Same function truncated or zero-padded to `degree`.
    pub fn resized(&self, degree: usize) -> Self {
        Self::new((0..=degree).map(|k| self.coeff(k)).collect()).with_rho_max(self.rho_max)
    }

    /// Largest `|c_k − d_k|` over the union of supports.
    pub fn max_coeff_deviation(&self, other: &PowerSeries) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for PowerSeries {
    /// Renders as a `poly:[...]` literal.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poly:[")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "{}{:+}i", c.re, c.im)?;
            }
        }
        write!(f, "]")
    }
}

/// Parses `poly:[c0,c1,...]` (entries real or complex such as `1-2i`),
/// `logfn[@N]` or `geom[@N]`.
pub fn parse_series_literal(src: &str) -> Result<PowerSeries> {
    let s = src.trim();
    let degree_suffix = |rest: &str, offset: usize| -> Result<usize> {
        if rest.is_empty() {
            return Ok(DEFAULT_DEGREE);
        }
        let Some(n) = rest.strip_prefix('@') else {
            return Err(Error::parse(offset, "expected `@<degree>`"));
        };
        n.trim()
            .parse()
            .map_err(|_| Error::parse(offset + 1, "bad degree"))
    };
    if let Some(rest) = s.strip_prefix("logfn") {
        return Ok(PowerSeries::logfn(degree_suffix(rest, 5)?));
    }
    if let Some(rest) = s.strip_prefix("geom") {
        return Ok(PowerSeries::geom(degree_suffix(rest, 4)?));
    }
    let Some(body) = s.strip_prefix("poly:[") else {
        return Err(Error::parse(0, "expected `poly:[...]`, `logfn` or `geom`"));
    };
    let Some(body) = body.strip_suffix(']') else {
        return Err(Error::parse(s.len(), "missing `]`"));
    };
    let mut coeffs = Vec::new();
    let mut offset = 6;
    for item in body.split(',') {
        let text: String = item.chars().filter(|c| !c.is_whitespace()).collect();
        let c = Complex64::from_str(&text)
            .map_err(|_| Error::parse(offset, format!("bad coefficient `{text}`")))?;
        coeffs.push(c);
        offset += item.len() + 1;
    }
    Ok(PowerSeries::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::RadialWeight;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation() {
        let f = PowerSeries::monomial(1);
        assert_eq!(f.eval(c(0.3, 0.4)).unwrap(), c(0.3, 0.4));
        let g = PowerSeries::geom(60);
        assert!((g.eval(c(0.5, 0.0)).unwrap() - c(2.0, 0.0)).norm() <= 0.5f64.powi(61) / 0.5);
        let l = PowerSeries::logfn(64);
        assert!((l.eval(c(0.5, 0.0)).unwrap().re - 2f64.ln()).abs() < 1e-20 + 0.5f64.powi(64));
        assert!(f.eval(c(0.6, 0.8)).is_err());
    }

    #[test]
    fn derivative_and_dilation() {
        let z2 = PowerSeries::monomial(2);
        assert_eq!(z2.derivative().coeffs(), &[c(0.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(
            PowerSeries::constant(c(3.0, 1.0)).derivative().coeffs(),
            &[c(0.0, 0.0)]
        );
        let d = PowerSeries::logfn(10).derivative();
        assert!(d.coeffs().iter().all(|&x| (x - c(1.0, 0.0)).norm() < 1e-15));
        assert_eq!(d.degree(), 9);
        let z = PowerSeries::monomial(1).dilate(0.5).unwrap();
        assert_eq!(z.coeff(1), c(0.5, 0.0));
        assert!(PowerSeries::monomial(1).dilate(1.0).is_err());
    }

    #[test]
    fn multiplier_examples() {
        let z2 = PowerSeries::monomial(2);
        let m: Vec<f64> = (0..3).map(|k| k as f64 + 1.0).collect();
        assert_eq!(z2.multiplier_apply(&m).unwrap().coeff(2), c(3.0, 0.0));
        assert!(z2.multiplier_apply(&m[..2]).is_err());
    }

    #[test]
    fn radial_inner_product() {
        let t = RadialWeight::standard(0.0)
            .unwrap()
            .moments_upto(4)
            .unwrap();
        let z = PowerSeries::monomial(1);
        assert_eq!(z.inner_product_radial(&z, &t).unwrap(), c(0.5, 0.0));
        assert_eq!(
            z.inner_product_radial(&PowerSeries::monomial(3), &t)
                .unwrap(),
            c(0.0, 0.0)
        );
        let long = PowerSeries::monomial(6);
        assert!(long.inner_product_radial(&long, &t).is_err());
    }

    #[test]
    fn literals() {
        let p = parse_series_literal("poly:[1, 0, 2-1i]").unwrap();
        assert_eq!(p.coeffs(), &[c(1.0, 0.0), c(0.0, 0.0), c(2.0, -1.0)]);
        assert_eq!(parse_series_literal(&p.to_string()).unwrap(), p);
        assert_eq!(parse_series_literal("logfn@64").unwrap().degree(), 64);
        assert_eq!(
            parse_series_literal("geom").unwrap().degree(),
            DEFAULT_DEGREE
        );
        assert!(parse_series_literal("poly:[1,x]").is_err());
        assert!(parse_series_literal("sin").is_err());
    }
}
