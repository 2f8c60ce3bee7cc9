//! The fractional derivative `R^{ω,ν}`: the coefficient multiplier
//! `f_k ↦ (ω_k/ν_k) f_k`, the unique linear map sending `B_z^ω` to `B_z^ν`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::kernel_slice;
use crate::series::PowerSeries;
use crate::weights::{MomentTable, RadialWeight};

#[derive(Debug, Clone)]
pub struct FracDerivative {
    source: RadialWeight,
    target: RadialWeight,
    source_moments: MomentTable,
    target_moments: MomentTable,
    multipliers: Vec<f64>,
}

impl FracDerivative {
    /// `R^{ω,ν}` with multipliers `ω_k/ν_k` for `k ≤ degree`.
    pub fn build(omega: &RadialWeight, nu: &RadialWeight, degree: usize) -> Result<Self> {
        let sm = omega.moments_upto(degree)?;
        let tm = nu.moments_upto(degree)?;
        Ok(Self::from_parts(omega.clone(), nu.clone(), sm, tm))
    }

    fn from_parts(
        source: RadialWeight,
        target: RadialWeight,
        sm: MomentTable,
        tm: MomentTable,
    ) -> Self {
        let multipliers = sm
            .values
            .iter()
            .zip(&tm.values)
            .map(|(a, b)| a / b)
            .collect();
        Self {
            source,
            target,
            source_moments: sm,
            target_moments: tm,
            multipliers,
        }
    }

    pub fn source(&self) -> &RadialWeight {
        &self.source
    }

    pub fn target(&self) -> &RadialWeight {
        &self.target
    }

    pub fn degree(&self) -> usize {
        self.multipliers.len() - 1
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn source_moments(&self) -> &MomentTable {
        &self.source_moments
    }

    pub fn target_moments(&self) -> &MomentTable {
        &self.target_moments
    }

    pub fn apply(&self, f: &PowerSeries) -> Result<PowerSeries> {
        if f.degree() > self.degree() {
            return Err(Error::DegreeOverflow {
                degree: f.degree(),
                max: self.degree(),
            });
        }
        f.multiplier_apply(&self.multipliers)
    }

    /// `R^{ν,ω}`, reusing both moment tables.
    pub fn swapped(&self) -> Self {
        Self::from_parts(
            self.target.clone(),
            self.source.clone(),
            self.target_moments.clone(),
            self.source_moments.clone(),
        )
    }
}

/// `R^{ω,ν}f(z) = ⟨f, B_z^ν⟩_ω`, evaluated through the radial inner product
/// rather than the multiplier table.
pub fn apply_integral_form(
    omega: &RadialWeight,
    nu: &RadialWeight,
    f: &PowerSeries,
    z: Complex64,
) -> Result<Complex64> {
    apply_integral_form_plus(omega, nu, f, z, 0)
}

/// `⟨f, B_z^{ν_{+N}}⟩_{ω_{+N}}`, which equals `R^{ω,ν}f(z)` for every `N`.
pub fn apply_integral_form_plus(
    omega: &RadialWeight,
    nu: &RadialWeight,
    f: &PowerSeries,
    z: Complex64,
    n_plus: u32,
) -> Result<Complex64> {
    let n = f.degree();
    let kernel = kernel_slice(&nu.plus_n(n_plus), z, n)?;
    let moments = omega.plus_n(n_plus).moments_upto(n)?;
    f.inner_product_radial(&kernel.series, &moments)
}

/// Largest relative deviations, over `k ≤ N`, of the three multiplier
/// identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `R^{ω,ν} R^{η,σ} = R^{η,σ} R^{ω,ν}`
    pub commutation: f64,
    /// `R^{ω,ν} R^{η,ω} = R^{η,ν}`
    pub composition: f64,
    /// `R^{ω,ν} R^{ν,ω} = I`
    pub inversion: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.commutation.max(self.composition).max(self.inversion)
    }
}

pub fn identity_residuals(
    omega: &RadialWeight,
    nu: &RadialWeight,
    eta: &RadialWeight,
    sigma: &RadialWeight,
    degree: usize,
) -> Result<IdentityResiduals> {
    let r_on = FracDerivative::build(omega, nu, degree)?;
    let r_es = FracDerivative::build(eta, sigma, degree)?;
    let r_eo = FracDerivative::build(eta, omega, degree)?;
    let r_en = FracDerivative::build(eta, nu, degree)?;
    let r_no = r_on.swapped();

    // act on the all-ones series so the identities are exercised through
    // `apply` exactly as callers use it
    let ones = PowerSeries::geom(degree);
    let ab = r_on.apply(&r_es.apply(&ones)?)?;
    let ba = r_es.apply(&r_on.apply(&ones)?)?;
    let comp = r_on.apply(&r_eo.apply(&ones)?)?;
    let direct = r_en.apply(&ones)?;
    let inv = r_on.apply(&r_no.apply(&ones)?)?;

    let rel = |a: &PowerSeries, b: &PowerSeries| {
        (0..=degree)
            .map(|k| (a.coeff(k) - b.coeff(k)).norm() / b.coeff(k).norm())
            .fold(0.0, f64::max)
    };
    Ok(IdentityResiduals {
        commutation: rel(&ab, &ba),
        composition: rel(&comp, &direct),
        inversion: rel(&inv, &ones),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_w(a: f64) -> RadialWeight {
        RadialWeight::standard(a).unwrap()
    }

    #[test]
    fn multiplier_examples() {
        let r = FracDerivative::build(&std_w(0.0), &std_w(0.0), 10).unwrap();
        assert!(r.multipliers().iter().all(|&m| m == 1.0));
        let r = FracDerivative::build(&std_w(0.0), &std_w(1.0), 20).unwrap();
        for (k, &m) in r.multipliers().iter().enumerate() {
            assert!((m - (k as f64 + 2.0)).abs() <= 1e-14 * m, "k={k}");
        }
        let r = FracDerivative::build(&std_w(0.0), &std_w(0.0).plus(), 30).unwrap();
        for (k, &m) in r.multipliers().iter().enumerate() {
            assert!((m - (k as f64 + 1.0)).abs() <= 1e-9 * m, "k={k}");
        }
    }

    #[test]
    fn zf_prime_identity() {
        let r = FracDerivative::build(&std_w(0.0), &std_w(0.0).plus(), 4).unwrap();
        let out = r.apply(&PowerSeries::monomial(2)).unwrap();
        assert!((out.coeff(2) - Complex64::new(3.0, 0.0)).norm() < 1e-9);
        assert!(r.apply(&PowerSeries::monomial(5)).is_err());
    }

    #[test]
    fn integral_form_matches_multiplier() {
        let z = Complex64::new(0.5, 0.0);
        let v =
            apply_integral_form(&std_w(0.0), &std_w(1.0), &PowerSeries::monomial(1), z).unwrap();
        assert!((v - Complex64::new(1.5, 0.0)).norm() < 1e-14);
        let c = PowerSeries::constant(Complex64::new(2.0, 1.0));
        let v = apply_integral_form(&std_w(1.0), &std_w(2.0), &c, z).unwrap();
        // ω_0/ν_0 = (1/2)/(1/3)
        assert!((v - c.coeff(0) * 1.5).norm() < 1e-14);
    }

    #[test]
    fn trivial_and_closed_form_residuals() {
        let w = std_w(0.7);
        let r = identity_residuals(&w, &w, &w, &w, 50).unwrap();
        assert_eq!(r.max(), 0.0);
        let r =
            identity_residuals(&std_w(0.0), &std_w(1.0), &std_w(2.5), &std_w(-0.5), 200).unwrap();
        assert!(r.max() <= 1e-12, "{r:?}");
    }
}
