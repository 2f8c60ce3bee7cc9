//! Slices `ξ ↦ B_z^ω(ξ)` of the weighted Bergman kernel and their
//! `∂_z̄` derivatives, as truncated power series in `ξ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::projection::PolarGrid;
use crate::series::PowerSeries;
use crate::weights::{MomentTable, RadialWeight};

/// Largest truncation degree the degree schedule will hand out.
pub const MAX_KERNEL_DEGREE: usize = 1 << 17;
/// Relative size below which trailing kernel coefficients are dropped.
pub const KERNEL_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSlice {
    pub anchor: Complex64,
    pub weight: String,
    /// Coefficients `conj(z)^k / ω_k`.
    pub series: PowerSeries,
}

/// `B_z^ω` truncated at degree `n`.
pub fn kernel_slice(w: &RadialWeight, z: Complex64, n: usize) -> Result<KernelSlice> {
    let moments = w.moments_upto(n)?;
    kernel_slice_from_moments(&moments, z)
}

/// Kernel slice from a precomputed moment table, truncated at the table's end.
pub fn kernel_slice_from_moments(moments: &MomentTable, z: Complex64) -> Result<KernelSlice> {
    check_anchor(z)?;
    let zc = z.conj();
    let mut power = Complex64::new(1.0, 0.0);
    let coeffs = moments
        .values
        .iter()
        .map(|&m| {
            let c = power / m;
            power *= zc;
            c
        })
        .collect();
    Ok(KernelSlice {
        anchor: z,
        weight: moments.weight.clone(),
        series: PowerSeries::new(coeffs),
    })
}

fn check_anchor(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!(
            "kernel anchor {z} is not inside the unit disk"
        )));
    }
    Ok(())
}

/// `∂_z̄^n B_z^ω` as a series in `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DbarSlice {
    pub series: PowerSeries,
    /// Set when the anchor is the origin and the derivative was taken
    /// directly in `z̄` instead of through `(ξ/z̄)^n (B_z^ω)^{(n)}(ξ)`.
    pub direct: bool,
}

/// `∂_z̄^n B_z^ω(ξ) = (ξ/z̄)^n (B_z^ω)^{(n)}(ξ)`, truncated at degree `degree`.
pub fn kernel_dbar_slice(
    w: &RadialWeight,
    z: Complex64,
    n: usize,
    degree: usize,
) -> Result<DbarSlice> {
    let moments = w.moments_upto(degree)?;
    kernel_dbar_slice_from_moments(&moments, z, n)
}

pub fn kernel_dbar_slice_from_moments(
    moments: &MomentTable,
    z: Complex64,
    n: usize,
) -> Result<DbarSlice> {
    if n == 0 {
        return Err(Error::Domain("derivative order must be at least 1".into()));
    }
    check_anchor(z)?;
    let degree = moments.max_index();
    if z == Complex64::new(0.0, 0.0) {
        // only k = n survives: n! ξ^n / ω_n
        let mut series = PowerSeries::zero(degree);
        if n <= degree {
            let fact: f64 = (1..=n).map(|i| i as f64).product();
            series = series
                .add(&PowerSeries::monomial(n).scale(Complex64::new(fact / moments.value(n), 0.0)));
        }
        return Ok(DbarSlice {
            series,
            direct: true,
        });
    }
    let slice = kernel_slice_from_moments(moments, z)?.series;
    let mut s = slice.nth_derivative(n);
    for _ in 0..n {
        s = s.mul_z();
    }
    let s = s.scale(z.conj().powu(n as u32).inv()).resized(degree);
    Ok(DbarSlice {
        series: s,
        direct: false,
    })
}

/// Smallest degree after which the coefficients `k(k−1)…(k−n+1)|z|^{k−n}/ω_k`
/// of `∂_z̄^n B_z^ω` (plain kernel for `n = 0`) stay below
/// [`KERNEL_TAIL_TOL`] times their maximum. Returns the degree together with
/// the moment table that covers it.
pub fn degree_schedule(w: &RadialWeight, modulus: f64, n: usize) -> Result<(usize, MomentTable)> {
    if !(0.0..1.0).contains(&modulus) {
        return Err(Error::Domain(format!(
            "anchor modulus {modulus} is outside [0, 1)"
        )));
    }
    let mut cap = 256usize;
    loop {
        let table = w.moments_upto(cap)?;
        let ln_rho = modulus.ln();
        let mut peak = f64::NEG_INFINITY;
        let mut past_peak = false;
        for k in n..=cap {
            // log of the coefficient magnitude
            let falling: f64 = (0..n).map(|i| ((k - i) as f64).ln()).sum();
            let lm = falling + (k - n) as f64 * ln_rho - table.value(k).ln();
            if lm > peak {
                peak = lm;
            } else {
                past_peak = true;
            }
            if past_peak && lm < peak + KERNEL_TAIL_TOL.ln() {
                return Ok((k, truncate_table(table, k)));
            }
        }
        if cap >= MAX_KERNEL_DEGREE {
            return Err(Error::DegreeOverflow {
                degree: cap,
                max: MAX_KERNEL_DEGREE,
            });
        }
        cap = (cap * 2).min(MAX_KERNEL_DEGREE);
    }
}

fn truncate_table(mut t: MomentTable, n: usize) -> MomentTable {
    t.values.truncate(n + 1);
    t.errors.truncate(n + 1);
    t
}

/// `∫_𝔻 |S(ξ)| ν(ξ) dA(ξ)` by polar quadrature. The modulus widens the
/// angular spectrum, so the grid must carry at least `4N` angles.
pub fn kernel_a1_norm(slice: &PowerSeries, nu: &RadialWeight, grid: &PolarGrid) -> Result<f64> {
    let n = slice.degree();
    if grid.angles() < 4 * n.max(1) {
        return Err(Error::UnderResolved {
            requested: n,
            max: grid.angles() / 4,
        });
    }
    let mut ring_means = Vec::with_capacity(grid.radial_len());
    for j in 0..grid.radial_len() {
        let a = grid.weighted_area(j, nu)?;
        if a == 0.0 {
            continue;
        }
        let vals = grid.ring_values(slice.coeffs(), j)?;
        let mean =
            pairwise_sum(&vals.iter().map(|v| v.norm()).collect::<Vec<_>>()) / grid.angles() as f64;
        ring_means.push(a * mean);
    }
    Ok(pairwise_sum(&ring_means))
}

/// Sum with pairwise reduction; the order is fixed, so results are
/// reproducible bit for bit.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// One row of the `∂_z̄`-kernel norm experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelNormRow {
    pub modulus: f64,
    pub degree: usize,
    pub angles: usize,
    /// `∫ |∂_z̄ B_z^ω| ν dA`
    pub raw_norm: f64,
    /// `(1 − |z|²) ∫ |∂_z̄ B_z^ω| ν dA`, the quantity whose supremum is `8/π`
    /// for the unweighted kernel.
    pub scaled_norm: f64,
    /// `8/π − scaled_norm`
    pub eight_over_pi_gap: f64,
}

/// `8/π`
pub const EIGHT_OVER_PI: f64 = 8.0 * std::f64::consts::FRAC_1_PI;

/// Norm of `∂_z̄ B_z^ω` in `A¹_ν` at the positive real anchor `z = modulus`,
/// with the degree from [`degree_schedule`] and `M` the power of two at or
/// above `4N`.
pub fn dbar_kernel_norm(
    w: &RadialWeight,
    nu: &RadialWeight,
    modulus: f64,
    radial_nodes: usize,
) -> Result<KernelNormRow> {
    let (degree, table) = degree_schedule(w, modulus, 1)?;
    let dbar = kernel_dbar_slice_from_moments(&table, Complex64::new(modulus, 0.0), 1)?;
    let angles = (4 * degree).next_power_of_two().max(64);
    let grid = PolarGrid::for_weight(nu, radial_nodes, angles)?;
    let raw = kernel_a1_norm(&dbar.series, nu, &grid)?;
    let scaled = raw * (1.0 - modulus) * (1.0 + modulus);
    Ok(KernelNormRow {
        modulus,
        degree,
        angles,
        raw_norm: raw,
        scaled_norm: scaled,
        eight_over_pi_gap: EIGHT_OVER_PI - scaled,
    })
}

/// Largest relative coefficient deviation between `R^{ω,ν} B_z^{ω_{+N}}`
/// and `B_z^{ν_{+N}}`.
pub fn kernel_plus_n_consistency(
    omega: &RadialWeight,
    nu: &RadialWeight,
    n_plus: u32,
    z: Complex64,
    degree: usize,
) -> Result<f64> {
    let om = omega.moments_upto(degree)?;
    let nm = nu.moments_upto(degree)?;
    let mult: Vec<f64> = om
        .values
        .iter()
        .zip(&nm.values)
        .map(|(a, b)| a / b)
        .collect();
    let lhs = kernel_slice(&omega.plus_n(n_plus), z, degree)?
        .series
        .multiplier_apply(&mult)?;
    let rhs = kernel_slice(&nu.plus_n(n_plus), z, degree)?.series;
    Ok(max_relative_deviation(&lhs, &rhs))
}

/// `max_k |a_k − b_k| / |b_k|` over coefficients with `b_k ≠ 0`.
pub fn max_relative_deviation(a: &PowerSeries, b: &PowerSeries) -> f64 {
    let n = a.degree().max(b.degree());
    (0..=n)
        .filter(|&k| b.coeff(k) != Complex64::new(0.0, 0.0))
        .map(|k| (a.coeff(k) - b.coeff(k)).norm() / b.coeff(k).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> RadialWeight {
        RadialWeight::standard(0.0).unwrap()
    }

    #[test]
    fn unweighted_slice_is_the_closed_kernel() {
        let z = Complex64::new(0.3, -0.2);
        let s = kernel_slice(&unit(), z, 200).unwrap();
        for k in [0usize, 1, 7] {
            let want = z.conj().powu(k as u32) * (k as f64 + 1.0);
            assert!((s.series.coeff(k) - want).norm() < 1e-15 * (k as f64 + 1.0));
        }
        let xi = Complex64::new(-0.1, 0.5);
        let closed = (Complex64::new(1.0, 0.0) - z.conj() * xi).powi(-2);
        assert!((s.series.eval(xi).unwrap() - closed).norm() < 1e-14);
    }

    #[test]
    fn slice_at_origin_is_constant() {
        let w = RadialWeight::standard(1.0).unwrap();
        let s = kernel_slice(&w, Complex64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(s.series.coeff(0), Complex64::new(2.0, 0.0));
        assert!(s.series.coeffs()[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn dbar_slice_of_unweighted_kernel() {
        let z = Complex64::new(0.4, 0.1);
        let d = kernel_dbar_slice(&unit(), z, 1, 100).unwrap();
        assert!(!d.direct);
        for k in 1..50usize {
            let want = z.conj().powu(k as u32 - 1) * (k * (k + 1)) as f64;
            assert!(
                (d.series.coeff(k) - want).norm() <= 1e-13 * want.norm().max(1e-300),
                "k={k}"
            );
        }
        let d0 = kernel_dbar_slice(&unit(), Complex64::new(0.0, 0.0), 2, 10).unwrap();
        assert!(d0.direct);
        // 2! ξ² / ω_2 = 6 ξ²
        assert_eq!(d0.series.coeff(2), Complex64::new(6.0, 0.0));
    }

    #[test]
    fn schedule_reaches_the_tolerance() {
        let (n, t) = degree_schedule(&unit(), 0.5, 1).unwrap();
        assert_eq!(t.max_index(), n);
        let mag = |k: usize| (k * (k + 1)) as f64 * 0.5f64.powi(k as i32 - 1);
        let peak = (1..n).map(mag).fold(0.0, f64::max);
        assert!(mag(n) < KERNEL_TAIL_TOL * peak);
        assert!(mag(n - 1) >= KERNEL_TAIL_TOL * peak);
    }

    #[test]
    fn a1_norm_of_constant() {
        let w = RadialWeight::standard(1.0).unwrap();
        let grid = PolarGrid::for_weight(&w, 400, 8).unwrap();
        let c = PowerSeries::constant(Complex64::new(0.0, -3.0));
        let v = kernel_a1_norm(&c, &w, &grid).unwrap();
        assert!((v - 3.0 * 0.5).abs() < 1e-12);
        let long = PowerSeries::monomial(4);
        assert!(matches!(
            kernel_a1_norm(&long, &w, &grid),
            Err(Error::UnderResolved { .. })
        ));
    }
}
