//! Numerical membership tests for the doubling classes and regular weights.
//!
//! `ω ∈ 𝒟̂` when `ω̂(r) ≤ C ω̂((1+r)/2)`, `ω ∈ 𝒟̌` when
//! `ω̂(r) ≥ C′ ω̂(1 − (1−r)/K)` for some `K, C′ > 1`, and `ω` is regular when
//! `ω̂(r)/(1−r) ≍ ω(r)`. A finite grid can only show that the estimated
//! constants settle as the grid approaches the boundary, so each verdict
//! means "consistent with membership up to `r_max`".

use serde::Serialize;

use crate::coords::{logit, RadialPoint};
use crate::error::{Error, Result};
use crate::weights::RadialWeight;

/// Cutoffs `1 − r` at which the constants are compared.
pub const COARSE_CUTOFF: f64 = 1e-3;
pub const FINE_CUTOFF: f64 = 1e-4;
/// Allowed relative drift of a constant between the two cutoffs.
pub const STABILITY: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DhatReport {
    pub verdict: bool,
    /// `sup ω̂(r)/ω̂((1+r)/2)` up to the fine cutoff.
    pub c_omega: f64,
    /// The same supremum up to the coarse cutoff.
    pub c_omega_coarse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DcheckReport {
    pub verdict: bool,
    pub k: f64,
    /// `inf ω̂(r)/ω̂(1 − (1−r)/K)` up to the fine cutoff.
    pub c_prime: f64,
    pub c_prime_coarse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularReport {
    pub verdict: bool,
    /// Extremes of `ω̂(r)/((1−r)ω(r))` on the grid.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Fitted exponents: `ω̂/(1−r)^a` essentially decreasing, `ω̂/(1−r)^b`
/// essentially increasing. These are regression estimates, not bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exponents {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub weight: String,
    pub r_max: f64,
    pub dhat: DhatReport,
    pub dcheck: DcheckReport,
    /// `𝒟 = 𝒟̂ ∩ 𝒟̌`
    pub doubling: bool,
    pub regular: RegularReport,
    pub exponents: Exponents,
    /// Set when a tail underflowed on the grid; verdicts then rest on the
    /// part of the grid where the tail is representable.
    pub reduced_confidence: bool,
}

impl ClassReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub k: f64,
    /// Logit-uniform points between `r = 0.0025` and the fine cutoff.
    pub points: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            k: 2.0,
            points: 400,
        }
    }
}

/// Classification with `K` for the lower doubling test and default grid.
pub fn classify(w: &RadialWeight, k: f64) -> Result<ClassReport> {
    classify_with(
        w,
        &ClassifyOptions {
            k,
            ..ClassifyOptions::default()
        },
    )
}

struct Sample {
    x: f64,
    tail: f64,
    upper_ratio: f64,
    lower_ratio: f64,
    regular_ratio: f64,
}

pub fn classify_with(w: &RadialWeight, opts: &ClassifyOptions) -> Result<ClassReport> {
    if !(opts.k > 1.0) {
        return Err(Error::Domain(format!("K must exceed 1, got {}", opts.k)));
    }
    let radii = scan_radii(w, opts.points);
    let mut underflow = false;
    let mut samples = Vec::with_capacity(radii.len());
    for &r in &radii {
        let p = RadialPoint::new(r)?;
        let tail = w.tail_point(&p)?;
        let half = w.tail_point(&RadialPoint::from_complement(p.x / 2.0))?;
        let inner = w.tail_point(&RadialPoint::from_complement(p.x / opts.k))?;
        if !(tail > 0.0 && half > 0.0 && inner > 0.0) || !tail.is_finite() {
            underflow = true;
            continue;
        }
        let scaled = w.scaled(&p)?;
        samples.push(Sample {
            x: p.x,
            tail,
            upper_ratio: tail / half,
            lower_ratio: tail / inner,
            regular_ratio: if scaled > 0.0 {
                tail / scaled
            } else {
                f64::INFINITY
            },
        });
    }
    let upto = |cut: f64| samples.iter().filter(move |s| s.x >= cut * (1.0 - 1e-12));
    let sup = |cut: f64, f: fn(&Sample) -> f64| upto(cut).map(f).fold(f64::NEG_INFINITY, f64::max);
    let inf = |cut: f64, f: fn(&Sample) -> f64| upto(cut).map(f).fold(f64::INFINITY, f64::min);
    let settled = |coarse: f64, fine: f64| {
        coarse.is_finite() && fine.is_finite() && (fine - coarse).abs() <= STABILITY * coarse.abs()
    };

    let c_fine = sup(FINE_CUTOFF, |s| s.upper_ratio);
    let c_coarse = sup(COARSE_CUTOFF, |s| s.upper_ratio);
    let dhat = DhatReport {
        verdict: !underflow && settled(c_coarse, c_fine),
        c_omega: c_fine,
        c_omega_coarse: c_coarse,
    };

    let cp_fine = inf(FINE_CUTOFF, |s| s.lower_ratio);
    let cp_coarse = inf(COARSE_CUTOFF, |s| s.lower_ratio);
    let dcheck = DcheckReport {
        verdict: !underflow
            && cp_fine > 1.0
            && cp_coarse > 1.0
            && settled(cp_coarse - 1.0, cp_fine - 1.0),
        k: opts.k,
        c_prime: cp_fine,
        c_prime_coarse: cp_coarse,
    };
    let doubling = dhat.verdict && dcheck.verdict;

    let max_fine = sup(FINE_CUTOFF, |s| s.regular_ratio);
    let max_coarse = sup(COARSE_CUTOFF, |s| s.regular_ratio);
    let min_fine = inf(FINE_CUTOFF, |s| s.regular_ratio);
    let min_coarse = inf(COARSE_CUTOFF, |s| s.regular_ratio);
    let regular = RegularReport {
        verdict: doubling
            && min_fine > 0.0
            && settled(max_coarse, max_fine)
            && settled(min_coarse, min_fine),
        min_ratio: min_fine,
        max_ratio: max_fine,
    };

    Ok(ClassReport {
        weight: w.label(),
        r_max: 1.0 - FINE_CUTOFF,
        dhat,
        dcheck,
        doubling,
        regular,
        exponents: fit_exponents(&samples),
        reduced_confidence: underflow,
    })
}

/// Scan radii: `r = 0`, logit-uniform points up to the fine cutoff, and
/// points on both sides of every breakpoint and inside every annulus.
fn scan_radii(w: &RadialWeight, points: usize) -> Vec<f64> {
    let t0 = logit(0.0025);
    let t1 = logit(1.0 - FINE_CUTOFF);
    let mut radii: Vec<f64> = std::iter::once(0.0)
        .chain((0..points).map(|i| {
            let t = t0 + (t1 - t0) * i as f64 / (points - 1) as f64;
            RadialPoint::from_logit(t).r
        }))
        .chain([1.0 - COARSE_CUTOFF, 1.0 - FINE_CUTOFF])
        .collect();
    let bps = w.breakpoints();
    for b in &bps {
        radii.extend([b * (1.0 - 1e-9), b * (1.0 + 1e-9)]);
    }
    for pair in bps.windows(2) {
        radii.push(0.5 * (pair[0] + pair[1]));
    }
    // the last logit point may round just past the cutoff
    radii.retain(|&r| (0.0..=1.0 - FINE_CUTOFF + 1e-15).contains(&r));
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
}

/// Local log-log slopes of `ω̂` against `1 − r` over `1 − r ≤ 0.1`.
fn fit_exponents(samples: &[Sample]) -> Exponents {
    let tail: Vec<&Sample> = samples.iter().filter(|s| s.x <= 0.1).collect();
    let mut a = f64::INFINITY;
    let mut b = f64::NEG_INFINITY;
    for pair in tail.windows(2) {
        let (s0, s1) = (pair[0], pair[1]);
        let dx = (s0.x / s1.x).ln();
        if dx.abs() < 1e-3 {
            continue;
        }
        let slope = (s0.tail / s1.tail).ln() / dx;
        a = a.min(slope);
        b = b.max(slope);
    }
    Exponents { a, b }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_weights_have_exact_constants() {
        for alpha in [0.0, 0.5, 2.0] {
            let w = RadialWeight::standard(0.0)
                .unwrap()
                .alpha_shift(alpha)
                .unwrap();
            let rep = classify(&w, 2.0).unwrap();
            let c = 2f64.powf(alpha + 1.0);
            assert!((rep.dhat.c_omega - c).abs() <= 1e-9 * c, "{rep:?}");
            assert!((rep.dcheck.c_prime - c).abs() <= 1e-9 * c, "{rep:?}");
            assert!(rep.doubling && rep.regular.verdict, "{rep:?}");
            assert!((rep.exponents.a - (alpha + 1.0)).abs() < 1e-6);
            assert!((rep.exponents.b - (alpha + 1.0)).abs() < 1e-6);
        }
        let rep = classify(
            &RadialWeight::standard(0.0)
                .unwrap()
                .alpha_shift(1.0)
                .unwrap(),
            3.0,
        )
        .unwrap();
        assert!((rep.dcheck.c_prime - 9.0).abs() < 1e-8);
    }

    #[test]
    fn logarithmic_weight_is_upper_but_not_lower_doubling() {
        let rep = classify(&RadialWeight::logarithmic(2.0).unwrap(), 2.0).unwrap();
        assert!(rep.dhat.verdict, "{rep:?}");
        assert!(rep.dhat.c_omega <= 1.0 + 2f64.ln() + 1e-12);
        assert!(!rep.dcheck.verdict);
        assert!(!rep.doubling && !rep.regular.verdict);
    }

    #[test]
    fn exponential_weight_is_not_upper_doubling() {
        let rep = classify(&RadialWeight::exponential(1.0).unwrap(), 2.0).unwrap();
        assert!(!rep.dhat.verdict, "{rep:?}");
        assert!(rep.reduced_confidence);
    }

    #[test]
    fn zero_annulus_is_doubling_but_not_regular() {
        let base = RadialWeight::standard(1.0).unwrap();
        let rep = classify(&RadialWeight::zero_annulus(&base, 0.3, 0.4).unwrap(), 2.0).unwrap();
        assert!(rep.doubling, "{rep:?}");
        assert!(!rep.regular.verdict);
        assert!(rep.regular.max_ratio.is_infinite());
        let json = rep.to_json();
        assert!(json.contains("\"doubling\": true"));
    }
}
