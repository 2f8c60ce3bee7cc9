//! The named experiments. Each turns an [`ExperimentConfig`] into result
//! rows whose pass conditions are fixed before anything is computed.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::record::{Contract, ResultRecord};
use crate::analysis::{
    besov_norm, bloch_seminorm, classify, lp_lambda_omega_norm, plus_moment_identity, star_moment_identity,
    FracLpIdentity, LpIdentity, ScanGrid,
};
use crate::error::{Error, Result};
use crate::kernels::{dbar_kernel_norm, EIGHT_OVER_PI};
use crate::operators::identity_residuals;
use crate::projection::{
    bloch_factored, little_bloch_decay, project, project_factored, regular_factored, DiskSample, Gate,
    PolarGrid,
};
use crate::series::PowerSeries;
use crate::weights::{parse_weight_spec, RadialWeight, Transform, WeightKind};

pub const EXPERIMENTS: &[&str] = &[
    "moments-identities",
    "operator-identities",
    "preimage-roundtrip",
    "lp-identities",
    "kernel-norm-8pi",
    "classify-suite",
    "besov-surrogate",
    "decay-curve",
];

/// Contract thresholds shared with the acceptance suite.
pub mod thresholds {
    pub const MOMENT_IDENTITY: f64 = 1e-8;
    pub const OPERATOR_QUADRATURE: f64 = 1e-8;
    pub const OPERATOR_CLOSED_FORM: f64 = 1e-12;
    pub const FACTORED_ROUNDTRIP: f64 = 1e-10;
    pub const GRID_ROUNDTRIP: f64 = 1e-6;
    pub const REGULAR_ROUNDTRIP: f64 = 1e-8;
    pub const SUP_STABILITY: f64 = 0.10;
    pub const LP_IDENTITY: f64 = 1e-8;
    pub const EIGHT_OVER_PI_REL: f64 = 0.02;
    pub const CLASS_CONSTANT_REL: f64 = 0.05;
    pub const BESOV_STABILITY: f64 = 0.05;
    pub const DECAY_FRACTION: f64 = 0.01;
}

/// Runs the experiment named in `cfg`. Cases that fail to compute become
/// failing rows; only configuration problems abort the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    if cfg.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(Error::Config("tolerances must be positive".into()));
    }
    match cfg.experiment.as_str() {
        "moments-identities" => moments_identities(cfg),
        "operator-identities" => operator_identities(cfg),
        "preimage-roundtrip" => preimage_roundtrip(cfg),
        "lp-identities" => lp_identities(cfg),
        "kernel-norm-8pi" => kernel_norm_8pi(cfg),
        "classify-suite" => classify_suite(cfg),
        "besov-surrogate" => besov_surrogate(cfg),
        "decay-curve" => decay_curve(cfg),
        other => Err(Error::UnknownExperiment(other.to_string())),
    }
}

fn weights_or(cfg: &ExperimentConfig, defaults: &[&str]) -> Result<Vec<RadialWeight>> {
    if !cfg.weights.is_empty() {
        return Ok(cfg.weights.clone());
    }
    defaults.iter().map(|s| parse_weight_spec(s)).collect()
}

/// Runs `f` and stamps its rows with the elapsed time.
fn timed(out: &mut Vec<ResultRecord>, f: impl FnOnce(&mut Vec<ResultRecord>)) {
    let start = Instant::now();
    let first = out.len();
    f(out);
    let secs = start.elapsed().as_secs_f64();
    for r in &mut out[first..] {
        r.wall_time_s = Some(secs);
    }
}

fn seeded_polys(seed: u64, count: usize, degree: usize) -> Vec<PowerSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| PowerSeries::random(degree, &mut rng)).collect()
}

fn moments_identities(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "moments-identities";
    let weights = weights_or(
        cfg,
        &["std:alpha=0", "std:alpha=1.5", "log:beta=2", "zero:[0.3,0.4]:std:alpha=1"],
    )?;
    let n = cfg.degree.unwrap_or(100);
    let tol = cfg.tol.unwrap_or(thresholds::MOMENT_IDENTITY);
    let mut out = Vec::new();
    for w in &weights {
        timed(&mut out, |out| {
            for (metric, rows) in [
                ("plus_moment_rel_dev", plus_moment_identity(w, n)),
                ("star_moment_rel_dev", star_moment_identity(w, n)),
            ] {
                match rows {
                    Ok(rows) => out.extend(rows.rows.iter().map(|&(k, _, _, dev)| {
                        ResultRecord::new(NAME, format!("weight={w} n={k}"), metric, dev, Contract::AtMost(tol))
                    })),
                    Err(e) => out.push(ResultRecord::failed(NAME, format!("weight={w}"), metric, &e)),
                }
            }
        });
    }
    Ok(out)
}

fn operator_identities(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "operator-identities";
    let weights = weights_or(
        cfg,
        &[
            "std:alpha=0",
            "std:alpha=1",
            "std:alpha=2.5",
            "std:alpha=-0.5",
            "log:beta=2",
            "zero:[0.3,0.4]:std:alpha=1",
            "std:alpha=0+",
            "exp:c=1",
        ],
    )?;
    let n = cfg.degree.unwrap_or(200);
    let mut out = Vec::new();
    // consecutive groups of four, wrapping around for the last group
    let groups = weights.len().div_ceil(4);
    for g in 0..groups {
        let pick = |i: usize| &weights[(4 * g + i) % weights.len()];
        let (o, nu, eta, sigma) = (pick(0), pick(1), pick(2), pick(3));
        let closed = [o, nu, eta, sigma].iter().all(|w| w.has_moment_oracle());
        let tol = cfg.tol.unwrap_or(if closed {
            thresholds::OPERATOR_CLOSED_FORM
        } else {
            thresholds::OPERATOR_QUADRATURE
        });
        let case = format!("omega={o} nu={nu} eta={eta} sigma={sigma} N={n}");
        timed(&mut out, |out| match identity_residuals(o, nu, eta, sigma, n) {
            Ok(r) => {
                for (metric, v) in [
                    ("commutation", r.commutation),
                    ("composition", r.composition),
                    ("inversion", r.inversion),
                ] {
                    out.push(ResultRecord::new(NAME, case.clone(), metric, v, Contract::AtMost(tol)));
                }
            }
            Err(e) => out.push(ResultRecord::failed(NAME, case.clone(), "residuals", &e)),
        });
    }
    Ok(out)
}

/// `max_k |a_k − b_k| / max_k |b_k|`
fn scaled_deviation(a: &PowerSeries, b: &PowerSeries) -> f64 {
    a.max_coeff_deviation(b) / b.max_abs_coeff().max(f64::MIN_POSITIVE)
}

fn preimage_roundtrip(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "preimage-roundtrip";
    let weights = weights_or(
        cfg,
        &["std:alpha=0", "std:alpha=1.5", "std:alpha=0^alpha=1", "zero:[0.3,0.4]:std:alpha=1"],
    )?;
    let alphas = cfg.alphas.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let radial = cfg.radial.unwrap_or(200);
    let (series, labels, seeded) = if cfg.series.is_empty() {
        let mut s = seeded_polys(cfg.seed, 3, 16);
        s.push(PowerSeries::logfn(64));
        let labels = vec![
            "random16#0".to_string(),
            "random16#1".to_string(),
            "random16#2".to_string(),
            "logfn@64".to_string(),
        ];
        (s, labels, true)
    } else {
        (cfg.series.clone(), cfg.series_specs.clone(), false)
    };
    let stamp = |r: ResultRecord| if seeded { r.with_seed(cfg.seed) } else { r };
    let mut out = Vec::new();
    for w in &weights {
        let report = match classify(w, cfg.k.unwrap_or(2.0)) {
            Ok(r) => r,
            Err(e) => {
                out.push(ResultRecord::failed(NAME, format!("weight={w}"), "classify", &e));
                continue;
            }
        };
        if !report.doubling {
            let e = Error::WeightRejected(format!("{w} is not classified as doubling"));
            out.push(ResultRecord::failed(NAME, format!("weight={w}"), "classify", &e));
            continue;
        }
        for (h, label) in series.iter().zip(&labels) {
            let n = h.degree();
            let angles = cfg.angles.unwrap_or(2 * n + 2);
            cfg.check_degree_against_grid(n, angles)?;
            for &alpha in &alphas {
                let case = format!("weight={w} alpha={alpha} h={label} J={radial} M={angles}");
                timed(&mut out, |out| {
                    let res = (|| -> Result<Vec<ResultRecord>> {
                        let g = bloch_factored(w, h, alpha, Gate::Force)?;
                        let fac = scaled_deviation(&project_factored(w, &g, n)?, h);
                        let grid = PolarGrid::for_weight(w, radial, angles)?;
                        let sample = DiskSample::from_factored(&grid, g.clone())?;
                        let on_grid = scaled_deviation(&project(w, &sample, n)?, h);
                        let mut rows = vec![
                            ResultRecord::new(
                                NAME,
                                case.clone(),
                                "factored_rel_dev",
                                fac,
                                Contract::AtMost(thresholds::FACTORED_ROUNDTRIP),
                            ),
                            ResultRecord::new(
                                NAME,
                                case.clone(),
                                "grid_rel_dev",
                                on_grid,
                                Contract::AtMost(thresholds::GRID_ROUNDTRIP),
                            ),
                        ];
                        // boundedness: sup|g| / ‖h‖_ℬ under one doubling
                        let bloch = bloch_seminorm(h, &ScanGrid::default())?.value;
                        let fine = sample.resampled(&grid.refined(2)?.with_angles(2 * angles)?)?;
                        let (r0, r1) = (sample.sup_abs() / bloch, fine.sup_abs() / bloch);
                        rows.push(ResultRecord::new(NAME, case.clone(), "sup_over_bloch", r1, Contract::Info));
                        // the stability contract targets the slowly converging
                        // logarithm; for polynomials the sampled sup on M = 2N+2
                        // angles is only a coarse reading and is reported as is
                        let stability = if label.starts_with("logfn") {
                            Contract::AtMost(thresholds::SUP_STABILITY)
                        } else {
                            Contract::Info
                        };
                        rows.push(ResultRecord::new(
                            NAME,
                            case.clone(),
                            "sup_over_bloch_refinement_change",
                            (r1 - r0).abs() / r0,
                            stability,
                        ));
                        Ok(rows)
                    })();
                    match res {
                        Ok(rows) => out.extend(rows.into_iter().map(stamp)),
                        Err(e) => out.push(stamp(ResultRecord::failed(NAME, case.clone(), "bloch_preimage", &e))),
                    }
                });
            }
            if report.regular.verdict && w.strictly_positive() {
                let case = format!("weight={w} h={label}");
                timed(&mut out, |out| {
                    let res = regular_factored(w, h, Gate::Force).and_then(|g| project_factored(w, &g, n));
                    match res {
                        Ok(p) => out.push(stamp(ResultRecord::new(
                            NAME,
                            case.clone(),
                            "regular_rel_dev",
                            scaled_deviation(&p, h),
                            Contract::AtMost(thresholds::REGULAR_ROUNDTRIP),
                        ))),
                        Err(e) => out.push(stamp(ResultRecord::failed(NAME, case.clone(), "regular_preimage", &e))),
                    }
                });
            }
        }
    }
    Ok(out)
}

fn lp_identities(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    use rand::RngExt;
    const NAME: &str = "lp-identities";
    let weights = weights_or(cfg, &["std:alpha=0", "log:beta=2", "zero:[0.3,0.4]:std:alpha=1"])?;
    let pairs = cfg.pairs.unwrap_or(50);
    let max_deg = cfg.degree.unwrap_or(50).max(1);
    let max_order = cfg.max_order.unwrap_or(4);
    let tol = cfg.tol.unwrap_or(thresholds::LP_IDENTITY);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let polys: Vec<(PowerSeries, PowerSeries)> = (0..pairs)
        .map(|_| {
            let (df, dg) = (rng.random_range(0..=max_deg), rng.random_range(0..=max_deg));
            (PowerSeries::random(df, &mut rng), PowerSeries::random(dg, &mut rng))
        })
        .collect();
    let mut out = Vec::new();
    for (i, w) in weights.iter().enumerate() {
        let case = format!("weight={w} pairs={pairs} max_degree={max_deg}");
        timed(&mut out, |out| {
            let res = (|| -> Result<(f64, f64)> {
                let lp = LpIdentity::new(w, max_deg)?;
                let (mut classical, mut shifted) = (0.0f64, 0.0f64);
                for (f, g) in &polys {
                    let scale = lp.pairing(f, g)?.norm() + 1.0;
                    classical = classical.max(lp.residual(f, g)? / scale);
                    shifted = shifted.max(lp.shifted_residual(f, g)? / scale);
                }
                Ok((classical, shifted))
            })();
            match res {
                Ok((c, s)) => {
                    out.push(ResultRecord::new(NAME, case.clone(), "classical_rel_residual", c, Contract::AtMost(tol)).with_seed(cfg.seed));
                    out.push(ResultRecord::new(NAME, case.clone(), "shifted_rel_residual", s, Contract::AtMost(tol)).with_seed(cfg.seed));
                }
                Err(e) => out.push(ResultRecord::failed(NAME, case.clone(), "classical", &e).with_seed(cfg.seed)),
            }
        });
        let eta = &weights[(i + 1) % weights.len()];
        let nu = &weights[(i + 2) % weights.len()];
        for total in 0..=max_order {
            for n_plus in 0..=total {
                let m_plus = total - n_plus;
                let case = format!("omega={w} eta={eta} nu={nu} N={n_plus} M={m_plus} pairs={pairs}");
                timed(&mut out, |out| {
                    let res = (|| -> Result<f64> {
                        let id = FracLpIdentity::new(w, eta, nu, n_plus, m_plus, max_deg)?;
                        polys
                            .iter()
                            .map(|(f, g)| id.residual(f, g))
                            .try_fold(0.0f64, |m, r| Ok(m.max(r?)))
                    })();
                    out.push(
                        match res {
                            Ok(v) => ResultRecord::new(NAME, case.clone(), "fractional_rel_residual", v, Contract::AtMost(tol)),
                            Err(e) => ResultRecord::failed(NAME, case.clone(), "fractional_rel_residual", &e),
                        }
                        .with_seed(cfg.seed),
                    );
                });
            }
        }
    }
    Ok(out)
}

fn kernel_norm_8pi(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "kernel-norm-8pi";
    let weights = weights_or(cfg, &["std:alpha=0"])?;
    let j_max = cfg.j_max.unwrap_or(10);
    if j_max == 0 {
        return Err(Error::Config("j_max must be at least 1".into()));
    }
    let radial = cfg.radial.unwrap_or(400);
    let mut out = Vec::new();
    for w in &weights {
        let unit = matches!(w.kind(), WeightKind::Standard { alpha } if *alpha == 0.0);
        let mut previous: Option<f64> = None;
        for j in 1..=j_max {
            let modulus = 1.0 - 2f64.powi(-(j as i32));
            let case = format!("weight={w} j={j} |z|={modulus} J={radial}");
            timed(&mut out, |out| match dbar_kernel_norm(w, w, modulus, radial) {
                Ok(row) => {
                    out.push(ResultRecord::new(NAME, case.clone(), "raw_norm", row.raw_norm, Contract::Info));
                    out.push(ResultRecord::new(NAME, case.clone(), "degree", row.degree as f64, Contract::Info));
                    let contract = if j == j_max && unit {
                        Contract::Within {
                            target: EIGHT_OVER_PI,
                            rel: thresholds::EIGHT_OVER_PI_REL,
                        }
                    } else {
                        Contract::Info
                    };
                    out.push(ResultRecord::new(NAME, case.clone(), "scaled_norm", row.scaled_norm, contract));
                    if let Some(p) = previous {
                        out.push(ResultRecord::new(
                            NAME,
                            case.clone(),
                            "increase_over_previous",
                            row.scaled_norm - p,
                            Contract::Positive,
                        ));
                    }
                    previous = Some(row.scaled_norm);
                }
                Err(e) => {
                    previous = None;
                    out.push(ResultRecord::failed(NAME, case.clone(), "scaled_norm", &e));
                }
            });
        }
    }
    Ok(out)
}

/// Expected verdicts for the weights whose class is known in closed form.
enum Truth {
    /// `(1 − r)^a`: exact constants `2^{a+1}`, `K^{a+1}`, doubling and regular.
    Power(f64),
    /// Standard weights: doubling and regular.
    DoublingRegular,
    /// Upper doubling only.
    UpperOnly,
    NotUpper,
    /// Doubling, not regular.
    DoublingOnly,
    Unknown,
}

fn ground_truth(w: &RadialWeight) -> Truth {
    match w.kind() {
        WeightKind::Transformed {
            op: Transform::AlphaShift { alpha },
            base,
        } if matches!(base.kind(), WeightKind::Standard { alpha: a } if *a == 0.0) => Truth::Power(*alpha),
        WeightKind::Standard { alpha } if *alpha == 0.0 => Truth::Power(0.0),
        WeightKind::Standard { .. } => Truth::DoublingRegular,
        WeightKind::Logarithmic { .. } => Truth::UpperOnly,
        WeightKind::Exponential { .. } => Truth::NotUpper,
        WeightKind::ZeroAnnulus { base, .. } if matches!(base.kind(), WeightKind::Standard { .. }) => {
            Truth::DoublingOnly
        }
        _ => Truth::Unknown,
    }
}

fn classify_suite(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "classify-suite";
    let weights = weights_or(
        cfg,
        &[
            "std:alpha=0^alpha=0",
            "std:alpha=0^alpha=0.5",
            "std:alpha=0^alpha=2",
            "std:alpha=1",
            "log:beta=2",
            "exp:c=1",
            "zero:[0.3,0.4]:std:alpha=1",
        ],
    )?;
    let k = cfg.k.unwrap_or(2.0);
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let mut out = Vec::new();
    for w in &weights {
        let case = format!("weight={w} K={k}");
        timed(&mut out, |out| {
            let rep = match classify(w, k) {
                Ok(r) => r,
                Err(e) => {
                    out.push(ResultRecord::failed(NAME, case.clone(), "classify", &e));
                    return;
                }
            };
            let truth = ground_truth(w);
            let (c_contract, cp_contract) = match truth {
                Truth::Power(a) => (
                    Contract::Within {
                        target: 2f64.powf(a + 1.0),
                        rel: thresholds::CLASS_CONSTANT_REL,
                    },
                    Contract::Within {
                        target: k.powf(a + 1.0),
                        rel: thresholds::CLASS_CONSTANT_REL,
                    },
                ),
                _ => (Contract::Info, Contract::Info),
            };
            let (dhat, dcheck, regular) = match truth {
                Truth::Power(_) | Truth::DoublingRegular => (Some(true), Some(true), Some(true)),
                Truth::UpperOnly => (Some(true), Some(false), Some(false)),
                Truth::NotUpper => (Some(false), None, Some(false)),
                Truth::DoublingOnly => (Some(true), Some(true), Some(false)),
                Truth::Unknown => (None, None, None),
            };
            let verdict = |e: Option<bool>| e.map(Contract::Is).unwrap_or(Contract::Info);
            out.push(ResultRecord::new(NAME, case.clone(), "c_omega", rep.dhat.c_omega, c_contract));
            out.push(ResultRecord::new(NAME, case.clone(), "c_prime", rep.dcheck.c_prime, cp_contract));
            out.push(ResultRecord::new(NAME, case.clone(), "dhat", flag(rep.dhat.verdict), verdict(dhat)));
            out.push(ResultRecord::new(NAME, case.clone(), "dcheck", flag(rep.dcheck.verdict), verdict(dcheck)));
            out.push(ResultRecord::new(NAME, case.clone(), "regular", flag(rep.regular.verdict), verdict(regular)));
            out.push(ResultRecord::new(NAME, case.clone(), "exponent_a", rep.exponents.a, Contract::Info));
            out.push(ResultRecord::new(NAME, case.clone(), "exponent_b", rep.exponents.b, Contract::Info));
            out.push(ResultRecord::new(
                NAME,
                case.clone(),
                "reduced_confidence",
                flag(rep.reduced_confidence),
                Contract::Info,
            ));
        });
    }
    Ok(out)
}

fn besov_surrogate(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "besov-surrogate";
    let weights = weights_or(cfg, &["std:alpha=0"])?;
    let alphas = cfg.alphas.clone().unwrap_or_else(|| vec![1.5]);
    let ps = cfg.p.clone().unwrap_or_else(|| vec![1.0, 2.0]);
    let radial = cfg.radial.unwrap_or(100);
    let (series, labels, seeded) = if cfg.series.is_empty() {
        let mut s = vec![PowerSeries::monomial(2), PowerSeries::from_real(&[1.0, 1.0, 1.0])];
        s.extend(seeded_polys(cfg.seed, 1, 8));
        (s, vec!["z^2".to_string(), "1+z+z^2".to_string(), "random8#0".to_string()], true)
    } else {
        (cfg.series.clone(), cfg.series_specs.clone(), false)
    };
    let mut out = Vec::new();
    for w in &weights {
        for (h, label) in series.iter().zip(&labels) {
            let angles = cfg.angles.unwrap_or((4 * h.degree() + 8).next_power_of_two());
            for &alpha in &alphas {
                for &p in &ps {
                    let case = format!("weight={w} alpha={alpha} p={p} h={label} J={radial} M={angles}");
                    timed(&mut out, |out| {
                        let res = (|| -> Result<Vec<ResultRecord>> {
                            let grid = PolarGrid::for_weight(w, radial, angles)?;
                            let besov = besov_norm(h, p, 2, &grid)?;
                            let g = DiskSample::from_factored(&grid, bloch_factored(w, h, alpha, Gate::Force)?)?;
                            let rep = lp_lambda_omega_norm(&g, w, p)?;
                            Ok(vec![
                                ResultRecord::new(NAME, case.clone(), "besov_norm_h", besov.value, Contract::Info),
                                ResultRecord::new(NAME, case.clone(), "lp_lambda_norm_g", rep.value, Contract::Info),
                                ResultRecord::new(
                                    NAME,
                                    case.clone(),
                                    "max_refinement_change",
                                    rep.max_relative_change(),
                                    Contract::AtMost(thresholds::BESOV_STABILITY),
                                ),
                                ResultRecord::new(
                                    NAME,
                                    case.clone(),
                                    "diverged",
                                    if rep.diverged { 1.0 } else { 0.0 },
                                    Contract::Is(false),
                                ),
                            ])
                        })();
                        let rows = match res {
                            Ok(rows) => rows,
                            Err(e) => vec![ResultRecord::failed(NAME, case.clone(), "lp_lambda_norm_g", &e)],
                        };
                        out.extend(rows.into_iter().map(|r| if seeded { r.with_seed(cfg.seed) } else { r }));
                    });
                }
            }
        }
    }
    Ok(out)
}

fn decay_curve(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    const NAME: &str = "decay-curve";
    let weights = weights_or(cfg, &["std:alpha=0"])?;
    let alphas = cfg.alphas.clone().unwrap_or_else(|| vec![1.0]);
    let (series, labels) = if cfg.series.is_empty() {
        (vec![PowerSeries::from_real(&[1.0, 1.0, 1.0])], vec!["1+z+z^2".to_string()])
    } else {
        (cfg.series.clone(), cfg.series_specs.clone())
    };
    let radii = cfg.radii.clone().unwrap_or_else(|| {
        let mut r: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        r.extend([0.95, 0.99, 0.995, 0.999]);
        r
    });
    if radii.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(Error::Config("radii must lie in [0, 1)".into()));
    }
    let mut out = Vec::new();
    for w in &weights {
        for (h, label) in series.iter().zip(&labels) {
            for &alpha in &alphas {
                let case = format!("weight={w} alpha={alpha} h={label}");
                timed(&mut out, |out| match little_bloch_decay(w, h, alpha, &radii) {
                    Ok(curve) => {
                        let max = curve.iter().map(|p| p.max_abs).fold(0.0, f64::max);
                        for p in &curve {
                            out.push(ResultRecord::new(
                                NAME,
                                format!("{case} r={}", p.r),
                                "max_abs",
                                p.max_abs,
                                Contract::Info,
                            ));
                        }
                        let last = curve.last().expect("radii are non-empty");
                        out.push(ResultRecord::new(
                            NAME,
                            format!("{case} r={}", last.r),
                            "fraction_of_max",
                            last.max_abs / max,
                            Contract::AtMost(thresholds::DECAY_FRACTION),
                        ));
                    }
                    Err(e) => out.push(ResultRecord::failed(NAME, case.clone(), "decay", &e)),
                });
            }
        }
    }
    Ok(out)
}

