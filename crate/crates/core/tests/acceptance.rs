//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Criteria backed by a named experiment run that experiment with its
//! defaults and read the verdicts off the emitted records, so the suite and
//! the CLI share one set of contracts.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bergman_core::cli::experiments::thresholds;
use bergman_core::cli::{run_experiment, ExperimentConfig, ResultRecord};
use bergman_core::kernels::{kernel_plus_n_consistency, EIGHT_OVER_PI};
use bergman_core::operators::FracDerivative;
use bergman_core::series::PowerSeries;
use bergman_core::weights::parse_weight_spec;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn run(name: &str) -> (Vec<ResultRecord>, Duration) {
    let start = Instant::now();
    let rows = run_experiment(&ExperimentConfig::named(name)).expect("default configuration is valid");
    (rows, start.elapsed())
}

fn rows<'a>(all: &'a [ResultRecord], metric: &str) -> Vec<&'a ResultRecord> {
    all.iter().filter(|r| r.metric == metric).collect()
}

/// All rows pass, none is an uncomputable case, and there is at least one.
fn all_pass(rows: &[&ResultRecord]) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.pass)
}

fn worst(rows: &[&ResultRecord]) -> f64 {
    rows.iter().map(|r| r.value).fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

fn first_failure(all: &[ResultRecord]) -> String {
    all.iter()
        .find(|r| !r.pass)
        .map(|r| format!("; first failure: {} {} = {:e} ({})", r.case, r.metric, r.value, r.contract))
        .unwrap_or_default()
}

fn moment_identity(metric: &str) -> Verdict {
    let (all, t) = run("moments-identities");
    let sel = rows(&all, metric);
    let weights = 4;
    let complete = sel.len() == weights * 101;
    verdict(
        all_pass(&sel) && complete && t < Duration::from_secs(30),
        format!(
            "{} rows (n = 0..100 over {weights} weights), worst relative deviation {:.2e}, run {:.1?} (limit 30 s){}",
            sel.len(),
            worst(&sel),
            t,
            first_failure(&all)
        ),
    )
}

fn criterion_3() -> Verdict {
    let (all, _) = run("operator-identities");
    let closed: Vec<&ResultRecord> = all.iter().filter(|r| r.contract == format!("<= {:e}", thresholds::OPERATOR_CLOSED_FORM)).collect();
    let quad: Vec<&ResultRecord> = all.iter().filter(|r| r.contract == format!("<= {:e}", thresholds::OPERATOR_QUADRATURE)).collect();
    verdict(
        all_pass(&closed) && all_pass(&quad) && closed.len() + quad.len() == all.len() && all.iter().all(|r| r.case.contains("N=200")),
        format!(
            "closed form: {} residuals, worst {:.2e} (≤ 1e-12); quadrature: {} residuals, worst {:.2e} (≤ 1e-8); k ≤ 200{}",
            closed.len(),
            worst(&closed),
            quad.len(),
            worst(&quad),
            first_failure(&all)
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs = [
        ("std:alpha=0", "log:beta=2"),
        ("zero:[0.3,0.4]:std:alpha=1", "std:alpha=1.5"),
        ("log:beta=2", "std:alpha=0^alpha=1"),
    ];
    let (mut kernel_dev, mut dilation_dev) = (0.0f64, 0.0f64);
    let mut failure = String::new();
    for (a, b) in pairs {
        let (om, nu) = (parse_weight_spec(a).unwrap(), parse_weight_spec(b).unwrap());
        let rop = FracDerivative::build(&om, &nu, 60).unwrap();
        for _ in 0..10 {
            let z = Complex64::from_polar(rng.random_range(0.0..0.95), rng.random_range(0.0..std::f64::consts::TAU));
            match kernel_plus_n_consistency(&om, &nu, 0, z, 60) {
                Ok(d) => kernel_dev = kernel_dev.max(d),
                Err(e) => failure = format!("; {a} → {b} at {z}: {e}"),
            }
            let r = rng.random_range(0.05..0.99);
            let f = PowerSeries::random(60, &mut rng);
            let lhs = rop.apply(&f.dilate(r).unwrap()).unwrap();
            let rhs = rop.apply(&f).unwrap().dilate(r).unwrap();
            dilation_dev = dilation_dev.max(lhs.max_coeff_deviation(&rhs) / rhs.max_abs_coeff());
        }
    }
    verdict(
        failure.is_empty() && kernel_dev <= 1e-8 && dilation_dev <= 1e-8,
        format!(
            "3 weight pairs × 10 anchors/radii: kernel mapping {kernel_dev:.2e}, dilation {dilation_dev:.2e} (≤ 1e-8){failure}"
        ),
    )
}

fn criteria_5_6_10() -> [Verdict; 3] {
    let (all, t) = run("preimage-roundtrip");
    let factored = rows(&all, "factored_rel_dev");
    let grid = rows(&all, "grid_rel_dev");
    let uncomputable: Vec<&ResultRecord> = all.iter().filter(|r| r.contract == "computable").collect();
    // 4 weights × 3 α × 4 series
    let complete = factored.len() == 48 && grid.len() == 48;
    let c5 = verdict(
        all_pass(&factored) && all_pass(&grid) && complete && uncomputable.is_empty() && t < Duration::from_secs(120),
        format!(
            "{} cases: factored worst {:.2e} (≤ 1e-10), grid J=200 M=2N+2 worst {:.2e} (≤ 1e-6), run {:.1?} (limit 2 min){}",
            factored.len(),
            worst(&factored),
            worst(&grid),
            t,
            first_failure(&all)
        ),
    );

    let regular = rows(&all, "regular_rel_dev");
    let standard: Vec<&ResultRecord> = regular.iter().copied().filter(|r| r.case.starts_with("weight=std:alpha=") && !r.case.contains('^')).collect();
    let c6 = verdict(
        all_pass(&regular) && standard.len() >= 6,
        format!(
            "{} recoveries ({} on Standard weights, degree-16 polynomials), worst {:.2e} (≤ 1e-8)",
            regular.len(),
            standard.len(),
            worst(&regular)
        ),
    );

    let stability: Vec<&ResultRecord> = rows(&all, "sup_over_bloch_refinement_change")
        .into_iter()
        .filter(|r| r.case.contains("h=logfn@64"))
        .collect();
    let c10 = verdict(
        all_pass(&stability) && stability.len() == 12,
        format!(
            "h = logfn@64, {} weight/α cases: sup|g_α|/‖h‖_ℬ changes at most {:.2e} under (J, M) → (2J, 2M) (≤ 0.10)",
            stability.len(),
            worst(&stability)
        ),
    );
    [c5, c6, c10]
}

fn criterion_7() -> Verdict {
    let (all, _) = run("lp-identities");
    let classical = rows(&all, "classical_rel_residual");
    let shifted = rows(&all, "shifted_rel_residual");
    let frac = rows(&all, "fractional_rel_residual");
    // (N, M) with N + M ≤ 4: 15 combinations per weight
    let complete = classical.len() == 3 && shifted.len() == 3 && frac.len() == 45;
    verdict(
        all_pass(&classical) && all_pass(&shifted) && all_pass(&frac) && complete,
        format!(
            "50 seeded pairs (deg ≤ 50) × 3 weights: classical {:.2e}, shifted {:.2e}, fractional over N+M ≤ 4 {:.2e} (≤ 1e-8){}",
            worst(&classical),
            worst(&shifted),
            worst(&frac),
            first_failure(&all)
        ),
    )
}

fn criterion_8() -> Verdict {
    let (all, t) = run("kernel-norm-8pi");
    let scaled = rows(&all, "scaled_norm");
    let increments = rows(&all, "increase_over_previous");
    let last = scaled.last().map(|r| r.value).unwrap_or(f64::NAN);
    let gap = (last - EIGHT_OVER_PI).abs() / EIGHT_OVER_PI;
    verdict(
        scaled.len() == 10 && increments.len() == 9 && all_pass(&increments) && all_pass(&scaled) && t < Duration::from_secs(300),
        format!(
            "j = 1..10 strictly increasing: {}; j = 10 value {last:.6} vs 8/π = {EIGHT_OVER_PI:.6} (gap {:.2}%, limit 2%); run {:.1?} (limit 5 min)",
            all_pass(&increments),
            100.0 * gap,
            t
        ),
    )
}

fn criterion_9() -> Verdict {
    let (all, _) = run("classify-suite");
    let for_weight = |w: &str, metric: &str| {
        all.iter()
            .find(|r| r.case.starts_with(&format!("weight={w} ")) && r.metric == metric)
            .map(|r| (r.value, r.pass))
    };
    let mut notes = Vec::new();
    let mut ok = true;
    for alpha in [0.0, 0.5, 2.0] {
        let w = format!("std:alpha=0^alpha={alpha}");
        let target = 2f64.powf(alpha + 1.0);
        match for_weight(&w, "c_omega") {
            Some((c, pass)) => {
                ok &= pass && (c - target).abs() <= 0.05 * target;
                notes.push(format!("(1−r)^{alpha}: C = {c:.4} vs {target}"));
            }
            None => {
                ok = false;
                notes.push(format!("(1−r)^{alpha}: missing"));
            }
        }
    }
    let flag = |w: &str, m: &str| for_weight(w, m).map(|(v, _)| v == 1.0);
    let (log_dhat, log_dcheck, exp_dhat) =
        (flag("log:beta=2", "dhat"), flag("log:beta=2", "dcheck"), flag("exp:c=1", "dhat"));
    ok &= log_dhat == Some(true) && log_dcheck == Some(false) && exp_dhat == Some(false);
    notes.push(format!("Log(2): D̂ {log_dhat:?}, Ď {log_dcheck:?}; Exp(1): D̂ {exp_dhat:?}"));
    ok &= all.iter().all(|r| r.pass);
    verdict(ok, notes.join("; ") + &first_failure(&all))
}

fn criterion_11() -> Verdict {
    let (all, _) = run("besov-surrogate");
    let change = rows(&all, "max_refinement_change");
    let diverged = rows(&all, "diverged");
    let ps: Vec<bool> = ["p=1 ", "p=2 "].iter().map(|p| change.iter().any(|r| r.case.contains(p))).collect();
    verdict(
        all_pass(&change) && all_pass(&diverged) && ps.iter().all(|&b| b) && change.len() == 6,
        format!(
            "α = 1.5, p ∈ {{1, 2}}, 3 samples of ℬ^p: largest change over three refinements {:.2e} (< 5%), none divergent{}",
            worst(&change),
            first_failure(&all)
        ),
    )
}

fn criterion_12() -> Verdict {
    let (all, _) = run("decay-curve");
    let frac = rows(&all, "fraction_of_max");
    verdict(
        all_pass(&frac) && frac.iter().all(|r| r.case.ends_with("r=0.999")),
        format!("h = 1+z+z², α = 1: value at r = 0.999 is {:.2e} of the maximum (≤ 1%)", worst(&frac)),
    )
}

fn main() -> ExitCode {
    let [c5, c6, c10] = criteria_5_6_10();
    let results = [
        ("1", "Fubini moment identity (ω_+)_n = ω_n/(n+1)", moment_identity("plus_moment_rel_dev")),
        ("2", "star-moment identity ω*_n = ω_{n+1}/(4(n+1)²)", moment_identity("star_moment_rel_dev")),
        ("3", "operator identities", criterion_3()),
        ("4", "kernel mapping and dilation", criterion_4()),
        ("5", "Bloch pre-image round trip", c5),
        ("6", "regular pre-image round trip", c6),
        ("7", "Littlewood–Paley identities", criterion_7()),
        ("8", "8/π constant", criterion_8()),
        ("9", "classifier ground truth", criterion_9()),
        ("10", "boundedness surrogate", c10),
        ("11", "Besov surrogate", criterion_11()),
        ("12", "little-Bloch decay", criterion_12()),
    ];
    let mut failed = 0;
    for (id, title, v) in &results {
        println!("criterion {id:>2} [{}] {title}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
