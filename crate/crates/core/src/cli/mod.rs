//! Command-line front end: subcommands for one-off computations and the
//! `experiment` runner that emits contract-checked result records.
//!
//! Exit codes: 0 when every contract holds, 1 on a contract failure or a
//! runtime error, 2 for an unknown experiment, 3 for configuration and
//! argument errors.

pub mod config;
pub mod experiments;
pub mod record;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{ExperimentConfig, Format, DEFAULT_SEED};
pub use experiments::{run_experiment, EXPERIMENTS};
pub use record::{format_float, read_csv, read_json, write_csv, write_json, Contract, ResultRecord};

pub use crate::weights::parse_weight_spec;

use crate::analysis::{classify, LpIdentity};
use crate::error::{Error, Result};
use crate::kernels::dbar_kernel_norm;
use crate::operators::{apply_integral_form, FracDerivative};
use crate::projection::{bloch_factored, project, regular_factored, DiskSample, Gate, PolarGrid};
use crate::series::{parse_series_literal, PowerSeries};
use crate::weights::RadialWeight;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_UNKNOWN_EXPERIMENT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bergman", version, about = "Weighted Bergman projections on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Bloch,
    Regular,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moment table `ω_0 … ω_N` as CSV (n, value, abs_error, method).
    Moments {
        #[arg(long)]
        weight: String,
        #[arg(long, short = 'n', default_value_t = 20)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Doubling and regularity classification as JSON.
    Classify {
        #[arg(long)]
        weight: String,
        #[arg(long = "K", default_value_t = 2.0)]
        k: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `R^{ω,ν} f(z)` through the multiplier and the integral form.
    Fracd {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        series: String,
        /// `x` or `x,y` for the point `x + iy`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Builds a bounded pre-image of `h`, samples it on a polar grid and
    /// projects it back (k, h_k, recovered_k, abs_err).
    Preimage {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        series: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Method::Bloch)]
        method: Method,
        /// Skip the classifier gate.
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = 200)]
        radial: usize,
        /// Defaults to `2N + 2`.
        #[arg(long)]
        angles: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual statistics of the Littlewood–Paley identity over random
    /// polynomial pairs.
    VerifyLp {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 20)]
        deg: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `(1 − |z|²)‖∂_z̄ B_z^ω‖_{A¹_ν}` at `|z| = 1 − 2^{−j}`, `j = 1…j_max`.
    KernelNorm {
        #[arg(long, default_value = "std:alpha=0")]
        weight: String,
        /// Defaults to the kernel weight.
        #[arg(long)]
        nu: Option<String>,
        #[arg(long, default_value_t = 6)]
        j_max: u32,
        #[arg(long, default_value_t = 400)]
        radial: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a named experiment and emits its result records.
    Experiment {
        /// Configuration file; see the README for the grammar.
        #[arg(long, conflicts_with = "name")]
        config: Option<PathBuf>,
        /// Runs the experiment with all defaults.
        #[arg(long, required_unless_present = "config")]
        name: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Adds a wall_time_s column; output is then no longer reproducible.
        #[arg(long)]
        timing: bool,
    },
}

/// Exit code for an error raised while running a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnknownExperiment(_) => EXIT_UNKNOWN_EXPERIMENT,
        Error::Config(_) | Error::Parse { .. } => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Argument-level parse failures are configuration errors.
fn arg_error(what: &str, e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::Config(_) | Error::Domain(_) => Error::Config(format!("{what}: {e}")),
        other => other,
    }
}

fn weight_arg(spec: &str) -> Result<RadialWeight> {
    parse_weight_spec(spec).map_err(|e| arg_error(&format!("weight `{spec}`"), e))
}

fn series_arg(lit: &str) -> Result<PowerSeries> {
    parse_series_literal(lit).map_err(|e| arg_error(&format!("series `{lit}`"), e))
}

fn point_arg(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| Error::Config(format!("cannot read the point `{s}`")))
    };
    let z = match parts.as_slice() {
        [x] => Complex64::new(num(x)?, 0.0),
        [x, y] => Complex64::new(num(x)?, num(y)?),
        _ => return Err(Error::Config(format!("expected `x` or `x,y`, got `{s}`"))),
    };
    if !(z.norm() < 1.0) {
        return Err(Error::Config(format!("the point {s} is not in the open disk")));
    }
    Ok(z)
}

/// Writes `text` to `path`, or to `out` when no path is given.
fn deliver(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn complex_text(z: Complex64) -> String {
    format!("{}{}{}i", format_float(z.re), if z.im.is_sign_negative() { "" } else { "+" }, format_float(z.im))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Moments { weight, n, out: path } => {
            let table = weight_arg(&weight)?.moments_upto(n)?;
            deliver(&table.to_csv(), path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Classify { weight, k, out: path } => {
            if !(k > 1.0) {
                return Err(Error::Config(format!("K must exceed 1, got {k}")));
            }
            let report = classify(&weight_arg(&weight)?, k)?;
            deliver(&(report.to_json() + "\n"), path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Fracd { from, to, series, at } => {
            let (omega, nu) = (weight_arg(&from)?, weight_arg(&to)?);
            let f = series_arg(&series)?;
            let z = point_arg(&at)?;
            let via_multiplier = FracDerivative::build(&omega, &nu, f.degree())?.apply(&f)?.eval(z)?;
            let via_integral = apply_integral_form(&omega, &nu, &f, z)?;
            let gap = (via_multiplier - via_integral).norm();
            let text = format!(
                "path,value\nmultiplier,{}\nintegral,{}\ngap,{}\n",
                complex_text(via_multiplier),
                complex_text(via_integral),
                format_float(gap)
            );
            deliver(&text, None, out)?;
            Ok(EXIT_OK)
        }
        Command::Preimage {
            weight,
            series,
            alpha,
            method,
            force,
            radial,
            angles,
            out: path,
        } => {
            let w = weight_arg(&weight)?;
            let h = series_arg(&series)?;
            let n = h.degree();
            let grid = PolarGrid::for_weight(&w, radial, angles.unwrap_or(2 * n + 2))?;
            let gate = if force { Gate::Force } else { Gate::Classify };
            let g = match method {
                Method::Bloch => bloch_factored(&w, &h, alpha, gate)?,
                Method::Regular => regular_factored(&w, &h, gate)?,
            };
            let recovered = project(&w, &DiskSample::from_factored(&grid, g)?, n)?;
            let mut text = String::from("k,h_k,recovered_k,abs_err\n");
            for k in 0..=n {
                let (a, b) = (h.coeff(k), recovered.coeff(k));
                text.push_str(&format!(
                    "{k},{},{},{}\n",
                    complex_text(a),
                    complex_text(b),
                    format_float((a - b).norm())
                ));
            }
            deliver(&text, path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::VerifyLp {
            weight,
            deg,
            trials,
            seed,
            out: path,
        } => {
            if trials == 0 {
                return Err(Error::Config("at least one trial is needed".into()));
            }
            let w = weight_arg(&weight)?;
            let lp = LpIdentity::new(&w, deg)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut plain, mut shifted) = (Vec::new(), Vec::new());
            for _ in 0..trials {
                let f = PowerSeries::random(deg, &mut rng);
                let g = PowerSeries::random(deg, &mut rng);
                let scale = lp.pairing(&f, &g)?.norm() + 1.0;
                plain.push(lp.residual(&f, &g)? / scale);
                shifted.push(lp.shifted_residual(&f, &g)? / scale);
            }
            let mut text = String::from("identity,trials,min,mean,max,seed\n");
            let mut worst: f64 = 0.0;
            for (name, v) in [("classical", &plain), ("shifted", &shifted)] {
                let min = v.iter().copied().fold(f64::INFINITY, f64::min);
                let max = v.iter().copied().fold(0.0, f64::max);
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                worst = worst.max(max);
                text.push_str(&format!(
                    "{name},{trials},{},{},{},{seed}\n",
                    format_float(min),
                    format_float(mean),
                    format_float(max)
                ));
            }
            deliver(&text, path.as_deref(), out)?;
            Ok(if worst <= experiments::thresholds::LP_IDENTITY { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::KernelNorm {
            weight,
            nu,
            j_max,
            radial,
            out: path,
        } => {
            let w = weight_arg(&weight)?;
            let nu = match nu {
                Some(s) => weight_arg(&s)?,
                None => w.clone(),
            };
            let mut text = String::from("|z|,N,M_angles,a1_norm,eight_over_pi_gap\n");
            for j in 1..=j_max {
                let row = dbar_kernel_norm(&w, &nu, 1.0 - 2f64.powi(-(j as i32)), radial)?;
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    format_float(row.modulus),
                    row.degree,
                    row.angles,
                    format_float(row.scaled_norm),
                    format_float(row.eight_over_pi_gap)
                ));
            }
            deliver(&text, path.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Experiment {
            config,
            name,
            output,
            format,
            timing,
        } => {
            let mut cfg = match (config, name) {
                (Some(p), _) => ExperimentConfig::from_file(&p)?,
                (None, Some(n)) => ExperimentConfig::named(&n),
                (None, None) => return Err(Error::Config("either --config or --name is required".into())),
            };
            if let Some(o) = output {
                cfg.output = Some(o);
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            let records = run_experiment(&cfg)?;
            emit(&records, cfg.format, cfg.output.as_deref(), timing, out)?;
            Ok(if records.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}

/// Encodes `records` and writes them to `path`, or to `out` without one.
pub fn emit(
    records: &[ResultRecord],
    format: Format,
    path: Option<&Path>,
    timing: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(records, &mut buf, timing)?,
        Format::Json => write_json(records, &mut buf, timing)?,
    }
    match path {
        Some(p) => std::fs::write(p, &buf)?,
        None => out.write_all(&buf)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("bergman").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn moments_subcommand() {
        let (code, out, _) = run_args(&["moments", "--weight", "std:alpha=1", "-n", "2"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("n,value,abs_error,method\n0,5.0000000000000000e-1"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["experiment", "--name", "no-such-thing"]).0, EXIT_UNKNOWN_EXPERIMENT);
        assert_eq!(run_args(&["moments", "--weight", "std:alpha=-4"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["moments", "--bogus"]).0, EXIT_CONFIG);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn fracd_paths_agree() {
        let (code, out, _) = run_args(&[
            "fracd", "--from", "std:alpha=0", "--to", "std:alpha=1", "--series", "poly:[1,2,3]", "--at", "0.3,-0.2",
        ]);
        assert_eq!(code, 0, "{out}");
        let gap: f64 = out.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!(gap < 1e-12, "{gap}");
    }
}
