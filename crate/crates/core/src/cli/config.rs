//! Experiment configuration files.
//!
//! The format is flat `key = value` text. Lines starting with `#` are
//! comments. List values are written in brackets and split at top-level
//! commas, so entries may themselves contain brackets:
//!
//! ```text
//! experiment = preimage-roundtrip
//! weights = [std:alpha=0, zero:[0.3,0.4]:std:alpha=1]
//! series = [poly:[1, 2, 0.5], logfn@64]
//! alphas = [0.5, 1, 2]
//! radial = 200
//! seed = 7
//! ```
//!
//! Unknown keys and repeated keys are errors; every key is optional and the
//! experiment supplies its own defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::series::{parse_series_literal, PowerSeries};
use crate::weights::{parse_weight_spec, RadialWeight};

/// Output encoding of result records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

pub(crate) const KEYS: &[&str] = &[
    "experiment",
    "weights",
    "series",
    "degree",
    "alphas",
    "radial",
    "angles",
    "r_max",
    "tol",
    "seed",
    "pairs",
    "max_order",
    "k",
    "p",
    "j_max",
    "radii",
    "output",
    "format",
];

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Weight specs as written, parsed eagerly into `weights`.
    pub weight_specs: Vec<String>,
    pub weights: Vec<RadialWeight>,
    pub series_specs: Vec<String>,
    pub series: Vec<PowerSeries>,
    pub degree: Option<usize>,
    pub alphas: Option<Vec<f64>>,
    pub radial: Option<usize>,
    pub angles: Option<usize>,
    pub r_max: Option<f64>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub pairs: Option<usize>,
    pub max_order: Option<u32>,
    pub k: Option<f64>,
    pub p: Option<Vec<f64>>,
    pub j_max: Option<u32>,
    pub radii: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl ExperimentConfig {
    /// A configuration naming only the experiment; everything else takes the
    /// experiment's defaults.
    pub fn named(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            weight_specs: Vec::new(),
            weights: Vec::new(),
            series_specs: Vec::new(),
            series: Vec::new(),
            degree: None,
            alphas: None,
            radial: None,
            angles: None,
            r_max: None,
            tol: None,
            seed: DEFAULT_SEED,
            pairs: None,
            max_order: None,
            k: None,
            p: None,
            j_max: None,
            radii: None,
            output: None,
            format: Format::Csv,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let map = parse_pairs(text)?;
        let experiment = map
            .get("experiment")
            .cloned()
            .ok_or_else(|| Error::Config("missing `experiment` key".into()))?;
        let mut cfg = Self::named(&experiment);
        for (key, raw) in &map {
            let bad = |what: &str| Error::Config(format!("`{key}`: {what}"));
            match key.as_str() {
                "experiment" => {}
                "weights" => {
                    let specs = list(raw).map_err(|m| bad(&m))?;
                    if specs.is_empty() {
                        return Err(bad("the weight list is empty"));
                    }
                    cfg.weights = specs
                        .iter()
                        .map(|s| parse_weight_spec(s).map_err(|e| bad(&format!("`{s}`: {e}"))))
                        .collect::<Result<_>>()?;
                    cfg.weight_specs = specs;
                }
                "series" => {
                    let specs = list(raw).map_err(|m| bad(&m))?;
                    if specs.is_empty() {
                        return Err(bad("the series list is empty"));
                    }
                    cfg.series = specs
                        .iter()
                        .map(|s| parse_series_literal(s).map_err(|e| bad(&format!("`{s}`: {e}"))))
                        .collect::<Result<_>>()?;
                    cfg.series_specs = specs;
                }
                "degree" => cfg.degree = Some(scalar(raw).map_err(|m| bad(&m))?),
                "alphas" => cfg.alphas = Some(reals(raw).map_err(|m| bad(&m))?),
                "radial" => cfg.radial = Some(scalar(raw).map_err(|m| bad(&m))?),
                "angles" => cfg.angles = Some(scalar(raw).map_err(|m| bad(&m))?),
                "r_max" => {
                    let r: f64 = scalar(raw).map_err(|m| bad(&m))?;
                    if !(r > 0.0 && r < 1.0) {
                        return Err(bad("must lie in (0, 1)"));
                    }
                    cfg.r_max = Some(r);
                }
                "tol" => {
                    let t: f64 = scalar(raw).map_err(|m| bad(&m))?;
                    if !(t > 0.0) {
                        return Err(bad("tolerances must be positive"));
                    }
                    cfg.tol = Some(t);
                }
                "seed" => cfg.seed = scalar(raw).map_err(|m| bad(&m))?,
                "pairs" => cfg.pairs = Some(scalar(raw).map_err(|m| bad(&m))?),
                "max_order" => cfg.max_order = Some(scalar(raw).map_err(|m| bad(&m))?),
                "k" => {
                    let k: f64 = scalar(raw).map_err(|m| bad(&m))?;
                    if !(k > 1.0) {
                        return Err(bad("K must exceed 1"));
                    }
                    cfg.k = Some(k);
                }
                "p" => cfg.p = Some(reals(raw).map_err(|m| bad(&m))?),
                "j_max" => cfg.j_max = Some(scalar(raw).map_err(|m| bad(&m))?),
                "radii" => cfg.radii = Some(reals(raw).map_err(|m| bad(&m))?),
                "output" => cfg.output = Some(PathBuf::from(raw)),
                "format" => cfg.format = raw.parse()?,
                _ => unreachable!("keys are checked while reading"),
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Resolvable degree of the configured grid, `⌊(M − 1)/2⌋`.
    pub fn check_degree_against_grid(&self, degree: usize, angles: usize) -> Result<()> {
        let max = angles.saturating_sub(1) / 2;
        if degree > max {
            return Err(Error::Config(format!(
                "degree {degree} exceeds what {angles} angles resolve ({max})"
            )));
        }
        Ok(())
    }
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: `{key}` given twice", lineno + 1)));
        }
    }
    Ok(map)
}

/// Splits `[a, b, c]` at commas outside nested brackets.
pub(crate) fn list(raw: &str) -> std::result::Result<Vec<String>, String> {
    let inner = raw
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{raw}`"))?;
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in inner.chars() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced brackets".into());
                }
            }
            ',' if depth == 0 => {
                items.push(std::mem::take(&mut current).trim().to_string());
                continue;
            }
            _ => {}
        }
        current.push(c);
    }
    if depth != 0 {
        return Err("unbalanced brackets".into());
    }
    let last = current.trim();
    if !last.is_empty() || !items.is_empty() {
        items.push(last.to_string());
    }
    if items.iter().any(String::is_empty) {
        return Err("empty list entry".into());
    }
    Ok(items)
}

fn scalar<T: std::str::FromStr>(raw: &str) -> std::result::Result<T, String> {
    raw.parse().map_err(|_| format!("cannot read `{raw}`"))
}

fn reals(raw: &str) -> std::result::Result<Vec<f64>, String> {
    let items = list(raw)?;
    if items.is_empty() {
        return Err("the list is empty".into());
    }
    items.iter().map(|s| scalar(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_split_at_top_level() {
        let items = list("[std:alpha=0, zero:[0.3,0.4]:std:alpha=1, poly:[1,2]]").unwrap();
        assert_eq!(items, vec!["std:alpha=0", "zero:[0.3,0.4]:std:alpha=1", "poly:[1,2]"]);
        assert_eq!(list("[]").unwrap(), Vec::<String>::new());
        assert!(list("[a,,b]").is_err());
        assert!(list("[a]]").is_err());
    }

    #[test]
    fn full_config() {
        let cfg = ExperimentConfig::parse(
            "# comment\nexperiment = preimage-roundtrip\nweights = [std:alpha=0, log:beta=2]\n\
             series = [poly:[1,2], logfn@8]\nalphas = [0.5, 1]\nradial = 120\nseed = 9\nformat = json\n",
        )
        .unwrap();
        assert_eq!(cfg.weights.len(), 2);
        assert_eq!(cfg.series[1].degree(), 8);
        assert_eq!(cfg.alphas, Some(vec![0.5, 1.0]));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn config_errors() {
        for bad in [
            "weights = [std:alpha=0]",
            "experiment = x\nweights = []",
            "experiment = x\ncolour = red",
            "experiment = x\ntol = -1",
            "experiment = x\nweights = [std:alpha=-3]",
            "experiment = x\nexperiment = y",
            "experiment = x\nk = 1",
        ] {
            assert!(matches!(ExperimentConfig::parse(bad), Err(Error::Config(_))), "{bad}");
        }
    }
}
