//! Result records and their CSV/JSON encodings.
//!
//! Columns come in a fixed order and floats are written with 17 significant
//! digits, so re-running an experiment with the same configuration gives
//! byte-identical files. Wall time is only written when asked for.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pre-declared pass condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contract {
    /// `value ≤ bound`
    AtMost(f64),
    /// `value ≥ bound`
    AtLeast(f64),
    /// `|value − target| ≤ rel · |target|`
    Within { target: f64, rel: f64 },
    /// `value > 0`
    Positive,
    /// A verdict encoded as 1 (true) or 0 (false) must equal the flag.
    Is(bool),
    /// Reported for reference; always passes.
    Info,
}

impl Contract {
    pub fn check(&self, value: f64) -> bool {
        match *self {
            Contract::AtMost(b) => value <= b,
            Contract::AtLeast(b) => value >= b,
            Contract::Within { target, rel } => (value - target).abs() <= rel * target.abs(),
            Contract::Positive => value > 0.0,
            Contract::Is(b) => value == if b { 1.0 } else { 0.0 },
            Contract::Info => true,
        }
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contract::AtMost(b) => write!(f, "<= {b:e}"),
            Contract::AtLeast(b) => write!(f, ">= {b:e}"),
            Contract::Within { target, rel } => write!(f, "within {rel:e} of {target:e}"),
            Contract::Positive => f.write_str("> 0"),
            Contract::Is(b) => write!(f, "is {b}"),
            Contract::Info => f.write_str("info"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    /// Echo of the inputs that produced this row.
    pub case: String,
    pub metric: String,
    #[serde(with = "float17")]
    pub value: f64,
    pub contract: String,
    pub pass: bool,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_float17")]
    pub wall_time_s: Option<f64>,
}

impl ResultRecord {
    pub fn new(experiment: &str, case: impl Into<String>, metric: &str, value: f64, contract: Contract) -> Self {
        Self {
            experiment: experiment.to_string(),
            case: case.into(),
            metric: metric.to_string(),
            value,
            contract: contract.to_string(),
            pass: contract.check(value),
            seed: None,
            wall_time_s: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// A row recording that a case could not be computed.
    pub fn failed(experiment: &str, case: impl Into<String>, metric: &str, err: &Error) -> Self {
        Self {
            experiment: experiment.to_string(),
            case: format!("{} ({err})", case.into()),
            metric: metric.to_string(),
            value: f64::NAN,
            contract: "computable".into(),
            pass: false,
            seed: None,
            wall_time_s: None,
        }
    }
}

/// `{:.16e}`: 17 significant digits, round-trips every finite `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_float(s: &str) -> std::result::Result<f64, String> {
    match s {
        "NaN" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| format!("bad float `{s}`")),
    }
}

mod float17 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_float(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_float(&s).map_err(serde::de::Error::custom)
    }
}

mod opt_float17 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&super::format_float(*v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        match s.as_deref() {
            None | Some("") => Ok(None),
            Some(s) => super::parse_float(s).map(Some).map_err(serde::de::Error::custom),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes records as CSV. The `wall_time_s` column appears only when
/// `timing` is set, keeping default output reproducible.
pub fn write_csv<W: Write>(records: &[ResultRecord], out: W, timing: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let mut header = vec!["experiment", "case", "metric", "value", "contract", "pass", "seed"];
    if timing {
        header.push("wall_time_s");
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![
            r.experiment.clone(),
            r.case.clone(),
            r.metric.clone(),
            format_float(r.value),
            r.contract.clone(),
            r.pass.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
        ];
        if timing {
            row.push(r.wall_time_s.map(format_float).unwrap_or_default());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// Writes records as a JSON array, floats as 17-digit strings so that the
/// encoding is independent of the shortest-representation printer.
pub fn write_json<W: Write>(records: &[ResultRecord], mut out: W, timing: bool) -> Result<()> {
    let stripped: Vec<ResultRecord>;
    let records = if timing {
        records
    } else {
        stripped = records
            .iter()
            .map(|r| ResultRecord {
                wall_time_s: None,
                ..r.clone()
            })
            .collect();
        &stripped
    };
    serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<Vec<ResultRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        pos: e.column(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRecord> {
        vec![
            ResultRecord::new("x", "w=zero:[0.3,0.4]:std:alpha=1, n=3", "dev", 1.0 / 3.0, Contract::AtMost(1e-8)),
            ResultRecord::new("x", "c", "norm", f64::INFINITY, Contract::Info).with_seed(4),
        ]
    }

    #[test]
    fn contracts() {
        assert!(Contract::AtMost(1e-8).check(1e-9));
        assert!(!Contract::AtMost(1e-8).check(f64::NAN));
        assert!(Contract::Within { target: 2.0, rel: 0.05 }.check(2.09));
        assert!(!Contract::Is(true).check(0.0));
        assert!(Contract::Is(false).check(0.0));
        assert!(!Contract::Positive.check(0.0));
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("experiment,case,metric,value,contract,pass,seed\n"));
        assert!(text.contains("3.3333333333333331e-1"));
        let back = read_csv(&text).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn json_round_trip() {
        let mut buf = Vec::new();
        write_json(&sample(), &mut buf, false).unwrap();
        let back = read_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, sample());
    }
}
