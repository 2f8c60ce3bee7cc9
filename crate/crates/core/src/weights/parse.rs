//! Parser for the weight mini-language.
//!
//! ```text
//! weight  := atom suffix*
//! atom    := "std:alpha=" num | "log:beta=" num | "exp:c=" num
//!          | "zero:[" num "," num "]:" weight
//!          | "tab:[" num "/" num ("," num "/" num)* "]"
//!          | "(" weight ")"
//! suffix  := "+" | "*" | "~" | "^alpha=" num | "@r2"
//! ```
//!
//! Whitespace is not significant. The rendering produced by `Display` on
//! [`RadialWeight`] parses back to an equal weight.

use super::RadialWeight;
use crate::error::{Error, Result};

/// Parses a weight expression such as `log:beta=2+*` or `(zero:[0.3,0.4]:std:alpha=1)~`.
pub fn parse_weight_spec(src: &str) -> Result<RadialWeight> {
    let chars: Vec<(usize, char)> = src
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut p = Parser { src, chars, pos: 0 };
    let w = p.weight()?;
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(w)
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    /// Byte offset of the current position in the source.
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |c| c.0)
    }

    fn error(&self, msg: &str) -> Error {
        Error::parse(self.offset(), msg)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, lit: &str) -> bool {
        let n = lit.chars().count();
        let matches = self.chars.len() >= self.pos + n
            && self.chars[self.pos..self.pos + n]
                .iter()
                .map(|c| c.1)
                .eq(lit.chars());
        if matches {
            self.pos += n;
        }
        matches
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{lit}`")))
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            let sign_after_exp = (c == '-' || c == '+')
                && self.pos > start
                && matches!(self.chars[self.pos - 1].1, 'e' | 'E');
            let leading_sign = c == '-' && self.pos == start;
            if c.is_ascii_digit()
                || c == '.'
                || c == 'e'
                || c == 'E'
                || sign_after_exp
                || leading_sign
            {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        text.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.error("expected a number")
        })
    }

    /// Wraps a constructor error with the position of the atom that caused it.
    fn at<T>(&self, start: usize, res: Result<T>) -> Result<T> {
        res.map_err(|e| match e {
            Error::Domain(msg) => {
                let offset = self.chars.get(start).map_or(self.src.len(), |c| c.0);
                Error::parse(offset, msg)
            }
            other => other,
        })
    }

    fn weight(&mut self) -> Result<RadialWeight> {
        let mut w = self.atom()?;
        loop {
            let start = self.pos;
            if self.eat("+") {
                w = w.plus();
            } else if self.eat("*") {
                w = w.star();
            } else if self.eat("~") {
                w = w.tilde();
            } else if self.eat("^alpha=") {
                let a = self.number()?;
                w = self.at(start, w.alpha_shift(a))?;
            } else if self.eat("@r2") {
                w = w.times_r2();
            } else {
                return Ok(w);
            }
        }
    }

    fn atom(&mut self) -> Result<RadialWeight> {
        let start = self.pos;
        if self.eat("std:alpha=") {
            let a = self.number()?;
            self.at(start, RadialWeight::standard(a))
        } else if self.eat("log:beta=") {
            let b = self.number()?;
            self.at(start, RadialWeight::logarithmic(b))
        } else if self.eat("exp:c=") {
            let c = self.number()?;
            self.at(start, RadialWeight::exponential(c))
        } else if self.eat("zero:[") {
            let a = self.number()?;
            self.expect(",")?;
            let b = self.number()?;
            self.expect("]:")?;
            let base = self.weight()?;
            self.at(start, RadialWeight::zero_annulus(&base, a, b))
        } else if self.eat("tab:[") {
            let mut samples = Vec::new();
            loop {
                let r = self.number()?;
                self.expect("/")?;
                let v = self.number()?;
                samples.push((r, v));
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("]")?;
            self.at(start, RadialWeight::tabulated(&samples))
        } else if self.eat("(") {
            let w = self.weight()?;
            self.expect(")")?;
            Ok(w)
        } else {
            Err(self.error("expected a weight (std, log, exp, zero, tab or parenthesis)"))
        }
    }
}
