//! Empirical scans of `e_q(w; h(n)) / ln n` along a sequence `h`.
//!
//! A scan evaluates `h(n)` at every point of a strided range, counts the
//! occurrences of `w`, and records the running maximum of the ratio next to
//! the target `γ(w) / (l ln q)`. Points are evaluated in parallel; the series
//! is assembled in order of `n` afterwards, so the output never depends on
//! scheduling.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ln;
use crate::poly::IntPoly;
use crate::report::{decimal, decimal_opt, REPORT_FORMAT};
use crate::words::{count_in_integer, gamma, occurrences, power_expansion, Word};

/// The sequence `h(n)` being scanned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sequence {
    /// `h(n) = f(n)`
    Poly(IntPoly),
    /// `h(n) = m^n`
    Exp(BigUint),
}

impl Sequence {
    /// Parses `poly:c0,c1,…,cd` or `exp:m`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, body) = text
            .split_once(':')
            .ok_or_else(|| Error::InvalidSequence(format!("{text:?} has no kind prefix")))?;
        match kind.trim() {
            "poly" => Ok(Sequence::Poly(IntPoly::parse(body)?)),
            "exp" => {
                let m: BigUint = body
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidSequence(format!("bad base {:?}", body.trim())))?;
                if m < BigUint::from(2u32) {
                    return Err(Error::InvalidSequence("exponential base must be at least 2".into()));
                }
                Ok(Sequence::Exp(m))
            }
            other => Err(Error::InvalidSequence(format!(
                "unknown kind {other:?}; expected poly or exp"
            ))),
        }
    }

    /// Largest `n` whose `m^n` has at most `budget` base-q digits; `None`
    /// for polynomial sequences.
    pub fn cap(&self, q: u32, budget: u64) -> Option<u64> {
        match self {
            Sequence::Poly(_) => None,
            Sequence::Exp(m) => {
                let per_step = ln(m) / (q as f64).ln();
                Some(((budget.saturating_sub(1)) as f64 / per_step).floor() as u64)
            }
        }
    }

    fn count(&self, w: &Word, q: u32, n: &BigUint) -> Result<u64> {
        match self {
            Sequence::Poly(f) => count_in_integer(w, &f.eval_nat(n)?, q),
            Sequence::Exp(m) => {
                let exponent = n.to_u64().ok_or_else(|| {
                    Error::InvalidRange(format!("exponent {n} is too large to materialize"))
                })?;
                occurrences(w, &power_expansion(m, exponent, q)?)
            }
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Poly(poly) => write!(f, "poly:{poly}"),
            Sequence::Exp(m) => write!(f, "exp:{m}"),
        }
    }
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sequence::parse(s)
    }
}

/// `γ(w) / (l ln q)`.
pub fn ratio_target(w: &Word, q: u32) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(gamma(w)? as f64 / (w.len() as f64 * (q as f64).ln()))
}

/// Inclusive range `start..end` visited every `stride` steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanRange {
    pub start: u64,
    pub end: u64,
    pub stride: u64,
}

impl ScanRange {
    pub fn new(start: u64, end: u64, stride: u64) -> Result<Self> {
        if stride == 0 {
            return Err(Error::InvalidRange("stride must be positive".into()));
        }
        Ok(ScanRange { start, end, stride })
    }

    /// Parses `a..b` (both ends included).
    pub fn parse(text: &str, stride: u64) -> Result<Self> {
        let (a, b) = text
            .split_once("..")
            .ok_or_else(|| Error::InvalidRange(format!("{text:?} is not of the form a..b")))?;
        let bound = |part: &str| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidRange(format!("bad bound {:?}", part.trim())))
        };
        ScanRange::new(bound(a)?, bound(b)?, stride)
    }

    pub fn points(&self) -> impl Iterator<Item = u64> {
        let end = self.end;
        (self.start..=end).step_by(self.stride as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    #[serde(with = "decimal")]
    pub n: BigUint,
    #[serde(with = "decimal")]
    pub count: u64,
    pub ratio: f64,
    pub running_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub spec: String,
    #[serde(with = "decimal")]
    pub base: u32,
    pub word: String,
    #[serde(with = "decimal")]
    pub gamma: u64,
    pub target: f64,
    /// Largest exponent allowed by the digit budget, for exponential scans.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub cap: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub format: String,
    pub meta: SeriesMeta,
    pub rows: Vec<SeriesRow>,
}

/// Scans `h` over `range`. Points with `n < 2` are skipped because `ln n`
/// vanishes there; exponential scans stop at the digit-budget cap.
pub fn scan(h: &Sequence, q: u32, w: &Word, range: &ScanRange, digit_budget: u64) -> Result<Series> {
    let cap = h.cap(q, digit_budget);
    if let Some(cap) = cap {
        if range.start > cap {
            return Err(Error::DigitBudgetExceeded {
                needed: h_digits(h, q, range.start),
                budget: digit_budget,
            });
        }
    }
    let points: Vec<BigUint> = range
        .points()
        .take_while(|&n| cap.is_none_or(|cap| n <= cap))
        .filter(|&n| n >= 2)
        .map(BigUint::from)
        .collect();
    let mut series = evaluate(h, q, w, &points)?;
    series.meta.cap = cap;
    Ok(series)
}

fn h_digits(h: &Sequence, q: u32, n: u64) -> u64 {
    match h {
        Sequence::Poly(_) => 0,
        Sequence::Exp(m) => (n as f64 * ln(m) / (q as f64).ln()).floor() as u64 + 1,
    }
}

/// Evaluates the series at arbitrary points, e.g. constructed witnesses.
/// Points are sorted and deduplicated first; `n < 2` is dropped.
pub fn scan_points(h: &Sequence, q: u32, w: &Word, points: &[BigUint]) -> Result<Series> {
    let mut points: Vec<BigUint> = points
        .iter()
        .filter(|n| **n >= BigUint::from(2u32))
        .cloned()
        .collect();
    points.sort();
    points.dedup();
    evaluate(h, q, w, &points)
}

fn evaluate(h: &Sequence, q: u32, w: &Word, points: &[BigUint]) -> Result<Series> {
    let target = ratio_target(w, q)?;
    let counts = points
        .par_iter()
        .map(|n| h.count(w, q, n))
        .collect::<Result<Vec<u64>>>()?;
    let mut running_max = f64::NEG_INFINITY;
    let rows = points
        .iter()
        .zip(counts)
        .map(|(n, count)| {
            let ratio = count as f64 / ln(n);
            running_max = running_max.max(ratio);
            SeriesRow {
                n: n.clone(),
                count,
                ratio,
                running_max,
            }
        })
        .collect();
    Ok(Series {
        format: REPORT_FORMAT.to_string(),
        meta: SeriesMeta {
            spec: h.to_string(),
            base: q,
            word: w.to_string(),
            gamma: gamma(w)?,
            target,
            cap: None,
        },
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidSequence(format!(
                "unknown output format {other:?}; expected csv or json"
            ))),
        }
    }
}

/// Writes the series. CSV output starts with `# key: value` metadata lines
/// followed by the header `n,count,ratio,running_max`.
pub fn emit<W: Write>(series: &Series, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, series)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let meta = &series.meta;
            writeln!(out, "# format: {}", series.format)?;
            writeln!(out, "# spec: {}", meta.spec)?;
            writeln!(out, "# base: {}", meta.base)?;
            writeln!(out, "# word: {}", meta.word)?;
            writeln!(out, "# gamma: {}", meta.gamma)?;
            writeln!(out, "# target: {}", meta.target)?;
            if let Some(cap) = meta.cap {
                writeln!(out, "# cap: {cap}")?;
            }
            let mut writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut out);
            writer.write_record(["n", "count", "ratio", "running_max"])?;
            for row in &series.rows {
                writer.serialize(row)?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}

/// Reads back the CSV written by [`emit`].
pub fn parse_csv(text: &str) -> Result<Series> {
    let mut fields = std::collections::HashMap::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix("# ") {
            Some(meta) => {
                let (key, value) = meta.split_once(": ").ok_or_else(|| {
                    Error::InvalidSequence(format!("malformed metadata line {line:?}"))
                })?;
                fields.insert(key.to_string(), value.to_string());
            }
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let field = |key: &str| {
        fields
            .get(key)
            .cloned()
            .ok_or_else(|| Error::InvalidSequence(format!("missing metadata {key:?}")))
    };
    let number = |key: &str| -> Result<u64> {
        field(key)?
            .parse()
            .map_err(|_| Error::InvalidSequence(format!("bad metadata {key:?}")))
    };
    let meta = SeriesMeta {
        spec: field("spec")?,
        base: number("base")? as u32,
        word: field("word")?,
        gamma: number("gamma")?,
        target: field("target")?
            .parse()
            .map_err(|_| Error::InvalidSequence("bad metadata \"target\"".into()))?,
        cap: fields.contains_key("cap").then(|| number("cap")).transpose()?,
    };
    let rows = csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<SeriesRow>, _>>()?;
    Ok(Series {
        format: field("format")?,
        meta,
        rows,
    })
}
