//! The witness report document.
//!
//! Reports serialize to JSON with a fixed key order. Every integer is
//! written as a decimal string so nothing is lost to floating point;
//! digit strings use the word text format.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::lifting::LiftTrace;

pub const REPORT_FORMAT: &str = "digit-witness/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Poly,
    Exp,
    ZeroBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    /// `q`, or the prime `p` for exponential witnesses.
    #[serde(with = "decimal")]
    pub base: u32,
    pub word: String,
    #[serde(with = "decimal")]
    pub word_length: usize,
    /// `L`
    #[serde(with = "decimal")]
    pub scale: u32,
    /// Coefficients `c_0, …, c_d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub m: Option<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParameters {
    #[serde(with = "decimal")]
    pub gamma: u64,
    /// `a0`
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub base_point: Option<BigUint>,
    /// The zero-block shift `a` in `N = q^L + a`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub shift: Option<BigUint>,
    /// `c`
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub padding: Option<u32>,
    /// `L'`, the number of low digits pinned by the congruence.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub extended_length: Option<u32>,
    /// `b`
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub target: Option<BigUint>,
    /// `L' - lL`, the realized size-bound constant.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub size_excess: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffParameters {
    #[serde(with = "decimal")]
    pub a: BigUint,
    #[serde(with = "decimal")]
    pub e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub a_prime: Option<BigUint>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub t: Option<u32>,
    #[serde(with = "decimal")]
    pub derivative: BigUint,
    #[serde(with = "decimal")]
    pub j: u32,
    #[serde(with = "decimal")]
    pub s: u32,
    #[serde(with = "decimal")]
    pub n: u32,
    #[serde(with = "decimal")]
    pub c: u32,
    #[serde(with = "decimal")]
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpDetails {
    #[serde(with = "decimal")]
    pub p: u32,
    #[serde(with = "decimal")]
    pub m: BigUint,
    /// The p-free part of `m`; all counting is done on its powers.
    #[serde(with = "decimal")]
    pub m_prime: BigUint,
    /// `v_p(m)`
    #[serde(with = "decimal")]
    pub s: u32,
    pub diff: DiffParameters,
    #[serde(with = "decimal")]
    pub digit_budget: u64,
    /// Estimated number of base-p digits of `m'^{N'}`.
    #[serde(with = "decimal")]
    pub estimated_digits: u64,
    pub materialized: bool,
    /// Occurrences inside the verified low-digit window; a lower bound for
    /// the full count.
    #[serde(with = "decimal")]
    pub window_count: u64,
    /// `ln(2(p-1)) + (c+1) ln p + lL ln p`
    pub log_size_bound: f64,
    pub log_witness: f64,
    /// `N' < 2(p-1) p^{L'}`, checked on integers.
    pub size_bound_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub format: String,
    pub kind: WitnessKind,
    pub inputs: ReportInputs,
    pub parameters: ReportParameters,
    /// `N`
    #[serde(with = "decimal")]
    pub witness: BigUint,
    /// `N' = (p-1) N` for exponential witnesses.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal_opt")]
    pub witness_exponent: Option<BigUint>,
    pub verified_congruence: bool,
    pub expansion_tail: String,
    /// `None` when the full expansion was not materialized.
    #[serde(with = "decimal_opt")]
    pub occurrence_count: Option<u64>,
    #[serde(with = "decimal")]
    pub claimed_bound: u64,
    pub ratio: Option<f64>,
    pub theorem_target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponential: Option<ExpDetails>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl WitnessReport {
    /// All internal checks passed: the congruence (or block structure) was
    /// re-verified, any materialized count meets the claimed bound, and the
    /// exponential size bound holds.
    pub fn verification_passed(&self) -> bool {
        let count_ok = self
            .occurrence_count
            .is_none_or(|count| count >= self.claimed_bound);
        let size_ok = self
            .exponential
            .as_ref()
            .is_none_or(|details| details.size_bound_holds);
        self.verified_congruence && count_ok && size_ok
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A report together with the lift logs that produced it.
#[derive(Clone, Debug)]
pub struct WitnessRun {
    pub report: WitnessReport,
    pub traces: Vec<LiftTrace>,
}

impl WitnessRun {
    /// All lift logs, each headed by `# prime p`.
    pub fn trace_text(&self) -> String {
        let mut text = String::new();
        for trace in &self.traces {
            text.push_str(&format!("# prime {}\n", trace.prime));
            text.push_str(&trace.to_string());
        }
        text
    }
}

pub(crate) mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(value: &T, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(deserializer: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(deserializer)?
            .parse()
            .map_err(de::Error::custom)
    }
}

pub(crate) mod decimal_opt {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(
        value: &Option<T>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => serializer.collect_str(v),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, T, D>(deserializer: D) -> Result<Option<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        Option::<String>::deserialize(deserializer)?
            .map(|s| s.parse().map_err(de::Error::custom))
            .transpose()
    }
}
