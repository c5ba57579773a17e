//! Digit strings over the alphabet `{0, …, q-1}`.
//!
//! A [`Word`] is an arbitrary digit string (leading zeros allowed) and an
//! [`Expansion`] is the canonical base-q expansion of a nonnegative integer.
//! Both are stored most-significant digit first and carry their base, so
//! mixing bases is reported as an error instead of silently miscounting.
//!
//! Occurrences are always counted with overlaps: `202` occurs twice in
//! `20202`.

use std::fmt;
use std::str::FromStr;

use malachite_base::num::arithmetic::traits::Pow as _;
use malachite_base::num::conversion::traits::Digits as _;
use malachite_nz::natural::Natural;
use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Texts longer than this are counted in parallel chunks.
const PARALLEL_COUNT_THRESHOLD: usize = 1 << 20;
const PARALLEL_CHUNK: usize = 1 << 18;

/// Read access to a base-tagged digit string.
pub trait DigitString {
    fn base(&self) -> u32;
    fn digits(&self) -> &[u32];
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    base: u32,
    digits: Vec<u32>,
}

impl Word {
    /// Builds a word, checking the base and every digit. The empty word is
    /// accepted here; counting entry points reject it.
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base as u64)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::DigitOutOfRange {
                digit: digit as u64,
                base,
            });
        }
        Ok(Word { base, digits })
    }

    pub fn empty(base: u32) -> Result<Self> {
        Word::new(base, Vec::new())
    }

    /// `0^len`
    pub fn zeros(base: u32, len: usize) -> Result<Self> {
        Word::new(base, vec![0; len])
    }

    /// Parses the text format: concatenated digits for bases up to 10
    /// (`"20210"`), comma-separated decimal letters otherwise (`"19,3,0"`).
    /// The comma form is accepted for every base.
    pub fn parse(text: &str, base: u32) -> Result<Self> {
        check_base(base as u64)?;
        let text = text.trim();
        let malformed = |reason: &str| Error::MalformedWord {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        if text.is_empty() {
            return Err(malformed("no digits"));
        }
        let digits = if text.contains(',') {
            text.split(',')
                .map(|part| {
                    part.trim()
                        .parse::<u64>()
                        .map_err(|_| malformed("letters must be decimal integers"))
                })
                .collect::<Result<Vec<_>>>()?
        } else if base <= 10 {
            text.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(u64::from)
                        .ok_or_else(|| malformed("expected decimal digits"))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            // A single letter is unambiguous even without commas.
            vec![text
                .parse::<u64>()
                .map_err(|_| malformed("bases above 10 need the comma-separated form"))?]
        };
        let digits = digits
            .into_iter()
            .map(|d| {
                if d >= base as u64 {
                    Err(Error::DigitOutOfRange { digit: d, base })
                } else {
                    Ok(d as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(base, digits)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// True for `0^l` with `l >= 1`.
    pub fn is_all_zeros(&self) -> bool {
        !self.digits.is_empty() && self.digits.iter().all(|&d| d == 0)
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        same_base(self.base, other.base)?;
        let mut digits = Vec::with_capacity(self.len() + other.len());
        digits.extend_from_slice(&self.digits);
        digits.extend_from_slice(&other.digits);
        Ok(Word {
            base: self.base,
            digits,
        })
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.digits
    }
}

impl DigitString for Word {
    fn base(&self) -> u32 {
        self.base
    }

    fn digits(&self) -> &[u32] {
        &self.digits
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, self.base, &self.digits)
    }
}

/// Canonical base-q expansion `(n)_q`; `(0)_q` is the single digit `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    base: u32,
    digits: Vec<u32>,
}

impl Expansion {
    /// `M(n) = floor(log_q n)`, undefined for `n = 0`.
    pub fn msd_position(&self) -> Option<usize> {
        if self.digits == [0] {
            None
        } else {
            Some(self.digits.len() - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_word(&self) -> Word {
        Word {
            base: self.base,
            digits: self.digits.clone(),
        }
    }

    pub fn into_word(self) -> Word {
        Word {
            base: self.base,
            digits: self.digits,
        }
    }
}

impl DigitString for Expansion {
    fn base(&self) -> u32 {
        self.base
    }

    fn digits(&self) -> &[u32] {
        &self.digits
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, self.base, &self.digits)
    }
}

fn write_digits(f: &mut fmt::Formatter<'_>, base: u32, digits: &[u32]) -> fmt::Result {
    if base <= 10 {
        for d in digits {
            write!(f, "{d}")?;
        }
    } else {
        for (i, d) in digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
    }
    Ok(())
}

pub(crate) fn check_base(q: u64) -> Result<()> {
    if q < 2 || q > u32::MAX as u64 {
        return Err(Error::InvalidBase(q));
    }
    Ok(())
}

fn same_base(expected: u32, found: u32) -> Result<()> {
    if expected != found {
        return Err(Error::BaseMismatch { expected, found });
    }
    Ok(())
}

/// Canonical base-q expansion of `n`.
pub fn expansion(n: &BigUint, q: u32) -> Result<Expansion> {
    check_base(q as u64)?;
    if n.is_zero() {
        return Ok(Expansion {
            base: q,
            digits: vec![0],
        });
    }
    // Subquadratic radix conversion; matters for the multi-million digit
    // powers materialized by the exponential construction.
    let natural = Natural::from_owned_limbs_asc(n.to_u64_digits());
    let digits: Vec<u64> = natural.to_digits_desc(&(q as u64));
    Ok(Expansion {
        base: q,
        digits: digits.into_iter().map(|d| d as u32).collect(),
    })
}

/// Canonical base-q expansion of `base^exponent`, computed without going
/// through `BigUint` so the power and the radix conversion both stay
/// subquadratic.
pub fn power_expansion(base: &BigUint, exponent: u64, q: u32) -> Result<Expansion> {
    check_base(q as u64)?;
    let power = Natural::from_owned_limbs_asc(base.to_u64_digits()).pow(exponent);
    if power == 0u32 {
        return Ok(Expansion {
            base: q,
            digits: vec![0],
        });
    }
    let digits: Vec<u64> = power.to_digits_desc(&(q as u64));
    Ok(Expansion {
        base: q,
        digits: digits.into_iter().map(|d| d as u32).collect(),
    })
}

/// The low `len` base-q digits of `n`, left-padded with zeros.
pub fn low_digits(n: &BigUint, q: u32, len: usize) -> Result<Word> {
    check_base(q as u64)?;
    let modulus = BigUint::from(q).pow(len as u32);
    let low = n % &modulus;
    let mut digits = if low.is_zero() {
        Vec::new()
    } else {
        expansion(&low, q)?.digits
    };
    let mut padded = vec![0; len - digits.len()];
    padded.append(&mut digits);
    Word::new(q, padded)
}

fn counting_pattern(w: &Word, base: u32) -> Result<()> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    same_base(w.base, base)
}

/// Number of (possibly overlapping) occurrences of `w` in `v`.
pub fn occurrences<V: DigitString + ?Sized>(w: &Word, v: &V) -> Result<u64> {
    counting_pattern(w, v.base())?;
    let text = v.digits();
    let pattern = w.digits();
    if text.len() < PARALLEL_COUNT_THRESHOLD {
        return Ok(kmp_count(pattern, text));
    }
    let overlap = pattern.len() - 1;
    let chunks = text.len().div_ceil(PARALLEL_CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|i| {
            let start = i * PARALLEL_CHUNK;
            let end = ((i + 1) * PARALLEL_CHUNK + overlap).min(text.len());
            kmp_count(pattern, &text[start..end])
        })
        .sum())
}

/// Position-by-position scan; this is the reference definition of counting.
pub fn scan_count(pattern: &[u32], text: &[u32]) -> u64 {
    if pattern.is_empty() || pattern.len() > text.len() {
        return 0;
    }
    text.windows(pattern.len())
        .filter(|window| *window == pattern)
        .count() as u64
}

/// Linear-time overlapping count (Knuth–Morris–Pratt); agrees with
/// [`scan_count`] on every input.
pub fn kmp_count(pattern: &[u32], text: &[u32]) -> u64 {
    if pattern.is_empty() || pattern.len() > text.len() {
        return 0;
    }
    let mut failure = vec![0usize; pattern.len()];
    let mut k = 0;
    for i in 1..pattern.len() {
        while k > 0 && pattern[i] != pattern[k] {
            k = failure[k - 1];
        }
        if pattern[i] == pattern[k] {
            k += 1;
        }
        failure[i] = k;
    }
    let mut count = 0;
    let mut k = 0;
    for &digit in text {
        while k > 0 && digit != pattern[k] {
            k = failure[k - 1];
        }
        if digit == pattern[k] {
            k += 1;
        }
        if k == pattern.len() {
            count += 1;
            k = failure[k - 1];
        }
    }
    count
}

/// `e_q(w; n)`: occurrences of `w` in the canonical base-q expansion of `n`.
pub fn count_in_integer(w: &Word, n: &BigUint, q: u32) -> Result<u64> {
    counting_pattern(w, q)?;
    occurrences(w, &expansion(n, q)?)
}

/// `w^k`; `k = 0` gives the empty word.
pub fn concat_power(w: &Word, k: usize) -> Word {
    Word {
        base: w.base,
        digits: w.digits.repeat(k),
    }
}

/// Occurrences of `w` in `w^2`, counting the two trivial ones.
pub fn gamma_prime(w: &Word) -> Result<u64> {
    occurrences(w, &concat_power(w, 2))
}

/// `γ(w) = γ'(w) - 1`, the number of circular shifts of `w` that equal `w`.
/// Always in `1..=l`.
pub fn gamma(w: &Word) -> Result<u64> {
    Ok(gamma_prime(w)? - 1)
}

/// Splits `w = 0^k · tail` with the tail starting in a nonzero digit.
pub fn split_leading_zeros(w: &Word) -> Result<(usize, Word)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let k = w
        .digits
        .iter()
        .position(|&d| d != 0)
        .ok_or(Error::AllZerosWord)?;
    Ok((
        k,
        Word {
            base: w.base,
            digits: w.digits[k..].to_vec(),
        },
    ))
}

/// `φ_p(v) = Σ v_i p^i`: the integer spelled by `v`, leading zeros ignored.
pub fn word_value(v: &Word, p: u32) -> Result<BigUint> {
    same_base(p, v.base)?;
    let base = BigUint::from(p);
    Ok(v.digits
        .iter()
        .fold(BigUint::zero(), |acc, &d| acc * &base + d))
}

impl FromStr for Word {
    type Err = Error;

    /// Decimal-alphabet shorthand; use [`Word::parse`] to pick the base.
    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s, 10)
    }
}
