//! Exponential witnesses: an exponent `N'` such that the base-p expansion of
//! `m^{N'}` ends in `w^L 0^c 1`.
//!
//! Write `m = m' p^s` with `p ∤ m'` and `m'^{p-1} = 1 + a p^e`. The map
//! `g(u) = (1 + a p^e)^u` extends to `Z_p`, and `F(u) = g(u) - b` has the
//! root `ξ` obtained by [`newton_lift`] from `u0 = 0`. Any `N ≡ ξ` modulo
//! `p^{L'}` then gives `m'^{(p-1)N} = g(N) ≡ b (mod p^{L'})`. Multiplying by
//! `p^{s N'}` only appends zeros, so counts on `m'` transfer to `m`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lifting::{diff_data_for, newton_lift, DiffData, UnitForm};
use crate::numeric::ln;
use crate::padic::{check_prime, pow_g, vp_nat, Exponent, PadicApprox};
use crate::report::{
    DiffParameters, ExpDetails, ReportInputs, ReportParameters, WitnessKind, WitnessReport,
    WitnessRun, REPORT_FORMAT,
};
use crate::words::{
    concat_power, gamma, low_digits, occurrences, power_expansion, word_value, DigitString, Word,
};

/// Base-p digits the full-expansion check may materialize.
pub const DEFAULT_DIGIT_BUDGET: u64 = 10_000_000;

/// `m = m' p^s` with `p ∤ m'`. Powers of `p` are rejected.
pub fn strip_p_part(m: &BigUint, p: u32) -> Result<(BigUint, u32)> {
    check_prime(p)?;
    if m < &BigUint::from(2u32) {
        return Err(Error::InvalidLiftParameters(format!(
            "m must be at least 2, got {m}"
        )));
    }
    let s = vp_nat(m, p)?.finite().expect("m is nonzero") as u32;
    let m_prime = m / BigUint::from(p).pow(s);
    if m_prime.is_one() {
        return Err(Error::PowerOfPrime {
            m: m.to_string(),
            prime: p,
        });
    }
    Ok((m_prime, s))
}

/// The target `b_{p,L}` and the tail it spells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpTarget {
    /// `b = φ_p(w^L 0^c 1)`
    pub value: BigUint,
    /// `L' = lL + c + 1`
    pub extended_length: u32,
    pub tail: Word,
}

pub fn exp_target(w: &Word, scale: u32, padding: u32, p: u32) -> Result<ExpTarget> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if w.base() != p {
        return Err(Error::BaseMismatch {
            expected: p,
            found: w.base(),
        });
    }
    if scale == 0 {
        return Err(Error::InvalidScale(scale));
    }
    let tail = concat_power(w, scale as usize)
        .concat(&Word::zeros(p, padding as usize)?)?
        .concat(&Word::new(p, vec![1])?)?;
    Ok(ExpTarget {
        value: word_value(&tail, p)?,
        extended_length: tail.len() as u32,
        tail,
    })
}

/// Number of base-p digits of `m^n`, from `n log_p m`. Exact except when
/// `m^n` sits within floating-point error of a power of `p`.
pub fn estimated_digits(m: &BigUint, n: &BigUint, p: u32) -> u64 {
    let exponent = ln(n).exp();
    (exponent * ln(m) / (p as f64).ln()).floor() as u64 + 1
}

fn diff_parameters(dd: &DiffData) -> DiffParameters {
    let unit: &UnitForm = dd.unit.as_ref().expect("diff data built from m");
    DiffParameters {
        a: unit.a.clone(),
        e: unit.e,
        a_prime: unit.squared.as_ref().map(|sq| sq.a.clone()),
        t: unit.squared.as_ref().map(|sq| sq.t),
        derivative: dd.derivative.clone(),
        j: dd.derivative_valuation,
        s: dd.precision_gain,
        n: dd.start_valuation,
        c: dd.padding,
        order: dd.order,
    }
}

/// Builds and verifies an exponential witness.
///
/// The congruence `m'^{N'} ≡ b (mod p^{L'})` is always re-checked by a
/// fresh modular exponentiation. The full expansion of `m'^{N'}` is scanned
/// only when its estimated length fits `digit_budget`; otherwise the report
/// marks the count as not materialized.
pub fn construct_exp_witness(
    m: &BigUint,
    p: u32,
    w: &Word,
    scale: u32,
    digit_budget: u64,
) -> Result<WitnessRun> {
    let (m_prime, s) = strip_p_part(m, p)?;
    let dd = diff_data_for(&m_prime, p)?;
    let target = exp_target(w, scale, dd.padding, p)?;
    let extended_length = target.extended_length;
    let unit = dd.unit.clone().expect("diff data built from m");

    let prime = BigUint::from(p);
    let b = target.value.clone();
    let f = |u: &BigUint, precision: u32| -> BigUint {
        let modulus = prime.pow(precision);
        let value = pow_g(&unit.a, unit.e, p, &Exponent::Integer(u.clone()), precision)
            .expect("unit form was validated");
        (value + &modulus - &b % &modulus) % &modulus
    };
    let j = dd.derivative_valuation;
    let u0 = PadicApprox::zero(p, dd.start_valuation - j)?;
    let (xi, trace) = newton_lift(&f, &dd, &u0, extended_length)?;

    let modulus = prime.pow(extended_length);
    let witness = &modulus + xi.residue();
    let witness_exponent = &witness * (p - 1);

    // Independent re-verification with plain modular exponentiation.
    let low = m_prime.modpow(&witness_exponent, &modulus);
    let tail = low_digits(&low, p, extended_length as usize)?;
    let verified = low == target.value && tail == target.tail;
    let window_count = occurrences(w, &tail)?;

    let gamma = gamma(w)?;
    let claimed_bound = gamma * (scale as u64).saturating_sub(1);
    let mut warnings = Vec::new();
    if scale < 2 {
        warnings.push(format!(
            "scale {scale} is below 2; the claimed bound γ(w)(L-1) is vacuous"
        ));
    }

    let estimated = estimated_digits(&m_prime, &witness_exponent, p);
    let exponent_u64 = u64::try_from(&witness_exponent).ok();
    let occurrence_count = match exponent_u64 {
        Some(exponent) if estimated <= digit_budget => {
            let full = power_expansion(&m_prime, exponent, p)?;
            if full.digits()[full.len().saturating_sub(tail.len())..] != *tail.digits() {
                return Err(Error::VerificationFailed(
                    "full expansion disagrees with the modular tail".into(),
                ));
            }
            Some(occurrences(w, &full)?)
        }
        _ => {
            warnings.push(format!(
                "full expansion not materialized: about {estimated} digits exceeds the budget of {digit_budget}"
            ));
            None
        }
    };

    let size_bound_holds = witness_exponent < BigUint::from(2 * (p - 1)) * &modulus;
    let ln_p = (p as f64).ln();
    let log_size_bound = (2.0 * (p - 1) as f64).ln()
        + (dd.padding + 1) as f64 * ln_p
        + (w.len() as u64 * scale as u64) as f64 * ln_p;
    let log_witness = ln(&witness_exponent);

    let report = WitnessReport {
        format: REPORT_FORMAT.to_string(),
        kind: WitnessKind::Exp,
        inputs: ReportInputs {
            base: p,
            word: w.to_string(),
            word_length: w.len(),
            scale,
            poly: None,
            m: Some(m.clone()),
        },
        parameters: ReportParameters {
            gamma,
            base_point: Some(BigUint::zero()),
            shift: None,
            padding: Some(dd.padding),
            extended_length: Some(extended_length),
            target: Some(target.value),
            size_excess: Some(extended_length - w.len() as u32 * scale),
        },
        witness,
        ratio: occurrence_count.map(|count| count as f64 / log_witness),
        witness_exponent: Some(witness_exponent),
        verified_congruence: verified,
        expansion_tail: tail.to_string(),
        occurrence_count,
        claimed_bound,
        theorem_target: gamma as f64 / (w.len() as f64 * ln_p),
        exponential: Some(ExpDetails {
            p,
            m: m.clone(),
            m_prime,
            s,
            diff: diff_parameters(&dd),
            digit_budget,
            estimated_digits: estimated,
            materialized: occurrence_count.is_some(),
            window_count,
            log_size_bound,
            log_witness,
            size_bound_holds,
        }),
        warnings,
    };
    Ok(WitnessRun {
        report,
        traces: vec![trace],
    })
}
