//! Polynomial witnesses: an `N` such that the base-q expansion of `f(N)`
//! ends in `w^L 0^c (f(a0))_q`.
//!
//! Write `q = Π p_i^{e_i}` and let `L'` be the length of that tail. The
//! target `b` spells the tail (minus the leading zeros of `w`), so
//! `f(a0) ≡ b` modulo a high enough power of every `p_i` once `c` is large.
//! Hensel lifting then gives `N_i` with `f(N_i) ≡ b (mod p_i^{e_i L'})` and
//! the CRT glues them into `N < q^{L'}` with `f(N) ≡ b (mod q^{L'})`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lifting::hensel_lift_poly;
use crate::numeric::ln;
use crate::padic::{crt, factorize, vp, Valuation};
use crate::poly::IntPoly;
use crate::report::{ReportInputs, ReportParameters, WitnessKind, WitnessReport, WitnessRun, REPORT_FORMAT};
use crate::words::{
    concat_power, count_in_integer, expansion, gamma, low_digits, split_leading_zeros, word_value,
    DigitString, Word,
};

/// Upper limit for the search in [`zero_block_witness`].
const MAX_SHIFT: u64 = 1 << 20;

/// Smallest `a0 >= 0` with `f'(a0) != 0` and `f(a0) >= 0`.
pub fn choose_base_point(f: &IntPoly) -> Result<BigUint> {
    // f' has at most d - 1 roots, so a nonzero derivative turns up quickly;
    // the scan continues past d - 1 only while f is still negative.
    let mut a = 0u64;
    loop {
        let point = BigInt::from(a);
        if !f.derivative_at(&point).is_zero() && !f.eval(&point).is_negative() {
            return Ok(BigUint::from(a));
        }
        a += 1;
        if a > MAX_SHIFT {
            return Err(Error::InvalidPolynomial(
                "no base point with f'(a0) != 0 and f(a0) >= 0".into(),
            ));
        }
    }
}

/// Number of base-q digits of `n`, with `(0)_q` having one digit.
fn digit_length(n: &BigUint, q: u32) -> Result<u32> {
    Ok(expansion(n, q)?.len() as u32)
}

/// Smallest `c` with `e_i (c + len_q(f(a0))) > 2 v_{p_i}(f'(a0))` for every
/// prime power `p_i^{e_i}` of `q`.
pub fn padding_c(q: u32, f: &IntPoly, a0: &BigUint) -> Result<u32> {
    let point = BigInt::from(a0.clone());
    let derivative = f.derivative_at(&point);
    if derivative.is_zero() {
        return Err(Error::VanishingDerivative);
    }
    let tail_len = digit_length(&f.eval_nat(a0)?, q)?;
    let mut c = 0u32;
    for &(p, e) in factorize(q as u64)?.factors() {
        let v = match vp(&derivative, p)? {
            Valuation::Finite(v) => v as u32,
            Valuation::Infinite => unreachable!("derivative is nonzero"),
        };
        // e (c + len) > 2v  <=>  c + len >= floor(2v / e) + 1
        let needed = (2 * v / e + 1).saturating_sub(tail_len);
        c = c.max(needed);
    }
    Ok(c)
}

/// The target `b_{q,L}` and the tail it pins down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyTarget {
    /// `b`
    pub value: BigUint,
    /// `L' = lL + c + len_q(f(a0))`
    pub extended_length: u32,
    /// `w^L 0^c (f(a0))_q`, the low `L'` digits every witness must show.
    pub tail: Word,
}

/// `b = φ_q(w_{k+1}⋯w_l · w^{L-1} · 0^c · (f(a0))_q)` where `w = 0^k w_{k+1}⋯w_l`.
pub fn target_value(
    w: &Word,
    scale: u32,
    padding: u32,
    f: &IntPoly,
    a0: &BigUint,
    q: u32,
) -> Result<PolyTarget> {
    if scale == 0 {
        return Err(Error::InvalidScale(scale));
    }
    let (_, head) = split_leading_zeros(w)?;
    let base_value = expansion(&f.eval_nat(a0)?, q)?.into_word();
    let low = Word::zeros(q, padding as usize)?.concat(&base_value)?;
    let spelled = head
        .concat(&concat_power(w, scale as usize - 1))?
        .concat(&low)?;
    let tail = concat_power(w, scale as usize).concat(&low)?;
    Ok(PolyTarget {
        value: word_value(&spelled, q)?,
        extended_length: tail.len() as u32,
        tail,
    })
}

fn theorem_target(w: &Word, gamma: u64, q: u32) -> f64 {
    gamma as f64 / (w.len() as f64 * (q as f64).ln())
}

fn ratio(count: u64, n: &BigUint) -> Option<f64> {
    (n > &BigUint::one()).then(|| count as f64 / ln(n))
}

/// Builds and verifies a polynomial witness for a word that is not all
/// zeros. `L >= 3` keeps the claimed bound `γ(w)(L-2)` positive; smaller
/// scales still produce a report, with a warning.
pub fn construct_poly_witness(f: &IntPoly, q: u32, w: &Word, scale: u32) -> Result<WitnessRun> {
    if w.base() != q {
        return Err(Error::BaseMismatch {
            expected: q,
            found: w.base(),
        });
    }
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    if w.is_all_zeros() {
        return Err(Error::AllZerosWord);
    }
    let a0 = choose_base_point(f)?;
    let padding = padding_c(q, f, &a0)?;
    let target = target_value(w, scale, padding, f, &a0, q)?;
    let extended_length = target.extended_length;
    let b = BigInt::from(target.value.clone());
    let g = f.minus_constant(&b);

    let mut congruences = Vec::new();
    let mut traces = Vec::new();
    for &(p, e) in factorize(q as u64)?.factors() {
        let precision = extended_length * e;
        let (root, trace) = hensel_lift_poly(&g, p, &a0, precision)?;
        congruences.push((root, BigUint::from(p).pow(precision)));
        traces.push(trace);
    }
    let (witness, modulus) = crt(&congruences)?;

    // Independent re-verification: full evaluation of f(N), no lift state.
    let value = f.eval_nat(&witness)?;
    let tail = low_digits(&value, q, extended_length as usize)?;
    let verified = witness < modulus
        && modulus == BigUint::from(q).pow(extended_length)
        && &value % &modulus == target.value
        && tail == target.tail;

    let gamma = gamma(w)?;
    let count = count_in_integer(w, &value, q)?;
    let claimed_bound = gamma * (scale as u64).saturating_sub(2);
    let mut warnings = Vec::new();
    if scale < 3 {
        warnings.push(format!(
            "scale {scale} is below 3; the claimed bound γ(w)(L-2) is vacuous"
        ));
    }

    let report = WitnessReport {
        format: REPORT_FORMAT.to_string(),
        kind: WitnessKind::Poly,
        inputs: ReportInputs {
            base: q,
            word: w.to_string(),
            word_length: w.len(),
            scale,
            poly: Some(f.coefficient_strings()),
            m: None,
        },
        parameters: ReportParameters {
            gamma,
            base_point: Some(a0),
            shift: None,
            padding: Some(padding),
            extended_length: Some(extended_length),
            target: Some(target.value),
            size_excess: Some(extended_length - w.len() as u32 * scale),
        },
        ratio: ratio(count, &witness),
        witness,
        witness_exponent: None,
        verified_congruence: verified,
        expansion_tail: tail.to_string(),
        occurrence_count: Some(count),
        claimed_bound,
        theorem_target: theorem_target(w, gamma, q),
        exponential: None,
        warnings,
    };
    Ok(WitnessRun { report, traces })
}

/// Smallest `a >= 1` making every coefficient of `f(X + a)` positive.
pub fn positive_shift(f: &IntPoly) -> Result<BigUint> {
    if !f.has_positive_leading_coefficient() {
        return Err(Error::InvalidPolynomial(
            "leading coefficient must be positive".into(),
        ));
    }
    (1..=MAX_SHIFT)
        .map(BigInt::from)
        .find(|a| f.taylor_shift(a).iter().all(Signed::is_positive))
        .and_then(|a| a.to_biguint())
        .ok_or(Error::NoPositiveShift(MAX_SHIFT))
}

/// The all-zeros word `0^l`: `N = q^L + a` with `f(X + a)` having positive
/// coefficients, so `f(N) = Σ C_i q^{iL}` has `d` zero runs of length
/// `L + O(1)`.
pub fn zero_block_witness(f: &IntPoly, q: u32, block: usize, scale: u32) -> Result<WitnessReport> {
    if block == 0 {
        return Err(Error::EmptyWord);
    }
    if scale == 0 {
        return Err(Error::InvalidScale(scale));
    }
    let shift = positive_shift(f)?;
    let coefficients = f.taylor_shift(&BigInt::from(shift.clone()));
    let step = BigUint::from(q).pow(scale);
    let witness = &step + &shift;
    let value = f.eval_nat(&witness)?;

    // Independent route: place the shifted coefficients at multiples of L.
    let mut placed = BigUint::zero();
    let mut longest = 0u32;
    for c in coefficients.iter().rev() {
        let c = c.to_biguint().expect("coefficients are positive");
        longest = longest.max(digit_length(&c, q)?);
        placed = placed * &step + c;
    }
    let verified = placed == value;

    let zeros = Word::zeros(q, block)?;
    let count = count_in_integer(&zeros, &value, q)?;
    let degree = f.degree() as u64;
    let slack = block as u64 + 1 + longest as u64;
    let claimed_bound = degree * (scale as u64).saturating_sub(slack);

    Ok(WitnessReport {
        format: REPORT_FORMAT.to_string(),
        kind: WitnessKind::ZeroBlock,
        inputs: ReportInputs {
            base: q,
            word: zeros.to_string(),
            word_length: block,
            scale,
            poly: Some(f.coefficient_strings()),
            m: None,
        },
        parameters: ReportParameters {
            gamma: block as u64,
            base_point: None,
            shift: Some(shift),
            padding: None,
            extended_length: None,
            target: None,
            size_excess: None,
        },
        ratio: ratio(count, &witness),
        witness,
        witness_exponent: None,
        verified_congruence: verified,
        expansion_tail: expansion(&value, q)?.to_string(),
        occurrence_count: Some(count),
        claimed_bound,
        theorem_target: degree as f64 / (q as f64).ln(),
        exponential: None,
        warnings: Vec::new(),
    })
}
