//! Root lifting in `Z_p`, one base-p digit at a time.
//!
//! Both entry points share one engine. Given `u` with `v_p(F(u)) >= n` and a
//! derivative of exact valuation `j`, the digit at position `n - j` is the
//! unique `i` in `0..p` with `F(u + p^{n-j} i) ≡ 0 (mod p^{n+1})`. Each step
//! gains one power of p in the residual.
//!
//! * [`newton_lift`] works for any `F` that is differentiable modulo `p^s`
//!   with a fixed order, described by a [`DiffData`]; the exponential
//!   construction uses it for `F(u) = (1 + a p^e)^u - b`.
//! * [`hensel_lift_poly`] lifts integer polynomial roots under
//!   `v_p(g(a0)) > 2 v_p(g'(a0))`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{self, check_prime, vp, vp_nat, PadicApprox, Valuation};
use crate::poly::IntPoly;

/// A function `Z_p -> Z_p` evaluated on nonnegative integer representatives,
/// reduced modulo `p^precision`. Implementations must be pure.
pub trait PadicFunction {
    fn eval_mod(&self, u: &BigUint, precision: u32) -> BigUint;
}

impl<F> PadicFunction for F
where
    F: Fn(&BigUint, u32) -> BigUint,
{
    fn eval_mod(&self, u: &BigUint, precision: u32) -> BigUint {
        self(u, precision)
    }
}

/// `m^{p-1} = 1 + a p^e` with `p ∤ a`; in the `p = 2, e = 1` case also the
/// square `(1 + 2a)^2 = 1 + a' 2^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitForm {
    pub a: BigUint,
    pub e: u32,
    pub squared: Option<SquaredForm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquaredForm {
    /// `a'`, odd
    pub a: BigUint,
    /// `t >= 3`
    pub t: u32,
}

/// Differentiability data for a lift: `F(u + p^k h) ≡ F(u) + p^k h ∂`
/// modulo `p^{k+s}` for every `k > order`, with `v_p(∂) = j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffData {
    pub prime: u32,
    /// `∂_s F`, constant on the lifting neighbourhood.
    pub derivative: BigUint,
    /// `j = v_p(∂)`
    pub derivative_valuation: u32,
    /// `s`
    pub precision_gain: u32,
    /// `n`, the residual valuation the lift starts from.
    pub start_valuation: u32,
    /// `N`
    pub order: u32,
    /// `c = n - 1`, the zero padding used by the exponential target.
    pub padding: u32,
    /// Present when the data describes `g(u) = (1 + a p^e)^u`.
    pub unit: Option<UnitForm>,
}

impl DiffData {
    /// Data for a caller-supplied function. `padding` is set to `n - 1`.
    pub fn custom(
        prime: u32,
        derivative: BigUint,
        precision_gain: u32,
        start_valuation: u32,
        order: u32,
    ) -> Result<Self> {
        check_prime(prime)?;
        let derivative_valuation = match vp_nat(&derivative, prime)? {
            Valuation::Finite(v) => v as u32,
            Valuation::Infinite => return Err(Error::VanishingDerivative),
        };
        let dd = DiffData {
            prime,
            derivative,
            derivative_valuation,
            precision_gain,
            start_valuation,
            order,
            padding: start_valuation.saturating_sub(1),
            unit: None,
        };
        dd.validate()?;
        Ok(dd)
    }

    /// Data for `g(u) = (1 + a p^e)^u`, following the two cases of the
    /// differentiability statement: `∂_{e+1} g = a p^e` when `e >= 2` or
    /// `p >= 3`, and `∂_t g = a' 2^{t-1}` when `p = 2, e = 1`.
    pub fn for_unit(a: BigUint, e: u32, p: u32) -> Result<Self> {
        check_prime(p)?;
        if e == 0 {
            return Err(Error::InvalidLiftParameters("e must be at least 1".into()));
        }
        if (&a % p).is_zero() {
            return Err(Error::UnitDivisibleByPrime {
                unit: a.to_string(),
                prime: p,
            });
        }
        let prime = BigUint::from(p);
        let (derivative, j, squared) = if p == 2 && e == 1 {
            let (a_sq, t) = padic::squared_unit(&a);
            let derivative = &a_sq << (t - 1);
            (derivative, t - 1, Some(SquaredForm { a: a_sq, t }))
        } else {
            (&a * prime.pow(e), e, None)
        };
        let dd = DiffData {
            prime: p,
            derivative,
            derivative_valuation: j,
            precision_gain: j + 1,
            start_valuation: j + 1,
            order: 0,
            padding: j,
            unit: Some(UnitForm { a, e, squared }),
        };
        dd.validate()?;
        Ok(dd)
    }

    /// Checks `j + N < n`, `j < s` and `v_p(∂) = j`; for `g` also that the
    /// derivative matches the closed form.
    pub fn validate(&self) -> Result<()> {
        let j = self.derivative_valuation;
        if j + self.order >= self.start_valuation {
            return Err(Error::InvalidLiftParameters(format!(
                "need j + N < n, got j = {j}, N = {}, n = {}",
                self.order, self.start_valuation
            )));
        }
        if j >= self.precision_gain {
            return Err(Error::InvalidLiftParameters(format!(
                "need j < s, got j = {j}, s = {}",
                self.precision_gain
            )));
        }
        if vp_nat(&self.derivative, self.prime)? != Valuation::Finite(j as u64) {
            return Err(Error::InvalidLiftParameters(
                "derivative valuation does not match j".into(),
            ));
        }
        if let Some(unit) = &self.unit {
            let expected = match &unit.squared {
                Some(sq) => {
                    if sq.t < 3 || (&sq.a % 2u32).is_zero() {
                        return Err(Error::InvalidLiftParameters(
                            "squared form needs t >= 3 and odd a'".into(),
                        ));
                    }
                    &sq.a << (sq.t - 1)
                }
                None => &unit.a * BigUint::from(self.prime).pow(unit.e),
            };
            if expected != self.derivative {
                return Err(Error::InvalidLiftParameters(
                    "derivative does not match the unit form".into(),
                ));
            }
        }
        Ok(())
    }

    /// `g(u) mod p^precision` when this describes `(1 + a p^e)^u`.
    pub fn g(&self, u: &BigUint, precision: u32) -> Option<BigUint> {
        let unit = self.unit.as_ref()?;
        padic::pow_g(
            &unit.a,
            unit.e,
            self.prime,
            &padic::Exponent::Integer(u.clone()),
            precision,
        )
        .ok()
    }
}

/// `diff_data_for(m, p)`: writes `m^{p-1} = 1 + a p^e` and fills in the
/// lift parameters `j`, `s = j + 1`, `n = j + 1`, `c = n - 1`, order 0.
pub fn diff_data_for(m: &BigUint, p: u32) -> Result<DiffData> {
    check_prime(p)?;
    if (m % p).is_zero() {
        return Err(Error::NotCoprime {
            m: m.to_string(),
            prime: p,
        });
    }
    if m.is_one() {
        return Err(Error::PowerOfPrime {
            m: m.to_string(),
            prime: p,
        });
    }
    let excess = m.pow(p - 1) - 1u32;
    let e = vp_nat(&excess, p)?
        .finite()
        .expect("m >= 2 so m^{p-1} - 1 is nonzero") as u32;
    let a = excess / BigUint::from(p).pow(e);
    DiffData::for_unit(a, e, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftStep {
    /// Residual valuation `n` guaranteed before the step.
    pub precision: u32,
    /// The digit `i` placed at position `n - j`.
    pub digit: u32,
    /// Residual valuation certified after the step.
    pub residual_valuation: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiftTrace {
    pub prime: u32,
    pub steps: Vec<LiftStep>,
}

impl LiftTrace {
    pub fn is_strictly_increasing(&self) -> bool {
        self.steps
            .iter()
            .all(|s| s.residual_valuation > s.precision)
            && self
                .steps
                .windows(2)
                .all(|w| w[1].residual_valuation > w[0].residual_valuation)
    }
}

/// One step per line: `precision digit valuation`.
impl fmt::Display for LiftTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(
                f,
                "{} {} {}",
                step.precision, step.digit, step.residual_valuation
            )?;
        }
        Ok(())
    }
}

/// The shared digit-by-digit engine. Expects `v_p(F(u)) >= start` and
/// returns `u'` with `v_p(F(u')) >= stop`, changing only digits at
/// positions `>= start - j`.
fn lift_digits<F: PadicFunction + ?Sized>(
    f: &F,
    prime: u32,
    derivative_valuation: u32,
    start: u32,
    u0: BigUint,
    stop: u32,
    trace: &mut LiftTrace,
) -> Result<BigUint> {
    let p = BigUint::from(prime);
    let mut u = u0;
    let mut n = start;
    while n < stop {
        let step = p.pow(n - derivative_valuation);
        let mut candidate = u.clone();
        let mut found = None;
        for digit in 0..prime {
            if f.eval_mod(&candidate, n + 1).is_zero() {
                found = Some(digit);
                break;
            }
            candidate += &step;
        }
        let digit = found.ok_or(Error::NoLiftingDigit { valuation: n })?;
        trace.steps.push(LiftStep {
            precision: n,
            digit,
            residual_valuation: n + 1,
        });
        u = candidate;
        n += 1;
    }
    Ok(u)
}

fn residual_valuation<F: PadicFunction + ?Sized>(
    f: &F,
    prime: u32,
    u: &BigUint,
    precision: u32,
) -> Result<u64> {
    let value = f.eval_mod(u, precision);
    Ok(vp_nat(&value, prime)?
        .finite()
        .unwrap_or(precision as u64)
        .min(precision as u64))
}

/// Spot-checks `F(x + p^k h) ≡ F(x) + p^k h ∂ (mod p^{k+s})` around `u0`.
fn sample_differentiability<F: PadicFunction + ?Sized>(
    f: &F,
    dd: &DiffData,
    u0: &BigUint,
) -> Result<()> {
    let p = BigUint::from(dd.prime);
    let neighbourhood = p.pow(dd.start_valuation - dd.derivative_valuation);
    let points = [u0.clone(), u0 + &neighbourhood, u0 + &neighbourhood * 2u32];
    let shifts = [1u32, dd.prime - 1, dd.prime + 1];
    for x in &points {
        for k in dd.order + 1..=dd.order + 3 {
            let precision = k + dd.precision_gain;
            let modulus = p.pow(precision);
            let base = f.eval_mod(x, precision);
            for &h in &shifts {
                let offset = p.pow(k) * h;
                let lhs = f.eval_mod(&(x + &offset), precision);
                let rhs = (&base + &offset * &dd.derivative) % &modulus;
                if lhs != rhs {
                    return Err(Error::DifferentiabilityViolated { shift: k });
                }
            }
        }
    }
    Ok(())
}

/// Lifts `u0` to a root `ξ` of `F`, returned modulo `p^target`.
///
/// Requires `v_p(F(u0)) >= n` and `F` differentiable modulo `p^s` with the
/// order and derivative in `dd` on the class of `u0` mod `p^{n-j}`. The
/// output satisfies `v_p(F(ξ)) >= target + j` and `ξ ≡ u0 (mod p^{n-j})`.
/// Digits are chosen smallest-first.
pub fn newton_lift<F: PadicFunction + ?Sized>(
    f: &F,
    dd: &DiffData,
    u0: &PadicApprox,
    target: u32,
) -> Result<(PadicApprox, LiftTrace)> {
    dd.validate()?;
    if u0.prime() != dd.prime {
        return Err(Error::BaseMismatch {
            expected: dd.prime,
            found: u0.prime(),
        });
    }
    let j = dd.derivative_valuation;
    let n = dd.start_valuation;
    if u0.precision() < n - j {
        return Err(Error::InsufficientPrecision {
            have: u0.precision(),
            need: n - j,
        });
    }
    let start = u0.residue().clone();
    let found = residual_valuation(f, dd.prime, &start, n)?;
    if found < n as u64 {
        return Err(Error::ResidualTooSmall { found, required: n });
    }
    sample_differentiability(f, dd, &start)?;

    let mut trace = LiftTrace {
        prime: dd.prime,
        steps: Vec::new(),
    };
    let root = lift_digits(f, dd.prime, j, n, start, target + j, &mut trace)?;
    Ok((PadicApprox::new(dd.prime, target, &root)?, trace))
}

/// Finds `N` in `[0, p^precision)` with `g(N) ≡ 0 (mod p^precision)` and
/// `N ≡ a0 (mod p^{v+1})`, `v = v_p(g'(a0))`.
///
/// Precondition: `v_p(g(a0)) > 2 v_p(g'(a0))`. Near such a point the
/// polynomial is differentiable modulo `p^{v+1}` with order `v`, so the same
/// digit engine as [`newton_lift`] applies.
pub fn hensel_lift_poly(
    g: &IntPoly,
    p: u32,
    a0: &BigUint,
    precision: u32,
) -> Result<(BigUint, LiftTrace)> {
    check_prime(p)?;
    let prime = BigUint::from(p);
    let point = BigInt::from(a0.clone());
    let derivative_valuation = match vp(&g.derivative_at(&point), p)? {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Err(Error::VanishingDerivative),
    };
    let value_valuation = vp(&g.eval(&point), p)?;
    if !value_valuation.at_least(2 * derivative_valuation + 1) {
        return Err(Error::HenselPrecondition {
            value_valuation: value_valuation.finite().unwrap_or(u64::MAX),
            derivative_valuation,
        });
    }
    let modulus = prime.pow(precision);
    let mut trace = LiftTrace {
        prime: p,
        steps: Vec::new(),
    };
    let start = match value_valuation {
        Valuation::Finite(v) if v < precision as u64 => v as u32,
        _ => return Ok((a0 % &modulus, trace)),
    };
    let evaluate = |u: &BigUint, k: u32| g.eval_mod(u, &prime.pow(k));
    let root = lift_digits(
        &evaluate,
        p,
        derivative_valuation as u32,
        start,
        a0.clone(),
        precision,
        &mut trace,
    )?;
    let root = root % &modulus;
    // internal consistency
    if !g.eval_mod(&root, &modulus).is_zero() {
        return Err(Error::VerificationFailed(
            "Hensel lift did not reach the target precision".into(),
        ));
    }
    Ok((root, trace))
}
