//! Truncated p-adic integers and the handful of number-theoretic helpers
//! the witness constructions need: valuations, factoring a digit base,
//! the Chinese remainder theorem, and powers of `1 + a p^e` to a given
//! precision.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// p-adic order of an integer. `Infinite` is the order of zero and compares
/// above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// True when `p^k` divides the value.
    pub fn at_least(self, k: u64) -> bool {
        self >= Valuation::Finite(k)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Trial division; the primes in play are digit bases.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    Ok(())
}

/// `v_p(n)` for a nonnegative integer.
pub fn vp_nat(n: &BigUint, p: u32) -> Result<Valuation> {
    check_prime(p)?;
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    if p == 2 {
        return Ok(Valuation::Finite(n.trailing_zeros().unwrap_or(0)));
    }
    let p = BigUint::from(p);
    let mut rest = n.clone();
    let mut v = 0;
    loop {
        let (quotient, remainder) = rest.div_rem(&p);
        if !remainder.is_zero() {
            return Ok(Valuation::Finite(v));
        }
        rest = quotient;
        v += 1;
    }
}

/// `v_p(n)` for any integer; the sign is irrelevant.
pub fn vp(n: &BigInt, p: u32) -> Result<Valuation> {
    vp_nat(n.magnitude(), p)
}

/// Prime factorization `q = Π p_i^{e_i}` with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseFactorization {
    factors: Vec<(u32, u32)>,
}

impl BaseFactorization {
    pub fn factors(&self) -> &[(u32, u32)] {
        &self.factors
    }

    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u64).pow(e))
            .product()
    }
}

pub fn factorize(q: u64) -> Result<BaseFactorization> {
    if q < 2 || q > u32::MAX as u64 {
        return Err(Error::InvalidBase(q));
    }
    let mut rest = q;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            let mut e = 0;
            while rest.is_multiple_of(d) {
                rest /= d;
                e += 1;
            }
            factors.push((d as u32, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest as u32, 1));
    }
    Ok(BaseFactorization { factors })
}

fn mod_inverse(a: &BigUint, modulus: &BigUint) -> Option<BigUint> {
    if modulus.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a.clone());
    let m = BigInt::from(modulus.clone());
    let egcd = a.extended_gcd(&m);
    if !egcd.gcd.is_one() {
        return None;
    }
    egcd.x.mod_floor(&m).to_biguint()
}

/// Combines `N ≡ r_i (mod M_i)` for pairwise coprime moduli into the unique
/// `N` in `[0, Π M_i)`. Returns `(N, Π M_i)`.
pub fn crt(congruences: &[(BigUint, BigUint)]) -> Result<(BigUint, BigUint)> {
    let mut residue = BigUint::zero();
    let mut modulus = BigUint::one();
    for (r, m) in congruences {
        if m.is_zero() {
            return Err(Error::NonCoprimeModuli);
        }
        let inverse = mod_inverse(&(&modulus % m), m).ok_or(Error::NonCoprimeModuli)?;
        let r = r % m;
        let current = &residue % m;
        // (r - residue) mod m, kept nonnegative
        let delta = (&r + m - current) % m;
        let step = (delta * inverse) % m;
        residue += &modulus * step;
        modulus *= m;
    }
    Ok((residue, modulus))
}

/// A p-adic integer known modulo `p^precision`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    prime: u32,
    precision: u32,
    residue: BigUint,
}

impl PadicApprox {
    pub fn new(prime: u32, precision: u32, value: &BigUint) -> Result<Self> {
        check_prime(prime)?;
        let residue = value % BigUint::from(prime).pow(precision);
        Ok(PadicApprox {
            prime,
            precision,
            residue,
        })
    }

    pub fn zero(prime: u32, precision: u32) -> Result<Self> {
        PadicApprox::new(prime, precision, &BigUint::zero())
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The representative in `[0, p^precision)`.
    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> BigUint {
        BigUint::from(self.prime).pow(self.precision)
    }

    /// Forgets digits at positions `>= precision`.
    pub fn truncate(&self, precision: u32) -> PadicApprox {
        let precision = precision.min(self.precision);
        PadicApprox {
            prime: self.prime,
            precision,
            residue: &self.residue % BigUint::from(self.prime).pow(precision),
        }
    }

    /// Valuation as far as the known digits tell; a zero residue only
    /// certifies `v >= precision`, reported as `Finite(precision)`.
    pub fn valuation(&self) -> Valuation {
        match vp_nat(&self.residue, self.prime).expect("prime checked at construction") {
            Valuation::Infinite => Valuation::Finite(self.precision as u64),
            v => v,
        }
    }

    pub fn add(&self, other: &PadicApprox) -> Result<PadicApprox> {
        self.same_prime(other)?;
        let precision = self.precision.min(other.precision);
        PadicApprox::new(self.prime, precision, &(&self.residue + &other.residue))
    }

    /// Product known to `min(k1 + v2, k2 + v1)`, capped at the larger input
    /// precision.
    pub fn mul(&self, other: &PadicApprox) -> Result<PadicApprox> {
        self.same_prime(other)?;
        let v1 = self.valuation().finite().unwrap_or(0) as u32;
        let v2 = other.valuation().finite().unwrap_or(0) as u32;
        let precision = (self.precision + v2)
            .min(other.precision + v1)
            .min(self.precision.max(other.precision));
        PadicApprox::new(self.prime, precision, &(&self.residue * &other.residue))
    }

    fn same_prime(&self, other: &PadicApprox) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::BaseMismatch {
                expected: self.prime,
                found: other.prime,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.residue, self.prime, self.precision)
    }
}

/// The exponent handed to [`pow_g`].
#[derive(Clone, Debug)]
pub enum Exponent {
    Integer(BigUint),
    Padic(PadicApprox),
}

/// Digits of the exponent that determine `(1 + a p^e)^u mod p^precision`.
///
/// For `e >= 2` or odd `p` this is `precision - e`. For `p = 2, e = 1` the
/// square `(1 + 2a)^2 = 1 + a' 2^t` governs, giving `precision - t + 1`
/// (at least one digit once `precision >= 2`, since parity matters mod 4).
pub fn exponent_digits_needed(a: &BigUint, e: u32, p: u32, precision: u32) -> u32 {
    if p == 2 && e == 1 {
        if precision <= 1 {
            return 0;
        }
        let t = squared_unit(a).1;
        (precision + 1).saturating_sub(t).max(1)
    } else {
        precision.saturating_sub(e)
    }
}

/// `(a', t)` with `(1 + 2a)^2 = 1 + a' 2^t` and `a'` odd.
pub(crate) fn squared_unit(a: &BigUint) -> (BigUint, u32) {
    let base = BigUint::one() + (a << 1u32);
    let excess = &base * &base - 1u32;
    let t = excess.trailing_zeros().expect("(1+2a)^2 - 1 is nonzero") as u32;
    (excess >> t, t)
}

/// `g(u) = (1 + a p^e)^u mod p^precision` by square-and-multiply, after
/// reducing the exponent to the digits that matter.
pub fn pow_g(a: &BigUint, e: u32, p: u32, u: &Exponent, precision: u32) -> Result<BigUint> {
    check_prime(p)?;
    if e == 0 {
        return Err(Error::InvalidLiftParameters(
            "the exponent e of 1 + a p^e must be at least 1".into(),
        ));
    }
    if (a % p).is_zero() {
        return Err(Error::UnitDivisibleByPrime {
            unit: a.to_string(),
            prime: p,
        });
    }
    let needed = exponent_digits_needed(a, e, p, precision);
    let exponent = match u {
        Exponent::Integer(value) => value.clone(),
        Exponent::Padic(approx) => {
            if approx.prime() != p {
                return Err(Error::BaseMismatch {
                    expected: p,
                    found: approx.prime(),
                });
            }
            if approx.precision() < needed {
                return Err(Error::InsufficientPrecision {
                    have: approx.precision(),
                    need: needed,
                });
            }
            approx.residue().clone()
        }
    };
    let prime = BigUint::from(p);
    let exponent = exponent % prime.pow(needed);
    let base = BigUint::one() + a * prime.pow(e);
    Ok(base.modpow(&exponent, &prime.pow(precision)))
}

/// Signed integer reduced into `[0, modulus)`.
pub(crate) fn reduce_signed(value: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    value
        .mod_floor(&m)
        .to_biguint()
        .expect("mod_floor by a positive modulus is nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn vp_examples() {
        assert_eq!(vp(&BigInt::from(12), 2).unwrap(), Valuation::Finite(2));
        assert_eq!(vp(&BigInt::from(-12), 3).unwrap(), Valuation::Finite(1));
        assert_eq!(vp(&BigInt::zero(), 5).unwrap(), Valuation::Infinite);
        assert!(matches!(vp(&BigInt::from(12), 4), Err(Error::NotPrime(4))));
        assert!(Valuation::Infinite > Valuation::Finite(u64::MAX));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(10).unwrap().factors(), &[(2, 1), (5, 1)]);
        assert_eq!(factorize(8).unwrap().factors(), &[(2, 3)]);
        let f = factorize(360).unwrap();
        assert_eq!(f.factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(f.product(), 360);
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert!(matches!(factorize(1), Err(Error::InvalidBase(1))));
    }

    #[test]
    fn factorize_multiplies_back() {
        for q in 2..5000u64 {
            let f = factorize(q).unwrap();
            assert_eq!(f.product(), q);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors().iter().all(|&(p, e)| is_prime(p as u64) && e >= 1));
        }
    }

    #[test]
    fn crt_examples() {
        let (n, m) = crt(&[(big(1), big(2)), (big(2), big(5))]).unwrap();
        assert_eq!((n, m), (big(7), big(10)));
        let (n, m) = crt(&[(big(4), big(9))]).unwrap();
        assert_eq!((n, m), (big(4), big(9)));
        assert!(matches!(
            crt(&[(big(1), big(4)), (big(3), big(6))]),
            Err(Error::NonCoprimeModuli)
        ));
    }

    #[test]
    fn pow_g_examples() {
        let zero = Exponent::Integer(BigUint::zero());
        assert_eq!(pow_g(&big(7), 2, 5, &zero, 9).unwrap(), big(1));
        // 4^3 mod 27
        assert_eq!(pow_g(&big(1), 1, 3, &Exponent::Integer(big(3)), 3).unwrap(), big(10));
        assert!(matches!(
            pow_g(&big(3), 1, 3, &zero, 3),
            Err(Error::UnitDivisibleByPrime { .. })
        ));
        let coarse = Exponent::Padic(PadicApprox::new(3, 1, &big(2)).unwrap());
        assert!(matches!(
            pow_g(&big(1), 1, 3, &coarse, 5),
            Err(Error::InsufficientPrecision { have: 1, need: 4 })
        ));
    }

    #[test]
    fn pow_g_eq_2_8() {
        // (1+ap^e)^{p^k} = 1 + a p^{k+e} mod p^{k+e+1} when e >= 2 or p >= 3
        for &(a, e, p) in &[(1u64, 1u32, 3u32), (2, 1, 5), (1, 2, 2), (3, 3, 2), (4, 2, 7)] {
            for k in 0..6u32 {
                let modulus = big(p as u64).pow(k + e + 1);
                let lhs = pow_g(&big(a), e, p, &Exponent::Integer(big(p as u64).pow(k)), k + e + 1)
                    .unwrap();
                let rhs = (big(1) + big(a) * big(p as u64).pow(k + e)) % modulus;
                assert_eq!(lhs, rhs, "a={a} e={e} p={p} k={k}");
            }
        }
    }

    #[test]
    fn padic_approx_precision_tracking() {
        let x = PadicApprox::new(5, 4, &big(3 * 125 + 2)).unwrap();
        let y = PadicApprox::new(5, 2, &big(10)).unwrap();
        assert_eq!(x.add(&y).unwrap().precision(), 2);
        // 10 = 2·5 has valuation 1, so x·y is known to min(4+1, 2+0) = 2 digits
        assert_eq!(x.mul(&y).unwrap().precision(), 2);
        assert_eq!(y.valuation(), Valuation::Finite(1));
        assert_eq!(x.truncate(1).residue(), &big(2));
        assert_eq!(PadicApprox::zero(5, 3).unwrap().valuation(), Valuation::Finite(3));
        assert!(PadicApprox::new(6, 2, &big(1)).is_err());
    }

    fn exact_pow(a: u64, e: u32, p: u32, u: u64) -> BigUint {
        (big(1) + big(a) * big(p as u64).pow(e)).pow(u as u32)
    }

    proptest! {
        #[test]
        fn crt_satisfies_congruences(r in proptest::collection::vec(any::<u32>(), 3), pick in 0usize..6) {
            let moduli_sets = [[7u64, 9, 10], [4, 25, 3], [11, 13, 17], [2, 3, 5], [16, 81, 125], [1, 7, 64]];
            let moduli = moduli_sets[pick];
            let congruences: Vec<_> = r.iter().zip(moduli).map(|(&r, m)| (big(r as u64), big(m))).collect();
            let (n, m) = crt(&congruences).unwrap();
            prop_assert!(n < m);
            prop_assert_eq!(m.clone(), big(moduli.iter().product()));
            for (r, mi) in &congruences {
                prop_assert_eq!(&n % mi, r % mi);
            }
        }

        #[test]
        fn vp_multiplicative(m in 1i64..1_000_000, n in -1_000_000i64..1_000_000, pi in 0usize..4) {
            prop_assume!(n != 0);
            let p = [2u32, 3, 5, 7][pi];
            let vm = vp(&BigInt::from(m), p).unwrap().finite().unwrap();
            let vn = vp(&BigInt::from(n), p).unwrap().finite().unwrap();
            let vmn = vp(&(BigInt::from(m) * BigInt::from(n)), p).unwrap().finite().unwrap();
            prop_assert_eq!(vmn, vm + vn);
        }

        #[test]
        fn pow_g_matches_exact_power(a in 1u64..50, e in 1u32..4, pi in 0usize..3, u in 0u64..200, k in 1u32..12) {
            let p = [2u32, 3, 5][pi];
            prop_assume!(a % p as u64 != 0);
            let expect = exact_pow(a, e, p, u) % big(p as u64).pow(k);
            prop_assert_eq!(pow_g(&big(a), e, p, &Exponent::Integer(big(u)), k).unwrap(), expect.clone());
            let needed = exponent_digits_needed(&big(a), e, p, k);
            let approx = PadicApprox::new(p, needed, &big(u)).unwrap();
            prop_assert_eq!(pow_g(&big(a), e, p, &Exponent::Padic(approx), k).unwrap(), expect);
        }
    }
}
