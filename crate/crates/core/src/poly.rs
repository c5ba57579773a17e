use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::reduce_signed;

/// Integer polynomial `c_0 + c_1 X + … + c_d X^d` with `d >= 1`, `c_d != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coefficients: Vec<BigInt>,
}

impl IntPoly {
    /// Coefficients lowest degree first. Trailing zeros are trimmed before
    /// the degree check.
    pub fn new(mut coefficients: Vec<BigInt>) -> Result<Self> {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        if coefficients.len() < 2 {
            return Err(Error::InvalidPolynomial(
                "degree must be at least 1".into(),
            ));
        }
        Ok(IntPoly { coefficients })
    }

    pub fn from_i64(coefficients: &[i64]) -> Result<Self> {
        IntPoly::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Parses `"c0,c1,…,cd"`.
    pub fn parse(text: &str) -> Result<Self> {
        let coefficients = text
            .split(',')
            .map(|part| {
                part.trim().parse::<BigInt>().map_err(|_| {
                    Error::InvalidPolynomial(format!("bad coefficient {:?}", part.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        IntPoly::new(coefficients)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coefficients
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `f(x)` for `x >= 0`, enforcing `f(x) >= 0`.
    pub fn eval_nat(&self, x: &BigUint) -> Result<BigUint> {
        let value = self.eval(&BigInt::from(x.clone()));
        value.to_biguint().ok_or_else(|| Error::NegativeValue {
            point: x.to_string(),
            value: value.to_string(),
        })
    }

    /// `f(x) mod m`, with every intermediate reduced.
    pub fn eval_mod(&self, x: &BigUint, modulus: &BigUint) -> BigUint {
        let x = x % modulus;
        self.coefficients.iter().rev().fold(BigUint::zero(), |acc, c| {
            (acc * &x + reduce_signed(c, modulus)) % modulus
        })
    }

    pub fn derivative_at(&self, x: &BigInt) -> BigInt {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(BigInt::zero(), |acc, (i, c)| acc * x + c * i)
    }

    pub fn derivative_mod(&self, x: &BigUint, modulus: &BigUint) -> BigUint {
        let x = x % modulus;
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(BigUint::zero(), |acc, (i, c)| {
                (acc * &x + reduce_signed(&(c * i), modulus)) % modulus
            })
    }

    /// `f(X) - b`.
    pub fn minus_constant(&self, b: &BigInt) -> IntPoly {
        let mut coefficients = self.coefficients.clone();
        coefficients[0] -= b;
        IntPoly { coefficients }
    }

    /// Coefficients of `f(X + a)`, lowest degree first.
    pub fn taylor_shift(&self, a: &BigInt) -> Vec<BigInt> {
        // Repeated synthetic division by (X - a).
        let mut coefficients = self.coefficients.clone();
        let n = coefficients.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let carry = &coefficients[k + 1] * a;
                coefficients[k] += carry;
            }
        }
        coefficients
    }

    pub fn leading_coefficient(&self) -> &BigInt {
        self.coefficients.last().expect("degree >= 1")
    }

    /// Values are reported as decimal strings.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coefficients.iter().map(ToString::to_string).collect()
    }

    pub(crate) fn has_positive_leading_coefficient(&self) -> bool {
        self.leading_coefficient().is_positive()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.coefficient_strings();
        f.write_str(&parts.join(","))
    }
}
