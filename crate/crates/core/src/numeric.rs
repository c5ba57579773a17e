use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Natural logarithm of an arbitrarily large integer; `-inf` for zero.
pub(crate) fn ln(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit value fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
