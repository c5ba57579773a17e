//! Explicit integers whose base-q expansions contain many copies of a
//! prescribed word, along polynomial sequences `f(n)` and exponential
//! sequences `m^n`.
//!
//! The polynomial construction ([`poly_witness`]) lifts a root of
//! `f(X) ≡ b (mod p_i^{e_i L'})` for every prime power of `q` and glues the
//! lifts with the Chinese remainder theorem; `b` is chosen so that its low
//! digits spell `w^L 0^c (f(a0))_q`. The exponential construction
//! ([`exp_witness`]) lifts a root of `(1 + a p^e)^u = b` digit by digit in
//! `Z_p`. Every witness is re-verified by independent evaluation before it
//! is reported.

pub mod error;
pub mod exp_witness;
pub mod explorer;
pub mod lifting;
pub mod padic;
pub mod poly;
pub mod poly_witness;
pub mod report;
pub mod words;

mod numeric;

pub use error::{Error, Result};
pub use lifting::{diff_data_for, hensel_lift_poly, newton_lift, DiffData, LiftTrace};
pub use padic::{crt, factorize, pow_g, vp, PadicApprox, Valuation};
pub use poly::IntPoly;
pub use report::{WitnessKind, WitnessReport};
pub use words::{
    concat_power, count_in_integer, expansion, gamma, occurrences, split_leading_zeros,
    word_value, Expansion, Word,
};
