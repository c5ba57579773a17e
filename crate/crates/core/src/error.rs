use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base {0}: a digit base must be at least 2")]
    InvalidBase(u64),
    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: u64, base: u32 },
    #[error("base mismatch: expected base {expected}, found base {found}")]
    BaseMismatch { expected: u32, found: u32 },
    #[error("the empty word is not accepted here")]
    EmptyWord,
    #[error("word consists only of zeros; use the zero-block construction")]
    AllZerosWord,
    #[error("malformed word {text:?}: {reason}")]
    MalformedWord { text: String, reason: String },

    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("unit part {unit} is divisible by the prime {prime}")]
    UnitDivisibleByPrime { unit: String, prime: u32 },
    #[error("insufficient precision: have {have} digits, need {need}")]
    InsufficientPrecision { have: u32, need: u32 },

    #[error("Hensel precondition violated: v_p(g(a0)) = {value_valuation} is not above 2 * v_p(g'(a0)) = {}", 2 * .derivative_valuation)]
    HenselPrecondition {
        value_valuation: u64,
        derivative_valuation: u64,
    },
    #[error("derivative vanishes at the base point")]
    VanishingDerivative,
    #[error("initial residual valuation {found} is below the required {required}")]
    ResidualTooSmall { found: u64, required: u32 },
    #[error("no digit lifts the root past valuation {valuation}")]
    NoLiftingDigit { valuation: u32 },
    #[error("differentiability contract violated at shift exponent {shift}")]
    DifferentiabilityViolated { shift: u32 },
    #[error("lift parameters are inconsistent: {0}")]
    InvalidLiftParameters(String),

    #[error("{m} and {prime} are not coprime")]
    NotCoprime { m: String, prime: u32 },
    #[error("{m} is a power of {prime}; the exponential construction needs m not a power of p")]
    PowerOfPrime { m: String, prime: u32 },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("polynomial takes the negative value {value} at {point}")]
    NegativeValue { point: String, value: String },
    #[error("no shift up to {0} makes every coefficient of f(X+a) positive")]
    NoPositiveShift(u64),
    #[error("digit budget exceeded: {needed} digits needed, budget is {budget}")]
    DigitBudgetExceeded { needed: u64, budget: u64 },
    #[error("scale L = {0} is too small; at least 1 copy of the word is needed")]
    InvalidScale(u32),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid scan range: {0}")]
    InvalidRange(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
