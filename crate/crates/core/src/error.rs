use thiserror::Error;

/// Errors raised by constructors, transforms, audits and experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty family: an access structure needs at least one minimal set")]
    EmptyFamily,

    #[error("empty set cannot be authorized")]
    EmptyAuthorizedSet,

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: column {index} has length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("point {0} occurs in no circuit")]
    PointUnused(usize),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("too many variables: {found} (limit {limit})")]
    TooManyVariables { found: usize, limit: usize },

    #[error("too many participants: {found} (limit {limit})")]
    TooManyParticipants { found: usize, limit: usize },

    #[error("atom count {count} exceeds cap {cap}")]
    AtomOverflow { count: u128, cap: usize },

    #[error("exact weight arithmetic overflowed 128 bits")]
    WeightOverflow,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("field of order {order} is too small for {participants} participants")]
    FieldTooSmall { order: u32, participants: usize },

    #[error("duplicate or zero evaluation point {0}")]
    DuplicatePoint(u32),

    #[error("secret column is zero")]
    ZeroSecretColumn,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("polynomial {poly:#b} is not irreducible of degree {degree}")]
    NotIrreducible { poly: u32, degree: u32 },

    #[error("2^{0} + 1 is not a prime")]
    NotFermatPrime(u32),

    #[error("unknown participant {0}")]
    UnknownParticipant(usize),

    #[error("secret support has {support} values, fewer than the {requested} requested")]
    TooFewSecrets { support: usize, requested: u128 },

    #[error("secret support has odd size {0}")]
    OddSupport(usize),

    #[error("secret is not uniformly distributed")]
    NonUniformSecret,

    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),

    #[error("value {0} cannot be rendered in fixed-width binary")]
    NonBinary(i64),

    #[error("entropy deficit violated: H(X) = {entropy} < log2(k) - delta = {required}")]
    EntropyDeficitViolated { entropy: f64, required: f64 },

    #[error("support size k = {0} must be even")]
    OddK(usize),

    #[error("heavy-mass bound violated: p_gamma = {p_gamma} > {bound}")]
    HeavyMassBoundViolated { p_gamma: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Internal failures are invariant breaks, as opposed to rejected input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::HeavyMassBoundViolated { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
