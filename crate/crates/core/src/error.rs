use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field GF({p}^{k}): {reason}")]
    UnsupportedField { p: u32, k: u32, reason: String },
    #[error("modulus is not a monic irreducible polynomial of degree {k} over GF({p})")]
    ReducibleModulus { p: u32, k: u32 },
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("malformed field element {0:?}")]
    MalformedElement(String),
    #[error("exponent overflow in monomial")]
    ExponentOverflow,
    #[error("polynomials live at different levels ({0} vs {1})")]
    LevelMismatch(usize, usize),
    #[error("unsupported Witt length {len} for p = {p}")]
    WittLength { p: u32, len: usize },
    #[error("invalid tower specification: {0}")]
    InvalidSpec(String),
    #[error("tower is not totally ramified at level {0}")]
    NotTotallyRamified(usize),
    #[error("malformed break data: {0}")]
    MalformedBreaks(String),
    #[error("no monomial of pole order {order} at level {level}")]
    NoMonomial { order: u64, level: usize },
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not enough levels: {0}")]
    InsufficientLevels(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
