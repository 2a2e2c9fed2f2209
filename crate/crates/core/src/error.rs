use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is reducible over the base field")]
    ReduciblePolynomial,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("logarithm of zero")]
    ZeroArgument,
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live in unrelated fields")]
    FieldMismatch,
    #[error("target field does not split the minimal polynomial")]
    NoSplitting,
    #[error("Laurent window too small: {0}")]
    WindowUnderflow(String),
    #[error("residue undefined for forms with log terms")]
    LogTermPresent,
    #[error("substitution must have positive leading order")]
    BadSubstitution,
    #[error("splitting field would exceed degree {0}")]
    SplittingFieldTooLarge(usize),
    #[error("family is not of the third kind with constant residues")]
    NotThirdKindFamily,
    #[error("supports overlap at {0}")]
    OverlappingSupport(String),
    #[error("missing table entry ({0}, {1})")]
    MissingTableEntry(String, String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("unknown place {0}")]
    UnknownPlace(String),
    #[error("missing oracle for place {0}")]
    MissingOracle(String),
    #[error("missing ingredient: {0}")]
    MissingIngredient(String),
    #[error("not supported: {0}")]
    NonSupported(String),
    #[error("order is not monogenic")]
    NonMonogenic,
    #[error("cup pairing is singular")]
    SingularDuality,
    #[error("element does not lie in the requested subfield")]
    NotInSubfield,
    #[error("unsupported extension: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
