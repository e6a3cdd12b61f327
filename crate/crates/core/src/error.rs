use thiserror::Error;

/// Everything that can go wrong while building or querying algebraic objects.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("{what} of size {size} exceeds the budget of {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: String,
        limit: u64,
    },
    #[error("scan over {size} elements exceeds the scan budget of {limit}")]
    ScanTooLarge { size: String, limit: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({0} vs {1})")]
    MixedFields(String, String),
    #[error("{0} is not a subfield order of this field")]
    InvalidSubfield(u64),
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has degree zero")]
    DegreeZero,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix does not belong to the extension frame")]
    FrameMismatch,
    #[error("permutation is not a bijection")]
    NotAPermutation,
    #[error("empty generator list")]
    EmptyGeneratorList,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
