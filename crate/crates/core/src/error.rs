use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeP(u32),
    #[error("extension degree {0} outside 1..=8")]
    ExtensionDegreeOutOfRange(u32),
    #[error("field order {0} exceeds the supported maximum of 65536")]
    FieldTooLarge(u64),
    #[error("modulus is reducible over F_p or has the wrong degree")]
    ReducibleModulus,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("syntax error: {0}")]
    SyntaxError(String),
    #[error("coefficient {value} is not in [0, {q})")]
    CoefficientOutOfRange { value: u64, q: u32 },
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("precision {prec} does not exceed the valuation {nu}")]
    PrecisionTooSmall { prec: i64, nu: i64 },
    #[error("inverse of a series that vanishes to its known precision")]
    ZeroInverse,
    #[error("precision exhausted (certified up to index {prec})")]
    PrecisionExhausted { prec: i64 },
    #[error("partial quotient {index} has degree 0")]
    MalformedDigits { index: usize },
    #[error("the two series are equal")]
    EqualSeries,
    #[error("fraction is not reduced")]
    NotReduced,
    #[error("expansion has no certified partial quotient beyond a_0")]
    NoCertifiedDigits,
    #[error("matrix does not have determinant 1")]
    NotUnimodular,
    #[error("point does not lie in the unit ball O")]
    OutsideUnitBall,
    #[error("enumeration of {needed} items exceeds the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("test function reaches 1 at degree {degree}; use the brute-force search")]
    PhiOutOfRegime { degree: u32 },
    #[error("threshold {value} at argument {argument} is within the guard band of an integer")]
    ThresholdOnBoundary { argument: f64, value: f64 },
    #[error("window {0} is empty")]
    EmptyWindow(u32),
    #[error("unsupported test function: {0}")]
    UnsupportedFamily(String),
    #[error("test function must be capped at 1 here")]
    UncappedTestFunction,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
