use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("parts must be weakly decreasing, got {0:?}")]
    NotDecreasing(Vec<u64>),
    #[error("cannot parse partition from {0:?}")]
    Parse(String),
    #[error("counting measure of an empty partition")]
    Empty,
    #[error("tableau enumeration exceeds the bound of {0} tableaux")]
    EnumerationBound(u64),
    #[error("expected {expected} variables, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("repeated variables in the exact bialternant")]
    RepeatedVariables,
    #[error("Vandermonde is ill-conditioned (ratio {0:e}); use log-domain evaluation")]
    IllConditioned(f64),
    #[error("{zeros} zero slots requested out of {len} variables")]
    TooManyZeros { zeros: usize, len: usize },
    #[error("declared {declared} zero variables but found {found}")]
    ZeroCountMismatch { declared: usize, found: usize },
    #[error("sigma is not a permutation of 1..={0}")]
    NotPermutation(usize),
    #[error("the first {0} weights must be pairwise distinct and cover all weight classes")]
    WeightClasses(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("period length n must be positive")]
    EmptyPeriod,
    #[error("field {field} has length {got}, expected {expected}")]
    LengthMismatch { field: &'static str, expected: usize, got: usize },
    #[error("invalid boundary: {0}")]
    InvalidOmega(String),
    #[error("weights must be nonnegative ({0})")]
    NegativeWeight(&'static str),
    #[error("row bits must be 0 or 1")]
    BadRowBit,
    #[error("index {0} is not in I2")]
    NotInI2(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimerError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("lattice has {vertices} vertices, enumeration guard is {guard}")]
    GuardExceeded { vertices: usize, guard: usize },
    #[error("not a perfect matching: {0}")]
    NotPerfect(String),
    #[error("invalid matching sequence: {0}")]
    BadSequence(String),
    #[error("partition function is zero, no perfect matching exists")]
    ZeroPartitionFunction,
    #[error("level {level} out of range 0..={max}")]
    InvalidLevel { level: usize, max: usize },
    #[error("no samples")]
    NoSamples,
    #[error("numerical breakdown in sampler: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("iteration did not converge: {0}")]
    NoConvergence(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error("invalid boundary profile: {0}")]
    Profile(String),
    #[error("invalid weight profile: {0}")]
    Weights(String),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("kappa = {0} outside the open interval (0, 1)")]
    KappaRange(f64),
    #[error("every grid point is singular")]
    AllSingular,
    #[error("contour radius could not be stabilized")]
    Contour,
    #[error("cut condition violated: {0}")]
    CutCondition(String),
    #[error("bounding regions of components {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("root finder failed (residual {residual:e})")]
    RootFinder { residual: f64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: &'static str, found: String },
    #[error("line {line}: {msg}")]
    Field { line: usize, msg: String },
}
