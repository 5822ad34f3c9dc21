use thiserror::Error;

/// Failures of the dense linear-algebra layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("requested dimension {d} outside 1..={order}")]
    DimensionOutOfRange { d: usize, order: usize },
    #[error("distance matrix has a negative entry at ({row}, {col})")]
    NegativeDistance { row: usize, col: usize },
    #[error("distance matrix has a nonzero diagonal at {index}")]
    NotHollow { index: usize },
    #[error("need at least 2 values, got {0}")]
    TooFewValues(usize),
    #[error("values must be finite and non-increasing; violated at index {0}")]
    NotDescending(usize),
    #[error("QL iteration failed to converge")]
    NoConvergence,
}

/// Failures constructing or sampling latent-position models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("mixture needs at least one atom")]
    EmptyMixture,
    #[error("atoms have inconsistent dimension")]
    RaggedAtoms,
    #[error("mixture weights must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidWeights { sum: f64 },
    #[error("inner product of atoms {a} and {b} is {value}, outside [0, 1]")]
    InnerProductOutOfRange { a: usize, b: usize, value: f64 },
    #[error("second-moment matrix is rank deficient (smallest eigenvalue {smallest})")]
    RankDeficient { smallest: f64 },
    #[error("block matrix is not positive semidefinite (eigenvalue {eigenvalue})")]
    NotPsd { eigenvalue: f64 },
    #[error("block matrix entries must lie in [0, 1]")]
    BlockOutOfRange,
    #[error("correlation parameter {index} is {value}, outside [0, 1]")]
    ParameterOutOfRange { index: usize, value: f64 },
    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),
    #[error("need at least {min} graphs, got {found}")]
    TooFewGraphs { min: usize, found: usize },
    #[error("graphs must share the vertex count {expected}, found {found}")]
    VertexCountMismatch { expected: usize, found: usize },
    #[error("no edge has a probability strictly inside (0, 1)")]
    NoInformativeEdges,
    #[error("graph format: {0}")]
    Format(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Failures of omnibus coefficient tensors and assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OmnibusError {
    #[error("need at least {min} graphs, got {found}")]
    TooFewGraphs { min: usize, found: usize },
    #[error("coefficient tensor has {found} entries, expected m^3 = {expected}")]
    BadShape { expected: usize, found: usize },
    #[error("weight {index} is {value}; weights must be positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("weights must be strictly increasing; violated at index {0}")]
    NotIncreasing(usize),
    #[error("pair-preserving construction needs an even number of graphs, got {0}")]
    OddGraphCount(usize),
    #[error("invalid coefficients: {0}")]
    Invalid(String),
    #[error("coefficients are for {coeffs} graphs but {graphs} were supplied")]
    GraphCountMismatch { coeffs: usize, graphs: usize },
    #[error("matrix order {order} is not divisible by {m}")]
    IndivisibleOrder { order: usize, m: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Failures evaluating limiting covariances and correlations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("x has inner product {value} with atom {atom}, outside [0, 1]")]
    InnerProductOutOfRange { atom: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("correlation {0} is outside [0, 1]")]
    CorrelationOutOfRange(f64),
    #[error("graph index {index} out of range for m = {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("the two graph indices must differ")]
    SameIndex,
    #[error("graph count {0} must be at least 1")]
    NoGraphs(usize),
    #[error("weight pattern not supported: {0}")]
    Pattern(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failures of estimators, embedding strategies, and classifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("trimming level {0} must lie in (0, 1/2)")]
    EpsilonOutOfRange(f64),
    #[error("graph has zero edge variance")]
    ZeroVariance,
    #[error("need at least {min} graphs, got {found}")]
    TooFewGraphs { min: usize, found: usize },
    #[error("number of clusters {k} must be in 1..={rows}")]
    BadClusterCount { k: usize, rows: usize },
    #[error("truth labels have length {found}, expected {expected}")]
    LabelLength { expected: usize, found: usize },
    #[error("training set is empty")]
    EmptyTraining,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Omnibus(#[from] OmnibusError),
}

/// Crate-level error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Omnibus(#[from] OmnibusError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}
