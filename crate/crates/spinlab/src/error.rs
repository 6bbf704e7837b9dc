use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix orders do not match: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("entry ({i},{j}) is zero (|entry| = {magnitude:.3e} below threshold)")]
    ZeroEntry { i: usize, j: usize, magnitude: f64 },
    #[error("matrix is not invertible ({0})")]
    NotInvertible(String),
    #[error("matrix is not Schur invertible: {0}")]
    NotSchurInvertible(String),
    #[error("eigenvector matrix for column {j} is ill-conditioned (cond = {cond:.3e})")]
    IllConditioned { j: usize, cond: f64 },
    #[error("matrix does not lie in the algebra (projection residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error("subspace is not Schur closed (residual {0:.3e})")]
    NotSchurClosed(f64),
    #[error("subspace is not closed under multiplication (residual {0:.3e})")]
    NotClosed(f64),
    #[error("subspace is not commutative (residual {0:.3e})")]
    NotCommutative(f64),
    #[error("not a Bose-Mesner algebra: {failing} fails")]
    NotBoseMesner { failing: String },
    #[error("ambiguous idempotent pairing: {0}")]
    AmbiguousPairing(String),
    #[error("diagonal matrix is singular")]
    SingularD,
    #[error("matrix is not a permutation matrix (residual {0:.3e})")]
    NotPermutation(f64),
    #[error("gauge ratios are inconsistent at ({i},{j}) (residual {residual:.3e})")]
    InconsistentGauge { i: usize, j: usize, residual: f64 },
    #[error("pair is not certified invertible")]
    NotInvertiblePair,
    #[error("four-weight validation failed: condition {condition} at {detail}")]
    ValidationFailure { condition: String, detail: String },
    #[error("spin-model condition ({condition}) fails at ({i},{j},{k}), residual {residual:.3e}")]
    ConditionFailure { condition: &'static str, i: usize, j: usize, k: usize, residual: f64 },
    #[error("matrix is not a Hadamard matrix ({0})")]
    NotHadamard(String),
    #[error("bad construction parameters: {0}")]
    BadParameters(String),
    #[error("block structure mismatch in block {block}: {reason}")]
    WrongShape { block: String, reason: String },
    #[error("partition is not equitable for basis element {index} (residual {residual:.3e})")]
    NotEquitable { index: usize, residual: f64 },
    #[error("index subset is empty")]
    EmptySubset,
    #[error("Nomura algebra has dimension {0}, expected 2")]
    NotDimensionTwo(usize),
    #[error("matrix does not have exactly two distinct entries")]
    NotTwoValued,
    #[error("weight vector contains a zero entry at index {0}")]
    ZeroWeight(usize),
    #[error("Newton iteration did not converge (best residual {0:.3e})")]
    NoConvergence(f64),
    #[error("scheme is not imprimitive: {0}")]
    NotImprimitive(String),
    #[error("no duality supplied or derivable: {0}")]
    NoDuality(String),
    #[error("dimension {0} exceeds the configured cap {1}")]
    DimensionTooLarge(usize, usize),
    #[error("scheme axiom ({axiom}) fails: {witness}")]
    AxiomFailure { axiom: char, witness: String },
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("verification failed: {0}")]
    VerificationFailure(String),
    #[error("first matrix of the pair is not symmetric (residual {0:.3e})")]
    NotSymmetricA(f64),
    #[error("matrix entry is not finite at ({0},{1})")]
    NonFiniteEntry(usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
