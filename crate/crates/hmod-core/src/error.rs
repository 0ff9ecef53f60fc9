//! Crate-wide error type.
//!
//! Every failure mode that the public operations can report is a named variant
//! here; the string payloads carry instance-specific context (which object,
//! which residual, how large). Callers that drive whole documents map these
//! onto process exit codes: input/validation problems, certified-false
//! results, and numerical breakdowns are kept distinct.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix data malformed: ragged rows, dimension mismatch, non-finite entries.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// A Hermitian-only operation received a matrix that is not Hermitian
    /// within tolerance.
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    /// Amplification level outside the accepted range.
    #[error("invalid amplification level: {0}")]
    InvalidLevel(String),

    /// Elements or maps over different algebras were combined.
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    /// Tolerance configuration violated its invariant (must be strictly
    /// positive and at most 1e-4).
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    /// Module data failed validation (action not a homomorphism, inner
    /// product not positive, …).
    #[error("invalid module: {0}")]
    InvalidModule(String),

    /// The inner product is positive but degenerate where definiteness is
    /// required.
    #[error("degenerate inner product: {0}")]
    DegenerateInnerProduct(String),

    /// A map that was required to be adjointable fails the adjointability
    /// residual.
    #[error("map is not adjointable: {0}")]
    NotAdjointable(String),

    /// Left action data failed validation (not a *-homomorphism, not
    /// adjointable, degenerate).
    #[error("invalid left action: {0}")]
    InvalidAction(String),

    /// Candidate pairing failed one of its structural requirements.
    #[error("candidate pairing invalid: {0}")]
    CandidateInvalid(String),

    /// The operator-level bijection could not be inverted.
    #[error("correspondence map is singular: {0}")]
    SingularPhi(String),

    /// A conditional expectation is not of finite index (fails faithfulness
    /// or no finite completely positive bound exists).
    #[error("expectation has infinite index: {0}")]
    InfiniteIndex(String),

    /// Group action data failed validation (carriers, twist, or base
    /// automorphisms inconsistent).
    #[error("invalid group action: {0}")]
    InvalidGroupAction(String),

    /// Weights for a cover instance invalid (negative, wrong arity, zero fiber).
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// A supplied representation is degenerate where a nondegenerate one is
    /// required.
    #[error("degenerate representation: {0}")]
    DegenerateRepresentation(String),

    /// A document referenced a named object that does not exist.
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),

    /// Problem document malformed (schema, version, parse error).
    #[error("invalid document: {0}")]
    InvalidDocument(String),

    /// An iterative numerical kernel failed to converge or produced
    /// non-finite values.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Certification ran but the instance is certified not to satisfy the
    /// claimed property.
    #[error("certified false: {0}")]
    CertifiedFalse(String),
}

impl Error {
    /// Process exit code class for this error: 1 = input problem,
    /// 2 = certified false, 3 = numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CertifiedFalse(_) => 2,
            Error::NumericalFailure(_) => 3,
            _ => 1,
        }
    }
}
