//! Certification engine for adjunctions between categories of finite-dimensional
//! Hilbert C*-modules.
//!
//! The library works with C*-algebras given as finite direct sums of complex
//! matrix blocks, Hilbert modules over them, and correspondences (bimodules).
//! Given a correspondence `F` from `A` to `B` together with a candidate
//! `A`-valued pairing on the conjugate space `F*`, it constructs the two
//! evaluation maps ε and δ, the unit η, and the operator-level bijection Φ,
//! measures their completely bounded norms by amplified searches, computes the
//! numerical and expectation-theoretic indices, and emits a machine-checkable
//! certificate recording every residual at pinned tolerances.
//!
//! All norms are computed by localizing modules to honest finite-dimensional
//! Hilbert spaces through the block-diagonal faithful representation of the
//! base algebra, so every analytic quantity reduces to dense complex linear
//! algebra. The eigendecomposition kernel is implemented in this crate
//! (Householder tridiagonalization plus implicit-shift QL) and is the only
//! numerical trust anchor.

pub mod adjunction;
pub mod algebra;
pub mod correspondence;
pub mod driver;
pub mod eigh;
pub mod error;
pub mod expectation;
pub mod forge;
pub mod linalg;
pub mod module;
pub mod opspace;
pub mod par;
pub mod problem;
pub mod report;
pub mod tensor;
pub mod tol;
pub mod wedderburn;

pub use error::{Error, Result};
pub use tol::Tolerance;
