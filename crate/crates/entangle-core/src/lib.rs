//! Numerical toolkit for bipartite and multipartite entanglement analysis.
//!
//! The crate is organised around a continuous-variable Schmidt decomposition
//! engine (expansion of a two-particle amplitude in discrete sets of
//! orthonormal functions) together with the finite-dimensional machinery that
//! the same workflows need: dense Hermitian eigendecompositions, SVD-based
//! entanglement classification under SLOCC, matrix-product-state
//! decompositions with sequential-cloning isometries, and a collection of
//! closed-form relativistic and decoherence channels.
//!
//! Modules:
//! - [`numerics`]: quadrature rules, Hermite functions, `eigh`/`svd` kernels.
//! - [`cv`]: continuous-variable Schmidt decomposition and its error metrics.
//! - [`amplitudes`]: catalog of two-particle amplitudes `f(p, q)`.
//! - [`qudit`]: finite-dimensional states, partial trace/transpose, measures.
//! - [`slocc`]: inductive SLOCC classification (bipartite, 3-qubit, 4-qubit probes).
//! - [`mps`]: Vidal-form matrix product states and sequential quantum cloning.
//! - [`channels`]: Wigner-rotation, magnetic-barrier and optical-medium channels.
//! - [`protocols`]: scattering-based entanglement generation protocols.
//!
//! All operations are pure functions of their inputs. With the default
//! `parallel` feature the embarrassingly parallel inner loops (grid evaluation
//! of amplitudes, coefficient-matrix assembly, parameter sweeps) run on rayon;
//! without it the same code runs sequentially.

pub mod amplitudes;
pub mod channels;
pub mod cv;
pub mod mps;
pub mod numerics;
pub mod par;
pub mod protocols;
pub mod qudit;
pub mod slocc;

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An input matrix or state failed a structural validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A numerical routine failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A rank or degeneracy decision fell inside the tolerance window.
    #[error("ambiguous rank at tolerance boundary: borderline ratio {ratio:.3e}")]
    AmbiguousRank { ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
