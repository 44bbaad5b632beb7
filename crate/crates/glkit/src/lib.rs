//! Exact symbolic algebra and numerical verification kernels for GL(n).
//!
//! The crate is organised bottom-up: exact scalars and polynomials, the
//! enveloping algebra of gl(n), invariant theory and Capelli identities, the
//! BCH star product, p-adic spherical functions and Hecke operators, matrix
//! counting, an SL(2) Eisenstein wave-packet harness, exponent bookkeeping,
//! and a report layer shared by the command-line front end.

pub mod capelli;
pub mod counting;
pub mod eisenstein;
pub mod enveloping;
pub mod exponents;
pub mod hecke;
pub mod invariants;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod star;
pub mod suites;
pub mod whittaker;

pub use enveloping::{hc_project, sym_inverse, symmetrize, verify_central, Gl, Ue};
pub use poly::{CommPoly, PolyRing};
pub use scalar::{q, qi, GaussQ, HalfLaurent, Q};

/// Structural errors raised by the exact-algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("not a polynomial: {0}")]
    NotPolynomial(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
