//! Large-gap asymptotics of the sine-kernel Fredholm determinant on two intervals.
//!
//! The bulk GUE gap probability `P_s(A) = det(I - K_s)_A` with
//! `K_s(x, y) = sin(s(x - y)) / (π(x - y))` is evaluated on
//! `A = (-1, v1) ∪ (v2, 1)` in several ways:
//!
//! * [`asymptotics`] evaluates the closed-form large-`s` expansions (fixed gaps,
//!   one gap, merging gaps) term by term;
//! * [`oracle`] computes the determinant directly, by Nyström discretisation and
//!   by the Toeplitz (circular ensemble) limit;
//! * [`identities`] checks the theta-function and elliptic-integral identities the
//!   expansions rest on, as numeric residuals.
//!
//! The geometric input (elliptic integrals, Jacobi theta functions, the Abel map of
//! the genus-one surface `w² = (z² - 1)(z - v1)(z - v2)`) lives in [`elliptic`],
//! [`theta`] and [`two_gap`].

pub mod asymptotics;
pub mod elliptic;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod theta;
pub mod two_gap;

pub use asymptotics::{ExpansionBreakdown, Regime};
pub use elliptic::{EllipticData, GapPair};
pub use error::{Error, Result};
pub use oracle::OracleResult;
pub use theta::{ThetaConstants, ThetaContext, ThetaFn};
pub use two_gap::DerivedGeometry;

