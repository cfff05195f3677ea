//! Weighted orthogonal polynomial bases on the unit ball B^d.
//!
//! The crate provides:
//! - exact multivariate polynomial arithmetic over the rationals and
//!   closed-form moment integrals on the ball and the sphere ([`polyalg`]);
//! - the classical one-dimensional families (Jacobi, Gegenbauer, Chebyshev)
//!   and Gauss-Jacobi rules ([`orthopoly`]);
//! - an explicit Cartesian basis of spherical harmonics with derivative and
//!   raising recursions ([`spherical`]);
//! - the mutually orthogonal ball basis, its norms and Laplacian actions
//!   ([`ballbasis`]);
//! - certified-exactness quadrature on the weighted ball ([`quadrature`]);
//! - Fourier orthogonal expansion, partial sums and best-approximation
//!   errors ([`expansion`]);
//! - an experiment harness measuring approximation-rate ratios ([`rates`]).

pub mod error;
pub mod util;

pub mod polyalg;

pub mod orthopoly;

pub mod spherical;

pub mod ballbasis;

pub mod quadrature;

pub mod expansion;

pub mod rates;

pub mod verify;

pub use error::{Error, Result};
