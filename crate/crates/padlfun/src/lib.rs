//! Exact-arithmetic construction of p-adic L-functions and p-adic families
//! of Siegel-Eisenstein Fourier coefficients.
//!
//! The library works over the Iwasawa algebra Z_p[[t]] with tracked p-adic
//! and t-adic precision. Regularized zeta values are realized as moments of
//! the Mazur measure, turned into Iwasawa series by Newton interpolation on
//! exact rationals, split by Weierstrass preparation, and inverted to obtain
//! reciprocal zeta and Dirichlet L-values as "unit series over distinguished
//! polynomial" data. On top of that sit the genus-1 and genus-2 Eisenstein
//! coefficient families, the Minkowski-Siegel mass constants, and lattice
//! theta series.
//!
//! Modules:
//! - [`arith`]: big rationals, Bernoulli machinery, quadratic characters,
//!   Kronecker symbols, factorization.
//! - [`padic`]: capped-precision elements of Q_p and the p-adic special
//!   functions (Teichmüller lift, log, Iwasawa coordinates).
//! - [`lambda`]: truncated Z_p[[t]] arithmetic, Weierstrass preparation,
//!   Newton polygons, root isolation, pseudomeasures.
//! - [`measures`]: the Mazur measure, its moments, Iwasawa series of zeta
//!   branches, Kubota-Leopoldt evaluation, reciprocal interpolation.
//! - [`eisenstein`]: exact Fourier coefficients of (Siegel-)Eisenstein
//!   series, p-regular parts, interpolating coefficient families,
//!   q-expansion operators.
//! - [`mass`]: Minkowski-Siegel mass constants, denominator factor tables,
//!   Newton-polygon valuation predictions, lattice theta enumeration.

pub mod arith;
pub mod eisenstein;
pub mod lambda;
pub mod mass;
pub mod measures;
pub mod padic;

use num_bigint::BigUint;

/// Library error type.
///
/// CLI exit codes map onto these variants: config 2, pole 3, precision 4,
/// incomplete factorization 5.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Precondition violation on an operation argument.
    #[error("domain error: {0}")]
    Domain(String),
    /// All significant p-adic digits were consumed.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    /// A denominator vanished to working precision at the evaluation point.
    #[error("pole encountered near {location} (branch {branch})")]
    Pole { branch: i64, location: String },
    /// Factorization gave up on a composite cofactor.
    #[error("incomplete factorization: unfactored composite cofactor {cofactor}")]
    IncompleteFactorization { cofactor: BigUint },
    /// The t-adic cutoff is too small to exhibit a unit coefficient.
    #[error("t-adic cutoff too small: {0}")]
    CutoffTooSmall(String),
}

pub type Result<T> = std::result::Result<T, Error>;
