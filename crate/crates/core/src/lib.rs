//! Existence machinery for primitive normal pairs `(e, f(e))` in `F_{q^n}` whose
//! prenorm equals a prescribed value.
//!
//! * [`intarith`] factors `q^n - 1` and evaluates the multiplicative functions.
//! * [`ffield`] is finite-field arithmetic with freeness predicates.
//! * [`polyfactor`] describes the factorization of `x^n - 1` over `F_q`.
//! * [`sieve`] evaluates the sufficient conditions and searches sieve parameters.
//! * [`oracle`] counts elements exhaustively and evaluates character sums.

pub mod error;
pub mod ffield;
pub mod intarith;
pub mod oracle;
pub mod polyfactor;
pub mod scalar;
pub mod sieve;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational used for sieve sums and densities.
pub type Rational = num_rational::BigRational;



/// Sieve sums evaluated in double precision.
pub type SieveSumF64 = sieve::SieveSums<f64>;
/// Sieve sums evaluated in single precision.
pub type SieveSumF32 = sieve::SieveSums<f32>;
/// Sieve sums evaluated exactly.
pub type SieveSumExact = sieve::SieveSums<Rational>;
/// Character tables with double-precision roots of unity.
pub type CharacterTableF64 = oracle::CharacterTable<f64>;
/// Character tables with single-precision roots of unity.
pub type CharacterTableF32 = oracle::CharacterTable<f32>;
