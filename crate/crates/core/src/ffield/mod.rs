//! Finite-field arithmetic for `F_q <= F_{q^n}`.

mod context;
mod field;
mod parse;
mod poly;
mod rational;

pub use context::{ContextDescriptor, FieldContext, Moduli, PolyOverFq};
pub use field::{first_irreducible, Field, FieldElement, GaloisField, PrimeField};
pub use parse::{parse_fraction, parse_polynomial};
pub use poly::{Poly, PolyRing};
pub use rational::{RationalFunction, RationalValue};

#[cfg(test)]
mod tests;
