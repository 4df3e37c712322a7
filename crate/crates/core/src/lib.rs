//! Exact symbolic calculus for noncommutative differential forms on
//! (localized) path algebras of quivers, together with the structures built
//! on top of it: Karoubi-de Rham classes, double derivations and polyvector
//! fields, fusion of vertex idempotents, bisymplectic and quasi-bisymplectic
//! data, and exact evaluation on representation spaces.
//!
//! All coefficients are exact rationals; no floating point is used anywhere
//! in the symbolic modules.

pub mod chains;
pub mod confluence;
pub mod dd;
pub mod dr;
pub mod element;
pub mod expr;
pub mod forms;
pub mod fusion;
pub mod linalg;
pub mod presentation;
pub mod quiver;
pub mod report;
pub mod repspaces;
pub mod structures;
pub mod word;

pub use element::Element;
pub use presentation::Presentation;
pub use report::{Check, Report, Verdict};

/// Exact rational scalar used throughout.
pub type Rat = num::BigRational;

/// Shorthand for building a `Rat` from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(num::BigInt::from(n), num::BigInt::from(d))
}

/// Shorthand for an integral `Rat`.
pub fn rint(n: i64) -> Rat {
    Rat::from(num::BigInt::from(n))
}
