//! Symbolic engine for mod-ℓ cohomology operations in the étale and motivic
//! settings.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`arith`]: exact arithmetic in F_ℓ, Lucas binomials, the sign constants
//!   ν_n and the D_k index bookkeeping of the reduced power construction.
//! - [`steenrod`]: operation words, admissible sequences, excess, and the Adem
//!   rewriting engine that produces admissible normal forms.
//! - [`unstable`]: Cartan generator sets of H*(K_n), Poincaré tables of free
//!   graded-commutative algebras and the Borel–Kudo transgression iterator.
//! - [`motivic`]: bidegree calculus, P ↔ P_V conversion, the Frobenius P⁰,
//!   Q-operations and the twisted tensor algebra over a coefficient model.
//! - [`classify`]: enumerators for the rings of étale and motivic operations.
//!
//! Operation words are written and stored in composition order, so the word
//! `P3 P1 beta` acts by β first.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod classify;
mod error;
pub mod motivic;
pub mod steenrod;
pub mod unstable;

pub use arith::{Flp, PrimeContext};
pub use error::{Error, Result};
pub use motivic::{Bidegree, CoefficientModel};
pub use steenrod::{AdmissibleSeq, Letter, Mode, OpPoly, Word};
