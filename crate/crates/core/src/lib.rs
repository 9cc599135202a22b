//! Lie point symmetry analysis and travelling-wave reduction for
//! (1+1)-dimensional evolution systems, instantiated on the first members of
//! the complex Burgers hierarchy.
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`] is an exact symbolic kernel (rational coefficients, jet
//!   coordinates, Fourier/exponential normal form) with a parser and printer.
//! - [`hierarchy`] generates hierarchy members from the recursion operators and
//!   audits them against the published real/imaginary systems in [`catalogue`].
//! - [`symmetry`] prolongs generators, builds determining systems and discovers
//!   or verifies point symmetries.
//! - [`liealg`] computes brackets, structure constants and structural
//!   signatures of the resulting algebras.
//! - [`reduce`] performs travelling-wave and order reductions, checks closed-form
//!   solutions and integrates the reduced systems numerically.
//!
//! Exact linear algebra and the numeric routines are written against the
//! [`scalar::Scalar`] and [`num_traits::Float`] abstractions; the aliases below
//! fix the concrete types used throughout the symbolic layer.

pub mod catalogue;
pub mod error;
pub mod expr;
pub mod hierarchy;
pub mod jet;
pub mod liealg;
pub mod linalg;
pub mod reduce;
pub mod scalar;
pub mod symmetry;

pub use error::{Error, Result};
pub use expr::{Atom, Expr, Monomial, ZeroTest};
pub use jet::JetSpec;

/// Exact coefficient field of the symbolic kernel.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integers used by fraction-free elimination.
pub type Integer = num_bigint::BigInt;
/// Default real scalar for numeric work.
pub type Real = f64;
/// Default complex scalar for numeric evaluation.
pub type Complex = num_complex::Complex<Real>;

/// Seed used for every randomised check unless overridden.
pub const DEFAULT_SEED: u64 = 42;
