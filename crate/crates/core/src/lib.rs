//! Exact Markov models and local dimensions for the random
//! β-transformation at generalised multinacci numbers.
//!
//! β is the root `> 1` of `x^n - a_1 x^{n-1} - ... - a_n` where
//! `1 = a_1/β + ... + a_n/β^n` is the greedy expansion of 1. Points of the
//! interval live in Q(β) and every comparison is exact.
//!
//! ```
//! use betadim::{markov::MarkovModel, dimension::nu_ae_dimension, Rational};
//!
//! let model = MarkovModel::from_digits(&[1, 1]).unwrap();
//! assert_eq!(model.mu_s(), Rational::new(1.into(), 3.into()));
//! assert!((nu_ae_dimension(&model) - 2.40070).abs() < 1e-5);
//! ```

// FieldElt hashes its reduced coefficients only; the cached β enclosure
// behind its Mutex never affects Hash or Eq.
#![allow(clippy::mutable_key_type)]

pub mod asym;
pub mod beta_maps;
pub mod dimension;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod numberfield;
pub mod omega;
pub mod poly;
pub mod scalar;

pub use error::{Error, ErrorKind, Result};
pub use numberfield::{field_from_digits, BetaField, FieldElt, Sign};
pub use scalar::{Rational, Scalar};

pub type ExactParry = linalg::Parry<Rational>;
pub type ParryF64 = linalg::Parry<f64>;
pub use asym::{AsymModelF64, ExactAsymModel};
