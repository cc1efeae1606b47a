//! Quasiadditive and quasimultiplicative digital functions.
//!
//! A function `f` on nonnegative integers is q-quasiadditive with parameter `r` if
//! `f(q^{k+r} a + b) = f(a) + f(b)` whenever `b < q^k`, and q-quasimultiplicative if the same
//! holds with a product. This crate evaluates such functions, decides the property for
//! q-regular sequences given by linear representations, and computes the constants of their
//! central limit theorem.

pub mod clt;
pub mod digits;
pub mod error;
pub mod funcs;
pub mod quasi;
pub mod regular;
pub mod value;

pub use error::{Error, Result};
pub use value::{Mode, Value};
