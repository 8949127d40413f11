//! Exact arithmetic for two-dimensional complex tori with a multiplication
//! by a square root.

#![allow(clippy::needless_range_loop)]

pub mod document;
pub mod endo;
pub mod error;
pub mod field;
pub mod interval;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod neronseveri;
pub mod papercheck;
pub mod poly;
pub mod torus;
pub mod rational;

pub use error::{Error, Result};
pub use field::{ConjKind, FieldElement, GeneratorSpec, NumberField};
pub use matrix::{FMatrix, IntMatrix};
pub use rational::Rational;
