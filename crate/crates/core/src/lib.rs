//! Operator Jensen inequalities for positive maps and tracial functionals: numerical
//! checks, counterexample search and the supporting linear algebra.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convex_catalog;
pub mod error;
pub mod jensen_checks;
pub mod linalg;
pub mod positive_maps;
pub mod spectral_tools;
pub mod tensor_ops;

pub use error::{Error, Result};
