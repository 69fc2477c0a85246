//! Finite-dimensional realizations of noncommutative rational functions.
//!
//! A function regular at the origin is stored either as a descriptor
//! `c*(I - Σ z_j A_j)^{-1} b` or in Fornasini-Marchesini form
//! `D + C (I - Σ z_j A_j)^{-1} Σ z_j B_j`, and is evaluated on tuples of
//! square matrices. On top of that sit the pair `(T, x)` of a row
//! coisometry and a unit vector, the inner function it generates, and the
//! state `ω ↦ ⟨T^ω x, x⟩` with its truncated GNS model.
//!
//! All matrices are dense `nalgebra` matrices over `Complex64`. Thresholds
//! live in [`tol::Tolerances`]; nothing compares floats against zero
//! directly.

pub mod error;
pub mod linalg;
pub mod minimal;
pub mod par;
pub mod realization;
pub mod series;
pub mod tuple;
pub mod words;
pub mod expr;
pub mod tol;
pub mod spectral;
pub mod inner;
pub mod states;
pub mod certify;
pub mod sample;
pub mod json;
pub mod fixtures;

pub use error::{Error, Result};
pub use expr::compile;
pub use inner::CoisometryPair;
pub use realization::{DescriptorRealization, FmRealization};
pub use tol::Tolerances;
pub use tuple::MatrixTuple;
