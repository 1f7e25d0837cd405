//! Exact computations with noncommutative differential forms over
//! finite-dimensional algebras: the operators `d, b, b', κ, B`, Fedosov
//! products and truncated tensor algebras, X-complexes, Hodge-tower homology
//! (Hochschild, cyclic, de Rham), exact-sequence checks, and Chern character
//! cocycles of finite Fredholm modules.
//!
//! All arithmetic is over the Gaussian rationals ℚ(i); every identity is an
//! exact equality.

pub mod algebra;
pub mod chern;
pub mod error;
pub mod forms;
pub mod homology;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod tensor;
pub mod xcomplex;

pub use algebra::{AlgebraElement, BasedAlgebra, LinearMapT, SplitExtension};
pub use error::{Error, Result};
pub use forms::{FormVector, Monomial};
pub use linalg::{SparseMatrix, SparseVec};
pub use scalar::Scalar;
