//! Exact computation of tree-indexed Banach space norms.
//!
//! Vectors are finitely supported rational functions on a finite tree of finite
//! sequences of naturals. The crate evaluates `ℓ_p`-Baire sums of a base norm, a
//! tree-parametrized Tsirelson norm, the ground norm and bounded searches in the
//! norming set built from it. Irrational values come as certified intervals.

pub mod baire;
pub mod cli;
pub mod error;
mod exact;
pub mod hi;
pub mod io;
pub mod sequence;
pub mod tree;
pub mod tsirelson;
pub mod verify;
pub mod vector;

pub use error::{Error, Result};
pub use tree::{FiniteTree, Segment, TreeNode};
pub use vector::{BaseNorm, NormValue, Rational, TreeVector};
