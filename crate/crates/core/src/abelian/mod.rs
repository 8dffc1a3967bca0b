//! Finitely generated abelian groups over the integers.
//!
//! A group is a presentation `Z^n / R` with relators as the rows of `R`;
//! homomorphisms are integer matrices acting on generator columns. Kernels,
//! images, cokernels and homology all reduce to lattice computations in some
//! `Z^n`, which in turn reduce to Smith normal form with tracked transforms.
//! Entries are arbitrary precision throughout.

mod group;
mod lattice;
mod matrix;
mod snf;

pub use group::{is_exact_at, AbHom, FgAbGroup, GroupInvariants};
pub use lattice::Lattice;
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, Smith};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbError {
    #[error("{what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix shape {found:?} does not match the expected {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("relator {relator} of the source is not sent into the target's relations")]
    NotWellDefined { relator: usize },
    #[error("target of the first map differs from the source of the second")]
    IncompatibleGroups,
    #[error("the composite of the two maps is nonzero")]
    CompositionNonzero,
}
