//! Inverse systems of finite sets: validation, limits, surjectivity,
//! Mittag-Leffler analysis of truncated towers and universal images.
//!
//! Over a finite poset the images `bond(i, j) X_j` always stabilize (at the
//! maximal elements above `i`), so the Mittag-Leffler condition only carries
//! information for towers, where it is reported per level together with a
//! flag telling whether the answer depends on the chosen horizon.

mod system;
mod tower;

pub use system::{
    SetSystem, SurjectivityReport, SystemMap, Thread, UniversalImages, DEFAULT_BUDGET,
};
pub use tower::{LevelStability, MlReport, MlVerdict, Tower};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("expected {expected} carriers, found {found}")]
    CarrierCount { expected: usize, found: usize },
    #[error("carrier of `{element}` lists `{value}` twice")]
    DuplicateValue { element: String, value: String },
    #[error("no bond declared for the cover {lower} < {upper}")]
    MissingBond { lower: String, upper: String },
    #[error("bond {upper} -> {lower} declared twice")]
    DuplicateBond { lower: String, upper: String },
    #[error("bond {upper} -> {lower} is not a function: {reason}")]
    NotFunction {
        lower: String,
        upper: String,
        reason: String,
    },
    #[error("bond {upper} -> {lower} is declared but {lower} < {upper} does not hold")]
    MapOnIncomparable { lower: String, upper: String },
    #[error("bonds are not functorial on {i} <= {j} <= {k}")]
    FunctorialityViolation { i: String, j: String, k: String },
    #[error("enumeration budget of {0} partial assignments exceeded")]
    BudgetExceeded(u64),
    #[error("the base poset has no maximum")]
    NoMaximum,
    #[error("carrier of `{0}` is empty")]
    EmptyCarrier(String),
    #[error("no preimage available at level {level}")]
    NotSurjective { level: usize },
    #[error("horizon {requested} exceeds the available {available}")]
    HorizonTooLarge { requested: usize, available: usize },
    #[error("systems are over different base posets")]
    BaseMismatch,
    #[error("level map does not commute with the bonds on {lower} <= {upper}")]
    NotCommuting { lower: String, upper: String },
    #[error("fiber over `{0}` is empty")]
    EmptyFiber(String),
    #[error("target bond {upper} -> {lower} is not injective")]
    SigmaNotInjective { lower: String, upper: String },
    #[error("the given family is not a thread of the target system")]
    NotAThread,
}
