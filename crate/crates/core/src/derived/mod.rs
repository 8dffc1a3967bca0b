//! Derived limits of inverse systems of finitely generated abelian groups.
//!
//! `lim^(n)` is computed as the cohomology of the normalized nerve complex:
//! cochains live on strictly increasing flags `i0 < … < i_n`, so the complex
//! stops at the length of the longest chain in the base.

mod exactness;
mod nerve;
pub mod random;
mod system;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::abelian::{AbError, FgAbGroup};
use crate::poset::Poset;

pub use exactness::{limit_exactness_check, ExactnessReport, ShortExactSequence};
pub use nerve::{
    derived_limit, limit_elements, nerve_complex, CochainComplex, DEFAULT_FLAG_BUDGET,
};
pub use system::AbSystem;

#[derive(Debug, Error)]
pub enum DerivedError {
    #[error("expected {expected} entries, one per element, found {found}")]
    GroupCount { expected: usize, found: usize },
    #[error("no bond declared for the cover {lower} < {upper}")]
    MissingBond { lower: String, upper: String },
    #[error("bond declared between {lower} and {upper}, which are not strictly ordered")]
    MapOnIncomparable { lower: String, upper: String },
    #[error("bond {upper} -> {lower}: {source}")]
    InvalidBond {
        lower: String,
        upper: String,
        #[source]
        source: AbError,
    },
    #[error("bonds are not functorial on {i} <= {j} <= {k}")]
    FunctorialityViolation { i: String, j: String, k: String },
    #[error("nerve has more than {0} flags")]
    BudgetExceeded(u64),
    #[error("systems live over different posets")]
    BaseMismatch,
    #[error("sequence is not exact at {element}: {reason}")]
    NotLevelwiseExact { element: String, reason: String },
    #[error("square over {lower} <= {upper} does not commute")]
    SquaresDoNotCommute { lower: String, upper: String },
}

/// Result of [`scd_finite`]: a sampled lower bound for the surjective
/// cohomological dimension of a finite poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScdEstimate {
    /// Largest `n` with `lim^(n) ≠ 0` seen on any trial (0 if none).
    pub degree: usize,
    pub trials: usize,
    /// Trial index that first reached `degree`, if positive.
    pub witness_trial: Option<usize>,
}

/// Largest `n >= 1` with `H^n ≠ 0` for one system, or 0.
fn top_nonvanishing(s: &AbSystem, budget: u64) -> Result<usize, DerivedError> {
    let cx = nerve_complex(s, budget)?;
    Ok((1..=cx.top_degree())
        .rev()
        .find(|&n| !cx.cohomology(n).is_trivial())
        .unwrap_or(0))
}

/// Samples `trials` surjective systems over `base` and reports the largest
/// degree with a nonvanishing derived limit.
///
/// Trial 0 is always the constant system `Z`; the rest are drawn from
/// [`random::random_surjective_system`] seeded by `seed`. Trials are
/// independent and the result is their maximum.
pub fn scd_finite(
    base: &Poset,
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<ScdEstimate, DerivedError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = ScdEstimate {
        degree: 0,
        trials,
        witness_trial: None,
    };
    for t in 0..trials {
        let s = if t == 0 {
            AbSystem::constant(base.clone(), FgAbGroup::free(1))
        } else {
            random::random_surjective_system(&mut rng, base, random::GroupShape::default())
        };
        let d = top_nonvanishing(&s, budget)?;
        if d > best.degree {
            best.degree = d;
            best.witness_trial = Some(t);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scd_of_directed_posets_is_zero() {
        assert_eq!(
            scd_finite(&Poset::chain(4), 20, 0, DEFAULT_FLAG_BUDGET)
                .unwrap()
                .degree,
            0
        );
        assert_eq!(
            scd_finite(&Poset::singleton("x"), 5, 0, DEFAULT_FLAG_BUDGET)
                .unwrap()
                .degree,
            0
        );
    }

    #[test]
    fn random_instances_behave() {
        use crate::random::{random_poset, random_poset_with_maximum};
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let p = random_poset_with_maximum(&mut rng, 5, 0.3);
            let s = random::random_surjective_system(&mut rng, &p, random::GroupShape::default());
            assert_eq!(top_nonvanishing(&s, DEFAULT_FLAG_BUDGET).unwrap(), 0);
            let seq = random::random_exact_sequence(&mut rng, &p, random::GroupShape::default());
            let r = limit_exactness_check(&seq, DEFAULT_FLAG_BUDGET).unwrap();
            assert!(r.passes() && r.lim_v_surjective, "{r:?}");
            let q = random_poset(&mut rng, 5, 0.4);
            let seq = random::random_exact_sequence(&mut rng, &q, random::GroupShape::default());
            assert!(
                limit_exactness_check(&seq, DEFAULT_FLAG_BUDGET)
                    .unwrap()
                    .connecting_exact
            );
        }
    }

    #[test]
    fn scd_of_wedge_and_crown() {
        // surjective systems over the wedge have vanishing lim^1
        assert_eq!(
            scd_finite(&Poset::wedge(), 30, 1, DEFAULT_FLAG_BUDGET)
                .unwrap()
                .degree,
            0
        );
        let crown = scd_finite(&Poset::crown(), 5, 1, DEFAULT_FLAG_BUDGET).unwrap();
        assert_eq!(crown.degree, 1);
        assert_eq!(crown.witness_trial, Some(0));
    }
}
