use std::collections::BTreeMap;

use crate::poset::Poset;

use super::{SetSystem, SystemError, Thread, UniversalImages};

/// A horizon-truncated tower `X_0 <- X_1 <- … <- X_H`.
///
/// Level `n` is the poset element labelled `n` of the chain `0 < … < H`.
#[derive(Debug, Clone)]
pub struct Tower {
    system: SetSystem,
}

/// Whether the image chain at a level settles before the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlVerdict {
    /// The images `bond(n, m) X_m` are constant for `m >= from`.
    Stable { from: usize },
    /// The images were still shrinking at the last step before the horizon.
    UnstableAtHorizon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStability {
    pub level: usize,
    /// `bond(level, m)(X_m)` for `m = level..=H`, as carrier positions.
    pub images: Vec<Vec<usize>>,
    /// Least `m` from which the image chain is constant through `H`.
    pub settles_at: usize,
    pub verdict: MlVerdict,
    /// The chain only settled at the horizon itself, so a longer truncation
    /// could change the answer.
    pub horizon_sensitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlReport {
    pub horizon: usize,
    pub levels: Vec<LevelStability>,
}

impl MlReport {
    pub fn stable_everywhere(&self) -> bool {
        self.levels
            .iter()
            .all(|l| matches!(l.verdict, MlVerdict::Stable { .. }))
    }
}

impl Tower {
    /// `bonds[n]` maps positions of `carriers[n + 1]` to positions of `carriers[n]`.
    pub fn new(carriers: Vec<Vec<String>>, bonds: Vec<Vec<usize>>) -> Result<Tower, SystemError> {
        if carriers.is_empty() {
            return Err(SystemError::CarrierCount {
                expected: 1,
                found: 0,
            });
        }
        let horizon = carriers.len() - 1;
        if bonds.len() != horizon {
            return Err(SystemError::CarrierCount {
                expected: horizon,
                found: bonds.len(),
            });
        }
        let base = Poset::tower_chain(horizon);
        let bonds: BTreeMap<(usize, usize), Vec<usize>> = bonds
            .into_iter()
            .enumerate()
            .map(|(n, b)| ((n, n + 1), b))
            .collect();
        Ok(Tower {
            system: SetSystem::new(base, carriers, bonds)?,
        })
    }

    /// Tower whose levels are integers and whose bonds are given by a rule on
    /// integer labels. The rule's value must be present in the lower level.
    pub fn from_rule(
        levels: Vec<Vec<i64>>,
        rule: impl Fn(usize, i64) -> i64,
    ) -> Result<Tower, SystemError> {
        let carriers: Vec<Vec<String>> = levels
            .iter()
            .map(|l| l.iter().map(i64::to_string).collect())
            .collect();
        let mut bonds = Vec::new();
        for n in 0..levels.len().saturating_sub(1) {
            let mut table = Vec::with_capacity(levels[n + 1].len());
            for &x in &levels[n + 1] {
                let y = rule(n, x);
                let pos = levels[n].iter().position(|&v| v == y).ok_or_else(|| {
                    SystemError::NotFunction {
                        lower: n.to_string(),
                        upper: (n + 1).to_string(),
                        reason: format!("`{x}` maps to `{y}`, which is not in the target carrier"),
                    }
                })?;
                table.push(pos);
            }
            bonds.push(table);
        }
        Tower::new(carriers, bonds)
    }

    /// `{0..=top}` at every level with the clipped decrement `x ↦ max(x − 1, 0)`.
    pub fn clipped_decrement(top: i64, horizon: usize) -> Tower {
        Tower::from_rule(vec![(0..=top).collect(); horizon + 1], |_, x| {
            (x - 1).max(0)
        })
        .expect("clipped decrement stays inside {0..top}")
    }

    pub fn horizon(&self) -> usize {
        self.system.carriers().len() - 1
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn into_system(self) -> SetSystem {
        self.system
    }

    pub fn carrier(&self, n: usize) -> &[String] {
        self.system.carrier(n)
    }

    /// The first `horizon + 1` levels.
    pub fn truncate(&self, horizon: usize) -> Result<Tower, SystemError> {
        if horizon > self.horizon() {
            return Err(SystemError::HorizonTooLarge {
                requested: horizon,
                available: self.horizon(),
            });
        }
        let carriers = self.system.carriers()[..=horizon].to_vec();
        let bonds = (0..horizon)
            .map(|n| self.system.bond(n, n + 1).unwrap().to_vec())
            .collect();
        Tower::new(carriers, bonds)
    }

    /// Builds a thread upward from `start ∈ X_0` by choosing, at each level,
    /// the first preimage of the value below.
    ///
    /// Fails with `NotSurjective` at the first level where no preimage exists.
    pub fn lift_thread(&self, start: usize) -> Result<Thread, SystemError> {
        if self.system.carrier(0).is_empty() {
            return Err(SystemError::EmptyCarrier("0".into()));
        }
        let mut values = vec![start];
        for n in 0..self.horizon() {
            let bond = self.system.bond(n, n + 1).unwrap();
            let below = values[n];
            let pre = bond
                .iter()
                .position(|&y| y == below)
                .ok_or(SystemError::NotSurjective { level: n + 1 })?;
            values.push(pre);
        }
        Ok(Thread(values))
    }

    /// Tower form of `thread_from_top`: lift from the first value of `X_0`.
    pub fn thread_from_top(&self) -> Result<Thread, SystemError> {
        self.lift_thread(0)
    }

    /// Image chains `bond(n, m) X_m`, `m = n..=H`, and where they settle.
    pub fn ml_report(&self) -> MlReport {
        let h = self.horizon();
        let levels = (0..=h)
            .map(|n| {
                let images: Vec<Vec<usize>> = (n..=h)
                    .map(|m| {
                        let mut img: Vec<usize> = self.system.bond(n, m).unwrap().to_vec();
                        img.sort_unstable();
                        img.dedup();
                        img
                    })
                    .collect();
                let last = images.last().unwrap();
                let offset = images.iter().position(|img| img == last).unwrap();
                let settles_at = n + offset;
                let verdict = if settles_at == h && n < h {
                    MlVerdict::UnstableAtHorizon
                } else {
                    MlVerdict::Stable { from: settles_at }
                };
                LevelStability {
                    level: n,
                    images,
                    settles_at,
                    verdict,
                    horizon_sensitive: settles_at == h,
                }
            })
            .collect();
        MlReport { horizon: h, levels }
    }

    pub fn universal_images(&self) -> UniversalImages {
        self.system.universal_images()
    }

    pub fn is_surjective(&self) -> bool {
        self.system.is_surjective().surjective
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::DEFAULT_BUDGET;

    #[test]
    fn clipped_decrement_settles_four_steps_up() {
        let t = Tower::clipped_decrement(4, 10);
        let report = t.ml_report();
        let l0 = &report.levels[0];
        let sizes: Vec<usize> = l0.images.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![5, 4, 3, 2, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(l0.verdict, MlVerdict::Stable { from: 4 });
        for n in 0..=6 {
            assert_eq!(report.levels[n].settles_at, n + 4);
        }
        // the chain at level 7 needs 4 more steps than the horizon allows
        assert_eq!(report.levels[7].verdict, MlVerdict::UnstableAtHorizon);
    }

    #[test]
    fn identity_tower_is_immediately_stable() {
        let t = Tower::from_rule(vec![vec![0, 1, 2]; 6], |_, x| x).unwrap();
        let report = t.ml_report();
        for l in &report.levels {
            assert_eq!(l.verdict, MlVerdict::Stable { from: l.level });
        }
        assert!(report.stable_everywhere());
    }

    #[test]
    fn shrinking_tower_settles_only_at_horizon() {
        let h = 6usize;
        let levels: Vec<Vec<i64>> = (0..=h).map(|n| (0..=(h - n) as i64).collect()).collect();
        let t = Tower::from_rule(levels, |_, x| x).unwrap();
        let report = t.ml_report();
        for l in &report.levels[..h] {
            assert_eq!(l.settles_at, h);
            assert_eq!(l.verdict, MlVerdict::UnstableAtHorizon);
            assert!(l.horizon_sensitive);
        }
    }

    #[test]
    fn universal_images_of_clipped_tower() {
        let t = Tower::clipped_decrement(4, 10);
        let u = t.universal_images();
        for n in 0..=6 {
            assert_eq!(u.system.carrier(n), &["0".to_string()]);
        }
        assert!(u.all_restricted_surjective());
    }

    #[test]
    fn lifting_follows_preimages() {
        let t = Tower::clipped_decrement(3, 3);
        let thread = t.lift_thread(0).unwrap();
        assert_eq!(thread, Thread(vec![0, 0, 0, 0]));
        assert!(t
            .system()
            .limit_threads(DEFAULT_BUDGET)
            .unwrap()
            .contains(&thread));
    }

    #[test]
    fn lifting_stops_at_missing_preimage() {
        let t = Tower::from_rule(vec![vec![0, 1], vec![5]], |_, _| 1).unwrap();
        assert_eq!(
            t.lift_thread(0),
            Err(SystemError::NotSurjective { level: 1 })
        );
    }

    #[test]
    fn truncation() {
        let t = Tower::clipped_decrement(2, 5);
        assert_eq!(t.truncate(3).unwrap().horizon(), 3);
        assert!(t.truncate(9).is_err());
    }
}
