use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::poset::Poset;

use super::SystemError;

/// Default cap on the number of partial assignments explored by
/// [`SetSystem::limit_threads`].
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// An inverse system of finite sets over a finite poset.
///
/// Carrier elements are opaque labels; internally values are addressed by
/// their position in the carrier. Bonds are declared on (at least) every
/// cover pair; composites for all `i <= j` are derived and checked for
/// path independence during validation.
#[derive(Debug, Clone)]
pub struct SetSystem {
    base: Poset,
    carriers: Vec<Vec<String>>,
    // bond (lower, upper) -> value map carrier(upper) -> carrier(lower)
    declared: BTreeMap<(usize, usize), Vec<usize>>,
    composites: HashMap<(usize, usize), Vec<usize>>,
}

/// A compatible family `x_i`, one value per base element, stored by position
/// in each carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Thread(pub Vec<usize>);

impl Thread {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn at(&self, i: usize) -> usize {
        self.0[i]
    }
}

/// Level-wise map between two systems over the same base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemMap {
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurjectivityReport {
    pub surjective: bool,
    /// First pair `(lower, upper)` whose bond misses part of `carrier(lower)`,
    /// in lexicographic index order.
    pub first_failure: Option<(usize, usize)>,
}

/// The subsystem of universal images together with per-bond surjectivity of
/// the restricted maps.
#[derive(Debug, Clone)]
pub struct UniversalImages {
    pub system: SetSystem,
    /// `((lower, upper), surjective)` for every strict pair.
    pub restricted: Vec<((usize, usize), bool)>,
}

impl UniversalImages {
    pub fn all_restricted_surjective(&self) -> bool {
        self.restricted.iter().all(|&(_, s)| s)
    }
}

impl SetSystem {
    /// Validates carriers and labelled bond declarations.
    ///
    /// `maps` holds `(upper, lower, pairs)` with `pairs` mapping labels of
    /// `carrier(upper)` to labels of `carrier(lower)`.
    pub fn from_labels(
        base: Poset,
        carriers: Vec<Vec<String>>,
        maps: Vec<(usize, usize, Vec<(String, String)>)>,
    ) -> Result<SetSystem, SystemError> {
        if carriers.len() != base.len() {
            return Err(SystemError::CarrierCount {
                expected: base.len(),
                found: carriers.len(),
            });
        }
        let lookup: Vec<HashMap<&str, usize>> = carriers
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut m = HashMap::new();
                for (k, v) in c.iter().enumerate() {
                    if m.insert(v.as_str(), k).is_some() {
                        return Err(SystemError::DuplicateValue {
                            element: base.label(i).to_string(),
                            value: v.clone(),
                        });
                    }
                }
                Ok(m)
            })
            .collect::<Result<_, _>>()?;
        let mut bonds = BTreeMap::new();
        for (upper, lower, pairs) in maps {
            let (lo, hi) = (base.label(lower).to_string(), base.label(upper).to_string());
            let mut table = vec![usize::MAX; carriers[upper].len()];
            for (src, dst) in pairs {
                let s =
                    *lookup[upper]
                        .get(src.as_str())
                        .ok_or_else(|| SystemError::NotFunction {
                            lower: lo.clone(),
                            upper: hi.clone(),
                            reason: format!("`{src}` is not in the source carrier"),
                        })?;
                let d =
                    *lookup[lower]
                        .get(dst.as_str())
                        .ok_or_else(|| SystemError::NotFunction {
                            lower: lo.clone(),
                            upper: hi.clone(),
                            reason: format!("`{dst}` is not in the target carrier"),
                        })?;
                if table[s] != usize::MAX {
                    return Err(SystemError::NotFunction {
                        lower: lo.clone(),
                        upper: hi.clone(),
                        reason: format!("`{src}` is mapped twice"),
                    });
                }
                table[s] = d;
            }
            if bonds.insert((lower, upper), table).is_some() {
                return Err(SystemError::DuplicateBond {
                    lower: lo,
                    upper: hi,
                });
            }
        }
        SetSystem::new(base, carriers, bonds)
    }

    /// Validates a system whose bonds are given by position:
    /// `bonds[(lower, upper)][x] = image of x`.
    pub fn new(
        base: Poset,
        carriers: Vec<Vec<String>>,
        bonds: BTreeMap<(usize, usize), Vec<usize>>,
    ) -> Result<SetSystem, SystemError> {
        if carriers.len() != base.len() {
            return Err(SystemError::CarrierCount {
                expected: base.len(),
                found: carriers.len(),
            });
        }
        let lbl = |i: usize| base.label(i).to_string();
        for (&(lo, hi), table) in &bonds {
            if lo >= base.len() || hi >= base.len() || !base.lt(lo, hi) {
                return Err(SystemError::MapOnIncomparable {
                    lower: if lo < base.len() {
                        lbl(lo)
                    } else {
                        format!("#{lo}")
                    },
                    upper: if hi < base.len() {
                        lbl(hi)
                    } else {
                        format!("#{hi}")
                    },
                });
            }
            if table.len() != carriers[hi].len() {
                return Err(SystemError::NotFunction {
                    lower: lbl(lo),
                    upper: lbl(hi),
                    reason: format!(
                        "defined on {} of {} source values",
                        table
                            .iter()
                            .filter(|&&v| v != usize::MAX)
                            .count()
                            .min(table.len()),
                        carriers[hi].len()
                    ),
                });
            }
            if let Some(pos) = table.iter().position(|&v| v == usize::MAX) {
                return Err(SystemError::NotFunction {
                    lower: lbl(lo),
                    upper: lbl(hi),
                    reason: format!("`{}` has no image", carriers[hi][pos]),
                });
            }
            if table.iter().any(|&v| v >= carriers[lo].len()) {
                return Err(SystemError::NotFunction {
                    lower: lbl(lo),
                    upper: lbl(hi),
                    reason: "image outside the target carrier".into(),
                });
            }
        }
        for &(lo, hi) in base.covers() {
            if !bonds.contains_key(&(lo, hi)) {
                return Err(SystemError::MissingBond {
                    lower: lbl(lo),
                    upper: lbl(hi),
                });
            }
        }

        // Composites, nearest-to-top first so comp(k, j) exists before comp(i, j).
        let order = base.linear_extension();
        let mut composites: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for i in 0..base.len() {
            composites.insert((i, i), (0..carriers[i].len()).collect());
        }
        for &j in &order {
            for &i in order.iter().rev() {
                if !base.lt(i, j) {
                    continue;
                }
                let mut value: Option<(usize, Vec<usize>)> = None;
                for (&(lo, k), decl) in bonds.range((i, 0)..(i + 1, 0)) {
                    debug_assert_eq!(lo, i);
                    if !base.leq(k, j) {
                        continue;
                    }
                    let upper = &composites[&(k, j)];
                    let cand: Vec<usize> = upper.iter().map(|&x| decl[x]).collect();
                    match &value {
                        None => value = Some((k, cand)),
                        Some((_, v)) if *v == cand => {}
                        Some((k0, _)) => {
                            let (a, b) = if base.leq(*k0, k) { (*k0, k) } else { (k, *k0) };
                            let mid = if a == i { b } else { a };
                            return Err(SystemError::FunctorialityViolation {
                                i: lbl(i),
                                j: lbl(mid),
                                k: lbl(j),
                            });
                        }
                    }
                }
                let (_, v) = value.expect("a strict pair always has a declared first step");
                composites.insert((i, j), v);
            }
        }
        let system = SetSystem {
            base,
            carriers,
            declared: bonds,
            composites,
        };
        system.check_triples()?;
        Ok(system)
    }

    /// Exhaustive `bond(i,j) ∘ bond(j,k) = bond(i,k)` over all triples.
    fn check_triples(&self) -> Result<(), SystemError> {
        let n = self.base.len();
        for i in 0..n {
            for j in 0..n {
                if !self.base.leq(i, j) {
                    continue;
                }
                for k in 0..n {
                    if !self.base.leq(j, k) {
                        continue;
                    }
                    let ij = &self.composites[&(i, j)];
                    let jk = &self.composites[&(j, k)];
                    let ik = &self.composites[&(i, k)];
                    if jk.iter().map(|&x| ij[x]).ne(ik.iter().copied()) {
                        return Err(SystemError::FunctorialityViolation {
                            i: self.base.label(i).to_string(),
                            j: self.base.label(j).to_string(),
                            k: self.base.label(k).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds a system from already-consistent composites (subsystems,
    /// fibers). Only cover bonds are kept as declarations.
    pub(crate) fn from_composites(
        base: Poset,
        carriers: Vec<Vec<String>>,
        composites: HashMap<(usize, usize), Vec<usize>>,
    ) -> SetSystem {
        let declared = base
            .covers()
            .iter()
            .map(|&(lo, hi)| ((lo, hi), composites[&(lo, hi)].clone()))
            .collect();
        SetSystem {
            base,
            carriers,
            declared,
            composites,
        }
    }

    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn carrier(&self, i: usize) -> &[String] {
        &self.carriers[i]
    }

    pub fn carriers(&self) -> &[Vec<String>] {
        &self.carriers
    }

    pub fn declared_bonds(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.declared
    }

    /// The composite bond `carrier(upper) -> carrier(lower)`; `None` unless `lower <= upper`.
    pub fn bond(&self, lower: usize, upper: usize) -> Option<&[usize]> {
        self.composites.get(&(lower, upper)).map(Vec::as_slice)
    }

    pub fn apply(&self, lower: usize, upper: usize, x: usize) -> usize {
        self.composites[&(lower, upper)][x]
    }

    pub fn value_index(&self, i: usize, label: &str) -> Option<usize> {
        self.carriers[i].iter().position(|v| v == label)
    }

    pub fn is_thread(&self, t: &Thread) -> bool {
        t.0.len() == self.base.len()
            && t.0
                .iter()
                .enumerate()
                .all(|(i, &x)| x < self.carriers[i].len())
            && self
                .base
                .order_pairs()
                .into_iter()
                .all(|(i, j)| self.apply(i, j, t.0[j]) == t.0[i])
    }

    /// Product of carrier sizes, saturating.
    pub fn product_size(&self) -> u128 {
        self.carriers
            .iter()
            .fold(1u128, |a, c| a.saturating_mul(c.len() as u128))
    }

    pub fn is_surjective(&self) -> SurjectivityReport {
        let n = self.base.len();
        for i in 0..n {
            for j in 0..n {
                if !self.base.lt(i, j) {
                    continue;
                }
                let mut hit = vec![false; self.carriers[i].len()];
                for &y in &self.composites[&(i, j)] {
                    hit[y] = true;
                }
                if hit.iter().any(|h| !h) {
                    return SurjectivityReport {
                        surjective: false,
                        first_failure: Some((i, j)),
                    };
                }
            }
        }
        SurjectivityReport {
            surjective: true,
            first_failure: None,
        }
    }

    /// Every thread of the system, in lexicographic order of value positions.
    ///
    /// Depth-first over a reverse linear extension: values at maximal elements
    /// are branched on, every other value is forced by an element above it and
    /// checked against the rest. `budget` bounds the number of partial
    /// assignments visited.
    pub fn limit_threads(&self, budget: u64) -> Result<Vec<Thread>, SystemError> {
        let n = self.base.len();
        let mut order = self.base.linear_extension();
        order.reverse();
        let above: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| self.base.lt(i, j)).collect())
            .collect();
        let mut assignment = vec![usize::MAX; n];
        let mut out = Vec::new();
        let mut visited = 0u64;
        self.extend(
            &order,
            0,
            &above,
            &mut assignment,
            &mut out,
            &mut visited,
            budget,
        )?;
        out.sort();
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        order: &[usize],
        depth: usize,
        above: &[Vec<usize>],
        assignment: &mut Vec<usize>,
        out: &mut Vec<Thread>,
        visited: &mut u64,
        budget: u64,
    ) -> Result<(), SystemError> {
        if depth == order.len() {
            out.push(Thread(assignment.clone()));
            return Ok(());
        }
        let i = order[depth];
        let candidates: Vec<usize> = match above[i].first() {
            None => (0..self.carriers[i].len()).collect(),
            Some(&j) => {
                let forced = self.apply(i, j, assignment[j]);
                if above[i]
                    .iter()
                    .all(|&k| self.apply(i, k, assignment[k]) == forced)
                {
                    vec![forced]
                } else {
                    Vec::new()
                }
            }
        };
        for x in candidates {
            *visited += 1;
            if *visited > budget {
                return Err(SystemError::BudgetExceeded(budget));
            }
            assignment[i] = x;
            self.extend(order, depth + 1, above, assignment, out, visited, budget)?;
        }
        assignment[i] = usize::MAX;
        Ok(())
    }

    /// The thread of images of the first value at the maximum. Surjectivity is
    /// not needed for this.
    pub fn thread_from_top(&self) -> Result<Thread, SystemError> {
        let top = self.base.maximum().ok_or(SystemError::NoMaximum)?;
        if self.carriers[top].is_empty() {
            return Err(SystemError::EmptyCarrier(self.base.label(top).to_string()));
        }
        Ok(self.thread_through(top, 0))
    }

    /// Thread of images of `carrier(top)[x]`; `top` must be the maximum.
    pub fn thread_through(&self, top: usize, x: usize) -> Thread {
        Thread(
            (0..self.base.len())
                .map(|i| self.apply(i, top, x))
                .collect(),
        )
    }

    /// `X'_i = ∩_{j >= i} bond(i,j)(X_j)` with the restricted bonds.
    ///
    /// Over a poset that is not directed these sets need not be closed under
    /// the bonds; values whose image leaves `X'_i` are then dropped until the
    /// family is closed. Threads only pass through surviving values, so the
    /// limit is unchanged. Over directed posets nothing is dropped.
    pub fn universal_images(&self) -> UniversalImages {
        let n = self.base.len();
        let mut keep: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                let mut keep = vec![true; self.carriers[i].len()];
                for j in self.base.up_set(i) {
                    let mut hit = vec![false; keep.len()];
                    for &y in &self.composites[&(i, j)] {
                        hit[y] = true;
                    }
                    for (k, h) in keep.iter_mut().zip(hit) {
                        *k &= h;
                    }
                }
                keep
            })
            .collect();
        let pairs: Vec<(usize, usize)> = self
            .base
            .order_pairs()
            .into_iter()
            .filter(|&(i, j)| i != j)
            .collect();
        let mut changed = true;
        while changed {
            changed = false;
            for &(i, j) in &pairs {
                for (x, &y) in self.composites[&(i, j)].iter().enumerate() {
                    if keep[j][x] && !keep[i][y] {
                        keep[j][x] = false;
                        changed = true;
                    }
                }
            }
        }
        self.restrict(&keep)
    }

    /// Restriction to subsets closed under the bonds, with surjectivity
    /// metadata on every strict pair.
    pub(crate) fn restrict(&self, keep: &[Vec<bool>]) -> UniversalImages {
        let n = self.base.len();
        // old position -> new position
        let renum: Vec<Vec<usize>> = keep
            .iter()
            .map(|k| {
                let mut next = 0;
                k.iter()
                    .map(|&b| {
                        if b {
                            next += 1;
                            next - 1
                        } else {
                            usize::MAX
                        }
                    })
                    .collect()
            })
            .collect();
        let carriers: Vec<Vec<String>> = (0..n)
            .map(|i| {
                self.carriers[i]
                    .iter()
                    .zip(&keep[i])
                    .filter(|(_, &k)| k)
                    .map(|(v, _)| v.clone())
                    .collect()
            })
            .collect();
        let mut composites = HashMap::new();
        let mut restricted = Vec::new();
        for (i, j) in self.base.order_pairs() {
            let table: Vec<usize> = self.composites[&(i, j)]
                .iter()
                .enumerate()
                .filter(|&(x, _)| keep[j][x])
                .map(|(_, &y)| {
                    debug_assert!(keep[i][y], "restriction must be closed under bonds");
                    renum[i][y]
                })
                .collect();
            if i != j {
                let mut hit = vec![false; carriers[i].len()];
                for &y in &table {
                    hit[y] = true;
                }
                restricted.push(((i, j), hit.into_iter().all(|h| h)));
            }
            composites.insert((i, j), table);
        }
        UniversalImages {
            system: SetSystem::from_composites(self.base.clone(), carriers, composites),
            restricted,
        }
    }

    /// `E'_α = g_α⁻¹(s_α)` with the restricted bonds of `self`.
    ///
    /// `self` plays the role of the source system, `target` must have
    /// injective bonds, `map` must commute with the bonds and be level-wise
    /// onto, and `s` must be a thread of `target`. The result is a surjective
    /// system of non-empty sets whenever `self` is surjective.
    pub fn fiber_subsystem(
        &self,
        target: &SetSystem,
        map: &SystemMap,
        s: &Thread,
    ) -> Result<SetSystem, SystemError> {
        let n = self.base.len();
        if target.base != self.base {
            return Err(SystemError::BaseMismatch);
        }
        let lbl = |i: usize| self.base.label(i).to_string();
        if map.components.len() != n {
            return Err(SystemError::BaseMismatch);
        }
        for i in 0..n {
            let g = &map.components[i];
            if g.len() != self.carriers[i].len() || g.iter().any(|&y| y >= target.carriers[i].len())
            {
                return Err(SystemError::NotFunction {
                    lower: lbl(i),
                    upper: lbl(i),
                    reason: "level map does not match the carriers".into(),
                });
            }
        }
        for (i, j) in self.base.order_pairs() {
            if i == j {
                continue;
            }
            let sigma = &target.composites[&(i, j)];
            let mut seen = vec![false; target.carriers[i].len()];
            for &y in sigma {
                if std::mem::replace(&mut seen[y], true) {
                    return Err(SystemError::SigmaNotInjective {
                        lower: lbl(i),
                        upper: lbl(j),
                    });
                }
            }
            let eps = &self.composites[&(i, j)];
            for x in 0..self.carriers[j].len() {
                if map.components[i][eps[x]] != sigma[map.components[j][x]] {
                    return Err(SystemError::NotCommuting {
                        lower: lbl(i),
                        upper: lbl(j),
                    });
                }
            }
        }
        if !target.is_thread(s) {
            return Err(SystemError::NotAThread);
        }
        let keep: Vec<Vec<bool>> = (0..n)
            .map(|i| map.components[i].iter().map(|&y| y == s.0[i]).collect())
            .collect();
        if let Some(i) = keep.iter().position(|k| !k.iter().any(|&b| b)) {
            return Err(SystemError::EmptyFiber(lbl(i)));
        }
        Ok(self.restrict(&keep).system)
    }

    /// Renders a thread as `label=value` pairs.
    pub fn describe_thread(&self, t: &Thread) -> String {
        t.0.iter()
            .enumerate()
            .map(|(i, &x)| format!("{}={}", self.base.label(i), self.carriers[i][x]))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.carriers.iter().enumerate() {
            writeln!(f, "{}: {{ {} }}", self.base.label(i), c.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn constant01(n: usize) -> SetSystem {
        let base = Poset::chain(n);
        let carriers = vec![labels(&["0", "1"]); n];
        let bonds = base.covers().iter().map(|&c| (c, vec![0, 1])).collect();
        SetSystem::new(base, carriers, bonds).unwrap()
    }

    fn wedge_star() -> SetSystem {
        // a, b carry {*}; c carries {0,1}; both bonds send * to 0
        let base = Poset::wedge();
        let carriers = vec![labels(&["*"]), labels(&["*"]), labels(&["0", "1"])];
        let mut bonds = BTreeMap::new();
        bonds.insert((2, 0), vec![0]);
        bonds.insert((2, 1), vec![0]);
        SetSystem::new(base, carriers, bonds).unwrap()
    }

    #[test]
    fn constant_identity_system_is_valid_and_surjective() {
        let s = constant01(3);
        assert_eq!(s.bond(0, 2), Some(&[0, 1][..]));
        assert!(s.is_surjective().surjective);
        assert_eq!(s.limit_threads(DEFAULT_BUDGET).unwrap().len(), 2);
    }

    #[test]
    fn missing_bond_is_reported() {
        let base = Poset::wedge();
        let carriers = vec![labels(&["*"]), labels(&["*"]), labels(&["0"])];
        let mut bonds = BTreeMap::new();
        bonds.insert((2, 1), vec![0]);
        let err = SetSystem::new(base, carriers, bonds).unwrap_err();
        assert_eq!(
            err,
            SystemError::MissingBond {
                lower: "c".into(),
                upper: "a".into()
            }
        );
    }

    #[test]
    fn perturbed_composite_violates_functoriality() {
        let base = Poset::chain(3);
        let carriers = vec![labels(&["0", "1"]); 3];
        let mut bonds = BTreeMap::new();
        bonds.insert((0, 1), vec![0, 1]);
        bonds.insert((1, 2), vec![0, 1]);
        bonds.insert((0, 2), vec![1, 1]);
        let err = SetSystem::new(base, carriers, bonds).unwrap_err();
        assert!(
            matches!(err, SystemError::FunctorialityViolation { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn not_a_function() {
        let base = Poset::chain(2);
        let carriers = vec![labels(&["x"]), labels(&["y0", "y1"])];
        let err = SetSystem::from_labels(
            base,
            carriers,
            vec![(1, 0, vec![("y0".into(), "x".into())])],
        )
        .unwrap_err();
        assert!(matches!(err, SystemError::NotFunction { .. }));
    }

    #[test]
    fn non_surjective_pair_is_located() {
        let base = Poset::chain(2);
        let carriers = vec![labels(&["0", "1"]), labels(&["0"])];
        let mut bonds = BTreeMap::new();
        bonds.insert((0, 1), vec![0]);
        let s = SetSystem::new(base, carriers, bonds).unwrap();
        assert_eq!(
            s.is_surjective(),
            SurjectivityReport {
                surjective: false,
                first_failure: Some((0, 1))
            }
        );
    }

    #[test]
    fn wedge_limit_has_one_thread() {
        let s = wedge_star();
        let threads = s.limit_threads(DEFAULT_BUDGET).unwrap();
        assert_eq!(threads, vec![Thread(vec![0, 0, 0])]);
        assert_eq!(s.describe_thread(&threads[0]), "a=* b=* c=0");
        assert_eq!(s.thread_from_top(), Err(SystemError::NoMaximum));
    }

    #[test]
    fn budget_is_enforced() {
        let base = Poset::new(&["a", "b", "c", "d"], &[]).unwrap();
        let carriers = vec![labels(&["0", "1"]); 4];
        let s = SetSystem::new(base, carriers, BTreeMap::new()).unwrap();
        assert_eq!(s.limit_threads(DEFAULT_BUDGET).unwrap().len(), 16);
        assert_eq!(s.limit_threads(5), Err(SystemError::BudgetExceeded(5)));
    }

    #[test]
    fn thread_from_top_without_surjectivity() {
        let base = Poset::chain(2);
        let carriers = vec![labels(&["p", "q"]), labels(&["r"])];
        let mut bonds = BTreeMap::new();
        bonds.insert((0, 1), vec![1]);
        let s = SetSystem::new(base, carriers, bonds).unwrap();
        let t = s.thread_from_top().unwrap();
        assert_eq!(t, Thread(vec![1, 0]));
        assert!(s.limit_threads(DEFAULT_BUDGET).unwrap().contains(&t));
    }

    #[test]
    fn universal_images_of_surjective_system_are_unchanged() {
        let s = constant01(3);
        let u = s.universal_images();
        assert_eq!(u.system.carriers(), s.carriers());
        assert!(u.all_restricted_surjective());
    }

    #[test]
    fn fiber_of_identity_is_singletons() {
        let e = constant01(3);
        let map = SystemMap {
            components: vec![vec![0, 1]; 3],
        };
        let fiber = e.fiber_subsystem(&e, &map, &Thread(vec![1, 1, 1])).unwrap();
        assert!(fiber.carriers().iter().all(|c| c == &labels(&["1"])));
        assert!(fiber.is_surjective().surjective);
    }

    #[test]
    fn fiber_of_collapse_is_everything() {
        let e = constant01(3);
        let base = Poset::chain(3);
        let s_sys = SetSystem::new(
            base.clone(),
            vec![labels(&["*"]); 3],
            base.covers().iter().map(|&c| (c, vec![0])).collect(),
        )
        .unwrap();
        let map = SystemMap {
            components: vec![vec![0, 0]; 3],
        };
        let fiber = e
            .fiber_subsystem(&s_sys, &map, &Thread(vec![0, 0, 0]))
            .unwrap();
        assert_eq!(fiber.carriers(), e.carriers());
    }

    #[test]
    fn fiber_rejects_non_injective_sigma_and_empty_fibers() {
        let e = constant01(2);
        let map = SystemMap {
            components: vec![vec![0, 1]; 2],
        };
        let base = Poset::chain(2);
        let collapse = SetSystem::new(
            base.clone(),
            vec![labels(&["0", "1"]); 2],
            base.covers().iter().map(|&c| (c, vec![0, 0])).collect(),
        )
        .unwrap();
        assert!(matches!(
            e.fiber_subsystem(&collapse, &map, &Thread(vec![0, 0])),
            Err(SystemError::SigmaNotInjective { .. })
        ));
        let partial = SystemMap {
            components: vec![vec![0, 0]; 2],
        };
        assert!(matches!(
            e.fiber_subsystem(&e, &partial, &Thread(vec![1, 1])),
            Err(SystemError::EmptyFiber(_))
        ));
        let skew = SystemMap {
            components: vec![vec![0, 1], vec![1, 0]],
        };
        assert!(matches!(
            e.fiber_subsystem(&e, &skew, &Thread(vec![0, 0])),
            Err(SystemError::NotCommuting { .. })
        ));
    }
}
