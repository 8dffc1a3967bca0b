//! The even-tuple system `E_α` and its maps `ε_αβ`.
//!
//! A tuple `(t1, …, t2n)` of poset elements lies in `E_α` when its
//! second-to-last entry is `α`, every odd entry is at most the entry after
//! it, and no odd entry is below an earlier odd entry. Tuples are stored as
//! element indices; positions below are 1-based as in the definitions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poset::Poset;
use crate::sets::SetSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HenkinError {
    #[error("tuple has odd length {0}")]
    OddLength(usize),
    #[error("tuple {tuple} is not in E_{level}")]
    NotMember { tuple: String, level: String },
    #[error("{lower} is not below {upper}")]
    NotComparable { lower: String, upper: String },
    #[error("{0} has no strict upper bound in this poset")]
    NoStrictUpper(String),
    #[error("family is not compatible at {lower} <= {upper}")]
    NotCompatible { lower: String, upper: String },
    #[error("family has {found} tuples for {expected} elements")]
    FamilySize { expected: usize, found: usize },
}

/// A member of some `E_α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HenkinTuple {
    entries: Vec<usize>,
}

impl HenkinTuple {
    /// Wraps `entries` after checking membership in `E_level`.
    pub fn new(p: &Poset, entries: Vec<usize>, level: usize) -> Result<HenkinTuple, HenkinError> {
        if henkin_member(p, &entries, level)? {
            Ok(HenkinTuple { entries })
        } else {
            Err(not_member(p, &entries, level))
        }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// The element `α` with `t ∈ E_α`: the second-to-last entry.
    pub fn level(&self) -> usize {
        self.entries[self.entries.len() - 2]
    }

    /// The last entry.
    pub fn ending(&self) -> usize {
        *self.entries.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn display(&self, p: &Poset) -> String {
        format_tuple(p, &self.entries)
    }
}

pub fn format_tuple(p: &Poset, t: &[usize]) -> String {
    let parts: Vec<&str> = t.iter().map(|&i| p.label(i)).collect();
    format!("({})", parts.join(","))
}

fn not_member(p: &Poset, t: &[usize], level: usize) -> HenkinError {
    HenkinError::NotMember {
        tuple: format_tuple(p, t),
        level: p.label(level).to_string(),
    }
}

fn not_below(p: &Poset, lower: usize, upper: usize) -> HenkinError {
    HenkinError::NotComparable {
        lower: p.label(lower).to_string(),
        upper: p.label(upper).to_string(),
    }
}

/// Membership of `t` in `E_level`. The empty tuple belongs to no `E_α`.
pub fn henkin_member(p: &Poset, t: &[usize], level: usize) -> Result<bool, HenkinError> {
    if t.len() % 2 == 1 {
        return Err(HenkinError::OddLength(t.len()));
    }
    if t.is_empty() || t.iter().any(|&x| x >= p.len()) {
        return Ok(false);
    }
    let n = t.len() / 2;
    let odd = |i: usize| t[2 * i - 2];
    let even = |i: usize| t[2 * i - 1];
    // (1)
    if odd(n) != level {
        return Ok(false);
    }
    // (2)
    if !(1..=n).all(|i| p.leq(odd(i), even(i))) {
        return Ok(false);
    }
    // (3)
    Ok((1..=n).all(|i| (1..i).all(|j| !p.leq(odd(i), odd(j)))))
}

/// `ε_αβ(t)` for `t ∈ E_β`: cut `t` at the first odd entry above `α`, put
/// `α` in its place and keep the entry after it.
pub fn henkin_eps(
    p: &Poset,
    alpha: usize,
    beta: usize,
    t: &[usize],
) -> Result<Vec<usize>, HenkinError> {
    if !p.leq(alpha, beta) {
        return Err(not_below(p, alpha, beta));
    }
    if !henkin_member(p, t, beta)? {
        return Err(not_member(p, t, beta));
    }
    let j = (1..=t.len() / 2)
        .find(|&j| p.leq(alpha, t[2 * j - 2]))
        .expect("the last odd entry is beta");
    let mut out = t[..2 * j - 2].to_vec();
    out.push(alpha);
    out.push(t[2 * j - 1]);
    debug_assert!(henkin_member(p, &out, alpha).unwrap());
    Ok(out)
}

/// A preimage of `x ∈ E_α` under `ε_αβ`: `x` followed by `(β, γ)`.
///
/// With `β = α` this is `x` itself. Otherwise `γ` must lie strictly above
/// `β`; when `gamma` is `None` the first strict upper bound in label order
/// is used, and a `β` without one is reported as [`HenkinError::NoStrictUpper`].
pub fn henkin_lift(
    p: &Poset,
    alpha: usize,
    x: &[usize],
    beta: usize,
    gamma: Option<usize>,
) -> Result<Vec<usize>, HenkinError> {
    if !p.leq(alpha, beta) {
        return Err(not_below(p, alpha, beta));
    }
    if !henkin_member(p, x, alpha)? {
        return Err(not_member(p, x, alpha));
    }
    if alpha == beta {
        return Ok(x.to_vec());
    }
    let gamma = match gamma {
        Some(g) if p.lt(beta, g) => g,
        Some(g) => return Err(not_below(p, beta, g)),
        None => *p
            .strict_upper_bounds(beta)
            .first()
            .ok_or_else(|| HenkinError::NoStrictUpper(p.label(beta).to_string()))?,
    };
    let mut y = x.to_vec();
    y.push(beta);
    y.push(gamma);
    // β is not below any earlier odd entry, else α < β would break (3) for x
    assert!(henkin_member(p, &y, beta).unwrap(), "lift left E_beta");
    assert_eq!(
        henkin_eps(p, alpha, beta, &y).unwrap(),
        x,
        "lift is not a preimage"
    );
    Ok(y)
}

/// All members of `E_level` of length at most `max_len`, in lexicographic
/// order of their entries.
pub fn henkin_enumerate(p: &Poset, level: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(p: &Poset, level: usize, pairs: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() && cur[cur.len() - 2] == level {
            out.push(cur.clone());
        }
        if cur.len() / 2 == pairs {
            return;
        }
        for a in 0..p.len() {
            if (0..cur.len()).step_by(2).any(|k| p.leq(a, cur[k])) {
                continue;
            }
            for b in 0..p.len() {
                if p.leq(a, b) {
                    cur.push(a);
                    cur.push(b);
                    rec(p, level, pairs, cur, out);
                    cur.truncate(cur.len() - 2);
                }
            }
        }
    }
    rec(p, level, max_len / 2, &mut cur, &mut out);
    out.sort();
    out
}

/// The system `E_α` restricted to tuples of length at most `max_len`, with
/// values labelled by their tuples. `ε` never lengthens a tuple, so the
/// restriction is again an inverse system.
pub fn henkin_system(p: &Poset, max_len: usize) -> SetSystem {
    let members: Vec<Vec<Vec<usize>>> = (0..p.len())
        .map(|a| henkin_enumerate(p, a, max_len))
        .collect();
    let carriers = members
        .iter()
        .map(|ms| ms.iter().map(|t| format_tuple(p, t)).collect())
        .collect();
    let mut bonds = BTreeMap::new();
    for &(lo, hi) in p.covers() {
        let index: BTreeMap<&Vec<usize>, usize> = members[lo]
            .iter()
            .enumerate()
            .map(|(k, t)| (t, k))
            .collect();
        let table = members[hi]
            .iter()
            .map(|t| index[&henkin_eps(p, lo, hi, t).expect("members of E_hi")])
            .collect();
        bonds.insert((lo, hi), table);
    }
    SetSystem::new(p.clone(), carriers, bonds).expect("eps is functorial")
}

/// Checks that `family[α] ∈ E_α` for all `α` and that `ε_αβ(family[β]) =
/// family[α]` for all `α <= β`; returns the sorted distinct ending
/// coordinates, which dominate every element.
pub fn cofinal_extract(p: &Poset, family: &[Vec<usize>]) -> Result<Vec<usize>, HenkinError> {
    if family.len() != p.len() {
        return Err(HenkinError::FamilySize {
            expected: p.len(),
            found: family.len(),
        });
    }
    for (a, t) in family.iter().enumerate() {
        if !henkin_member(p, t, a)? {
            return Err(not_member(p, t, a));
        }
    }
    for (a, b) in p.order_pairs() {
        if henkin_eps(p, a, b, &family[b])? != family[a] {
            return Err(HenkinError::NotCompatible {
                lower: p.label(a).to_string(),
                upper: p.label(b).to_string(),
            });
        }
    }
    let mut ends: Vec<usize> = family.iter().map(|t| *t.last().unwrap()).collect();
    ends.sort_unstable();
    ends.dedup();
    assert!(
        (0..p.len()).all(|a| ends.iter().any(|&e| p.leq(a, e))),
        "ending coordinates are not cofinal"
    );
    Ok(ends)
}

/// Two members of a family with equal length but different levels, if any.
pub fn same_length_level_violation(family: &[Vec<usize>]) -> Option<(usize, usize)> {
    first_pair(family, |s, t| s.len() == t.len(), |a, b, _, _| a != b)
}

/// Two members of a family with equal length but different ending
/// coordinates, if any.
pub fn same_length_ending_violation(family: &[Vec<usize>]) -> Option<(usize, usize)> {
    first_pair(
        family,
        |s, t| s.len() == t.len(),
        |_, _, s, t| s.last() != t.last(),
    )
}

fn first_pair(
    family: &[Vec<usize>],
    when: impl Fn(&[usize], &[usize]) -> bool,
    bad: impl Fn(usize, usize, &[usize], &[usize]) -> bool,
) -> Option<(usize, usize)> {
    for a in 0..family.len() {
        for b in a + 1..family.len() {
            if when(&family[a], &family[b]) && bad(a, b, &family[a], &family[b]) {
                return Some((a, b));
            }
        }
    }
    None
}

/// The compatible family determined by `top ∈ E_max`: `e_α = ε_α,max(top)`.
pub fn family_from_top(p: &Poset, top: &[usize]) -> Result<Vec<Vec<usize>>, HenkinError> {
    let m = p
        .maximum()
        .ok_or_else(|| HenkinError::NoStrictUpper("(no maximum)".into()))?;
    (0..p.len()).map(|a| henkin_eps(p, a, m, top)).collect()
}

/// A compatible family built by lifting `x ∈ E_start` along a longest chain
/// from `start` to the maximum: each step appends `(c_k, c_{k+1})`, and the
/// maximum closes with the pair `(max, max)`, the only choice in a
/// truncation. The rest of the family is read off from the top tuple.
pub fn family_by_lifting(
    p: &Poset,
    start: usize,
    x: &[usize],
) -> Result<Vec<Vec<usize>>, HenkinError> {
    let m = p
        .maximum()
        .ok_or_else(|| HenkinError::NoStrictUpper("(no maximum)".into()))?;
    if !p.leq(start, m) {
        return Err(not_below(p, start, m));
    }
    // greedy chain start = c0 < c1 < … < ck = m through covers
    let mut chain = vec![start];
    while *chain.last().unwrap() != m {
        let cur = *chain.last().unwrap();
        let next = p
            .covers()
            .iter()
            .filter(|&&(lo, hi)| lo == cur && p.leq(hi, m))
            .map(|&(_, hi)| hi)
            .next()
            .expect("a non-maximum element below the maximum has an upper cover");
        chain.push(next);
    }
    let mut t = x.to_vec();
    for w in chain.windows(3) {
        t = henkin_lift(p, w[0], &t, w[1], Some(w[2]))?;
    }
    if chain.len() >= 2 {
        // the maximum has no strict upper bound; close with (max, max)
        let a = chain[chain.len() - 2];
        let mut y = t.clone();
        y.extend([m, m]);
        if !henkin_member(p, &y, m)? || henkin_eps(p, a, m, &y)? != t {
            return Err(not_member(p, &y, m));
        }
        t = y;
    }
    let family = family_from_top(p, &t)?;
    if family[start] != x {
        return Err(HenkinError::NotCompatible {
            lower: p.label(start).to_string(),
            upper: p.label(m).to_string(),
        });
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(p: &Poset, labels: &[&str]) -> Vec<usize> {
        labels.iter().map(|l| p.index_of(l).unwrap()).collect()
    }

    #[test]
    fn membership_examples() {
        let p = Poset::chain(3);
        let t = ix(&p, &["2", "3"]);
        assert!(henkin_member(&p, &t, 1).unwrap());
        assert!(!henkin_member(&p, &t, 0).unwrap());
        assert!(henkin_member(&p, &[1, 1], 1).unwrap());
        assert!(!henkin_member(&p, &ix(&p, &["1", "2", "1", "3"]), 0).unwrap());
        assert_eq!(
            henkin_member(&p, &[0, 1, 2], 0),
            Err(HenkinError::OddLength(3))
        );
        assert!(!henkin_member(&p, &[], 0).unwrap());
    }

    #[test]
    fn eps_examples() {
        let p = Poset::chain(3);
        assert_eq!(henkin_eps(&p, 0, 1, &[1, 2]).unwrap(), vec![0, 2]);
        assert_eq!(henkin_eps(&p, 1, 1, &[1, 2]).unwrap(), vec![1, 2]);
        let lhs = henkin_eps(&p, 0, 1, &henkin_eps(&p, 1, 2, &[2, 2]).unwrap()).unwrap();
        assert_eq!(lhs, henkin_eps(&p, 0, 2, &[2, 2]).unwrap());
        assert_eq!(lhs, vec![0, 2]);
        assert!(matches!(
            henkin_eps(&p, 2, 1, &[1, 2]),
            Err(HenkinError::NotComparable { .. })
        ));
        assert!(matches!(
            henkin_eps(&p, 0, 1, &[0, 2]),
            Err(HenkinError::NotMember { .. })
        ));
    }

    #[test]
    fn lift_examples() {
        let p = Poset::chain(3);
        let y = henkin_lift(&p, 0, &[0, 0], 1, Some(2)).unwrap();
        assert_eq!(y, vec![0, 0, 1, 2]);
        assert_eq!(henkin_eps(&p, 0, 1, &y).unwrap(), vec![0, 0]);
        assert_eq!(henkin_lift(&p, 1, &[1, 1], 1, Some(2)).unwrap(), vec![1, 1]);
        // the naive extension (α,α,α,γ) is not a member
        assert!(!henkin_member(&p, &[1, 1, 1, 2], 1).unwrap());
        assert_eq!(
            henkin_lift(&p, 0, &[0, 2], 2, None),
            Err(HenkinError::NoStrictUpper("3".into()))
        );
    }

    #[test]
    fn enumeration_matches_filter() {
        let p = Poset::grid(2, 2);
        for a in 0..p.len() {
            let got = henkin_enumerate(&p, a, 4);
            let mut brute = Vec::new();
            for len in [2usize, 4] {
                let total = p.len().pow(len as u32);
                for code in 0..total {
                    let t: Vec<usize> = (0..len)
                        .map(|k| code / p.len().pow(k as u32) % p.len())
                        .collect();
                    if henkin_member(&p, &t, a).unwrap() {
                        brute.push(t);
                    }
                }
            }
            brute.sort();
            assert_eq!(got, brute);
        }
    }

    #[test]
    fn family_by_lifting_over_chain() {
        let p = Poset::chain(3);
        let fam = family_by_lifting(&p, 0, &[0, 0]).unwrap();
        assert_eq!(fam[0], vec![0, 0]);
        assert_eq!(fam[1], vec![0, 0, 1, 2]);
        assert_eq!(fam[2], vec![0, 0, 1, 2, 2, 2]);
        assert_eq!(cofinal_extract(&p, &fam).unwrap(), vec![0, 2]);
        assert_eq!(same_length_level_violation(&fam), None);
    }

    #[test]
    fn equal_lengths_can_have_different_levels() {
        let p = Poset::chain(3);
        let fam = family_from_top(&p, &[2, 2]).unwrap();
        assert_eq!(fam, vec![vec![0, 2], vec![1, 2], vec![2, 2]]);
        assert!(cofinal_extract(&p, &fam).is_ok());
        assert_eq!(same_length_level_violation(&fam), Some((0, 1)));
        assert_eq!(same_length_ending_violation(&fam), None);
    }

    #[test]
    fn singleton_family() {
        let p = Poset::singleton("x");
        assert_eq!(cofinal_extract(&p, &[vec![0, 0]]).unwrap(), vec![0]);
    }

    #[test]
    fn incompatible_family_is_rejected() {
        let p = Poset::chain(2);
        let err = cofinal_extract(&p, &[vec![0, 0], vec![1, 1]]).unwrap_err();
        assert!(matches!(err, HenkinError::NotCompatible { .. }));
    }

    #[test]
    fn henkin_system_is_valid() {
        let p = Poset::grid(2, 2);
        let s = henkin_system(&p, 4);
        let top = p.maximum().unwrap();
        // threads are determined by their top entry
        assert_eq!(
            s.limit_threads(1_000_000).unwrap().len(),
            s.carrier(top).len()
        );
    }
}
