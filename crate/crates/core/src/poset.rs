//! Finite posets and the order-theoretic predicates used throughout the crate.
//!
//! A [`Poset`] is built from a list of opaque labels and a list of
//! generating relations ("covers"). The order is the reflexive-transitive
//! closure of the covers and is stored as a dense bitset relation. Elements
//! are addressed by their index in the declaration order.
//!
//! Only finite posets are representable. For a finite poset being directed is
//! the same as having a maximum, so the "maximum or countable cofinal
//! sequence" dichotomy of infinite index sets collapses to the question of
//! whether a top element exists; [`Poset::cofinal_chain`] exposes exactly that.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("covers induce a cycle through `{0}`")]
    CycleDetected(String),
    #[error("invalid label `{0}`")]
    InvalidLabel(String),
}

/// Dense boolean relation, one bitset row per element.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Relation {
    words: usize,
    bits: Vec<u64>,
}

impl Relation {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Relation {
            words,
            bits: vec![0; n * words],
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    /// row(i) |= row(j)
    fn absorb(&mut self, i: usize, j: usize) {
        for w in 0..self.words {
            let v = self.bits[j * self.words + w];
            self.bits[i * self.words + w] |= v;
        }
    }
}

/// Labels must match `[A-Za-z0-9_()]+`.
pub fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')'))
}

/// A finite partially ordered set with labelled elements.
#[derive(Debug, Clone)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    covers: Vec<(usize, usize)>,
    // up.get(i, j) <=> i <= j
    up: Relation,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.up == other.up
    }
}

impl Eq for Poset {}

impl Poset {
    /// Validates labels and covers and computes the order closure.
    ///
    /// Covers are strict relations `lower < upper`; a self-cover or any
    /// cycle among covers is rejected.
    pub fn new<S: AsRef<str>>(labels: &[S], covers: &[(S, S)]) -> Result<Poset, PosetError> {
        let mut index = HashMap::new();
        let mut owned = Vec::with_capacity(labels.len());
        for (k, l) in labels.iter().enumerate() {
            let l = l.as_ref();
            if !is_valid_label(l) {
                return Err(PosetError::InvalidLabel(l.to_string()));
            }
            if index.insert(l.to_string(), k).is_some() {
                return Err(PosetError::DuplicateLabel(l.to_string()));
            }
            owned.push(l.to_string());
        }
        let mut idx_covers = Vec::with_capacity(covers.len());
        for (lo, hi) in covers {
            let lo_i = *index
                .get(lo.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(lo.as_ref().to_string()))?;
            let hi_i = *index
                .get(hi.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(hi.as_ref().to_string()))?;
            idx_covers.push((lo_i, hi_i));
        }
        Poset::from_indices(owned, idx_covers)
    }

    /// Same as [`Poset::new`] but with covers given by element index.
    pub fn from_indices(
        labels: Vec<String>,
        covers: Vec<(usize, usize)>,
    ) -> Result<Poset, PosetError> {
        let n = labels.len();
        let mut index = HashMap::new();
        for (k, l) in labels.iter().enumerate() {
            if !is_valid_label(l) {
                return Err(PosetError::InvalidLabel(l.clone()));
            }
            if index.insert(l.clone(), k).is_some() {
                return Err(PosetError::DuplicateLabel(l.clone()));
            }
        }
        for &(lo, hi) in &covers {
            if lo >= n || hi >= n {
                return Err(PosetError::UnknownElement(format!("#{}", lo.max(hi))));
            }
        }
        let order = topological_order(n, &covers).ok_or_else(|| {
            let culprit = find_cycle_member(n, &covers);
            PosetError::CycleDetected(labels[culprit].clone())
        })?;

        // Closure in reverse topological order: up(i) = {i} ∪ ⋃ up(j) over covers i<j.
        let mut up = Relation::new(n);
        let mut succ = vec![Vec::new(); n];
        for &(lo, hi) in &covers {
            succ[lo].push(hi);
        }
        for &i in order.iter().rev() {
            up.set(i, i);
            for &j in &succ[i] {
                up.absorb(i, j);
            }
        }
        let mut covers = covers;
        covers.sort_unstable();
        covers.dedup();
        Ok(Poset {
            labels,
            index,
            covers,
            up,
        })
    }

    /// The chain `1 < 2 < … < n` with labels `"1"`, …, `"n"`.
    pub fn chain(n: usize) -> Poset {
        let labels = (1..=n).map(|k| k.to_string()).collect();
        let covers = (1..n).map(|k| (k - 1, k)).collect();
        Poset::from_indices(labels, covers).expect("chain is a valid poset")
    }

    /// The chain `0 < 1 < … < horizon`, the index set of a truncated tower.
    pub fn tower_chain(horizon: usize) -> Poset {
        let labels = (0..=horizon).map(|k| k.to_string()).collect();
        let covers = (0..horizon).map(|k| (k, k + 1)).collect();
        Poset::from_indices(labels, covers).expect("chain is a valid poset")
    }

    /// Componentwise order on `{1..rows} × {1..cols}`, labels `(i,j)` written `(i_j)`.
    pub fn grid(rows: usize, cols: usize) -> Poset {
        let mut labels = Vec::new();
        for i in 1..=rows {
            for j in 1..=cols {
                labels.push(format!("({i}_{j})"));
            }
        }
        let at = |i: usize, j: usize| (i - 1) * cols + (j - 1);
        let mut covers = Vec::new();
        for i in 1..=rows {
            for j in 1..=cols {
                if i < rows {
                    covers.push((at(i, j), at(i + 1, j)));
                }
                if j < cols {
                    covers.push((at(i, j), at(i, j + 1)));
                }
            }
        }
        Poset::from_indices(labels, covers).expect("grid is a valid poset")
    }

    /// `c < a`, `c < b`: the smallest non-directed poset with a bottom.
    pub fn wedge() -> Poset {
        Poset::new(&["a", "b", "c"], &[("c", "a"), ("c", "b")]).expect("wedge is a valid poset")
    }

    /// Two minimal and two maximal elements, each maximal above both minimal ones.
    pub fn crown() -> Poset {
        Poset::new(
            &["a", "b", "c", "d"],
            &[("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")],
        )
        .expect("crown is a valid poset")
    }

    pub fn singleton(label: &str) -> Poset {
        Poset::new(&[label], &[]).expect("singleton is a valid poset")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// The declared generating relations, as sorted index pairs.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up.get(i, j)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.up.get(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    /// All pairs `(i, j)` with `i <= j`, including the reflexive ones.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Elements `j >= i`, in index order.
    pub fn up_set(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.leq(i, j)).collect()
    }

    /// Elements `j <= i`, in index order.
    pub fn down_set(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.leq(j, i)).collect()
    }

    /// A linear extension: every element appears after all elements below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        topological_order(self.len(), &self.covers).expect("validated poset is acyclic")
    }

    /// True iff every pair of elements has a common upper bound.
    pub fn is_directed(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (a..n).all(|b| (0..n).any(|u| self.leq(a, u) && self.leq(b, u))))
    }

    /// Elements with nothing strictly above them, in label order.
    pub fn maximal_elements(&self) -> Vec<usize> {
        let n = self.len();
        let mut out: Vec<usize> = (0..n).filter(|&i| !(0..n).any(|j| self.lt(i, j))).collect();
        out.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        out
    }

    /// The top element, if one exists.
    pub fn maximum(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&t| (0..n).all(|i| self.leq(i, t)))
    }

    /// Elements strictly above `i`, in label order.
    pub fn strict_upper_bounds(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.len()).filter(|&j| self.lt(i, j)).collect();
        out.sort_by(|&a, &b| self.labels[a].cmp(&self.labels[b]));
        out
    }

    /// An ascending chain dominating every element, if one exists.
    ///
    /// A finite chain is cofinal exactly when its last member is the maximum,
    /// so this returns a longest chain ending at the maximum, or `None`.
    pub fn cofinal_chain(&self) -> Option<Vec<usize>> {
        let top = self.maximum()?;
        // Longest chain ending at each element, over a linear extension.
        let order = self.linear_extension();
        let mut best: Vec<(usize, Option<usize>)> = vec![(1, None); self.len()];
        for (pos, &j) in order.iter().enumerate() {
            for &i in &order[..pos] {
                if self.lt(i, j) && best[i].0 + 1 > best[j].0 {
                    best[j] = (best[i].0 + 1, Some(i));
                }
            }
        }
        let mut chain = vec![top];
        let mut cur = top;
        while let (_, Some(prev)) = best[cur] {
            chain.push(prev);
            cur = prev;
        }
        chain.reverse();
        Some(chain)
    }

    /// Number of strict steps in a longest chain (0 for an antichain).
    pub fn height(&self) -> usize {
        let order = self.linear_extension();
        let mut len = vec![0usize; self.len()];
        for (pos, &j) in order.iter().enumerate() {
            for &i in &order[..pos] {
                if self.lt(i, j) {
                    len[j] = len[j].max(len[i] + 1);
                }
            }
        }
        len.into_iter().max().unwrap_or(0)
    }

    /// Strictly increasing flags `i0 < i1 < … < i_degree`, in lexicographic
    /// order of their index sequences.
    pub fn flags(&self, degree: usize) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(degree + 1);
        fn rec(p: &Poset, n: usize, want: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == want {
                out.push(cur.clone());
                return;
            }
            for k in 0..n {
                if cur.last().is_none_or(|&last| p.lt(last, k)) {
                    cur.push(k);
                    rec(p, n, want, cur, out);
                    cur.pop();
                }
            }
        }
        rec(self, n, degree + 1, &mut cur, &mut out);
        out
    }

    /// Number of flags of the given degree, computed without materializing them.
    pub fn flag_count(&self, degree: usize) -> u128 {
        let n = self.len();
        // ends[k] = number of flags of current length ending at k
        let mut ends: Vec<u128> = vec![1; n];
        for _ in 0..degree {
            let mut next = vec![0u128; n];
            for (j, slot) in next.iter_mut().enumerate() {
                for i in 0..n {
                    if self.lt(i, j) {
                        *slot = slot.saturating_add(ends[i]);
                    }
                }
            }
            ends = next;
        }
        ends.into_iter().fold(0u128, |a, b| a.saturating_add(b))
    }

    /// The same poset with element `k` renamed to `new_labels[k]`.
    pub fn relabel(&self, new_labels: Vec<String>) -> Result<Poset, PosetError> {
        assert_eq!(
            new_labels.len(),
            self.len(),
            "relabel needs one label per element"
        );
        Poset::from_indices(new_labels, self.covers.clone())
    }

    /// The same order with elements listed in a different sequence:
    /// new element `k` is old element `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Poset {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let labels = perm.iter().map(|&o| self.labels[o].clone()).collect();
        let covers = self.covers.iter().map(|&(a, b)| (inv[a], inv[b])).collect();
        Poset::from_indices(labels, covers).expect("permutation preserves validity")
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, l) in self.labels.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, " |")?;
        for (k, &(a, b)) in self.covers.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, " {} < {}", self.labels[a], self.labels[b])?;
        }
        write!(f, "}}")
    }
}

/// Kahn's algorithm; `None` when the relation has a cycle (self-loops included).
fn topological_order(n: usize, covers: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(lo, hi) in covers {
        succ[lo].push(hi);
        indeg[hi] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).rev().collect();
    let mut out = Vec::with_capacity(n);
    while let Some(i) = ready.pop() {
        out.push(i);
        for &j in succ[i].iter().rev() {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(j);
            }
        }
    }
    (out.len() == n).then_some(out)
}

fn find_cycle_member(n: usize, covers: &[(usize, usize)]) -> usize {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(lo, hi) in covers {
        succ[lo].push(hi);
        indeg[hi] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut done = vec![false; n];
    while let Some(i) = ready.pop() {
        done[i] = true;
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(j);
            }
        }
    }
    done.iter().position(|d| !d).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn warshall(n: usize, covers: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            r[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    #[test]
    fn singleton_is_valid() {
        let p = Poset::new(&["a"], &[]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.leq(0, 0));
        assert_eq!(p.maximal_elements(), vec![0]);
        assert_eq!(p.maximum(), Some(0));
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Poset::new(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, PosetError::CycleDetected(_)));
        let err = Poset::new(&["a"], &[("a", "a")]).unwrap_err();
        assert!(matches!(err, PosetError::CycleDetected(_)));
    }

    #[test]
    fn unknown_and_duplicate_labels() {
        assert_eq!(
            Poset::new(&["a"], &[("a", "z")]).unwrap_err(),
            PosetError::UnknownElement("z".into())
        );
        assert_eq!(
            Poset::new(&["a", "a"], &[]).unwrap_err(),
            PosetError::DuplicateLabel("a".into())
        );
        assert!(matches!(
            Poset::new(&["a b"], &[]),
            Err(PosetError::InvalidLabel(_))
        ));
    }

    #[test]
    fn wedge_order_matches_closure_oracle() {
        let p = Poset::wedge();
        let expected = warshall(3, &[(2, 0), (2, 1)]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.leq(i, j), expected[i][j], "({i},{j})");
            }
        }
        // c<=a, c<=b plus the three reflexive pairs
        assert_eq!(p.order_pairs().len(), 5);
    }

    #[test]
    fn directedness_examples() {
        assert!(Poset::chain(3).is_directed());
        assert!(!Poset::wedge().is_directed());
        assert!(Poset::grid(3, 3).is_directed());
    }

    #[test]
    fn maxima() {
        let c = Poset::chain(3);
        assert_eq!(c.maximal_elements(), vec![2]);
        assert_eq!(c.maximum(), Some(2));
        let w = Poset::wedge();
        let labels: Vec<&str> = w.maximal_elements().iter().map(|&i| w.label(i)).collect();
        assert_eq!(labels, vec!["a", "b"]);
        assert_eq!(w.maximum(), None);
    }

    #[test]
    fn cofinal_chains() {
        assert_eq!(Poset::chain(3).cofinal_chain(), Some(vec![0, 1, 2]));
        assert_eq!(Poset::wedge().cofinal_chain(), None);
        let g = Poset::grid(3, 3);
        let chain = g.cofinal_chain().unwrap();
        assert_eq!(g.label(*chain.last().unwrap()), "(3_3)");
        assert!(chain.windows(2).all(|w| g.lt(w[0], w[1])));
        assert_eq!(chain.len(), 5);
    }

    #[test]
    fn flags_and_height() {
        let w = Poset::wedge();
        assert_eq!(w.flags(0).len(), 3);
        assert_eq!(w.flags(1), vec![vec![2, 0], vec![2, 1]]);
        assert!(w.flags(2).is_empty());
        assert_eq!(w.height(), 1);
        let c = Poset::chain(3);
        assert_eq!(c.flags(1).len(), 3);
        assert_eq!(c.flags(2), vec![vec![0, 1, 2]]);
        for d in 0..4 {
            assert_eq!(c.flag_count(d), c.flags(d).len() as u128);
        }
    }

    #[test]
    fn redundant_covers_are_accepted() {
        let p = Poset::new(&["x", "y", "z"], &[("x", "y"), ("y", "z"), ("x", "z")]).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(p.height(), 2);
    }
}
