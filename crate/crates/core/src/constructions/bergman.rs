//! The free abelian group on `g_ij`, its subgroups `H_α`, the transitive
//! G-sets `G / H_α` with bonds `x_j ↦ g_ij x_i`, and the map `D(g_ij) = f_i − f_j`.
//!
//! Everything lives over a chain truncation `{1, …, n}`; membership in `H_α`
//! is decided among the finitely many relators with indices in `{α..n}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{smith_normal_form, IntMatrix, Smith};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BergmanError {
    #[error("element involves index {index}, beyond the truncation {bound}")]
    SupportExceedsBound { index: usize, bound: usize },
    #[error("cosets at levels {0} and {1} cannot be compared")]
    LevelMismatch(usize, usize),
    #[error("{0} is not below {1}")]
    NotComparable(usize, usize),
    #[error("indices start at 1")]
    ZeroIndex,
}

/// A generator of the free abelian groups in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `g_ij` with `i <= j`.
    G(usize, usize),
    /// `f_i`.
    F(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::G(i, j) => write!(f, "g({i},{j})"),
            Generator::F(i) => write!(f, "f({i})"),
        }
    }
}

/// A finite integer combination of generators; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FreeAbElement {
    terms: BTreeMap<Generator, i64>,
}

impl FreeAbElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `g_ij`. Panics unless `1 <= i <= j`.
    pub fn g(i: usize, j: usize) -> Self {
        assert!(i >= 1 && i <= j, "g({i},{j}) needs 1 <= i <= j");
        Self::from_terms([(Generator::G(i, j), 1)])
    }

    /// `f_i`. Panics unless `i >= 1`.
    pub fn f(i: usize) -> Self {
        assert!(i >= 1, "f({i}) needs i >= 1");
        Self::from_terms([(Generator::F(i), 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Generator, i64)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    /// The relator `g_ij + g_jk − g_ik`.
    pub fn relator(i: usize, j: usize, k: usize) -> Self {
        &(&Self::g(i, j) + &Self::g(j, k)) - &Self::g(i, k)
    }

    fn add_term(&mut self, g: Generator, c: i64) {
        let e = self.terms.entry(g).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&g);
        }
    }

    pub fn coefficient(&self, g: Generator) -> i64 {
        self.terms.get(&g).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Generator, i64)> + '_ {
        self.terms.iter().map(|(&g, &c)| (g, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(g, c)| (g, c * k)))
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Largest index occurring, 0 for the zero element.
    pub fn max_index(&self) -> usize {
        self.terms
            .keys()
            .map(|g| match *g {
                Generator::G(_, j) => j,
                Generator::F(i) => i,
            })
            .max()
            .unwrap_or(0)
    }

    /// Whether some `g_ij` with `i <= bound` occurs.
    pub fn involves_g_from(&self, bound: usize) -> bool {
        self.terms
            .keys()
            .any(|g| matches!(*g, Generator::G(i, _) if i <= bound))
    }

    /// Whether some `f_i` with `i <= bound` occurs.
    pub fn involves_f_upto(&self, bound: usize) -> bool {
        self.terms
            .keys()
            .any(|g| matches!(*g, Generator::F(i) if i <= bound))
    }
}

impl std::ops::Add for &FreeAbElement {
    type Output = FreeAbElement;
    fn add(self, rhs: &FreeAbElement) -> FreeAbElement {
        let mut out = self.clone();
        for (g, c) in rhs.terms() {
            out.add_term(g, c);
        }
        out
    }
}

impl std::ops::Sub for &FreeAbElement {
    type Output = FreeAbElement;
    fn sub(self, rhs: &FreeAbElement) -> FreeAbElement {
        self + &rhs.scale(-1)
    }
}

impl std::ops::Neg for &FreeAbElement {
    type Output = FreeAbElement;
    fn neg(self) -> FreeAbElement {
        self.scale(-1)
    }
}

impl fmt::Display for FreeAbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (g, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// Generators `g_ij` of the truncation `{1..n}`, in a fixed order.
fn g_generators(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
}

/// `H_α` inside the truncation `{1..n}`, prepared for membership tests.
#[derive(Debug, Clone)]
pub struct HSubgroup {
    alpha: usize,
    n: usize,
    index: BTreeMap<(usize, usize), usize>,
    smith: Smith,
}

impl HSubgroup {
    pub fn new(alpha: usize, n: usize) -> HSubgroup {
        let gens = g_generators(n);
        let index: BTreeMap<(usize, usize), usize> =
            gens.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let relators: Vec<(usize, usize, usize)> = (alpha.max(1)..=n)
            .flat_map(|i| (i + 1..=n).flat_map(move |j| (j + 1..=n).map(move |k| (i, j, k))))
            .collect();
        // columns are relators, rows are generators
        let mut m = IntMatrix::zeros(gens.len(), relators.len());
        for (c, &(i, j, k)) in relators.iter().enumerate() {
            m[(index[&(i, j)], c)] += 1;
            m[(index[&(j, k)], c)] += 1;
            m[(index[&(i, k)], c)] -= 1;
        }
        HSubgroup {
            alpha,
            n,
            index,
            smith: smith_normal_form(&m),
        }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn bound(&self) -> usize {
        self.n
    }

    /// Membership of a `g`-combination supported in `{1..n}`.
    pub fn contains(&self, e: &FreeAbElement) -> Result<bool, BergmanError> {
        let mut b = vec![BigInt::from(0); self.index.len()];
        for (g, c) in e.terms() {
            match g {
                Generator::G(i, j) if j <= self.n => b[self.index[&(i, j)]] = BigInt::from(c),
                Generator::G(_, j) => {
                    return Err(BergmanError::SupportExceedsBound {
                        index: j,
                        bound: self.n,
                    })
                }
                // f terms never lie in G
                Generator::F(_) => return Ok(false),
            }
        }
        Ok(self.smith.solve(&b).is_some())
    }
}

/// Whether `e` is an integer combination of the relators
/// `g_ij + g_jk − g_ik` with `α <= i < j < k <= n`.
pub fn h_subgroup_member(e: &FreeAbElement, alpha: usize, n: usize) -> Result<bool, BergmanError> {
    HSubgroup::new(alpha, n).contains(e)
}

/// The coset `c · x_level` in `X_level = G / H_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetElement {
    pub level: usize,
    pub rep: FreeAbElement,
}

impl CosetElement {
    /// The base point `x_level`.
    pub fn base_point(level: usize) -> CosetElement {
        CosetElement {
            level,
            rep: FreeAbElement::zero(),
        }
    }

    /// The action `g · (c x) = (g + c) x`.
    pub fn act(&self, g: &FreeAbElement) -> CosetElement {
        CosetElement {
            level: self.level,
            rep: &self.rep + g,
        }
    }
}

pub fn coset_equal(c1: &CosetElement, c2: &CosetElement, n: usize) -> Result<bool, BergmanError> {
    if c1.level != c2.level {
        return Err(BergmanError::LevelMismatch(c1.level, c2.level));
    }
    h_subgroup_member(&(&c1.rep - &c2.rep), c1.level, n)
}

/// The bond `X_β → X_α`, `c x_β ↦ (c + g_αβ) x_α`; the identity when `α = β`.
pub fn gset_bond(
    alpha: usize,
    beta: usize,
    c: &CosetElement,
) -> Result<CosetElement, BergmanError> {
    if alpha == 0 || beta == 0 {
        return Err(BergmanError::ZeroIndex);
    }
    if alpha > beta {
        return Err(BergmanError::NotComparable(alpha, beta));
    }
    if c.level != beta {
        return Err(BergmanError::LevelMismatch(c.level, beta));
    }
    if alpha == beta {
        return Ok(c.clone());
    }
    Ok(CosetElement {
        level: alpha,
        rep: &c.rep + &FreeAbElement::g(alpha, beta),
    })
}

/// `D(g_ij) = f_i − f_j`, extended linearly. `f` terms are outside the
/// domain and are dropped.
pub fn d_map(e: &FreeAbElement) -> FreeAbElement {
    let mut out = FreeAbElement::zero();
    for (g, c) in e.terms() {
        if let Generator::G(i, j) = g {
            out.add_term(Generator::F(i), c);
            out.add_term(Generator::F(j), -c);
        }
    }
    out
}

/// A random element of `H_α` in the truncation `{1..n}`: a combination of
/// up to `terms` relators with coefficients in `-3..=3`.
pub fn random_relator_combination<R: Rng>(
    rng: &mut R,
    alpha: usize,
    n: usize,
    terms: usize,
) -> FreeAbElement {
    let mut out = FreeAbElement::zero();
    if n < alpha + 2 {
        return out;
    }
    for _ in 0..terms {
        let i = rng.gen_range(alpha..=n - 2);
        let j = rng.gen_range(i + 1..=n - 1);
        let k = rng.gen_range(j + 1..=n);
        out = &out + &FreeAbElement::relator(i, j, k).scale(rng.gen_range(-3..=3));
    }
    out
}

/// A random `g`-combination supported in `{1..n}`.
pub fn random_element<R: Rng>(rng: &mut R, n: usize, terms: usize) -> FreeAbElement {
    let gens = g_generators(n);
    FreeAbElement::from_terms((0..terms).map(|_| {
        let (i, j) = gens[rng.gen_range(0..gens.len())];
        (Generator::G(i, j), rng.gen_range(-4..=4))
    }))
}

/// One checked identity of the demonstration.
#[derive(Debug, Clone, Serialize)]
pub struct DemoStep {
    pub step: String,
    pub statement: String,
    pub holds: bool,
    /// Whether the identity is expected to hold on a truncation with a maximum.
    pub expected: bool,
    pub detail: String,
}

/// The scripted run of the argument on the truncation `{1..n}`.
#[derive(Debug, Clone, Serialize)]
pub struct DemoLedger {
    pub n: usize,
    pub thread: Vec<String>,
    pub steps: Vec<DemoStep>,
}

impl DemoLedger {
    /// Every step came out as expected for a truncation with a maximum.
    pub fn as_expected(&self) -> bool {
        self.steps.iter().all(|s| s.holds == s.expected)
    }
}

/// Runs the algebraic steps on the chain `{1..n}`: builds a thread of the
/// G-set system, normalizes it by its eventual coefficients, and checks
/// each displayed identity on the concrete elements.
///
/// The truncation has a maximum, so the final contradiction must not
/// appear: (a), (b), (d), (e) and the coefficient-sum property hold, (c)
/// and (f) fail below the top once `n >= 2`, and (g) always fails. The
/// ledger records which way each step went.
pub fn bergman_demo<R: Rng>(rng: &mut R, n: usize) -> Result<DemoLedger, BergmanError> {
    if n == 0 {
        return Err(BergmanError::ZeroIndex);
    }
    let h: Vec<HSubgroup> = (0..=n).map(|a| HSubgroup::new(a.max(1), n)).collect();
    let mut steps = Vec::new();
    let mut push = |step: &str, statement: &str, holds: bool, expected: bool, detail: String| {
        steps.push(DemoStep {
            step: step.into(),
            statement: statement.into(),
            holds,
            expected,
            detail,
        });
    };

    // (a) every relator with indices >= α lies in H_α; g_ij alone does not
    let mut a_ok = true;
    let mut a_count = 0;
    for alpha in 1..=n {
        for i in alpha..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    a_ok &= h[alpha].contains(&FreeAbElement::relator(i, j, k))?;
                    a_count += 1;
                }
            }
        }
        for i in alpha..=n {
            for j in i + 1..=n {
                a_ok &= !h[alpha].contains(&FreeAbElement::g(i, j))?;
            }
        }
    }
    push(
        "a",
        "g(i,j) + g(j,k) - g(i,k) lies in H_alpha for k > j > i >= alpha",
        a_ok,
        true,
        format!("{a_count} relators checked; no single generator lies in any H_alpha"),
    );

    // a thread: c_n arbitrary, c_i = c_n + g(i,n) + (random element of H_i)
    let top = random_element(rng, n, 2);
    let c: Vec<FreeAbElement> = (0..=n)
        .map(|i| {
            if i == 0 {
                FreeAbElement::zero()
            } else if i == n {
                top.clone()
            } else {
                &(&top + &FreeAbElement::g(i, n)) + &random_relator_combination(rng, i, n, 2)
            }
        })
        .collect();
    let mut functorial = true;
    let mut surjective = true;
    for i in 1..=n {
        for j in i..=n {
            // bond image of a random point hits the coset of a chosen preimage
            let target = CosetElement {
                level: i,
                rep: random_element(rng, n, 2),
            };
            let pre = CosetElement {
                level: j,
                rep: if i == j {
                    target.rep.clone()
                } else {
                    &target.rep - &FreeAbElement::g(i, j)
                },
            };
            surjective &= coset_equal(&gset_bond(i, j, &pre)?, &target, n)?;
            for k in j..=n {
                let x = CosetElement {
                    level: k,
                    rep: random_element(rng, n, 2),
                };
                let two = gset_bond(i, j, &gset_bond(j, k, &x)?)?;
                functorial &= coset_equal(&two, &gset_bond(i, k, &x)?, n)?;
            }
        }
    }
    push(
        "bonds",
        "x_j -> g(i,j) x_i gives a surjective inverse system up to coset equality",
        functorial && surjective,
        true,
        format!("functorial: {functorial}, surjective: {surjective}"),
    );

    let mut b_ok = true;
    for i in 1..=n {
        for j in i + 1..=n {
            let e = &(&FreeAbElement::g(i, j) + &c[j]) - &c[i];
            b_ok &= h[i].contains(&e)?;
        }
    }
    push(
        "b",
        "g(i,j) + c_j - c_i lies in H_i for i < j",
        b_ok,
        true,
        "thread built from c_n with c_i = c_n + g(i,n) + h_i".into(),
    );

    // eventual coefficients are those of c_n; translate them away
    let shift = c[n].clone();
    let c: Vec<FreeAbElement> = c.iter().map(|ci| ci - &shift).collect();
    let mut c_fail = Vec::new();
    for i in 1..=n {
        if c[i].involves_g_from(i) {
            c_fail.push(i);
        }
    }
    push(
        "c",
        "after translation, c_i involves no g(a,j) with a <= i",
        c_fail.is_empty(),
        n == 1,
        format!("fails at i in {c_fail:?}; here c_i = g(i,n) + h_i, and n is a maximum"),
    );

    let mut d_ok = true;
    for i in 1..=n {
        for j in i..=n {
            d_ok &= d_map(&FreeAbElement::g(i, j)) == &FreeAbElement::f(i) - &FreeAbElement::f(j);
        }
    }
    let mut ker_ok = true;
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                ker_ok &= d_map(&FreeAbElement::relator(i, j, k)).is_zero();
            }
        }
    }
    push(
        "d",
        "D(g(i,j)) = f(i) - f(j), and Ker D contains every H_alpha",
        d_ok && ker_ok,
        true,
        format!("on generators: {d_ok}, on relators: {ker_ok}"),
    );

    let dc: Vec<FreeAbElement> = c.iter().map(d_map).collect();
    let mut e_ok = true;
    for i in 1..=n {
        for j in i + 1..=n {
            e_ok &= &dc[i] - &dc[j] == &FreeAbElement::f(i) - &FreeAbElement::f(j);
        }
    }
    push(
        "e",
        "D(c_i) - D(c_j) = f(i) - f(j) for i <= j",
        e_ok,
        true,
        String::new(),
    );

    let f_fail: Vec<usize> = (1..=n).filter(|&i| dc[i].involves_f_upto(i)).collect();
    push(
        "f",
        "D(c_i) involves no f(a) with a <= i",
        f_fail.is_empty(),
        n == 1,
        format!("fails at i in {f_fail:?}"),
    );

    let g_fail: Vec<usize> = (1..=n).filter(|&i| dc[i] != FreeAbElement::f(i)).collect();
    let detail = (1..=n)
        .map(|i| format!("D(c_{i}) = {}", dc[i]))
        .collect::<Vec<_>>()
        .join("; ");
    push("g", "D(c_i) = f(i)", g_fail.is_empty(), false, detail);

    let sum_ok = (1..=n).all(|i| dc[i].coefficient_sum() == 0);
    push(
        "sum",
        "every D(c_i) has coefficient sum 0",
        sum_ok,
        true,
        "so (g) can only hold where D(c_i) = 0, which never equals f(i)".into(),
    );

    let thread = (1..=n).map(|i| format!("c_{i} = {}", c[i])).collect();
    Ok(DemoLedger { n, thread, steps })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn g(i: usize, j: usize) -> FreeAbElement {
        FreeAbElement::g(i, j)
    }

    #[test]
    fn membership_examples() {
        assert!(h_subgroup_member(&FreeAbElement::relator(1, 2, 3), 1, 4).unwrap());
        assert!(!h_subgroup_member(&g(1, 2), 1, 4).unwrap());
        assert!(!h_subgroup_member(&FreeAbElement::relator(2, 3, 4), 3, 4).unwrap());
        assert!(h_subgroup_member(&FreeAbElement::zero(), 2, 3).unwrap());
        assert_eq!(
            h_subgroup_member(&g(1, 7), 1, 4),
            Err(BergmanError::SupportExceedsBound { index: 7, bound: 4 })
        );
    }

    #[test]
    fn coset_examples() {
        let x1 = CosetElement::base_point(1);
        assert!(coset_equal(&x1, &x1, 3).unwrap());
        let b = gset_bond(1, 2, &CosetElement::base_point(2)).unwrap();
        assert_eq!(b.rep, g(1, 2));
        let shifted = x1.act(&FreeAbElement::relator(1, 2, 3));
        assert!(coset_equal(&x1, &shifted, 3).unwrap());
        assert_eq!(
            coset_equal(&x1, &CosetElement::base_point(2), 3),
            Err(BergmanError::LevelMismatch(1, 2))
        );
        assert_eq!(gset_bond(2, 1, &x1), Err(BergmanError::NotComparable(2, 1)));
    }

    #[test]
    fn d_map_examples() {
        assert_eq!(d_map(&g(1, 2)), &FreeAbElement::f(1) - &FreeAbElement::f(2));
        assert!(d_map(&FreeAbElement::relator(1, 2, 3)).is_zero());
        assert!(d_map(&FreeAbElement::zero()).is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(
            FreeAbElement::relator(1, 2, 3).to_string(),
            "g(1,2) - g(1,3) + g(2,3)"
        );
        assert_eq!(g(1, 2).scale(-2).to_string(), "-2g(1,2)");
    }

    #[test]
    fn demo_runs_as_expected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..=5 {
            let ledger = bergman_demo(&mut rng, n).unwrap();
            assert!(ledger.as_expected(), "{ledger:#?}");
        }
    }
}
