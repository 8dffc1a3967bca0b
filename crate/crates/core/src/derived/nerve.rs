use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::abelian::{FgAbGroup, IntMatrix, Lattice};

use super::{AbSystem, DerivedError};

/// Default cap on the total number of flags in a nerve complex.
pub const DEFAULT_FLAG_BUDGET: u64 = 100_000;

/// The normalized cochain complex of an [`AbSystem`].
///
/// `C(n)` is the direct sum of `group(i0)` over flags `i0 < … < i_n`,
/// presented as the direct sum of the chosen presentations, block by block
/// in the order of [`crate::poset::Poset::flags`].
#[derive(Debug, Clone)]
pub struct CochainComplex {
    flags: Vec<Vec<Vec<usize>>>,
    offsets: Vec<Vec<usize>>,
    groups: Vec<FgAbGroup>,
    differentials: Vec<IntMatrix>,
}

impl CochainComplex {
    /// Highest degree with a nonzero cochain group, i.e. the length of the
    /// longest chain in the base.
    pub fn top_degree(&self) -> usize {
        self.groups.len() - 1
    }

    pub fn flags(&self, n: usize) -> &[Vec<usize>] {
        self.flags.get(n).map_or(&[], |f| f.as_slice())
    }

    /// First generator of the block of flag number `k` in degree `n`.
    pub fn offset(&self, n: usize, k: usize) -> usize {
        self.offsets[n][k]
    }

    /// `C(n)`; the trivial group above the top degree.
    pub fn cochains(&self, n: usize) -> FgAbGroup {
        self.groups
            .get(n)
            .cloned()
            .unwrap_or_else(FgAbGroup::trivial)
    }

    /// `d(n): C(n) -> C(n+1)` as a `C(n+1).ngens × C(n).ngens` matrix.
    pub fn differential(&self, n: usize) -> IntMatrix {
        match self.differentials.get(n) {
            Some(d) => d.clone(),
            None => IntMatrix::zeros(self.cochains(n + 1).ngens(), self.cochains(n).ngens()),
        }
    }

    /// Checks `d(n+1) ∘ d(n) = 0` modulo the relations of `C(n+2)`.
    pub fn is_complex(&self) -> bool {
        (0..self.groups.len()).all(|n| {
            let dd = &self.differential(n + 1) * &self.differential(n);
            let target = self.cochains(n + 2);
            (0..dd.cols()).all(|c| target.is_zero_element(&dd.col(c)))
        })
    }

    /// Cocycles: `x ∈ Z^{C(n)}` with `d(n) x ≡ 0`. Contains the relations of `C(n)`.
    pub fn cocycles(&self, n: usize) -> Lattice {
        let target = self.cochains(n + 1);
        Lattice::preimage(&self.differential(n), target.relation_lattice())
    }

    /// Coboundaries plus the relations of `C(n)`.
    pub fn coboundaries(&self, n: usize) -> Lattice {
        let rel = self.cochains(n).relation_lattice().clone();
        if n == 0 {
            return rel;
        }
        let prev = Lattice::full(self.cochains(n - 1).ngens());
        rel.sum(&prev.image(&self.differential(n - 1)))
    }

    /// `H^n` presented on a basis of the cocycle lattice.
    pub fn cohomology(&self, n: usize) -> FgAbGroup {
        if n > self.top_degree() {
            return FgAbGroup::trivial();
        }
        self.cocycles(n).quotient(&self.coboundaries(n))
    }
}

/// Builds the normalized nerve complex, refusing bases with more than
/// `budget` flags in total.
pub fn nerve_complex(s: &AbSystem, budget: u64) -> Result<CochainComplex, DerivedError> {
    let base = s.base();
    let top = base.height();
    let total: u128 = (0..=top).map(|n| base.flag_count(n)).sum();
    if total > budget as u128 {
        return Err(DerivedError::BudgetExceeded(budget));
    }
    let flags: Vec<Vec<Vec<usize>>> = (0..=top).map(|n| base.flags(n)).collect();
    let mut offsets = Vec::with_capacity(flags.len());
    let mut groups = Vec::with_capacity(flags.len());
    for fl in &flags {
        let mut off = Vec::with_capacity(fl.len());
        let mut acc = 0;
        for f in fl {
            off.push(acc);
            acc += s.group(f[0]).ngens();
        }
        offsets.push(off);
        let parts: Vec<&FgAbGroup> = fl.iter().map(|f| s.group(f[0])).collect();
        groups.push(FgAbGroup::direct_sum(&parts));
    }

    let mut differentials = Vec::with_capacity(top);
    for n in 0..top {
        let index: HashMap<&[usize], usize> = flags[n]
            .iter()
            .enumerate()
            .map(|(k, f)| (f.as_slice(), k))
            .collect();
        let mut d = IntMatrix::zeros(groups[n + 1].ngens(), groups[n].ngens());
        for (row_flag, f) in flags[n + 1].iter().enumerate() {
            let r0 = offsets[n + 1][row_flag];
            let i0 = f[0];
            // k = 0: transport along the bond from the second entry
            let src = index[&f[1..]];
            let c0 = offsets[n][src];
            let b = s.bond(i0, f[1]).expect("flag entries are comparable");
            for a in 0..b.rows() {
                for c in 0..b.cols() {
                    d[(r0 + a, c0 + c)] += &b[(a, c)];
                }
            }
            for k in 1..f.len() {
                let mut face = f.clone();
                face.remove(k);
                let c0 = offsets[n][index[face.as_slice()]];
                let sign = if k % 2 == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                for a in 0..s.group(i0).ngens() {
                    d[(r0 + a, c0 + a)] += &sign;
                }
            }
        }
        differentials.push(d);
    }
    Ok(CochainComplex {
        flags,
        offsets,
        groups,
        differentials,
    })
}

/// `lim^(n)` of the system, computed as `H^n` of the nerve complex.
pub fn derived_limit(s: &AbSystem, n: usize, budget: u64) -> Result<FgAbGroup, DerivedError> {
    Ok(nerve_complex(s, budget)?.cohomology(n))
}

/// Elements of `lim S = H^0` written as threads: one vector per element of
/// the base, in the coordinates of each group. Finite limits only.
pub fn limit_elements(
    s: &AbSystem,
    limit: usize,
    budget: u64,
) -> Result<Option<Vec<Vec<Vec<BigInt>>>>, DerivedError> {
    let cx = nerve_complex(s, budget)?;
    let k = cx.cocycles(0);
    let h0 = k.quotient(&cx.coboundaries(0));
    let Some(elements) = h0.elements(limit) else {
        return Ok(None);
    };
    let basis = k.basis();
    let out = elements
        .iter()
        .map(|coords| {
            let x = basis.vec_mul(coords);
            (0..s.base().len())
                .map(|i| {
                    let off = cx.offset(0, i);
                    let g = s.group(i);
                    g.canonical(&x[off..off + g.ngens()])
                })
                .collect()
        })
        .collect();
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::poset::Poset;

    fn wedge_z() -> AbSystem {
        let mut bonds = BTreeMap::new();
        bonds.insert((2, 0), IntMatrix::zeros(1, 0));
        bonds.insert((2, 1), IntMatrix::zeros(1, 0));
        let zero = FgAbGroup::trivial();
        AbSystem::new(
            Poset::wedge(),
            vec![zero.clone(), zero, FgAbGroup::free(1)],
            bonds,
        )
        .unwrap()
    }

    #[test]
    fn singleton_complex() {
        let s = AbSystem::constant(Poset::singleton("x"), FgAbGroup::free(1));
        let cx = nerve_complex(&s, DEFAULT_FLAG_BUDGET).unwrap();
        assert_eq!(cx.top_degree(), 0);
        assert_eq!(cx.cochains(0).ngens(), 1);
        assert_eq!(cx.cochains(1).ngens(), 0);
        assert_eq!(cx.cohomology(0).invariants().free_rank, 1);
    }

    #[test]
    fn wedge_complex_shape() {
        let cx = nerve_complex(&wedge_z(), DEFAULT_FLAG_BUDGET).unwrap();
        assert_eq!(cx.flags(1), &[vec![2, 0], vec![2, 1]]);
        assert_eq!(cx.cochains(0).ngens(), 1);
        assert_eq!(cx.cochains(1).ngens(), 2);
        // d(x) = (-x, -x) on the A_c summand
        let d = cx.differential(0);
        assert_eq!(d, IntMatrix::from_rows(&[vec![-1i64], vec![-1]]).unwrap());
    }

    #[test]
    fn wedge_derived_limits() {
        let s = wedge_z();
        assert!(derived_limit(&s, 0, DEFAULT_FLAG_BUDGET)
            .unwrap()
            .is_trivial());
        let inv = derived_limit(&s, 1, DEFAULT_FLAG_BUDGET)
            .unwrap()
            .invariants();
        assert_eq!(inv.free_rank, 1);
        assert!(inv.torsion.is_empty());
        assert!(derived_limit(&s, 2, DEFAULT_FLAG_BUDGET)
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn chain_of_length_two_is_a_complex() {
        let s = AbSystem::constant(Poset::chain(3), FgAbGroup::from_invariants(1, &[4]));
        let cx = nerve_complex(&s, DEFAULT_FLAG_BUDGET).unwrap();
        assert_eq!(cx.flags(1).len(), 3);
        assert_eq!(cx.flags(2).len(), 1);
        assert!(cx.is_complex());
        let d1 = cx.differential(1);
        let d0 = cx.differential(0);
        assert!((&d1 * &d0).is_zero());
    }

    #[test]
    fn constant_system_over_crown_sees_the_circle() {
        let s = AbSystem::constant(Poset::crown(), FgAbGroup::free(1));
        assert_eq!(
            derived_limit(&s, 0, DEFAULT_FLAG_BUDGET)
                .unwrap()
                .invariants()
                .free_rank,
            1
        );
        assert_eq!(
            derived_limit(&s, 1, DEFAULT_FLAG_BUDGET)
                .unwrap()
                .invariants()
                .free_rank,
            1
        );
    }

    #[test]
    fn budget_is_enforced() {
        let s = AbSystem::constant(Poset::chain(4), FgAbGroup::free(1));
        assert!(matches!(
            nerve_complex(&s, 5),
            Err(DerivedError::BudgetExceeded(5))
        ));
    }

    #[test]
    fn limit_elements_of_constant_cyclic() {
        let s = AbSystem::constant(Poset::wedge(), FgAbGroup::cyclic(3));
        let els = limit_elements(&s, 100, DEFAULT_FLAG_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(els.len(), 3);
        for t in &els {
            assert!(t.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
