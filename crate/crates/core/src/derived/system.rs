use std::collections::{BTreeMap, HashMap};

use crate::abelian::{AbHom, FgAbGroup, IntMatrix};
use crate::poset::Poset;
use crate::sets::SetSystem;

use super::DerivedError;

/// An inverse system of finitely generated abelian groups over a finite poset.
///
/// `bond(i, j)` for `i <= j` is a matrix `group(i).ngens × group(j).ngens`.
#[derive(Debug, Clone)]
pub struct AbSystem {
    base: Poset,
    groups: Vec<FgAbGroup>,
    declared: BTreeMap<(usize, usize), IntMatrix>,
    composites: HashMap<(usize, usize), IntMatrix>,
}

impl AbSystem {
    /// Validates the declared bonds (required on every cover, allowed on any
    /// strict pair) and derives composites, checking path independence modulo
    /// the relations of the lower group.
    pub fn new(
        base: Poset,
        groups: Vec<FgAbGroup>,
        bonds: BTreeMap<(usize, usize), IntMatrix>,
    ) -> Result<AbSystem, DerivedError> {
        if groups.len() != base.len() {
            return Err(DerivedError::GroupCount {
                expected: base.len(),
                found: groups.len(),
            });
        }
        let lbl = |i: usize| base.label(i).to_string();
        for (&(lo, hi), m) in &bonds {
            if lo >= base.len() || hi >= base.len() || !base.lt(lo, hi) {
                return Err(DerivedError::MapOnIncomparable {
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
            AbHom::new(groups[hi].clone(), groups[lo].clone(), m.clone()).map_err(|source| {
                DerivedError::InvalidBond {
                    lower: lbl(lo),
                    upper: lbl(hi),
                    source,
                }
            })?;
        }
        for &(lo, hi) in base.covers() {
            if !bonds.contains_key(&(lo, hi)) {
                return Err(DerivedError::MissingBond {
                    lower: lbl(lo),
                    upper: lbl(hi),
                });
            }
        }
        let order = base.linear_extension();
        let mut composites = HashMap::new();
        for (i, g) in groups.iter().enumerate() {
            composites.insert((i, i), IntMatrix::identity(g.ngens()));
        }
        for &j in &order {
            for &i in order.iter().rev() {
                if !base.lt(i, j) {
                    continue;
                }
                let mut value: Option<(usize, IntMatrix)> = None;
                for (&(_, k), decl) in bonds.range((i, 0)..(i + 1, 0)) {
                    if !base.leq(k, j) {
                        continue;
                    }
                    let cand = decl * &composites[&(k, j)];
                    match &value {
                        None => value = Some((k, cand)),
                        Some((k0, v)) => {
                            if !same_map(&groups[i], v, &cand) {
                                let mid = if base.leq(*k0, k) { *k0 } else { k };
                                return Err(DerivedError::FunctorialityViolation {
                                    i: lbl(i),
                                    j: lbl(mid),
                                    k: lbl(j),
                                });
                            }
                        }
                    }
                }
                composites.insert(
                    (i, j),
                    value.expect("strict pair has a declared first step").1,
                );
            }
        }
        Ok(AbSystem {
            base,
            groups,
            declared: bonds,
            composites,
        })
    }

    /// The constant system with identity bonds.
    pub fn constant(base: Poset, group: FgAbGroup) -> AbSystem {
        let bonds = base
            .covers()
            .iter()
            .map(|&c| (c, IntMatrix::identity(group.ngens())))
            .collect();
        let groups = vec![group; base.len()];
        AbSystem::new(base, groups, bonds).expect("constant system is functorial")
    }

    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn group(&self, i: usize) -> &FgAbGroup {
        &self.groups[i]
    }

    pub fn groups(&self) -> &[FgAbGroup] {
        &self.groups
    }

    pub fn declared_bonds(&self) -> &BTreeMap<(usize, usize), IntMatrix> {
        &self.declared
    }

    /// Composite bond matrix for `lower <= upper`.
    pub fn bond(&self, lower: usize, upper: usize) -> Option<&IntMatrix> {
        self.composites.get(&(lower, upper))
    }

    pub fn bond_hom(&self, lower: usize, upper: usize) -> Option<AbHom> {
        let m = self.bond(lower, upper)?;
        Some(
            AbHom::new(
                self.groups[upper].clone(),
                self.groups[lower].clone(),
                m.clone(),
            )
            .expect("validated bonds are well defined"),
        )
    }

    /// First strict pair whose bond is not onto, or `None` if all are.
    pub fn first_non_surjective(&self) -> Option<(usize, usize)> {
        self.base
            .order_pairs()
            .into_iter()
            .filter(|&(i, j)| i != j)
            .find(|&(i, j)| !self.bond_hom(i, j).unwrap().is_surjective())
    }

    pub fn is_surjective(&self) -> bool {
        self.first_non_surjective().is_none()
    }

    /// The same system with elements listed in a different order: new
    /// element `k` is old element `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> AbSystem {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let base = self.base.permute(perm);
        let groups = perm.iter().map(|&o| self.groups[o].clone()).collect();
        let bonds = self
            .declared
            .iter()
            .map(|(&(lo, hi), m)| ((inv[lo], inv[hi]), m.clone()))
            .collect();
        AbSystem::new(base, groups, bonds).expect("permutation preserves validity")
    }

    /// Replaces the generators of each `group(i)` by `x' = u_i x` with `u_i`
    /// unimodular (`u_inv[i]` its inverse). The system is unchanged up to
    /// isomorphism.
    pub fn change_coordinates(&self, u: &[IntMatrix], u_inv: &[IntMatrix]) -> AbSystem {
        let groups: Vec<FgAbGroup> = self
            .groups
            .iter()
            .zip(u)
            .map(|(g, ui)| {
                FgAbGroup::new(g.ngens(), g.relations() * &ui.transpose()).expect("widths agree")
            })
            .collect();
        let bonds = self
            .declared
            .iter()
            .map(|(&(lo, hi), m)| ((lo, hi), &(&u[lo] * m) * &u_inv[hi]))
            .collect();
        AbSystem::new(self.base.clone(), groups, bonds)
            .expect("coordinate change preserves validity")
    }

    /// The system of underlying sets of group elements, for finite groups of
    /// at most `limit` elements each. Values are labelled by canonical
    /// coordinates.
    pub fn underlying_sets(&self, limit: usize) -> Option<SetSystem> {
        let n = self.base.len();
        let mut carriers = Vec::with_capacity(n);
        let mut canon_index: Vec<HashMap<Vec<num_bigint::BigInt>, usize>> = Vec::with_capacity(n);
        let mut reps = Vec::with_capacity(n);
        for g in &self.groups {
            let els = g.elements(limit)?;
            let mut index = HashMap::new();
            let mut labels = Vec::new();
            for (k, x) in els.iter().enumerate() {
                let c = g.canonical(x);
                labels.push(
                    c.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join("_"),
                );
                index.insert(c, k);
            }
            carriers.push(if labels.is_empty() {
                vec![String::new()]
            } else {
                labels
            });
            canon_index.push(index);
            reps.push(els);
        }
        let mut bonds = BTreeMap::new();
        for (&(lo, hi), m) in &self.declared {
            let table = reps[hi]
                .iter()
                .map(|x| canon_index[lo][&self.groups[lo].canonical(&m.mul_vec(x))])
                .collect();
            bonds.insert((lo, hi), table);
        }
        SetSystem::new(self.base.clone(), carriers, bonds).ok()
    }
}

/// Equality of two maps into `g`, column by column modulo relations.
pub(crate) fn same_map(g: &FgAbGroup, a: &IntMatrix, b: &IntMatrix) -> bool {
    a.shape() == b.shape() && (0..a.cols()).all(|c| g.elements_equal(&a.col(c), &b.col(c)))
}
