//! Seeded generators of abelian inverse systems and short exact sequences.
//!
//! Groups are built as subquotients `M_i / L_i` of one `Z^m`. Relation
//! lattices are sums of relators attached to the elements above, so they
//! grow downward; bonds are induced by the identity of `Z^m`, which makes
//! them functorial by construction. With `M_i = Z^m` every bond is onto.
//! A random unimodular change of coordinates per element then hides the
//! common ambient space.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::abelian::{FgAbGroup, IntMatrix, Lattice};
use crate::poset::Poset;

use super::{AbSystem, ShortExactSequence};

const PRIME_POWERS: [i64; 5] = [2, 3, 4, 5, 8];

/// Shape limits for generated groups.
#[derive(Debug, Clone, Copy)]
pub struct GroupShape {
    /// Generators of the ambient `Z^m`.
    pub max_gens: usize,
    /// Reject samples with a larger invariant factor.
    pub max_factor: i64,
    /// Every group finite (an extra torsion relator on each generator).
    pub finite: bool,
}

impl Default for GroupShape {
    fn default() -> Self {
        GroupShape {
            max_gens: 3,
            max_factor: 8,
            finite: false,
        }
    }
}

fn unit(m: usize, c: usize, k: i64) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); m];
    v[c] = BigInt::from(k);
    v
}

fn random_relator<R: Rng>(rng: &mut R, m: usize) -> Vec<BigInt> {
    let c = rng.gen_range(0..m);
    match rng.gen_range(0..4) {
        0 => unit(m, c, 1),
        1 | 2 => unit(m, c, *PRIME_POWERS.choose(rng).unwrap()),
        _ => {
            let mut v = unit(m, c, *PRIME_POWERS.choose(rng).unwrap());
            let d = rng.gen_range(0..m);
            v[d] += BigInt::from(rng.gen_range(-2..=2));
            v
        }
    }
}

fn random_vector<R: Rng>(rng: &mut R, m: usize) -> Vec<BigInt> {
    (0..m)
        .map(|_| BigInt::from(rng.gen_range(-2..=2)))
        .collect()
}

/// Sum of the lattices attached to every element above `i` (inclusive).
fn up_sum(
    base: &Poset,
    m: usize,
    i: usize,
    attached: &[Vec<Vec<BigInt>>],
    extra: &[Vec<BigInt>],
) -> Lattice {
    let mut gens: Vec<Vec<BigInt>> = extra.to_vec();
    for j in base.up_set(i) {
        gens.extend(attached[j].iter().cloned());
    }
    Lattice::from_vecs(m, &gens)
}

fn small_factors(g: &FgAbGroup, max_factor: i64) -> bool {
    g.invariants()
        .torsion
        .iter()
        .all(|d| *d <= BigInt::from(max_factor))
}

/// A random unimodular `n × n` matrix and its inverse.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut u_inv = IntMatrix::identity(n);
    if n == 0 {
        return (u, u_inv);
    }
    for _ in 0..rng.gen_range(0..=4) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            u.negate_row(a);
            u_inv.negate_col(a);
        } else if rng.gen_bool(0.3) {
            u.swap_rows(a, b);
            u_inv.swap_cols(a, b);
        } else {
            let k = BigInt::from(*[-2i64, -1, 1, 2].choose(rng).unwrap());
            // row a += k row b; the inverse gets col b -= k col a
            u.add_row_multiple(a, b, &k);
            u_inv.add_col_multiple(b, a, &-&k);
        }
    }
    (u, u_inv)
}

/// Applies an independent random coordinate change at every element.
pub fn scramble<R: Rng>(rng: &mut R, s: &AbSystem) -> AbSystem {
    let (u, u_inv): (Vec<_>, Vec<_>) = s
        .groups()
        .iter()
        .map(|g| random_unimodular(rng, g.ngens()))
        .unzip();
    s.change_coordinates(&u, &u_inv)
}

/// The subquotient system `M_i / L_i` with bonds induced by inclusions
/// `M_j ⊆ M_i`, presented on the adapted basis of each `M_i`.
fn subquotient_system(
    base: &Poset,
    sub: &[Lattice],
    rel: &[Lattice],
) -> (Vec<FgAbGroup>, BTreeMap<(usize, usize), IntMatrix>) {
    let groups: Vec<FgAbGroup> = (0..base.len()).map(|i| sub[i].quotient(&rel[i])).collect();
    let mut bonds = BTreeMap::new();
    for &(lo, hi) in base.covers() {
        let cols: Vec<Vec<BigInt>> = sub[hi]
            .basis_vecs()
            .iter()
            .map(|b| {
                sub[lo]
                    .coordinates(b)
                    .expect("upper submodule is contained in the lower one")
            })
            .collect();
        let mat = IntMatrix::from_fn(sub[lo].rank(), cols.len(), |r, c| cols[c][r].clone());
        bonds.insert((lo, hi), mat);
    }
    (groups, bonds)
}

/// A random surjective system over `base`.
pub fn random_surjective_system<R: Rng>(rng: &mut R, base: &Poset, shape: GroupShape) -> AbSystem {
    random_system_inner(rng, base, shape, true)
}

/// A random system over `base` whose bonds need not be onto.
pub fn random_system<R: Rng>(rng: &mut R, base: &Poset, shape: GroupShape) -> AbSystem {
    random_system_inner(rng, base, shape, false)
}

fn random_system_inner<R: Rng>(
    rng: &mut R,
    base: &Poset,
    shape: GroupShape,
    surjective: bool,
) -> AbSystem {
    loop {
        let m = rng.gen_range(1..=shape.max_gens.max(1));
        let torsion: Vec<Vec<BigInt>> = if shape.finite {
            (0..m)
                .map(|c| unit(m, c, *PRIME_POWERS.choose(rng).unwrap()))
                .collect()
        } else {
            Vec::new()
        };
        let rel_gens: Vec<Vec<Vec<BigInt>>> = (0..base.len())
            .map(|_| {
                (0..rng.gen_range(0..=2))
                    .map(|_| random_relator(rng, m))
                    .collect()
            })
            .collect();
        let sub_gens: Vec<Vec<Vec<BigInt>>> = (0..base.len())
            .map(|_| {
                if surjective {
                    Vec::new()
                } else {
                    (0..rng.gen_range(0..=2))
                        .map(|_| random_vector(rng, m))
                        .collect()
                }
            })
            .collect();
        let rel: Vec<Lattice> = (0..base.len())
            .map(|i| up_sum(base, m, i, &rel_gens, &torsion))
            .collect();
        let sub: Vec<Lattice> = (0..base.len())
            .map(|i| {
                if surjective {
                    Lattice::full(m)
                } else {
                    up_sum(base, m, i, &sub_gens, &rel[i].basis_vecs())
                }
            })
            .collect();
        let (groups, bonds) = subquotient_system(base, &sub, &rel);
        if !groups.iter().all(|g| small_factors(g, shape.max_factor)) {
            continue;
        }
        let s = AbSystem::new(base.clone(), groups, bonds).expect("functorial by construction");
        return scramble(rng, &s);
    }
}

/// A random level-wise exact sequence `0 → A → B → C → 0` with `A` surjective.
///
/// `A_i = Z^a / L_i`, `C_i = M_i / K_i` and `B_i` is the extension of `C_i`
/// by `A_i` twisted by a fixed `φ: Z^c → Z^a`: generators `Z^a ⊕ M_i`,
/// relations `(l, 0)` for `l ∈ L_i` and `(φ k, k)` for `k ∈ K_i`.
pub fn random_exact_sequence<R: Rng>(
    rng: &mut R,
    base: &Poset,
    shape: GroupShape,
) -> ShortExactSequence {
    loop {
        let a = rng.gen_range(1..=shape.max_gens.max(1));
        let c = rng.gen_range(1..=shape.max_gens.max(1));
        let phi = IntMatrix::from_fn(a, c, |_, _| BigInt::from(rng.gen_range(-1..=2)));
        let n = base.len();
        let la_gens: Vec<Vec<Vec<BigInt>>> = (0..n)
            .map(|_| {
                (0..rng.gen_range(0..=2))
                    .map(|_| random_relator(rng, a))
                    .collect()
            })
            .collect();
        let kc_gens: Vec<Vec<Vec<BigInt>>> = (0..n)
            .map(|_| {
                (0..rng.gen_range(0..=2))
                    .map(|_| random_relator(rng, c))
                    .collect()
            })
            .collect();
        let mc_gens: Vec<Vec<Vec<BigInt>>> = (0..n)
            .map(|_| {
                (0..rng.gen_range(0..=1))
                    .map(|_| random_vector(rng, c))
                    .collect()
            })
            .collect();
        let la: Vec<Lattice> = (0..n).map(|i| up_sum(base, a, i, &la_gens, &[])).collect();
        let kc: Vec<Lattice> = (0..n).map(|i| up_sum(base, c, i, &kc_gens, &[])).collect();
        let mc: Vec<Lattice> = (0..n)
            .map(|i| up_sum(base, c, i, &mc_gens, &kc[i].basis_vecs()))
            .collect();
        let full_a: Vec<Lattice> = vec![Lattice::full(a); n];

        let (ga, ba) = subquotient_system(base, &full_a, &la);
        let (gc, bc) = subquotient_system(base, &mc, &kc);
        if !ga
            .iter()
            .chain(&gc)
            .all(|g| small_factors(g, shape.max_factor))
        {
            continue;
        }

        // B_i on generators Z^a ⊕ (basis of M_i)
        let mut gb = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let r = mc[i].rank();
            let mut rows: Vec<Vec<BigInt>> = Vec::new();
            for l in la[i].basis_vecs() {
                let mut row = l.clone();
                row.extend(std::iter::repeat_n(BigInt::zero(), r));
                rows.push(row);
            }
            for k in kc[i].basis_vecs() {
                let mut row = phi.mul_vec(&k);
                row.extend(
                    mc[i]
                        .coordinates(&k)
                        .expect("relations lie in the submodule"),
                );
                rows.push(row);
            }
            let rel = IntMatrix::from_rows_with_dims(rows.len(), a + r, &rows)
                .expect("rows have equal width");
            gb.push(FgAbGroup::new(a + r, rel).expect("widths agree"));
            // A_i is presented on the adapted basis of Z^a; map it to the standard one
            let to_std = full_a[i].basis().transpose();
            u.push(to_std.vstack(&IntMatrix::zeros(r, a)));
            let mut vi = IntMatrix::zeros(r, a + r);
            for t in 0..r {
                vi[(t, a + t)] = BigInt::one();
            }
            // C_i is presented on the adapted basis of M_i / K_i, which is the basis of M_i
            v.push(vi);
        }
        let mut bb = BTreeMap::new();
        for &(lo, hi) in base.covers() {
            let inc = &bc[&(lo, hi)];
            let top = IntMatrix::identity(a).hstack(&IntMatrix::zeros(a, inc.cols()));
            let bottom = IntMatrix::zeros(inc.rows(), a).hstack(inc);
            bb.insert((lo, hi), top.vstack(&bottom));
        }
        let sa = AbSystem::new(base.clone(), ga, ba).expect("functorial by construction");
        let sb = AbSystem::new(base.clone(), gb, bb).expect("functorial by construction");
        let sc = AbSystem::new(base.clone(), gc, bc).expect("functorial by construction");
        let seq = ShortExactSequence::new(sa, sb, sc, u, v).expect("exact by construction");
        return seq.scrambled(rng);
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::random::random_poset;

    #[test]
    fn unimodular_pairs_are_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..4 {
            let (u, ui) = random_unimodular(&mut rng, n);
            assert_eq!(&u * &ui, IntMatrix::identity(n));
        }
    }

    #[test]
    fn generated_systems_respect_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let p = random_poset(&mut rng, 4, 0.4);
            let s = random_surjective_system(&mut rng, &p, GroupShape::default());
            assert!(s.is_surjective());
            for g in s.groups() {
                assert!(g.ngens() <= 3);
                assert!(small_factors(g, 8));
            }
            let f = random_system(
                &mut rng,
                &p,
                GroupShape {
                    finite: true,
                    ..GroupShape::default()
                },
            );
            assert!(f.groups().iter().all(|g| g.order().is_some()));
        }
    }
}
