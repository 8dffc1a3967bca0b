use std::collections::BTreeSet;

use invlim::abelian::{smith_normal_form, IntMatrix, Lattice};
use invlim::constructions::{henkin_enumerate, henkin_eps};
use invlim::derived::{derived_limit, limit_elements, nerve_complex, random, DEFAULT_FLAG_BUDGET};
use invlim::random::{random_poset, random_poset_with_maximum, random_set_system, random_tower};
use invlim::sets::DEFAULT_BUDGET;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-12i64..=12, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_is_a_unimodular_diagonalization(rows in small_matrix()) {
        let m = IntMatrix::from_rows(&rows).unwrap();
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        prop_assert!((&s.v * &s.v_inv) == IntMatrix::identity(s.v.rows()));
        let f = s.invariant_factors();
        prop_assert!(f.iter().all(|x| x.is_positive()));
        prop_assert!(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        // kernel basis really is in the kernel
        let k = s.kernel_basis();
        for j in 0..k.cols() {
            prop_assert!(m.mul_vec(&k.col(j)).iter().all(Zero::is_zero));
        }
        prop_assert_eq!(k.cols() + s.rank(), m.cols());
    }

    #[test]
    fn lattice_operations_are_consistent(a in small_matrix(), b in small_matrix()) {
        let dim = a[0].len();
        let b: Vec<Vec<i64>> = b.into_iter().map(|mut r| { r.resize(dim, 0); r }).collect();
        let la = Lattice::from_rows(dim, &IntMatrix::from_rows(&a).unwrap());
        let lb = Lattice::from_rows(dim, &IntMatrix::from_rows(&b).unwrap());
        let meet = la.intersect(&lb);
        let join = la.sum(&lb);
        prop_assert!(la.contains_lattice(&meet) && lb.contains_lattice(&meet));
        prop_assert!(join.contains_lattice(&la) && join.contains_lattice(&lb));
        for v in la.basis_vecs() {
            prop_assert!(la.contains(&v));
        }
        // preimage under the identity is the lattice itself
        prop_assert!(Lattice::preimage(&IntMatrix::identity(dim), &la).same_as(&la));
    }

    #[test]
    fn limit_threads_are_threads_and_invariant_under_relabelling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 5, 0.4);
        let s = random_set_system(&mut rng, &p, 3, false);
        let threads = s.limit_threads(DEFAULT_BUDGET).unwrap();
        prop_assert!(threads.iter().all(|t| s.is_thread(t)));
        let distinct: BTreeSet<_> = threads.iter().map(|t| t.0.clone()).collect();
        prop_assert_eq!(distinct.len(), threads.len());
        // relabelling the base changes nothing about the limit
        let fresh: Vec<String> = (0..p.len()).map(|i| format!("q{i}")).collect();
        let q = p.relabel(fresh).unwrap();
        let s2 = invlim::sets::SetSystem::new(q, s.carriers().to_vec(), s.declared_bonds().clone()).unwrap();
        prop_assert_eq!(s2.limit_threads(DEFAULT_BUDGET).unwrap().len(), threads.len());
    }

    #[test]
    fn universal_images_keep_the_limit(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 5, 0.4);
        let s = random_set_system(&mut rng, &p, 3, false);
        let ui = s.universal_images();
        prop_assert_eq!(
            ui.system.limit_threads(DEFAULT_BUDGET).unwrap().len(),
            s.limit_threads(DEFAULT_BUDGET).unwrap().len()
        );
    }

    #[test]
    fn ml_stable_towers_restrict_surjectively(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tower(&mut rng, 8, 3);
        if t.ml_report().stable_everywhere() {
            prop_assert!(t.universal_images().all_restricted_surjective());
        }
    }

    #[test]
    fn nerve_differentials_square_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 5, 0.5);
        let s = random::random_system(&mut rng, &p, random::GroupShape::default());
        prop_assert!(nerve_complex(&s, DEFAULT_FLAG_BUDGET).unwrap().is_complex());
    }

    #[test]
    fn derived_limits_ignore_presentation_and_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 4, 0.5);
        let s = random::random_system(&mut rng, &p, random::GroupShape::default());
        let scrambled = random::scramble(&mut rng, &s);
        let mut perm: Vec<usize> = (0..p.len()).collect();
        perm.shuffle(&mut rng);
        let permuted = s.permuted(&perm);
        for n in 0..=p.height() {
            let want = derived_limit(&s, n, DEFAULT_FLAG_BUDGET).unwrap().invariants();
            prop_assert_eq!(&derived_limit(&scrambled, n, DEFAULT_FLAG_BUDGET).unwrap().invariants(), &want);
            prop_assert_eq!(&derived_limit(&permuted, n, DEFAULT_FLAG_BUDGET).unwrap().invariants(), &want);
        }
    }

    #[test]
    fn finite_h0_counts_threads(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 4, 0.5);
        let shape = random::GroupShape { max_gens: 2, max_factor: 4, finite: true };
        let s = random::random_system(&mut rng, &p, shape);
        let sets = s.underlying_sets(512).expect("small finite groups");
        let threads = sets.limit_threads(DEFAULT_BUDGET).unwrap();
        let elements = limit_elements(&s, 4096, DEFAULT_FLAG_BUDGET).unwrap().unwrap();
        prop_assert_eq!(elements.len(), threads.len());
    }

    #[test]
    fn surjective_systems_with_a_maximum_are_acyclic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset_with_maximum(&mut rng, 5, 0.3);
        let s = random::random_surjective_system(&mut rng, &p, random::GroupShape::default());
        for n in 1..=p.height() {
            prop_assert!(derived_limit(&s, n, DEFAULT_FLAG_BUDGET).unwrap().is_trivial());
        }
    }

    #[test]
    fn henkin_bonds_compose_on_random_posets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 4, 0.5);
        for (b, c) in p.order_pairs() {
            for t in henkin_enumerate(&p, c, 4) {
                let tb = henkin_eps(&p, b, c, &t).unwrap();
                for a in (0..p.len()).filter(|&a| p.leq(a, b)) {
                    prop_assert_eq!(henkin_eps(&p, a, b, &tb).unwrap(), henkin_eps(&p, a, c, &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn linear_extensions_respect_the_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, 6, 0.4);
        let ext = p.linear_extension();
        let pos: Vec<usize> = {
            let mut v = vec![0; p.len()];
            for (k, &i) in ext.iter().enumerate() { v[i] = k; }
            v
        };
        for (i, j) in p.order_pairs() {
            prop_assert!(pos[i] <= pos[j]);
        }
        for n in 0..=p.height() {
            for f in p.flags(n) {
                prop_assert!(f.windows(2).all(|w| p.lt(w[0], w[1])));
            }
            prop_assert_eq!(p.flags(n).len() as u128, p.flag_count(n));
        }
    }
}

#[test]
fn h0_torsion_is_bounded_by_the_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let p = random_poset(&mut rng, 4, 0.5);
        let s = random::random_system(&mut rng, &p, random::GroupShape::default());
        let h0 = derived_limit(&s, 0, DEFAULT_FLAG_BUDGET)
            .unwrap()
            .invariants();
        let max_rank: usize = s.groups().iter().map(|g| g.invariants().free_rank).sum();
        assert!(h0.free_rank <= max_rank);
        assert!(h0.torsion.iter().all(|t| *t > BigInt::from(1)));
    }
}
