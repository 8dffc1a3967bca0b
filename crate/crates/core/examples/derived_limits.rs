//! Derived limits through the nerve cochain complex.

use std::collections::BTreeMap;

use invlim::abelian::{FgAbGroup, IntMatrix};
use invlim::derived::{derived_limit, nerve_complex, random, AbSystem, DEFAULT_FLAG_BUDGET};
use invlim::poset::Poset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(name: &str, s: &AbSystem) {
    let cx = nerve_complex(s, DEFAULT_FLAG_BUDGET).unwrap();
    print!("{name}:");
    for n in 0..=cx.top_degree() {
        print!("  lim^{n} = {}", cx.cohomology(n).invariants());
    }
    println!();
}

fn main() {
    // zero groups over the two maximal elements, Z over the bottom
    let mut bonds = BTreeMap::new();
    bonds.insert((2, 0), IntMatrix::zeros(1, 0));
    bonds.insert((2, 1), IntMatrix::zeros(1, 0));
    let zero = FgAbGroup::trivial();
    let wedge = AbSystem::new(
        Poset::wedge(),
        vec![zero.clone(), zero, FgAbGroup::free(1)],
        bonds,
    )
    .unwrap();
    show("wedge with Z at the bottom", &wedge);

    show(
        "constant Z over the crown",
        &AbSystem::constant(Poset::crown(), FgAbGroup::free(1)),
    );
    show(
        "constant Z/6 over a 2x2 grid",
        &AbSystem::constant(Poset::grid(2, 2), FgAbGroup::cyclic(6)),
    );

    // random surjective systems over a poset with a maximum have no higher limits
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = Poset::grid(2, 2);
    for k in 0..3 {
        let s = random::random_surjective_system(&mut rng, &p, random::GroupShape::default());
        let groups: Vec<String> = s
            .groups()
            .iter()
            .map(|g| g.invariants().to_string())
            .collect();
        println!("random surjective system {k}: groups {groups:?}");
        println!(
            "  lim = {}, lim^1 = {}",
            derived_limit(&s, 0, DEFAULT_FLAG_BUDGET)
                .unwrap()
                .invariants(),
            derived_limit(&s, 1, DEFAULT_FLAG_BUDGET)
                .unwrap()
                .invariants()
        );
    }
}
