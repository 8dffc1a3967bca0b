//! The G-set construction on a finite truncation, with the demo ledger.

use invlim::constructions::{
    bergman_demo, coset_equal, d_map, gset_bond, h_subgroup_member, CosetElement, FreeAbElement,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let n = 4;
    let r = FreeAbElement::relator(1, 2, 3);
    println!("relator: {r}");
    println!(
        "  in H_1: {}, in H_2: {}",
        h_subgroup_member(&r, 1, n).unwrap(),
        h_subgroup_member(&r, 2, n).unwrap()
    );
    println!("  D(relator) = {}", d_map(&r));
    println!("D(g(1,3)) = {}", d_map(&FreeAbElement::g(1, 3)));

    let x = CosetElement {
        level: 3,
        rep: FreeAbElement::g(3, 4),
    };
    let two_steps = gset_bond(1, 2, &gset_bond(2, 3, &x).unwrap()).unwrap();
    let one_step = gset_bond(1, 3, &x).unwrap();
    println!("bond(1,2) bond(2,3) x = {}", two_steps.rep);
    println!("bond(1,3) x = {}", one_step.rep);
    println!(
        "equal as cosets of H_1: {}",
        coset_equal(&two_steps, &one_step, n).unwrap()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let ledger = bergman_demo(&mut rng, 5).unwrap();
    println!("demo on 1..{}:", ledger.n);
    for s in &ledger.steps {
        println!(
            "  ({}) holds={} expected={}  {}",
            s.step, s.holds, s.expected, s.statement
        );
    }
    println!("all steps as expected: {}", ledger.as_expected());
}
