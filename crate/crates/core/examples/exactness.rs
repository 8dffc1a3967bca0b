//! Exactness of the limit functor on short exact sequences of systems.

use invlim::derived::{limit_exactness_check, random, DEFAULT_FLAG_BUDGET};
use invlim::poset::Poset;
use invlim::random::random_poset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shape = random::GroupShape::default();

    println!("surjective kernels over a poset with a maximum:");
    let p = Poset::grid(2, 2);
    for _ in 0..3 {
        let seq = random::random_exact_sequence(&mut rng, &p, shape);
        let r = limit_exactness_check(&seq, DEFAULT_FLAG_BUDGET).unwrap();
        println!(
            "  lim A = {}, lim B = {}, lim C = {}, lim v onto: {}",
            r.lim_a, r.lim_b, r.lim_c, r.lim_v_surjective
        );
    }

    println!("arbitrary posets: the cokernel of lim v embeds in lim^1 A");
    for _ in 0..5 {
        let q = random_poset(&mut rng, 5, 0.4);
        let seq = random::random_exact_sequence(&mut rng, &q, shape);
        let r = limit_exactness_check(&seq, DEFAULT_FLAG_BUDGET).unwrap();
        println!(
            "  {} elements: coker lim v = {}, lim^1 A = {}, connecting map exact: {}",
            q.len(),
            r.coker_lim_v,
            r.lim1_a,
            r.connecting_exact
        );
    }
}
