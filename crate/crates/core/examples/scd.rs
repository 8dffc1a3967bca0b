//! Sampled surjective cohomological dimension of small posets.

use invlim::derived::{scd_finite, DEFAULT_FLAG_BUDGET};
use invlim::poset::Poset;

fn main() {
    let cases = [
        ("chain of 4", Poset::chain(4)),
        ("2x2 grid", Poset::grid(2, 2)),
        ("wedge", Poset::wedge()),
        ("crown", Poset::crown()),
    ];
    for (name, p) in cases {
        let est = scd_finite(&p, 30, 0, DEFAULT_FLAG_BUDGET).unwrap();
        println!(
            "{name}: lower bound {} (witness {:?}, {} trials)",
            est.degree, est.witness_trial, est.trials
        );
    }
}
