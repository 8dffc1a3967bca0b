//! Threads of inverse systems of finite sets.

use std::collections::BTreeMap;

use invlim::poset::Poset;
use invlim::sets::{SetSystem, DEFAULT_BUDGET};

fn main() {
    // the constant system {0,1} over a chain of length n has 2 threads,
    // while the discrete product of n copies of {0,1} over an antichain has 2^n
    let n = 4;
    let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let antichain = Poset::new(&labels, &[]).unwrap();
    let bits = vec![vec!["0".to_string(), "1".to_string()]; n];
    let product = SetSystem::new(antichain, bits.clone(), BTreeMap::new()).unwrap();
    println!(
        "antichain of {n}: {} threads",
        product.limit_threads(DEFAULT_BUDGET).unwrap().len()
    );

    let chain = Poset::chain(n);
    let bonds = (0..n - 1).map(|i| ((i, i + 1), vec![0, 1])).collect();
    let constant = SetSystem::new(chain, bits, bonds).unwrap();
    println!(
        "chain of {n}: {} threads",
        constant.limit_threads(DEFAULT_BUDGET).unwrap().len()
    );

    // a surjective system over a poset with a maximum: every top value extends
    let w = Poset::new(
        &["a", "b", "c", "t"],
        &[("c", "a"), ("c", "b"), ("a", "t"), ("b", "t")],
    )
    .unwrap();
    let s = SetSystem::from_labels(
        w,
        vec![
            vec!["a0".into(), "a1".into()],
            vec!["b0".into()],
            vec!["c0".into()],
            vec!["t0".into(), "t1".into(), "t2".into()],
        ],
        vec![
            (
                0,
                2,
                vec![("a0".into(), "c0".into()), ("a1".into(), "c0".into())],
            ),
            (1, 2, vec![("b0".into(), "c0".into())]),
            (
                3,
                0,
                vec![
                    ("t0".into(), "a0".into()),
                    ("t1".into(), "a1".into()),
                    ("t2".into(), "a1".into()),
                ],
            ),
            (
                3,
                1,
                vec![
                    ("t0".into(), "b0".into()),
                    ("t1".into(), "b0".into()),
                    ("t2".into(), "b0".into()),
                ],
            ),
        ],
    )
    .unwrap();
    println!("surjective: {}", s.is_surjective().surjective);
    for t in s.limit_threads(DEFAULT_BUDGET).unwrap() {
        println!("  {}", s.describe_thread(&t));
    }
    let top = s.thread_from_top().unwrap();
    println!("thread from the top: {}", s.describe_thread(&top));

    // the enumeration budget guards against exponential blowup
    match product_of(20).limit_threads(1000) {
        Ok(_) => unreachable!(),
        Err(e) => println!("antichain of 20: {e}"),
    }
}

fn product_of(n: usize) -> SetSystem {
    let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let p = Poset::new(&labels, &[]).unwrap();
    SetSystem::new(p, vec![vec!["0".into(), "1".into()]; n], BTreeMap::new()).unwrap()
}
