//! Building finite posets and inspecting their order structure.

use invlim::poset::Poset;

fn main() {
    let p = Poset::new(
        &["a", "b", "c", "d"],
        &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
    )
    .expect("valid diamond");
    println!("elements: {:?}", p.labels());
    println!(
        "linear extension: {:?}",
        p.linear_extension()
            .iter()
            .map(|&i| p.label(i))
            .collect::<Vec<_>>()
    );
    println!("maximum: {:?}", p.maximum().map(|i| p.label(i)));
    println!("directed: {}", p.is_directed());
    println!("height: {}", p.height());
    for n in 0..=p.height() {
        println!("flags of degree {n}: {}", p.flag_count(n));
    }

    let w = Poset::wedge();
    println!(
        "wedge maximal elements: {:?}",
        w.maximal_elements()
            .iter()
            .map(|&i| w.label(i))
            .collect::<Vec<_>>()
    );
    println!(
        "wedge directed: {}, cofinal chain: {:?}",
        w.is_directed(),
        w.cofinal_chain()
    );

    let g = Poset::grid(2, 3);
    let chain = g.cofinal_chain().expect("a grid has a maximum");
    println!(
        "grid 2x3 cofinal chain: {:?}",
        chain.iter().map(|&i| g.label(i)).collect::<Vec<_>>()
    );

    match Poset::new(&["x", "y"], &[("x", "y"), ("y", "x")]) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
