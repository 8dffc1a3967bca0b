//! The even-tuple system: members, bonds, lifts and cofinal families.

use invlim::constructions::{
    cofinal_extract, family_by_lifting, family_from_top, format_tuple, henkin_enumerate,
    henkin_eps, henkin_lift, henkin_system, same_length_ending_violation,
    same_length_level_violation,
};
use invlim::poset::Poset;
use invlim::sets::DEFAULT_BUDGET;

fn main() {
    let p = Poset::chain(3);
    for a in 0..p.len() {
        let ts: Vec<String> = henkin_enumerate(&p, a, 4)
            .iter()
            .map(|t| format_tuple(&p, t))
            .collect();
        println!("E_{} up to length 4: {}", p.label(a), ts.join(" "));
    }

    let t = vec![0, 2, 1, 2];
    println!(
        "eps(1,2) {} = {}",
        format_tuple(&p, &t),
        format_tuple(&p, &henkin_eps(&p, 0, 1, &t).unwrap())
    );

    let x = vec![0, 1];
    let y = henkin_lift(&p, 0, &x, 1, None).unwrap();
    println!(
        "lift of {} to level 2: {}, mapped back: {}",
        format_tuple(&p, &x),
        format_tuple(&p, &y),
        format_tuple(&p, &henkin_eps(&p, 0, 1, &y).unwrap())
    );

    // cutting at a length bound breaks surjectivity at the longest tuples
    let s = henkin_system(&p, 4);
    println!(
        "truncated system surjective: {}, threads: {}",
        s.is_surjective().surjective,
        s.limit_threads(DEFAULT_BUDGET).unwrap().len()
    );

    let fam = family_from_top(&p, &[2, 2]).unwrap();
    let shown: Vec<String> = fam.iter().map(|t| format_tuple(&p, t)).collect();
    println!("family from (3,3): {}", shown.join(" "));
    println!(
        "cofinal ending coordinates: {:?}",
        cofinal_extract(&p, &fam)
            .unwrap()
            .iter()
            .map(|&i| p.label(i))
            .collect::<Vec<_>>()
    );
    println!(
        "same length, different level: {:?}",
        same_length_level_violation(&fam)
    );
    println!(
        "same length, different ending: {:?}",
        same_length_ending_violation(&fam)
    );

    let g = Poset::grid(2, 2);
    let fam = family_by_lifting(&g, 0, &[0, 0]).unwrap();
    let shown: Vec<String> = fam.iter().map(|t| format_tuple(&g, t)).collect();
    println!("grid family by lifting: {}", shown.join(" "));
}
