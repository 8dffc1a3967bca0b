//! Mittag-Leffler analysis and universal images of truncated towers.

use invlim::sets::{MlVerdict, Tower};

fn report(name: &str, t: &Tower) {
    let r = t.ml_report();
    println!("{name} (horizon {}):", r.horizon);
    for l in &r.levels {
        let v = match l.verdict {
            MlVerdict::Stable { from } => format!("stable from {from}"),
            MlVerdict::UnstableAtHorizon => "unstable at horizon".into(),
        };
        let sizes: Vec<usize> = l.images.iter().map(Vec::len).collect();
        println!(
            "  level {}: image sizes {sizes:?}, {v}{}",
            l.level,
            if l.horizon_sensitive {
                " (horizon-sensitive)"
            } else {
                ""
            }
        );
    }
    let ui = t.universal_images();
    let carriers: Vec<usize> = (0..=t.horizon())
        .map(|n| ui.system.carrier(n).len())
        .collect();
    println!(
        "  universal image sizes {carriers:?}, restricted bonds surjective: {}",
        ui.all_restricted_surjective()
    );
}

fn main() {
    let clip = Tower::clipped_decrement(3, 8);
    report("clipped decrement on {0..3}", &clip);
    let thread = clip.lift_thread(0).unwrap();
    println!("  thread from 0: {:?}", thread.values());

    let h = 6;
    let shrinking = Tower::from_rule(
        (0..=h as i64)
            .map(|n| (0..=(h as i64 - n)).collect())
            .collect(),
        |_, x| (x - 1).max(0),
    )
    .unwrap();
    report("shrinking carriers", &shrinking);

    // a tower whose bonds are identities is stable from the start
    let id = Tower::from_rule(vec![vec![0, 1, 2]; 5], |_, x| x).unwrap();
    report("identity tower", &id);
}
