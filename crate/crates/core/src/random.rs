//! Seeded generators of random posets, set systems and towers.
//!
//! Every generator takes an explicit RNG so runs are reproducible from a seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::poset::Poset;
use crate::sets::{SetSystem, Tower};

/// A random poset on `1..=max_len` elements labelled `p0`, `p1`, ….
///
/// Each pair `i < j` of positions is related with probability `density`;
/// the stored covers are the transitive reduction.
pub fn random_poset<R: Rng>(rng: &mut R, max_len: usize, density: f64) -> Poset {
    let n = rng.gen_range(1..=max_len.max(1));
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            rel[i][j] = rng.gen_bool(density);
        }
    }
    from_strict_relation(n, rel, rng)
}

/// A random poset whose last-generated element is a maximum.
pub fn random_poset_with_maximum<R: Rng>(rng: &mut R, max_len: usize, density: f64) -> Poset {
    let n = rng.gen_range(1..=max_len.max(1));
    let mut rel = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            rel[i][j] = j == n - 1 || rng.gen_bool(density);
        }
    }
    from_strict_relation(n, rel, rng)
}

fn from_strict_relation<R: Rng>(n: usize, mut rel: Vec<Vec<bool>>, rng: &mut R) -> Poset {
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let mut covers = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rel[i][j] && !(0..n).any(|k| rel[i][k] && rel[k][j]) {
                covers.push((i, j));
            }
        }
    }
    // shuffle positions so index order is not a linear extension
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let labels = (0..n).map(|k| format!("p{k}")).collect();
    let p = Poset::from_indices(labels, covers).expect("acyclic by construction");
    p.permute(&perm)
}

/// A random functorial set system with carriers of size `1..=max_carrier`.
///
/// Values come from a pool of points, each living on a down-set; a point's
/// class at `i` maps to its class at every `h <= i`. Classes only merge on
/// the way down, which makes the bonds well defined and functorial. With
/// `surjective` every point lives everywhere, so every bond is onto.
pub fn random_set_system<R: Rng>(
    rng: &mut R,
    base: &Poset,
    max_carrier: usize,
    surjective: bool,
) -> SetSystem {
    let n = base.len();
    let pool = rng.gen_range(1..=max_carrier.max(1) + 2);
    // lives[u][i]: point u is defined at element i
    let mut lives: Vec<Vec<bool>> = (0..pool)
        .map(|_| {
            if surjective || rng.gen_bool(0.5) {
                vec![true; n]
            } else {
                let top = rng.gen_range(0..n);
                (0..n).map(|i| base.leq(i, top)).collect()
            }
        })
        .collect();
    for i in 0..n {
        if !lives.iter().any(|l| l[i]) {
            lives.push((0..n).map(|h| base.leq(h, i)).collect());
        }
    }
    let pool = lives.len();

    // class[i][u] for points living at i, filled top-down
    let mut class: Vec<Vec<Option<usize>>> = vec![vec![None; pool]; n];
    let mut order = base.linear_extension();
    order.reverse();
    for &i in &order {
        let members: Vec<usize> = (0..pool).filter(|&u| lives[u][i]).collect();
        let mut uf: Vec<usize> = (0..pool).collect();
        // inherit identifications from everything above
        for &j in &base.strict_upper_bounds(i) {
            for &a in &members {
                for &b in &members {
                    if a < b && lives[a][j] && lives[b][j] && class[j][a] == class[j][b] {
                        union(&mut uf, a, b);
                    }
                }
            }
        }
        for &a in &members {
            if rng.gen_bool(0.25) {
                let b = *members.choose(rng).unwrap();
                union(&mut uf, a, b);
            }
        }
        loop {
            let mut roots: Vec<usize> = members.iter().map(|&u| find(&mut uf, u)).collect();
            roots.sort_unstable();
            roots.dedup();
            if roots.len() <= max_carrier.max(1) {
                let pos: BTreeMap<usize, usize> =
                    roots.iter().enumerate().map(|(k, &r)| (r, k)).collect();
                for &u in &members {
                    class[i][u] = Some(pos[&find(&mut uf, u)]);
                }
                break;
            }
            let a = *roots.choose(rng).unwrap();
            let b = *roots.iter().find(|&&r| r != a).unwrap();
            union(&mut uf, a, b);
        }
    }

    let carriers: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let size = class[i].iter().flatten().max().map_or(0, |m| m + 1);
            (0..size).map(|k| format!("v{k}")).collect()
        })
        .collect();
    let mut bonds = BTreeMap::new();
    for &(lo, hi) in base.covers() {
        let mut table = vec![0; carriers[hi].len()];
        for u in 0..pool {
            if let Some(c) = class[hi][u] {
                table[c] = class[lo][u].expect("points live on down-sets");
            }
        }
        bonds.insert((lo, hi), table);
    }
    SetSystem::new(base.clone(), carriers, bonds).expect("functorial by construction")
}

fn find(uf: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while uf[r] != r {
        r = uf[r];
    }
    uf[x] = r;
    r
}

fn union(uf: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(uf, a), find(uf, b));
    if ra != rb {
        uf[ra.max(rb)] = ra.min(rb);
    }
}

/// A random tower of the given horizon with carriers of size `1..=max_carrier`
/// and arbitrary bonds.
pub fn random_tower<R: Rng>(rng: &mut R, horizon: usize, max_carrier: usize) -> Tower {
    let sizes: Vec<usize> = (0..=horizon)
        .map(|_| rng.gen_range(1..=max_carrier.max(1)))
        .collect();
    let carriers = sizes
        .iter()
        .map(|&s| (0..s).map(|k| k.to_string()).collect())
        .collect();
    let bonds = (0..horizon)
        .map(|n| {
            (0..sizes[n + 1])
                .map(|_| rng.gen_range(0..sizes[n]))
                .collect()
        })
        .collect();
    Tower::new(carriers, bonds).expect("random bonds are functions")
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn generated_posets_have_requested_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = random_poset_with_maximum(&mut rng, 5, 0.3);
            assert!(p.len() <= 5);
            assert!(p.maximum().is_some());
            for &(a, b) in p.covers() {
                assert!(
                    !(0..p.len()).any(|k| p.lt(a, k) && p.lt(k, b)),
                    "covers are reduced"
                );
            }
        }
    }

    #[test]
    fn surjective_generator_is_surjective() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let p = random_poset(&mut rng, 5, 0.4);
            let s = random_set_system(&mut rng, &p, 4, true);
            assert!(s.is_surjective().surjective);
            assert!(s.carriers().iter().all(|c| !c.is_empty() && c.len() <= 4));
        }
    }
}
