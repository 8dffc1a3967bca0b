//! Smith normal form and finitely generated abelian groups.

use invlim::abelian::{smith_normal_form, AbHom, FgAbGroup, IntMatrix};
use num_bigint::BigInt;

fn main() {
    let m = IntMatrix::from_rows(&[vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
    let s = smith_normal_form(&m);
    println!("invariant factors: {:?}", s.invariant_factors());
    assert_eq!(&(&s.u * &m) * &s.v, s.d);
    println!(
        "U m V = D checked; det U = {}, det V = {}",
        s.u.determinant(),
        s.v.determinant()
    );

    // Z^2 / <(2,0),(0,4)> and the projection onto Z/2
    let a = FgAbGroup::new(
        2,
        IntMatrix::from_rows(&[vec![2i64, 0], vec![0, 4]]).unwrap(),
    )
    .unwrap();
    let b = FgAbGroup::cyclic(2);
    println!("A: {}, order {:?}", a.invariants(), a.order());
    let f = AbHom::new(
        a.clone(),
        b.clone(),
        IntMatrix::from_rows(&[vec![1i64, 0]]).unwrap(),
    )
    .unwrap();
    println!("kernel: {}", f.kernel().invariants());
    println!("image: {}", f.image().invariants());
    println!("cokernel: {}", f.cokernel().invariants());
    println!(
        "surjective: {}, injective: {}",
        f.is_surjective(),
        f.is_injective()
    );

    // presentations with redundant relations reduce to the same invariants
    let c = FgAbGroup::new(
        3,
        IntMatrix::from_rows(&[vec![6i64, 4, 0], vec![0, 2, 2], vec![0, 0, 0]]).unwrap(),
    )
    .unwrap();
    println!("C: {}", c.invariants());
    let x: Vec<BigInt> = vec![3.into(), 2.into(), 0.into()];
    println!("(3,2,0) canonical form in C: {:?}", c.canonical(&x));

    // a hom that does not respect relations is rejected
    match AbHom::new(b, a, IntMatrix::from_rows(&[vec![0i64], vec![1]]).unwrap()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
