use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{smith_normal_form, FgAbGroup, IntMatrix};

/// A subgroup of `Z^dim`, stored through an adapted basis.
///
/// With `w_k` the rows of a unimodular matrix `v_inv`, the lattice is
/// `⊕_{k < rank} d_k · Z w_k`. Coordinates of a row vector `x` in the `w`
/// basis are `x · v`, which makes membership a divisibility test.
#[derive(Debug, Clone)]
pub struct Lattice {
    dim: usize,
    factors: Vec<BigInt>,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Lattice {
    /// The lattice spanned by the rows of `gens` (`k × dim`).
    pub fn from_rows(dim: usize, gens: &IntMatrix) -> Lattice {
        assert_eq!(gens.cols(), dim, "generator rows must have length {dim}");
        let s = smith_normal_form(gens);
        Lattice {
            dim,
            factors: s.invariant_factors(),
            v: s.v,
            v_inv: s.v_inv,
        }
    }

    pub fn from_vecs(dim: usize, gens: &[Vec<BigInt>]) -> Lattice {
        let m = if gens.is_empty() {
            IntMatrix::zeros(0, dim)
        } else {
            IntMatrix::from_rows(gens).expect("generators of equal length")
        };
        Lattice::from_rows(dim, &m)
    }

    pub fn zero(dim: usize) -> Lattice {
        Lattice::from_rows(dim, &IntMatrix::zeros(0, dim))
    }

    pub fn full(dim: usize) -> Lattice {
        Lattice::from_rows(dim, &IntMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Basis vectors as rows (`rank × dim`).
    pub fn basis(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rank(), self.dim, |k, j| {
            &self.factors[k] * &self.v_inv[(k, j)]
        })
    }

    pub fn basis_vecs(&self) -> Vec<Vec<BigInt>> {
        self.basis().row_vecs()
    }

    /// Invariant factors and the coordinate change `v` of the adapted basis.
    pub(crate) fn adapted(&self) -> (&[BigInt], &IntMatrix) {
        (&self.factors, &self.v)
    }

    pub(crate) fn adapted_inverse(&self) -> &IntMatrix {
        &self.v_inv
    }

    /// Coefficients of `x` in [`Lattice::basis`], or `None` if `x` is not in the lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(x.len(), self.dim, "vector has the wrong length");
        let y = self.v.vec_mul(x);
        let mut out = Vec::with_capacity(self.rank());
        for (k, yk) in y.iter().enumerate() {
            if k < self.rank() {
                let (q, r) = yk.div_rem(&self.factors[k]);
                if !r.is_zero() {
                    return None;
                }
                out.push(q);
            } else if !yk.is_zero() {
                return None;
            }
        }
        Some(out)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        assert_eq!(self.dim, other.dim, "lattices live in different spaces");
        other.basis_vecs().iter().all(|b| self.contains(b))
    }

    pub fn same_as(&self, other: &Lattice) -> bool {
        self.rank() == other.rank() && self.contains_lattice(other) && other.contains_lattice(self)
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim, "lattices live in different spaces");
        Lattice::from_rows(self.dim, &self.basis().vstack(&other.basis()))
    }

    /// `{ m · x : x ∈ self }` where `m` is `out × dim`.
    pub fn image(&self, m: &IntMatrix) -> Lattice {
        assert_eq!(m.cols(), self.dim, "map has the wrong source dimension");
        let gens = &self.basis() * &m.transpose();
        Lattice::from_rows(m.rows(), &gens)
    }

    /// `{ x ∈ Z^{m.cols} : m · x ∈ target }`.
    pub fn preimage(m: &IntMatrix, target: &Lattice) -> Lattice {
        assert_eq!(m.rows(), target.dim, "map has the wrong target dimension");
        let a = m.cols();
        // kernel of [m | -B^T] over (x, t), projected to x
        let bt = target.basis().transpose();
        let combined = m.hstack(&-&bt);
        let kernel = smith_normal_form(&combined).kernel_basis();
        let gens = kernel.select_rows(0..a).transpose();
        Lattice::from_rows(a, &gens)
    }

    /// Intersection with another lattice of the same dimension.
    pub fn intersect(&self, other: &Lattice) -> Lattice {
        let bt = self.basis().transpose();
        Lattice::preimage(&bt, other).image(&bt)
    }

    /// The group `self / sub`, presented on the basis of `self`.
    ///
    /// Panics if `sub` is not contained in `self`.
    pub fn quotient(&self, sub: &Lattice) -> FgAbGroup {
        let rels: Vec<Vec<BigInt>> = sub
            .basis_vecs()
            .iter()
            .map(|b| {
                self.coordinates(b)
                    .expect("sublattice must be contained in the lattice")
            })
            .collect();
        let relations = if rels.is_empty() {
            IntMatrix::zeros(0, self.rank())
        } else {
            IntMatrix::from_rows(&rels).unwrap()
        };
        FgAbGroup::new(self.rank(), relations).expect("relation width matches the basis")
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.same_as(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn membership() {
        let l = Lattice::from_vecs(2, &[v(&[2, 0]), v(&[0, 4]), v(&[2, 4])]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&v(&[4, 8])));
        assert!(!l.contains(&v(&[1, 0])));
        assert!(!l.contains(&v(&[0, 2])));
        let c = l.coordinates(&v(&[2, 4])).unwrap();
        assert_eq!(l.basis().vec_mul(&c), v(&[2, 4]));
    }

    #[test]
    fn preimage_of_even_under_doubling_is_everything() {
        let m = IntMatrix::from_rows(&[vec![2i64]]).unwrap();
        let even = Lattice::from_vecs(1, &[v(&[2])]);
        assert_eq!(Lattice::preimage(&m, &even), Lattice::full(1));
        let four = Lattice::from_vecs(1, &[v(&[4])]);
        assert_eq!(
            Lattice::preimage(&m, &four),
            Lattice::from_vecs(1, &[v(&[2])])
        );
    }

    #[test]
    fn intersection() {
        let a = Lattice::from_vecs(1, &[v(&[4])]);
        let b = Lattice::from_vecs(1, &[v(&[6])]);
        assert_eq!(a.intersect(&b), Lattice::from_vecs(1, &[v(&[12])]));
        assert_eq!(a.sum(&b), Lattice::from_vecs(1, &[v(&[2])]));
    }

    #[test]
    fn quotient_invariants() {
        let full = Lattice::full(2);
        let sub = Lattice::from_vecs(2, &[v(&[2, 0]), v(&[0, 4])]);
        let g = full.quotient(&sub);
        let inv = g.invariants();
        assert_eq!(inv.free_rank, 0);
        assert_eq!(inv.torsion, v(&[2, 4]));
    }
}
