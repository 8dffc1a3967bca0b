use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{smith_normal_form, AbError, IntMatrix, Lattice};

/// `Z^ngens` modulo the row span of `relations`.
#[derive(Debug, Clone)]
pub struct FgAbGroup {
    ngens: usize,
    relations: IntMatrix,
    lattice: OnceLock<Lattice>,
}

/// Isomorphism invariants: free rank and the invariant factors `> 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupInvariants {
    pub free_rank: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl GroupInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for GroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "free rank {}, torsion ", self.free_rank)?;
        if self.torsion.is_empty() {
            write!(f, "none")
        } else {
            let parts: Vec<String> = self.torsion.iter().map(BigInt::to_string).collect();
            write!(f, "[{}]", parts.join(", "))
        }
    }
}

impl FgAbGroup {
    pub fn new(ngens: usize, relations: IntMatrix) -> Result<FgAbGroup, AbError> {
        if relations.cols() != ngens {
            return Err(AbError::DimensionMismatch {
                what: "relation width",
                expected: ngens,
                found: relations.cols(),
            });
        }
        Ok(FgAbGroup {
            ngens,
            relations,
            lattice: OnceLock::new(),
        })
    }

    pub fn trivial() -> FgAbGroup {
        FgAbGroup::free(0)
    }

    pub fn free(rank: usize) -> FgAbGroup {
        FgAbGroup::new(rank, IntMatrix::zeros(0, rank)).unwrap()
    }

    /// `Z/d`; `d = 0` gives `Z`.
    pub fn cyclic(d: i64) -> FgAbGroup {
        FgAbGroup::new(1, IntMatrix::from_rows(&[vec![d]]).unwrap()).unwrap()
    }

    /// `Z^rank ⊕ Z/t_1 ⊕ …`, presented diagonally.
    pub fn from_invariants(rank: usize, torsion: &[i64]) -> FgAbGroup {
        let n = rank + torsion.len();
        let rels = IntMatrix::from_fn(torsion.len(), n, |i, j| {
            if j == rank + i {
                BigInt::from(torsion[i])
            } else {
                BigInt::zero()
            }
        });
        FgAbGroup::new(n, rels).unwrap()
    }

    pub fn direct_sum(parts: &[&FgAbGroup]) -> FgAbGroup {
        let ngens = parts.iter().map(|g| g.ngens).sum();
        let rels = IntMatrix::block_diag(
            &parts
                .iter()
                .map(|g| g.relations.clone())
                .collect::<Vec<_>>(),
        );
        FgAbGroup::new(ngens, rels).unwrap()
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// The relation subgroup of `Z^ngens`.
    pub fn relation_lattice(&self) -> &Lattice {
        self.lattice
            .get_or_init(|| Lattice::from_rows(self.ngens, &self.relations))
    }

    pub fn invariants(&self) -> GroupInvariants {
        let s = smith_normal_form(&self.relations);
        let factors = s.invariant_factors();
        GroupInvariants {
            free_rank: self.ngens - factors.len(),
            torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants().is_trivial()
    }

    /// Number of elements, `None` for infinite groups.
    pub fn order(&self) -> Option<BigInt> {
        let inv = self.invariants();
        (inv.free_rank == 0).then(|| inv.torsion.iter().fold(BigInt::one(), |a, b| a * b))
    }

    /// Same presentation (generator count and relation matrix).
    pub fn same_presentation(&self, other: &FgAbGroup) -> bool {
        self.ngens == other.ngens && self.relations == other.relations
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        self.relation_lattice().contains(x)
    }

    pub fn elements_equal(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        let diff: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero_element(&diff)
    }

    /// Normal form of an element: adapted coordinates reduced into `[0, d_k)`.
    pub fn canonical(&self, x: &[BigInt]) -> Vec<BigInt> {
        let lat = self.relation_lattice();
        let (factors, v) = lat.adapted();
        let mut y = v.vec_mul(x);
        for (k, d) in factors.iter().enumerate() {
            y[k] = y[k].mod_floor(d);
        }
        y
    }

    /// Every element, as generator coordinates; `None` for infinite groups
    /// or groups with more than `limit` elements.
    pub fn elements(&self, limit: usize) -> Option<Vec<Vec<BigInt>>> {
        let lat = self.relation_lattice();
        if lat.rank() < self.ngens {
            return None;
        }
        let (factors, _) = lat.adapted();
        let sizes: Vec<usize> = factors
            .iter()
            .map(|d| usize::try_from(d).ok())
            .collect::<Option<_>>()?;
        let total = sizes.iter().try_fold(1usize, |a, &b| a.checked_mul(b))?;
        if total > limit {
            return None;
        }
        let v_inv = lat.adapted_inverse();
        let mut out = Vec::with_capacity(total);
        let mut y = vec![0usize; sizes.len()];
        for _ in 0..total {
            let yb: Vec<BigInt> = y.iter().map(|&a| BigInt::from(a)).collect();
            out.push(v_inv.vec_mul(&yb));
            for k in 0..y.len() {
                y[k] += 1;
                if y[k] < sizes[k] {
                    break;
                }
                y[k] = 0;
            }
        }
        Some(out)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens {} relations {}", self.ngens, self.relations)
    }
}

/// A homomorphism given by its matrix on generators (`target.ngens × source.ngens`,
/// acting on column vectors).
#[derive(Debug, Clone)]
pub struct AbHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl AbHom {
    /// Checks dimensions and that every source relator lands in the target's
    /// relation lattice.
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<AbHom, AbError> {
        if matrix.shape() != (target.ngens, source.ngens) {
            return Err(AbError::ShapeMismatch {
                expected: (target.ngens, source.ngens),
                found: matrix.shape(),
            });
        }
        for r in 0..source.relations.rows() {
            let img = matrix.mul_vec(source.relations.row(r));
            if !target.is_zero_element(&img) {
                return Err(AbError::NotWellDefined { relator: r });
            }
        }
        Ok(AbHom {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(g: &FgAbGroup) -> AbHom {
        AbHom {
            source: g.clone(),
            target: g.clone(),
            matrix: IntMatrix::identity(g.ngens),
        }
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> AbHom {
        AbHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.ngens, source.ngens),
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AbHom) -> Result<AbHom, AbError> {
        if !self.target.same_presentation(&other.source) {
            return Err(AbError::IncompatibleGroups);
        }
        Ok(AbHom {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: &other.matrix * &self.matrix,
        })
    }

    pub fn is_zero(&self) -> bool {
        (0..self.matrix.cols()).all(|j| self.target.is_zero_element(&self.matrix.col(j)))
    }

    /// `{x : h(x) = 0}` as a lattice in `Z^{source.ngens}` (contains the source relations).
    pub fn kernel_lattice(&self) -> Lattice {
        Lattice::preimage(&self.matrix, self.target.relation_lattice())
    }

    /// Image plus target relations, as a lattice in `Z^{target.ngens}`.
    pub fn image_lattice(&self) -> Lattice {
        Lattice::full(self.source.ngens)
            .image(&self.matrix)
            .sum(self.target.relation_lattice())
    }

    pub fn kernel(&self) -> FgAbGroup {
        self.kernel_lattice()
            .quotient(self.source.relation_lattice())
    }

    pub fn image(&self) -> FgAbGroup {
        self.image_lattice()
            .quotient(self.target.relation_lattice())
    }

    /// Target generators modulo target relations and image columns.
    pub fn cokernel(&self) -> FgAbGroup {
        FgAbGroup::new(
            self.target.ngens,
            self.target.relations.vstack(&self.matrix.transpose()),
        )
        .expect("widths agree")
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_lattice()
            .same_as(self.source.relation_lattice())
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_trivial()
    }

    /// Equality as maps: every generator has the same image modulo relations.
    pub fn equals(&self, other: &AbHom) -> bool {
        self.source.same_presentation(&other.source)
            && self.target.same_presentation(&other.target)
            && (0..self.matrix.cols()).all(|j| {
                self.target
                    .elements_equal(&self.matrix.col(j), &other.matrix.col(j))
            })
    }
}

/// Whether `im f = ker g` inside `target(f) = source(g)`.
///
/// A nonzero composite is reported as [`AbError::CompositionNonzero`] rather
/// than as a plain `false`.
pub fn is_exact_at(f: &AbHom, g: &AbHom) -> Result<bool, AbError> {
    let gf = f.then(g)?;
    if !gf.is_zero() {
        return Err(AbError::CompositionNonzero);
    }
    Ok(f.image_lattice().same_as(&g.kernel_lattice()))
}
