//! Smith normal form over the integers with transformation matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `d = u · m · v` with `u`, `v` unimodular and `d` diagonal, nonnegative,
/// `d[0] | d[1] | …`, nonzero entries first.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, maintained alongside it.
    pub v_inv: IntMatrix,
    rank: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Some integer `z` with `m · z = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let (rows, cols) = self.d.shape();
        assert_eq!(b.len(), rows, "right-hand side has the wrong length");
        let c = self.u.mul_vec(b);
        let mut w = vec![BigInt::zero(); cols];
        for i in 0..rows {
            if i < self.rank {
                let (q, r) = c[i].div_rem(&self.d[(i, i)]);
                if !r.is_zero() {
                    return None;
                }
                w[i] = q;
            } else if !c[i].is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&w))
    }

    /// Columns spanning the integer kernel `{z : m · z = 0}`, as a
    /// `cols × (cols − rank)` matrix.
    pub fn kernel_basis(&self) -> IntMatrix {
        self.v.select_cols(self.rank..self.v.cols())
    }
}

/// Smith normal form of `m`.
///
/// Pivot choice: smallest nonzero absolute value in the remaining block,
/// ties broken by row-major position. Rows and columns are then cleared by
/// Euclidean reduction; a pivot that fails to divide the rest of the block
/// absorbs the offending row and the step repeats.
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);
    let mut t = 0;

    let swap_c = |a: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, x: usize, y: usize| {
        a.swap_cols(x, y);
        v.swap_cols(x, y);
        vi.swap_rows(x, y);
    };
    // col[dst] += k col[src]; inverse is row[src] -= k row[dst] on v_inv
    let add_c = |a: &mut IntMatrix,
                 v: &mut IntMatrix,
                 vi: &mut IntMatrix,
                 dst: usize,
                 src: usize,
                 k: &BigInt| {
        a.add_col_multiple(dst, src, k);
        v.add_col_multiple(dst, src, k);
        vi.add_row_multiple(src, dst, &-k);
    };

    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&a, t..rows, t..cols) else {
            break;
        };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        swap_c(&mut a, &mut v, &mut v_inv, t, pj);

        loop {
            let p = a[(t, t)].clone();
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&p);
                    a.add_row_multiple(i, t, &-&q);
                    u.add_row_multiple(i, t, &-&q);
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&p);
                    add_c(&mut a, &mut v, &mut v_inv, j, t, &-&q);
                }
            }
            // Remainders are strictly smaller than the pivot; promote the smallest.
            let mut best: Option<(BigInt, usize, usize)> = None;
            for j in t + 1..cols {
                consider(&mut best, &a[(t, j)], t, j);
            }
            for i in t + 1..rows {
                consider(&mut best, &a[(i, t)], i, t);
            }
            if let Some((_, i, j)) = best {
                if j == t {
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                } else {
                    swap_c(&mut a, &mut v, &mut v_inv, t, j);
                }
                continue;
            }
            // Row and column clear: enforce divisibility of the rest.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let rank = (0..rows.min(cols))
        .take_while(|&i| !a[(i, i)].is_zero())
        .count();
    Smith {
        u,
        d: a,
        v,
        v_inv,
        rank,
    }
}

fn consider(best: &mut Option<(BigInt, usize, usize)>, x: &BigInt, i: usize, j: usize) {
    if x.is_zero() {
        return;
    }
    let ax = x.abs();
    if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
        *best = Some((ax, i, j));
    }
}

fn smallest_nonzero(
    a: &IntMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            consider(&mut best, &a[(i, j)], i, j);
        }
    }
    best.map(|(_, i, j)| (i, j))
}
