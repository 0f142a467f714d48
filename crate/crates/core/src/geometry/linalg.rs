//! Exact rational linear algebra: ranks, solving, nullspaces.

use num_integer::Integer as IntegerOps;
use num_traits::{One, Signed, Zero};

use crate::{Int, Rat};

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_int(a: &[Rat], b: &[Int]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(_, y)| !y.is_zero())
        .map(|(x, y)| x * Rat::from_integer(y.clone()))
        .sum()
}

/// Scales a rational vector to a primitive integer vector (gcd 1), keeping
/// orientation. The zero vector maps to itself.
pub fn primitive_integer(v: &[Rat]) -> Vec<Int> {
    let mut lcm = Int::one();
    for x in v {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let scaled: Vec<Int> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    primitive_integer_of_ints(scaled)
}

/// Divides an integer vector by the gcd of its entries, keeping orientation.
pub fn primitive_integer_of_ints(mut v: Vec<Int>) -> Vec<Int> {
    let mut g = Int::zero();
    for x in &v {
        g = g.gcd(x);
        if g.is_one() {
            return v;
        }
    }
    if g.is_zero() || g.is_one() {
        return v;
    }
    for x in v.iter_mut() {
        *x = &*x / &g;
    }
    v
}

/// Flips signs so the first nonzero entry is positive (for equations, where
/// orientation is free).
pub fn canonical_sign(mut v: Vec<Int>) -> Vec<Int> {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    v
}

/// Incremental exact rank via a reduced row basis. Rows may be fed one by one;
/// `add` reports whether the row enlarged the span.
#[derive(Clone, Debug, Default)]
pub struct RowBasis {
    /// Rows in echelon form: each has a pivot column, normalized to 1, strictly
    /// increasing pivot columns are NOT maintained; we keep (pivot, row) pairs.
    rows: Vec<(usize, Vec<Rat>)>,
}

impl RowBasis {
    pub fn new() -> Self {
        RowBasis { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis in place; returns the pivot column if a
    /// nonzero remainder is left.
    fn reduce(&self, row: &mut [Rat]) -> Option<usize> {
        for (pivot, basis_row) in &self.rows {
            let factor = row[*pivot].clone();
            if !factor.is_zero() {
                for (x, b) in row.iter_mut().zip(basis_row) {
                    *x -= &factor * b;
                }
            }
        }
        row.iter().position(|x| !x.is_zero())
    }

    pub fn add(&mut self, mut row: Vec<Rat>) -> bool {
        match self.reduce(&mut row) {
            None => false,
            Some(pivot) => {
                let inv = row[pivot].clone();
                for x in row.iter_mut() {
                    *x /= &inv;
                }
                self.rows.push((pivot, row));
                true
            }
        }
    }

    pub fn contains(&self, row: &[Rat]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r).is_none()
    }

    /// The remainder of `row` after reduction against the span.
    pub fn remainder(&self, row: &[Rat]) -> Vec<Rat> {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut basis = RowBasis::new();
    for row in rows {
        basis.add(row.clone());
    }
    basis.rank()
}

/// Rank of an integer matrix (over the rationals).
pub fn rank_int(rows: &[Vec<Int>]) -> usize {
    let mut basis = RowBasis::new();
    for row in rows {
        basis.add(row.iter().map(|x| Rat::from_integer(x.clone())).collect());
    }
    basis.rank()
}

/// Dimension of the affine hull of a point set: rank of differences.
pub fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let p0 = &points[0];
    let mut basis = RowBasis::new();
    for p in &points[1..] {
        let diff: Vec<Rat> = p.iter().zip(p0).map(|(a, b)| a - b).collect();
        basis.add(diff);
    }
    basis.rank()
}

/// A basis of the right-nullspace {x : A x = 0}, from the reduced row echelon
/// form; deterministic for a given row order.
pub fn nullspace(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    // Gauss-Jordan to RREF with ordered pivot columns.
    let mut mat: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(sel) = (r..mat.len()).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, sel);
        let inv = mat[r][c].clone();
        for x in mat[r].iter_mut() {
            *x /= &inv;
        }
        for i in 0..mat.len() {
            if i != r && !mat[i][c].is_zero() {
                let factor = mat[i][c].clone();
                let src = mat[r].clone();
                for (x, s) in mat[i].iter_mut().zip(&src) {
                    *x -= &factor * s;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    let is_pivot = {
        let mut flags = vec![false; cols];
        for &c in &pivot_cols {
            flags[c] = true;
        }
        flags
    };
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (row_idx, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -mat[row_idx][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of A x = b, or None if inconsistent.
pub fn solve(rows: &[Vec<Rat>], rhs: &[Rat], cols: usize) -> Option<Vec<Rat>> {
    let mut mat: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(sel) = (r..mat.len()).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, sel);
        let inv = mat[r][c].clone();
        for x in mat[r].iter_mut() {
            *x /= &inv;
        }
        for i in 0..mat.len() {
            if i != r && !mat[i][c].is_zero() {
                let factor = mat[i][c].clone();
                let src = mat[r].clone();
                for (x, s) in mat[i].iter_mut().zip(&src) {
                    *x -= &factor * s;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    // consistency: no row 0 = nonzero
    for row in &mat[r..] {
        if row[..cols].iter().all(|x| x.is_zero()) && !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); cols];
    for (row_idx, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = mat[row_idx][cols].clone();
    }
    Some(x)
}

/// Solves the square system G w = rhs where G is symmetric positive definite
/// (a Gram matrix); panics if singular, which cannot happen for a Gram matrix
/// of independent vectors.
pub fn solve_gram(g: &[Vec<Rat>], rhs: &[Rat]) -> Vec<Rat> {
    solve(g, rhs, g.len()).expect("Gram matrix of independent vectors is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    #[test]
    fn rank_and_affine_rank() {
        let rows = vec![
            vec![rat(1), rat(0), rat(1)],
            vec![rat(0), rat(1), rat(1)],
            vec![rat(1), rat(1), rat(2)],
        ];
        assert_eq!(rank(&rows), 2);

        let points = vec![
            vec![rat(0), rat(0)],
            vec![rat(1), rat(0)],
            vec![rat(0), rat(1)],
            vec![rat(1), rat(1)],
        ];
        assert_eq!(affine_rank(&points), 2);
        assert_eq!(affine_rank(&points[..1]), 0);
    }

    #[test]
    fn nullspace_is_orthogonal_complement() {
        let rows = vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(1), rat(1)]];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for row in &rows {
            assert!(dot(row, &ns[0]).is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let rows = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        let x = solve(&rows, &[rat(3), rat(1)], 2).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);

        let rows2 = vec![vec![rat(1), rat(1)], vec![rat(2), rat(2)]];
        assert!(solve(&rows2, &[rat(1), rat(3)], 2).is_none());
        assert!(solve(&rows2, &[rat(1), rat(2)], 2).is_some());
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![ratio(1, 2), ratio(-3, 4), rat(0)];
        assert_eq!(
            primitive_integer(&v),
            vec![Int::from(2), Int::from(-3), Int::from(0)]
        );
        let w = canonical_sign(vec![Int::from(-2), Int::from(4)]);
        assert_eq!(w, vec![Int::from(2), Int::from(-4)]);
    }
}
