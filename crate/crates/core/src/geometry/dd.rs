//! Double description: extreme rays of a pointed cone given by inequalities.
//!
//! The cone is `{ y : r · y <= 0 for every constraint r }`. Constraints are
//! inserted one at a time; at each step the kept rays are partitioned by the
//! sign of `r · y` and new rays are combined from adjacent (positive,
//! negative) pairs. Adjacency uses the combinatorial test: two rays are
//! adjacent iff no third ray's tight set contains the intersection of theirs.
//! All arithmetic is over big integers on primitive ray vectors.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::linalg::{dot_int, primitive_integer_of_ints, RowBasis};
use super::GeometryError;
use crate::caps::{CapExceeded, ResourceCaps};
use crate::{Int, Rat};

/// Bitset over constraint indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TightSet {
    words: Vec<u64>,
    count: u32,
}

impl TightSet {
    fn new(n: usize) -> Self {
        TightSet { words: vec![0; n.div_ceil(64)], count: 0 }
    }

    #[inline]
    fn set(&mut self, i: usize) {
        let w = i / 64;
        let b = 1u64 << (i % 64);
        if self.words[w] & b == 0 {
            self.words[w] |= b;
            self.count += 1;
        }
    }

    #[inline]
    fn intersect(&self, other: &TightSet) -> TightSet {
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        let count = words.iter().map(|w| w.count_ones()).sum();
        TightSet { words, count }
    }

    /// True iff self ⊇ other.
    #[inline]
    fn contains_all(&self, other: &TightSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    coords: Vec<Int>,
    tight: TightSet,
}

/// Extreme rays of the pointed cone `{ y : r · y <= 0 }`.
///
/// Returns an error if the constraints do not span the space (the cone then
/// has a lineality space and no extreme rays).
pub fn extreme_rays(
    constraints: &[Vec<Int>],
    dim: usize,
    caps: &ResourceCaps,
) -> Result<Vec<Vec<Int>>, GeometryError> {
    assert!(constraints.iter().all(|r| r.len() == dim));
    if dim == 0 {
        return Ok(Vec::new());
    }

    // Pick dim linearly independent constraints for the initial cone.
    let mut basis = RowBasis::new();
    let mut basis_idx: Vec<usize> = Vec::new();
    for (i, row) in constraints.iter().enumerate() {
        let as_rat: Vec<Rat> = row.iter().map(|x| Rat::from_integer(x.clone())).collect();
        if basis.add(as_rat) {
            basis_idx.push(i);
            if basis_idx.len() == dim {
                break;
            }
        }
    }
    if basis_idx.len() < dim {
        return Err(GeometryError::NotPointed);
    }

    // Initial rays: columns of -B^{-1}, where B stacks the chosen rows; then
    // r_basis[i] · ray_j = -δ_ij, so every initial ray satisfies the chosen
    // constraints and ray_j is tight at all of them except the j-th.
    let b_rows: Vec<Vec<Rat>> = basis_idx
        .iter()
        .map(|&i| {
            constraints[i]
                .iter()
                .map(|x| Rat::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let n_cons = constraints.len();
    let mut rays: Vec<Ray> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut rhs = vec![Rat::zero(); dim];
        rhs[j] = -Rat::from_integer(Int::from(1));
        let sol = super::linalg::solve(&b_rows, &rhs, dim).expect("basis rows are independent");
        let coords = super::linalg::primitive_integer(&sol);
        let mut tight = TightSet::new(n_cons);
        for (jj, &ci) in basis_idx.iter().enumerate() {
            if jj != j {
                tight.set(ci);
            }
        }
        rays.push(Ray { coords, tight });
    }

    let in_basis = {
        let mut flags = vec![false; n_cons];
        for &i in &basis_idx {
            flags[i] = true;
        }
        flags
    };

    for ci in 0..n_cons {
        if in_basis[ci] {
            continue;
        }
        let r = &constraints[ci];
        let values: Vec<Int> = rays
            .par_iter()
            .map(|ray| dot_int(r, &ray.coords))
            .collect();

        let mut negatives: Vec<usize> = Vec::new();
        let mut positives: Vec<usize> = Vec::new();
        let mut zeros: Vec<usize> = Vec::new();
        for (i, v) in values.iter().enumerate() {
            if v.is_zero() {
                zeros.push(i);
            } else if v.is_negative() {
                negatives.push(i);
            } else {
                positives.push(i);
            }
        }
        if positives.is_empty() {
            for (i, v) in values.iter().enumerate() {
                if v.is_zero() {
                    rays[i].tight.set(ci);
                }
            }
            continue;
        }

        // Candidate pairs, filtered by the combinatorial adjacency test
        // against all current rays.
        let pairs: Vec<(usize, usize)> = positives
            .par_iter()
            .flat_map_iter(|&p| negatives.iter().map(move |&n| (p, n)))
            .filter(|&(p, n)| {
                let common = rays[p].tight.intersect(&rays[n].tight);
                if (common.count as usize) + 2 < dim {
                    return false;
                }
                !rays.iter().enumerate().any(|(i, other)| {
                    i != p && i != n && other.tight.contains_all(&common)
                })
            })
            .collect();

        let required = zeros.len() + negatives.len() + pairs.len();
        if required as u64 > caps.max_dd_rays {
            return Err(GeometryError::Cap(CapExceeded::new(
                "caps.max_dd_rays",
                caps.max_dd_rays,
                required as u64,
            )));
        }

        let new_rays: Vec<Ray> = pairs
            .par_iter()
            .map(|&(p, n)| {
                // value_p > 0 > value_n; combination is tight at ci and keeps
                // the cone side of every earlier constraint
                let vp = &values[p];
                let vn = &values[n];
                let coords: Vec<Int> = rays[p]
                    .coords
                    .iter()
                    .zip(&rays[n].coords)
                    .map(|(cp, cn)| vp * cn - vn * cp)
                    .collect();
                let coords = primitive_integer_of_ints(coords);
                let mut tight = rays[p].tight.intersect(&rays[n].tight);
                tight.set(ci);
                Ray { coords, tight }
            })
            .collect();

        let mut kept: Vec<Ray> = Vec::with_capacity(required);
        for (i, ray) in rays.into_iter().enumerate() {
            if values[i].is_negative() {
                kept.push(ray);
            } else if values[i].is_zero() {
                let mut ray = ray;
                ray.tight.set(ci);
                kept.push(ray);
            }
        }
        kept.extend(new_rays);
        rays = kept;
    }

    let mut out: Vec<Vec<Int>> = rays.into_iter().map(|r| r.coords).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn orthant_rays() {
        // cone {y : -y_i <= 0} = nonnegative orthant, rays = unit vectors
        let cons = vec![iv(&[-1, 0, 0]), iv(&[0, -1, 0]), iv(&[0, 0, -1])];
        let rays = extreme_rays(&cons, 3, &ResourceCaps::default()).unwrap();
        assert_eq!(rays.len(), 3);
        for r in &rays {
            assert_eq!(r.iter().filter(|x| !x.is_zero()).count(), 1);
        }
    }

    #[test]
    fn square_cone() {
        // cone over a square: {(x,y,t): |x| <= t, |y| <= t} via 4 constraints
        // x - t <= 0, -x - t <= 0, y - t <= 0, -y - t <= 0
        let cons = vec![
            iv(&[1, 0, -1]),
            iv(&[-1, 0, -1]),
            iv(&[0, 1, -1]),
            iv(&[0, -1, -1]),
        ];
        let rays = extreme_rays(&cons, 3, &ResourceCaps::default()).unwrap();
        assert_eq!(rays.len(), 4);
        for r in &rays {
            assert_eq!(r[2], Int::from(1));
            assert_eq!(r[0].abs(), Int::from(1));
            assert_eq!(r[1].abs(), Int::from(1));
        }
    }

    #[test]
    fn lineality_detected() {
        // single constraint in R^2: cone is a halfplane, not pointed
        let cons = vec![iv(&[1, 0])];
        assert!(matches!(
            extreme_rays(&cons, 2, &ResourceCaps::default()),
            Err(GeometryError::NotPointed)
        ));
    }

    #[test]
    fn ray_cap_enforced() {
        let cons = vec![
            iv(&[1, 0, -1]),
            iv(&[-1, 0, -1]),
            iv(&[0, 1, -1]),
            iv(&[0, -1, -1]),
        ];
        let caps = ResourceCaps { max_dd_rays: 3, ..Default::default() };
        assert!(matches!(
            extreme_rays(&cons, 3, &caps),
            Err(GeometryError::Cap(_))
        ));
    }
}
