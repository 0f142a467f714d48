//! Polytope conversions between vertex and halfspace descriptions, exactly.
//!
//! Polytopes here are often lower-dimensional in their ambient space, so the
//! facet story is always relative to the affine hull: hull equations are
//! first-class outputs, and facet normals are canonicalized by projecting onto
//! the hull's direction space (the unique representative modulo the hull
//! equations), then scaled to primitive integers.

use num_traits::{One, Signed, Zero};

use super::dd::extreme_rays;
use super::linalg::{
    affine_rank, canonical_sign, dot, dot_int, dot_rat_int, nullspace, primitive_integer,
    solve, solve_gram, RowBasis,
};
use super::GeometryError;
use crate::caps::ResourceCaps;
use crate::{Int, Rat};

/// Halfspace description: facets `a · x <= c` and hull equations `e · x = f`,
/// all integer-normalized with gcd 1. Facet orientation is fixed by the
/// inequality direction; equations carry a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRepresentation {
    pub ambient_dim: usize,
    pub facets: Vec<(Vec<Int>, Int)>,
    pub equations: Vec<(Vec<Int>, Int)>,
}

/// Vertex description: exact rational points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRepresentation {
    pub ambient_dim: usize,
    pub points: Vec<Vec<Rat>>,
}

impl VRepresentation {
    pub fn new(points: Vec<Vec<Rat>>, ambient_dim: usize) -> Self {
        debug_assert!(points.iter().all(|p| p.len() == ambient_dim));
        VRepresentation { ambient_dim, points }
    }
}

impl HRepresentation {
    /// One facet per line in the reduced-coordinate dump syntax, equations
    /// prefixed `eq:`; coordinates rendered by `coord_name`.
    pub fn dump(&self, coord_name: &dyn Fn(usize) -> String) -> String {
        let mut out = String::new();
        for (e, f) in &self.equations {
            out.push_str("eq: ");
            out.push_str(&term_line(e, coord_name));
            out.push_str(&format!(" = {f}\n"));
        }
        for (a, c) in &self.facets {
            out.push_str(&term_line(a, coord_name));
            out.push_str(&format!(" <= {c}\n"));
        }
        out
    }
}

fn term_line(a: &[Int], coord_name: &dyn Fn(usize) -> String) -> String {
    let terms: Vec<String> = a
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| format!("{v}@{}", coord_name(i)))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" ")
    }
}

/// The affine hull of a point set: an interior base point index, a basis of
/// direction vectors, independent coordinate columns, and the hull equations.
pub struct AffineHull {
    pub dim: usize,
    /// Indices of `dim` coordinates whose projection is injective on the hull.
    pub proj_cols: Vec<usize>,
    /// Basis of the direction space (differences of input points).
    pub directions: Vec<Vec<Rat>>,
    pub base_point: Vec<Rat>,
    /// Integer-normalized equations `e · x = f` cutting out the hull.
    pub equations: Vec<(Vec<Int>, Int)>,
}

pub fn affine_hull(points: &[Vec<Rat>], ambient_dim: usize) -> AffineHull {
    assert!(!points.is_empty());
    let base_point = points[0].clone();
    let mut basis = RowBasis::new();
    let mut directions: Vec<Vec<Rat>> = Vec::new();
    for p in &points[1..] {
        let diff: Vec<Rat> = p.iter().zip(&base_point).map(|(a, b)| a - b).collect();
        if basis.add(diff.clone()) {
            directions.push(diff);
        }
    }
    let dim = directions.len();
    let proj_cols = basis.pivots();
    let eq_normals = nullspace(&directions, ambient_dim);
    let equations = eq_normals
        .into_iter()
        .map(|e| {
            let f = dot(&e, &base_point);
            normalize_equation(&e, &f)
        })
        .collect();
    AffineHull { dim, proj_cols, directions, base_point, equations }
}

fn normalize_equation(e: &[Rat], f: &Rat) -> (Vec<Int>, Int) {
    let mut v: Vec<Rat> = e.to_vec();
    v.push(f.clone());
    let ints = canonical_sign(primitive_integer(&v));
    let f_int = ints.last().expect("non-empty").clone();
    (ints[..ints.len() - 1].to_vec(), f_int)
}

fn normalize_inequality(a: &[Rat], c: &Rat) -> (Vec<Int>, Int) {
    let mut v: Vec<Rat> = a.to_vec();
    v.push(c.clone());
    let ints = primitive_integer(&v);
    let c_int = ints.last().expect("non-empty").clone();
    (ints[..ints.len() - 1].to_vec(), c_int)
}

impl AffineHull {
    /// Local coordinates of an ambient point on the hull: its restriction to
    /// the independent columns.
    pub fn project(&self, p: &[Rat]) -> Vec<Rat> {
        self.proj_cols.iter().map(|&c| p[c].clone()).collect()
    }

    /// Canonical ambient representative of a local functional `g · q <= h`:
    /// place the coefficients on the projection columns, then project the
    /// normal onto the direction space so facets equal modulo hull equations
    /// get identical representatives.
    pub fn lift_functional(&self, g: &[Rat], h: &Rat, ambient_dim: usize) -> (Vec<Int>, Int) {
        let mut a = vec![Rat::zero(); ambient_dim];
        for (gi, &c) in g.iter().zip(&self.proj_cols) {
            a[c] = gi.clone();
        }
        if self.directions.is_empty() {
            return normalize_inequality(&a, h);
        }
        // a_proj = U (UᵀU)^{-1} Uᵀ a, with U the direction basis
        let uta: Vec<Rat> = self.directions.iter().map(|u| dot(u, &a)).collect();
        let gram: Vec<Vec<Rat>> = self
            .directions
            .iter()
            .map(|u| self.directions.iter().map(|v| dot(u, v)).collect())
            .collect();
        let w = solve_gram(&gram, &uta);
        let mut a_proj = vec![Rat::zero(); ambient_dim];
        for (wi, u) in w.iter().zip(&self.directions) {
            for (ap, uc) in a_proj.iter_mut().zip(u) {
                *ap += wi * uc;
            }
        }
        let shift: Rat = a_proj
            .iter()
            .zip(&a)
            .zip(&self.base_point)
            .map(|((ap, av), bp)| (ap - av) * bp)
            .sum();
        let c_proj = h + shift;
        normalize_inequality(&a_proj, &c_proj)
    }
}

/// Complete irredundant facet list of the convex hull of `points`, relative to
/// the affine hull, whose equations are reported alongside.
pub fn facet_enumeration(
    v: &VRepresentation,
    caps: &ResourceCaps,
) -> Result<HRepresentation, GeometryError> {
    if v.points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let hull = affine_hull(&v.points, v.ambient_dim);
    if hull.dim == 0 {
        return Ok(HRepresentation {
            ambient_dim: v.ambient_dim,
            facets: Vec::new(),
            equations: hull.equations,
        });
    }
    let local: Vec<Vec<Rat>> = v.points.iter().map(|p| hull.project(p)).collect();
    let local_facets = facets_of_full_dim(&local, hull.dim, caps)?;
    let mut facets: Vec<(Vec<Int>, Int)> = local_facets
        .iter()
        .map(|(g, h)| {
            let g_rat: Vec<Rat> = g.iter().map(|x| Rat::from_integer(x.clone())).collect();
            hull.lift_functional(&g_rat, &Rat::from_integer(h.clone()), v.ambient_dim)
        })
        .collect();
    facets.sort_unstable();
    facets.dedup();
    Ok(HRepresentation { ambient_dim: v.ambient_dim, facets, equations: hull.equations })
}

/// Facets of a full-dimensional point set in local coordinates, as integer
/// `(g, h)` with `g · q <= h`. Points are sorted lexicographically before
/// insertion so output is deterministic.
pub fn facets_of_full_dim(
    local_points: &[Vec<Rat>],
    dim: usize,
    caps: &ResourceCaps,
) -> Result<Vec<(Vec<Int>, Int)>, GeometryError> {
    let mut sorted: Vec<Vec<Rat>> = local_points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    // constraint rows (q, 1): facet functionals y = (g, -h) satisfy
    // q·g - h <= 0 for every point q
    let constraints: Vec<Vec<Int>> = sorted
        .iter()
        .map(|q| {
            let mut row: Vec<Rat> = q.clone();
            row.push(Rat::one());
            primitive_integer(&row)
        })
        .collect();
    let rays = extreme_rays(&constraints, dim + 1, caps)?;
    let mut out = Vec::new();
    for ray in rays {
        let (g, neg_h) = ray.split_at(dim);
        if g.iter().all(|x| x.is_zero()) {
            // the far face 0 <= h, not a facet
            continue;
        }
        out.push((g.to_vec(), -neg_h[0].clone()));
    }
    Ok(out)
}

/// Complete extreme-point list of a bounded polyhedron given in halfspace
/// form. Reports unbounded input; an empty point list means infeasible.
pub fn vertex_enumeration(
    h: &HRepresentation,
    caps: &ResourceCaps,
) -> Result<VRepresentation, GeometryError> {
    let d = h.ambient_dim;
    // substitute out the equations: x = x_p + N z
    let (x_p, basis_n): (Vec<Rat>, Vec<Vec<Rat>>) = if h.equations.is_empty() {
        let id: Vec<Vec<Rat>> = (0..d)
            .map(|i| {
                let mut e = vec![Rat::zero(); d];
                e[i] = Rat::one();
                e
            })
            .collect();
        (vec![Rat::zero(); d], id)
    } else {
        let rows: Vec<Vec<Rat>> = h
            .equations
            .iter()
            .map(|(e, _)| e.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        let rhs: Vec<Rat> = h
            .equations
            .iter()
            .map(|(_, f)| Rat::from_integer(f.clone()))
            .collect();
        let Some(x_p) = solve(&rows, &rhs, d) else {
            return Ok(VRepresentation { ambient_dim: d, points: Vec::new() });
        };
        let ns = nullspace(&rows, d);
        (x_p, ns)
    };
    let dz = basis_n.len();

    // homogenize: cone {(z, t) : A' z - c' t <= 0, -t <= 0} in R^{dz+1}
    let mut constraints: Vec<Vec<Int>> = Vec::with_capacity(h.facets.len() + 1);
    for (a, c) in &h.facets {
        let mut row: Vec<Rat> = basis_n
            .iter()
            .map(|col| dot_rat_int(col, a))
            .collect();
        let c_shift = Rat::from_integer(c.clone()) - dot_rat_int(&x_p, a);
        row.push(-c_shift);
        constraints.push(primitive_integer(&row));
    }
    let mut trow = vec![Int::zero(); dz + 1];
    trow[dz] = -Int::one();
    constraints.push(trow);

    let rays = extreme_rays(&constraints, dz + 1, caps)?;
    let mut points: Vec<Vec<Rat>> = Vec::new();
    for ray in rays {
        let (z, t) = ray.split_at(dz);
        let t = &t[0];
        if t.is_zero() {
            if z.iter().any(|x| !x.is_zero()) {
                return Err(GeometryError::Unbounded);
            }
            continue;
        }
        debug_assert!(t.is_positive());
        let t_rat = Rat::from_integer(t.clone());
        let point: Vec<Rat> = (0..d)
            .map(|i| {
                let mut xi = x_p[i].clone();
                for (zj, col) in z.iter().zip(&basis_n) {
                    xi += Rat::from_integer(zj.clone()) / &t_rat * &col[i];
                }
                xi
            })
            .collect();
        points.push(point);
    }
    points.sort_unstable();
    points.dedup();
    Ok(VRepresentation { ambient_dim: d, points })
}

/// Dimension of the affine hull of a point set.
pub fn affine_dimension(points: &[Vec<Rat>]) -> usize {
    affine_rank(points)
}

/// Fraction of facet dimension reached by an inequality's saturating vertices:
/// `affine_dim(saturators) / (affine_dim(all) - 1)`. The inequality must be
/// tight (maximum over the vertices equal to the bound).
pub fn facetness(
    values: &[Rat],
    bound: &Rat,
    points: &[Vec<Rat>],
) -> Result<Rat, GeometryError> {
    assert_eq!(values.len(), points.len());
    let max = values.iter().max().ok_or(GeometryError::EmptyInput)?;
    if max != bound {
        return Err(GeometryError::NotTight {
            max: max.clone(),
            bound: bound.clone(),
        });
    }
    let saturating: Vec<Vec<Rat>> = points
        .iter()
        .zip(values)
        .filter(|(_, v)| *v == bound)
        .map(|(p, _)| p.clone())
        .collect();
    let full_dim = affine_dimension(points);
    if full_dim == 0 {
        return Err(GeometryError::Degenerate("polytope is a single point".into()));
    }
    let sat_dim = affine_dimension(&saturating);
    Ok(Rat::new(Int::from(sat_dim as u64), Int::from((full_dim - 1) as u64)))
}

// ---------------------------------------------------------------------------
// Rotation primitives on a full-dimensional polytope in integer local
// coordinates; these drive the symmetry-reduced facet-class search.
// ---------------------------------------------------------------------------

/// A facet in local coordinates with its saturating point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFacet {
    pub normal: Vec<Int>,
    pub offset: Int,
    pub saturators: Vec<usize>,
}

fn saturators_of(points: &[Vec<Int>], normal: &[Int], offset: &Int) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| dot_int(normal, p) == *offset)
        .map(|(i, _)| i)
        .collect()
}

fn affine_rank_int(points: &[Vec<Int>], idx: &[usize]) -> usize {
    if idx.is_empty() {
        return 0;
    }
    let p0 = &points[idx[0]];
    let mut basis = RowBasis::new();
    for &i in &idx[1..] {
        let diff: Vec<Rat> = points[i]
            .iter()
            .zip(p0)
            .map(|(a, b)| Rat::from_integer(a - b))
            .collect();
        basis.add(diff);
    }
    basis.rank()
}

/// Rotates the supporting hyperplane `(a, c)` projectively around the affine
/// hull of a saturator subset, in direction `(b, b·r0)`: the result is
/// `lambda (a, c) + (b, b·r0)` with the largest `lambda` keeping every point
/// valid, i.e. `lambda = max over points v off the hyperplane of
/// (b·v - b·r0) / (c - a·v)`. Every point with `a·v = c` must satisfy
/// `b·v <= b·r0` (callers arrange this), so the result supports the polytope
/// and saturates at least one point off the old hyperplane.
fn rotate_hyperplane(
    points: &[Vec<Int>],
    a: &[Rat],
    c: &Rat,
    b: &[Rat],
    pivot_point: &Vec<Int>,
) -> Result<(Vec<Int>, Int), GeometryError> {
    let b_ref = dot_rat_int(b, pivot_point);
    let mut best: Option<Rat> = None;
    for p in points {
        let slack = c - dot_rat_int(a, p);
        debug_assert!(!slack.is_negative(), "hyperplane must be valid");
        if slack.is_zero() {
            debug_assert!(
                !(dot_rat_int(b, p) - &b_ref).is_positive(),
                "rotation direction must not cut off current saturators"
            );
            continue;
        }
        let lambda = (dot_rat_int(b, p) - &b_ref) / slack;
        if best.as_ref().is_none_or(|cur| lambda > *cur) {
            best = Some(lambda);
        }
    }
    let lambda = best.ok_or_else(|| {
        GeometryError::Degenerate("every point saturates the hyperplane".into())
    })?;
    let a_new: Vec<Rat> = a.iter().zip(b).map(|(ai, bi)| &lambda * ai + bi).collect();
    let c_new = &lambda * c + &b_ref;
    Ok(normalize_inequality(&a_new, &c_new))
}

/// Finds one facet of a full-dimensional polytope given by integer points, by
/// ascending from a supporting hyperplane: rotate around the current
/// saturating set until its affine dimension reaches dim - 1.
pub fn initial_facet(points: &[Vec<Int>], dim: usize) -> Result<LocalFacet, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    assert!(dim >= 1);
    // start: maximize the first coordinate
    let mut a: Vec<Rat> = (0..dim)
        .map(|i| if i == 0 { Rat::one() } else { Rat::zero() })
        .collect();
    let mut c: Rat = points
        .iter()
        .map(|p| Rat::from_integer(p[0].clone()))
        .max()
        .expect("non-empty");
    loop {
        let (ai, ci) = normalize_inequality(&a, &c);
        let sat = saturators_of(points, &ai, &ci);
        if affine_rank_int(points, &sat) == dim - 1 {
            return Ok(LocalFacet { normal: ai, offset: ci, saturators: sat });
        }
        // rotation direction: constant on the saturators, independent of a
        let p0 = &points[sat[0]];
        let diffs: Vec<Vec<Rat>> = sat[1..]
            .iter()
            .map(|&i| {
                points[i]
                    .iter()
                    .zip(p0)
                    .map(|(x, y)| Rat::from_integer(x - y))
                    .collect()
            })
            .collect();
        let candidates = nullspace(&diffs, dim);
        let a_rat: Vec<Rat> = ai.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let mut b = None;
        for cand in candidates {
            let mut basis = RowBasis::new();
            basis.add(a_rat.clone());
            if basis.add(cand.clone()) {
                b = Some(cand);
                break;
            }
        }
        let b = b.ok_or_else(|| {
            GeometryError::Degenerate("no rotation direction; points may not span".into())
        })?;
        let c_rat = Rat::from_integer(ci.clone());
        let rotated = rotate_hyperplane(points, &a_rat, &c_rat, &b, p0)?;
        a = rotated.0.iter().map(|x| Rat::from_integer(x.clone())).collect();
        c = Rat::from_integer(rotated.1);
    }
}

/// The ridges of a facet: facets of the saturating point set within its own
/// affine hull, returned as global saturator index sets.
pub fn ridges_of_facet(
    points: &[Vec<Int>],
    facet: &LocalFacet,
    caps: &ResourceCaps,
) -> Result<Vec<Vec<usize>>, GeometryError> {
    let sat_points: Vec<Vec<Rat>> = facet
        .saturators
        .iter()
        .map(|&i| points[i].iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let dim = points.first().map_or(0, |p| p.len());
    let hull = affine_hull(&sat_points, dim);
    if hull.dim == 0 {
        return Ok(Vec::new());
    }
    let local: Vec<Vec<Rat>> = sat_points.iter().map(|p| hull.project(p)).collect();
    let sub_facets = facets_of_full_dim(&local, hull.dim, caps)?;
    let mut ridges = Vec::with_capacity(sub_facets.len());
    for (g, h) in sub_facets {
        let ridge: Vec<usize> = facet
            .saturators
            .iter()
            .zip(&local)
            .filter(|(_, q)| dot_rat_int(q, &g) == Rat::from_integer(h.clone()))
            .map(|(&i, _)| i)
            .collect();
        ridges.push(ridge);
    }
    Ok(ridges)
}

/// The unique other facet containing a ridge of `facet` (polytope rotation).
pub fn adjacent_facet(
    points: &[Vec<Int>],
    facet: &LocalFacet,
    ridge: &[usize],
    dim: usize,
) -> Result<LocalFacet, GeometryError> {
    let r0 = &points[ridge[0]];
    let diffs: Vec<Vec<Rat>> = ridge[1..]
        .iter()
        .map(|&i| {
            points[i]
                .iter()
                .zip(r0)
                .map(|(x, y)| Rat::from_integer(x - y))
                .collect()
        })
        .collect();
    let candidates = nullspace(&diffs, dim);
    let a_rat: Vec<Rat> = facet
        .normal
        .iter()
        .map(|x| Rat::from_integer(x.clone()))
        .collect();
    let mut b = None;
    for cand in candidates {
        let mut basis = RowBasis::new();
        basis.add(a_rat.clone());
        if basis.add(cand.clone()) {
            b = Some(cand);
            break;
        }
    }
    let mut b = b.ok_or_else(|| GeometryError::Degenerate("ridge spans the facet".into()))?;
    // orient: the facet's non-ridge saturators must sit strictly on the
    // negative side so the rotation leaves the old facet
    let b_ref = dot_rat_int(&b, r0);
    let ridge_set: std::collections::HashSet<usize> = ridge.iter().copied().collect();
    let witness = facet
        .saturators
        .iter()
        .find(|i| !ridge_set.contains(i))
        .ok_or_else(|| GeometryError::Degenerate("ridge equals the facet".into()))?;
    let side = dot_rat_int(&b, &points[*witness]) - &b_ref;
    if side.is_zero() {
        return Err(GeometryError::Degenerate(
            "rotation direction constant on the facet".into(),
        ));
    }
    if side.is_positive() {
        for x in b.iter_mut() {
            *x = -x.clone();
        }
    }
    let c_rat = Rat::from_integer(facet.offset.clone());
    let (normal, offset) = rotate_hyperplane(points, &a_rat, &c_rat, &b, r0)?;
    let saturators = saturators_of(points, &normal, &offset);
    debug_assert_eq!(affine_rank_int(points, &saturators), dim - 1);
    Ok(LocalFacet { normal, offset, saturators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn pts(raw: &[&[i64]]) -> Vec<Vec<Rat>> {
        raw.iter().map(|p| p.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn simplex_has_three_facets() {
        let v = VRepresentation::new(pts(&[&[0, 0], &[1, 0], &[0, 1]]), 2);
        let h = facet_enumeration(&v, &ResourceCaps::default()).unwrap();
        assert_eq!(h.facets.len(), 3);
        assert!(h.equations.is_empty());
    }

    #[test]
    fn cube_round_trip() {
        let cube: Vec<Vec<Rat>> = (0..8u8)
            .map(|m| (0..3).map(|b| rat(i64::from(m >> b & 1))).collect())
            .collect();
        let v = VRepresentation::new(cube.clone(), 3);
        let h = facet_enumeration(&v, &ResourceCaps::default()).unwrap();
        assert_eq!(h.facets.len(), 6);
        let v2 = vertex_enumeration(&h, &ResourceCaps::default()).unwrap();
        let mut expect = cube;
        expect.sort_unstable();
        assert_eq!(v2.points, expect);
    }

    #[test]
    fn lower_dimensional_polytope_reports_equations() {
        // a segment in R^3
        let v = VRepresentation::new(pts(&[&[0, 0, 1], &[1, 1, 1]]), 3);
        let h = facet_enumeration(&v, &ResourceCaps::default()).unwrap();
        assert_eq!(h.equations.len(), 2);
        assert_eq!(h.facets.len(), 2);
        let v2 = vertex_enumeration(&h, &ResourceCaps::default()).unwrap();
        let mut expect = pts(&[&[0, 0, 1], &[1, 1, 1]]);
        expect.sort_unstable();
        assert_eq!(v2.points, expect);
    }

    #[test]
    fn degenerate_single_point() {
        let v = VRepresentation::new(pts(&[&[2, 3]]), 2);
        let h = facet_enumeration(&v, &ResourceCaps::default()).unwrap();
        assert!(h.facets.is_empty());
        assert_eq!(h.equations.len(), 2);
    }

    #[test]
    fn unbounded_detected() {
        // x >= 0 in R^1: {-x <= 0}
        let h = HRepresentation {
            ambient_dim: 1,
            facets: vec![(vec![Int::from(-1)], Int::zero())],
            equations: vec![],
        };
        assert!(matches!(
            vertex_enumeration(&h, &ResourceCaps::default()),
            Err(GeometryError::Unbounded)
        ));
    }

    #[test]
    fn facetness_of_square_edges_and_corners() {
        let square = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        // x <= 1 is a facet
        let values: Vec<Rat> = square.iter().map(|p| p[0].clone()).collect();
        let f = facetness(&values, &rat(1), &square).unwrap();
        assert_eq!(f, rat(1));
        // x + y <= 2 is saturated by one corner
        let values2: Vec<Rat> = square.iter().map(|p| &p[0] + &p[1]).collect();
        let f2 = facetness(&values2, &rat(2), &square).unwrap();
        assert_eq!(f2, rat(0));
        // non-tight inequality rejected
        assert!(facetness(&values2, &rat(3), &square).is_err());
    }

    #[test]
    fn initial_facet_and_rotation_recover_all_square_facets() {
        let square: Vec<Vec<Int>> = vec![
            vec![Int::from(0), Int::from(0)],
            vec![Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(1)],
            vec![Int::from(1), Int::from(1)],
        ];
        let f0 = initial_facet(&square, 2).unwrap();
        assert_eq!(f0.saturators.len(), 2);
        let mut seen = std::collections::BTreeSet::new();
        let mut queue = vec![f0];
        while let Some(f) = queue.pop() {
            if !seen.insert((f.normal.clone(), f.offset.clone())) {
                continue;
            }
            for ridge in ridges_of_facet(&square, &f, &ResourceCaps::default()).unwrap() {
                let adj = adjacent_facet(&square, &f, &ridge, 2).unwrap();
                queue.push(adj);
            }
        }
        assert_eq!(seen.len(), 4);
    }
}
