//! Symmetry group of a scenario acting on inequalities: canonical forms,
//! facet classes, and party-permutation invariance.
//!
//! The group combines party permutations (acting simultaneously on input
//! tuples and partition blocks), per-party input permutations, and — for the
//! bipartite binary case only — the output flip, which on reduced coordinates
//! is the affine map p(=|xy) -> 1 - p(=|xy) (the complementary pattern is the
//! dropped all-singletons one). For three or more outcomes no output action
//! exists on reduced coordinates at all. For more than two parties at k = 2 a
//! flip acts as a permutation of the two-block patterns, but the reference
//! facet tables do not quotient by it, so classification here does not
//! either.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::caps::ResourceCaps;
use crate::geometry::hull::{
    adjacent_facet, affine_hull, initial_facet, ridges_of_facet, LocalFacet,
};
use crate::geometry::linalg::primitive_integer;
use crate::geometry::{GeometryError, InequalityFunctional};
use crate::partitions::SetPartition;
use crate::strategies::{enumerate_vertices, EnumOptions, Mode, Scenario, StrategyError, VertexSet};
use crate::{Int, Rat};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SymmetryError {
    #[error("functionals from different scenarios cannot be classified together")]
    MixedScenarios,
    #[error("party permutations need matching input counts")]
    IncompatibleParties,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Precomputed coordinate action of the symmetry group of one scenario.
pub struct SymmetryGroup {
    scenario: Scenario,
    /// Coordinate bijections of (party perm, input perms) elements, as image
    /// tables over reduced coordinate indices.
    coord_maps: Vec<Vec<u32>>,
    /// Party-permutation-only maps, for the PPI test.
    party_maps: Vec<Vec<u32>>,
    /// Affine output flip present (k = 2, n = 2).
    bipartite_flip: bool,
}

fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    fn heap(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(perm.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, out);
            if k % 2 == 0 {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut perm, &mut out);
    out.sort_unstable();
    out
}

impl SymmetryGroup {
    pub fn new(scenario: &Scenario) -> Self {
        let n = scenario.parties();
        let sigma_list = scenario.sigma_list();
        let coords = scenario.coord_count();

        // party permutations compatible with the input profile
        let party_perms: Vec<Vec<usize>> = permutations_of(n)
            .into_iter()
            .filter(|p| (0..n).all(|i| scenario.inputs()[i] == scenario.inputs()[p[i]]))
            .collect();

        // per-party input permutation combinations
        let per_party_perms: Vec<Vec<Vec<usize>>> = scenario
            .inputs()
            .iter()
            .map(|&m| permutations_of(m))
            .collect();

        let sigma_index = |s: &SetPartition| -> usize {
            sigma_list.iter().position(|t| t == s).expect("closed under the action")
        };

        // coordinate map of one (party perm, input perms) element
        let perm_coord_map = |pp: &[usize], ips: &[&Vec<usize>]| -> Vec<u32> {
            let mut map = vec![0u32; coords];
            let mut new_x = vec![0usize; n];
            for ti in 0..scenario.tuple_count() {
                let x = scenario.tuple(ti);
                for i in 0..n {
                    new_x[pp[i]] = ips[i][x[i]];
                }
                let new_ti = scenario.tuple_index(&new_x);
                for (si, sigma) in sigma_list.iter().enumerate() {
                    let new_si = if n == 2 || scenario.mode() == Mode::Unanimous {
                        si // the single ALL pattern is fixed
                    } else {
                        sigma_index(&sigma.permuted(pp))
                    };
                    map[scenario.coord_index(ti, si)] =
                        scenario.coord_index(new_ti, new_si) as u32;
                }
            }
            map
        };

        let mut perm_maps: Vec<Vec<u32>> = Vec::new();
        let mut party_maps: Vec<Vec<u32>> = Vec::new();
        for pp in &party_perms {
            // identity input perms for the PPI maps
            let id_ips: Vec<&Vec<usize>> = per_party_perms.iter().map(|ps| &ps[0]).collect();
            party_maps.push(perm_coord_map(pp, &id_ips));
            // full product of input permutations
            let mut choice = vec![0usize; n];
            loop {
                let ips: Vec<&Vec<usize>> = (0..n)
                    .map(|i| &per_party_perms[i][choice[i]])
                    .collect();
                perm_maps.push(perm_coord_map(pp, &ips));
                let mut advanced = false;
                for i in 0..n {
                    if choice[i] + 1 < per_party_perms[i].len() {
                        choice[i] += 1;
                        advanced = true;
                        break;
                    }
                    choice[i] = 0;
                }
                if !advanced {
                    break;
                }
            }
        }

        let bipartite_flip = scenario.outcomes() == 2 && n == 2;

        SymmetryGroup {
            scenario: scenario.clone(),
            coord_maps: perm_maps,
            party_maps,
            bipartite_flip,
        }
    }

    pub fn order(&self) -> usize {
        self.coord_maps.len() * if self.bipartite_flip { 2 } else { 1 }
    }

    fn normalized(&self, ineq: &InequalityFunctional) -> (Vec<Int>, Int) {
        let mut v = ineq.dense();
        v.push(ineq.bound().clone());
        let ints = primitive_integer(&v);
        let bound = ints.last().expect("non-empty").clone();
        (ints[..ints.len() - 1].to_vec(), bound)
    }

    /// Lexicographic minimum of the orbit of `(coeffs, bound)`.
    fn canonical_ints(&self, coeffs: &[Int], bound: &Int) -> (Vec<Int>, Int) {
        let coords = coeffs.len();
        let mut best: Option<(Vec<Int>, Int)> = None;
        let mut consider = |v: &[Int], b: &Int| {
            for map in &self.coord_maps {
                let mut w = vec![Int::zero(); coords];
                for (i, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        w[map[i] as usize] = c.clone();
                    }
                }
                let better = match &best {
                    None => true,
                    Some((bw, bb)) => (&w, b) < (bw, bb),
                };
                if better {
                    best = Some((w, b.clone()));
                }
            }
        };
        consider(coeffs, bound);
        if self.bipartite_flip {
            // p(=|x) -> 1 - p(=|x): coefficients negate, bound shifts by the
            // coefficient sum
            let flipped: Vec<Int> = coeffs.iter().map(|c| -c.clone()).collect();
            let shift: Int = coeffs.iter().sum();
            let fbound = bound - shift;
            consider(&flipped, &fbound);
        }
        best.expect("group contains the identity")
    }

    /// Canonical form: the lexicographic minimum over the orbit, with
    /// coefficients rescaled to integers of gcd 1.
    pub fn canonical_form(&self, ineq: &InequalityFunctional) -> InequalityFunctional {
        let (coeffs, bound) = self.normalized(ineq);
        let (cc, cb) = self.canonical_ints(&coeffs, &bound);
        functional_from_ints(&self.scenario, &cc, &cb)
    }

    /// Canonical integer key of a functional, usable for class dedup.
    pub fn canonical_key(&self, ineq: &InequalityFunctional) -> (Vec<Int>, Int) {
        let (coeffs, bound) = self.normalized(ineq);
        self.canonical_ints(&coeffs, &bound)
    }

    /// Party-permutation invariance, up to positive scaling (party
    /// permutations leave the bound alone, so after gcd normalization this is
    /// plain equality of the permuted coefficients).
    pub fn is_ppi(&self, ineq: &InequalityFunctional) -> bool {
        let (coeffs, _) = self.normalized(ineq);
        let coords = coeffs.len();
        self.party_maps.iter().all(|map| {
            let mut w = vec![Int::zero(); coords];
            for (i, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    w[map[i] as usize] = c.clone();
                }
            }
            w == coeffs
        })
    }

    /// Applies one sampled group element (by index) to a functional; used by
    /// the orbit-invariance property tests.
    pub fn apply_element(&self, ineq: &InequalityFunctional, index: usize) -> InequalityFunctional {
        let (coeffs, bound) = self.normalized(ineq);
        let flip_phase = self.bipartite_flip && index % 2 == 1;
        let (v, b) = if flip_phase {
            let flipped: Vec<Int> = coeffs.iter().map(|c| -c.clone()).collect();
            let shift: Int = coeffs.iter().sum();
            (flipped, &bound - shift)
        } else {
            (coeffs, bound)
        };
        let map = &self.coord_maps[(index / 2) % self.coord_maps.len()];
        let mut w = vec![Int::zero(); v.len()];
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                w[map[i] as usize] = c.clone();
            }
        }
        functional_from_ints(&self.scenario, &w, &b)
    }
}

fn functional_from_ints(sc: &Scenario, coeffs: &[Int], bound: &Int) -> InequalityFunctional {
    let dense: Vec<Rat> = coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect();
    InequalityFunctional::from_dense(sc.clone(), &dense, Rat::from_integer(bound.clone()))
}

/// A facet class: its canonical representative, and whether it is the reduced
/// image of a positivity constraint (support confined to a single input
/// tuple), which the class counts exclude.
#[derive(Clone, Debug)]
pub struct FacetClass {
    pub representative: InequalityFunctional,
    pub is_positivity: bool,
}

#[derive(Debug)]
pub struct Classification {
    pub scenario: Scenario,
    pub polytope_dim: usize,
    pub vertex_count: usize,
    /// Hull equations of the classified polytope (integer-normalized).
    pub hull_equations: Vec<(Vec<Int>, Int)>,
    /// All classes, canonical representatives, sorted by canonical key.
    pub classes: Vec<FacetClass>,
}

impl Classification {
    /// Number of classes, positivity excluded.
    pub fn class_count(&self) -> usize {
        self.classes.iter().filter(|c| !c.is_positivity).count()
    }

    pub fn nonpositivity(&self) -> impl Iterator<Item = &FacetClass> {
        self.classes.iter().filter(|c| !c.is_positivity)
    }
}

/// True iff `target`'s residual modulo the equation basis is a `sign`-signed
/// multiple of `direction`'s residual.
fn parallel_mod_equations(
    eq_basis: &crate::geometry::linalg::RowBasis,
    target_residual: &[Rat],
    direction: &[Rat],
    want_negative: bool,
) -> bool {
    let dir_residual = eq_basis.remainder(direction);
    let Some(pivot) = dir_residual.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if target_residual[pivot].is_zero() {
        return false;
    }
    let mu = &target_residual[pivot] / &dir_residual[pivot];
    if mu.is_negative() != want_negative {
        return false;
    }
    target_residual
        .iter()
        .zip(&dir_residual)
        .all(|(r, u)| *r == &mu * u)
}

/// Positivity test, matching the exclusions of the reference facet tables: a
/// class is dropped from the counts iff, modulo the hull equations, it is
/// * a negative multiple of a single all-equal-pattern coordinate (the
///   reduced image of p(=_ALL|x) >= 0), or
/// * in smells mode, a positive multiple of one input tuple's coordinate sum
///   (the image of the dropped all-singletons pattern's positivity,
///   sum_sigma p(sigma|x) <= 1).
/// Disguised positivity images of other tracked patterns stay in the counts,
/// as do the u <= 1 facets of unanimous polytopes, whose coordinates cannot
/// express the complementary patterns.
fn is_positivity_class(
    ineq: &InequalityFunctional,
    hull_equations: &[(Vec<Int>, Int)],
) -> bool {
    let sc = ineq.scenario();
    let coords = sc.coord_count();
    let sigma_count = sc.sigma_count();
    let mut eq_basis = crate::geometry::linalg::RowBasis::new();
    for (e, _) in hull_equations {
        eq_basis.add(e.iter().map(|x| Rat::from_integer(x.clone())).collect());
    }
    let residual = eq_basis.remainder(&ineq.dense());
    if residual.iter().all(|x| x.is_zero()) {
        return false; // the zero functional is no facet anyway
    }
    for ti in 0..sc.tuple_count() {
        // the all-in-one partition is first in RGS-lex order
        let mut unit = vec![Rat::zero(); coords];
        unit[sc.coord_index(ti, 0)] = Rat::from_integer(1.into());
        if parallel_mod_equations(&eq_basis, &residual, &unit, true) {
            return true;
        }
    }
    if sc.mode() == Mode::Smells {
        for ti in 0..sc.tuple_count() {
            let mut tuple_sum = vec![Rat::zero(); coords];
            for si in 0..sigma_count {
                tuple_sum[sc.coord_index(ti, si)] = Rat::from_integer(1.into());
            }
            if parallel_mod_equations(&eq_basis, &residual, &tuple_sum, false) {
                return true;
            }
        }
    }
    false
}

/// Groups a list of facets of one scenario into symmetry classes.
pub fn classify_facets(
    facets: &[InequalityFunctional],
) -> Result<Classification, SymmetryError> {
    let Some(first) = facets.first() else {
        return Err(SymmetryError::MixedScenarios);
    };
    let scenario = first.scenario().clone();
    if facets.iter().any(|f| f.scenario() != &scenario) {
        return Err(SymmetryError::MixedScenarios);
    }
    let group = SymmetryGroup::new(&scenario);
    let keys: Vec<(Vec<Int>, Int)> = facets
        .par_iter()
        .map(|f| group.canonical_key(f))
        .collect();
    let mut by_key: HashMap<(Vec<Int>, Int), ()> = HashMap::new();
    for key in keys {
        by_key.entry(key).or_insert(());
    }
    let mut sorted: Vec<(Vec<Int>, Int)> = by_key.into_keys().collect();
    sorted.sort_unstable();
    let classes = sorted
        .into_iter()
        .map(|(coeffs, bound)| {
            let representative = functional_from_ints(&scenario, &coeffs, &bound);
            let is_positivity = is_positivity_class(&representative, &[]);
            FacetClass { representative, is_positivity }
        })
        .collect();
    Ok(Classification {
        scenario,
        polytope_dim: 0,
        vertex_count: 0,
        hull_equations: Vec::new(),
        classes,
    })
}

/// Facet classes of a scenario's local polytope by adjacency decomposition:
/// starting from one facet, enumerate the ridges of each class representative,
/// rotate across each ridge to the adjacent facet, and reduce modulo the
/// symmetry group until closure. Only one representative per class is ever
/// expanded, so the full facet list is never materialized.
pub fn classify_scenario(
    sc: &Scenario,
    opts: &EnumOptions,
) -> Result<Classification, SymmetryError> {
    let vertices = enumerate_vertices(sc, opts)?;
    classify_vertex_set(&vertices, &opts.caps)
}

/// Same as [`classify_scenario`], starting from an existing vertex set.
pub fn classify_vertex_set(
    vertices: &VertexSet,
    caps: &ResourceCaps,
) -> Result<Classification, SymmetryError> {
    let sc = vertices.scenario().clone();
    let points = vertices.rational_points();
    let hull = affine_hull(&points, sc.coord_count());
    let dim = hull.dim;
    let group = SymmetryGroup::new(&sc);

    let lift = |facet: &LocalFacet| -> InequalityFunctional {
        let g: Vec<Rat> = facet
            .normal
            .iter()
            .map(|x| Rat::from_integer(x.clone()))
            .collect();
        let (a, c) = hull.lift_functional(&g, &Rat::from_integer(facet.offset.clone()), sc.coord_count());
        InequalityFunctional::from_facet(sc.clone(), &a, &c)
    };

    let mut by_key: HashMap<(Vec<Int>, Int), ()> = HashMap::new();

    if dim >= 1 {
        let local: Vec<Vec<Int>> = (0..vertices.len())
            .map(|vi| {
                let v = vertices.get(vi);
                hull.proj_cols
                    .iter()
                    .map(|&c| Int::from(u8::from(v.get(c))))
                    .collect()
            })
            .collect();

        let start = initial_facet(&local, dim)?;
        let mut frontier: Vec<LocalFacet> = Vec::new();
        let key0 = group.canonical_key(&lift(&start));
        by_key.insert(key0, ());
        frontier.push(start);

        while !frontier.is_empty() {
            let neighbor_lists: Vec<Vec<LocalFacet>> = frontier
                .par_iter()
                .map(|facet| -> Result<Vec<LocalFacet>, SymmetryError> {
                    if dim == 1 {
                        // a segment: the other facet is the other endpoint
                        let flipped: Vec<Int> =
                            facet.normal.iter().map(|x| -x.clone()).collect();
                        let offset = local
                            .iter()
                            .map(|p| crate::geometry::linalg::dot_int(&flipped, p))
                            .max()
                            .expect("non-empty");
                        let saturators: Vec<usize> = local
                            .iter()
                            .enumerate()
                            .filter(|(_, p)| {
                                crate::geometry::linalg::dot_int(&flipped, p) == offset
                            })
                            .map(|(i, _)| i)
                            .collect();
                        return Ok(vec![LocalFacet { normal: flipped, offset, saturators }]);
                    }
                    let ridges = ridges_of_facet(&local, facet, caps)?;
                    let adjacent: Result<Vec<LocalFacet>, GeometryError> = ridges
                        .par_iter()
                        .map(|ridge| adjacent_facet(&local, facet, ridge, dim))
                        .collect();
                    Ok(adjacent?)
                })
                .collect::<Result<Vec<_>, _>>()?;

            let mut candidates: Vec<LocalFacet> = neighbor_lists.into_iter().flatten().collect();
            // pre-dedupe raw facets to cut canonicalization work
            candidates.sort_unstable_by(|a, b| {
                (&a.normal, &a.offset).cmp(&(&b.normal, &b.offset))
            });
            candidates.dedup_by(|a, b| a.normal == b.normal && a.offset == b.offset);

            let keyed: Vec<((Vec<Int>, Int), LocalFacet)> = candidates
                .into_par_iter()
                .map(|f| (group.canonical_key(&lift(&f)), f))
                .collect();

            let mut next = Vec::new();
            for (key, facet) in keyed {
                if !by_key.contains_key(&key) {
                    by_key.insert(key, ());
                    next.push(facet);
                }
            }
            frontier = next;
        }
    }

    let mut sorted: Vec<(Vec<Int>, Int)> = by_key.into_keys().collect();
    sorted.sort_unstable();
    let classes = sorted
        .into_iter()
        .map(|(coeffs, bound)| {
            let representative = functional_from_ints(&sc, &coeffs, &bound);
            let is_positivity = is_positivity_class(&representative, &hull.equations);
            FacetClass { representative, is_positivity }
        })
        .collect();

    Ok(Classification {
        scenario: sc,
        polytope_dim: dim,
        vertex_count: vertices.len(),
        hull_equations: hull.equations,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn chsh() -> InequalityFunctional {
        let sc = Scenario::new(vec![2, 2], 2, Mode::Smells).unwrap();
        let all = SetPartition::all_in_one(2);
        InequalityFunctional::new(
            sc,
            vec![
                (vec![0, 0], all.clone(), rat(1)),
                (vec![0, 1], all.clone(), rat(1)),
                (vec![1, 0], all.clone(), rat(1)),
                (vec![1, 1], all, rat(-1)),
            ],
            rat(2),
        )
        .unwrap()
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let sc = chsh().scenario().clone();
        let group = SymmetryGroup::new(&sc);
        let c1 = group.canonical_form(&chsh());
        let c2 = group.canonical_form(&c1);
        assert_eq!(c1, c2);
    }

    #[test]
    fn chsh_sign_variants_collapse() {
        // the eight placements of the minus sign (with both flip phases) all
        // canonicalize to one form
        let sc = chsh().scenario().clone();
        let group = SymmetryGroup::new(&sc);
        let all = SetPartition::all_in_one(2);
        let base_key = group.canonical_key(&chsh());
        for minus_at in 0..4 {
            let terms: Vec<(Vec<usize>, SetPartition, Rat)> = (0..4)
                .map(|i| {
                    let x = vec![i / 2, i % 2];
                    let c = if i == minus_at { rat(-1) } else { rat(1) };
                    (x, all.clone(), c)
                })
                .collect();
            let v = InequalityFunctional::new(sc.clone(), terms, rat(2)).unwrap();
            assert_eq!(group.canonical_key(&v), base_key, "minus at {minus_at}");
            // flipped variant: negate everything, bound 2 - sum = 0
            let flipped: Vec<(Vec<usize>, SetPartition, Rat)> = (0..4)
                .map(|i| {
                    let x = vec![i / 2, i % 2];
                    let c = if i == minus_at { rat(1) } else { rat(-1) };
                    (x, all.clone(), c)
                })
                .collect();
            let vf = InequalityFunctional::new(sc.clone(), flipped, rat(0)).unwrap();
            assert_eq!(group.canonical_key(&vf), base_key, "flipped minus at {minus_at}");
        }
    }

    #[test]
    fn orbit_invariance_of_canonical_form() {
        let ineq = chsh();
        let group = SymmetryGroup::new(ineq.scenario());
        let base = group.canonical_key(&ineq);
        for idx in 0..2 * group.order() {
            let moved = group.apply_element(&ineq, idx);
            assert_eq!(group.canonical_key(&moved), base, "element {idx}");
        }
    }

    #[test]
    fn chsh_is_ppi() {
        let group = SymmetryGroup::new(chsh().scenario());
        assert!(group.is_ppi(&chsh()));
        // an asymmetric functional is not PPI
        let sc = chsh().scenario().clone();
        let all = SetPartition::all_in_one(2);
        let asym = InequalityFunctional::new(
            sc,
            vec![(vec![0, 1], all, rat(1))],
            rat(1),
        )
        .unwrap();
        let group2 = SymmetryGroup::new(asym.scenario());
        assert!(!group2.is_ppi(&asym));
    }

    #[test]
    fn classify_222_finds_one_chsh_class() {
        let sc = Scenario::new(vec![2, 2], 2, Mode::Smells).unwrap();
        let cls = classify_scenario(&sc, &EnumOptions::default()).unwrap();
        assert_eq!(cls.vertex_count, 8);
        assert_eq!(cls.polytope_dim, 4);
        assert_eq!(cls.class_count(), 1, "only CHSH up to symmetry");
        let group = SymmetryGroup::new(&sc);
        let rep = cls.nonpositivity().next().unwrap();
        assert_eq!(
            group.canonical_key(&rep.representative),
            group.canonical_key(&chsh())
        );
    }

    #[test]
    fn classify_agrees_with_full_facet_enumeration() {
        use crate::geometry::{facet_enumeration, VRepresentation};
        for (inputs, k, mode) in [
            (vec![2usize, 2], 2usize, Mode::Smells),
            (vec![2, 2], 3, Mode::Smells),
            (vec![2, 2, 2], 2, Mode::Unanimous),
            (vec![2, 2, 2], 3, Mode::Unanimous),
        ] {
            let sc = Scenario::new(inputs, k, mode).unwrap();
            let opts = EnumOptions::default();
            let vs = enumerate_vertices(&sc, &opts).unwrap();
            let v = VRepresentation::new(vs.rational_points(), sc.coord_count());
            let h = facet_enumeration(&v, &opts.caps).unwrap();
            let facets: Vec<InequalityFunctional> = h
                .facets
                .iter()
                .map(|(a, c)| InequalityFunctional::from_facet(sc.clone(), a, c))
                .collect();
            let by_listing = classify_facets(&facets).unwrap();
            let by_search = classify_vertex_set(&vs, &opts.caps).unwrap();
            let keys = |c: &Classification| -> Vec<String> {
                c.classes
                    .iter()
                    .map(|cl| cl.representative.dump_line())
                    .collect()
            };
            assert_eq!(keys(&by_listing), keys(&by_search), "scenario {sc}");
        }
    }
}
