//! Lifting reduced functionals to the full behavior space and testing them
//! against the standard local polytope.
//!
//! A full behavior assigns p(a|x) to every outcome tuple a and input tuple x.
//! The lift of a reduced functional puts the coefficient of (x, sigma) on
//! every p(a|x) whose outcome pattern is sigma, so the lifted value on any
//! full behavior equals the reduced functional on its reduced image.

use num_traits::Zero;

use super::linalg::RowBasis;
use super::GeometryError;
use crate::geometry::ineq::InequalityFunctional;
use crate::partitions::pattern_of_outcomes;
use crate::strategies::Scenario;
use crate::Rat;

/// Coordinate layout of the full behavior space of a scenario: index =
/// tuple_index * k^n + outcome_index, outcomes in mixed radix (party 0 most
/// significant).
pub struct FullSpace {
    pub parties: usize,
    pub outcomes: usize,
    pub tuple_count: usize,
    pub outcome_count: usize,
}

impl FullSpace {
    pub fn new(sc: &Scenario) -> Self {
        let outcome_count = sc.outcomes().pow(sc.parties() as u32);
        FullSpace {
            parties: sc.parties(),
            outcomes: sc.outcomes(),
            tuple_count: sc.tuple_count(),
            outcome_count,
        }
    }

    pub fn dim(&self) -> usize {
        self.tuple_count * self.outcome_count
    }

    pub fn index(&self, tuple_idx: usize, outcome_idx: usize) -> usize {
        tuple_idx * self.outcome_count + outcome_idx
    }

    pub fn outcome_tuple(&self, mut idx: usize) -> Vec<u8> {
        let mut a = vec![0u8; self.parties];
        for i in (0..self.parties).rev() {
            a[i] = (idx % self.outcomes) as u8;
            idx /= self.outcomes;
        }
        a
    }

    pub fn outcome_index(&self, a: &[u8]) -> usize {
        a.iter().fold(0usize, |acc, &ai| acc * self.outcomes + usize::from(ai))
    }
}

/// Dense full-space objective of a reduced functional: the coefficient on
/// p(a|x) is the reduced coefficient at (x, pattern(a)), zero when the pattern
/// carries no coordinate.
pub fn lift_to_full_behavior(ineq: &InequalityFunctional) -> Vec<Rat> {
    let sc = ineq.scenario();
    let full = FullSpace::new(sc);
    let sigma_list = sc.sigma_list();
    let sigma_count = sc.sigma_count();
    // pattern of each outcome tuple -> sigma index (None for unrepresented)
    let pattern_sigma: Vec<Option<usize>> = (0..full.outcome_count)
        .map(|oi| {
            let a = full.outcome_tuple(oi);
            let pat = pattern_of_outcomes(&a);
            sigma_list.iter().position(|s| *s == pat)
        })
        .collect();
    let mut out = vec![Rat::zero(); full.dim()];
    for (coord, coeff) in ineq.coeffs() {
        let (ti, si) = (coord / sigma_count, coord % sigma_count);
        for (oi, ps) in pattern_sigma.iter().enumerate() {
            if *ps == Some(si) {
                out[full.index(ti, oi)] = coeff.clone();
            }
        }
    }
    out
}

/// Deterministic vertices of the standard local polytope, walked one strategy
/// at a time. The visitor gets the per-tuple outcome indices of the vertex
/// (the vertex has p = 1 exactly at those (x, a) pairs).
pub fn for_each_standard_vertex(sc: &Scenario, mut visit: impl FnMut(&[usize])) {
    let full = FullSpace::new(sc);
    let n = sc.parties();
    let k = sc.outcomes();
    let tuples = sc.tuples();
    // strategy: flat outcome table, party-major
    let node_count = sc.node_count();
    let mut flat = vec![0u8; node_count];
    let offsets: Vec<usize> = (0..n).map(|i| sc.node_index(i, 0)).collect();
    let mut per_tuple = vec![0usize; tuples.len()];
    loop {
        for (ti, x) in tuples.iter().enumerate() {
            let mut a = 0usize;
            for i in 0..n {
                a = a * k + usize::from(flat[offsets[i] + x[i]]);
            }
            per_tuple[ti] = a;
        }
        let _ = &full;
        visit(&per_tuple);

        let mut i = node_count;
        let mut done = true;
        while i > 0 {
            i -= 1;
            if usize::from(flat[i]) + 1 < k {
                flat[i] += 1;
                for v in flat[i + 1..].iter_mut() {
                    *v = 0;
                }
                done = false;
                break;
            }
        }
        if done {
            break;
        }
    }
}

/// Dimension of the standard local polytope of a scenario:
/// prod_i (m_i (k-1) + 1) - 1.
pub fn standard_polytope_dim(sc: &Scenario) -> usize {
    let k = sc.outcomes();
    sc.inputs().iter().map(|&m| m * (k - 1) + 1).product::<usize>() - 1
}

/// Result of testing a lifted inequality against the standard local polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardFacetReport {
    /// Maximum of the lifted functional over the deterministic vertices.
    pub max_value: Rat,
    /// Affine dimension of the saturating vertex set (meaningful when tight).
    pub saturating_dim: usize,
    /// Dimension of the standard polytope.
    pub polytope_dim: usize,
    pub is_valid: bool,
    pub is_facet: bool,
}

/// Tests whether the lift of a reduced inequality supports a facet of the
/// standard local polytope at the functional's native outcome count.
pub fn standard_facet_report(
    ineq: &InequalityFunctional,
    max_vertices: u64,
) -> Result<StandardFacetReport, GeometryError> {
    let sc = ineq.scenario();
    let full = FullSpace::new(sc);
    let strategy_count = (sc.outcomes() as u64).checked_pow(sc.node_count() as u32);
    match strategy_count {
        Some(c) if c <= max_vertices => {}
        _ => {
            return Err(GeometryError::Cap(crate::caps::CapExceeded::new(
                "caps.max_vertices",
                max_vertices,
                strategy_count.unwrap_or(u64::MAX),
            )))
        }
    }

    let sigma_count = sc.sigma_count();
    let sigma_list = sc.sigma_list();
    // reduced coefficient per (tuple, outcome-pattern), for fast evaluation
    let pattern_sigma: Vec<Option<usize>> = (0..full.outcome_count)
        .map(|oi| {
            let a = full.outcome_tuple(oi);
            let pat = pattern_of_outcomes(&a);
            sigma_list.iter().position(|s| *s == pat)
        })
        .collect();
    let dense = ineq.dense();
    let coeff_at = |ti: usize, oi: usize| -> &Rat {
        static ZERO: std::sync::OnceLock<Rat> = std::sync::OnceLock::new();
        match pattern_sigma[oi] {
            Some(si) => &dense[ti * sigma_count + si],
            None => ZERO.get_or_init(Rat::zero),
        }
    };

    // pass 1: maximum value
    let mut max_value: Option<Rat> = None;
    for_each_standard_vertex(sc, |per_tuple| {
        let v: Rat = per_tuple
            .iter()
            .enumerate()
            .map(|(ti, &oi)| coeff_at(ti, oi).clone())
            .sum();
        if max_value.as_ref().is_none_or(|m| v > *m) {
            max_value = Some(v);
        }
    });
    let max_value = max_value.expect("at least one strategy");
    let polytope_dim = standard_polytope_dim(sc);
    let is_valid = max_value <= *ineq.bound();
    if !is_valid || max_value != *ineq.bound() {
        // invalid, or valid but never tight: certainly not a facet
        return Ok(StandardFacetReport {
            max_value,
            saturating_dim: 0,
            polytope_dim,
            is_valid,
            is_facet: false,
        });
    }

    // pass 2: affine rank of the saturating vertices
    let mut base: Option<Vec<Rat>> = None;
    let mut basis = RowBasis::new();
    let bound = ineq.bound().clone();
    for_each_standard_vertex(sc, |per_tuple| {
        let v: Rat = per_tuple
            .iter()
            .enumerate()
            .map(|(ti, &oi)| coeff_at(ti, oi).clone())
            .sum();
        if v != bound {
            return;
        }
        let mut point = vec![Rat::zero(); full.dim()];
        for (ti, &oi) in per_tuple.iter().enumerate() {
            point[full.index(ti, oi)] = Rat::from_integer(1.into());
        }
        match &base {
            None => base = Some(point),
            Some(b) => {
                let diff: Vec<Rat> = point.iter().zip(b).map(|(x, y)| x - y).collect();
                basis.add(diff);
            }
        }
    });
    let saturating_dim = basis.rank();
    Ok(StandardFacetReport {
        max_value,
        saturating_dim,
        polytope_dim,
        is_valid,
        is_facet: saturating_dim == polytope_dim - 1,
    })
}

/// Facetness of the lifted inequality relative to the standard local polytope:
/// affine dimension of the saturating deterministic vertices over
/// (polytope dimension - 1). Requires the inequality to be tight.
pub fn standard_facetness(
    ineq: &InequalityFunctional,
    max_vertices: u64,
) -> Result<Rat, GeometryError> {
    let report = standard_facet_report(ineq, max_vertices)?;
    if !report.is_valid || report.max_value != *ineq.bound() {
        return Err(GeometryError::NotTight {
            max: report.max_value,
            bound: ineq.bound().clone(),
        });
    }
    Ok(Rat::new(
        (report.saturating_dim as u64).into(),
        ((report.polytope_dim - 1) as u64).into(),
    ))
}

pub fn is_standard_local_facet(
    ineq: &InequalityFunctional,
    max_vertices: u64,
) -> Result<bool, GeometryError> {
    Ok(standard_facet_report(ineq, max_vertices)?.is_facet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::SetPartition;
    use crate::rat;
    use crate::strategies::Mode;

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
    fn lifted_chsh_on_constant_strategy() {
        // all-zero outputs: equal on every input pair, value 1+1+1-1 = 2
        let i = chsh();
        let obj = lift_to_full_behavior(&i);
        let full = FullSpace::new(i.scenario());
        let value: Rat = (0..full.tuple_count)
            .map(|ti| obj[full.index(ti, 0)].clone())
            .sum();
        assert_eq!(value, rat(2));
    }

    #[test]
    fn zero_functional_lifts_to_zero() {
        let sc = Scenario::new(vec![2, 2], 2, Mode::Smells).unwrap();
        let i = InequalityFunctional::new(sc, vec![], rat(0)).unwrap();
        assert!(lift_to_full_behavior(&i).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn lift_identity_on_strategies() {
        // lifted value on a deterministic full behavior equals the reduced
        // functional on its reduced behavior
        use crate::strategies::{reduce_strategy, DeterministicStrategy};
        let i = chsh();
        let sc = i.scenario().clone();
        let obj = lift_to_full_behavior(&i);
        let full = FullSpace::new(&sc);
        for code in 0..16u8 {
            let s = DeterministicStrategy {
                outputs: vec![
                    vec![code & 1, code >> 1 & 1],
                    vec![code >> 2 & 1, code >> 3 & 1],
                ],
            };
            let reduced = reduce_strategy(&s, &sc).unwrap();
            let reduced_value = i.evaluate_vertex(&reduced);
            let mut full_value = Rat::zero();
            for (ti, x) in sc.tuples().iter().enumerate() {
                let a = [s.outcome(0, x[0]), s.outcome(1, x[1])];
                full_value += obj[full.index(ti, full.outcome_index(&a))].clone();
            }
            assert_eq!(full_value, reduced_value);
        }
    }

    #[test]
    fn chsh_is_a_standard_facet() {
        let report = standard_facet_report(&chsh(), 1 << 20).unwrap();
        assert!(report.is_valid);
        assert_eq!(report.max_value, rat(2));
        assert_eq!(report.polytope_dim, 8);
        assert!(report.is_facet);
        assert_eq!(standard_facetness(&chsh(), 1 << 20).unwrap(), rat(1));
    }

    #[test]
    fn standard_dim_formula() {
        let sc = Scenario::new(vec![2, 2, 2], 2, Mode::Smells).unwrap();
        assert_eq!(standard_polytope_dim(&sc), 26);
        let sc2 = Scenario::new(vec![2, 2], 3, Mode::Smells).unwrap();
        assert_eq!(standard_polytope_dim(&sc2), 24);
    }
}
