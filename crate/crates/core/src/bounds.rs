//! Local, signaling, no-signaling, and bilocal-NS bounds of inequality
//! functionals, all exact.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::geometry::ineq::InequalityFunctional;
use crate::geometry::lp::{Relation, SimplexProblem};
use crate::geometry::standard::FullSpace;
use crate::geometry::GeometryError;
use crate::partitions::pattern_of_outcomes;
use crate::strategies::{
    enumerate_vertices, EnumOptions, Scenario, StrategyError, VertexBits,
};
use crate::Rat;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BoundError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("bilocal bounds need at least 3 parties")]
    TooFewParties,
    #[error("{0}")]
    Unsupported(String),
}

/// A full behavior: p(a|x) for every outcome tuple and input tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct FullBehavior {
    pub parties: usize,
    pub inputs: Vec<usize>,
    pub outcomes: usize,
    /// Probabilities indexed tuple-major: index = x_index * k^n + a_index.
    pub probs: Vec<Rat>,
}

impl FullBehavior {
    pub fn prob(&self, x_idx: usize, a_idx: usize) -> &Rat {
        let outcome_count = self.outcomes.pow(self.parties as u32);
        &self.probs[x_idx * outcome_count + a_idx]
    }

    /// Marginal of one party: p(a_i | x_i), which for a no-signaling behavior
    /// is independent of the other inputs; computed at the all-zero inputs of
    /// the other parties.
    pub fn single_party_marginal(&self, party: usize, input: usize, outcome: u8) -> Rat {
        let outcome_count = self.outcomes.pow(self.parties as u32);
        let mut x = vec![0usize; self.parties];
        x[party] = input;
        let x_idx = x
            .iter()
            .zip(&self.inputs)
            .fold(0usize, |acc, (&xi, &m)| acc * m + xi);
        let mut total = Rat::zero();
        for a_idx in 0..outcome_count {
            let mut rem = a_idx;
            let mut ai = 0u8;
            for i in (0..self.parties).rev() {
                let d = (rem % self.outcomes) as u8;
                rem /= self.outcomes;
                if i == party {
                    ai = d;
                }
            }
            if ai == outcome {
                total += self.prob(x_idx, a_idx).clone();
            }
        }
        total
    }

    /// The reduced behavior of this full behavior in the given scenario shape.
    pub fn reduce(&self, sc: &Scenario) -> Vec<Rat> {
        assert_eq!(sc.parties(), self.parties);
        assert_eq!(sc.inputs(), &self.inputs[..]);
        let full = FullSpace {
            parties: self.parties,
            outcomes: self.outcomes,
            tuple_count: self.inputs.iter().product(),
            outcome_count: self.outcomes.pow(self.parties as u32),
        };
        let sigma_list = sc.sigma_list();
        let mut out = vec![Rat::zero(); sc.coord_count()];
        for ti in 0..full.tuple_count {
            for oi in 0..full.outcome_count {
                let p = self.prob(ti, oi);
                if p.is_zero() {
                    continue;
                }
                let a = full.outcome_tuple(oi);
                let pat = pattern_of_outcomes(&a);
                if let Some(si) = sigma_list.iter().position(|s| *s == pat) {
                    out[sc.coord_index(ti, si)] += p.clone();
                }
            }
        }
        out
    }
}

/// Maximum of the functional over the local vertices at outcome count `k`,
/// with a maximizing vertex as witness.
pub fn local_bound(
    ineq: &InequalityFunctional,
    k: usize,
    opts: &EnumOptions,
) -> Result<(Rat, VertexBits), BoundError> {
    let sc = ineq.scenario().with_outcomes(k);
    let vertices = enumerate_vertices(&sc, opts)?;
    let mut best: Option<(Rat, VertexBits)> = None;
    for v in vertices.iter() {
        let value = ineq.evaluate_vertex(v);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, v.clone()));
        }
    }
    Ok(best.expect("vertex set is never empty"))
}

/// The signaling bound: per input tuple the best achievable pattern value (0
/// always available through the all-different pattern), summed.
pub fn signaling_bound(ineq: &InequalityFunctional) -> Rat {
    let sc = ineq.scenario();
    let sigma_count = sc.sigma_count();
    let mut per_tuple: Vec<Option<Rat>> = vec![None; sc.tuple_count()];
    for (idx, coeff) in ineq.coeffs() {
        let ti = idx / sigma_count;
        if per_tuple[ti].as_ref().is_none_or(|m| coeff > m) {
            per_tuple[ti] = Some(coeff.clone());
        }
    }
    per_tuple
        .into_iter()
        .flatten()
        .filter(|m| m.is_positive())
        .sum()
}

/// The no-signaling constraint rows for a party set: per-input normalization
/// and, for every party, equality of the complementary marginal across that
/// party's inputs. Variables are p(a|x) >= 0 in tuple-major layout.
fn ns_equalities(
    inputs: &[usize],
    outcomes: usize,
) -> (FullSpace, Vec<(Vec<Rat>, Rat)>) {
    let parties = inputs.len();
    let tuple_count: usize = inputs.iter().product();
    let outcome_count = outcomes.pow(parties as u32);
    let full = FullSpace { parties, outcomes, tuple_count, outcome_count };
    let dim = full.dim();

    let tuple_of = |mut idx: usize| -> Vec<usize> {
        let mut x = vec![0usize; parties];
        for i in (0..parties).rev() {
            x[i] = idx % inputs[i];
            idx /= inputs[i];
        }
        x
    };
    let tuple_index = |x: &[usize]| -> usize {
        x.iter()
            .zip(inputs)
            .fold(0usize, |acc, (&xi, &m)| acc * m + xi)
    };

    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    // normalization
    for ti in 0..tuple_count {
        let mut row = vec![Rat::zero(); dim];
        for oi in 0..outcome_count {
            row[full.index(ti, oi)] = Rat::from_integer(1.into());
        }
        rows.push((row, Rat::from_integer(1.into())));
    }
    // no-signaling: for each party i, marginal over a_i of p is the same for
    // every value of x_i
    for i in 0..parties {
        if inputs[i] < 2 {
            continue;
        }
        for ti in 0..tuple_count {
            let x = tuple_of(ti);
            if x[i] == 0 {
                continue;
            }
            let mut x_ref = x.clone();
            x_ref[i] = 0;
            let ti_ref = tuple_index(&x_ref);
            // one equality per joint outcome of the other parties
            for other in 0..outcome_count / outcomes {
                let mut row = vec![Rat::zero(); dim];
                // expand `other` into the outcome tuple with a_i unknown
                for ai in 0..outcomes {
                    let mut rem = other;
                    let mut a = vec![0u8; parties];
                    for j in (0..parties).rev() {
                        if j == i {
                            a[j] = ai as u8;
                        } else {
                            a[j] = (rem % outcomes) as u8;
                            rem /= outcomes;
                        }
                    }
                    let oi = full.outcome_index(&a);
                    row[full.index(ti, oi)] = Rat::from_integer(1.into());
                    row[full.index(ti_ref, oi)] -= Rat::from_integer(1.into());
                }
                rows.push((row, Rat::zero()));
            }
        }
    }
    (full, rows)
}

/// The lifted objective of a reduced functional over the full space at
/// outcome count `k`.
fn lifted_objective(ineq: &InequalityFunctional, k: usize) -> (FullSpace, Vec<Rat>) {
    let sc = ineq.scenario().with_outcomes(k);
    let lifted = InequalityFunctional::from_dense(sc.clone(), &ineq.dense(), ineq.bound().clone());
    let obj = crate::geometry::standard::lift_to_full_behavior(&lifted);
    (FullSpace::new(&sc), obj)
}

/// Exact LP maximum of the lifted functional over normalized no-signaling
/// behaviors at outcome count `k`, with an optimal behavior as witness.
pub fn ns_bound(
    ineq: &InequalityFunctional,
    k: usize,
) -> Result<(Rat, FullBehavior), BoundError> {
    let sc = ineq.scenario();
    let (full, objective) = lifted_objective(ineq, k);
    let (_, rows) = ns_equalities(sc.inputs(), k);
    let mut problem = SimplexProblem::new(objective);
    for (row, rhs) in rows {
        problem.push_row(row, Relation::Eq, rhs);
    }
    let sol = problem.maximize()?;
    let behavior = FullBehavior {
        parties: sc.parties(),
        inputs: sc.inputs().to_vec(),
        outcomes: k,
        probs: sol.point,
    };
    let _ = full;
    Ok((sol.value, behavior))
}

/// The explicit two-outcome no-signaling behavior winning every unanimous
/// game: on the equal-inputs set, probability 1/2 on each constant outcome
/// tuple; elsewhere, uniform over the 2^n - 2 non-constant tuples. Every
/// single-party marginal is uniform.
pub fn ns_perfect_strategy(sc: &Scenario, equal_inputs: &[usize]) -> FullBehavior {
    let n = sc.parties();
    let outcome_count = 1usize << n;
    let tuple_count = sc.tuple_count();
    let mut probs = vec![Rat::zero(); tuple_count * outcome_count];
    let half = Rat::new(1.into(), 2.into());
    let off_weight = Rat::new(1.into(), ((outcome_count - 2) as u64).into());
    let all_zero = 0usize;
    let all_one = outcome_count - 1;
    for ti in 0..tuple_count {
        let on_equal_set = equal_inputs.contains(&ti);
        for oi in 0..outcome_count {
            let idx = ti * outcome_count + oi;
            if on_equal_set {
                if oi == all_zero || oi == all_one {
                    probs[idx] = half.clone();
                }
            } else if oi != all_zero && oi != all_one {
                probs[idx] = off_weight.clone();
            }
        }
    }
    FullBehavior {
        parties: n,
        inputs: sc.inputs().to_vec(),
        outcomes: 2,
        probs,
    }
}

/// Splits of the party set into two non-empty groups, each as (group, rest),
/// with the group containing party 0 (so each bipartition appears once).
fn bipartitions(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for mask in 0..(1usize << (n - 1)) {
        let mask = mask << 1 | 1; // party 0 always in the first group
        if mask == (1 << n) - 1 {
            continue;
        }
        let g1: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let g2: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        out.push((g1, g2));
    }
    out
}

/// Canonical deterministic strategies of a single party modulo global outcome
/// relabeling: outcome tables in restricted-growth form with at most k values.
fn singleton_strategies(m: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut table = vec![0u8; m];
    loop {
        out.push(table.clone());
        let mut i = m;
        let mut done = true;
        while i > 1 {
            i -= 1;
            let max_prefix = table[..i].iter().copied().max().unwrap_or(0);
            let next = table[i] + 1;
            if next <= max_prefix + 1 && usize::from(next) < k {
                table[i] = next;
                for v in table[i + 1..].iter_mut() {
                    *v = 0;
                }
                done = false;
                break;
            }
        }
        if done {
            return out;
        }
    }
}

/// Max of the lifted functional over products of a fixed behavior `q` on the
/// complement parties and a no-signaling behavior on `group`.
fn bilocal_group_lp(
    ineq: &InequalityFunctional,
    k: usize,
    group: &[usize],
    rest: &[usize],
    q: &dyn Fn(usize, &[u8]) -> Rat, // (rest tuple index, rest outcomes) -> prob
) -> Result<Rat, BoundError> {
    let sc = ineq.scenario();
    let g_inputs: Vec<usize> = group.iter().map(|&i| sc.inputs()[i]).collect();
    let r_inputs: Vec<usize> = rest.iter().map(|&i| sc.inputs()[i]).collect();
    let g_tuples: usize = g_inputs.iter().product();
    let r_tuples: usize = r_inputs.iter().product();
    let g_out = k.pow(group.len() as u32);
    let r_out = k.pow(rest.len() as u32);
    let n = sc.parties();
    let dense = ineq.dense();
    let sigma_list = sc.sigma_list();
    let sigma_count = sc.sigma_count();

    // objective over the group behavior
    let mut objective = vec![Rat::zero(); g_tuples * g_out];
    let mut x = vec![0usize; n];
    let mut a = vec![0u8; n];
    for gt in 0..g_tuples {
        // group input tuple
        let mut rem = gt;
        for idx in (0..group.len()).rev() {
            x[group[idx]] = rem % g_inputs[idx];
            rem /= g_inputs[idx];
        }
        for rt in 0..r_tuples {
            let mut rem = rt;
            for idx in (0..rest.len()).rev() {
                x[rest[idx]] = rem % r_inputs[idx];
                rem /= r_inputs[idx];
            }
            let ti = sc.tuple_index(&x);
            for ga in 0..g_out {
                let mut rem = ga;
                for idx in (0..group.len()).rev() {
                    a[group[idx]] = (rem % k) as u8;
                    rem /= k;
                }
                let mut acc = Rat::zero();
                for ra in 0..r_out {
                    let mut rem = ra;
                    let mut r_outs = vec![0u8; rest.len()];
                    for idx in (0..rest.len()).rev() {
                        r_outs[idx] = (rem % k) as u8;
                        rem /= k;
                    }
                    for (idx, &i) in rest.iter().enumerate() {
                        a[i] = r_outs[idx];
                    }
                    let weight = q(rt, &r_outs);
                    if weight.is_zero() {
                        continue;
                    }
                    let pat = pattern_of_outcomes(&a);
                    if let Some(si) = sigma_list.iter().position(|s| *s == pat) {
                        let coeff = &dense[ti * sigma_count + si];
                        if !coeff.is_zero() {
                            acc += coeff * &weight;
                        }
                    }
                }
                objective[gt * g_out + ga] += acc;
            }
        }
    }

    let (_, rows) = ns_equalities(&g_inputs, k);
    let mut problem = SimplexProblem::new(objective);
    for (row, rhs) in rows {
        problem.push_row(row, Relation::Eq, rhs);
    }
    Ok(problem.maximize()?.value)
}

/// Maximum of the functional over bilocal no-signaling models: across every
/// bipartition of the parties, products of a group-NS behavior with an
/// arbitrary behavior on the complement (convex mixtures never beat the best
/// product). For group+singleton splits the singleton's deterministic
/// strategies are enumerated; for group+group splits the smaller group's NS
/// polytope vertices are enumerated and an LP runs over the other group.
pub fn bilocal_ns_bound(
    ineq: &InequalityFunctional,
    k: usize,
    caps: &crate::caps::ResourceCaps,
) -> Result<Rat, BoundError> {
    let sc = ineq.scenario();
    let n = sc.parties();
    if n < 3 {
        return Err(BoundError::TooFewParties);
    }
    let mut best: Option<Rat> = None;
    for (g1, g2) in bipartitions(n) {
        // orient: LP over the larger side, enumerate the smaller side
        let (enumerate, lp_side) = if g1.len() <= g2.len() {
            (g1.clone(), g2.clone())
        } else {
            (g2.clone(), g1.clone())
        };
        let e_inputs: Vec<usize> = enumerate.iter().map(|&i| sc.inputs()[i]).collect();

        let candidates: Vec<Box<dyn Fn(usize, &[u8]) -> Rat>> = if enumerate.len() == 1 {
            let m = e_inputs[0];
            singleton_strategies(m, k)
                .into_iter()
                .map(|table| {
                    let f: Box<dyn Fn(usize, &[u8]) -> Rat> = Box::new(move |xt, a| {
                        if usize::from(a[0]) == usize::from(table[xt]) {
                            Rat::from_integer(1.into())
                        } else {
                            Rat::zero()
                        }
                    });
                    f
                })
                .collect()
        } else {
            // NS vertices of the enumerated group
            let (full, rows) = ns_equalities(&e_inputs, k);
            let dim = full.dim();
            let mut facets = Vec::with_capacity(dim);
            for c in 0..dim {
                let mut normal = vec![crate::Int::zero(); dim];
                normal[c] = -crate::Int::from(1);
                facets.push((normal, crate::Int::zero()));
            }
            let equations = rows
                .iter()
                .map(|(row, rhs)| {
                    let mut v: Vec<Rat> = row.clone();
                    v.push(rhs.clone());
                    let ints = crate::geometry::linalg::primitive_integer(&v);
                    let f = ints.last().expect("non-empty").clone();
                    (ints[..ints.len() - 1].to_vec(), f)
                })
                .collect();
            let h = crate::geometry::HRepresentation {
                ambient_dim: dim,
                facets,
                equations,
            };
            let v = crate::geometry::vertex_enumeration(&h, caps)?;
            let e_out = k.pow(enumerate.len() as u32);
            v.points
                .into_iter()
                .map(|point| {
                    let f: Box<dyn Fn(usize, &[u8]) -> Rat> = Box::new(move |xt, a| {
                        let ai = a
                            .iter()
                            .fold(0usize, |acc, &d| acc * k + usize::from(d));
                        point[xt * e_out + ai].clone()
                    });
                    f
                })
                .collect()
        };

        for q in &candidates {
            let value = bilocal_group_lp(ineq, k, &lp_side, &enumerate, q.as_ref())?;
            if best.as_ref().is_none_or(|b| value > *b) {
                best = Some(value);
            }
        }
    }
    Ok(best.expect("at least one bipartition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::SetPartition;
    use crate::strategies::Mode;
    use crate::{rat, ratio};

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
    fn chsh_bounds() {
        let i = chsh();
        let (local, _) = local_bound(&i, 2, &EnumOptions::default()).unwrap();
        assert_eq!(local, rat(2));
        assert_eq!(signaling_bound(&i), rat(3));
        let (ns, witness) = ns_bound(&i, 2).unwrap();
        assert_eq!(ns, rat(3));
        // witness is a genuine normalized behavior achieving 3
        let reduced = witness.reduce(i.scenario());
        assert_eq!(i.evaluate_point(&reduced), rat(3));
    }

    #[test]
    fn ns_perfect_strategy_wins_and_hides() {
        let sc = Scenario::new(vec![2, 2, 2], 2, Mode::Unanimous).unwrap();
        // equal set: tuples with even parity
        let equal: Vec<usize> = (0..sc.tuple_count())
            .filter(|&ti| sc.tuple(ti).iter().sum::<usize>() % 2 == 0)
            .collect();
        let b = ns_perfect_strategy(&sc, &equal);
        // wins with probability one: all-equal mass 1 on the equal set, 0 off
        let outcome_count = 1usize << 3;
        for ti in 0..sc.tuple_count() {
            let all_equal_mass =
                b.prob(ti, 0).clone() + b.prob(ti, outcome_count - 1).clone();
            if equal.contains(&ti) {
                assert_eq!(all_equal_mass, rat(1));
            } else {
                assert_eq!(all_equal_mass, rat(0));
                let total: Rat = (0..outcome_count).map(|oi| b.prob(ti, oi).clone()).sum();
                assert_eq!(total, rat(1));
            }
        }
        // single-party marginals exactly uniform
        for party in 0..3 {
            for input in 0..2 {
                for outcome in 0..2u8 {
                    assert_eq!(
                        b.single_party_marginal(party, input, outcome),
                        ratio(1, 2)
                    );
                }
            }
        }
    }

    #[test]
    fn monotone_chain_for_chsh() {
        let i = chsh();
        let (l2, _) = local_bound(&i, 2, &EnumOptions::default()).unwrap();
        let (l3, _) = local_bound(&i, 3, &EnumOptions::default()).unwrap();
        let (ns, _) = ns_bound(&i, 2).unwrap();
        let s = signaling_bound(&i);
        assert!(l2 <= l3 && l3 <= ns && ns <= s);
    }
}
