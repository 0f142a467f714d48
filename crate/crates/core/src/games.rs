//! Unanimous inequalities as deterministic nonlocal games.
//!
//! Every unanimous inequality rewrites as a deterministic game: negative
//! terms flip to the complementary event, the shift moves into the bound,
//! and dividing by the absolute coefficient sum makes the prior a
//! distribution. The winning predicate is all-outcomes-equal on inputs with
//! positive coefficients and its negation on negative ones.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::bounds::FullBehavior;
use crate::geometry::ineq::InequalityFunctional;
use crate::partitions::SetPartition;
use crate::strategies::{
    enumerate_vertices, EnumOptions, Mode, Scenario, StrategyError,
};
use crate::Rat;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GameError {
    #[error("functional is not unanimous: coefficient on {0} is not on the all-equal pattern")]
    NotUnanimous(String),
    #[error("behavior shape does not match the game scenario")]
    ShapeMismatch,
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// A deterministic nonlocal game with a unanimous-style predicate: on
/// `equal_set` inputs the players win iff all outcomes agree, on
/// `different_set` inputs iff they do not; other inputs never occur (zero
/// prior).
#[derive(Clone, Debug, PartialEq)]
pub struct DeterministicGame {
    pub scenario: Scenario,
    /// Prior over input tuple indices; entries are positive and sum to 1.
    pub prior: BTreeMap<usize, Rat>,
    /// Input tuples whose predicate is "all outcomes equal".
    pub equal_set: Vec<usize>,
    /// Input tuples whose predicate is the negation.
    pub different_set: Vec<usize>,
    /// Local bound of the game value.
    pub local_value: Rat,
}

impl DeterministicGame {
    /// The winning predicate V(a, x) for an outcome tuple with the given
    /// equality status.
    pub fn predicate(&self, tuple_idx: usize, all_equal: bool) -> bool {
        if self.equal_set.contains(&tuple_idx) {
            all_equal
        } else if self.different_set.contains(&tuple_idx) {
            !all_equal
        } else {
            false // zero prior; the value never sees it
        }
    }
}

/// Transform data tying a game back to its source inequality:
/// I(p) = scale * G(p) + shift.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTransform {
    pub game: DeterministicGame,
    /// Sum of absolute coefficients.
    pub scale: Rat,
    /// Sum of the negative coefficients.
    pub shift: Rat,
}

/// Rewrites a unanimous inequality as a deterministic nonlocal game with
/// prior mu(x) = |beta_x| / sum |beta| and game bound
/// (L - sum_{beta<0} beta) / sum |beta|.
pub fn unanimous_to_game(ineq: &InequalityFunctional) -> Result<GameTransform, GameError> {
    let sc = ineq.scenario();
    let sigma_count = sc.sigma_count();
    let all_idx = 0usize; // the all-in-one pattern is first in RGS-lex order
    let mut abs_sum = Rat::zero();
    let mut neg_sum = Rat::zero();
    let mut weights: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut equal_set = Vec::new();
    let mut different_set = Vec::new();
    for (idx, coeff) in ineq.coeffs() {
        let (ti, si) = (idx / sigma_count, idx % sigma_count);
        if si != all_idx {
            return Err(GameError::NotUnanimous(sc.coord_name(idx)));
        }
        abs_sum += coeff.abs();
        if coeff.is_negative() {
            neg_sum += coeff.clone();
            different_set.push(ti);
        } else {
            equal_set.push(ti);
        }
        weights.insert(ti, coeff.abs());
    }
    let prior: BTreeMap<usize, Rat> = weights
        .into_iter()
        .map(|(ti, w)| (ti, w / &abs_sum))
        .collect();
    let local_value = (ineq.bound() - &neg_sum) / &abs_sum;
    Ok(GameTransform {
        game: DeterministicGame {
            scenario: sc.with_mode(Mode::Unanimous),
            prior,
            equal_set,
            different_set,
            local_value,
        },
        scale: abs_sum,
        shift: neg_sum,
    })
}

/// The N-party unanimous family on binary inputs: coefficient
/// (-1)^(x_1 xor ... xor x_N) on the all-equal event for every input tuple,
/// local bound 1 + ((N+1) mod 2), native scenario (N, 2, 3).
pub fn family_f_n2(parties: usize) -> InequalityFunctional {
    assert!(parties >= 2, "the family needs at least two parties");
    let sc = Scenario::new(vec![2; parties], 3, Mode::Unanimous).expect("valid scenario");
    let all = SetPartition::all_in_one(parties);
    let terms: Vec<(Vec<usize>, SetPartition, Rat)> = (0..sc.tuple_count())
        .map(|ti| {
            let x = sc.tuple(ti);
            let parity = x.iter().sum::<usize>() % 2;
            let coeff = if parity == 0 { crate::rat(1) } else { crate::rat(-1) };
            (x, all.clone(), coeff)
        })
        .collect();
    let bound = crate::rat(1 + ((parties as i64 + 1) % 2));
    InequalityFunctional::new(sc, terms, bound)
        .expect("family coefficients are valid")
        .with_name(format!("f-{parties}2"))
}

/// Maximum winning probability over deterministic strategies with `k`
/// outcomes. Strategies enter through the local vertex set of the unanimous
/// scenario (outcome count capped at its saturation threshold).
pub fn classical_game_value(
    game: &DeterministicGame,
    k: usize,
    opts: &EnumOptions,
) -> Result<Rat, GameError> {
    let sc = game.scenario.with_outcomes(k).with_mode(Mode::Unanimous);
    let vertices = enumerate_vertices(&sc, opts)?;
    let mut best: Option<Rat> = None;
    for v in vertices.iter() {
        let mut value = Rat::zero();
        for (&ti, mu) in &game.prior {
            let all_equal = v.get(ti); // unanimous coordinate per tuple
            if game.predicate(ti, all_equal) {
                value += mu.clone();
            }
        }
        if best.as_ref().is_none_or(|b| value > *b) {
            best = Some(value);
        }
    }
    Ok(best.expect("vertex set is never empty"))
}

/// Average score of a full behavior at the game.
pub fn game_value(game: &DeterministicGame, behavior: &FullBehavior) -> Result<Rat, GameError> {
    let sc = &game.scenario;
    if behavior.parties != sc.parties() || behavior.inputs != sc.inputs() {
        return Err(GameError::ShapeMismatch);
    }
    let k = behavior.outcomes;
    let outcome_count = k.pow(behavior.parties as u32);
    let mut total = Rat::zero();
    for (&ti, mu) in &game.prior {
        let mut win = Rat::zero();
        for oi in 0..outcome_count {
            let p = behavior.prob(ti, oi);
            if p.is_zero() {
                continue;
            }
            // all outcomes equal iff the digits of oi agree
            let mut rem = oi;
            let mut first = None;
            let mut all_equal = true;
            for _ in 0..behavior.parties {
                let d = rem % k;
                rem /= k;
                match first {
                    None => first = Some(d),
                    Some(f) if f == d => {}
                    Some(_) => {
                        all_equal = false;
                        break;
                    }
                }
            }
            if game.predicate(ti, all_equal) {
                win += p.clone();
            }
        }
        total += mu * &win;
    }
    Ok(total)
}

/// Evaluates the source inequality on a reduced behavior via the transform
/// identity I(p) = scale * G(p) + shift; used by the round-trip tests.
pub fn transform_identity_check(
    transform: &GameTransform,
    ineq: &InequalityFunctional,
    behavior: &FullBehavior,
) -> Result<bool, GameError> {
    let g = game_value(&transform.game, behavior)?;
    let reduced = behavior.reduce(ineq.scenario());
    let direct = ineq.evaluate_point(&reduced);
    Ok(direct == &transform.scale * &g + &transform.shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    fn u4() -> InequalityFunctional {
        InequalityFunctional::parse_ineq(
            "scenario n=4 m=2,2,2,2 k=2 mode=unanimous\n\
             term x=(0,0,0,0) sigma=ALL coeff=1\n\
             term x=(1,1,0,0) sigma=ALL coeff=-1\n\
             term x=(1,1,0,1) sigma=ALL coeff=1\n\
             term x=(1,1,1,0) sigma=ALL coeff=1\n\
             term x=(1,1,1,1) sigma=ALL coeff=-1\n\
             bound 1\n",
        )
        .unwrap()
    }

    #[test]
    fn u4_transform_values() {
        let t = unanimous_to_game(&u4()).unwrap();
        assert_eq!(t.scale, rat(5));
        assert_eq!(t.shift, rat(-2));
        assert_eq!(t.game.local_value, ratio(3, 5));
        for (_, mu) in &t.game.prior {
            assert_eq!(*mu, ratio(1, 5));
        }
        let total: Rat = t.game.prior.values().cloned().sum();
        assert_eq!(total, rat(1));
        assert_eq!(t.game.equal_set.len(), 3);
        assert_eq!(t.game.different_set.len(), 2);
    }

    #[test]
    fn all_positive_coefficients_mean_zero_shift() {
        let i = InequalityFunctional::parse_ineq(
            "scenario n=2 m=2,2 k=2 mode=unanimous\n\
             term x=(0,0) sigma=ALL coeff=2\n\
             term x=(1,1) sigma=ALL coeff=1\n\
             bound 3\n",
        )
        .unwrap();
        let t = unanimous_to_game(&i).unwrap();
        assert_eq!(t.shift, rat(0));
        assert_eq!(t.game.different_set.len(), 0);
        assert_eq!(t.game.local_value, rat(1));
    }

    #[test]
    fn non_unanimous_rejected() {
        let i = InequalityFunctional::parse_ineq(
            "scenario n=3 m=2,2,2 k=2 mode=smells\n\
             term x=(0,0,0) sigma=01|2 coeff=1\n\
             bound 1\n",
        )
        .unwrap();
        assert!(matches!(unanimous_to_game(&i), Err(GameError::NotUnanimous(_))));
    }

    #[test]
    fn family_shape_and_bounds() {
        let f3 = family_f_n2(3);
        assert_eq!(f3.term_count(), 8);
        assert_eq!(*f3.bound(), rat(1));
        let f4 = family_f_n2(4);
        assert_eq!(*f4.bound(), rat(2));
        let t = unanimous_to_game(&f3).unwrap();
        // uniform prior over all input tuples
        for mu in t.game.prior.values() {
            assert_eq!(*mu, ratio(1, 8));
        }
    }

    #[test]
    fn family_classical_values() {
        // omega_c(3) = 1/2 + 1/8 = 5/8; omega_c(4) = 1/2 + 2/16 = 5/8
        let t3 = unanimous_to_game(&family_f_n2(3)).unwrap();
        let v3 = classical_game_value(&t3.game, 3, &EnumOptions::default()).unwrap();
        assert_eq!(v3, ratio(5, 8));
        let v3b = classical_game_value(&t3.game, 4, &EnumOptions::default()).unwrap();
        assert_eq!(v3b, ratio(5, 8), "invariant for k = 3 vs 4");
        let t4 = unanimous_to_game(&family_f_n2(4)).unwrap();
        let v4 = classical_game_value(&t4.game, 3, &EnumOptions::default()).unwrap();
        assert_eq!(v4, ratio(5, 8));
    }

    #[test]
    fn family_local_bound_by_brute_force() {
        for n in [2usize, 3, 4] {
            let f = family_f_n2(n);
            let (l, _) =
                crate::bounds::local_bound(&f, 3, &EnumOptions::default()).unwrap();
            assert_eq!(l, rat(1 + ((n as i64 + 1) % 2)), "family bound at n = {n}");
        }
    }

    #[test]
    fn ns_perfect_strategy_scores_one() {
        let t = unanimous_to_game(&u4()).unwrap();
        let b = crate::bounds::ns_perfect_strategy(&t.game.scenario, &t.game.equal_set);
        assert_eq!(game_value(&t.game, &b).unwrap(), rat(1));
    }

    #[test]
    fn transform_round_trip_on_vertices() {
        let i = u4();
        let t = unanimous_to_game(&i).unwrap();
        // deterministic behaviors: every 2-outcome strategy
        let sc = i.scenario();
        for code in 0..256usize {
            let outcome_count = 1usize << 4;
            let mut probs = vec![Rat::zero(); sc.tuple_count() * outcome_count];
            for ti in 0..sc.tuple_count() {
                let x = sc.tuple(ti);
                let mut a_idx = 0usize;
                for (party, &xi) in x.iter().enumerate() {
                    let bit = code >> (2 * party + xi) & 1;
                    a_idx = a_idx * 2 + bit;
                }
                probs[ti * outcome_count + a_idx] = rat(1);
            }
            let b = FullBehavior {
                parties: 4,
                inputs: vec![2; 4],
                outcomes: 2,
                probs,
            };
            assert!(transform_identity_check(&t, &i, &b).unwrap());
        }
    }
}
