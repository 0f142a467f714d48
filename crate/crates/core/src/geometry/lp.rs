//! Exact rational linear programming: two-phase primal simplex with Bland's
//! rule, which terminates without cycling in exact arithmetic.

use num_traits::{One, Signed, Zero};

use super::hull::HRepresentation;
use super::GeometryError;
use crate::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Eq,
    GreaterEq,
}

/// `maximize c · x` subject to rows `a · x (<=|=|>=) b` over `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct SimplexProblem {
    pub objective: Vec<Rat>,
    pub rows: Vec<(Vec<Rat>, Relation, Rat)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: Rat,
    pub point: Vec<Rat>,
}

struct Tableau {
    /// rows[r][c], with an extra rhs column at index `cols`.
    rows: Vec<Vec<Rat>>,
    cols: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x /= &inv;
        }
        let src = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = other[col].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, s) in other.iter_mut().zip(&src) {
                *x -= &factor * s;
            }
        }
        self.basis[row] = col;
    }

    /// One simplex phase maximizing `obj` (length cols) with Bland's rule.
    /// Returns false if unbounded.
    fn run(&mut self, obj: &[Rat]) -> bool {
        loop {
            // reduced costs: obj_c - obj_B * column_c
            let price: Vec<Rat> = self.basis.iter().map(|&b| obj[b].clone()).collect();
            let mut entering: Option<usize> = None;
            for c in 0..self.cols {
                if self.basis.contains(&c) {
                    continue;
                }
                let mut reduced = obj[c].clone();
                for (r, p) in price.iter().enumerate() {
                    if !p.is_zero() {
                        reduced -= p * &self.rows[r][c];
                    }
                }
                if reduced.is_positive() {
                    entering = Some(c);
                    break; // Bland: smallest index
                }
            }
            let Some(col) = entering else {
                return true;
            };
            // ratio test, ties broken by smallest basis index (Bland)
            let mut leaving: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                let coeff = &self.rows[r][col];
                if coeff.is_positive() {
                    let ratio = &self.rows[r][self.cols] / coeff;
                    match &leaving {
                        None => leaving = Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < *lratio
                                || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                            {
                                leaving = Some((r, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

impl SimplexProblem {
    pub fn new(objective: Vec<Rat>) -> Self {
        SimplexProblem { objective, rows: Vec::new() }
    }

    pub fn push_row(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push((coeffs, rel, rhs));
    }

    /// Solves the program exactly.
    pub fn maximize(&self) -> Result<LpSolution, GeometryError> {
        let n = self.objective.len();
        // normalize rows to b >= 0
        let mut rows: Vec<(Vec<Rat>, Relation, Rat)> = Vec::with_capacity(self.rows.len());
        for (a, rel, b) in &self.rows {
            if b.is_negative() {
                let flipped = match rel {
                    Relation::LessEq => Relation::GreaterEq,
                    Relation::GreaterEq => Relation::LessEq,
                    Relation::Eq => Relation::Eq,
                };
                rows.push((a.iter().map(|x| -x.clone()).collect(), flipped, -b.clone()));
            } else {
                rows.push((a.clone(), *rel, b.clone()));
            }
        }

        let m = rows.len();
        let n_slack = rows
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Eq)
            .count();
        // columns: structural | slack/surplus | artificial
        let mut need_artificial: Vec<bool> = Vec::with_capacity(m);
        for (_, rel, _) in &rows {
            // a <= row with b >= 0 gets a slack basis column; others need an
            // artificial variable
            need_artificial.push(*rel != Relation::LessEq);
        }
        let n_art = need_artificial.iter().filter(|&&b| b).count();
        let cols = n + n_slack + n_art;

        let mut tab_rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
        let mut basis: Vec<usize> = Vec::with_capacity(m);
        let mut slack_at = n;
        let mut art_at = n + n_slack;
        for (r, (a, rel, b)) in rows.iter().enumerate() {
            let mut row = vec![Rat::zero(); cols + 1];
            row[..n].clone_from_slice(a);
            row[cols] = b.clone();
            match rel {
                Relation::LessEq => {
                    row[slack_at] = Rat::one();
                    basis.push(slack_at);
                    slack_at += 1;
                }
                Relation::GreaterEq => {
                    row[slack_at] = -Rat::one();
                    slack_at += 1;
                    row[art_at] = Rat::one();
                    basis.push(art_at);
                    art_at += 1;
                }
                Relation::Eq => {
                    row[art_at] = Rat::one();
                    basis.push(art_at);
                    art_at += 1;
                }
            }
            let _ = r;
            tab_rows.push(row);
        }

        let mut tableau = Tableau { rows: tab_rows, cols, basis };

        if n_art > 0 {
            // phase 1: maximize -(sum of artificials)
            let mut obj1 = vec![Rat::zero(); cols];
            for c in (n + n_slack)..cols {
                obj1[c] = -Rat::one();
            }
            let ok = tableau.run(&obj1);
            debug_assert!(ok, "phase 1 is bounded by construction");
            let infeasibility: Rat = tableau
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= n + n_slack)
                .map(|(r, _)| tableau.rows[r][cols].clone())
                .sum();
            if !infeasibility.is_zero() {
                return Err(GeometryError::Infeasible);
            }
            // drive remaining artificials out of the basis where possible
            for r in 0..tableau.rows.len() {
                if tableau.basis[r] >= n + n_slack {
                    if let Some(c) =
                        (0..n + n_slack).find(|&c| !tableau.rows[r][c].is_zero())
                    {
                        tableau.pivot(r, c);
                    }
                }
            }
            // a basic artificial that cannot be driven out marks a redundant
            // row: every structural and slack coefficient there is zero, so
            // drop the row and truncate the artificial columns
            let keep: Vec<bool> = tableau.basis.iter().map(|&b| b < n + n_slack).collect();
            let new_cols = n + n_slack;
            let mut new_rows = Vec::with_capacity(tableau.rows.len());
            let mut new_basis = Vec::with_capacity(tableau.rows.len());
            for (r, row) in tableau.rows.into_iter().enumerate() {
                if keep[r] {
                    let mut nr = row[..new_cols].to_vec();
                    nr.push(row[cols].clone());
                    new_rows.push(nr);
                    new_basis.push(tableau.basis[r]);
                } else {
                    debug_assert!(row[..new_cols].iter().all(|x| x.is_zero()));
                    debug_assert!(row[cols].is_zero());
                }
            }
            tableau = Tableau { rows: new_rows, cols: new_cols, basis: new_basis };
        }

        let mut obj2 = vec![Rat::zero(); tableau.cols];
        obj2[..n].clone_from_slice(&self.objective);
        if !tableau.run(&obj2) {
            return Err(GeometryError::Unbounded);
        }

        let mut point = vec![Rat::zero(); n];
        for (r, &b) in tableau.basis.iter().enumerate() {
            if b < n {
                point[b] = tableau.rows[r][tableau.cols].clone();
            }
        }
        let value = self
            .objective
            .iter()
            .zip(&point)
            .map(|(c, x)| c * x)
            .sum();
        Ok(LpSolution { value, point })
    }
}

/// Exact maximum of `objective · x` over the polyhedron described by `h`,
/// with free variables (internally split into positive and negative parts).
pub fn lp_maximize(objective: &[Rat], h: &HRepresentation) -> Result<LpSolution, GeometryError> {
    let d = h.ambient_dim;
    assert_eq!(objective.len(), d);
    // x = u - v with u, v >= 0
    let mut obj = Vec::with_capacity(2 * d);
    obj.extend(objective.iter().cloned());
    obj.extend(objective.iter().map(|c| -c.clone()));
    let mut problem = SimplexProblem::new(obj);
    let mut push = |a: &[crate::Int], rel: Relation, b: &crate::Int| {
        let mut row: Vec<Rat> = Vec::with_capacity(2 * d);
        row.extend(a.iter().map(|x| Rat::from_integer(x.clone())));
        row.extend(a.iter().map(|x| Rat::from_integer(-x.clone())));
        problem.push_row(row, rel, Rat::from_integer(b.clone()));
    };
    for (a, c) in &h.facets {
        push(a, Relation::LessEq, c);
    }
    for (e, f) in &h.equations {
        push(e, Relation::Eq, f);
    }
    let sol = problem.maximize()?;
    let point: Vec<Rat> = (0..d).map(|i| &sol.point[i] - &sol.point[i + d]).collect();
    Ok(LpSolution { value: sol.value, point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio, Int};

    #[test]
    fn unit_interval() {
        // maximize x over 0 <= x <= 1
        let h = HRepresentation {
            ambient_dim: 1,
            facets: vec![
                (vec![Int::from(1)], Int::from(1)),
                (vec![Int::from(-1)], Int::from(0)),
            ],
            equations: vec![],
        };
        let sol = lp_maximize(&[rat(1)], &h).unwrap();
        assert_eq!(sol.value, rat(1));
        assert_eq!(sol.point, vec![rat(1)]);
    }

    #[test]
    fn simplex_with_equality() {
        // maximize x + 2y subject to x + y = 1, x, y >= 0
        let mut p = SimplexProblem::new(vec![rat(1), rat(2)]);
        p.push_row(vec![rat(1), rat(1)], Relation::Eq, rat(1));
        let sol = p.maximize().unwrap();
        assert_eq!(sol.value, rat(2));
        assert_eq!(sol.point, vec![rat(0), rat(1)]);
    }

    #[test]
    fn infeasible_detected() {
        let mut p = SimplexProblem::new(vec![rat(1)]);
        p.push_row(vec![rat(1)], Relation::LessEq, rat(-1));
        assert!(matches!(p.maximize(), Err(GeometryError::Infeasible)));
    }

    #[test]
    fn unbounded_detected() {
        let p = SimplexProblem::new(vec![rat(1)]);
        assert!(matches!(p.maximize(), Err(GeometryError::Unbounded)));
    }

    #[test]
    fn fractional_optimum() {
        // maximize x + y subject to 2x + y <= 1, x + 2y <= 1
        let mut p = SimplexProblem::new(vec![rat(1), rat(1)]);
        p.push_row(vec![rat(2), rat(1)], Relation::LessEq, rat(1));
        p.push_row(vec![rat(1), rat(2)], Relation::LessEq, rat(1));
        let sol = p.maximize().unwrap();
        assert_eq!(sol.value, ratio(2, 3));
        assert_eq!(sol.point, vec![ratio(1, 3), ratio(1, 3)]);
    }

    #[test]
    fn free_variable_negative_optimum() {
        // maximize -x over x >= -3 (i.e. -x <= 3): optimum x = -3
        let h = HRepresentation {
            ambient_dim: 1,
            facets: vec![(vec![Int::from(-1)], Int::from(3))],
            equations: vec![],
        };
        let sol = lp_maximize(&[rat(-1)], &h).unwrap();
        assert_eq!(sol.value, rat(3));
        assert_eq!(sol.point, vec![rat(-3)]);
    }

    #[test]
    fn greater_eq_rows() {
        // maximize -x subject to x >= 2
        let mut p = SimplexProblem::new(vec![rat(-1)]);
        p.push_row(vec![rat(1)], Relation::GreaterEq, rat(2));
        let sol = p.maximize().unwrap();
        assert_eq!(sol.value, rat(-2));
    }
}
