//! Inequality functionals over reduced behaviors, and the `.ineq` file format.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::partitions::{parse_partition_sized, SetPartition};
use crate::strategies::{Scenario, VertexBits};
use crate::{Int, Rat};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum IneqError {
    #[error("coefficient on the all-singletons partition is not representable")]
    TrivialSigma,
    #[error("coefficient key out of range: {0}")]
    BadKey(String),
    #[error("duplicate coefficient for {0}")]
    DuplicateKey(String),
    #[error("cannot parse .ineq line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("functional belongs to scenario {expected}, got data for {got}")]
    ScenarioMismatch { expected: String, got: String },
}

/// A linear functional on reduced behaviors together with a claimed bound:
/// `sum coeffs[(x, sigma)] * p(sigma | x) <= bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityFunctional {
    scenario: Scenario,
    /// Sparse nonzero coefficients keyed by reduced coordinate index.
    coeffs: BTreeMap<usize, Rat>,
    bound: Rat,
    name: Option<String>,
}

impl InequalityFunctional {
    pub fn new(
        scenario: Scenario,
        terms: Vec<(Vec<usize>, SetPartition, Rat)>,
        bound: Rat,
    ) -> Result<Self, IneqError> {
        let sigma_list = scenario.sigma_list();
        let mut coeffs = BTreeMap::new();
        for (x, sigma, coeff) in terms {
            if x.len() != scenario.parties()
                || x.iter().zip(scenario.inputs()).any(|(&xi, &m)| xi >= m)
            {
                return Err(IneqError::BadKey(format!("x={x:?}")));
            }
            if sigma.is_all_singletons() {
                return Err(IneqError::TrivialSigma);
            }
            let si = sigma_list
                .iter()
                .position(|s| *s == sigma)
                .ok_or_else(|| IneqError::BadKey(format!("sigma={sigma} invalid for scenario")))?;
            let idx = scenario.coord_index(scenario.tuple_index(&x), si);
            if coeffs.contains_key(&idx) {
                return Err(IneqError::DuplicateKey(format!("x={x:?} sigma={sigma}")));
            }
            if !coeff.is_zero() {
                coeffs.insert(idx, coeff);
            }
        }
        Ok(InequalityFunctional { scenario, coeffs, bound, name: None })
    }

    /// Builds from a dense coefficient vector over reduced coordinates.
    pub fn from_dense(scenario: Scenario, dense: &[Rat], bound: Rat) -> Self {
        debug_assert_eq!(dense.len(), scenario.coord_count());
        let coeffs = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        InequalityFunctional { scenario, coeffs, bound, name: None }
    }

    /// Builds from an integer facet normal in reduced coordinates.
    pub fn from_facet(scenario: Scenario, normal: &[Int], offset: &Int) -> Self {
        let coeffs = normal
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, Rat::from_integer(v.clone())))
            .collect();
        InequalityFunctional {
            scenario,
            coeffs,
            bound: Rat::from_integer(offset.clone()),
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn bound(&self) -> &Rat {
        &self.bound
    }

    pub fn with_bound(mut self, bound: Rat) -> Self {
        self.bound = bound;
        self
    }

    /// Nonzero coefficients by reduced coordinate index, ascending.
    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.coeffs.iter().map(|(&i, v)| (i, v))
    }

    pub fn coeff(&self, idx: usize) -> Rat {
        self.coeffs.get(&idx).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn dense(&self) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.scenario.coord_count()];
        for (&i, v) in &self.coeffs {
            out[i] = v.clone();
        }
        out
    }

    /// Value on a 0/1 vertex.
    pub fn evaluate_vertex(&self, v: &VertexBits) -> Rat {
        self.coeffs
            .iter()
            .filter(|(&i, _)| v.get(i))
            .map(|(_, c)| c.clone())
            .sum()
    }

    /// Value on an exact rational reduced behavior.
    pub fn evaluate_point(&self, p: &[Rat]) -> Rat {
        self.coeffs.iter().map(|(&i, c)| c * &p[i]).sum()
    }

    /// Value on a floating-point reduced behavior.
    pub fn evaluate_f64(&self, p: &[f64]) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .map(|(&i, c)| c.to_f64().expect("catalog coefficients are small") * p[i])
            .sum()
    }

    /// The terms as (input tuple, partition, coefficient).
    pub fn terms(&self) -> Vec<(Vec<usize>, SetPartition, Rat)> {
        let sigma_list = self.scenario.sigma_list();
        let sc = self.scenario.sigma_count();
        self.coeffs
            .iter()
            .map(|(&i, c)| {
                let (ti, si) = (i / sc, i % sc);
                (self.scenario.tuple(ti), sigma_list[si].clone(), c.clone())
            })
            .collect()
    }

    /// Serializes to the `.ineq` format.
    pub fn to_ineq(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!("# {name}\n"));
        }
        out.push_str(&format!("scenario {}\n", self.scenario));
        for (x, sigma, coeff) in self.terms() {
            let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!(
                "term x=({}) sigma={} coeff={}\n",
                xs.join(","),
                sigma,
                coeff
            ));
        }
        out.push_str(&format!("bound {}\n", self.bound));
        out
    }

    /// Parses the `.ineq` format. Unknown keys and duplicate terms are
    /// rejected.
    pub fn parse_ineq(text: &str) -> Result<Self, IneqError> {
        let err = |line: usize, reason: &str| IneqError::Parse {
            line,
            reason: reason.to_string(),
        };
        let mut scenario: Option<Scenario> = None;
        let mut terms: Vec<(Vec<usize>, SetPartition, Rat)> = Vec::new();
        let mut bound: Option<Rat> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match keyword {
                "scenario" => {
                    if scenario.is_some() {
                        return Err(err(line_no, "duplicate scenario line"));
                    }
                    scenario = Some(
                        rest.parse()
                            .map_err(|e| err(line_no, &format!("bad scenario: {e}")))?,
                    );
                }
                "term" => {
                    let sc = scenario
                        .as_ref()
                        .ok_or_else(|| err(line_no, "term before scenario"))?;
                    let mut x: Option<Vec<usize>> = None;
                    let mut sigma: Option<SetPartition> = None;
                    let mut coeff: Option<Rat> = None;
                    for field in rest.split_whitespace() {
                        let (key, value) = field
                            .split_once('=')
                            .ok_or_else(|| err(line_no, "expected key=value"))?;
                        match key {
                            "x" => {
                                let inner = value
                                    .strip_prefix('(')
                                    .and_then(|v| v.strip_suffix(')'))
                                    .ok_or_else(|| err(line_no, "x must be (i,..,i)"))?;
                                let parsed: Result<Vec<usize>, _> =
                                    inner.split(',').map(|p| p.trim().parse()).collect();
                                x = Some(parsed.map_err(|_| err(line_no, "bad x tuple"))?);
                            }
                            "sigma" => {
                                sigma = Some(
                                    parse_partition_sized(value, sc.parties())
                                        .map_err(|e| err(line_no, &format!("bad sigma: {e}")))?,
                                );
                            }
                            "coeff" => {
                                coeff = Some(
                                    parse_rat(value)
                                        .ok_or_else(|| err(line_no, "bad coefficient"))?,
                                );
                            }
                            other => return Err(err(line_no, &format!("unknown key {other:?}"))),
                        }
                    }
                    terms.push((
                        x.ok_or_else(|| err(line_no, "term missing x"))?,
                        sigma.ok_or_else(|| err(line_no, "term missing sigma"))?,
                        coeff.ok_or_else(|| err(line_no, "term missing coeff"))?,
                    ));
                }
                "bound" => {
                    if bound.is_some() {
                        return Err(err(line_no, "duplicate bound line"));
                    }
                    bound =
                        Some(parse_rat(rest.trim()).ok_or_else(|| err(line_no, "bad bound"))?);
                }
                other => return Err(err(line_no, &format!("unknown keyword {other:?}"))),
            }
        }
        let scenario = scenario.ok_or_else(|| err(0, "missing scenario line"))?;
        let bound = bound.ok_or_else(|| err(0, "missing bound line"))?;
        InequalityFunctional::new(scenario, terms, bound)
    }

    /// The one-line facet dump form: `coeff@(x;sigma) ... <= bound`.
    pub fn dump_line(&self) -> String {
        let terms: Vec<String> = self
            .terms()
            .iter()
            .map(|(x, sigma, c)| {
                let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                format!("{}@({};{})", c, xs.join(","), sigma)
            })
            .collect();
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" ") };
        format!("{} <= {}", lhs, self.bound)
    }
}

/// Parses `<int>` or `<int>/<int>`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    if let Some((n, d)) = s.split_once('/') {
        let n: Int = n.trim().parse().ok()?;
        let d: Int = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: Int = s.trim().parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

impl fmt::Display for InequalityFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump_line())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn ineq_round_trip() {
        let i = chsh();
        let text = i.to_ineq();
        let back = InequalityFunctional::parse_ineq(&text).unwrap();
        assert_eq!(back.dense(), i.dense());
        assert_eq!(back.bound(), i.bound());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(InequalityFunctional::parse_ineq("bound 2\n").is_err());
        assert!(InequalityFunctional::parse_ineq(
            "scenario n=2 m=2,2 k=2 mode=smells\nnote hello\nbound 1\n"
        )
        .is_err());
        assert!(InequalityFunctional::parse_ineq(
            "scenario n=2 m=2,2 k=2 mode=smells\nterm x=(0,0) sigma=ALL coeff=1 extra=2\nbound 1\n"
        )
        .is_err());
        // duplicate (x, sigma)
        assert!(InequalityFunctional::parse_ineq(
            "scenario n=2 m=2,2 k=2 mode=smells\nterm x=(0,0) sigma=ALL coeff=1\nterm x=(0,0) sigma=ALL coeff=2\nbound 1\n"
        )
        .is_err());
        // all-singletons sigma rejected
        assert!(InequalityFunctional::parse_ineq(
            "scenario n=2 m=2,2 k=2 mode=smells\nterm x=(0,0) sigma=0|1 coeff=1\nbound 1\n"
        )
        .is_err());
    }

    #[test]
    fn rational_coefficients() {
        let text = "scenario n=2 m=2,2 k=2 mode=smells\nterm x=(0,0) sigma=ALL coeff=1/3\nbound 5/7\n";
        let i = InequalityFunctional::parse_ineq(text).unwrap();
        assert_eq!(i.coeff(0), ratio(1, 3));
        assert_eq!(*i.bound(), ratio(5, 7));
        let back = InequalityFunctional::parse_ineq(&i.to_ineq()).unwrap();
        assert_eq!(back, i);
    }

    #[test]
    fn dump_line_form() {
        let line = chsh().dump_line();
        assert_eq!(
            line,
            "1@(0,0;ALL) 1@(0,1;ALL) 1@(1,0;ALL) -1@(1,1;ALL) <= 2"
        );
    }
}
