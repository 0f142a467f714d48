//! Scenarios, deterministic strategies, and local vertex generation.
//!
//! A deterministic strategy assigns one outcome to every (party, input) node.
//! Only cross-party equalities of those outcomes are observable, so the
//! reduced behavior of a strategy depends only on its strategy graph: the
//! partition of the nodes into groups forced to share an outcome. Brute-force
//! enumeration therefore walks canonical strategies — outcome tables in
//! restricted-growth form, one representative per global outcome relabeling —
//! which cuts k^(Σm) assignments down to a sum of Stirling numbers without
//! skipping any reduced behavior.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::caps::{CapExceeded, ResourceCaps};
use crate::partitions::{
    bell_number, nontrivial_partitions, pattern_of_outcomes, stirling2, SetPartition,
};
use crate::{Count, Rat};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("strategy shape does not match scenario: {0}")]
    ShapeMismatch(String),
    #[error("{0}")]
    Cap(#[from] CapExceeded),
    #[error("cannot parse scenario {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("operation requires homogeneous inputs, scenario has m = {0:?}")]
    InhomogeneousInputs(Vec<usize>),
    #[error("closed-form vertex count in smells mode is only available for bipartite scenarios")]
    FormulaUnsupported,
}

/// Which events are observable per round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The full equality pattern (a set partition of the parties).
    Smells,
    /// Only the all-parties-equal event.
    Unanimous,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Smells => write!(f, "smells"),
            Mode::Unanimous => write!(f, "unanimous"),
        }
    }
}

/// An (n, m, k) scenario with per-party input counts and an observation mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    parties: usize,
    inputs: Vec<usize>,
    outcomes: usize,
    mode: Mode,
}

impl Scenario {
    pub fn new(inputs: Vec<usize>, outcomes: usize, mode: Mode) -> Result<Self, StrategyError> {
        let parties = inputs.len();
        if parties < 2 {
            return Err(StrategyError::InvalidScenario(format!(
                "need at least 2 parties, got {parties}"
            )));
        }
        if parties > 8 {
            return Err(StrategyError::InvalidScenario(format!(
                "at most 8 parties supported, got {parties}"
            )));
        }
        if inputs.iter().any(|&m| m == 0) {
            return Err(StrategyError::InvalidScenario(
                "every party needs at least one input".into(),
            ));
        }
        if outcomes == 0 {
            return Err(StrategyError::InvalidScenario("need at least one outcome".into()));
        }
        Ok(Scenario { parties, inputs, outcomes, mode })
    }

    /// Homogeneous-input shorthand.
    pub fn homogeneous(parties: usize, inputs: usize, outcomes: usize, mode: Mode) -> Result<Self, StrategyError> {
        Scenario::new(vec![inputs; parties], outcomes, mode)
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Same parties/inputs/mode with a different outcome count.
    pub fn with_outcomes(&self, k: usize) -> Scenario {
        Scenario { outcomes: k, ..self.clone() }
    }

    pub fn with_mode(&self, mode: Mode) -> Scenario {
        Scenario { mode, ..self.clone() }
    }

    /// Homogeneous input count, if all parties agree.
    pub fn homogeneous_inputs(&self) -> Option<usize> {
        let m = self.inputs[0];
        self.inputs.iter().all(|&v| v == m).then_some(m)
    }

    /// Number of input tuples, Π m_i.
    pub fn tuple_count(&self) -> usize {
        self.inputs.iter().product()
    }

    /// The partitions indexing reduced coordinates, in RGS-lex order.
    pub fn sigma_list(&self) -> Vec<SetPartition> {
        match self.mode {
            Mode::Smells => nontrivial_partitions(self.parties),
            Mode::Unanimous => vec![SetPartition::all_in_one(self.parties)],
        }
    }

    pub fn sigma_count(&self) -> usize {
        match self.mode {
            Mode::Smells => {
                let b: Count = bell_number(self.parties) - BigUint::one();
                usize::try_from(b).expect("party counts are tiny")
            }
            Mode::Unanimous => 1,
        }
    }

    /// Dimension of the reduced coordinate space.
    pub fn coord_count(&self) -> usize {
        self.tuple_count() * self.sigma_count()
    }

    /// The input tuple with mixed-radix index `idx` (party 0 most significant).
    pub fn tuple(&self, idx: usize) -> Vec<usize> {
        let mut rem = idx;
        let mut x = vec![0usize; self.parties];
        for i in (0..self.parties).rev() {
            x[i] = rem % self.inputs[i];
            rem /= self.inputs[i];
        }
        x
    }

    pub fn tuple_index(&self, x: &[usize]) -> usize {
        debug_assert_eq!(x.len(), self.parties);
        let mut idx = 0usize;
        for (i, &xi) in x.iter().enumerate() {
            debug_assert!(xi < self.inputs[i]);
            idx = idx * self.inputs[i] + xi;
        }
        idx
    }

    /// All input tuples in index order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        (0..self.tuple_count()).map(|i| self.tuple(i)).collect()
    }

    pub fn coord_index(&self, tuple_idx: usize, sigma_idx: usize) -> usize {
        tuple_idx * self.sigma_count() + sigma_idx
    }

    /// Human-readable name of a coordinate, used in CSV headers.
    pub fn coord_name(&self, coord: usize) -> String {
        let sc = self.sigma_count();
        let (ti, si) = (coord / sc, coord % sc);
        let x = self.tuple(ti);
        let sigma = &self.sigma_list()[si];
        let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        format!("x=({});sigma={}", xs.join(","), sigma)
    }

    /// Whether two scenarios describe the same parties/inputs/mode (outcome
    /// counts may differ; reduced coordinates are then directly comparable).
    pub fn same_shape(&self, other: &Scenario) -> bool {
        self.parties == other.parties && self.inputs == other.inputs && self.mode == other.mode
    }

    /// Total node count Σ m_i of the strategy graphs.
    pub fn node_count(&self) -> usize {
        self.inputs.iter().sum()
    }

    /// Node index of (party, input) in the party-major flattening.
    pub fn node_index(&self, party: usize, input: usize) -> usize {
        self.inputs[..party].iter().sum::<usize>() + input
    }
}

impl fmt::Display for Scenario {
    /// Example: `n=3 m=2,2,2 k=3 mode=smells`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<String> = self.inputs.iter().map(|m| m.to_string()).collect();
        write!(
            f,
            "n={} m={} k={} mode={}",
            self.parties,
            ms.join(","),
            self.outcomes,
            self.mode
        )
    }
}

impl FromStr for Scenario {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| StrategyError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let mut n: Option<usize> = None;
        let mut m: Option<Vec<usize>> = None;
        let mut k: Option<usize> = None;
        let mut mode: Option<Mode> = None;
        for field in s.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err("expected key=value fields"))?;
            match key {
                "n" => n = Some(value.parse().map_err(|_| err("bad n"))?),
                "m" => {
                    let parts: Result<Vec<usize>, _> =
                        value.split(',').map(|p| p.parse::<usize>()).collect();
                    m = Some(parts.map_err(|_| err("bad m list"))?);
                }
                "k" => k = Some(value.parse().map_err(|_| err("bad k"))?),
                "mode" => {
                    mode = Some(match value {
                        "smells" => Mode::Smells,
                        "unanimous" => Mode::Unanimous,
                        _ => return Err(err("mode must be smells or unanimous")),
                    })
                }
                other => return Err(err(&format!("unknown key {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| err("missing n"))?;
        let mut m = m.ok_or_else(|| err("missing m"))?;
        let k = k.ok_or_else(|| err("missing k"))?;
        let mode = mode.unwrap_or(Mode::Smells);
        if m.len() == 1 && n > 1 {
            m = vec![m[0]; n];
        }
        if m.len() != n {
            return Err(err("m list length does not match n"));
        }
        Scenario::new(m, k, mode)
    }
}

/// Per-party input→outcome table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub outputs: Vec<Vec<u8>>,
}

impl DeterministicStrategy {
    pub fn validate(&self, sc: &Scenario) -> Result<(), StrategyError> {
        if self.outputs.len() != sc.parties() {
            return Err(StrategyError::ShapeMismatch(format!(
                "strategy has {} parties, scenario {}",
                self.outputs.len(),
                sc.parties()
            )));
        }
        for (i, row) in self.outputs.iter().enumerate() {
            if row.len() != sc.inputs()[i] {
                return Err(StrategyError::ShapeMismatch(format!(
                    "party {i} has {} inputs, scenario expects {}",
                    row.len(),
                    sc.inputs()[i]
                )));
            }
            if row.iter().any(|&o| usize::from(o) >= sc.outcomes()) {
                return Err(StrategyError::ShapeMismatch(format!(
                    "party {i} uses an outcome label >= k = {}",
                    sc.outcomes()
                )));
            }
        }
        Ok(())
    }

    pub fn outcome(&self, party: usize, input: usize) -> u8 {
        self.outputs[party][input]
    }
}

/// Partition of the (party, input) nodes into groups forced to share an
/// outcome: cross-party connected components of the equality graph, with every
/// remaining node a singleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyGraph {
    /// Input count per party; nodes are flattened party-major.
    pub inputs: Vec<usize>,
    /// Node partition (closed under transitivity by construction).
    pub partition: SetPartition,
}

impl StrategyGraph {
    /// The strategy graph of a deterministic strategy.
    pub fn of_strategy(s: &DeterministicStrategy, sc: &Scenario) -> Result<Self, StrategyError> {
        s.validate(sc)?;
        let n_nodes = sc.node_count();
        let mut parent: Vec<usize> = (0..n_nodes).collect();
        fn find(parent: &mut Vec<usize>, mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for i in 0..sc.parties() {
            for j in (i + 1)..sc.parties() {
                for xi in 0..sc.inputs()[i] {
                    for xj in 0..sc.inputs()[j] {
                        if s.outcome(i, xi) == s.outcome(j, xj) {
                            let a = find(&mut parent, sc.node_index(i, xi));
                            let b = find(&mut parent, sc.node_index(j, xj));
                            if a != b {
                                parent[a] = b;
                            }
                        }
                    }
                }
            }
        }
        let labels: Vec<u8> = (0..n_nodes)
            .map(|v| find(&mut parent, v) as u8)
            .collect();
        let partition = pattern_of_outcomes(&labels);
        Ok(StrategyGraph { inputs: sc.inputs().to_vec(), partition })
    }

    fn party_of_node(&self, node: usize) -> usize {
        let mut acc = 0usize;
        for (i, &m) in self.inputs.iter().enumerate() {
            acc += m;
            if node < acc {
                return i;
            }
        }
        unreachable!("node out of range")
    }
}

/// Minimum outcome count needed to realize a strategy graph: one outcome per
/// cross-party component, plus one shared outcome per party that has nodes
/// unconnected to every other party.
pub fn min_outcomes(g: &StrategyGraph) -> usize {
    let mut cross = 0usize;
    let mut has_isolated = vec![false; g.inputs.len()];
    for block in g.partition.blocks() {
        let first_party = g.party_of_node(block[0]);
        if block.iter().any(|&v| g.party_of_node(v) != first_party) {
            cross += 1;
        } else {
            has_isolated[first_party] = true;
        }
    }
    cross + has_isolated.iter().filter(|&&b| b).count()
}

/// Saturating outcome count for homogeneous smells scenarios:
/// `floor(n(m+1)/2)`.
pub fn k_star(parties: usize, inputs: usize) -> usize {
    assert!(parties >= 2 && inputs >= 1);
    parties * (inputs + 1) / 2
}

/// Saturating outcome count for unanimous scenarios: `min(m_i) + 1`.
pub fn k_star_unanimous(inputs: &[usize]) -> usize {
    assert!(!inputs.is_empty() && inputs.iter().all(|&m| m >= 1));
    inputs.iter().min().expect("non-empty") + 1
}

/// A 0/1 reduced behavior, bit-packed. Coordinate `c` lives in word `c / 64`
/// at bit `63 - c % 64`, so comparing the word vectors lexicographically is
/// the same as comparing coordinate sequences lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexBits {
    words: Vec<u64>,
}

impl VertexBits {
    pub fn zero(coords: usize) -> Self {
        VertexBits { words: vec![0; coords.div_ceil(64)] }
    }

    #[inline]
    pub fn set(&mut self, coord: usize) {
        self.words[coord / 64] |= 1u64 << (63 - (coord % 64));
    }

    #[inline]
    pub fn get(&self, coord: usize) -> bool {
        self.words[coord / 64] >> (63 - (coord % 64)) & 1 == 1
    }

    pub fn to_rational_point(&self, coords: usize) -> Vec<Rat> {
        (0..coords)
            .map(|c| if self.get(c) { Rat::one() } else { Rat::zero() })
            .collect()
    }
}

/// A deduplicated, lexicographically sorted set of 0/1 reduced behaviors.
#[derive(Clone, Debug)]
pub struct VertexSet {
    scenario: Scenario,
    vertices: Vec<VertexBits>,
}

impl VertexSet {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VertexBits> {
        self.vertices.iter()
    }

    pub fn get(&self, i: usize) -> &VertexBits {
        &self.vertices[i]
    }

    /// Vertices as exact rational points in the reduced coordinate space.
    pub fn rational_points(&self) -> Vec<Vec<Rat>> {
        let d = self.scenario.coord_count();
        self.vertices.iter().map(|v| v.to_rational_point(d)).collect()
    }

    /// Set equality on the underlying behaviors, ignoring the outcome count
    /// (vertex sets of the same shape are directly comparable).
    pub fn same_vertices(&self, other: &VertexSet) -> bool {
        self.scenario.same_shape(&other.scenario) && self.vertices == other.vertices
    }

    /// True if every vertex of `self` also lies in `other`.
    pub fn subset_of(&self, other: &VertexSet) -> bool {
        self.scenario.same_shape(&other.scenario)
            && self
                .vertices
                .iter()
                .all(|v| other.vertices.binary_search(v).is_ok())
    }

    pub fn contains(&self, v: &VertexBits) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    /// The same set without the all-different (all-zero) behavior. That
    /// behavior is a genuine vertex whenever k >= 2, but the direct unanimous
    /// construction never produces it, and facet tables derived from the
    /// constructed vertex list are only reproducible against this smaller
    /// hull.
    pub fn without_all_different(&self) -> VertexSet {
        let zero = VertexBits::zero(self.scenario.coord_count());
        VertexSet {
            scenario: self.scenario.clone(),
            vertices: self
                .vertices
                .iter()
                .filter(|v| **v != zero)
                .cloned()
                .collect(),
        }
    }

    /// CSV dump: header row names every coordinate, one row per vertex.
    pub fn to_csv(&self) -> String {
        let d = self.scenario.coord_count();
        let mut out = String::new();
        let header: Vec<String> = (0..d).map(|c| self.scenario.coord_name(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for v in &self.vertices {
            let row: Vec<&str> = (0..d).map(|c| if v.get(c) { "1" } else { "0" }).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Encodes a party-pattern RGS as an integer for table lookup.
#[inline]
fn encode_rgs(rgs: &[u8], base: usize) -> usize {
    let mut code = 0usize;
    for &v in rgs {
        code = code * base + usize::from(v);
    }
    code
}

/// Lookup from pattern code to sigma index; `None` marks the all-singletons
/// pattern in smells mode or any non-unanimous pattern in unanimous mode.
struct SigmaTable {
    base: usize,
    table: Vec<Option<u16>>,
}

impl SigmaTable {
    fn new(sc: &Scenario) -> Self {
        let n = sc.parties();
        let base = n;
        let size = base.pow(n as u32);
        let mut table = vec![None; size];
        for (i, sigma) in sc.sigma_list().iter().enumerate() {
            table[encode_rgs(sigma.rgs(), base)] = Some(i as u16);
        }
        SigmaTable { base, table }
    }

    #[inline]
    fn lookup(&self, rgs: &[u8]) -> Option<u16> {
        self.table[encode_rgs(rgs, self.base)]
    }
}

/// Computes the pattern RGS of `outcomes` into `buf`.
#[inline]
fn rgs_of_outcomes(outcomes: &[u8], buf: &mut [u8]) {
    for i in 0..outcomes.len() {
        let mut found = false;
        for j in 0..i {
            if outcomes[j] == outcomes[i] {
                buf[i] = buf[j];
                found = true;
                break;
            }
        }
        if !found {
            buf[i] = buf[..i].iter().copied().max().map_or(0, |m| m + 1);
        }
    }
}

/// Reduces a deterministic strategy to its 0/1 behavior.
pub fn reduce_strategy(s: &DeterministicStrategy, sc: &Scenario) -> Result<VertexBits, StrategyError> {
    s.validate(sc)?;
    let table = SigmaTable::new(sc);
    let mut bits = VertexBits::zero(sc.coord_count());
    let n = sc.parties();
    let mut outcomes = vec![0u8; n];
    let mut rgs = vec![0u8; n];
    for (ti, x) in sc.tuples().iter().enumerate() {
        for i in 0..n {
            outcomes[i] = s.outcome(i, x[i]);
        }
        rgs_of_outcomes(&outcomes, &mut rgs);
        if let Some(si) = table.lookup(&rgs) {
            bits.set(sc.coord_index(ti, usize::from(si)));
        }
    }
    Ok(bits)
}

/// Options for [`enumerate_vertices`].
#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Cap the outcome count at the saturation threshold (identical polytope,
    /// exponentially cheaper). On by default.
    pub cap_k_at_saturation: bool,
    pub caps: ResourceCaps,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { cap_k_at_saturation: true, caps: ResourceCaps::default() }
    }
}

/// Effective outcome count for enumeration under the saturation cap.
fn effective_k(sc: &Scenario, cap_at_saturation: bool) -> usize {
    let mut k = sc.outcomes();
    // No strategy distinguishes more outcome values than there are nodes.
    k = k.min(sc.node_count());
    if cap_at_saturation {
        match sc.mode() {
            Mode::Unanimous => k = k.min(k_star_unanimous(sc.inputs())),
            Mode::Smells => {
                if let Some(m) = sc.homogeneous_inputs() {
                    k = k.min(k_star(sc.parties(), m));
                }
            }
        }
    }
    k
}

/// Number of restricted-growth strings of length `n` with at most `maxv`
/// distinct values.
fn rgs_count(n: usize, maxv: usize) -> Count {
    (1..=maxv.min(n)).map(|j| stirling2(n, j)).sum()
}

/// All distinct reduced 0/1 behaviors over the deterministic strategies of a
/// scenario, deduplicated and lexicographically sorted.
///
/// Strategies are enumerated in canonical form: the concatenated outcome table
/// (party-major) is a restricted-growth string with at most k distinct values.
/// Every strategy is a global outcome relabeling of exactly one canonical one,
/// and relabeling fixes the reduced behavior.
pub fn enumerate_vertices(sc: &Scenario, opts: &EnumOptions) -> Result<VertexSet, StrategyError> {
    let k_eff = effective_k(sc, opts.cap_k_at_saturation);
    let n_nodes = sc.node_count();
    let total = rgs_count(n_nodes, k_eff);
    if total > BigUint::from(opts.caps.max_vertices) {
        return Err(StrategyError::Cap(CapExceeded::new(
            "caps.max_vertices",
            opts.caps.max_vertices,
            u64::try_from(total.clone()).unwrap_or(u64::MAX),
        )));
    }

    let table = SigmaTable::new(sc);
    let n = sc.parties();
    let coords = sc.coord_count();
    // node indices per tuple, precomputed
    let tuple_nodes: Vec<Vec<usize>> = sc
        .tuples()
        .iter()
        .map(|x| (0..n).map(|i| sc.node_index(i, x[i])).collect())
        .collect();

    let mut seen: HashMap<VertexBits, ()> = HashMap::new();
    let mut rgs = vec![0u8; n_nodes];
    let mut outcomes = vec![0u8; n];
    let mut pat = vec![0u8; n];
    loop {
        // reduce the canonical strategy encoded by `rgs`
        let mut bits = VertexBits::zero(coords);
        for (ti, nodes) in tuple_nodes.iter().enumerate() {
            for (i, &node) in nodes.iter().enumerate() {
                outcomes[i] = rgs[node];
            }
            rgs_of_outcomes(&outcomes, &mut pat);
            if let Some(si) = table.lookup(&pat) {
                bits.set(sc.coord_index(ti, usize::from(si)));
            }
        }
        seen.entry(bits).or_insert(());

        // next restricted-growth string with < k_eff values
        let mut i = n_nodes;
        let mut done = true;
        while i > 1 {
            i -= 1;
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            let next = rgs[i] + 1;
            if next <= max_prefix + 1 && usize::from(next) < k_eff {
                rgs[i] = next;
                for v in rgs[i + 1..].iter_mut() {
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

    let mut vertices: Vec<VertexBits> = seen.into_keys().collect();
    vertices.sort_unstable();
    Ok(VertexSet { scenario: sc.clone(), vertices })
}

/// Direct construction of the unanimous-mode vertex set, without brute force
/// over outcome assignments: choose the isolated nodes per party, choose j
/// unanimous components, partition the remaining nodes of each party into j
/// blocks, and apply the (j!)^(n-1) shufflings of the block-to-component
/// matching.
pub fn construct_unanimous_vertices(sc: &Scenario) -> Result<VertexSet, StrategyError> {
    if sc.mode() != Mode::Unanimous {
        return Err(StrategyError::InvalidScenario(
            "direct construction is defined for unanimous mode".into(),
        ));
    }
    let n = sc.parties();
    let k = effective_k(sc, true);
    let coords = sc.coord_count();
    let tuples = sc.tuples();

    let mut seen: HashMap<VertexBits, ()> = HashMap::new();
    if k >= 2 {
        // Two outcomes suffice to avoid every unanimous event, so the
        // all-zero behavior is always a vertex; no configuration below
        // produces it.
        seen.insert(VertexBits::zero(coords), ());
    }

    // slot[i][x] = component id of party i's input x, or None if isolated
    let mut slots: Vec<Vec<Option<usize>>> = sc.inputs().iter().map(|&m| vec![None; m]).collect();

    // partitions of `items` into exactly j labeled blocks, emitted as
    // item -> block-id assignments in restricted-growth form (unlabeled),
    // labeling applied by the caller
    fn partitions_into(items: usize, j: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut assign = vec![0usize; items];
        fn go(i: usize, items: usize, j: usize, maxv: usize, assign: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == items {
                if maxv + 1 == j {
                    out.push(assign.clone());
                }
                return;
            }
            // pruning: remaining positions must still reach j blocks
            if maxv + 1 + (items - i) < j {
                return;
            }
            for v in 0..=(maxv + 1).min(j - 1) {
                assign[i] = v;
                go(i + 1, items, j, maxv.max(v), assign, out);
            }
        }
        if items == 0 || j == 0 || j > items {
            return out;
        }
        go(0, items, j, 0, &mut assign, &mut out);
        out
    }

    fn permutations(j: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..j).collect();
        fn heap(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == 1 {
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
        heap(j, &mut perm, &mut out);
        out
    }

    // iterate isolated-node subsets per party via bitmasks
    let masks_per_party: Vec<usize> = sc.inputs().iter().map(|&m| 1usize << m).collect();
    let mut mask_odometer = vec![0usize; n];
    loop {
        let alphas: Vec<usize> = mask_odometer.iter().map(|m| m.count_ones() as usize).collect();
        let remaining: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..sc.inputs()[i])
                    .filter(|x| mask_odometer[i] >> x & 1 == 0)
                    .collect()
            })
            .collect();
        let g = if alphas.iter().all(|&a| a == 0) {
            0
        } else if alphas.iter().all(|&a| a > 0) {
            2
        } else {
            1
        };

        if k >= g + 1 && remaining.iter().all(|r| !r.is_empty()) {
            let j_max = (k - g).min(remaining.iter().map(|r| r.len()).min().expect("n >= 2"));
            for j in 1..=j_max {
                // per-party partitions of the remaining nodes into j blocks
                let per_party: Vec<Vec<Vec<usize>>> =
                    remaining.iter().map(|r| partitions_into(r.len(), j)).collect();
                if per_party.iter().any(|p| p.is_empty()) {
                    continue;
                }
                let perms = permutations(j);
                // choose one partition per party, and a shuffle for parties 1..n
                let mut choice = vec![0usize; n];
                let mut shuffle = vec![0usize; n]; // index into perms, party 0 fixed
                loop {
                    // build slots
                    for i in 0..n {
                        for s in slots[i].iter_mut() {
                            *s = None;
                        }
                        let assign = &per_party[i][choice[i]];
                        let perm = &perms[shuffle[i]];
                        for (pos, &node) in remaining[i].iter().enumerate() {
                            slots[i][node] = Some(perm[assign[pos]]);
                        }
                    }
                    let mut bits = VertexBits::zero(coords);
                    for (ti, x) in tuples.iter().enumerate() {
                        let first = slots[0][x[0]];
                        if first.is_some() && (1..n).all(|i| slots[i][x[i]] == first) {
                            bits.set(sc.coord_index(ti, 0));
                        }
                    }
                    seen.entry(bits).or_insert(());

                    // advance (choice, shuffle) odometer; shuffle[0] stays 0
                    let mut advanced = false;
                    for i in 0..n {
                        if i > 0 && shuffle[i] + 1 < perms.len() {
                            shuffle[i] += 1;
                            advanced = true;
                            break;
                        }
                        if i > 0 {
                            shuffle[i] = 0;
                        }
                        if choice[i] + 1 < per_party[i].len() {
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
        }

        // next isolated-subset combination
        let mut advanced = false;
        for i in 0..n {
            if mask_odometer[i] + 1 < masks_per_party[i] {
                mask_odometer[i] += 1;
                advanced = true;
                break;
            }
            mask_odometer[i] = 0;
        }
        if !advanced {
            break;
        }
    }

    let mut vertices: Vec<VertexBits> = seen.into_keys().collect();
    vertices.sort_unstable();
    Ok(VertexSet { scenario: sc.clone(), vertices })
}

fn binomial(n: usize, k: usize) -> Count {
    if k > n {
        return BigUint::zero();
    }
    let mut r = BigUint::one();
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

fn factorial(n: usize) -> Count {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Closed-form vertex count: the bipartite smells sum, and its multipartite
/// unanimous generalization with the (j!)^(n-1) shuffle factor. Evaluated
/// exactly as stated, with the inner sum starting at j = 1; consequently the
/// count covers the vertices having at least one unanimous component and does
/// not include the all-different (all-zero) behavior that brute force
/// additionally finds whenever k >= 2.
pub fn count_vertices_formula(sc: &Scenario) -> Result<Count, StrategyError> {
    if sc.mode() == Mode::Smells && sc.parties() != 2 {
        return Err(StrategyError::FormulaUnsupported);
    }
    let n = sc.parties();
    let k = sc.outcomes();
    let mut total = BigUint::zero();
    let mut iso = vec![0usize; n];
    loop {
        let choose: Count = (0..n).map(|i| binomial(sc.inputs()[i], iso[i])).product();
        if !choose.is_zero() {
            let g = if iso.iter().all(|&a| a == 0) {
                0
            } else if iso.iter().all(|&a| a > 0) {
                2
            } else {
                1
            };
            if k >= g + 1 {
                for j in 1..=(k - g) {
                    let stirlings: Count = (0..n)
                        .map(|i| stirling2(sc.inputs()[i] - iso[i], j))
                        .product();
                    if !stirlings.is_zero() {
                        let shuffles = factorial(j).pow(n as u32 - 1);
                        total += choose.clone() * stirlings * shuffles;
                    }
                }
            }
        }
        let mut advanced = false;
        for i in 0..n {
            if iso[i] < sc.inputs()[i] {
                iso[i] += 1;
                advanced = true;
                break;
            }
            iso[i] = 0;
        }
        if !advanced {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(inputs: &[usize], k: usize, mode: Mode) -> Scenario {
        Scenario::new(inputs.to_vec(), k, mode).unwrap()
    }

    /// Raw oracle: every outcome assignment, no canonicalization.
    fn raw_vertex_set(scn: &Scenario) -> Vec<VertexBits> {
        let n_nodes = scn.node_count();
        let k = scn.outcomes();
        let mut seen = std::collections::BTreeSet::new();
        let total = (k as u64).pow(n_nodes as u32);
        for code in 0..total {
            let mut rem = code;
            let mut flat = vec![0u8; n_nodes];
            for v in flat.iter_mut() {
                *v = (rem % k as u64) as u8;
                rem /= k as u64;
            }
            let mut outputs = Vec::new();
            let mut off = 0;
            for &m in scn.inputs() {
                outputs.push(flat[off..off + m].to_vec());
                off += m;
            }
            let s = DeterministicStrategy { outputs };
            seen.insert(reduce_strategy(&s, scn).unwrap());
        }
        seen.into_iter().collect()
    }

    #[test]
    fn k_star_values() {
        assert_eq!(k_star(2, 3), 4);
        assert_eq!(k_star(3, 3), 6);
        assert_eq!(k_star(3, 4), 7);
        assert_eq!(k_star(2, 2), 3);
    }

    #[test]
    fn k_star_unanimous_values() {
        assert_eq!(k_star_unanimous(&[2, 2, 2]), 3);
        assert_eq!(k_star_unanimous(&[3, 5]), 4);
        assert_eq!(k_star_unanimous(&[1, 1]), 2);
    }

    #[test]
    fn scenario_string_round_trip() {
        for text in [
            "n=3 m=2,2,2 k=3 mode=smells",
            "n=2 m=4,4 k=5 mode=smells",
            "n=4 m=2,2,2,2 k=2 mode=unanimous",
        ] {
            let s: Scenario = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        let shorthand: Scenario = "n=3 m=2 k=3 mode=smells".parse().unwrap();
        assert_eq!(shorthand.inputs(), &[2, 2, 2]);
        assert!("n=2 m=2,2 k=0 mode=smells".parse::<Scenario>().is_err());
        assert!("n=2 m=2,2 k=2 mode=other".parse::<Scenario>().is_err());
        assert!("n=2 m=2,2,2 k=2 mode=smells".parse::<Scenario>().is_err());
    }

    #[test]
    fn reduce_constant_strategy_hits_all_block() {
        let scn = sc(&[2, 2, 2], 2, Mode::Smells);
        let s = DeterministicStrategy { outputs: vec![vec![0, 0]; 3] };
        let bits = reduce_strategy(&s, &scn).unwrap();
        let all_idx = 0; // ALL is first in RGS-lex order
        for ti in 0..scn.tuple_count() {
            for si in 0..scn.sigma_count() {
                assert_eq!(bits.get(scn.coord_index(ti, si)), si == all_idx);
            }
        }
    }

    #[test]
    fn reduce_xor_strategy() {
        // Alice outputs x, Bob outputs 1-y: equal iff x != y
        let scn = sc(&[2, 2], 2, Mode::Smells);
        let s = DeterministicStrategy { outputs: vec![vec![0, 1], vec![1, 0]] };
        let bits = reduce_strategy(&s, &scn).unwrap();
        for (ti, x) in scn.tuples().iter().enumerate() {
            assert_eq!(bits.get(ti), x[0] != x[1], "tuple {x:?}");
        }
    }

    #[test]
    fn reduce_two_against_one() {
        // Alice, Bob constant 0; Charlie constant 1 -> pattern 01|2 everywhere
        let scn = sc(&[2, 2, 2], 2, Mode::Smells);
        let s = DeterministicStrategy {
            outputs: vec![vec![0, 0], vec![0, 0], vec![1, 1]],
        };
        let bits = reduce_strategy(&s, &scn).unwrap();
        let sigma_list = scn.sigma_list();
        let ab_c = sigma_list
            .iter()
            .position(|p| p == &"01|2".parse::<SetPartition>().unwrap())
            .unwrap();
        for ti in 0..scn.tuple_count() {
            for si in 0..scn.sigma_count() {
                assert_eq!(bits.get(scn.coord_index(ti, si)), si == ab_c);
            }
        }
    }

    #[test]
    fn outcome_relabeling_fixes_reduction() {
        let scn = sc(&[2, 2], 3, Mode::Smells);
        let s = DeterministicStrategy { outputs: vec![vec![0, 1], vec![1, 2]] };
        let relabeled = DeterministicStrategy { outputs: vec![vec![2, 0], vec![0, 1]] };
        assert_eq!(
            reduce_strategy(&s, &scn).unwrap(),
            reduce_strategy(&relabeled, &scn).unwrap()
        );
    }

    #[test]
    fn vertices_222_smells() {
        let scn = sc(&[2, 2], 2, Mode::Smells);
        let vs = enumerate_vertices(&scn, &EnumOptions::default()).unwrap();
        assert_eq!(vs.len(), 8);
        assert_eq!(vs.rational_points().len(), 8);
    }

    #[test]
    fn vertices_match_raw_oracle() {
        for (inputs, k, mode) in [
            (vec![2usize, 2], 2usize, Mode::Smells),
            (vec![2, 2], 3, Mode::Smells),
            (vec![3, 2], 3, Mode::Smells),
            (vec![2, 2, 2], 2, Mode::Smells),
            (vec![2, 2, 2], 3, Mode::Smells),
            (vec![2, 2, 2], 2, Mode::Unanimous),
            (vec![2, 2, 2], 3, Mode::Unanimous),
            (vec![2, 3, 2], 2, Mode::Unanimous),
        ] {
            let scn = sc(&inputs, k, mode);
            let opts = EnumOptions { cap_k_at_saturation: false, ..Default::default() };
            let canonical = enumerate_vertices(&scn, &opts).unwrap();
            let raw = raw_vertex_set(&scn);
            assert_eq!(
                canonical.vertices, raw,
                "scenario {scn}: canonical enumeration disagrees with raw brute force"
            );
        }
    }

    #[test]
    fn single_outcome_forces_all_equal() {
        let scn = sc(&[2, 2], 1, Mode::Smells);
        let vs = enumerate_vertices(&scn, &EnumOptions::default()).unwrap();
        assert_eq!(vs.len(), 1);
        let v = vs.get(0);
        for c in 0..scn.coord_count() {
            assert!(v.get(c));
        }
    }

    #[test]
    fn saturation_at_k_star_bipartite() {
        // vertex sets at k* and k*+1 coincide; k*-1 is strictly smaller
        let m = 3;
        let ks = k_star(2, m);
        let base = |k: usize| {
            let scn = sc(&[m, m], k, Mode::Smells);
            let opts = EnumOptions { cap_k_at_saturation: false, ..Default::default() };
            enumerate_vertices(&scn, &opts).unwrap()
        };
        let at = base(ks);
        let above = base(ks + 1);
        let below = base(ks - 1);
        assert!(at.same_vertices(&above));
        assert!(below.subset_of(&at));
        assert!(below.len() < at.len());
    }

    #[test]
    fn construction_matches_enumeration() {
        for (inputs, k) in [
            (vec![2usize, 2], 2usize),
            (vec![2, 2], 3),
            (vec![3, 3], 3),
            (vec![2, 2, 2], 2),
            (vec![2, 2, 2], 3),
            (vec![3, 2, 2], 3),
            (vec![2, 2, 2, 2], 2),
        ] {
            let scn = sc(&inputs, k, Mode::Unanimous);
            let built = construct_unanimous_vertices(&scn).unwrap();
            let brute = enumerate_vertices(&scn, &EnumOptions::default()).unwrap();
            assert!(
                built.same_vertices(&brute),
                "scenario {scn}: construction {} vs brute force {}",
                built.len(),
                brute.len()
            );
        }
    }

    #[test]
    fn theorem2_hand_value() {
        // (2,2,2): the sum evaluates to 7 term by term
        let scn = sc(&[2, 2], 2, Mode::Smells);
        assert_eq!(count_vertices_formula(&scn).unwrap(), BigUint::from(7u32));
        // brute force additionally finds the all-zero behavior
        let vs = enumerate_vertices(&scn, &EnumOptions::default()).unwrap();
        assert_eq!(vs.len(), 8);
    }

    #[test]
    fn formula_counts_match_brute_force_modulo_zero_vertex() {
        for ma in 1..=3usize {
            for mb in 1..=3usize {
                for k in 1..=4usize {
                    let scn = sc(&[ma, mb], k, Mode::Smells);
                    let formula = count_vertices_formula(&scn).unwrap();
                    let brute = enumerate_vertices(&scn, &EnumOptions::default()).unwrap();
                    let zero_extra = if k >= 2 { 1u32 } else { 0 };
                    assert_eq!(
                        formula + BigUint::from(zero_extra),
                        BigUint::from(brute.len() as u64),
                        "scenario ({ma},{mb},{k})"
                    );
                }
            }
        }
    }

    #[test]
    fn formula_constant_beyond_saturation() {
        let at = count_vertices_formula(&sc(&[3, 2], 5, Mode::Smells)).unwrap();
        let beyond = count_vertices_formula(&sc(&[3, 2], 9, Mode::Smells)).unwrap();
        assert_eq!(at, beyond);
    }

    #[test]
    fn formula_rejects_multipartite_smells() {
        assert!(matches!(
            count_vertices_formula(&sc(&[2, 2, 2], 2, Mode::Smells)),
            Err(StrategyError::FormulaUnsupported)
        ));
    }

    #[test]
    fn min_outcomes_examples() {
        // the illustration graph: a0-b0, a0-b1, a2-b2, with a1 isolated
        let scn = sc(&[3, 3], 3, Mode::Smells);
        let s = DeterministicStrategy {
            outputs: vec![vec![0, 2, 1], vec![0, 0, 1]],
        };
        let g = StrategyGraph::of_strategy(&s, &scn).unwrap();
        assert_eq!(min_outcomes(&g), 3);

        // perfect matching of m pairs
        let scn2 = sc(&[3, 3], 3, Mode::Smells);
        let s2 = DeterministicStrategy {
            outputs: vec![vec![0, 1, 2], vec![0, 1, 2]],
        };
        let g2 = StrategyGraph::of_strategy(&s2, &scn2).unwrap();
        assert_eq!(min_outcomes(&g2), 3);

        // fully disconnected
        let scn3 = sc(&[2, 2], 4, Mode::Smells);
        let s3 = DeterministicStrategy {
            outputs: vec![vec![0, 1], vec![2, 3]],
        };
        let g3 = StrategyGraph::of_strategy(&s3, &scn3).unwrap();
        assert_eq!(min_outcomes(&g3), 2);
    }

    #[test]
    fn min_outcomes_bounded_by_k() {
        let scn = sc(&[2, 2, 2], 3, Mode::Smells);
        let opts = EnumOptions { cap_k_at_saturation: false, ..Default::default() };
        let _ = opts;
        // every valid strategy's graph needs at most k outcomes
        for code in 0..3u64.pow(6) {
            let mut rem = code;
            let mut flat = vec![0u8; 6];
            for v in flat.iter_mut() {
                *v = (rem % 3) as u8;
                rem /= 3;
            }
            let s = DeterministicStrategy {
                outputs: vec![flat[0..2].to_vec(), flat[2..4].to_vec(), flat[4..6].to_vec()],
            };
            let g = StrategyGraph::of_strategy(&s, &scn).unwrap();
            assert!(min_outcomes(&g) <= 3);
        }
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let scn = sc(&[3, 3, 3], 6, Mode::Smells);
        let opts = EnumOptions {
            cap_k_at_saturation: true,
            caps: ResourceCaps { max_vertices: 100, ..Default::default() },
        };
        assert!(matches!(
            enumerate_vertices(&scn, &opts),
            Err(StrategyError::Cap(_))
        ));
    }

    #[test]
    fn csv_dump_shape() {
        let scn = sc(&[2, 2], 2, Mode::Smells);
        let vs = enumerate_vertices(&scn, &EnumOptions::default()).unwrap();
        let csv = vs.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + vs.len());
        assert!(lines[0].starts_with("x=(0,0);sigma=ALL"));
    }
}
