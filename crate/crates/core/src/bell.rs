//! Bell's tree algebra at finite height.
//!
//! Nodes are finite sequences `s` with `s(i) ≤ i+1`; the space
//! `X = ∏_n {0,…,n+1}` carries the product of uniform measures, so a node of
//! length `n` spans a basic set of measure `1/(n+1)!`. A `π ∈ T` is known
//! through its rows `π(0), …, π(H)`, row `n` being a node of length `n+1`;
//! `V_π = ⋃_n [π(n)]` and `C_π` is the set of nodes extending some row.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Default cap on nodes visited by searches and sweeps.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BellError {
    #[error("invalid node {0:?}: entry {1} exceeds its bound")]
    InvalidNode(Vec<u32>, usize),
    #[error("row {row} has length {len}, expected {}", row + 1)]
    RowLength { row: usize, len: usize },
    #[error("a π prefix needs at least one row")]
    NoRows,
    #[error("search would visit more than {budget} nodes")]
    DepthGuard { budget: u64 },
    #[error("the residual is empty at the truncation: {0}")]
    HypothesisFailed(String),
    #[error("precondition: {0}")]
    Precondition(String),
}

/// A node of the tree `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct BellNode(Vec<u32>);

impl BellNode {
    pub fn new(seq: Vec<u32>) -> Result<Self, BellError> {
        if let Some(i) = seq.iter().enumerate().position(|(i, &v)| v as usize > i + 1) {
            return Err(BellError::InvalidNode(seq, i));
        }
        Ok(Self(seq))
    }

    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn seq(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether `self ⊇ prefix` as sequences.
    pub fn extends(&self, prefix: &BellNode) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn child(&self, p: u32) -> Self {
        debug_assert!(p as usize <= self.len() + 1);
        let mut v = self.0.clone();
        v.push(p);
        Self(v)
    }

    /// Number of children, `|s| + 2`.
    pub fn arity(&self) -> u32 {
        self.len() as u32 + 2
    }

    pub fn children(&self) -> impl Iterator<Item = BellNode> + '_ {
        (0..self.arity()).map(|p| self.child(p))
    }

    /// Extends by zeros to length `len`.
    pub fn pad_to(&self, len: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(len.max(v.len()), 0);
        Self(v)
    }
}

impl<'de> Deserialize<'de> for BellNode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        BellNode::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for BellNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", items.join(","))
    }
}

/// `λ([s]) = 1/(|s|+1)!`.
pub fn node_measure(s: &BellNode) -> Rational {
    rational::inv_factorial(s.len() as u32 + 1)
}

/// All nodes of length `d` extending `s`, in lexicographic order.
pub fn nodes_at_depth(s: &BellNode, d: usize) -> Vec<BellNode> {
    let mut level = vec![s.clone()];
    for _ in s.len()..d {
        level = level.iter().flat_map(|t| t.children().collect::<Vec<_>>()).collect();
    }
    level
}

/// Rows `π(0), …, π(H)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PiPrefix {
    rows: Vec<BellNode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PiRepr {
    rows: Vec<BellNode>,
}

impl<'de> Deserialize<'de> for PiPrefix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PiPrefix::new(PiRepr::deserialize(d)?.rows).map_err(serde::de::Error::custom)
    }
}

impl PiPrefix {
    pub fn new(rows: Vec<BellNode>) -> Result<Self, BellError> {
        if rows.is_empty() {
            return Err(BellError::NoRows);
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(n, r)| r.len() != n + 1) {
            return Err(BellError::RowLength { row, len: r.len() });
        }
        Ok(Self { rows })
    }

    pub fn from_seqs(rows: &[&[u32]]) -> Result<Self, BellError> {
        Self::new(rows.iter().map(|r| BellNode::new(r.to_vec())).collect::<Result<_, _>>()?)
    }

    pub fn rows(&self) -> &[BellNode] {
        &self.rows
    }

    pub fn height(&self) -> usize {
        self.rows.len() - 1
    }

    /// Whether `t` extends one of the rows `π(0), …, π(h)`.
    pub fn covers(&self, t: &BellNode, h: usize) -> bool {
        self.rows.iter().take(h + 1).any(|r| t.extends(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Tree {
    Empty,
    Full,
    Branch(Vec<Tree>),
}

impl Tree {
    fn branch(children: Vec<Tree>) -> Tree {
        if children.iter().all(|c| *c == Tree::Full) {
            Tree::Full
        } else if children.iter().all(|c| *c == Tree::Empty) {
            Tree::Empty
        } else {
            Tree::Branch(children)
        }
    }

    fn basic(s: &[u32], depth: usize) -> Tree {
        match s.split_first() {
            None => Tree::Full,
            Some((&p, rest)) => {
                let mut children = vec![Tree::Empty; depth + 2];
                children[p as usize] = Tree::basic(rest, depth + 1);
                Tree::Branch(children)
            }
        }
    }

    fn complement(&self) -> Tree {
        match self {
            Tree::Empty => Tree::Full,
            Tree::Full => Tree::Empty,
            Tree::Branch(cs) => Tree::Branch(cs.iter().map(Tree::complement).collect()),
        }
    }

    fn union(&self, other: &Tree) -> Tree {
        match (self, other) {
            (Tree::Full, _) | (_, Tree::Full) => Tree::Full,
            (Tree::Empty, t) | (t, Tree::Empty) => t.clone(),
            (Tree::Branch(a), Tree::Branch(b)) => Tree::branch(a.iter().zip(b).map(|(x, y)| x.union(y)).collect()),
        }
    }

    fn intersect(&self, other: &Tree) -> Tree {
        match (self, other) {
            (Tree::Empty, _) | (_, Tree::Empty) => Tree::Empty,
            (Tree::Full, t) | (t, Tree::Full) => t.clone(),
            (Tree::Branch(a), Tree::Branch(b)) => {
                Tree::branch(a.iter().zip(b).map(|(x, y)| x.intersect(y)).collect())
            }
        }
    }

    fn measure(&self, depth: u32) -> Rational {
        match self {
            Tree::Empty => Rational::zero(),
            Tree::Full => rational::inv_factorial(depth + 1),
            Tree::Branch(cs) => cs.iter().map(|c| c.measure(depth + 1)).sum(),
        }
    }

    fn leaves(&self, path: &mut Vec<u32>, out: &mut Vec<BellNode>) {
        match self {
            Tree::Empty => {}
            Tree::Full => out.push(BellNode(path.clone())),
            Tree::Branch(cs) => {
                for (p, c) in cs.iter().enumerate() {
                    path.push(p as u32);
                    c.leaves(path, out);
                    path.pop();
                }
            }
        }
    }

    fn first_leaf(&self, path: &mut Vec<u32>) -> bool {
        match self {
            Tree::Empty => false,
            Tree::Full => true,
            Tree::Branch(cs) => cs.iter().enumerate().any(|(p, c)| {
                path.push(p as u32);
                let found = c.first_leaf(path);
                if !found {
                    path.pop();
                }
                found
            }),
        }
    }
}

/// A clopen subset of `X`, kept as the antichain of maximal basic sets it
/// contains; two values are equal iff they denote the same set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellClopen(Tree);

impl BellClopen {
    pub fn empty() -> Self {
        Self(Tree::Empty)
    }

    pub fn full() -> Self {
        Self(Tree::Full)
    }

    /// `[s]`
    pub fn basic(s: &BellNode) -> Self {
        Self(Tree::basic(&s.0, 0))
    }

    pub fn from_nodes<'a>(nodes: impl IntoIterator<Item = &'a BellNode>) -> Self {
        nodes.into_iter().fold(Self::empty(), |acc, s| acc.union(&Self::basic(s)))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(self.0.union(&other.0))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self(self.0.intersect(&other.0))
    }

    pub fn complement(&self) -> Self {
        Self(self.0.complement())
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    pub fn is_empty(&self) -> bool {
        self.0 == Tree::Empty
    }

    pub fn is_full(&self) -> bool {
        self.0 == Tree::Full
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.0.measure(0)
    }

    /// The maximal basic sets, pairwise disjoint, in lexicographic order.
    pub fn nodes(&self) -> Vec<BellNode> {
        let mut out = Vec::new();
        self.0.leaves(&mut Vec::new(), &mut out);
        out
    }

    /// Length of the longest listed node.
    pub fn depth(&self) -> usize {
        self.nodes().iter().map(BellNode::len).max().unwrap_or(0)
    }

    /// The lexicographically least maximal node, if nonempty.
    pub fn witness(&self) -> Option<BellNode> {
        let mut path = Vec::new();
        self.0.first_leaf(&mut path).then_some(BellNode(path))
    }

    /// Whether `[t]` lies inside the set.
    pub fn contains_basic(&self, t: &BellNode) -> bool {
        BellClopen::basic(t).is_subset(self)
    }

    /// Whether the point extending `t` by zeros lies in the set.
    pub fn contains_point(&self, t: &BellNode) -> bool {
        let mut node = &self.0;
        let mut depth = 0;
        loop {
            match node {
                Tree::Empty => return false,
                Tree::Full => return true,
                Tree::Branch(cs) => {
                    let p = t.0.get(depth).copied().unwrap_or(0);
                    node = &cs[p as usize];
                    depth += 1;
                }
            }
        }
    }
}

impl Serialize for BellClopen {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.nodes().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BellClopen {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(BellClopen::from_nodes(&Vec::<BellNode>::deserialize(d)?))
    }
}

/// `⋃_{n≤H} [π(n)]`.
pub fn v_trunc(pi: &PiPrefix) -> BellClopen {
    BellClopen::from_nodes(pi.rows())
}

/// `A_n = ⋃_j ⋃_{i<n} [π_j(i)]`, using the rows each prefix has.
pub fn a_n(pis: &[PiPrefix], n: usize) -> BellClopen {
    BellClopen::from_nodes(pis.iter().flat_map(|p| p.rows().iter().take(n)))
}

/// Certified majorant of `m·Σ_{l>H} 1/(l+2)!`: the terms shrink by at least
/// `1/(H+4)` from the first, so the tail is at most
/// `(1/(H+3)!)·(H+4)/(H+3)`.
pub fn v_tail_bound(h: usize, m: usize) -> Rational {
    let h = h as i64;
    rational::ratio(m as i64, 1) * rational::inv_factorial(h as u32 + 3) * rational::ratio(h + 4, h + 3)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaylorCheck {
    pub m: u32,
    pub n: u32,
    pub holds: bool,
    #[serde(with = "rational::serde_str")]
    pub lhs_lower: Rational,
    #[serde(with = "rational::serde_str")]
    pub lhs_upper: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    /// Last index of the exact partial sum.
    pub terms_to: u32,
}

/// Compares `m·Σ_{l≥n} 1/(l+1)!` with `1/n!` using exact partial sums
/// bracketed by a geometric tail majorant, lengthening the partial sum until
/// the bracket excludes `1/n!`.
pub fn taylor_check(m: u32, n: u32) -> TaylorCheck {
    let rhs = rational::inv_factorial(n);
    let mm = rational::ratio(m as i64, 1);
    let mut partial = Rational::zero();
    let mut k = n;
    loop {
        partial += rational::inv_factorial(k + 1);
        // Σ_{l>k} 1/(l+1)! ≤ (1/(k+2)!)·(k+3)/(k+2)
        let tail = rational::inv_factorial(k + 2) * rational::ratio(k as i64 + 3, k as i64 + 2);
        let lower = &mm * &partial;
        let upper = &mm * (&partial + tail);
        if upper < rhs || lower >= rhs {
            return TaylorCheck { m, n, holds: upper < rhs, lhs_lower: lower, lhs_upper: upper, rhs, terms_to: k };
        }
        k += 1;
    }
}

fn common_height(pos: &[PiPrefix], neg: &[PiPrefix]) -> usize {
    pos.iter().chain(neg).map(PiPrefix::height).max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VVerdict {
    Empty,
    Witness { node: BellNode },
}

/// The residual `[s] ∩ ⋂ v_trunc(pos_i) ∩ ⋂ v_trunc(neg_j)ᶜ` as a clopen.
pub fn v_residual(s: &BellNode, pos: &[PiPrefix], neg: &[PiPrefix]) -> BellClopen {
    let mut acc = BellClopen::basic(s);
    for p in pos {
        acc = acc.intersect(&v_trunc(p));
    }
    for p in neg {
        acc = acc.difference(&v_trunc(p));
    }
    acc
}

/// Decides emptiness of the residual by exact set algebra; a witness is a
/// node of length `max(H+1, |s|)` whose basic set lies inside it.
pub fn decide_nonempty_v(s: &BellNode, pos: &[PiPrefix], neg: &[PiPrefix]) -> VVerdict {
    let r = v_residual(s, pos, neg);
    match r.witness() {
        None => VVerdict::Empty,
        Some(t) => {
            let len = (common_height(pos, neg) + 1).max(s.len());
            VVerdict::Witness { node: t.pad_to(len) }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CVerdict {
    Finite,
    /// Every node on the branch from `start` through `prefix` lies in `D`.
    InfiniteWitness { start: usize, prefix: BellNode },
}

/// Membership of a node in `D = C_s ∩ ⋂ C_{pos_i} ∩ ⋂ C_{neg_j}ᶜ` (rows up to
/// each prefix's height).
pub fn in_d(t: &BellNode, s: &BellNode, pos: &[PiPrefix], neg: &[PiPrefix]) -> bool {
    t.extends(s)
        && pos.iter().all(|p| p.covers(t, p.height()))
        && neg.iter().all(|p| !p.covers(t, p.height()))
}

struct CSearch<'a> {
    s: &'a BellNode,
    pos: &'a [PiPrefix],
    neg: &'a [PiPrefix],
    target: usize,
    visited: u64,
    budget: u64,
}

impl CSearch<'_> {
    fn viable(&self, t: &BellNode) -> bool {
        let comparable = |r: &BellNode| t.extends(r) || r.extends(t);
        (t.extends(self.s) || self.s.extends(t))
            && self.neg.iter().all(|p| !p.covers(t, p.height()))
            && self.pos.iter().all(|p| p.rows().iter().any(comparable))
    }

    fn dfs(&mut self, t: BellNode) -> Result<Option<BellNode>, BellError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(BellError::DepthGuard { budget: self.budget });
        }
        if !self.viable(&t) {
            return Ok(None);
        }
        if t.len() == self.target {
            return Ok(in_d(&t, self.s, self.pos, self.neg).then_some(t));
        }
        let next: Vec<BellNode> = if t.len() < self.s.len() {
            vec![t.child(self.s.seq()[t.len()])]
        } else {
            t.children().collect()
        };
        for c in next {
            if let Some(found) = self.dfs(c)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }
}

/// Decides whether `D` is infinite. Past length `H+1` no row can be newly
/// extended, so `D` is infinite iff it has a node `t` of length
/// `M = max(H+1, |s|)`; the search prunes nodes extending a negative row or
/// incompatible with every row of some positive prefix. From `t` the branch
/// is continued greedily, each step taking the least child that extends no
/// negative row; at depth `k` at most `m` of the `k+2` children are excluded.
pub fn decide_infinite_c(
    s: &BellNode,
    pos: &[PiPrefix],
    neg: &[PiPrefix],
    budget: u64,
) -> Result<CVerdict, BellError> {
    let target = (common_height(pos, neg) + 1).max(s.len());
    let mut search = CSearch { s, pos, neg, target, visited: 0, budget };
    let Some(start) = search.dfs(BellNode::root())? else {
        return Ok(CVerdict::Finite);
    };
    let mut t = start.clone();
    let extra = neg.len() + 2;
    for _ in 0..extra {
        let next = t
            .children()
            .find(|c| in_d(c, s, pos, neg))
            .expect("more children than negative prefixes");
        t = next;
    }
    Ok(CVerdict::InfiniteWitness { start: start.len(), prefix: t })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sweep {
    pub depth: usize,
    pub nodes: u64,
    pub in_d: u64,
    pub in_residual: u64,
}

/// Classifies every node of length `max(H+1, |s|)` below `s` by the raw
/// definitions: membership in `D`, and whether the zero-extension of the
/// node is a point of the residual.
pub fn sweep(s: &BellNode, pos: &[PiPrefix], neg: &[PiPrefix], budget: u64) -> Result<Sweep, BellError> {
    let depth = (common_height(pos, neg) + 1).max(s.len());
    let count: u128 = (s.len() + 2..=depth + 1).map(|k| k as u128).product();
    if count > budget as u128 {
        return Err(BellError::DepthGuard { budget });
    }
    let vs_pos: Vec<BellClopen> = pos.iter().map(v_trunc).collect();
    let vs_neg: Vec<BellClopen> = neg.iter().map(v_trunc).collect();
    let mut out = Sweep { depth, nodes: 0, in_d: 0, in_residual: 0 };
    for t in nodes_at_depth(s, depth) {
        out.nodes += 1;
        if in_d(&t, s, pos, neg) {
            out.in_d += 1;
        }
        if vs_pos.iter().all(|v| v.contains_point(&t)) && vs_neg.iter().all(|v| !v.contains_point(&t)) {
            out.in_residual += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoReport {
    pub c_side: CVerdict,
    pub v_side: VVerdict,
    pub consistent: bool,
    pub sweep: Option<Sweep>,
    pub sweep_agrees: Option<bool>,
}

/// Runs both deciders and compares them with each other and, when within
/// budget, with the exhaustive sweep.
pub fn iso_condition_check(
    s: &BellNode,
    pos: &[PiPrefix],
    neg: &[PiPrefix],
    budget: u64,
) -> Result<IsoReport, BellError> {
    let c_side = decide_infinite_c(s, pos, neg, budget)?;
    let v_side = decide_nonempty_v(s, pos, neg);
    let c_finite = c_side == CVerdict::Finite;
    let v_empty = v_side == VVerdict::Empty;
    let witnesses_ok = match (&c_side, &v_side) {
        (CVerdict::InfiniteWitness { prefix, .. }, VVerdict::Witness { node }) => {
            in_d(prefix, s, pos, neg) && v_residual(s, pos, neg).contains_basic(node)
        }
        _ => true,
    };
    let consistent = c_finite == v_empty && witnesses_ok;
    let (sweep, sweep_agrees) = match sweep(s, pos, neg, budget) {
        Ok(sw) => {
            let agrees = (sw.in_d == 0) == c_finite && (sw.in_residual == 0) == v_empty;
            (Some(sw), Some(agrees))
        }
        Err(BellError::DepthGuard { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(IsoReport { c_side, v_side, consistent, sweep, sweep_agrees })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderStep {
    pub l: usize,
    #[serde(with = "rational::serde_str")]
    pub measure: Rational,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub holds: bool,
}

/// `λ(A_{l+1} ∖ A_l) ≤ m/(l+2)!` for `l ≤ H`, `H` the least height.
pub fn malo_ladder(pis: &[PiPrefix]) -> Vec<LadderStep> {
    let h = pis.iter().map(PiPrefix::height).min().unwrap_or(0);
    let m = pis.len() as i64;
    let mut prev = BellClopen::empty();
    (0..=h)
        .map(|l| {
            let next = a_n(pis, l + 1);
            let measure = next.difference(&prev).measure();
            let bound = rational::ratio(m, 1) * rational::inv_factorial(l as u32 + 2);
            prev = next;
            LadderStep { l, holds: measure <= bound, measure, bound }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    pub m: usize,
    pub n: usize,
    pub height: usize,
    pub witness: BellNode,
    #[serde(with = "rational::serde_str")]
    pub outside_a_n: Rational,
    #[serde(with = "rational::serde_str")]
    pub outside_a_n_bound: Rational,
    pub duzo_holds: bool,
    pub ladder: Vec<LadderStep>,
    pub taylor: TaylorCheck,
    #[serde(with = "rational::serde_str")]
    pub basic: Rational,
    #[serde(with = "rational::serde_str")]
    pub covered: Rational,
    #[serde(with = "rational::serde_str")]
    pub tail: Rational,
    #[serde(with = "rational::serde_str")]
    pub gap: Rational,
    pub passed: bool,
}

/// Certifies `λ([s] ∩ ⋃ V_{π_j}) < λ([s])` for a nonempty π-base element
/// `[s] ∩ ⋂ V_{π_j}ᶜ`, with every `V` known up to height `H ≥ n`: the gap
/// `λ([s]) − λ([s] ∩ ⋃ v_trunc) − v_tail_bound(H, m)` is exact and positive.
pub fn strict_positivity_check(s: &BellNode, pis: &[PiPrefix], n: usize) -> Result<PositivityReport, BellError> {
    let m = pis.len();
    if m == 0 {
        return Err(BellError::Precondition("at least one π is needed".into()));
    }
    if n <= s.len().max(3 * m) {
        return Err(BellError::Precondition(format!("n = {n} must exceed max(|s|, 3m) = {}", s.len().max(3 * m))));
    }
    let height = pis.iter().map(PiPrefix::height).min().expect("m ≥ 1");
    if n > height {
        return Err(BellError::Precondition(format!("n = {n} exceeds the available height {height}")));
    }
    let witness = match decide_nonempty_v(s, &[], pis) {
        VVerdict::Empty => return Err(BellError::HypothesisFailed(format!("[{s}] is covered by the rows"))),
        VVerdict::Witness { node } => node,
    };
    let basic_set = BellClopen::basic(s);
    let outside_a_n = basic_set.difference(&a_n(pis, n)).measure();
    let outside_a_n_bound = rational::inv_factorial(n as u32 + 1);
    let duzo_holds = outside_a_n >= outside_a_n_bound;
    let ladder = malo_ladder(pis);
    let taylor = taylor_check(m as u32, n as u32 + 1);

    let union = pis.iter().fold(BellClopen::empty(), |acc, p| acc.union(&v_trunc(p)));
    let basic = node_measure(s);
    let covered = basic_set.intersect(&union).measure();
    let tail = v_tail_bound(height, m);
    let gap = &basic - &covered - &tail;
    let passed = gap > Rational::zero() && duzo_holds && ladder.iter().all(|l| l.holds) && taylor.holds;
    Ok(PositivityReport {
        m,
        n,
        height,
        witness,
        outside_a_n,
        outside_a_n_bound,
        duzo_holds,
        ladder,
        taylor,
        basic,
        covered,
        tail,
        gap,
        passed,
    })
}

/// Whether every set has measure above `1 − 1/n`; any `n` such sets meet,
/// since their complements have total measure below 1.
pub fn n_linked_by_measure(sets: &[BellClopen], n: usize) -> bool {
    let threshold = Rational::one() - rational::ratio(1, n as i64);
    sets.iter().all(|s| s.measure() > threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn node(s: &[u32]) -> BellNode {
        BellNode::new(s.to_vec()).unwrap()
    }

    fn pi(rows: &[&[u32]]) -> PiPrefix {
        PiPrefix::from_seqs(rows).unwrap()
    }

    #[test]
    fn node_validation_and_measure() {
        assert!(BellNode::new(vec![2]).is_err());
        assert!(BellNode::new(vec![1, 2, 3]).is_ok());
        assert_eq!(node_measure(&node(&[0, 1])), ratio(1, 6));
        assert_eq!(node_measure(&BellNode::root()), ratio(1, 1));
        let s = node(&[0, 2, 1]);
        assert_eq!(s.children().count(), 5);
        let kids: Rational = s.children().map(|c| node_measure(&c)).sum();
        assert_eq!(kids, node_measure(&s));
        assert_eq!(node_measure(&s), ratio(1, 24));
    }

    #[test]
    fn depth_mass() {
        for d in 0..=6 {
            let nodes = nodes_at_depth(&BellNode::root(), d);
            assert_eq!(nodes.len() as u64, (1..=d as u64 + 1).product::<u64>());
            let total: Rational = nodes.iter().map(node_measure).sum();
            assert_eq!(total, ratio(1, 1));
        }
    }

    #[test]
    fn v_trunc_examples() {
        assert_eq!(v_trunc(&pi(&[&[0]])).measure(), ratio(1, 2));
        let nested = v_trunc(&pi(&[&[0], &[0, 0]]));
        assert_eq!(nested.measure(), ratio(1, 2));
        assert_eq!(nested.nodes(), vec![node(&[0])]);
        assert_eq!(v_trunc(&pi(&[&[0], &[1, 0]])).measure(), ratio(2, 3));
    }

    #[test]
    fn canonical_form_merges_siblings() {
        let kids = node(&[1]).children().collect::<Vec<_>>();
        let u = BellClopen::from_nodes(&kids);
        assert_eq!(u, BellClopen::basic(&node(&[1])));
        assert_eq!(u.complement().union(&u), BellClopen::full());
        let disjoint = u.nodes();
        assert_eq!(disjoint, vec![node(&[1])]);
    }

    #[test]
    fn tail_bound_examples() {
        let b = v_tail_bound(0, 1);
        let partial: Rational = (1..=30).map(|l| rational::inv_factorial(l + 2)).sum();
        assert!(b >= partial);
        assert_eq!(v_tail_bound(0, 3), b * ratio(3, 1));
        let tiny = rational::parse("1/1000000000000000000").unwrap();
        assert!(v_tail_bound(20, 1) < tiny);
    }

    #[test]
    fn taylor_examples() {
        assert!(taylor_check(1, 4).holds);
        assert!(taylor_check(5, 16).holds);
        assert!(!taylor_check(10, 2).holds);
        let t = taylor_check(2, 7);
        assert!(t.lhs_lower <= t.lhs_upper);
    }

    #[test]
    fn v_side_examples() {
        let root = BellNode::root();
        assert!(matches!(decide_nonempty_v(&root, &[], &[]), VVerdict::Witness { .. }));
        let p = pi(&[&[0], &[1, 0]]);
        assert_eq!(decide_nonempty_v(&root, std::slice::from_ref(&p), std::slice::from_ref(&p)), VVerdict::Empty);
        let q = pi(&[&[0], &[1, 1], &[1, 0, 0]]);
        assert!(v_trunc(&q).measure() <= ratio(17, 24));
        let VVerdict::Witness { node: w } = decide_nonempty_v(&root, &[], std::slice::from_ref(&q)) else { panic!() };
        assert_eq!(w.len(), 3);
        assert!(v_residual(&root, &[], &[q]).contains_basic(&w));
    }

    #[test]
    fn c_side_examples() {
        let root = BellNode::root();
        assert!(matches!(decide_infinite_c(&root, &[], &[], 1000).unwrap(), CVerdict::InfiniteWitness { .. }));
        // rows (0) and (1) cover both depth-1 nodes
        let a = pi(&[&[0]]);
        let b = pi(&[&[1]]);
        assert_eq!(decide_infinite_c(&root, &[], &[a.clone(), b.clone()], 1000).unwrap(), CVerdict::Finite);
        let CVerdict::InfiniteWitness { prefix, .. } = decide_infinite_c(&root, std::slice::from_ref(&a), &[], 1000).unwrap() else {
            panic!()
        };
        assert!(prefix.extends(&node(&[0])));
        let r = iso_condition_check(&root, std::slice::from_ref(&a), std::slice::from_ref(&a), 1000).unwrap();
        assert!(r.consistent && r.sweep_agrees == Some(true));
        assert_eq!((r.c_side, r.v_side), (CVerdict::Finite, VVerdict::Empty));
        let r = iso_condition_check(&root, &[], &[pi(&[&[0], &[1, 2]])], 1000).unwrap();
        assert!(r.consistent && r.sweep_agrees == Some(true));
        assert!(matches!(r.v_side, VVerdict::Witness { .. }));
    }

    #[test]
    fn guard_trips() {
        let tall = PiPrefix::new((0..9).map(|n| BellNode::new(vec![0; n + 1]).unwrap()).collect()).unwrap();
        assert!(matches!(sweep(&BellNode::root(), &[tall], &[], 1000), Err(BellError::DepthGuard { .. })));
    }

    #[test]
    fn positivity_examples() {
        let sparse = PiPrefix::new((0..9).map(|n| BellNode::new(vec![1; n + 1]).unwrap()).collect()).unwrap();
        let r = strict_positivity_check(&BellNode::root(), &[sparse], 4).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.gap > Rational::zero());

        let covering = vec![pi(&[&[0], &[0, 0], &[0, 0, 0]]), pi(&[&[1], &[1, 0], &[1, 0, 0]])];
        assert!(matches!(
            strict_positivity_check(&BellNode::root(), &covering, 3),
            Err(BellError::Precondition(_))
        ));
        let inside = PiPrefix::new((0..6).map(|n| BellNode::new(vec![0; n + 1]).unwrap()).collect()).unwrap();
        assert!(matches!(
            strict_positivity_check(&node(&[0]), &[inside], 4),
            Err(BellError::HypothesisFailed(_))
        ));
    }

    #[test]
    fn ladder_bounds() {
        let ps = [pi(&[&[0], &[1, 1], &[1, 2, 3]]), pi(&[&[1], &[1, 0], &[0, 0, 0]])];
        for step in malo_ladder(&ps) {
            assert!(step.holds, "{step:?}");
        }
    }

    #[test]
    fn json_shapes() {
        let p: PiPrefix = serde_json::from_str(r#"{"rows": [[0],[1,0],[0,2,1]]}"#).unwrap();
        assert_eq!(p.height(), 2);
        assert!(serde_json::from_str::<PiPrefix>(r#"{"rows": [[0],[1]]}"#).is_err());
        assert!(serde_json::from_str::<BellNode>("[2]").is_err());
    }
}
