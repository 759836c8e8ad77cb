//! Slaloms, the countable set `Ω` and the algebra generated by the sets
//! `T_V` and `T_(S,n)`, taken modulo finite sets.
//!
//! A slalom assigns to each level `k` a proper subset of `{0,…,2^k−1}`; only
//! finitely supported slaloms are represented. A point `(T,m)` of `Ω` is a
//! slalom supported below `m`.
//!
//! * `(T,m) ∈ T_V` iff `V(k) ⊆ T(k)` for all `k < m`;
//! * `(T,m) ∈ T_(S,n)` iff `m ≥ n` and `T(k) = S(k)` for all `k < n`.
//!
//! The classes `W^δ_(S,n)` measure their tail from level `n` on (inclusive),
//! so that every level at or above `n` is controlled by the tail condition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::kelley::{self, FiniteFamily, KelleyError};
use crate::rational::{self, Rational};

pub type Level = u32;

/// Levels beyond this have more than `u64` many slots.
pub const MAX_LEVEL: Level = 63;
/// Largest height [`enum_omega`] will enumerate.
pub const MAX_ENUM_HEIGHT: u32 = 4;
/// Cap on the number of clauses [`normal_form`] may produce.
pub const MAX_CLAUSES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlalomError {
    #[error("level {level}: {reason}")]
    InvalidLevel { level: Level, reason: String },
    #[error("height {height} exceeds the enumeration bound {max}")]
    HeightTooLarge { height: u32, max: u32 },
    #[error("point ({slalom}, {n}) has support at or above its height")]
    InvalidPoint { slalom: Slalom, n: u32 },
    #[error("malformed conjunct: {0}")]
    MalformedConjunct(String),
    #[error("slalom {index} is not in the class: {reason}")]
    ClassMismatch { index: usize, reason: String },
    #[error("δ must lie strictly between 0 and 1, got {0}")]
    BadDelta(String),
    #[error("normal form exceeds {MAX_CLAUSES} clauses")]
    ExpressionTooLarge,
    #[error(transparent)]
    Kelley(#[from] KelleyError),
}

fn level_size(k: Level) -> u128 {
    1u128 << k
}

/// A finitely supported slalom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Slalom {
    levels: BTreeMap<Level, BTreeSet<u64>>,
}

impl Slalom {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates and drops empty levels.
    pub fn new(levels: BTreeMap<Level, BTreeSet<u64>>) -> Result<Self, SlalomError> {
        let mut out = BTreeMap::new();
        for (k, set) in levels {
            if set.is_empty() {
                continue;
            }
            let bad = |reason: String| SlalomError::InvalidLevel { level: k, reason };
            if k > MAX_LEVEL {
                return Err(bad(format!("levels above {MAX_LEVEL} are not supported")));
            }
            if let Some(&j) = set.iter().find(|&&j| j as u128 >= level_size(k)) {
                return Err(bad(format!("{j} is not below 2^{k}")));
            }
            if set.len() as u128 >= level_size(k) {
                return Err(bad(format!("{} slots fill the level", set.len())));
            }
            out.insert(k, set);
        }
        Ok(Self { levels: out })
    }

    pub fn from_levels(pairs: &[(Level, &[u64])]) -> Result<Self, SlalomError> {
        Self::new(pairs.iter().map(|(k, js)| (*k, js.iter().copied().collect())).collect())
    }

    /// The slalom `{k ↦ {j}}`.
    pub fn point(k: Level, j: u64) -> Result<Self, SlalomError> {
        Self::from_levels(&[(k, &[j])])
    }

    pub fn get(&self, k: Level) -> Option<&BTreeSet<u64>> {
        self.levels.get(&k)
    }

    pub fn level_len(&self, k: Level) -> usize {
        self.levels.get(&k).map_or(0, BTreeSet::len)
    }

    pub fn levels(&self) -> impl Iterator<Item = (Level, &BTreeSet<u64>)> {
        self.levels.iter().map(|(k, s)| (*k, s))
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// One past the highest present level (0 for the empty slalom).
    pub fn support_end(&self) -> u32 {
        self.levels.keys().next_back().map_or(0, |k| k + 1)
    }

    /// `S|n`: the levels below `n`.
    pub fn restrict(&self, n: u32) -> Self {
        Self { levels: self.levels.range(..n).map(|(k, s)| (*k, s.clone())).collect() }
    }

    /// The levels at or above `n`.
    pub fn tail_from(&self, n: u32) -> Self {
        Self { levels: self.levels.range(n..).map(|(k, s)| (*k, s.clone())).collect() }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.levels
            .iter()
            .all(|(k, s)| other.levels.get(k).is_some_and(|o| s.is_subset(o)))
    }

    /// `A ∪ B`, or the first level at which the union fills `2^k`.
    pub fn union(&self, other: &Self) -> Result<Self, Level> {
        let mut levels = self.levels.clone();
        for (k, s) in &other.levels {
            let e = levels.entry(*k).or_default();
            e.extend(s.iter().copied());
            if e.len() as u128 >= level_size(*k) {
                return Err(*k);
            }
        }
        Ok(Self { levels })
    }

    /// `Σ_k |S(k)|/2^k`.
    pub fn weight(&self) -> Rational {
        self.tail_weight(0)
    }

    /// `Σ_{k≥n} |S(k)|/2^k`.
    pub fn tail_weight(&self, n: u32) -> Rational {
        self.levels
            .range(n..)
            .map(|(k, s)| rational::ratio(s.len() as i64, 1) * rational::dyadic(*k))
            .sum()
    }
}

impl fmt::Display for Slalom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, s)) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let items: Vec<String> = s.iter().map(u64::to_string).collect();
            write!(f, "{k}↦{{{}}}", items.join(","))?;
        }
        f.write_str("}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlalomRepr {
    levels: BTreeMap<Level, Vec<u64>>,
}

impl Serialize for Slalom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SlalomRepr { levels: self.levels.iter().map(|(k, v)| (*k, v.iter().copied().collect())).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Slalom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = SlalomRepr::deserialize(d)?;
        let mut levels = BTreeMap::new();
        for (k, v) in r.levels {
            let set: BTreeSet<u64> = v.iter().copied().collect();
            if set.len() != v.len() {
                return Err(D::Error::custom(format!("level {k} lists a slot twice")));
            }
            levels.insert(k, set);
        }
        Slalom::new(levels).map_err(D::Error::custom)
    }
}

/// A point `(T, m)` of `Ω`, also used as the parameter of `T_(S,n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OmegaPoint {
    slalom: Slalom,
    n: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRepr {
    slalom: Slalom,
    n: u32,
}

impl<'de> Deserialize<'de> for OmegaPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PointRepr::deserialize(d)?;
        OmegaPoint::new(r.slalom, r.n).map_err(serde::de::Error::custom)
    }
}

impl OmegaPoint {
    pub fn new(slalom: Slalom, n: u32) -> Result<Self, SlalomError> {
        if slalom.support_end() > n {
            return Err(SlalomError::InvalidPoint { slalom, n });
        }
        Ok(Self { slalom, n })
    }

    /// `(∅, 0)`, whose `T_(∅,0)` is all of `Ω`.
    pub fn root() -> Self {
        Self { slalom: Slalom::empty(), n: 0 }
    }

    pub fn slalom(&self) -> &Slalom {
        &self.slalom
    }

    pub fn height(&self) -> u32 {
        self.n
    }
}

impl fmt::Display for OmegaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.slalom, self.n)
    }
}

/// Boolean combinations of the generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum GenExpr {
    Const(bool),
    /// `T_V`
    PosT(Slalom),
    /// `T_(S,n)`
    Height(OmegaPoint),
    And(Vec<GenExpr>),
    Or(Vec<GenExpr>),
    Not(Box<GenExpr>),
}

impl GenExpr {
    pub fn and(es: impl IntoIterator<Item = GenExpr>) -> Self {
        Self::And(es.into_iter().collect())
    }

    pub fn or(es: impl IntoIterator<Item = GenExpr>) -> Self {
        Self::Or(es.into_iter().collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: GenExpr) -> Self {
        Self::Not(Box::new(e))
    }
}

/// Membership by the defining formulas.
pub fn member(e: &GenExpr, p: &OmegaPoint) -> bool {
    match e {
        GenExpr::Const(b) => *b,
        GenExpr::PosT(v) => v.restrict(p.n).is_subset(&p.slalom),
        GenExpr::Height(q) => p.n >= q.n && p.slalom.restrict(q.n) == q.slalom,
        GenExpr::And(es) => es.iter().all(|e| member(e, p)),
        GenExpr::Or(es) => es.iter().any(|e| member(e, p)),
        GenExpr::Not(e) => !member(e, p),
    }
}

/// All slaloms supported below `n`, in a fixed order.
pub fn slaloms_below(n: u32) -> Result<Vec<Slalom>, SlalomError> {
    if n > MAX_ENUM_HEIGHT {
        return Err(SlalomError::HeightTooLarge { height: n, max: MAX_ENUM_HEIGHT });
    }
    let mut out = vec![Slalom::empty()];
    for k in 1..n {
        let slots = 1u32 << k;
        let full = (1u64 << slots) - 1;
        let mut next = Vec::with_capacity(out.len() * full as usize);
        for s in &out {
            for mask in 0..full {
                let mut t = s.clone();
                let set: BTreeSet<u64> = (0..slots as u64).filter(|j| mask >> j & 1 == 1).collect();
                if !set.is_empty() {
                    t.levels.insert(k, set);
                }
                next.push(t);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Every point `(T, n)` with `n ≤ h`.
pub fn enum_omega(h: u32) -> Result<Vec<OmegaPoint>, SlalomError> {
    if h > MAX_ENUM_HEIGHT {
        return Err(SlalomError::HeightTooLarge { height: h, max: MAX_ENUM_HEIGHT });
    }
    let mut out = Vec::new();
    for n in 0..=h {
        out.extend(slaloms_below(n)?.into_iter().map(|slalom| OmegaPoint { slalom, n }));
    }
    Ok(out)
}

/// Number of members of `e` at each height `0..=h`.
pub fn member_counts(e: &GenExpr, h: u32) -> Result<Vec<usize>, SlalomError> {
    let mut counts = vec![0; h as usize + 1];
    for p in enum_omega(h)? {
        if member(e, &p) {
            counts[p.n as usize] += 1;
        }
    }
    Ok(counts)
}

/// `T_(S,n)` as it appears inside a conjunct; validated when decided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightConstraint {
    pub slalom: Slalom,
    pub n: u32,
}

impl From<&OmegaPoint> for HeightConstraint {
    fn from(p: &OmegaPoint) -> Self {
        Self { slalom: p.slalom.clone(), n: p.n }
    }
}

/// `T_V ∩ T_(S,n) ∩ ⋂ T_{V_i}^c`. `finite` records that merging the atoms
/// already showed the conjunct to be finite.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Conjunct {
    pub height: Option<HeightConstraint>,
    pub positive: Option<Slalom>,
    pub negatives: Vec<Slalom>,
    #[serde(default)]
    pub finite: bool,
}

#[derive(Debug, Clone)]
enum Lit {
    Pos(Slalom),
    Neg(Slalom),
    Height(OmegaPoint),
}

type Dnf = Vec<Vec<Lit>>;

fn singleton_pos(k: Level, j: u64) -> Slalom {
    Slalom::point(k, j).expect("a single slot below 2^k for k ≥ 1")
}

fn dnf(e: &GenExpr, negated: bool) -> Result<Dnf, SlalomError> {
    let check = |d: Dnf| if d.len() > MAX_CLAUSES { Err(SlalomError::ExpressionTooLarge) } else { Ok(d) };
    match (e, negated) {
        (GenExpr::Const(b), _) => Ok(if *b != negated { vec![vec![]] } else { vec![] }),
        (GenExpr::PosT(v), false) => Ok(vec![vec![Lit::Pos(v.clone())]]),
        (GenExpr::PosT(v), true) => Ok(vec![vec![Lit::Neg(v.clone())]]),
        (GenExpr::Height(q), false) => Ok(vec![vec![Lit::Height(q.clone())]]),
        (GenExpr::Height(q), true) => {
            // modulo the finitely many points below height n, (T,m) leaves
            // T_(S,n) iff some level k < n has a slot of S(k) missing from
            // T(k) or a slot outside S(k) present in T(k)
            let mut out = Vec::new();
            for k in 1..q.n {
                let s = q.slalom.get(k);
                for j in 0..(1u64 << k) {
                    if s.is_some_and(|s| s.contains(&j)) {
                        out.push(vec![Lit::Neg(singleton_pos(k, j))]);
                    } else {
                        out.push(vec![Lit::Pos(singleton_pos(k, j))]);
                    }
                }
                if out.len() > MAX_CLAUSES {
                    return Err(SlalomError::ExpressionTooLarge);
                }
            }
            Ok(out)
        }
        (GenExpr::Not(inner), _) => dnf(inner, !negated),
        (GenExpr::And(es), false) | (GenExpr::Or(es), true) => {
            let mut acc: Dnf = vec![vec![]];
            for e in es {
                let d = dnf(e, negated)?;
                let mut next = Vec::with_capacity(acc.len() * d.len());
                for a in &acc {
                    for b in &d {
                        next.push(a.iter().chain(b).cloned().collect());
                    }
                }
                acc = check(next)?;
            }
            Ok(acc)
        }
        (GenExpr::Or(es), false) | (GenExpr::And(es), true) => {
            let mut acc = Vec::new();
            for e in es {
                acc.extend(dnf(e, negated)?);
            }
            check(acc)
        }
    }
}

fn merge_clause(lits: Vec<Lit>) -> Conjunct {
    let mut c = Conjunct::default();
    for lit in lits {
        match lit {
            Lit::Pos(v) => match &c.positive {
                None => c.positive = Some(v),
                Some(p) => match p.union(&v) {
                    Ok(u) => c.positive = Some(u),
                    Err(_) => c.finite = true,
                },
            },
            Lit::Neg(v) => c.negatives.push(v),
            Lit::Height(q) => {
                let q = HeightConstraint::from(&q);
                c.height = match c.height.take() {
                    None => Some(q),
                    Some(h) => {
                        let (lo, hi) = if h.n <= q.n { (h, q) } else { (q, h) };
                        if hi.slalom.restrict(lo.n) != lo.slalom {
                            c.finite = true;
                        }
                        Some(hi)
                    }
                }
            }
        }
    }
    c
}

/// Disjunctive normal form, equal to `e` modulo a finite subset of `Ω`.
/// Positive atoms of a conjunct are merged into one slalom and height atoms
/// into the highest one; conjuncts shown finite by the merge are kept and
/// marked.
pub fn normal_form(e: &GenExpr) -> Result<Vec<Conjunct>, SlalomError> {
    Ok(dnf(e, false)?.into_iter().map(merge_clause).collect())
}

/// Whether the conjunct denotes an infinite subset of `Ω`.
///
/// With height constraint `(S,n)` (default `(∅,0)`) and positive part `V`,
/// members at large heights exist iff `V|n ⊆ S`; the least such member above
/// level `n` is `V′ = S ∪ V|[n,∞)`, so the conjunct is infinite iff in addition
/// no negative `V_i` is contained in `V′`.
pub fn decide_infinite(c: &Conjunct) -> Result<bool, SlalomError> {
    let root = HeightConstraint { slalom: Slalom::empty(), n: 0 };
    let h = c.height.as_ref().unwrap_or(&root);
    if h.slalom.support_end() > h.n {
        return Err(SlalomError::MalformedConjunct(format!(
            "height constraint {} has levels at or above {}",
            h.slalom, h.n
        )));
    }
    if c.finite {
        return Ok(false);
    }
    let empty = Slalom::empty();
    let v = c.positive.as_ref().unwrap_or(&empty);
    if !v.restrict(h.n).is_subset(&h.slalom) {
        return Ok(false);
    }
    let least = h.slalom.union(&v.tail_from(h.n)).expect("levels are disjoint");
    Ok(c.negatives.iter().all(|n| !n.is_subset(&least)))
}

/// Whether `e` is infinite (equivalently nonzero in the quotient by finite
/// sets).
pub fn is_infinite(e: &GenExpr) -> Result<bool, SlalomError> {
    for c in normal_form(e)? {
        if decide_infinite(&c)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn check_delta(delta: &Rational) -> Result<(), SlalomError> {
    if *delta <= Rational::zero() || *delta >= Rational::one() {
        return Err(SlalomError::BadDelta(rational::to_string(delta)));
    }
    Ok(())
}

/// The class `W^δ_(S,n)` containing `W` with least `n`: the first `n` with
/// `Σ_{k≥n} |W(k)|/2^k < 1−δ`, and `S = W|n`.
pub fn w_delta_class(w: &Slalom, delta: &Rational) -> Result<OmegaPoint, SlalomError> {
    check_delta(delta)?;
    let limit = Rational::one() - delta;
    let n = (0..=w.support_end())
        .find(|&n| w.tail_weight(n) < limit)
        .expect("the tail past the support is 0");
    Ok(OmegaPoint { slalom: w.restrict(n), n })
}

/// Membership of `V` in `W^δ_(S,n)`.
pub fn class_test(v: &Slalom, class: &OmegaPoint, delta: &Rational) -> Result<(), String> {
    if v.restrict(class.n) != class.slalom {
        return Err(format!("{}|{} differs from {}", v, class.n, class.slalom));
    }
    let tail = v.tail_weight(class.n);
    if tail >= Rational::one() - delta {
        return Err(format!("tail weight {} is not below 1−δ", rational::to_string(&tail)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AwMeasure {
    #[serde(with = "rational::serde_str")]
    pub exact: Rational,
    #[serde(with = "rational::serde_str")]
    pub union_bound: Rational,
}

/// Product measure of `A_W = {f : f(k) ∉ W(k) for k ≥ n}`, where `f(k)` is
/// uniform on `2^k` independently per level, with the union lower bound.
pub fn a_w_measure(w: &Slalom, n: u32) -> AwMeasure {
    let exact = w
        .levels
        .range(n..)
        .map(|(k, s)| Rational::one() - rational::ratio(s.len() as i64, 1) * rational::dyadic(*k))
        .product();
    AwMeasure { exact, union_bound: Rational::one() - w.tail_weight(n) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cl2Witness {
    /// Indices whose `T_V` meet in an infinite set.
    pub indices: Vec<usize>,
    /// A level assignment avoiding every chosen `V_i` from level `n` on.
    pub escape: BTreeMap<Level, u64>,
    /// `Σ_i λ(A_{V_i})`, which exceeds `δ·k`.
    #[serde(with = "rational::serde_str")]
    pub expectation: Rational,
    pub bound_met: bool,
    pub infinite: bool,
}

/// Picks the escape `f` level by level, each time maximizing the
/// conditional expected number of `i` with `f ∈ A_{V_i}`; the survivors form
/// `I`, and `⋂_I T_{V_i} ∩ T_(S,n)` is certified infinite by
/// [`decide_infinite`].
pub fn cl2_witness(vs: &[Slalom], class: &OmegaPoint, delta: &Rational) -> Result<Cl2Witness, SlalomError> {
    check_delta(delta)?;
    for (index, v) in vs.iter().enumerate() {
        class_test(v, class, delta).map_err(|reason| SlalomError::ClassMismatch { index, reason })?;
    }
    let levels: Vec<Level> = vs
        .iter()
        .flat_map(|v| v.levels.range(class.n..).map(|(k, _)| *k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let survive = |v: &Slalom, k: Level| Rational::one() - rational::ratio(v.level_len(k) as i64, 1) * rational::dyadic(k);
    // suffix[i][p] = ∏_{q ≥ p} P(f(levels[q]) ∉ V_i(levels[q]))
    let suffix: Vec<Vec<Rational>> = vs
        .iter()
        .map(|v| {
            let mut s = vec![Rational::one(); levels.len() + 1];
            for p in (0..levels.len()).rev() {
                s[p] = &s[p + 1] * survive(v, levels[p]);
            }
            s
        })
        .collect();
    let expectation: Rational = suffix.iter().map(|s| s[0].clone()).sum();

    let mut alive = vec![true; vs.len()];
    let mut escape = BTreeMap::new();
    for (p, &k) in levels.iter().enumerate() {
        let used: BTreeSet<u64> = vs
            .iter()
            .zip(&alive)
            .filter(|(_, a)| **a)
            .filter_map(|(v, _)| v.get(k))
            .flatten()
            .copied()
            .collect();
        let free = (0..).take_while(|&j| (j as u128) < level_size(k)).find(|j| !used.contains(j));
        let choice = match free {
            Some(j) => j,
            None => {
                let score = |j: u64| -> Rational {
                    vs.iter()
                        .enumerate()
                        .filter(|(i, v)| alive[*i] && !v.get(k).is_some_and(|s| s.contains(&j)))
                        .map(|(i, _)| suffix[i][p + 1].clone())
                        .sum()
                };
                let mut best = (0u64, score(0));
                for &j in used.iter().skip(1) {
                    let s = score(j);
                    if s > best.1 {
                        best = (j, s);
                    }
                }
                best.0
            }
        };
        for (i, v) in vs.iter().enumerate() {
            if v.get(k).is_some_and(|s| s.contains(&choice)) {
                alive[i] = false;
            }
        }
        escape.insert(k, choice);
    }
    let indices: Vec<usize> = (0..vs.len()).filter(|&i| alive[i]).collect();
    let bound_met = rational::ratio(indices.len() as i64, 1) >= delta * rational::ratio(vs.len() as i64, 1);
    let infinite = intersection_infinite(vs, &indices, class)?;
    Ok(Cl2Witness { indices, escape, expectation, bound_met, infinite })
}

fn intersection_infinite(vs: &[Slalom], idx: &[usize], class: &OmegaPoint) -> Result<bool, SlalomError> {
    let mut c = Conjunct { height: Some(class.into()), ..Conjunct::default() };
    let mut acc = Slalom::empty();
    for &i in idx {
        match acc.union(&vs[i]) {
            Ok(u) => acc = u,
            Err(_) => c.finite = true,
        }
    }
    c.positive = Some(acc);
    decide_infinite(&c)
}

/// The intersection pattern of `{T_{V_i} ∩ T_(S,n)}` modulo finite, as a
/// family over one atom per maximal subfamily with infinite intersection.
pub fn class_atomization(vs: &[Slalom], class: &OmegaPoint, guard: u64) -> Result<FiniteFamily, SlalomError> {
    let mut err = None;
    let fam = kelley::atomize(
        vs.len(),
        |idx| match intersection_infinite(vs, idx, class) {
            Ok(b) => b,
            Err(e) => {
                err = Some(e);
                false
            }
        },
        guard,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(fam),
    }
}

/// `f(0), …, f(L)` with `f(n) ∉ W_n(n)` for the listed `W_1, …, W_len`
/// (least escaping slot), and `f(n) = 0` elsewhere; `L = max(h, len)`.
pub fn diagonal_escape(wns: &[Slalom], h: u32) -> Vec<u64> {
    let top = (h as usize).max(wns.len());
    (0..=top)
        .map(|n| match n.checked_sub(1).and_then(|i| wns.get(i)) {
            Some(w) => {
                let level = w.get(n as Level);
                (0..).find(|j| !level.is_some_and(|s| s.contains(j))).expect("level is not full")
            }
            None => 0,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn sl(pairs: &[(Level, &[u64])]) -> Slalom {
        Slalom::from_levels(pairs).unwrap()
    }

    fn pt(pairs: &[(Level, &[u64])], n: u32) -> OmegaPoint {
        OmegaPoint::new(sl(pairs), n).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Slalom::from_levels(&[(0, &[0])]).is_err());
        assert!(Slalom::from_levels(&[(1, &[0, 1])]).is_err());
        assert!(Slalom::from_levels(&[(2, &[4])]).is_err());
        assert!(Slalom::from_levels(&[(2, &[0, 1, 2])]).is_ok());
        assert!(OmegaPoint::new(sl(&[(2, &[0])]), 2).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(sl(&[(1, &[0])]).weight(), ratio(1, 2));
        assert_eq!(sl(&[(1, &[0]), (2, &[1, 2])]).weight(), ratio(1, 1));
        assert_eq!(Slalom::empty().weight(), ratio(0, 1));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enum_omega(1).unwrap().len(), 2);
        assert_eq!(enum_omega(2).unwrap().len(), 5);
        assert_eq!(enum_omega(3).unwrap().len(), 5 + 45);
        assert_eq!(slaloms_below(4).unwrap().len(), 3 * 15 * 255);
        assert!(matches!(enum_omega(5), Err(SlalomError::HeightTooLarge { .. })));
    }

    #[test]
    fn membership_examples() {
        let any = pt(&[(1, &[1])], 3);
        assert!(member(&GenExpr::PosT(Slalom::empty()), &any));
        assert!(member(&GenExpr::PosT(sl(&[(1, &[0])])), &pt(&[], 1)));
        assert!(!member(&GenExpr::PosT(sl(&[(1, &[0])])), &pt(&[], 2)));
        assert!(!member(&GenExpr::Height(pt(&[], 2)), &pt(&[], 1)));
        assert!(member(&GenExpr::Height(pt(&[(1, &[1])], 2)), &any));
    }

    #[test]
    fn normal_form_examples() {
        let a = sl(&[(1, &[0])]);
        let b = sl(&[(2, &[3])]);
        let nf = normal_form(&GenExpr::and([GenExpr::PosT(a.clone()), GenExpr::PosT(b.clone())])).unwrap();
        assert_eq!(nf.len(), 1);
        assert_eq!(nf[0].positive, Some(a.union(&b).unwrap()));
        assert!(!nf[0].finite);

        let c = sl(&[(1, &[1])]);
        let nf = normal_form(&GenExpr::and([GenExpr::PosT(a.clone()), GenExpr::PosT(c)])).unwrap();
        assert!(nf[0].finite);

        let e = GenExpr::and([GenExpr::Height(pt(&[(1, &[0])], 2)), GenExpr::Height(pt(&[(1, &[1])], 3))]);
        let nf = normal_form(&e).unwrap();
        assert!(nf[0].finite);
        assert_eq!(member_counts(&e, 3).unwrap(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn decide_examples() {
        let only_v = Conjunct { positive: Some(sl(&[(3, &[1, 5])])), ..Conjunct::default() };
        assert!(decide_infinite(&only_v).unwrap());

        let self_cancel = Conjunct { positive: Some(Slalom::empty()), negatives: vec![Slalom::empty()], ..Conjunct::default() };
        assert!(!decide_infinite(&self_cancel).unwrap());

        let c = Conjunct {
            positive: Some(sl(&[(2, &[0])])),
            negatives: vec![sl(&[(2, &[1])])],
            ..Conjunct::default()
        };
        assert!(decide_infinite(&c).unwrap());
        let e = GenExpr::and([GenExpr::PosT(sl(&[(2, &[0])])), GenExpr::not(GenExpr::PosT(sl(&[(2, &[1])])))]);
        let counts = member_counts(&e, 4).unwrap();
        assert!(counts[3] > 0 && counts[4] > counts[3]);

        let bad = Conjunct {
            height: Some(HeightConstraint { slalom: sl(&[(2, &[0])]), n: 1 }),
            ..Conjunct::default()
        };
        assert!(matches!(decide_infinite(&bad), Err(SlalomError::MalformedConjunct(_))));
    }

    #[test]
    fn negated_height_is_finite_difference() {
        let q = pt(&[(1, &[0]), (2, &[1, 3])], 3);
        let e = GenExpr::not(GenExpr::Height(q.clone()));
        let nf = normal_form(&e).unwrap();
        for p in enum_omega(4).unwrap().iter().filter(|p| p.height() >= 3) {
            let by_nf = nf.iter().any(|c| {
                c.negatives.iter().all(|v| !member(&GenExpr::PosT(v.clone()), p))
                    && c.positive.as_ref().is_none_or(|v| member(&GenExpr::PosT(v.clone()), p))
            });
            assert_eq!(by_nf, member(&e, p), "{p}");
        }
    }

    #[test]
    fn w_delta_examples() {
        let w = sl(&[(1, &[0])]);
        assert_eq!(w_delta_class(&w, &ratio(1, 4)).unwrap(), OmegaPoint::root());
        assert_eq!(w_delta_class(&Slalom::empty(), &ratio(1, 2)).unwrap(), OmegaPoint::root());
        // tails from 0, 1, 2, 3: 1, 1, 1/2, 0
        let w = sl(&[(1, &[0]), (2, &[1, 2])]);
        let class = w_delta_class(&w, &ratio(3, 4)).unwrap();
        assert_eq!(class, OmegaPoint::new(w.clone(), 3).unwrap());
        assert!(w_delta_class(&w, &ratio(1, 1)).is_err());
    }

    #[test]
    fn a_w_examples() {
        let w = sl(&[(1, &[0]), (2, &[0])]);
        let m = a_w_measure(&w, 0);
        assert_eq!((m.exact.clone(), m.union_bound.clone()), (ratio(3, 8), ratio(1, 4)));
        // brute force over f(1) ∈ 2, f(2) ∈ 4
        let hits = (0..2).flat_map(|a| (0..4).map(move |b| (a, b))).filter(|&(a, b)| a != 0 && b != 0).count();
        assert_eq!(m.exact, ratio(hits as i64, 8));
        assert_eq!(a_w_measure(&w, 3).exact, ratio(1, 1));
        assert_eq!(a_w_measure(&sl(&[(3, &[5])]), 0).exact, ratio(7, 8));
    }

    #[test]
    fn cl2_examples() {
        let class = OmegaPoint::root();
        let v = sl(&[(2, &[1])]);
        let w = cl2_witness(&[v.clone(), v.clone()], &class, &ratio(1, 2)).unwrap();
        assert_eq!(w.indices, vec![0, 1]);
        assert!(w.infinite && w.bound_met);

        let a = sl(&[(2, &[1])]);
        let b = sl(&[(3, &[2])]);
        let w = cl2_witness(&[a, b], &class, &ratio(1, 2)).unwrap();
        assert_eq!(w.indices, vec![0, 1]);
        assert!(w.infinite);

        // two slaloms filling level 1 between them are in no common class
        // with δ ≥ 1/2, but at δ = 1/4 only one of them survives
        let c = sl(&[(1, &[0])]);
        let d = sl(&[(1, &[1])]);
        let w = cl2_witness(&[c.clone(), d.clone()], &class, &ratio(1, 4)).unwrap();
        assert_eq!(w.indices.len(), 1);
        assert!(w.bound_met && w.infinite);
        assert!(matches!(cl2_witness(&[c, d], &class, &ratio(1, 2)), Err(SlalomError::ClassMismatch { .. })));
    }

    #[test]
    fn diagonal_examples() {
        assert_eq!(diagonal_escape(&[sl(&[(1, &[0])])], 1), vec![0, 1]);
        assert_eq!(diagonal_escape(&[], 3), vec![0, 0, 0, 0]);
        let ws: Vec<Slalom> = (1..=4u32)
            .map(|n| Slalom::new(BTreeMap::from([(n, (1..1u64 << n).collect())])).unwrap())
            .collect();
        assert_eq!(diagonal_escape(&ws, 4), vec![0; 5]);
    }

    #[test]
    fn json_shapes() {
        let s: Slalom = serde_json::from_str(r#"{"levels": {"1": [0], "3": [2,5]}}"#).unwrap();
        assert_eq!(s, sl(&[(1, &[0]), (3, &[2, 5])]));
        assert!(serde_json::from_str::<Slalom>(r#"{"levels": {"1": [0, 1]}}"#).is_err());
        let e: GenExpr = serde_json::from_str(
            r#"{"and": [{"posT": {"levels": {"2": [1]}}}, {"not": {"height": {"slalom": {"levels": {}}, "n": 2}}}]}"#,
        )
        .unwrap();
        assert!(matches!(e, GenExpr::And(ref v) if v.len() == 2));
        let back: GenExpr = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back, e);
    }
}
