//! Finite fragments of the almost-disjoint-family construction over `2^ω`.
//!
//! Each label `α` carries finitely many point prefixes `t_0, t_1, …` and a
//! prefix `m_0 < m_1 < …` of an infinite set `B_α`. Block `i` of `α` restricts
//! `t_i` to the `i+1` coordinates `m_j` with `j ∈ [i(i+1)/2, (i+1)(i+2)/2)`;
//! `U_α` is the union of the blocks and `F_α` its complement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{ClopenSet, Coord, PartialAssignment};
use crate::rational::{self, Rational};

/// Largest block index any operation will build.
pub const MAX_BLOCK_INDEX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("insufficient prefix: {0}")]
    InsufficientPrefix(String),
    #[error("malformed scenario: {0}")]
    MalformedScenario(String),
    #[error("block index {index} exceeds the cap {cap}")]
    BlockIndexTooLarge { index: usize, cap: usize },
    #[error("the truncated core is empty")]
    EmptyCore,
}

/// A finite prefix of a point of `2^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointPrefix(Vec<bool>);

impl PointPrefix {
    pub fn new(bits: Vec<bool>) -> Result<Self, AdError> {
        if bits.is_empty() {
            return Err(AdError::MalformedScenario("empty point prefix".into()));
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, coord: Coord) -> Option<bool> {
        self.0.get(coord as usize).copied()
    }
}

impl std::str::FromStr for PointPrefix {
    type Err = AdError;

    fn from_str(s: &str) -> Result<Self, AdError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(AdError::MalformedScenario(format!("bad bit {other:?} in point prefix"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for PointPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for PointPrefix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PointPrefix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Strictly increasing prefix `m_0 < m_1 < …` of `B_α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct AdPrefix(Vec<Coord>);

impl AdPrefix {
    pub fn new(elems: Vec<Coord>) -> Result<Self, AdError> {
        if elems.is_empty() {
            return Err(AdError::MalformedScenario("empty AD prefix".into()));
        }
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AdError::MalformedScenario("AD prefix must increase strictly".into()));
        }
        Ok(Self(elems))
    }

    pub fn elems(&self) -> &[Coord] {
        &self.0
    }

    pub fn last(&self) -> Coord {
        *self.0.last().expect("nonempty")
    }
}

impl<'de> Deserialize<'de> for AdPrefix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        AdPrefix::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Point prefixes and AD prefixes per label, with a bound below which all
/// pairwise intersections of the full sets `B_α` lie.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    points: BTreeMap<String, Vec<PointPrefix>>,
    family: BTreeMap<String, AdPrefix>,
    ad_bound: Coord,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioRepr {
    points: BTreeMap<String, Vec<PointPrefix>>,
    family: BTreeMap<String, AdPrefix>,
    ad_bound: Coord,
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ScenarioRepr::deserialize(d)?;
        Scenario::new(r.points, r.family, r.ad_bound).map_err(serde::de::Error::custom)
    }
}

fn block_range(i: usize) -> std::ops::Range<usize> {
    i * (i + 1) / 2..(i + 1) * (i + 2) / 2
}

impl Scenario {
    /// Checks the almost-disjointness certificate on the known prefixes.
    pub fn new(
        points: BTreeMap<String, Vec<PointPrefix>>,
        family: BTreeMap<String, AdPrefix>,
        ad_bound: Coord,
    ) -> Result<Self, AdError> {
        let labels: Vec<&String> = family.keys().collect();
        for (i, a) in labels.iter().enumerate() {
            let sa: BTreeSet<Coord> = family[*a].elems().iter().copied().collect();
            for b in &labels[i + 1..] {
                if let Some(x) = family[*b].elems().iter().find(|x| sa.contains(x) && **x >= ad_bound) {
                    return Err(AdError::MalformedScenario(format!(
                        "B_{a} and B_{b} share {x}, not below the AD bound {ad_bound}"
                    )));
                }
            }
        }
        if let Some(label) = points.keys().find(|l| !family.contains_key(*l)) {
            return Err(AdError::MalformedScenario(format!("points given for unknown label {label:?}")));
        }
        Ok(Self { points, family, ad_bound })
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.family.keys().map(String::as_str)
    }

    pub fn ad_bound(&self) -> Coord {
        self.ad_bound
    }

    pub fn family(&self, alpha: &str) -> Result<&AdPrefix, AdError> {
        self.family.get(alpha).ok_or_else(|| AdError::UnknownLabel(alpha.to_string()))
    }

    pub fn points(&self, alpha: &str) -> &[PointPrefix] {
        self.points.get(alpha).map_or(&[], Vec::as_slice)
    }

    /// Coordinates of block `i` of `α`, if the AD prefix is long enough.
    pub fn block_coords(&self, alpha: &str, i: usize) -> Result<&[Coord], AdError> {
        let b = self.family(alpha)?;
        let range = block_range(i);
        b.elems().get(range.clone()).ok_or_else(|| {
            AdError::InsufficientPrefix(format!(
                "B_{alpha} has {} elements, block {i} needs indices up to {}",
                b.elems().len(),
                range.end - 1
            ))
        })
    }

    /// Number of leading blocks whose coordinates and points are all available.
    pub fn available_blocks(&self, alpha: &str) -> usize {
        (0..=MAX_BLOCK_INDEX)
            .take_while(|&i| build_block(self, alpha, i).is_ok())
            .count()
    }
}

/// Blocks `φ_0, …, φ_upto` of one label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockFamily {
    pub alpha: String,
    pub blocks: Vec<PartialAssignment>,
}

impl BlockFamily {
    /// `C_i`, the coordinates block `i` depends on.
    pub fn support(&self, i: usize) -> BTreeSet<Coord> {
        self.blocks[i].domain()
    }

    pub fn union_upto(&self, n: usize) -> ClopenSet {
        ClopenSet::from_cylinders(&self.blocks[..=n])
    }
}

fn build_block(s: &Scenario, alpha: &str, i: usize) -> Result<PartialAssignment, AdError> {
    if i > MAX_BLOCK_INDEX {
        return Err(AdError::BlockIndexTooLarge { index: i, cap: MAX_BLOCK_INDEX });
    }
    let coords = s.block_coords(alpha, i)?;
    let point = s.points(alpha).get(i).ok_or_else(|| {
        AdError::InsufficientPrefix(format!("no point t_{i} for label {alpha}"))
    })?;
    coords
        .iter()
        .map(|&c| {
            point.bit(c).map(|b| (c, b)).ok_or_else(|| {
                AdError::InsufficientPrefix(format!(
                    "t_{i} of {alpha} has length {}, block {i} reads coordinate {c}",
                    point.len()
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(PartialAssignment::from_pairs)
}

/// `φ_0^α, …, φ_upto^α`.
pub fn build_blocks(s: &Scenario, alpha: &str, upto: usize) -> Result<BlockFamily, AdError> {
    let blocks = (0..=upto).map(|i| build_block(s, alpha, i)).collect::<Result<_, _>>()?;
    Ok(BlockFamily { alpha: alpha.to_string(), blocks })
}

/// `⋃_{i≤n} [φ_i^α]`.
pub fn u_trunc(s: &Scenario, alpha: &str, n: usize) -> Result<ClopenSet, AdError> {
    Ok(build_blocks(s, alpha, n)?.union_upto(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainsReport {
    pub alpha: String,
    pub n: usize,
    pub checked: Vec<Coord>,
    pub offending: Option<Coord>,
    pub passed: bool,
}

/// Checks that block `n` agrees with `t_n` on its whole domain, so that
/// `[φ_n]` is a neighbourhood of every extension of `t_n`.
pub fn verify_block_agreement(
    alpha: &str,
    n: usize,
    block: &PartialAssignment,
    point: &PointPrefix,
) -> Result<ContainsReport, AdError> {
    let mut checked = Vec::new();
    for (c, b) in block.iter() {
        let bit = point.bit(c).ok_or_else(|| {
            AdError::InsufficientPrefix(format!("t_{n} of {alpha} does not reach coordinate {c}"))
        })?;
        if bit != b {
            return Ok(ContainsReport { alpha: alpha.into(), n, checked, offending: Some(c), passed: false });
        }
        checked.push(c);
    }
    Ok(ContainsReport { alpha: alpha.into(), n, checked, offending: None, passed: true })
}

pub fn contains_check(s: &Scenario, alpha: &str, n: usize) -> Result<ContainsReport, AdError> {
    let block = build_block(s, alpha, n)?;
    verify_block_agreement(alpha, n, &block, &s.points(alpha)[n])
}

/// Outcome of the disjointness test at one candidate `N`.
enum Clearance {
    Clear,
    Blocked,
    Unknown(String),
}

/// Whether every coordinate of every block `i > n` of every `α_j` avoids
/// `dom(τ)` and every other `B_{α_j'}`, using the AD bound for the parts of
/// the sets beyond their known prefixes.
fn later_blocks_clear(s: &Scenario, alphas: &[&str], tau: &BTreeSet<Coord>, n: usize) -> Result<Clearance, AdError> {
    let bound = s.ad_bound();
    let tau_max = tau.iter().next_back().copied();
    let start = block_range(n + 1).start;
    for (j, a) in alphas.iter().enumerate() {
        let b = s.family(a)?;
        let others: Vec<&AdPrefix> = alphas
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, o)| s.family(o))
            .collect::<Result<_, _>>()?;
        for &x in b.elems().iter().skip(start) {
            if tau.contains(&x) {
                return Ok(Clearance::Blocked);
            }
            if x >= bound {
                continue;
            }
            for o in &others {
                if o.elems().contains(&x) {
                    return Ok(Clearance::Blocked);
                }
                if o.last() < x {
                    return Ok(Clearance::Unknown(format!(
                        "cannot tell from the prefixes whether {x} lies in another set"
                    )));
                }
            }
        }
        // elements of B_α beyond the known prefix exceed its last element
        let tail = b.last();
        if tau_max.is_some_and(|t| t > tail) {
            return Ok(Clearance::Unknown(format!("unread elements of B_{a} may meet dom(τ)")));
        }
        if tail + 1 < bound {
            for o in &others {
                if o.last() + 1 < bound || o.elems().iter().any(|&y| y > tail && y < bound) {
                    return Ok(Clearance::Unknown(format!(
                        "unread elements of B_{a} below the AD bound may meet another set"
                    )));
                }
            }
        }
    }
    Ok(Clearance::Clear)
}

/// Least `N` such that `{I_N} ∪ {C_i^{α_j} : i > N}` is pairwise disjoint,
/// where `I_N = dom(τ) ∪ ⋃_j ⋃_{i≤N} C_i^{α_j}`.
pub fn find_n(s: &Scenario, alphas: &[&str], tau: &PartialAssignment) -> Result<usize, AdError> {
    let dom = tau.domain();
    let longest = alphas
        .iter()
        .map(|a| s.family(a).map(|b| b.elems().len()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let mut last_reason = String::from("no candidate N");
    for n in 0.. {
        match later_blocks_clear(s, alphas, &dom, n)? {
            Clearance::Clear => return Ok(n),
            Clearance::Blocked => last_reason = format!("blocks after {n} still overlap"),
            Clearance::Unknown(why) => last_reason = why,
        }
        if block_range(n + 1).start >= longest {
            break;
        }
    }
    Err(AdError::InsufficientPrefix(last_reason))
}

/// `[τ] ∖ ⋃_j ⋃_{i≤n} [φ_i^{α_j}]`.
pub fn residual(s: &Scenario, alphas: &[&str], tau: &PartialAssignment, n: usize) -> Result<ClopenSet, AdError> {
    let mut covered = ClopenSet::empty();
    for a in alphas {
        covered = covered.union(&u_trunc(s, a, n)?);
    }
    Ok(ClopenSet::cylinder(tau).difference(&covered))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositiveBound {
    pub n: usize,
    pub m: usize,
    #[serde(with = "rational::serde_str")]
    pub core_measure: Rational,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
}

/// `λ(X_N)·(1 − 2^{-(N+1)})^m` with `N` from [`find_n`]; every deeper
/// residual has measure at least this bound.
pub fn positive_lower_bound(s: &Scenario, alphas: &[&str], tau: &PartialAssignment) -> Result<PositiveBound, AdError> {
    let n = find_n(s, alphas, tau)?;
    let core = residual(s, alphas, tau, n)?;
    if core.is_empty() {
        return Err(AdError::EmptyCore);
    }
    let core_measure = core.measure();
    let factor = Rational::one() - rational::dyadic(n as u32 + 1);
    let m = alphas.len();
    let bound = (0..m).fold(core_measure.clone(), |acc, _| acc * &factor);
    Ok(PositiveBound { n, m, core_measure, bound })
}

/// Lower bound for a general clopen `U`: the sum of the per-cylinder bounds
/// over the canonical disjoint cylinders whose core is nonempty.
pub fn positive_lower_bound_clopen(s: &Scenario, alphas: &[&str], u: &ClopenSet) -> Result<Rational, AdError> {
    let mut total = Rational::zero();
    let mut any = false;
    for tau in u.cylinders() {
        match positive_lower_bound(s, alphas, &tau) {
            Ok(b) => {
                total += b.bound;
                any = true;
            }
            Err(AdError::EmptyCore) => {}
            Err(e) => return Err(e),
        }
    }
    if any {
        Ok(total)
    } else {
        Err(AdError::EmptyCore)
    }
}

/// One reduction step: `U_β` was dropped because block `k` of `β` depends on
/// coordinates disjoint from everything else.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StripStep {
    pub beta: String,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Emptiness {
    Empty,
    Nonempty { witness: PartialAssignment },
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmptinessOutcome {
    pub result: Emptiness,
    pub steps: Vec<StripStep>,
}

/// Decides whether `C ∩ ⋂ U_{β_i} ∩ ⋂ F_{α_j}` is empty, every `U` truncated
/// at block `depth`. Positive occurrences are stripped one at a time (last
/// first): if block `K` of `β` avoids all coordinates the rest depends on, the
/// expression is empty iff the rest is. The remaining `C ∩ ⋂ F_{α_j}` is
/// empty iff `C` is covered by the truncated `U_{α_j}`.
pub fn emptiness_decide(
    c: &ClopenSet,
    betas: &[&str],
    alphas: &[&str],
    s: &Scenario,
    depth: usize,
) -> EmptinessOutcome {
    let mut steps = Vec::new();
    let unknown = |reason: String, steps| EmptinessOutcome { result: Emptiness::Unknown { reason }, steps };

    let mut families: BTreeMap<&str, BlockFamily> = BTreeMap::new();
    for a in betas.iter().chain(alphas) {
        if families.contains_key(a) {
            continue;
        }
        match build_blocks(s, a, depth) {
            Ok(f) => {
                families.insert(a, f);
            }
            Err(e) => return unknown(e.to_string(), steps),
        }
    }
    let deps = |label: &str| -> BTreeSet<Coord> {
        families[label].blocks.iter().flat_map(|b| b.domain()).collect()
    };

    let mut positives: Vec<&str> = Vec::new();
    for b in betas {
        if !positives.contains(b) {
            positives.push(b);
        }
    }
    let mut stripped: Vec<PartialAssignment> = Vec::new();
    while let Some(beta) = positives.pop() {
        let mut rest: BTreeSet<Coord> = c.syntactic_support();
        for label in positives.iter().chain(alphas) {
            rest.extend(deps(label));
        }
        let found = families[beta]
            .blocks
            .iter()
            .position(|blk| blk.domain().is_disjoint(&rest));
        match found {
            Some(k) => {
                steps.push(StripStep { beta: beta.to_string(), k });
                stripped.push(families[beta].blocks[k].clone());
            }
            None => {
                return unknown(format!("no block of {beta} up to {depth} avoids the other coordinates"), steps);
            }
        }
    }

    let mut covered = ClopenSet::empty();
    for a in alphas {
        covered = covered.union(&families[a].union_upto(depth));
    }
    let base = c.difference(&covered);
    let Some(mut witness) = base.witness() else {
        return EmptinessOutcome { result: Emptiness::Empty, steps };
    };
    for phi in stripped.iter().rev() {
        witness = witness.merge(phi).expect("stripped blocks avoid the rest");
    }
    EmptinessOutcome { result: Emptiness::Nonempty { witness }, steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn pp(s: &str) -> PointPrefix {
        s.parse().unwrap()
    }

    fn scenario(entries: &[(&str, &[&str], &[Coord])], ad_bound: Coord) -> Scenario {
        let points = entries
            .iter()
            .map(|(a, ps, _)| (a.to_string(), ps.iter().map(|p| pp(p)).collect()))
            .collect();
        let family = entries
            .iter()
            .map(|(a, _, b)| (a.to_string(), AdPrefix::new(b.to_vec()).unwrap()))
            .collect();
        Scenario::new(points, family, ad_bound).unwrap()
    }

    fn ones(n: usize) -> String {
        "1".repeat(n)
    }

    #[test]
    fn triangular_blocks() {
        let p = ones(40);
        let s = scenario(&[("a", &[&p, &p, &p], &[3, 5, 9, 10, 14, 20, 21])], 0);
        let f = build_blocks(&s, "a", 2).unwrap();
        assert_eq!(f.blocks[0], PartialAssignment::from_bits([(3, 1)]));
        assert_eq!(f.support(1), BTreeSet::from([5, 9]));
        assert_eq!(f.support(2), BTreeSet::from([10, 14, 20]));
        for i in 0..=2 {
            assert_eq!(f.blocks[i].len(), i + 1);
            assert!(f.support(i).iter().all(|&c| c as usize >= i));
        }
    }

    #[test]
    fn insufficient_prefix_names_the_datum() {
        let s = scenario(&[("a", &["1111"], &[3, 5, 9])], 0);
        match build_blocks(&s, "a", 1).unwrap_err() {
            AdError::InsufficientPrefix(msg) => assert!(msg.contains("t_1"), "{msg}"),
            e => panic!("{e}"),
        }
        let s = scenario(&[("a", &["11", "1111111111"], &[3, 5, 9])], 0);
        match build_blocks(&s, "a", 0).unwrap_err() {
            AdError::InsufficientPrefix(msg) => assert!(msg.contains("coordinate 3"), "{msg}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn u_trunc_measures() {
        // t_0 = 1 at coordinate 0; t_1 = 1,1 at coordinates 1,2
        let s = scenario(&[("a", &["111111", "111111", "111111"], &[0, 1, 2, 3, 4, 5])], 0);
        assert_eq!(u_trunc(&s, "a", 0).unwrap().measure(), ratio(1, 2));
        assert_eq!(u_trunc(&s, "a", 1).unwrap().measure(), ratio(5, 8));
        let m2 = u_trunc(&s, "a", 2).unwrap().measure();
        assert!(m2 <= ratio(7, 8));
        // brute force over the 6 block coordinates
        let u = u_trunc(&s, "a", 2).unwrap();
        let hits = (0u32..64).filter(|x| u.contains(|c| (x >> c) & 1 == 1)).count();
        assert_eq!(m2, ratio(hits as i64, 64));
    }

    #[test]
    fn contains_check_and_fault_injection() {
        let s = scenario(&[("a", &["0101010101", "1100110011"], &[1, 4, 6])], 0);
        assert!(contains_check(&s, "a", 1).unwrap().passed);
        let mut fam = build_blocks(&s, "a", 1).unwrap();
        fam.blocks[1].insert(6, true);
        let r = verify_block_agreement("a", 1, &fam.blocks[1], &s.points("a")[1]).unwrap();
        assert_eq!((r.passed, r.offending), (false, Some(6)));
        assert!(matches!(contains_check(&s, "a", 2), Err(AdError::InsufficientPrefix(_))));
    }

    #[test]
    fn find_n_examples() {
        let p = ones(80);
        let ps: Vec<&str> = vec![&p; 6];
        let s = scenario(
            &[("a", &ps, &[1, 4, 10, 12, 14, 16, 18, 20]), ("b", &ps, &[2, 4, 11, 13, 15, 17, 19, 21])],
            5,
        );
        let tau = PartialAssignment::from_bits([(0, 1)]);
        // block 1 of each label holds 4; blocks from 2 on start at index 3
        assert_eq!(find_n(&s, &["a", "b"], &tau).unwrap(), 1);
        assert_eq!(find_n(&s, &["a"], &PartialAssignment::new()).unwrap(), 0);
        let short = scenario(&[("a", &ps, &[1, 4]), ("b", &ps, &[2, 4])], 50);
        assert!(matches!(find_n(&short, &["a", "b"], &tau), Err(AdError::InsufficientPrefix(_))));
    }

    #[test]
    fn positive_bound_single_label() {
        let p = ones(40);
        let s = scenario(&[("a", &[&p, &p, &p, &p], &(0..10).collect::<Vec<_>>())], 0);
        let b = positive_lower_bound(&s, &["a"], &PartialAssignment::new()).unwrap();
        assert_eq!((b.n, b.core_measure.clone(), b.bound.clone()), (0, ratio(1, 2), ratio(1, 4)));
        for n in 0..=3 {
            let r = residual(&s, &["a"], &PartialAssignment::new(), n).unwrap();
            assert!(r.measure() >= b.bound);
        }
    }

    #[test]
    fn empty_core_detected() {
        let p = ones(40);
        let s = scenario(&[("a", &[&p, &p], &[0, 1, 2])], 0);
        let tau = PartialAssignment::from_bits([(0, 1)]);
        assert_eq!(positive_lower_bound(&s, &["a"], &tau).unwrap_err(), AdError::EmptyCore);
    }

    #[test]
    fn emptiness_examples() {
        let p = ones(40);
        let ps: Vec<&str> = vec![&p; 4];
        let s = scenario(&[("b", &ps, &(0..10).collect::<Vec<_>>()), ("a", &ps, &(20..30).collect::<Vec<_>>())], 0);
        let c = u_trunc(&s, "b", 0).unwrap();
        let out = emptiness_decide(&c, &["b"], &[], &s, 2);
        let Emptiness::Nonempty { witness } = out.result else { panic!("{:?}", out.result) };
        assert!(ClopenSet::cylinder(&witness).is_subset(&c));

        let c = u_trunc(&s, "a", 1).unwrap();
        assert_eq!(emptiness_decide(&c, &[], &["a"], &s, 1).result, Emptiness::Empty);

        // b's blocks all live on coordinates the rest depends on
        let c = ClopenSet::cylinder(&PartialAssignment::from_bits([(0, 1), (1, 1), (2, 1)]));
        let out = emptiness_decide(&c, &["b"], &["b"], &s, 1);
        assert!(matches!(out.result, Emptiness::Unknown { .. }));
    }

    #[test]
    fn scenario_json() {
        let js = r#"{"points": {"a1": ["0110"]}, "family": {"a1": [1, 2]}, "ad_bound": 3}"#;
        let s: Scenario = serde_json::from_str(js).unwrap();
        assert_eq!(s.family("a1").unwrap().elems(), &[1, 2]);
        let bad = r#"{"points": {}, "family": {"a": [1, 9], "b": [9]}, "ad_bound": 3}"#;
        assert!(serde_json::from_str::<Scenario>(bad).is_err());
        let bad = r#"{"points": {}, "family": {"a": [3, 1]}, "ad_bound": 3}"#;
        assert!(serde_json::from_str::<Scenario>(bad).is_err());
    }
}
