//! Intersection numbers of finite set families.
//!
//! `κ(s)` of a sequence is the largest fraction of its terms with a common
//! point; `κ(𝒜)` is the infimum over all sequences. For a family presented
//! over finitely many atoms the infimum is the value of a small linear
//! program, which [`kappa_lp`] solves exactly and certifies from both sides.

pub mod simplex;

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Default cap on subset evaluations in the combinatorial searches.
pub const DEFAULT_GUARD: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KelleyError {
    #[error("the family has no sets")]
    EmptyFamily,
    #[error("search needs {needed} evaluations, guard is {guard}")]
    SequenceTooLong { needed: u64, guard: u64 },
    #[error("set index {0} out of range")]
    InvalidIndex(usize),
    #[error("empty sequence")]
    EmptySequence,
    #[error("malformed family: {0}")]
    Malformed(String),
    #[error("linear program failed: {0}")]
    Lp(#[from] simplex::LpError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(width: usize) -> Self {
        Self(vec![0; width.div_ceil(64)])
    }

    fn full(width: usize) -> Self {
        let mut b = Self::new(width);
        (0..width).for_each(|i| b.set(i));
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

/// Nonempty sets over a finite universe of labelled atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFamily {
    atoms: Vec<String>,
    sets: Vec<BTreeSet<usize>>,
    bits: Vec<Bits>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyRepr {
    atoms: Vec<String>,
    sets: Vec<Vec<String>>,
}

impl FiniteFamily {
    pub fn new(atoms: Vec<String>, sets: Vec<BTreeSet<usize>>) -> Result<Self, KelleyError> {
        let distinct: BTreeSet<&String> = atoms.iter().collect();
        if distinct.len() != atoms.len() {
            return Err(KelleyError::Malformed("duplicate atom label".into()));
        }
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(KelleyError::Malformed(format!("set {i} is empty")));
            }
            if let Some(a) = s.iter().find(|&&a| a >= atoms.len()) {
                return Err(KelleyError::Malformed(format!("set {i} names atom {a} outside the universe")));
            }
        }
        let bits = sets
            .iter()
            .map(|s| {
                let mut b = Bits::new(atoms.len());
                s.iter().for_each(|&a| b.set(a));
                b
            })
            .collect();
        Ok(Self { atoms, sets, bits })
    }

    /// Atoms named `0, 1, …`; each set given by atom indices.
    pub fn from_indices(n_atoms: usize, sets: &[&[usize]]) -> Result<Self, KelleyError> {
        Self::new(
            (0..n_atoms).map(|i| i.to_string()).collect(),
            sets.iter().map(|s| s.iter().copied().collect()).collect(),
        )
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn with_set(&self, set: BTreeSet<usize>) -> Result<Self, KelleyError> {
        let mut sets = self.sets.clone();
        sets.push(set);
        Self::new(self.atoms.clone(), sets)
    }

    /// Whether the listed sets share an atom.
    pub fn intersects(&self, idx: &[usize]) -> bool {
        let mut acc = Bits::full(self.atoms.len());
        for &i in idx {
            acc = acc.and(&self.bits[i]);
        }
        !acc.is_zero()
    }

    /// Maximal subfamilies (as sorted set indices) with a common atom, found
    /// by depth-first search over intersecting prefixes.
    pub fn maximal_intersecting(&self, guard: u64) -> Result<Vec<Vec<usize>>, KelleyError> {
        let mut found: Vec<Vec<usize>> = Vec::new();
        let mut evaluations = 0u64;
        let mut stack: Vec<usize> = Vec::new();
        self.grow(0, &Bits::full(self.atoms.len()), &mut stack, &mut found, &mut evaluations, guard)?;
        Ok(maximal_only(found))
    }

    fn grow(
        &self,
        from: usize,
        acc: &Bits,
        stack: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
        evaluations: &mut u64,
        guard: u64,
    ) -> Result<(), KelleyError> {
        let mut extended = false;
        for i in from..self.sets.len() {
            *evaluations += 1;
            if *evaluations > guard {
                return Err(KelleyError::SequenceTooLong { needed: *evaluations, guard });
            }
            let next = acc.and(&self.bits[i]);
            if next.is_zero() {
                continue;
            }
            extended = true;
            stack.push(i);
            self.grow(i + 1, &next, stack, found, evaluations, guard)?;
            stack.pop();
        }
        if !extended && !stack.is_empty() {
            found.push(stack.clone());
        }
        Ok(())
    }
}

fn maximal_only(mut fams: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    fams.sort_by_key(|f| std::cmp::Reverse(f.len()));
    let mut keep: Vec<Vec<usize>> = Vec::new();
    for f in fams {
        if !keep.iter().any(|k| f.iter().all(|x| k.binary_search(x).is_ok())) {
            keep.push(f);
        }
    }
    keep.sort();
    keep
}

impl Serialize for FiniteFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FamilyRepr {
            atoms: self.atoms.clone(),
            sets: self.sets.iter().map(|set| set.iter().map(|&a| self.atoms[a].clone()).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = FamilyRepr::deserialize(d)?;
        let index: BTreeMap<&str, usize> = r.atoms.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        let sets = r
            .sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|a| index.get(a.as_str()).copied().ok_or_else(|| D::Error::custom(format!("unknown atom {a:?}"))))
                    .collect::<Result<BTreeSet<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        FiniteFamily::new(r.atoms.clone(), sets).map_err(D::Error::custom)
    }
}

/// Family whose sets are the given feasibility pattern: one atom per maximal
/// feasible subfamily of `n_sets` abstract sets, set `i` containing the atoms
/// of the subfamilies that include `i`. `feasible` must be downward closed and
/// true on singletons.
pub fn atomize(
    n_sets: usize,
    mut feasible: impl FnMut(&[usize]) -> bool,
    guard: u64,
) -> Result<FiniteFamily, KelleyError> {
    let mut found = Vec::new();
    let mut evaluations = 0u64;
    let mut stack = Vec::new();
    fn walk(
        n: usize,
        from: usize,
        stack: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
        feasible: &mut dyn FnMut(&[usize]) -> bool,
        evaluations: &mut u64,
        guard: u64,
    ) -> Result<(), KelleyError> {
        let mut extended = false;
        for i in from..n {
            *evaluations += 1;
            if *evaluations > guard {
                return Err(KelleyError::SequenceTooLong { needed: *evaluations, guard });
            }
            stack.push(i);
            if feasible(stack) {
                extended = true;
                walk(n, i + 1, stack, found, feasible, evaluations, guard)?;
            }
            stack.pop();
        }
        if !extended && !stack.is_empty() {
            found.push(stack.clone());
        }
        Ok(())
    }
    walk(n_sets, 0, &mut stack, &mut found, &mut feasible, &mut evaluations, guard)?;
    let atoms = maximal_only(found);
    let sets = (0..n_sets)
        .map(|i| atoms.iter().enumerate().filter(|(_, f)| f.contains(&i)).map(|(a, _)| a).collect())
        .collect();
    FiniteFamily::new((0..atoms.len()).map(|a| format!("m{a}")).collect(), sets)
}

/// `κ(s)` for a sequence of set indices; equal sets are merged into
/// multiplicities before the subset search.
pub fn kappa_of_seq(fam: &FiniteFamily, s: &[usize]) -> Result<Rational, KelleyError> {
    kappa_of_seq_with_guard(fam, s, DEFAULT_GUARD)
}

pub fn kappa_of_seq_with_guard(fam: &FiniteFamily, s: &[usize], guard: u64) -> Result<Rational, KelleyError> {
    if s.is_empty() {
        return Err(KelleyError::EmptySequence);
    }
    let mut groups: BTreeMap<&BTreeSet<usize>, (usize, u64)> = BTreeMap::new();
    for &i in s {
        let set = fam.sets.get(i).ok_or(KelleyError::InvalidIndex(i))?;
        groups.entry(set).or_insert((i, 0)).1 += 1;
    }
    let groups: Vec<(usize, u64)> = groups.into_values().collect();
    let d = groups.len() as u32;
    let needed = 1u64.checked_shl(d).unwrap_or(u64::MAX);
    if needed > guard {
        return Err(KelleyError::SequenceTooLong { needed, guard });
    }
    let suffix: Vec<u64> = {
        let mut v = vec![0; groups.len() + 1];
        for i in (0..groups.len()).rev() {
            v[i] = v[i + 1] + groups[i].1;
        }
        v
    };
    let mut best = 0u64;
    fn dfs(fam: &FiniteFamily, groups: &[(usize, u64)], suffix: &[u64], i: usize, acc: &Bits, got: u64, best: &mut u64) {
        *best = (*best).max(got);
        if i == groups.len() || got + suffix[i] <= *best {
            return;
        }
        let next = acc.and(&fam.bits[groups[i].0]);
        if !next.is_zero() {
            dfs(fam, groups, suffix, i + 1, &next, got + groups[i].1, best);
        }
        dfs(fam, groups, suffix, i + 1, acc, got, best);
    }
    dfs(fam, &groups, &suffix, 0, &Bits::full(fam.atoms.len()), 0, &mut best);
    Ok(rational::ratio(best as i64, s.len() as i64))
}

/// Anytime upper bounds on `κ(𝒜)`: entry `ℓ−1` is the least `κ(s)` over all
/// multisets of length at most `ℓ`.
pub fn kappa_upper_bounds(fam: &FiniteFamily, max_len: usize) -> Result<Vec<Rational>, KelleyError> {
    kappa_upper_bounds_with_guard(fam, max_len, DEFAULT_GUARD)
}

pub fn kappa_upper_bounds_with_guard(
    fam: &FiniteFamily,
    max_len: usize,
    guard: u64,
) -> Result<Vec<Rational>, KelleyError> {
    if fam.is_empty() {
        return Err(KelleyError::EmptyFamily);
    }
    if max_len == 0 {
        return Err(KelleyError::EmptySequence);
    }
    let cliques = fam.maximal_intersecting(guard)?;
    let k = fam.len();
    let mut evaluations = 0u64;
    let mut out: Vec<Rational> = Vec::with_capacity(max_len);
    let mut running = Rational::one();
    for len in 1..=max_len {
        let mut best_num = len as u64;
        let mut mult = vec![0u64; k];
        let mut err = None;
        compositions(&mut mult, 0, len as u64, &mut |m| {
            evaluations += 1;
            if evaluations > guard {
                err = Some(KelleyError::SequenceTooLong { needed: evaluations, guard });
                return false;
            }
            let top = cliques.iter().map(|c| c.iter().map(|&i| m[i]).sum::<u64>()).max().unwrap_or(0);
            best_num = best_num.min(top);
            true
        });
        if let Some(e) = err {
            return Err(e);
        }
        running = running.min(rational::ratio(best_num as i64, len as i64));
        out.push(running.clone());
    }
    Ok(out)
}

/// Calls `f` on every vector of `mult.len()` nonnegative integers summing to
/// `left` (positions before `at` fixed). Stops early when `f` returns false.
fn compositions(mult: &mut [u64], at: usize, left: u64, f: &mut dyn FnMut(&[u64]) -> bool) -> bool {
    if at + 1 == mult.len() {
        mult[at] = left;
        return f(mult);
    }
    for v in (0..=left).rev() {
        mult[at] = v;
        if !compositions(mult, at + 1, left - v, f) {
            return false;
        }
    }
    mult[at] = 0;
    true
}

/// `κ(𝒜)` with a measure attaining it and a sequence attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaCertificate {
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    /// Probability weights on atoms whose least set mass is `value`.
    #[serde(serialize_with = "ser_rationals")]
    pub measure: Vec<Rational>,
    /// Set indices of a sequence with `κ = value`.
    pub sequence: Vec<usize>,
    /// Objective value after each simplex pivot.
    #[serde(serialize_with = "ser_rationals")]
    pub trace: Vec<Rational>,
}

pub(crate) fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::to_string))
}

/// Solves `max t` subject to `μ ≥ 0`, `Σμ ≤ 1`, `μ(A_i) ≥ t`. The dual
/// optimum is a distribution on sets whose heaviest atom carries `t`; scaled
/// to integers it is a sequence with `κ(s) = t`.
pub fn kappa_lp(fam: &FiniteFamily) -> Result<KappaCertificate, KelleyError> {
    if fam.is_empty() {
        return Err(KelleyError::EmptyFamily);
    }
    let n_atoms = fam.atoms.len();
    let t_var = n_atoms;
    let zero = Rational::zero;
    let mut a: Vec<Vec<Rational>> = fam
        .sets
        .iter()
        .map(|set| {
            let mut row = vec![zero(); n_atoms + 1];
            for &x in set {
                row[x] = -Rational::one();
            }
            row[t_var] = Rational::one();
            row
        })
        .collect();
    let mut total = vec![Rational::one(); n_atoms + 1];
    total[t_var] = zero();
    a.push(total);
    let mut b = vec![zero(); fam.len()];
    b.push(Rational::one());
    let mut c = vec![zero(); n_atoms + 1];
    c[t_var] = Rational::one();

    let sol = simplex::maximize(&a, &b, &c)?;
    let value = sol.value.clone();

    let mass: Rational = sol.primal[..n_atoms].iter().sum();
    let measure: Vec<Rational> = sol.primal[..n_atoms].iter().map(|m| m / &mass).collect();

    let y = &sol.dual[..fam.len()];
    let denom = y.iter().fold(num_bigint::BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut counts: Vec<num_bigint::BigInt> = y.iter().map(|r| (r * Rational::from_integer(denom.clone())).to_integer()).collect();
    let g = counts.iter().fold(num_bigint::BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() {
        counts.iter_mut().for_each(|v| *v /= &g);
    }
    let sequence = counts
        .iter()
        .enumerate()
        .flat_map(|(i, v)| std::iter::repeat_n(i, v.to_usize().expect("small multiplicity")))
        .collect();
    Ok(KappaCertificate { value, measure, sequence, trace: sol.trace })
}

/// `min_i μ(A_i)` for weights on atoms.
pub fn min_set_mass(fam: &FiniteFamily, measure: &[Rational]) -> Rational {
    fam.sets
        .iter()
        .map(|s| s.iter().map(|&a| measure[a].clone()).sum::<Rational>())
        .min()
        .unwrap_or_else(Rational::zero)
}

impl KappaCertificate {
    /// Recomputes both witnesses and compares them with `value`.
    pub fn verify(&self, fam: &FiniteFamily) -> Result<bool, KelleyError> {
        let probability = self.measure.iter().all(rational::is_probability)
            && self.measure.iter().sum::<Rational>() == Rational::one();
        let lower = min_set_mass(fam, &self.measure) == self.value;
        let upper = kappa_of_seq(fam, &self.sequence)? == self.value;
        Ok(probability && lower && upper)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentRow {
    pub index: usize,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentationReport {
    #[serde(with = "rational::serde_str")]
    pub delta: Rational,
    pub rows: Vec<FragmentRow>,
    pub all_pass: bool,
}

/// `κ` of each class against the threshold `δ`. An empty class has
/// `κ = inf ∅`, which never falls below `δ`.
pub fn fragmentation_report(fams: &[FiniteFamily], delta: &Rational) -> Result<FragmentationReport, KelleyError> {
    let mut rows = Vec::with_capacity(fams.len());
    for (index, fam) in fams.iter().enumerate() {
        let value = match kappa_lp(fam) {
            Ok(cert) => cert.value,
            Err(KelleyError::EmptyFamily) => Rational::one(),
            Err(e) => return Err(e),
        };
        rows.push(FragmentRow { index, passed: value > *delta, value });
    }
    let all_pass = rows.iter().all(|r| r.passed);
    Ok(FragmentationReport { delta: delta.clone(), rows, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn triangle() -> FiniteFamily {
        // atoms ab, bc, ca
        FiniteFamily::from_indices(3, &[&[0, 2], &[0, 1], &[1, 2]]).unwrap()
    }

    #[test]
    fn kappa_of_seq_examples() {
        let single = FiniteFamily::from_indices(1, &[&[0]]).unwrap();
        assert_eq!(kappa_of_seq(&single, &[0]).unwrap(), ratio(1, 1));
        let disjoint = FiniteFamily::from_indices(2, &[&[0], &[1]]).unwrap();
        assert_eq!(kappa_of_seq(&disjoint, &[0, 1]).unwrap(), ratio(1, 2));
        assert_eq!(kappa_of_seq(&triangle(), &[0, 1, 2]).unwrap(), ratio(2, 3));
        assert_eq!(kappa_of_seq(&disjoint, &[0, 0, 1]).unwrap(), ratio(2, 3));
        assert!(matches!(kappa_of_seq(&disjoint, &[]), Err(KelleyError::EmptySequence)));
        assert!(matches!(kappa_of_seq(&disjoint, &[5]), Err(KelleyError::InvalidIndex(5))));
    }

    #[test]
    fn sequence_guard() {
        let sets: Vec<BTreeSet<usize>> = (0..21).map(|i| BTreeSet::from([i])).collect();
        let fam = FiniteFamily::new((0..21).map(|i| i.to_string()).collect(), sets).unwrap();
        let s: Vec<usize> = (0..21).collect();
        assert!(matches!(kappa_of_seq(&fam, &s), Err(KelleyError::SequenceTooLong { .. })));
        assert_eq!(kappa_of_seq_with_guard(&fam, &s, 1 << 21).unwrap(), ratio(1, 21));
    }

    #[test]
    fn upper_bound_examples() {
        let single = FiniteFamily::from_indices(1, &[&[0]]).unwrap();
        assert!(kappa_upper_bounds(&single, 5).unwrap().iter().all(|v| *v == ratio(1, 1)));
        let disjoint = FiniteFamily::from_indices(2, &[&[0], &[1]]).unwrap();
        assert_eq!(kappa_upper_bounds(&disjoint, 4).unwrap(), vec![ratio(1, 1), ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        assert_eq!(kappa_upper_bounds(&triangle(), 3).unwrap(), vec![ratio(1, 1), ratio(1, 1), ratio(2, 3)]);
    }

    #[test]
    fn lp_examples() {
        let single = FiniteFamily::from_indices(2, &[&[0, 1]]).unwrap();
        let c = kappa_lp(&single).unwrap();
        assert_eq!(c.value, ratio(1, 1));
        assert!(c.verify(&single).unwrap());

        let disjoint = FiniteFamily::from_indices(2, &[&[0], &[1]]).unwrap();
        let c = kappa_lp(&disjoint).unwrap();
        assert_eq!(c.value, ratio(1, 2));
        assert_eq!(c.measure, vec![ratio(1, 2), ratio(1, 2)]);
        assert!(c.verify(&disjoint).unwrap());

        let c = kappa_lp(&triangle()).unwrap();
        assert_eq!(c.value, ratio(2, 3));
        assert!(c.verify(&triangle()).unwrap());
        assert_eq!(c.sequence.len(), 3);
        assert!(c.trace.iter().all(|v| *v <= c.value));

        let empty = FiniteFamily::from_indices(1, &[]).unwrap();
        assert_eq!(kappa_lp(&empty).unwrap_err(), KelleyError::EmptyFamily);
    }

    #[test]
    fn fragmentation_examples() {
        let disjoint = FiniteFamily::from_indices(2, &[&[0], &[1]]).unwrap();
        let r = fragmentation_report(&[disjoint], &ratio(3, 4)).unwrap();
        assert!(!r.all_pass);
        assert_eq!(r.rows[0].value, ratio(1, 2));
        assert!(fragmentation_report(&[], &ratio(1, 2)).unwrap().all_pass);
    }

    #[test]
    fn atomize_from_pattern() {
        // three sets, pairwise compatible, no triple
        let fam = atomize(3, |s| s.len() <= 2, DEFAULT_GUARD).unwrap();
        assert_eq!(fam.atoms().len(), 3);
        assert_eq!(kappa_lp(&fam).unwrap().value, ratio(2, 3));
        assert!(fam.intersects(&[0, 1]) && !fam.intersects(&[0, 1, 2]));
    }

    #[test]
    fn json_roundtrip() {
        let js = r#"{"atoms":["x","y"],"sets":[["x"],["x","y"]]}"#;
        let fam: FiniteFamily = serde_json::from_str(js).unwrap();
        assert_eq!(serde_json::to_string(&fam).unwrap(), js);
        assert!(serde_json::from_str::<FiniteFamily>(r#"{"atoms":["x"],"sets":[[]]}"#).is_err());
        assert!(serde_json::from_str::<FiniteFamily>(r#"{"atoms":["x"],"sets":[["z"]]}"#).is_err());
    }
}
