//! Asymptotic density on eventually periodic subsets of ω, the residue-class
//! embedding of the clopen algebra, and staged unions of increasing chains.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cantor::ClopenSet;
use crate::rational::{self, Rational};

/// A natural number (an element of ω).
pub type Nat = u128;

/// Largest modulus produced by Boolean operations or by [`psi0`].
pub const MAX_MODULUS: u64 = 1 << 26;

/// Largest coordinate span accepted by [`psi0`] (modulus `2^MAX_PSI0_BITS`).
pub const MAX_PSI0_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DensityError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("residue {residue} is not below the modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },
    #[error("{0} is both added and removed")]
    ConflictingDelta(Nat),
    #[error("aligned modulus {0} exceeds the supported maximum")]
    ModulusTooLarge(u128),
    #[error("chain element {index} does not contain its predecessor")]
    MonotonicityViolation { index: usize },
    #[error("chain element {index} has density {density} above the declared supremum {supremum}")]
    SupremumExceeded { index: usize, density: String, supremum: String },
    #[error("finite chain ends at density {last}, but declared supremum is {supremum}")]
    SupremumMismatch { last: String, supremum: String },
    #[error("staged set is malformed: {0}")]
    MalformedStages(String),
    #[error("counting window must start at N ≥ 1")]
    EmptyWindow,
}

/// `{k : k mod M ∈ residues}` modified on finitely many points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PeriodicSet {
    #[serde(rename = "mod")]
    modulus: u64,
    residues: BTreeSet<u64>,
    added: BTreeSet<Nat>,
    removed: BTreeSet<Nat>,
}

#[derive(Deserialize)]
struct PeriodicSetRepr {
    #[serde(rename = "mod")]
    modulus: u64,
    residues: Vec<u64>,
    #[serde(default)]
    added: Vec<Nat>,
    #[serde(default)]
    removed: Vec<Nat>,
}

impl<'de> Deserialize<'de> for PeriodicSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PeriodicSetRepr::deserialize(d)?;
        PeriodicSet::new(r.modulus, r.residues, r.added, r.removed).map_err(serde::de::Error::custom)
    }
}

impl PeriodicSet {
    /// Builds and normalizes: the modulus is reduced to the least period and
    /// deltas that agree with the periodic part are dropped.
    pub fn new(
        modulus: u64,
        residues: impl IntoIterator<Item = u64>,
        added: impl IntoIterator<Item = Nat>,
        removed: impl IntoIterator<Item = Nat>,
    ) -> Result<Self, DensityError> {
        if modulus == 0 {
            return Err(DensityError::ZeroModulus);
        }
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if let Some(&r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(DensityError::ResidueOutOfRange { residue: r, modulus });
        }
        let added: BTreeSet<Nat> = added.into_iter().collect();
        let removed: BTreeSet<Nat> = removed.into_iter().collect();
        if let Some(&k) = added.intersection(&removed).next() {
            return Err(DensityError::ConflictingDelta(k));
        }
        let (modulus, residues) = least_period(modulus, residues);
        let in_base = |k: &Nat| residues.contains(&((*k % modulus as Nat) as u64));
        let added = added.into_iter().filter(|k| !in_base(k)).collect();
        let removed = removed.into_iter().filter(|k| in_base(k)).collect();
        Ok(Self { modulus, residues, added, removed })
    }

    pub fn periodic(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Result<Self, DensityError> {
        Self::new(modulus, residues, [], [])
    }

    pub fn omega() -> Self {
        Self::periodic(1, [0]).expect("valid")
    }

    pub fn nothing() -> Self {
        Self::periodic(1, []).expect("valid")
    }

    pub fn evens() -> Self {
        Self::periodic(2, [0]).expect("valid")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn added(&self) -> &BTreeSet<Nat> {
        &self.added
    }

    pub fn removed(&self) -> &BTreeSet<Nat> {
        &self.removed
    }

    fn in_base(&self, k: Nat) -> bool {
        self.residues.contains(&((k % self.modulus as Nat) as u64))
    }

    pub fn contains(&self, k: Nat) -> bool {
        if self.added.contains(&k) {
            return true;
        }
        self.in_base(k) && !self.removed.contains(&k)
    }

    /// `|residues| / modulus`; finite deltas do not move the density.
    pub fn density(&self) -> Rational {
        Rational::new(BigInt::from(self.residues.len()), BigInt::from(self.modulus))
    }

    /// `|self ∩ [0, n)|` without enumerating `[0, n)`.
    pub fn count_below(&self, n: Nat) -> Nat {
        let m = self.modulus as Nat;
        let full = n / m;
        let rem = (n % m) as u64;
        let partial = self.residues.range(..rem).count() as Nat;
        let base = full * self.residues.len() as Nat + partial;
        base + self.added.range(..n).count() as Nat - self.removed.range(..n).count() as Nat
    }

    /// A constant `D` with `|count_below(n) − n·density| ≤ D` for every `n`.
    pub fn deviation_constant(&self) -> Nat {
        self.modulus as Nat + self.added.len() as Nat + self.removed.len() as Nat
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.added.is_empty()
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self, DensityError> {
        let l = (self.modulus as u128).lcm(&(other.modulus as u128));
        if l > MAX_MODULUS as u128 {
            return Err(DensityError::ModulusTooLarge(l));
        }
        let residues: Vec<u64> = (0..l as u64)
            .filter(|&r| op(self.in_base(r as Nat), other.in_base(r as Nat)))
            .collect();
        let mut added = Vec::new();
        let mut removed = Vec::new();
        let points = self.added.iter().chain(&self.removed).chain(&other.added).chain(&other.removed);
        for &k in points.collect::<BTreeSet<_>>() {
            let actual = op(self.contains(k), other.contains(k));
            let base = op(self.in_base(k), other.in_base(k));
            if actual && !base {
                added.push(k);
            } else if !actual && base {
                removed.push(k);
            }
        }
        Self::new(l as u64, residues, added, removed)
    }

    pub fn union(&self, other: &Self) -> Result<Self, DensityError> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, DensityError> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self, DensityError> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self {
            modulus: self.modulus,
            residues: (0..self.modulus).filter(|r| !self.residues.contains(r)).collect(),
            added: self.removed.clone(),
            removed: self.added.clone(),
        }
    }

    /// Exact inclusion (not mod finite).
    pub fn is_subset(&self, other: &Self) -> Result<bool, DensityError> {
        Ok(self.difference(other)?.is_empty())
    }
}

fn least_period(modulus: u64, residues: BTreeSet<u64>) -> (u64, BTreeSet<u64>) {
    let mut divisors: Vec<u64> = Vec::new();
    let mut d = 1;
    while d * d <= modulus {
        if modulus.is_multiple_of(d) {
            divisors.push(d);
            divisors.push(modulus / d);
        }
        d += 1;
    }
    divisors.sort_unstable();
    divisors.dedup();
    for p in divisors {
        if p == modulus {
            break;
        }
        if !(residues.len() as u64).is_multiple_of(modulus / p) {
            continue;
        }
        let periodic = residues
            .iter()
            .all(|&r| (0..modulus / p).all(|j| residues.contains(&((r % p) + j * p))));
        if periodic {
            let reduced = residues.iter().filter(|&&r| r < p).copied().collect();
            return (p, reduced);
        }
    }
    (modulus, residues)
}

/// Image of a clopen set under `σ ↦ {k : k ≡ σ̌ mod 2^{|σ|}}`, with
/// `σ̌ = Σ σ(i)·2^i` (least significant bit first). `k` belongs to the image
/// iff its binary digits, read as a point of `2^ω`, lie in `a`. This is an
/// exact Boolean homomorphism into the residue-class algebra.
pub fn psi0(a: &ClopenSet) -> Result<PeriodicSet, DensityError> {
    let bits = a.syntactic_support().last().map_or(0, |&c| c + 1);
    if bits > MAX_PSI0_BITS {
        return Err(DensityError::ModulusTooLarge(1u128 << bits));
    }
    let modulus = 1u64 << bits;
    let residues = (0..modulus).filter(|&r| a.contains(|c| (r >> c) & 1 == 1));
    PeriodicSet::periodic(modulus, residues)
}

/// One stage of a [`StagedSet`]: `set` governs membership from `from` on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub set: PeriodicSet,
    pub from: Nat,
}

/// `⋃_k (stage_k ∩ [from_k, from_{k+1}))`, the last stage extending to ∞.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StagedSet {
    stages: Vec<Stage>,
    #[serde(with = "rational::serde_str")]
    density: Rational,
    truncated: bool,
}

#[derive(Deserialize)]
struct StagedSetRepr {
    stages: Vec<Stage>,
    #[serde(with = "rational::serde_str")]
    density: Rational,
    truncated: bool,
}

impl<'de> Deserialize<'de> for StagedSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = StagedSetRepr::deserialize(d)?;
        StagedSet::new(r.stages, r.density, r.truncated).map_err(serde::de::Error::custom)
    }
}

/// Result of [`staged_count`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StagedCount {
    pub n: Nat,
    pub count: Nat,
    #[serde(with = "rational::serde_str")]
    pub estimate: Rational,
    #[serde(with = "rational::serde_str")]
    pub error_bound: Rational,
    pub truncated: bool,
}

impl StagedSet {
    /// Validates the staging: the first stage starts at 0, switch points
    /// strictly increase, each stage contains its predecessor exactly, and the
    /// declared density is at least the last stage's (equal unless truncated).
    pub fn new(stages: Vec<Stage>, density: Rational, truncated: bool) -> Result<Self, DensityError> {
        let bad = |m: &str| Err(DensityError::MalformedStages(m.to_string()));
        let Some(first) = stages.first() else {
            return bad("no stages");
        };
        if first.from != 0 {
            return bad("first stage must start at 0");
        }
        for (i, w) in stages.windows(2).enumerate() {
            if w[1].from <= w[0].from {
                return bad("switch points must increase strictly");
            }
            if !w[0].set.is_subset(&w[1].set)? {
                return Err(DensityError::MonotonicityViolation { index: i + 1 });
            }
        }
        let last = stages.last().expect("nonempty").set.density();
        if density < last || (!truncated && density != last) {
            return Err(DensityError::SupremumMismatch {
                last: rational::to_string(&last),
                supremum: rational::to_string(&density),
            });
        }
        Ok(Self { stages, density, truncated })
    }

    /// A single periodic set viewed as a one-stage staged set.
    pub fn single(set: PeriodicSet) -> Self {
        let density = set.density();
        Self { stages: vec![Stage { set, from: 0 }], density, truncated: false }
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// The declared density.
    pub fn density(&self) -> &Rational {
        &self.density
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    fn stage_index(&self, k: Nat) -> usize {
        self.stages.partition_point(|s| s.from <= k) - 1
    }

    pub fn contains(&self, k: Nat) -> bool {
        self.stages[self.stage_index(k)].set.contains(k)
    }

    /// `|self ∩ [0, n)|`, in time linear in the number of stages and deltas.
    pub fn count_below(&self, n: Nat) -> Nat {
        let mut total = 0;
        for (i, st) in self.stages.iter().enumerate() {
            if st.from >= n {
                break;
            }
            let end = self.stages.get(i + 1).map_or(n, |next| next.from.min(n));
            total += st.set.count_below(end) - st.set.count_below(st.from);
        }
        total
    }
}

/// Pull-based producer of an increasing chain of periodic sets.
pub trait ChainGenerator {
    /// Next element; each element must contain the previous one exactly.
    fn pull(&mut self) -> Option<PeriodicSet>;
    /// Declared supremum of the densities.
    fn supremum(&self) -> Rational;
}

/// A finite chain given up front; its supremum is the last density.
#[derive(Debug, Clone)]
pub struct FiniteChain {
    items: std::collections::VecDeque<PeriodicSet>,
    supremum: Rational,
}

impl FiniteChain {
    pub fn new(items: Vec<PeriodicSet>) -> Self {
        let supremum = items.last().map_or_else(Rational::zero, PeriodicSet::density);
        Self { items: items.into(), supremum }
    }
}

impl ChainGenerator for FiniteChain {
    fn pull(&mut self) -> Option<PeriodicSet> {
        self.items.pop_front()
    }

    fn supremum(&self) -> Rational {
        self.supremum.clone()
    }
}

/// A chain produced by a closure of the element index.
pub struct FnChain<F> {
    next: F,
    index: usize,
    supremum: Rational,
}

impl<F: FnMut(usize) -> Option<PeriodicSet>> FnChain<F> {
    pub fn new(supremum: Rational, next: F) -> Self {
        Self { next, index: 0, supremum }
    }
}

impl<F: FnMut(usize) -> Option<PeriodicSet>> ChainGenerator for FnChain<F> {
    fn pull(&mut self) -> Option<PeriodicSet> {
        let out = (self.next)(self.index);
        self.index += 1;
        out
    }

    fn supremum(&self) -> Rational {
        self.supremum.clone()
    }
}

/// Next switch point: far enough that stage `k` counts within `2^{-(k+1)}` of
/// its density, and at least `2^{k+1}` times the previous switch point.
fn next_switch(prev: Nat, deviation: Nat, k: u32) -> Option<Nat> {
    let scale: Nat = 1u128.checked_shl(k + 1)?;
    let by_deviation = deviation.checked_mul(scale)?.checked_add(1)?;
    let by_growth = prev.checked_mul(scale)?;
    Some(by_deviation.max(by_growth).max(prev + 1))
}

/// Staged union of an increasing chain: a set containing every pulled chain
/// element above its switch point, with declared density equal to the
/// chain's supremum. Stops after `budget` elements; if the chain had more to
/// give the result is flagged as truncated.
pub fn buck_union(chain: &mut dyn ChainGenerator, budget: usize) -> Result<StagedSet, DensityError> {
    let supremum = chain.supremum();
    let mut stages: Vec<Stage> = Vec::new();
    let mut truncated = false;
    for k in 0..budget {
        let Some(set) = chain.pull() else { break };
        if set.density() > supremum {
            return Err(DensityError::SupremumExceeded {
                index: k,
                density: rational::to_string(&set.density()),
                supremum: rational::to_string(&supremum),
            });
        }
        let from = match stages.last() {
            None => 0,
            Some(prev) => {
                if !prev.set.is_subset(&set)? {
                    return Err(DensityError::MonotonicityViolation { index: k });
                }
                let dev = set.deviation_constant().max(prev.set.deviation_constant());
                match next_switch(prev.from, dev, k as u32) {
                    Some(s) => s,
                    None => {
                        truncated = true;
                        break;
                    }
                }
            }
        };
        stages.push(Stage { set, from });
        if k + 1 == budget && chain.pull().is_some() {
            truncated = true;
        }
    }
    if stages.is_empty() {
        return Err(DensityError::MalformedStages("chain produced no elements".into()));
    }
    StagedSet::new(stages, supremum, truncated)
}

/// Exact count of `s ∩ [0, n)` and a certified bound on how far `count/n` can
/// sit from the declared density. With `j` the stage in force at `n − 1` and
/// `D_i` the deviation constants:
/// `count ≤ n·d_j + D_j` and, for every `i ≤ j`,
/// `count ≥ (n − from_i)·d_i − 2·D_i`.
pub fn staged_count(s: &StagedSet, n: Nat) -> Result<StagedCount, DensityError> {
    if n == 0 {
        return Err(DensityError::EmptyWindow);
    }
    let count = s.count_below(n);
    let big_n = Rational::from_integer(BigInt::from(n));
    let estimate = Rational::from_integer(BigInt::from(count)) / &big_n;
    let j = s.stage_index(n - 1);
    let dev = |i: usize| Rational::from_integer(BigInt::from(s.stages[i].set.deviation_constant()));
    let upper = s.stages[j].set.density() + dev(j) / &big_n;
    let lower = (0..=j)
        .map(|i| {
            let st = &s.stages[i];
            let span = Rational::from_integer(BigInt::from(n - st.from));
            (span * st.set.density() - dev(i) * rational::int(2)) / &big_n
        })
        .max()
        .expect("at least one stage");
    let above = (upper - &s.density).max(Rational::zero());
    let below = (&s.density - lower).max(Rational::zero());
    Ok(StagedCount {
        n,
        count,
        estimate,
        error_bound: above.max(below),
        truncated: s.truncated,
    })
}

/// One checked law in a [`TransferReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub checks: Vec<LawCheck>,
    pub passed: bool,
}

/// Checks `d(psi0(x)) = λ(x)` for `a` and `b`, and that `psi0` commutes with
/// union, intersection and complement exactly.
pub fn transfer_check(a: &ClopenSet, b: &ClopenSet) -> Result<TransferReport, DensityError> {
    let pa = psi0(a)?;
    let pb = psi0(b)?;
    let mut checks = Vec::new();
    for (name, set, image) in [("a", a, &pa), ("b", b, &pb)] {
        let (m, d) = (set.measure(), image.density());
        checks.push(LawCheck {
            law: format!("d(psi0({name})) = λ({name})"),
            holds: m == d,
            detail: format!("{} = {}", rational::to_string(&d), rational::to_string(&m)),
        });
    }
    let mut law = |name: &str, lhs: PeriodicSet, rhs: PeriodicSet| {
        checks.push(LawCheck {
            law: name.to_string(),
            holds: lhs == rhs,
            detail: format!("mod {} vs mod {}", lhs.modulus(), rhs.modulus()),
        });
    };
    law("psi0(a∪b) = psi0(a)∪psi0(b)", psi0(&a.union(b))?, pa.union(&pb)?);
    law("psi0(a∩b) = psi0(a)∩psi0(b)", psi0(&a.intersect(b))?, pa.intersect(&pb)?);
    law("psi0(aᶜ) = psi0(a)ᶜ", psi0(&a.complement())?, pa.complement());
    let passed = checks.iter().all(|c| c.holds);
    Ok(TransferReport { checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::PartialAssignment;
    use crate::rational::ratio;
    use num_traits::Signed;

    fn cyl(pairs: &[(u32, u8)]) -> ClopenSet {
        ClopenSet::cylinder(&PartialAssignment::from_bits(pairs.iter().copied()))
    }

    #[test]
    fn densities() {
        assert_eq!(PeriodicSet::evens().density(), ratio(1, 2));
        let p = PeriodicSet::new(4, [1, 2], [0], []).unwrap();
        assert_eq!(p.density(), ratio(1, 2));
        assert_eq!(PeriodicSet::omega().density(), ratio(1, 1));
    }

    #[test]
    fn normalization_reduces_period_and_deltas() {
        let p = PeriodicSet::new(6, [0, 2, 4], [4, 7], [3]).unwrap();
        assert_eq!(p, PeriodicSet::new(2, [0], [7], []).unwrap());
        assert!(PeriodicSet::new(3, [3], [], []).is_err());
        assert!(PeriodicSet::new(3, [1], [5], [5]).is_err());
        assert!(PeriodicSet::new(0, [], [], []).is_err());
    }

    #[test]
    fn psi0_examples() {
        assert_eq!(psi0(&cyl(&[(0, 0)])).unwrap(), PeriodicSet::evens());
        assert_eq!(psi0(&ClopenSet::full()).unwrap(), PeriodicSet::omega());
        let img = psi0(&cyl(&[(0, 0), (1, 1)])).unwrap();
        assert_eq!(img, PeriodicSet::periodic(4, [2]).unwrap());
        for k in 0..64u128 {
            assert_eq!(img.contains(k), k % 4 == 2);
        }
    }

    #[test]
    fn counting() {
        let p = PeriodicSet::new(4, [1], [], []).unwrap();
        let s = StagedSet::single(p);
        let c = staged_count(&s, 6).unwrap();
        assert_eq!((c.count, c.estimate.clone()), (2, ratio(1, 3)));
        assert!((c.estimate - s.density()).abs() <= c.error_bound);
        let evens = StagedSet::single(PeriodicSet::evens());
        let c = staged_count(&evens, 10).unwrap();
        assert_eq!((c.count, c.estimate), (5, ratio(1, 2)));
        assert!(staged_count(&evens, 0).is_err());
    }

    #[test]
    fn count_with_deltas_matches_enumeration() {
        let p = PeriodicSet::new(5, [0, 3], [1, 11], [10]).unwrap();
        for n in 0..40u128 {
            let brute = (0..n).filter(|&k| p.contains(k)).count() as u128;
            assert_eq!(p.count_below(n), brute, "n = {n}");
        }
    }

    #[test]
    fn boolean_ops_align_moduli() {
        let a = PeriodicSet::new(2, [0], [3], []).unwrap();
        let b = PeriodicSet::new(3, [1], [], [4]).unwrap();
        let u = a.union(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        for k in 0..60u128 {
            assert_eq!(u.contains(k), a.contains(k) || b.contains(k));
            assert_eq!(i.contains(k), a.contains(k) && b.contains(k));
            assert_eq!(a.complement().contains(k), !a.contains(k));
        }
        assert_eq!(a.density() + b.density(), u.density() + i.density());
    }

    #[test]
    fn constant_chain() {
        let mut chain = FnChain::new(ratio(1, 2), |_| Some(PeriodicSet::evens()));
        let s = buck_union(&mut chain, 5).unwrap();
        assert_eq!(*s.density(), ratio(1, 2));
        assert!(s.is_truncated());
        assert_eq!(s.stages().len(), 5);
        let from0 = s.stages()[0].from;
        for k in from0..from0 + 200 {
            assert_eq!(s.contains(k), k % 2 == 0);
        }
    }

    fn low_bits_not_all_ones(k: usize) -> PeriodicSet {
        let m = 1u64 << (k + 1);
        PeriodicSet::periodic(m, 0..m - 1).unwrap()
    }

    #[test]
    fn growing_chain_density() {
        let mut chain = FnChain::new(ratio(1, 1), |k| Some(low_bits_not_all_ones(k)));
        let s = buck_union(&mut chain, 8).unwrap();
        assert_eq!(*s.density(), ratio(1, 1));
        let n = s.stages()[5].from;
        let c = staged_count(&s, n).unwrap();
        assert!(c.estimate > ratio(15, 16), "estimate {}", c.estimate);
        // direct count below the switch point, stage by stage
        let mut direct = 0u128;
        for (i, st) in s.stages().iter().enumerate().take(5) {
            let end = s.stages()[i + 1].from;
            let period = st.set.modulus() as u128;
            let per = period - 1;
            let span = end - st.from;
            let whole = span / period;
            direct += whole * per;
            for k in st.from + whole * period..end {
                direct += u128::from(st.set.contains(k));
            }
        }
        assert_eq!(direct, c.count);
    }

    #[test]
    fn monotonicity_violation_detected() {
        let mut chain = FiniteChain::new(vec![
            PeriodicSet::evens(),
            PeriodicSet::periodic(2, [1]).unwrap(),
        ]);
        assert_eq!(
            buck_union(&mut chain, 4).unwrap_err(),
            DensityError::MonotonicityViolation { index: 1 }
        );
    }

    #[test]
    fn finite_chain_is_not_truncated() {
        let chain_items = vec![
            PeriodicSet::periodic(4, [0]).unwrap(),
            PeriodicSet::periodic(4, [0, 1]).unwrap(),
        ];
        let s = buck_union(&mut FiniteChain::new(chain_items), 10).unwrap();
        assert!(!s.is_truncated());
        assert_eq!(*s.density(), ratio(1, 2));
    }

    #[test]
    fn transfer_examples() {
        let r = transfer_check(&cyl(&[(0, 0)]), &ClopenSet::empty()).unwrap();
        assert!(r.passed);
        assert_eq!(r.checks[0].detail, "1/2 = 1/2");
        assert_eq!(r.checks[1].detail, "0/1 = 0/1");
    }

    #[test]
    fn json_shapes() {
        let p = PeriodicSet::new(4, [1, 2], [0], []).unwrap();
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, r#"{"mod":4,"residues":[1,2],"added":[0],"removed":[]}"#);
        let back: PeriodicSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);
        let s = StagedSet::single(PeriodicSet::evens());
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(
            js,
            r#"{"stages":[{"set":{"mod":2,"residues":[0],"added":[],"removed":[]},"from":0}],"density":"1/2","truncated":false}"#
        );
        assert_eq!(serde_json::from_str::<StagedSet>(&js).unwrap(), s);
    }
}
