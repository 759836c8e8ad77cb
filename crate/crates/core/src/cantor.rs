//! Clopen subsets of the Cantor space `2^ω` with the fair-coin product measure.
//!
//! A [`ClopenSet`] is stored as a reduced ordered decision diagram over the
//! coordinates it depends on, laid out in a canonical post-order. Two sets are
//! equal exactly when their diagrams are identical, so `==` is set equality.
//! The disjoint cylinders of the set are the root-to-`true` paths of the
//! diagram, read with the `0` branch first.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational};

/// A coordinate of `2^ω`.
pub type Coord = u32;

/// Default bound on the number of coordinates examined by [`ClopenSet::support`].
pub const DEFAULT_SUPPORT_BOUND: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CantorError {
    #[error("syntactic support has {size} coordinates, above the exhaustive bound {bound}")]
    SupportTooLarge { size: usize, bound: usize },
    #[error("supports overlap on coordinates {shared:?}")]
    OverlappingSupports { shared: Vec<Coord> },
    #[error("product rule failed: λ(a∩b) = {joint}, λ(a)·λ(b) = {product}")]
    ProductRuleViolated { joint: String, product: String },
}

/// A finite partial function from coordinates to bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PartialAssignment(BTreeMap<Coord, bool>);

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Coord, bool)>>(pairs: I) -> Self {
        Self(pairs.into_iter().collect())
    }

    /// Builds `{c ↦ bit}` from `(coordinate, 0/1)` pairs.
    pub fn from_bits<I: IntoIterator<Item = (Coord, u8)>>(pairs: I) -> Self {
        Self(pairs.into_iter().map(|(c, b)| (c, b != 0)).collect())
    }

    pub fn get(&self, coord: Coord) -> Option<bool> {
        self.0.get(&coord).copied()
    }

    pub fn insert(&mut self, coord: Coord, bit: bool) -> Option<bool> {
        self.0.insert(coord, bit)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> BTreeSet<Coord> {
        self.0.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coord, bool)> + '_ {
        self.0.iter().map(|(&c, &b)| (c, b))
    }

    /// True when the two basic sets are disjoint.
    pub fn conflicts_with(&self, other: &Self) -> bool {
        self.iter().any(|(c, b)| other.get(c).is_some_and(|o| o != b))
    }

    /// The assignment extending both, if they are compatible.
    pub fn merge(&self, other: &Self) -> Option<Self> {
        if self.conflicts_with(other) {
            return None;
        }
        let mut out = self.clone();
        out.0.extend(other.iter());
        Some(out)
    }

    /// Whether a total point (given as a bit function) lies in the basic set.
    pub fn admits(&self, point: impl Fn(Coord) -> bool) -> bool {
        self.iter().all(|(c, b)| point(c) == b)
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (c, b)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}↦{}", u8::from(b))?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PartialAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.len()))?;
        for (c, b) in self.iter() {
            map.serialize_entry(&c.to_string(), &u8::from(b))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for PartialAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct AssignmentVisitor;

        impl<'de> Visitor<'de> for AssignmentVisitor {
            type Value = PartialAssignment;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping coordinate strings to bits 0/1")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = PartialAssignment::new();
                while let Some((key, bit)) = map.next_entry::<String, u8>()? {
                    let coord: Coord = key
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad coordinate {key:?}")))?;
                    if bit > 1 {
                        return Err(de::Error::custom(format!("bit for {coord} must be 0 or 1")));
                    }
                    if out.insert(coord, bit == 1).is_some() {
                        return Err(de::Error::custom(format!("duplicate coordinate {coord}")));
                    }
                }
                Ok(out)
            }
        }

        d.deserialize_map(AssignmentVisitor)
    }
}

type Ref = u32;
const FALSE: Ref = 0;
const TRUE: Ref = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: Coord,
    lo: Ref,
    hi: Ref,
}

/// Builder with a unique table; `compact` turns it into a canonical layout.
#[derive(Default)]
struct Builder {
    nodes: Vec<Node>,
    unique: HashMap<Node, Ref>,
}

impl Builder {
    fn mk(&mut self, var: Coord, lo: Ref, hi: Ref) -> Ref {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&r) = self.unique.get(&node) {
            return r;
        }
        let r = self.nodes.len() as Ref + 2;
        self.nodes.push(node);
        self.unique.insert(node, r);
        r
    }

    fn node(&self, r: Ref) -> Node {
        self.nodes[(r - 2) as usize]
    }

    /// Renumbers the nodes reachable from `root` in post-order (low branch
    /// first). Reduced ordered diagrams are unique per function, so the result
    /// is a canonical value.
    fn compact(self, root: Ref) -> ClopenSet {
        if root < 2 {
            return ClopenSet { nodes: Vec::new(), root };
        }
        let mut order: HashMap<Ref, Ref> = HashMap::new();
        let mut nodes = Vec::new();
        // iterative post-order to stay clear of deep recursion
        let mut stack = vec![(root, false)];
        while let Some((r, expanded)) = stack.pop() {
            if r < 2 || order.contains_key(&r) {
                continue;
            }
            let n = self.node(r);
            if expanded {
                let map = |x: Ref| if x < 2 { x } else { order[&x] };
                let fresh = nodes.len() as Ref + 2;
                nodes.push(Node { var: n.var, lo: map(n.lo), hi: map(n.hi) });
                order.insert(r, fresh);
            } else {
                stack.push((r, true));
                stack.push((n.hi, false));
                stack.push((n.lo, false));
            }
        }
        let root = order[&root];
        ClopenSet { nodes, root }
    }
}

#[derive(Clone, Copy)]
enum BinOp {
    And,
    Or,
}

struct Apply<'a> {
    a: &'a ClopenSet,
    b: &'a ClopenSet,
    op: BinOp,
    out: Builder,
    memo: HashMap<(Ref, Ref), Ref>,
    copied_a: HashMap<Ref, Ref>,
    copied_b: HashMap<Ref, Ref>,
}

impl Apply<'_> {
    fn go(&mut self, ra: Ref, rb: Ref) -> Ref {
        match self.op {
            BinOp::And => {
                if ra == FALSE || rb == FALSE {
                    return FALSE;
                }
                if ra == TRUE {
                    return copy(self.b, rb, &mut self.out, &mut self.copied_b);
                }
                if rb == TRUE {
                    return copy(self.a, ra, &mut self.out, &mut self.copied_a);
                }
            }
            BinOp::Or => {
                if ra == TRUE || rb == TRUE {
                    return TRUE;
                }
                if ra == FALSE {
                    return copy(self.b, rb, &mut self.out, &mut self.copied_b);
                }
                if rb == FALSE {
                    return copy(self.a, ra, &mut self.out, &mut self.copied_a);
                }
            }
        }
        if let Some(&r) = self.memo.get(&(ra, rb)) {
            return r;
        }
        let na = self.a.node(ra);
        let nb = self.b.node(rb);
        let v = na.var.min(nb.var);
        let (alo, ahi) = if na.var == v { (na.lo, na.hi) } else { (ra, ra) };
        let (blo, bhi) = if nb.var == v { (nb.lo, nb.hi) } else { (rb, rb) };
        let lo = self.go(alo, blo);
        let hi = self.go(ahi, bhi);
        let r = self.out.mk(v, lo, hi);
        self.memo.insert((ra, rb), r);
        r
    }
}

fn copy(s: &ClopenSet, r: Ref, out: &mut Builder, memo: &mut HashMap<Ref, Ref>) -> Ref {
    if r < 2 {
        return r;
    }
    if let Some(&x) = memo.get(&r) {
        return x;
    }
    let n = s.node(r);
    let lo = copy(s, n.lo, out, memo);
    let hi = copy(s, n.hi, out, memo);
    let x = out.mk(n.var, lo, hi);
    memo.insert(r, x);
    x
}

/// A clopen subset of `2^ω` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClopenSet {
    nodes: Vec<Node>,
    root: Ref,
}

impl ClopenSet {
    pub fn empty() -> Self {
        Self { nodes: Vec::new(), root: FALSE }
    }

    pub fn full() -> Self {
        Self { nodes: Vec::new(), root: TRUE }
    }

    /// The basic set `[φ]`.
    pub fn cylinder(phi: &PartialAssignment) -> Self {
        let mut b = Builder::default();
        let mut r = TRUE;
        for (c, bit) in phi.0.iter().rev() {
            r = if *bit { b.mk(*c, FALSE, r) } else { b.mk(*c, r, FALSE) };
        }
        b.compact(r)
    }

    /// Union of the given basic sets (which may overlap).
    pub fn from_cylinders<'a, I>(cylinders: I) -> Self
    where
        I: IntoIterator<Item = &'a PartialAssignment>,
    {
        cylinders
            .into_iter()
            .fold(Self::empty(), |acc, phi| acc.union(&Self::cylinder(phi)))
    }

    pub fn is_empty(&self) -> bool {
        self.root == FALSE
    }

    pub fn is_full(&self) -> bool {
        self.root == TRUE
    }

    fn node(&self, r: Ref) -> Node {
        self.nodes[(r - 2) as usize]
    }

    fn apply(&self, other: &Self, op: BinOp) -> Self {
        let mut run = Apply {
            a: self,
            b: other,
            op,
            out: Builder::default(),
            memo: HashMap::new(),
            copied_a: HashMap::new(),
            copied_b: HashMap::new(),
        };
        let root = run.go(self.root, other.root);
        run.out.compact(root)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.apply(other, BinOp::Or)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.apply(other, BinOp::And)
    }

    /// Swapping the terminals keeps the diagram reduced and the layout canonical.
    pub fn complement(&self) -> Self {
        let flip = |r: Ref| match r {
            FALSE => TRUE,
            TRUE => FALSE,
            x => x,
        };
        Self {
            nodes: self
                .nodes
                .iter()
                .map(|n| Node { var: n.var, lo: flip(n.lo), hi: flip(n.hi) })
                .collect(),
            root: flip(self.root),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersect(other).is_empty()
    }

    /// Fixes one coordinate.
    pub fn restrict(&self, coord: Coord, bit: bool) -> Self {
        fn go(
            s: &ClopenSet,
            r: Ref,
            coord: Coord,
            bit: bool,
            out: &mut Builder,
            memo: &mut HashMap<Ref, Ref>,
        ) -> Ref {
            if r < 2 {
                return r;
            }
            if let Some(&x) = memo.get(&r) {
                return x;
            }
            let n = s.node(r);
            let x = if n.var == coord {
                go(s, if bit { n.hi } else { n.lo }, coord, bit, out, memo)
            } else {
                let lo = go(s, n.lo, coord, bit, out, memo);
                let hi = go(s, n.hi, coord, bit, out, memo);
                out.mk(n.var, lo, hi)
            };
            memo.insert(r, x);
            x
        }
        let mut out = Builder::default();
        let root = go(self, self.root, coord, bit, &mut out, &mut HashMap::new());
        out.compact(root)
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Rational {
        if self.root < 2 {
            return if self.root == TRUE { Rational::one() } else { Rational::zero() };
        }
        let half = rational::ratio(1, 2);
        // post-order layout: children precede parents
        let mut m: Vec<Rational> = Vec::with_capacity(self.nodes.len());
        let value = |m: &Vec<Rational>, r: Ref| match r {
            FALSE => Rational::zero(),
            TRUE => Rational::one(),
            x => m[(x - 2) as usize].clone(),
        };
        for n in &self.nodes {
            let v = (value(&m, n.lo) + value(&m, n.hi)) * &half;
            m.push(v);
        }
        value(&m, self.root)
    }

    /// Membership of a total point of `2^ω`.
    pub fn contains(&self, point: impl Fn(Coord) -> bool) -> bool {
        let mut r = self.root;
        while r >= 2 {
            let n = self.node(r);
            r = if point(n.var) { n.hi } else { n.lo };
        }
        r == TRUE
    }

    /// Coordinates mentioned by the canonical diagram.
    pub fn syntactic_support(&self) -> BTreeSet<Coord> {
        self.nodes.iter().map(|n| n.var).collect()
    }

    /// Minimal set of coordinates the set depends on, with the default bound.
    pub fn support(&self) -> Result<BTreeSet<Coord>, CantorError> {
        self.support_with_bound(DEFAULT_SUPPORT_BOUND)
    }

    /// Tests each syntactic coordinate for irrelevance by comparing the two
    /// cofactors; a coordinate belongs to the support iff they differ.
    pub fn support_with_bound(&self, bound: usize) -> Result<BTreeSet<Coord>, CantorError> {
        let syntactic = self.syntactic_support();
        if syntactic.len() > bound {
            return Err(CantorError::SupportTooLarge { size: syntactic.len(), bound });
        }
        Ok(syntactic
            .into_iter()
            .filter(|&c| self.restrict(c, false) != self.restrict(c, true))
            .collect())
    }

    /// The pairwise disjoint cylinders of the canonical form.
    pub fn cylinders(&self) -> Vec<PartialAssignment> {
        let mut out = Vec::new();
        let mut path = PartialAssignment::new();
        self.collect_paths(self.root, &mut path, &mut out);
        out
    }

    fn collect_paths(&self, r: Ref, path: &mut PartialAssignment, out: &mut Vec<PartialAssignment>) {
        match r {
            FALSE => {}
            TRUE => out.push(path.clone()),
            _ => {
                let n = self.node(r);
                path.insert(n.var, false);
                self.collect_paths(n.lo, path, out);
                path.insert(n.var, true);
                self.collect_paths(n.hi, path, out);
                path.0.remove(&n.var);
            }
        }
    }

    /// One cylinder inside the set, if nonempty.
    pub fn witness(&self) -> Option<PartialAssignment> {
        if self.is_empty() {
            return None;
        }
        let mut path = PartialAssignment::new();
        let mut r = self.root;
        while r >= 2 {
            let n = self.node(r);
            // a non-terminal child is never FALSE-only, so prefer any non-FALSE branch
            if n.lo != FALSE {
                path.insert(n.var, false);
                r = n.lo;
            } else {
                path.insert(n.var, true);
                r = n.hi;
            }
        }
        Some(path)
    }

    /// Number of diagram nodes; a size measure for guards.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Returns `λ(a∩b)` after checking that it equals `λ(a)·λ(b)`. Requires the
/// two sets to depend on disjoint coordinates.
pub fn product_measure_check(a: &ClopenSet, b: &ClopenSet) -> Result<Rational, CantorError> {
    let sa = a.support()?;
    let sb = b.support()?;
    let shared: Vec<Coord> = sa.intersection(&sb).copied().collect();
    if !shared.is_empty() {
        return Err(CantorError::OverlappingSupports { shared });
    }
    let joint = a.intersect(b).measure();
    let product = a.measure() * b.measure();
    if joint != product {
        return Err(CantorError::ProductRuleViolated {
            joint: rational::to_string(&joint),
            product: rational::to_string(&product),
        });
    }
    Ok(joint)
}

impl Serialize for ClopenSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.cylinders().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let cyls = Vec::<PartialAssignment>::deserialize(d)?;
        Ok(ClopenSet::from_cylinders(&cyls))
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            FALSE => write!(f, "∅"),
            TRUE => write!(f, "2^ω"),
            _ => {
                let parts: Vec<String> = self.cylinders().iter().map(|c| format!("[{c}]")).collect();
                write!(f, "{}", parts.join(" ∪ "))
            }
        }
    }
}
