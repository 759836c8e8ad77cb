//! The slalom lattice laws, checked against an independent bitmask model of
//! every point of height at most 4.
//!
//! A slalom supported below 4 packs into 14 bits: level 1 in bits 0–1,
//! level 2 in bits 2–5, level 3 in bits 6–13. `(T, m) ∈ T_A` iff
//! `A|m ⊆ T`, i.e. `A & levels_below(m) & !T == 0`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Failures, SuiteError};
use crate::report::{Check, Verdict};
use crate::slalom::{enum_omega, is_infinite, member, GenExpr, OmegaPoint, Slalom, SlalomError};

const MASKS: usize = 1 << 14;
const FIELDS: [(u32, u32, u16); 3] = [(1, 0, 0x3), (2, 2, 0xf), (3, 6, 0xff)];
const PROBES: usize = 16;
const EXPRESSIONS: usize = 2000;
const COUNTED_EXPRESSIONS: usize = 100;
const MEMBER_SAMPLES: usize = 20_000;

fn below(m: u32) -> u16 {
    match m {
        0 | 1 => 0,
        2 => 0x3,
        3 => 0x3f,
        _ => 0x3fff,
    }
}

/// Least level whose field is full, if any.
fn full_level(mask: u16) -> Option<u32> {
    FIELDS.iter().find(|(_, shift, f)| mask >> shift & f == *f).map(|(k, _, _)| *k)
}

fn valid(mask: u16) -> bool {
    full_level(mask).is_none()
}

fn to_slalom(mask: u16) -> Result<Slalom, SlalomError> {
    let mut levels = BTreeMap::new();
    for (k, shift, f) in FIELDS {
        let set: BTreeSet<u64> = (0..f.count_ones() as u64).filter(|j| mask >> (shift as u64 + j) & 1 == 1).collect();
        if !set.is_empty() {
            levels.insert(k, set);
        }
    }
    Slalom::new(levels)
}

struct Model {
    /// `(T, m)` in order of height, then mask.
    points: Vec<(u16, u32)>,
    /// Index of the first point of height 4.
    top: usize,
    words: usize,
    /// Membership bitset of `T_A` for every 14-bit `A`, valid or not.
    table: Vec<u64>,
    slaloms: Vec<u16>,
}

impl Model {
    fn build() -> Self {
        let slaloms: Vec<u16> = (0..MASKS as u16).filter(|&a| valid(a)).collect();
        let mut points = Vec::new();
        let mut top = 0;
        for m in 0..=4u32 {
            if m == 4 {
                top = points.len();
            }
            points.extend(slaloms.iter().filter(|&&t| t & !below(m) == 0).map(|&t| (t, m)));
        }
        let words = points.len().div_ceil(64);
        let mut table = vec![0u64; MASKS * words];
        for a in 0..MASKS {
            let row = &mut table[a * words..(a + 1) * words];
            for (p, &(t, m)) in points.iter().enumerate() {
                if a as u16 & below(m) & !t == 0 {
                    row[p / 64] |= 1 << (p % 64);
                }
            }
        }
        Self { points, top, words, table, slaloms }
    }

    fn row(&self, a: u16) -> &[u64] {
        &self.table[a as usize * self.words..(a as usize + 1) * self.words]
    }

    fn subset(&self, a: u16, b: u16) -> bool {
        self.row(a).iter().zip(self.row(b)).all(|(x, y)| x & !y == 0)
    }

    fn and_count(&self, a: u16, b: u16) -> u32 {
        and_popcount(self.row(a), self.row(b))
    }

    fn count(&self, a: u16) -> u32 {
        self.row(a).iter().map(|x| x.count_ones()).sum()
    }

    fn top_mask(&self) -> Vec<u64> {
        self.bits(|p| p >= self.top)
    }

    fn bits(&self, f: impl Fn(usize) -> bool) -> Vec<u64> {
        let mut out = vec![0u64; self.words];
        for p in (0..self.points.len()).filter(|&p| f(p)) {
            out[p / 64] |= 1 << (p % 64);
        }
        out
    }

    fn omega_point(&self, p: usize) -> Result<OmegaPoint, SlalomError> {
        let (t, m) = self.points[p];
        OmegaPoint::new(to_slalom(t)?, m)
    }
}

#[inline(always)]
fn and_popcount_portable(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn and_popcount_hw(a: &[u64], b: &[u64]) -> u32 {
    and_popcount_portable(a, b)
}

/// `|a ∧ b|`, using the hardware population count when the CPU has one.
fn and_popcount(a: &[u64], b: &[u64]) -> u32 {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("popcnt") {
        // SAFETY: the feature was detected at runtime.
        return unsafe { and_popcount_hw(a, b) };
    }
    and_popcount_portable(a, b)
}

/// Random expression with atoms supported below 4 and heights at most 4.
enum Expr {
    Pos(u16),
    Height(u16, u32),
    Const(bool),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
}

fn sparse_slalom(rng: &mut ChaCha8Rng, below_level: u32, p: f64) -> u16 {
    loop {
        let m = (0..14).filter(|_| rng.gen_bool(p)).fold(0u16, |m, b| m | 1 << b) & below(below_level);
        if valid(m) {
            return m;
        }
    }
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..10) {
            0 => Expr::Const(rng.gen()),
            1..=5 => Expr::Pos(sparse_slalom(rng, 4, 0.15)),
            _ => {
                let n = rng.gen_range(0..=4);
                Expr::Height(sparse_slalom(rng, n, 0.3), n)
            }
        };
    }
    match rng.gen_range(0..3) {
        0 => Expr::Not(Box::new(random_expr(rng, depth - 1))),
        1 => Expr::And((0..rng.gen_range(2..=3)).map(|_| random_expr(rng, depth - 1)).collect()),
        _ => Expr::Or((0..rng.gen_range(2..=3)).map(|_| random_expr(rng, depth - 1)).collect()),
    }
}

impl Expr {
    fn to_gen(&self) -> Result<GenExpr, SlalomError> {
        Ok(match self {
            Expr::Const(b) => GenExpr::Const(*b),
            Expr::Pos(a) => GenExpr::PosT(to_slalom(*a)?),
            Expr::Height(s, n) => GenExpr::Height(OmegaPoint::new(to_slalom(*s)?, *n)?),
            Expr::And(es) => GenExpr::and(es.iter().map(Expr::to_gen).collect::<Result<Vec<_>, _>>()?),
            Expr::Or(es) => GenExpr::or(es.iter().map(Expr::to_gen).collect::<Result<Vec<_>, _>>()?),
            Expr::Not(e) => GenExpr::not(e.to_gen()?),
        })
    }

    fn eval(&self, model: &Model) -> Vec<u64> {
        let all = model.bits(|_| true);
        match self {
            Expr::Const(true) => all,
            Expr::Const(false) => vec![0; model.words],
            Expr::Pos(a) => model.row(*a).to_vec(),
            Expr::Height(s, n) => {
                model.bits(|p| {
                    let (t, m) = model.points[p];
                    m >= *n && t & below(*n) == *s
                })
            }
            Expr::And(es) => es.iter().fold(all, |acc, e| acc.iter().zip(e.eval(model)).map(|(x, y)| x & y).collect()),
            Expr::Or(es) => {
                es.iter().fold(vec![0; model.words], |acc, e| acc.iter().zip(e.eval(model)).map(|(x, y)| x | y).collect())
            }
            Expr::Not(e) => all.iter().zip(e.eval(model)).map(|(x, y)| x & !y).collect(),
        }
    }
}

pub(super) fn run(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let model = Model::build();
    let n_points = model.points.len() as u64;

    // the model enumerates exactly the library's points
    let library: BTreeSet<OmegaPoint> = enum_omega(4)?.into_iter().collect();
    let modelled: BTreeSet<OmegaPoint> =
        (0..model.points.len()).map(|p| model.omega_point(p)).collect::<Result<_, _>>()?;
    let universe = Check::pass_if("model enumerates the same points", library == modelled)
        .count("points", n_points)
        .count("slaloms", model.slaloms.len() as u64);

    // library membership against the model
    let mut membership = Failures::new();
    let small: Vec<u16> = model.slaloms.iter().copied().filter(|a| a & !below(3) == 0).collect();
    let mut pairs: Vec<(u16, usize)> = small.iter().flat_map(|&a| (0..model.top.min(50)).map(move |p| (a, p))).collect();
    for _ in 0..MEMBER_SAMPLES {
        let a = model.slaloms[rng.gen_range(0..model.slaloms.len())];
        pairs.push((a, rng.gen_range(0..model.points.len())));
    }
    for &(a, p) in &pairs {
        let lib = member(&GenExpr::PosT(to_slalom(a)?), &model.omega_point(p)?);
        if lib != (model.row(a)[p / 64] >> (p % 64) & 1 == 1) {
            membership.push((a, p));
        }
    }

    // monotonicity: A ⊆ B gives T_B ⊆ T_A, over every submask of every slalom
    let mut mono = Failures::new();
    let mut mono_pairs = 0u64;
    for &b in &model.slaloms {
        let mut a = b;
        loop {
            mono_pairs += 1;
            if !model.subset(b, a) {
                mono.push((a, b));
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    // and A ⊄ B gives T_B ⊄ T_A, for a sample of B against every A
    let mut converse = Failures::new();
    let mut converse_pairs = 0u64;
    for _ in 0..PROBES {
        let b = model.slaloms[rng.gen_range(0..model.slaloms.len())];
        for &a in model.slaloms.iter().filter(|&&a| a & !b != 0) {
            converse_pairs += 1;
            if model.subset(b, a) {
                converse.push((a, b));
            }
        }
    }

    // meets: T_{A∪B} = T_A ∩ T_B. Inclusion T_U ⊆ T_A for every A ⊆ U (all
    // 14-bit U) plus equal cardinalities give equality.
    let mut incl = Failures::new();
    let mut incl_pairs = 0u64;
    for u in 0..MASKS as u16 {
        let mut a = u;
        loop {
            incl_pairs += 1;
            if !model.subset(u, a) {
                incl.push((a, u));
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & u;
        }
    }
    let counts: Vec<u32> = (0..MASKS as u16).map(|u| model.count(u)).collect();
    let mut meet = Failures::new();
    let mut meet_pairs = 0u64;
    // blocks of A rows share one pass over the B rows
    const TILE: usize = 16;
    for t in (0..model.slaloms.len()).step_by(TILE) {
        let tile = &model.slaloms[t..(t + TILE).min(model.slaloms.len())];
        for (j, &b) in model.slaloms.iter().enumerate().skip(t) {
            for (i, &a) in tile.iter().enumerate() {
                if t + i > j {
                    break;
                }
                meet_pairs += 1;
                if model.and_count(a, b) != counts[(a | b) as usize] {
                    meet.push((a, b));
                }
            }
        }
    }

    // finiteness: T_A ∩ T_B is infinite iff it has a member of height 4; when
    // finite, nothing lies above the first conflicting level.
    let top = model.top_mask();
    let mut classify = Failures::new();
    let mut classified = 0u64;
    let mut probes: Vec<u16> = small.clone();
    for _ in 0..PROBES {
        probes.push(model.slaloms[rng.gen_range(0..model.slaloms.len())]);
    }
    for (i, &b) in probes.iter().enumerate() {
        let partners: Vec<u16> = if i < small.len() { small[i..].to_vec() } else { model.slaloms.clone() };
        let tb = to_slalom(b)?;
        for a in partners {
            classified += 1;
            let e = GenExpr::and([GenExpr::PosT(to_slalom(a)?), GenExpr::PosT(tb.clone())]);
            let lib = is_infinite(&e)?;
            let u = a | b;
            let high = model.row(u).iter().zip(&top).any(|(x, t)| x & t != 0);
            let above_conflict = full_level(u).is_some_and(|k| {
                (0..model.points.len()).any(|p| model.points[p].1 > k && model.row(u)[p / 64] >> (p % 64) & 1 == 1)
            });
            if lib != high || above_conflict || lib != valid(u) {
                classify.push((a, b));
            }
        }
    }

    // decide_infinite against the model on random Boolean combinations
    let mut exprs = Failures::new();
    let mut counted = Failures::new();
    let mut too_large = 0u64;
    let mut infinite = 0u64;
    for i in 0..EXPRESSIONS {
        let e = random_expr(rng, 3);
        let g = e.to_gen()?;
        let bits = e.eval(&model);
        let high = bits.iter().zip(&top).any(|(x, t)| x & t != 0);
        match is_infinite(&g) {
            Ok(lib) => {
                infinite += lib as u64;
                if lib != high {
                    exprs.push(g.clone());
                }
            }
            Err(SlalomError::ExpressionTooLarge) => too_large += 1,
            Err(err) => return Err(err.into()),
        }
        if i < COUNTED_EXPRESSIONS {
            let lib = (0..model.points.len()).map(|p| Ok(member(&g, &model.omega_point(p)?))).collect::<Result<Vec<bool>, SlalomError>>()?;
            if lib.iter().enumerate().any(|(p, &b)| b != (bits[p / 64] >> (p % 64) & 1 == 1)) {
                counted.push(g);
            }
        }
    }

    let verdict = if exprs.count > 0 {
        Verdict::Fail
    } else if too_large > 0 {
        Verdict::Unknown
    } else {
        Verdict::Pass
    };
    Ok(vec![
        universe,
        Check::tally("library membership matches the model", pairs.len() as u64, membership.count)
            .witness(membership.kept),
        Check::tally("monotonicity, all A ⊆ B", mono_pairs, mono.count).witness(mono.kept),
        Check::tally("monotonicity converse, sampled B", converse_pairs, converse.count).witness(converse.kept),
        Check::tally("meet inclusion, all A ⊆ U", incl_pairs, incl.count).witness(incl.kept),
        Check::tally("meet cardinality, all pairs", meet_pairs, meet.count).witness(meet.kept),
        Check::tally("finiteness of pairwise meets", classified, classify.count).witness(classify.kept),
        Check::new("infinite-decision on random expressions", verdict)
            .count("total", EXPRESSIONS as u64)
            .count("failed", exprs.count)
            .count("infinite", infinite)
            .count("too_large", too_large)
            .witness(exprs.kept),
        Check::tally("expression membership matches the model", COUNTED_EXPRESSIONS as u64, counted.count)
            .witness(counted.kept),
    ])
}
