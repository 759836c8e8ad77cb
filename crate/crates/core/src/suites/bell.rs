use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Failures, SuiteError};
use crate::bell::{
    iso_condition_check, malo_ladder, node_measure, nodes_at_depth, strict_positivity_check, taylor_check,
    v_tail_bound, BellClopen, BellError, BellNode, PiPrefix,
};
use crate::budget::Budget;
use crate::rational::{self, ratio, Rational};
use crate::report::{Check, Verdict};

const MASS_DEPTH: usize = 8;
const LADDER_INSTANCES: usize = 100;
const LADDER_ORACLE_DEPTH: usize = 6;
const RANDOM_ISO: usize = 500;
const POSITIVITY_INSTANCES: usize = 100;

fn random_node(rng: &mut ChaCha8Rng, len: usize) -> BellNode {
    BellNode::new((0..len).map(|i| rng.gen_range(0..=i as u32 + 1)).collect()).expect("entries within arity")
}

/// A node of length `len` that follows `guide` for a while with some probability.
fn guided_node(rng: &mut ChaCha8Rng, guide: &BellNode, len: usize) -> BellNode {
    let mut t = random_node(rng, len).seq().to_vec();
    if rng.gen_bool(0.5) {
        let keep = rng.gen_range(0..=guide.len().min(len));
        t[..keep].copy_from_slice(&guide.seq()[..keep]);
    }
    BellNode::new(t).expect("entries within arity")
}

fn random_pi(rng: &mut ChaCha8Rng, height: usize, guide: &BellNode) -> PiPrefix {
    let mut rows: Vec<BellNode> = Vec::with_capacity(height + 1);
    for i in 0..=height {
        let row = match rows.last() {
            Some(prev) if rng.gen_bool(0.4) => prev.child(rng.gen_range(0..=i as u32 + 1)),
            _ => guided_node(rng, guide, i + 1),
        };
        rows.push(row);
    }
    PiPrefix::new(rows).expect("row lengths match")
}

/// `λ(A_{l+1} ∖ A_l)` by summing the nodes of length `l+1` that extend some
/// row `π_j(l)` and no earlier row.
fn ladder_by_nodes(pis: &[PiPrefix], l: usize) -> Rational {
    nodes_at_depth(&BellNode::root(), l + 1)
        .iter()
        .filter(|t| {
            let hit = |i: usize| pis.iter().any(|p| p.rows().get(i).is_some_and(|r| t.extends(r)));
            hit(l) && !(0..l).any(hit)
        })
        .map(node_measure)
        .sum()
}

pub(super) fn measure(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let mut mass = Failures::new();
    for d in 0..=MASS_DEPTH {
        let nodes = nodes_at_depth(&BellNode::root(), d);
        let total: Rational = nodes.iter().map(node_measure).sum();
        let expected_count: u64 = (2..=d as u64 + 1).product();
        if total != Rational::one() || nodes.len() as u64 != expected_count || !BellClopen::from_nodes(&nodes).is_full() {
            mass.push((d, rational::to_string(&total)));
        }
    }

    let mut ladder = Failures::new();
    let mut ladder_oracle = Failures::new();
    let mut steps = 0u64;
    let mut oracle_steps = 0u64;
    for inst in 0..LADDER_INSTANCES {
        let m = rng.gen_range(1..=4);
        let h = rng.gen_range(0..=7);
        let pis: Vec<PiPrefix> = (0..m).map(|_| random_pi(rng, h, &BellNode::root())).collect();
        for step in malo_ladder(&pis) {
            steps += 1;
            if !step.holds {
                ladder.push((inst, step.l, rational::to_string(&step.measure)));
            }
            if step.l < LADDER_ORACLE_DEPTH {
                oracle_steps += 1;
                if ladder_by_nodes(&pis, step.l) != step.measure {
                    ladder_oracle.push((inst, step.l));
                }
            }
        }
    }

    let mut taylor = Failures::new();
    let mut grid = 0u64;
    for m in 1..=5u32 {
        for n in 3 * m + 1..=60 {
            grid += 1;
            let t = taylor_check(m, n);
            if !t.holds {
                taylor.push((m, n));
            }
        }
    }

    // 40 exact terms of the tail stay below the majorant
    let mut tail = Failures::new();
    for h in 0..=10usize {
        for m in 1..=5usize {
            let partial: Rational = (h + 1..=h + 40).map(|l| rational::inv_factorial(l as u32 + 2)).sum();
            if ratio(m as i64, 1) * partial >= v_tail_bound(h, m) {
                tail.push((h, m));
            }
        }
    }

    Ok(vec![
        Check::tally("mass of all nodes at each depth is 1", MASS_DEPTH as u64 + 1, mass.count).witness(mass.kept),
        Check::tally("ladder increments within m/(l+2)!", steps, ladder.count)
            .count("instances", LADDER_INSTANCES as u64)
            .witness(ladder.kept),
        Check::tally("ladder increments by node enumeration", oracle_steps, ladder_oracle.count)
            .witness(ladder_oracle.kept),
        Check::tally("factorial tail inequality", grid, taylor.count).witness(taylor.kept),
        Check::tally("tail majorant dominates partial sums", 55, tail.count).witness(tail.kept),
    ])
}

/// All prefixes of height `h`.
fn all_pis(h: usize) -> Vec<PiPrefix> {
    let mut partial: Vec<Vec<BellNode>> = vec![Vec::new()];
    for i in 0..=h {
        let rows = nodes_at_depth(&BellNode::root(), i + 1);
        partial = partial
            .iter()
            .flat_map(|p| {
                rows.iter().map(move |r| {
                    let mut q = p.clone();
                    q.push(r.clone());
                    q
                })
            })
            .collect();
    }
    partial.into_iter().map(|rows| PiPrefix::new(rows).expect("row lengths match")).collect()
}

#[derive(Default)]
struct IsoTally {
    total: u64,
    infinite: u64,
    unknown: u64,
    failed: Vec<String>,
    failed_count: u64,
}

impl IsoTally {
    fn run(&mut self, s: &BellNode, pos: &[PiPrefix], neg: &[PiPrefix], budget: u64) -> Result<(), SuiteError> {
        self.total += 1;
        let r = match iso_condition_check(s, pos, neg, budget) {
            Ok(r) => r,
            Err(BellError::DepthGuard { .. }) => {
                self.unknown += 1;
                return Ok(());
            }
            Err(e) => return Err(e.into()),
        };
        if r.v_side != crate::bell::VVerdict::Empty {
            self.infinite += 1;
        }
        match r.sweep_agrees {
            None => self.unknown += 1,
            Some(agrees) if agrees && r.consistent => {}
            Some(_) => {
                self.failed_count += 1;
                if self.failed.len() < 3 {
                    self.failed.push(format!("s={s} pos={pos:?} neg={neg:?}"));
                }
            }
        }
        Ok(())
    }

    fn check(self, name: &str) -> Check {
        let verdict = if self.failed_count > 0 {
            Verdict::Fail
        } else if self.unknown > 0 {
            Verdict::Unknown
        } else {
            Verdict::Pass
        };
        Check::new(name, verdict)
            .count("total", self.total)
            .count("failed", self.failed_count)
            .count("unknown", self.unknown)
            .count("infinite", self.infinite)
            .witness(self.failed)
    }
}

pub(super) fn iso(rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Vec<Check>, SuiteError> {
    let root = BellNode::root();
    let shallow: Vec<BellNode> = (0..=1).flat_map(|d| nodes_at_depth(&root, d)).collect();

    // heights 0..=2: at most one positive and one negative prefix
    let mut small = IsoTally::default();
    for h in 0..=2 {
        let pis = all_pis(h);
        let choices: Vec<Vec<PiPrefix>> =
            std::iter::once(Vec::new()).chain(pis.iter().map(|p| vec![p.clone()])).collect();
        let starts: &[BellNode] = if h == 2 { std::slice::from_ref(&root) } else { &shallow };
        for s in starts {
            for pos in &choices {
                for neg in &choices {
                    small.run(s, pos, neg, budget.nodes)?;
                }
            }
        }
        if h == 0 {
            // both prefixes of height 0 on each side
            for s in &shallow {
                small.run(s, &pis, &[], budget.nodes)?;
                small.run(s, &[], &pis, budget.nodes)?;
                small.run(s, &pis, &pis, budget.nodes)?;
            }
        }
    }

    // height 3: one prefix, on either side or both
    let mut height3 = IsoTally::default();
    for p in all_pis(3) {
        let one = std::slice::from_ref(&p);
        height3.run(&root, one, &[], budget.nodes)?;
        height3.run(&root, &[], one, budget.nodes)?;
        height3.run(&root, one, one, budget.nodes)?;
    }

    let mut random = IsoTally::default();
    for _ in 0..RANDOM_ISO {
        let d = rng.gen_range(0..=2);
        let s = random_node(rng, d);
        let side = |k: usize, rng: &mut ChaCha8Rng| -> Vec<PiPrefix> {
            (0..k)
                .map(|_| {
                    let h = rng.gen_range(0..=5);
                    random_pi(rng, h, &s)
                })
                .collect()
        };
        let (np, nn) = (rng.gen_range(0..=2), rng.gen_range(0..=3));
        let pos = side(np, rng);
        let neg = side(nn, rng);
        random.run(&s, &pos, &neg, budget.nodes)?;
    }

    Ok(vec![
        small.check("exhaustive grid, heights 0..2"),
        height3.check("exhaustive single prefixes, height 3"),
        random.check("random instances, heights up to 5"),
    ])
}

pub(super) fn positivity(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let mut failed = Failures::new();
    let mut resampled = 0u64;
    let mut least_gap: Option<Rational> = None;
    let mut done = 0;
    while done < POSITIVITY_INSTANCES {
        let m = rng.gen_range(1..=3usize);
        let d = rng.gen_range(0..=2);
        let s = random_node(rng, d);
        let n = s.len().max(3 * m) + 1 + rng.gen_range(0..=2);
        let pis: Vec<PiPrefix> = (0..m)
            .map(|_| {
                let h = n + rng.gen_range(0..=3);
                random_pi(rng, h, &s)
            })
            .collect();
        let r = match strict_positivity_check(&s, &pis, n) {
            Ok(r) => r,
            Err(BellError::HypothesisFailed(_)) => {
                resampled += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        done += 1;
        if !r.passed || r.gap <= Rational::zero() {
            failed.push((done, rational::to_string(&r.gap)));
        }
        if least_gap.as_ref().is_none_or(|g| r.gap < *g) {
            least_gap = Some(r.gap);
        }
    }
    Ok(vec![Check::tally("positive gap below the basic set", POSITIVITY_INSTANCES as u64, failed.count)
        .count("resampled_covered", resampled)
        .value("least_gap", &least_gap.unwrap_or_else(Rational::zero))
        .witness(failed.kept)])
}
