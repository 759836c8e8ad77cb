use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Failures, SuiteError};
use crate::ad::{positive_lower_bound, residual, AdError, AdPrefix, PointPrefix, Scenario};
use crate::cantor::{ClopenSet, PartialAssignment};
use crate::rational::{self, ratio, Rational};
use crate::report::Check;

const SCENARIOS: usize = 100;
const AD_BOUND: u32 = 8;
const PREFIX_LEN: usize = 28;
const MAX_BLOCK: usize = 6;
const LEVELS_PAST_N: usize = 3;

struct Instance {
    scenario: Scenario,
    labels: Vec<String>,
    tau: PartialAssignment,
}

fn generate(rng: &mut ChaCha8Rng) -> Result<Instance, SuiteError> {
    let m = rng.gen_range(1..=4u32);
    let mut family = BTreeMap::new();
    let mut points = BTreeMap::new();
    let labels: Vec<String> = (0..m).map(|j| format!("a{j}")).collect();
    for (j, label) in labels.iter().enumerate() {
        // shared small part below the bound, then a residue class mod m
        let mut small: Vec<u32> = (0..AD_BOUND).collect();
        small.shuffle(rng);
        small.truncate(rng.gen_range(0..=2));
        small.sort_unstable();
        let mut elems = small;
        let mut x = AD_BOUND + j as u32;
        while elems.len() < PREFIX_LEN {
            elems.push(x);
            x += m * rng.gen_range(1..=3);
        }
        let len = *elems.last().expect("nonempty") as usize + 1;
        let pts = (0..=MAX_BLOCK)
            .map(|_| PointPrefix::new((0..len).map(|_| rng.gen()).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        family.insert(label.clone(), AdPrefix::new(elems)?);
        points.insert(label.clone(), pts);
    }
    let mut dom: Vec<u32> = (0..12).collect();
    dom.shuffle(rng);
    dom.truncate(rng.gen_range(0..=3));
    let tau = PartialAssignment::from_pairs(dom.into_iter().map(|c| (c, rng.gen())));
    Ok(Instance { scenario: Scenario::new(points, family, AD_BOUND)?, labels, tau })
}

/// Measure by enumerating the assignments of the syntactic support.
fn counted_measure(a: &ClopenSet) -> Option<Rational> {
    let support: Vec<u32> = a.syntactic_support().into_iter().collect();
    if support.len() > 14 {
        return None;
    }
    let hits = (0u32..1 << support.len())
        .filter(|x| a.contains(|c| support.iter().position(|&s| s == c).is_some_and(|i| x >> i & 1 == 1)))
        .count();
    Some(ratio(hits as i64, 1) * rational::dyadic(support.len() as u32))
}

pub(super) fn run(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let mut resampled = 0u64;
    let mut levels = 0u64;
    let mut counted = 0u64;
    let mut below = Failures::new();
    let mut product = Failures::new();
    let mut brute = Failures::new();
    let mut errors = Failures::new();
    let mut least_margin: Option<Rational> = None;
    let mut done = 0;
    while done < SCENARIOS {
        let inst = generate(rng)?;
        let alphas: Vec<&str> = inst.labels.iter().map(String::as_str).collect();
        let pb = match positive_lower_bound(&inst.scenario, &alphas, &inst.tau) {
            Ok(pb) => pb,
            Err(AdError::EmptyCore) => {
                resampled += 1;
                continue;
            }
            Err(e) => {
                errors.push(e.to_string());
                done += 1;
                continue;
            }
        };
        done += 1;
        // Later blocks sit on fresh coordinates, so each one removes an
        // independent fraction 2^-(i+1) of what is left.
        let mut expected = pb.core_measure.clone();
        for n in pb.n..=(pb.n + LEVELS_PAST_N).min(MAX_BLOCK) {
            if n > pb.n {
                let keep = Rational::one() - rational::dyadic(n as u32 + 1);
                for _ in 0..pb.m {
                    expected *= &keep;
                }
            }
            let r = residual(&inst.scenario, &alphas, &inst.tau, n)?;
            let mu = r.measure();
            levels += 1;
            if mu <= pb.bound {
                below.push((done, n, rational::to_string(&mu), rational::to_string(&pb.bound)));
            }
            if mu != expected {
                product.push((done, n, rational::to_string(&mu), rational::to_string(&expected)));
            }
            if n == pb.n {
                if let Some(c) = counted_measure(&r) {
                    counted += 1;
                    if c != mu {
                        brute.push((done, rational::to_string(&c), rational::to_string(&mu)));
                    }
                }
            }
            let margin = &mu - &pb.bound;
            if least_margin.as_ref().is_none_or(|l| margin < *l) {
                least_margin = Some(margin);
            }
        }
    }
    let margin = least_margin.unwrap_or_else(Rational::zero);
    Ok(vec![
        Check::tally("scenarios with a certified N", SCENARIOS as u64, errors.count)
            .count("resampled_empty_core", resampled)
            .witness(errors.kept),
        Check::tally("residual strictly above the bound", levels, below.count)
            .value("least_margin", &margin)
            .witness(below.kept),
        Check::tally("residual equals the independent product", levels, product.count).witness(product.kept),
        Check::tally("core measure by enumeration", counted, brute.count).witness(brute.kept),
    ])
}
