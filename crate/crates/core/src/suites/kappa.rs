use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Failures, SuiteError};
use crate::budget::Budget;
use crate::kelley::{kappa_lp, kappa_of_seq, kappa_upper_bounds_with_guard, min_set_mass, FiniteFamily};
use crate::rational::{self, ratio};
use crate::report::Check;

const FAMILIES: usize = 200;
const MAX_LEN: usize = 12;

fn random_family(rng: &mut ChaCha8Rng) -> Result<FiniteFamily, SuiteError> {
    let atoms = rng.gen_range(1..=6usize);
    let k = rng.gen_range(1..=5usize);
    let sets: Vec<Vec<usize>> = (0..k)
        .map(|_| {
            // sparse sets, so that disjoint pairs are common
            let set: Vec<usize> = (0..atoms).filter(|_| rng.gen_bool(0.35)).collect();
            if set.is_empty() {
                vec![rng.gen_range(0..atoms)]
            } else {
                set
            }
        })
        .collect();
    let refs: Vec<&[usize]> = sets.iter().map(Vec::as_slice).collect();
    Ok(FiniteFamily::from_indices(atoms, &refs)?)
}

pub(super) fn run(rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Vec<Check>, SuiteError> {
    let mut equal = Failures::new();
    let mut duality = Failures::new();
    let mut certs = Failures::new();
    let mut longest = 0usize;
    let mut below_one = 0u64;
    for i in 0..FAMILIES {
        let fam = random_family(rng)?;
        let lp = kappa_lp(&fam)?;
        let ub = kappa_upper_bounds_with_guard(&fam, MAX_LEN, budget.subsets)?;
        let stabilized = ub.last().expect("MAX_LEN ≥ 1");
        longest = longest.max(lp.sequence.len());
        below_one += u64::from(lp.value < ratio(1, 1));
        if lp.value != *stabilized {
            equal.push((i, rational::to_string(&lp.value), rational::to_string(stabilized), lp.sequence.len()));
        }
        // every measure bounds κ from below, every sequence from above
        let uniform = vec![ratio(1, fam.atoms().len() as i64); fam.atoms().len()];
        let lower = min_set_mass(&fam, &uniform);
        let trace_ok = lp.trace.iter().all(|t| *t <= lp.value);
        if lower > lp.value || ub.iter().any(|u| *u < lp.value) || !trace_ok {
            duality.push(i);
        }
        let seq_ok = kappa_of_seq(&fam, &lp.sequence)? == lp.value;
        if !lp.verify(&fam)? || !seq_ok {
            certs.push(i);
        }
    }
    Ok(vec![
        Check::tally("LP value equals stabilized upper bound", FAMILIES as u64, equal.count)
            .count("max_len", MAX_LEN as u64)
            .count("longest_certificate", longest as u64)
            .count("kappa_below_one", below_one)
            .witness(equal.kept),
        Check::tally("weak duality", FAMILIES as u64, duality.count).witness(duality.kept),
        Check::tally("certificates verify", FAMILIES as u64, certs.count).witness(certs.kept),
    ])
}
