use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Failures, SuiteError};
use crate::cantor::{ClopenSet, PartialAssignment};
use crate::density::{psi0, transfer_check};
use crate::rational::{self, ratio};
use crate::report::Check;

const COORDS: u32 = 6;
const RANDOM_SETS: usize = 1000;

fn point_cylinder(x: u32) -> ClopenSet {
    ClopenSet::cylinder(&PartialAssignment::from_pairs((0..COORDS).map(|c| (c, x >> c & 1 == 1))))
}

/// Truth table over the 64 points of `2^6`.
fn from_table(table: u64) -> ClopenSet {
    ClopenSet::from_cylinders(
        (0..64u32)
            .filter(|x| table >> x & 1 == 1)
            .map(|x| PartialAssignment::from_pairs((0..COORDS).map(|c| (c, x >> c & 1 == 1))))
            .collect::<Vec<_>>()
            .iter(),
    )
}

fn to_table(a: &ClopenSet) -> u64 {
    (0..64u32).filter(|x| a.contains(|c| c < COORDS && x >> c & 1 == 1)).fold(0, |t, x| t | 1 << x)
}

fn random_set(rng: &mut ChaCha8Rng) -> ClopenSet {
    if rng.gen_bool(0.5) {
        from_table(rng.gen())
    } else {
        let k = rng.gen_range(1..=4);
        let cyls: Vec<PartialAssignment> = (0..k)
            .map(|_| {
                let mut phi = PartialAssignment::new();
                for c in 0..COORDS {
                    if rng.gen_bool(0.4) {
                        phi.insert(c, rng.gen());
                    }
                }
                phi
            })
            .collect();
        ClopenSet::from_cylinders(cyls.iter())
    }
}

fn laws(a: &ClopenSet, b: &ClopenSet, fails: &mut Failures<String>) -> Result<(), SuiteError> {
    let r = transfer_check(a, b)?;
    if !r.passed {
        let bad: Vec<&str> = r.checks.iter().filter(|c| !c.holds).map(|c| c.law.as_str()).collect();
        fails.push(bad.join("; "));
    }
    Ok(())
}

pub(super) fn run(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let cylinders: Vec<ClopenSet> = (0..64).map(point_cylinder).collect();
    let mut cyl_measure = Failures::new();
    for (x, c) in cylinders.iter().enumerate() {
        let d = psi0(c)?.density();
        if d != ratio(1, 64) || c.measure() != d {
            cyl_measure.push(x);
        }
    }
    let mut cyl_laws = Failures::new();
    for a in &cylinders {
        for b in &cylinders {
            laws(a, b, &mut cyl_laws)?;
        }
    }

    let sets: Vec<ClopenSet> = (0..RANDOM_SETS).map(|_| random_set(rng)).collect();
    // Point counting over 2^6 is an independent account of the measure.
    let mut counted = Failures::new();
    for (i, a) in sets.iter().enumerate() {
        let table = to_table(a);
        let direct = ratio(table.count_ones() as i64, 64);
        if a.measure() != direct || psi0(a)?.density() != direct || from_table(table) != *a {
            counted.push((i, rational::to_string(&direct)));
        }
    }
    let mut random_laws = Failures::new();
    for i in 0..sets.len() {
        laws(&sets[i], &sets[(i + 1) % sets.len()], &mut random_laws)?;
    }

    Ok(vec![
        Check::tally("cylinders: density equals measure", 64, cyl_measure.count).witness(cyl_measure.kept),
        Check::tally("cylinders: pairwise homomorphism laws", 64 * 64, cyl_laws.count).witness(cyl_laws.kept),
        Check::tally("random sets: measure by point count", RANDOM_SETS as u64, counted.count).witness(counted.kept),
        Check::tally("random sets: homomorphism laws", RANDOM_SETS as u64, random_laws.count)
            .witness(random_laws.kept),
    ])
}
