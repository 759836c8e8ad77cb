use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Failures, SuiteError};
use crate::report::Check;
use crate::slalom::{diagonal_escape, Slalom};

const LISTS: usize = 100;
const MAX_LIST: usize = 16;

fn random_w(rng: &mut ChaCha8Rng, n: u32) -> Result<Slalom, SuiteError> {
    let mut levels = BTreeMap::new();
    for _ in 0..rng.gen_range(0..3) {
        let k = rng.gen_range(1..=6u32);
        let j = rng.gen_range(0..1u64 << k);
        if k != n {
            levels.insert(k, BTreeSet::from([j]));
        }
    }
    let slots = 1u64 << n;
    let own: BTreeSet<u64> = if n <= 10 && rng.gen_bool(0.5) {
        // all but a few slots
        let gaps: BTreeSet<u64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..slots)).collect();
        (0..slots).filter(|j| !gaps.contains(j)).collect()
    } else {
        (0..rng.gen_range(0..32)).map(|_| rng.gen_range(0..slots)).filter(|&j| j + 1 < slots || slots > 32).collect()
    };
    if !own.is_empty() {
        levels.insert(n, own);
    }
    Ok(Slalom::new(levels)?)
}

pub(super) fn run(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, SuiteError> {
    let mut values = 0u64;
    let mut caught = Failures::new();
    let mut shape = Failures::new();
    for l in 0..LISTS {
        let len = rng.gen_range(0..=MAX_LIST);
        let wns = (1..=len as u32).map(|n| random_w(rng, n)).collect::<Result<Vec<_>, _>>()?;
        let h = rng.gen_range(0..=20u32);
        let f = diagonal_escape(&wns, h);
        if f.len() != (h as usize).max(len) + 1 || f.iter().enumerate().any(|(n, &v)| v >> n != 0) {
            shape.push(l);
        }
        for (i, w) in wns.iter().enumerate() {
            let n = i + 1;
            values += 1;
            if w.get(n as u32).is_some_and(|s| s.contains(&f[n])) {
                caught.push((l, n, f[n]));
            }
        }
    }
    Ok(vec![
        Check::tally("f(n) escapes W_n(n)", values, caught.count).witness(caught.kept),
        Check::tally("escape has the stated length and range", LISTS as u64, shape.count).witness(shape.kept),
    ])
}
