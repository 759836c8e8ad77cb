use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Failures, SuiteError};
use crate::budget::Budget;
use crate::kelley::kappa_lp;
use crate::rational::{self, ratio, Rational};
use crate::report::Check;
use crate::slalom::{a_w_measure, cl2_witness, class_atomization, class_test, OmegaPoint, Slalom};

const CLASSES: usize = 100;

fn random_levels(rng: &mut ChaCha8Rng, levels: std::ops::Range<u32>) -> BTreeMap<u32, BTreeSet<u64>> {
    let mut out = BTreeMap::new();
    for k in levels {
        let slots = 1u64 << k;
        let set: BTreeSet<u64> = (0..slots).filter(|_| rng.gen_bool(0.4)).collect();
        if !set.is_empty() && set.len() < slots as usize {
            out.insert(k, set);
        }
    }
    out
}

/// `S ∪ tail` with slots added at random while the tail weight stays below `1−δ`.
pub(super) fn member_of_class(rng: &mut ChaCha8Rng, class: &OmegaPoint, delta: &Rational) -> Result<Slalom, SuiteError> {
    let limit = Rational::one() - delta;
    let lo = class.height().max(1);
    let mut v = class.slalom().clone();
    for _ in 0..rng.gen_range(0..12) {
        // low levels carry the weight that makes members conflict
        let mut k = lo;
        while k < lo + 4 && rng.gen_bool(0.4) {
            k += 1;
        }
        let j = rng.gen_range(0..1u64 << k);
        // a union filling a whole level is rejected too
        if let Ok(grown) = v.union(&Slalom::point(k, j)?) {
            if grown.tail_weight(class.height()) < limit {
                v = grown;
            }
        }
    }
    Ok(v)
}

pub(super) fn run(rng: &mut ChaCha8Rng, budget: &Budget) -> Result<Vec<Check>, SuiteError> {
    let deltas = [ratio(1, 4), ratio(1, 2), ratio(3, 4)];
    let mut slaloms = 0u64;
    let mut measure = Failures::new();
    let mut witness = Failures::new();
    let mut fragmentation = Failures::new();
    let mut least_kappa_margin: Option<Rational> = None;
    let mut split = 0u64;
    for c in 0..CLASSES {
        let delta = &deltas[c % deltas.len()];
        let n = rng.gen_range(0..=3u32);
        let class = OmegaPoint::new(Slalom::new(random_levels(rng, 1..n))?, n)?;
        let k = rng.gen_range(1..=8usize);
        let vs = (0..k).map(|_| member_of_class(rng, &class, delta)).collect::<Result<Vec<_>, _>>()?;

        for (i, v) in vs.iter().enumerate() {
            slaloms += 1;
            let aw = a_w_measure(v, n);
            if class_test(v, &class, delta).is_err() || aw.exact <= *delta || aw.exact < aw.union_bound {
                measure.push((c, i, rational::to_string(&aw.exact)));
            }
        }

        let w = cl2_witness(&vs, &class, delta)?;
        let escapes = w.indices.iter().all(|&i| {
            vs[i].levels().filter(|(lvl, _)| *lvl >= n).all(|(lvl, set)| w.escape.get(&lvl).is_some_and(|j| !set.contains(j)))
        });
        let large = ratio(w.indices.len() as i64, 1) >= delta * ratio(k as i64, 1);
        if !(w.bound_met && large && w.infinite && escapes) {
            witness.push((c, w.indices.clone(), k));
        }

        let fam = class_atomization(&vs, &class, budget.subsets)?;
        split += u64::from(fam.atoms().len() > 1);
        let kappa = kappa_lp(&fam)?.value;
        let margin = &kappa - delta;
        if kappa <= *delta {
            fragmentation.push((c, rational::to_string(&kappa), rational::to_string(delta)));
        }
        if least_kappa_margin.as_ref().is_none_or(|l| margin < *l) {
            least_kappa_margin = Some(margin);
        }
    }
    Ok(vec![
        Check::tally("escape measure above δ", slaloms, measure.count).witness(measure.kept),
        Check::tally("large subfamily with infinite intersection", CLASSES as u64, witness.count)
            .witness(witness.kept),
        Check::tally("intersection number of the atomization above δ", CLASSES as u64, fragmentation.count)
            .count("several_atoms", split)
            .value("least_margin", &least_kappa_margin.unwrap_or_else(|| ratio(0, 1)))
            .witness(fragmentation.kept),
    ])
}
