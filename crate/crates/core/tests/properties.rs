use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use proptest::prelude::*;

use growthlab::ad::{residual, AdPrefix, PointPrefix, Scenario};
use growthlab::bell::{BellClopen, BellNode};
use growthlab::cantor::{product_measure_check, ClopenSet, PartialAssignment};
use growthlab::density::psi0;
use growthlab::kelley::{kappa_lp, kappa_of_seq, min_set_mass, FiniteFamily};
use growthlab::rational::{ratio, Rational};
use growthlab::slalom::{member, GenExpr, OmegaPoint, Slalom};

fn assignment(coords: std::ops::Range<u32>) -> impl Strategy<Value = PartialAssignment> {
    prop::collection::btree_map(coords, any::<bool>(), 0..4).prop_map(PartialAssignment::from_pairs)
}

fn clopen(coords: std::ops::Range<u32>) -> impl Strategy<Value = ClopenSet> {
    prop::collection::vec(assignment(coords), 0..4).prop_map(|cs| ClopenSet::from_cylinders(&cs))
}

proptest! {
    #[test]
    fn measure_is_modular(a in clopen(0..8), b in clopen(0..8)) {
        prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
        prop_assert_eq!(a.complement().measure(), Rational::one() - a.measure());
    }

    #[test]
    fn canonical_form_is_order_free(cs in prop::collection::vec(assignment(0..8), 0..5)) {
        let forward = ClopenSet::from_cylinders(&cs);
        let mut rev = cs.clone();
        rev.reverse();
        prop_assert_eq!(&forward, &ClopenSet::from_cylinders(&rev));
        prop_assert_eq!(&forward, &ClopenSet::from_cylinders(&forward.cylinders()));
        prop_assert_eq!(forward.complement().complement(), forward);
    }

    #[test]
    fn product_rule_on_split_coordinates(a in clopen(0..4), b in clopen(4..8)) {
        prop_assert_eq!(product_measure_check(&a, &b).unwrap(), a.measure() * b.measure());
    }

    #[test]
    fn psi0_is_a_measure_preserving_homomorphism(a in clopen(0..6), b in clopen(0..6)) {
        let (pa, pb) = (psi0(&a).unwrap(), psi0(&b).unwrap());
        prop_assert_eq!(pa.density(), a.measure());
        prop_assert_eq!(psi0(&a.union(&b)).unwrap(), pa.union(&pb).unwrap());
        prop_assert_eq!(psi0(&a.intersect(&b)).unwrap(), pa.intersect(&pb).unwrap());
        prop_assert_eq!(psi0(&a.complement()).unwrap(), pa.complement());
    }
}

fn family() -> impl Strategy<Value = FiniteFamily> {
    (1usize..=5).prop_flat_map(|atoms| {
        prop::collection::vec(prop::collection::btree_set(0..atoms, 1..=atoms), 1..=4)
            .prop_map(move |sets| FiniteFamily::new((0..atoms).map(|a| format!("x{a}")).collect(), sets).unwrap())
    })
}

proptest! {
    #[test]
    fn weak_duality(fam in family(), weights in prop::collection::vec(0u32..5, 5), seq in prop::collection::vec(0usize..4, 1..6)) {
        let kappa = kappa_lp(&fam).unwrap().value;
        let w = &weights[..fam.atoms().len()];
        let total: u32 = w.iter().sum();
        if total > 0 {
            let mu: Vec<Rational> = w.iter().map(|&x| ratio(x as i64, total as i64)).collect();
            prop_assert!(min_set_mass(&fam, &mu) <= kappa);
        }
        let seq: Vec<usize> = seq.into_iter().map(|i| i % fam.len()).collect();
        prop_assert!(kappa_of_seq(&fam, &seq).unwrap() >= kappa);
    }

    #[test]
    fn adding_a_set_never_raises_kappa(fam in family(), extra in prop::collection::btree_set(0usize..5, 1..3)) {
        let extra: BTreeSet<usize> = extra.into_iter().map(|a| a % fam.atoms().len()).collect();
        let bigger = fam.with_set(extra).unwrap();
        prop_assert!(kappa_lp(&bigger).unwrap().value <= kappa_lp(&fam).unwrap().value);
    }
}

fn slalom(below: u32) -> impl Strategy<Value = Slalom> {
    prop::collection::vec(any::<u8>(), below.saturating_sub(1) as usize).prop_map(|bytes| {
        let mut levels = BTreeMap::new();
        for (i, b) in bytes.iter().enumerate() {
            let k = i as u32 + 1;
            let slots = 1u64 << k;
            let set: BTreeSet<u64> = (0..slots).filter(|j| b >> (j % 8) & 1 == 1 && j % 3 != 2).collect();
            if !set.is_empty() && set.len() < slots as usize {
                levels.insert(k, set);
            }
        }
        Slalom::new(levels).unwrap()
    })
}

proptest! {
    #[test]
    fn slalom_lattice_laws(a in slalom(5), b in slalom(5), t in slalom(5), m in 0u32..6) {
        let p = OmegaPoint::new(t.restrict(m), m).unwrap();
        let (ia, ib) = (member(&GenExpr::PosT(a.clone()), &p), member(&GenExpr::PosT(b.clone()), &p));
        if a.is_subset(&b) {
            prop_assert!(!ib || ia);
        }
        match a.union(&b) {
            Ok(u) => prop_assert_eq!(member(&GenExpr::PosT(u), &p), ia && ib),
            // a full level below the height rules out every point
            Err(k) => if k < m { prop_assert!(!(ia && ib)); },
        }
    }
}

fn bell_node(max_len: usize) -> impl Strategy<Value = BellNode> {
    prop::collection::vec(any::<u32>(), 0..=max_len).prop_map(|v| {
        BellNode::new(v.iter().enumerate().map(|(i, x)| x % (i as u32 + 2)).collect()).unwrap()
    })
}

fn bell_set() -> impl Strategy<Value = BellClopen> {
    prop::collection::vec(bell_node(4), 0..5).prop_map(|ns| BellClopen::from_nodes(&ns))
}

proptest! {
    #[test]
    fn bell_canonical_nodes_are_disjoint(a in bell_set(), b in bell_set()) {
        let nodes = a.nodes();
        for (i, x) in nodes.iter().enumerate() {
            for y in &nodes[i + 1..] {
                prop_assert!(!x.extends(y) && !y.extends(x));
            }
        }
        let total: Rational = nodes.iter().map(growthlab::bell::node_measure).sum();
        prop_assert_eq!(&total, &a.measure());
        prop_assert_eq!(&BellClopen::from_nodes(&nodes), &a);
        prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
        prop_assert!(a.difference(&b).intersect(&b).is_empty());
    }
}

proptest! {
    #[test]
    fn residual_shrinks_with_depth(bits in prop::collection::vec(any::<bool>(), 40), tau_bit in any::<bool>()) {
        let family = BTreeMap::from([
            ("a".to_string(), AdPrefix::new((2..30).step_by(2).chain(30..44).collect()).unwrap()),
        ]);
        let pts: Vec<PointPrefix> = (0..4).map(|s| {
            PointPrefix::new(bits.iter().cycle().skip(s * 3).take(48).copied().collect()).unwrap()
        }).collect();
        let s = Scenario::new(BTreeMap::from([("a".to_string(), pts)]), family, 0).unwrap();
        let tau = PartialAssignment::from_pairs([(1, tau_bit)]);
        let mut prev = Rational::one();
        for n in 0..4 {
            let m = residual(&s, &["a"], &tau, n).unwrap().measure();
            prop_assert!(m <= prev && m > Rational::zero());
            prev = m;
        }
    }
}
