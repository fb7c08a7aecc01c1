//! Property tests against naive reference implementations.

mod common;

use std::collections::BTreeSet;

use algebra_growth::algebra::{
    closure, one_point_completion, power_apply, FiniteAlgebra, Guard, Operation, PowerTuple,
};
use algebra_growth::growth::{d_exact, oracle_d};
use algebra_growth::ideals::{ideal_closure, Selector};
use common::random_algebra;
use proptest::prelude::*;

/// Fixpoint of applying every operation to every argument tuple.
fn naive_closure(alg: &FiniteAlgebra, n: usize, gens: &[PowerTuple]) -> BTreeSet<u64> {
    let mut set: BTreeSet<u64> = gens.iter().map(|g| g.code).collect();
    loop {
        let members: Vec<PowerTuple> = set
            .iter()
            .map(|&c| PowerTuple::from_code(c, n, alg.size()))
            .collect();
        let mut grew = false;
        for op in alg.operations() {
            let k = op.arity();
            let total = members.len().pow(k as u32);
            for mut idx in 0..total {
                let mut args = Vec::with_capacity(k);
                for _ in 0..k {
                    args.push(members[idx % members.len()]);
                    idx /= members.len();
                }
                if let Some(v) = power_apply(op, &args, n).unwrap() {
                    grew |= set.insert(v.code);
                }
            }
        }
        if !grew {
            return set;
        }
    }
}

fn elements(alg: &FiniteAlgebra) -> Vec<u32> {
    (0..alg.size() as u32).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn closure_matches_naive_fixpoint(seed in any::<u64>(), partial in any::<bool>(), n in 1usize..=3, mask in any::<u64>()) {
        let alg = random_algebra(seed, 1..=3, 2, partial);
        let power = alg.size().pow(n as u32) as u64;
        let gens: Vec<PowerTuple> = (0..power)
            .filter(|c| mask >> (c % 64) & 1 == 1 && c % 5 == 0)
            .map(|c| PowerTuple::from_code(c, n, alg.size()))
            .collect();
        let fast: BTreeSet<u64> = closure(&alg, n, &gens).unwrap().iter().map(|t| t.code).collect();
        prop_assert_eq!(fast, naive_closure(&alg, n, &gens));
    }

    #[test]
    fn d_exact_agrees_with_oracle(seed in any::<u64>(), partial in any::<bool>(), n in 0usize..=3) {
        let alg = random_algebra(seed, 1..=3, 2, partial);
        let exact = d_exact(&alg, n, Guard::default()).unwrap();
        prop_assert_eq!(exact.value, oracle_d(&alg, n).unwrap());
    }

    #[test]
    fn ideal_closure_is_a_closure_operator(seed in any::<u64>(), a in any::<u8>(), b in any::<u8>()) {
        let alg = random_algebra(seed, 1..=4, 2, false);
        let pick = |m: u8| -> Vec<u32> { elements(&alg).into_iter().filter(|e| m >> e & 1 == 1).collect() };
        let (s, t) = (pick(a), pick(b));
        for phi in Selector::enumerate(&alg) {
            let cs = ideal_closure(&alg, &phi, &s).unwrap();
            // Extensive.
            prop_assert!(s.iter().all(|e| cs.contains(e)));
            // Idempotent.
            let again: Vec<u32> = cs.iter().copied().collect();
            prop_assert_eq!(&ideal_closure(&alg, &phi, &again).unwrap(), &cs);
            // Monotone.
            let st: Vec<u32> = s.iter().chain(&t).copied().collect();
            let cst = ideal_closure(&alg, &phi, &st).unwrap();
            prop_assert!(cs.is_subset(&cst));
            // The closure of a union is the union of the principal closures.
            let mut union = BTreeSet::new();
            for e in &st {
                union.extend(ideal_closure(&alg, &phi, &[*e]).unwrap());
            }
            prop_assert_eq!(cst, union);
        }
    }
}

#[test]
fn one_element_completion_gains_a_generator() {
    // With one element the meet never produces 0, so d(1) moves from 1 to 2.
    let f = Operation::total("f", 2, 1, vec![0]).unwrap();
    let alg = FiniteAlgebra::numbered(1, vec![f]).unwrap();
    let done = one_point_completion(&alg, "bottom").unwrap();
    assert_eq!(d_exact(&alg, 1, Guard::default()).unwrap().value, 1);
    assert_eq!(d_exact(&done, 1, Guard::default()).unwrap().value, 2);
}
