//! Selectors and φ-ideals: a sufficient condition for `d_A(n) ≥ 2^n`.
//!
//! A selector picks one argument place per non-nullary operation. A set `I`
//! is a φ-ideal when an argument in `I` at the selected place forces the
//! value into `I`. If `A = I ∪ J` for proper φ-ideals that contain every
//! constant, the `2^n` products of `A∖I` and `A∖J` are pairwise disjoint
//! and each has a subuniverse as complement, so each must meet every
//! generating set of `A^n`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{checked_pow, AlgebraError, FiniteAlgebra, Guard, Subpower};
use crate::growth::{oracle_d, GrowthError, ORACLE_CAP};

#[derive(Debug, Error)]
pub enum IdealError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("the algebra must be total")]
    Partial,
    #[error("selector: {0}")]
    Selector(String),
    #[error("|A|^n = {size} exceeds the cap {cap}")]
    Cap { size: u128, cap: u64 },
}

/// One selected place per non-nullary operation, in declaration order.
/// Places are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Selector {
    pub places: Vec<(String, usize)>,
}

impl Selector {
    /// Checks that `places` names exactly the non-nullary operations, in
    /// declaration order, with places within arity.
    pub fn new(alg: &FiniteAlgebra, places: Vec<(String, usize)>) -> Result<Self, IdealError> {
        let ops: Vec<_> = alg.operations().iter().filter(|o| o.arity() > 0).collect();
        if ops.len() != places.len() {
            return Err(IdealError::Selector(format!(
                "expected {} places, got {}",
                ops.len(),
                places.len()
            )));
        }
        for (op, (name, place)) in ops.iter().zip(&places) {
            if op.name() != name {
                return Err(IdealError::Selector(format!(
                    "expected `{}`, got `{name}`",
                    op.name()
                )));
            }
            if *place == 0 || *place > op.arity() {
                return Err(IdealError::Selector(format!(
                    "place {place} of `{name}` is outside 1..={}",
                    op.arity()
                )));
            }
        }
        Ok(Selector { places })
    }

    /// All selectors: first operation's place varies slowest.
    pub fn enumerate(alg: &FiniteAlgebra) -> Vec<Selector> {
        let ops: Vec<_> = alg.operations().iter().filter(|o| o.arity() > 0).collect();
        let mut out = vec![Vec::new()];
        for op in ops {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<(String, usize)>| {
                    (1..=op.arity()).map(move |p| {
                        let mut v = prefix.clone();
                        v.push((op.name().to_string(), p));
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(|places| Selector { places }).collect()
    }

    /// 0-based place per operation index, `None` for nullary operations.
    fn by_index(&self, alg: &FiniteAlgebra) -> Vec<Option<usize>> {
        alg.operations()
            .iter()
            .map(|o| {
                self.places
                    .iter()
                    .find(|(n, _)| n == o.name())
                    .map(|(_, p)| p - 1)
            })
            .collect()
    }
}

fn require_total(alg: &FiniteAlgebra) -> Result<(), IdealError> {
    if alg.is_total() {
        Ok(())
    } else {
        Err(IdealError::Partial)
    }
}

/// Least φ-ideal containing `seed`. Constants are not added.
pub fn ideal_closure(
    alg: &FiniteAlgebra,
    phi: &Selector,
    seed: &[u32],
) -> Result<BTreeSet<u32>, IdealError> {
    require_total(alg)?;
    let places = phi.by_index(alg);
    let size = alg.size();
    let mut inside = vec![false; size];
    let mut queue: Vec<u32> = Vec::new();
    for &s in seed {
        if !inside[s as usize] {
            inside[s as usize] = true;
            queue.push(s);
        }
    }
    // Each new member is tried at the selected place of every operation,
    // with all other arguments free.
    while let Some(a) = queue.pop() {
        for (op, place) in alg.operations().iter().zip(&places) {
            let Some(place) = *place else { continue };
            for (args, v) in op.entries() {
                if args[place] == a && !inside[v as usize] {
                    inside[v as usize] = true;
                    queue.push(v);
                }
            }
        }
    }
    Ok((0..size as u32).filter(|e| inside[*e as usize]).collect())
}

/// `f(ā) ∈ set ⇒ ā_φ(f) ∈ set` for every operation.
pub fn is_irreducible(alg: &FiniteAlgebra, phi: &Selector, set: &BTreeSet<u32>) -> bool {
    let places = phi.by_index(alg);
    alg.operations()
        .iter()
        .zip(&places)
        .all(|(op, place)| match place {
            None => true,
            Some(p) => op
                .entries()
                .iter()
                .all(|(args, v)| !set.contains(v) || set.contains(&args[*p])),
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealCertificate {
    pub selector: Selector,
    /// Size of the least φ-ideal containing each element and the constants.
    pub principal_sizes: Vec<usize>,
    pub i: BTreeSet<u32>,
    pub j: BTreeSet<u32>,
}

/// Values of the nullary operations.
fn constant_values(alg: &FiniteAlgebra) -> Result<Vec<u32>, IdealError> {
    let mut out = Vec::new();
    for op in alg.operations().iter().filter(|o| o.arity() == 0) {
        if let Some(v) = op.apply(&[])? {
            out.push(v);
        }
    }
    Ok(out)
}

/// The first selector (in [`Selector::enumerate`] order) under which every
/// element lies in a proper φ-ideal containing all constants, with such a
/// pair `I ∪ J = A`.
pub fn certify_exponential(alg: &FiniteAlgebra) -> Result<Option<IdealCertificate>, IdealError> {
    require_total(alg)?;
    if alg.size() < 2 {
        return Ok(None);
    }
    let constants = constant_values(alg)?;
    let size = alg.size();
    'selectors: for phi in Selector::enumerate(alg) {
        let mut principal = Vec::with_capacity(size);
        for a in 0..size as u32 {
            let mut seed = constants.clone();
            seed.push(a);
            let ideal = ideal_closure(alg, &phi, &seed)?;
            if ideal.len() == size {
                continue 'selectors;
            }
            principal.push(ideal);
        }
        let principal_sizes = principal.iter().map(BTreeSet::len).collect();
        let (i, j) = two_cover(principal, size);
        return Ok(Some(IdealCertificate {
            selector: phi,
            principal_sizes,
            i,
            j,
        }));
    }
    Ok(None)
}

/// From proper ideals covering `0..size`: an irredundant subcover, largest
/// first, split as (first, union of the rest). Irredundancy makes the rest
/// miss some element of the first, so both parts are proper.
fn two_cover(mut ideals: Vec<BTreeSet<u32>>, size: usize) -> (BTreeSet<u32>, BTreeSet<u32>) {
    ideals.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut cover: Vec<BTreeSet<u32>> = Vec::new();
    let mut covered = BTreeSet::new();
    for ideal in ideals {
        if covered.len() == size {
            break;
        }
        if !ideal.is_subset(&covered) {
            covered.extend(ideal.iter().copied());
            cover.push(ideal);
        }
    }
    // Drop members covered by the others, latest first.
    let mut k = cover.len();
    while k > 0 {
        k -= 1;
        let others: BTreeSet<u32> = cover
            .iter()
            .enumerate()
            .filter(|(x, _)| *x != k)
            .flat_map(|(_, s)| s.iter().copied())
            .collect();
        if others.len() == size && cover.len() > 2 {
            cover.remove(k);
        }
    }
    let i = cover[0].clone();
    let j = cover[1..].iter().flatten().copied().collect();
    (i, j)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundCheck {
    pub n: usize,
    pub d: usize,
    pub required: u64,
    /// `I` and `J` are proper φ-ideals with `I ∪ J = A`.
    pub cover_ok: bool,
    /// Each product of `A∖I`, `A∖J` is φ-irreducible in `A^n` and its
    /// complement is a subuniverse.
    pub products_ok: bool,
    /// Each product meets the supplied generating set, if one was given.
    pub meets_gens: Option<bool>,
}

impl LowerBoundCheck {
    pub fn passed(&self) -> bool {
        self.d as u64 >= self.required
            && self.cover_ok
            && self.products_ok
            && self.meets_gens != Some(false)
    }
}

/// Confirms a certificate at `n` by brute force: `oracle_d ≥ 2^n`, and the
/// product sets behave as the certificate claims.
pub fn verify_lower_bound(
    alg: &FiniteAlgebra,
    cert: &IdealCertificate,
    n: usize,
    gens: Option<&[u64]>,
) -> Result<LowerBoundCheck, IdealError> {
    require_total(alg)?;
    let size = checked_pow(alg.size(), n).unwrap_or(u128::MAX);
    if size > ORACLE_CAP as u128 {
        return Err(IdealError::Cap {
            size,
            cap: ORACLE_CAP,
        });
    }
    let size = size as u64;
    let phi = &cert.selector;
    let all: BTreeSet<u32> = (0..alg.size() as u32).collect();
    let is_ideal = |s: &BTreeSet<u32>| {
        let comp: BTreeSet<u32> = all.difference(s).copied().collect();
        is_irreducible(alg, phi, &comp)
    };
    let cover_ok = cert.i.len() < alg.size()
        && cert.j.len() < alg.size()
        && cert.i.union(&cert.j).count() == alg.size()
        && is_ideal(&cert.i)
        && is_ideal(&cert.j);
    let i_comp: Vec<u32> = all.difference(&cert.i).copied().collect();
    let j_comp: Vec<u32> = all.difference(&cert.j).copied().collect();

    let base = alg.size() as u64;
    let mut products_ok = true;
    let mut meets = true;
    for choice in 0u64..1 << n {
        // Coordinate c draws from A∖J when bit c of `choice` is set.
        let in_product = |code: u64| {
            let mut c = code;
            for pos in (0..n).rev() {
                let digit = (c % base) as u32;
                c /= base;
                let from = if choice >> pos & 1 == 1 {
                    &j_comp
                } else {
                    &i_comp
                };
                if !from.contains(&digit) {
                    return false;
                }
            }
            true
        };
        let outside: Vec<u64> = (0..size).filter(|c| !in_product(*c)).collect();
        let sub = Subpower::generate(alg, n, &outside, Guard(ORACLE_CAP))?;
        if sub.len() != outside.len() || !product_irreducible(alg, phi, n, &in_product) {
            products_ok = false;
        }
        if let Some(g) = gens {
            if !g.iter().any(|c| in_product(*c)) {
                meets = false;
            }
        }
    }
    let d = oracle_d(alg, n)?;
    Ok(LowerBoundCheck {
        n,
        d,
        required: 1 << n,
        cover_ok,
        products_ok,
        meets_gens: gens.map(|_| meets),
    })
}

/// Largest number of argument tuples checked directly per operation.
const DIRECT_LIMIT: u128 = 1 << 22;

/// `f(ā) ∈ T ⇒ ā_φ(f) ∈ T` in `A^n`, by enumerating argument tuples of the
/// power when feasible, else per coordinate (which implies it for products).
fn product_irreducible(
    alg: &FiniteAlgebra,
    phi: &Selector,
    n: usize,
    in_t: &dyn Fn(u64) -> bool,
) -> bool {
    let places = phi.by_index(alg);
    let base = alg.size();
    let power = checked_pow(base, n).expect("checked by caller") as u64;
    for (op, place) in alg.operations().iter().zip(&places) {
        let Some(place) = *place else { continue };
        let m = op.arity();
        if checked_pow(power as usize, m).is_none_or(|c| c > DIRECT_LIMIT) {
            continue;
        }
        let mut args = vec![0u64; m];
        loop {
            let digits: Vec<Vec<u32>> = args
                .iter()
                .map(|a| crate::algebra::PowerTuple::from_code(*a, n, base).digits())
                .collect();
            let mut out = 0u64;
            for c in 0..n {
                let row: Vec<u32> = digits.iter().map(|d| d[c]).collect();
                let v = op.apply(&row).ok().flatten().expect("total operation");
                out = out * base as u64 + v as u64;
            }
            if in_t(out) && !in_t(args[place]) {
                return false;
            }
            let mut i = m;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                args[i] += 1;
                if args[i] < power {
                    i = usize::MAX;
                    break;
                }
                args[i] = 0;
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;
    use crate::constructions::implication_algebra;

    fn left_zero(with_constant: bool) -> FiniteAlgebra {
        let mut ops = vec![Operation::total("m", 2, 2, vec![0, 0, 1, 1]).unwrap()];
        if with_constant {
            ops.push(Operation::constant("e", 2, 0).unwrap());
        }
        FiniteAlgebra::new(vec!["a".into(), "b".into()], ops).unwrap()
    }

    fn sel(alg: &FiniteAlgebra, p: usize) -> Selector {
        Selector::new(alg, vec![(alg.operations()[0].name().to_string(), p)]).unwrap()
    }

    #[test]
    fn closure_examples() {
        let two = implication_algebra(&["0", "1"]).unwrap();
        let phi = sel(&two, 2);
        assert_eq!(
            ideal_closure(&two, &phi, &[1]).unwrap(),
            BTreeSet::from([1])
        );
        assert_eq!(
            ideal_closure(&two, &phi, &[0]).unwrap(),
            BTreeSet::from([0, 1])
        );
        let lz = left_zero(false);
        assert_eq!(
            ideal_closure(&lz, &sel(&lz, 1), &[0]).unwrap(),
            BTreeSet::from([0])
        );
    }

    #[test]
    fn certificates() {
        let vee = implication_algebra(&["01", "10", "11"]).unwrap();
        let cert = certify_exponential(&vee)
            .unwrap()
            .expect("vee is certified");
        assert_eq!(cert.selector.places, [("imp".to_string(), 2)]);
        assert_eq!(cert.i.union(&cert.j).count(), 3);
        assert!(
            certify_exponential(&implication_algebra(&["0", "1"]).unwrap())
                .unwrap()
                .is_none()
        );

        let lz = left_zero(false);
        let cert = certify_exponential(&lz).unwrap().unwrap();
        assert_eq!(cert.selector.places, [("m".to_string(), 1)]);
        assert_eq!((cert.i.len(), cert.j.len()), (1, 1));
        let check = verify_lower_bound(&lz, &cert, 3, None).unwrap();
        assert_eq!(check.d, 8);
        assert!(check.passed());
    }

    #[test]
    fn constants_must_lie_in_the_ideals() {
        // With a constant `a`, A∖{a} is not a subuniverse and d(1) = 1.
        let lz = left_zero(true);
        assert!(certify_exponential(&lz).unwrap().is_none());
        assert_eq!(oracle_d(&lz, 1).unwrap(), 1);
    }

    #[test]
    fn lower_bound_for_vee() {
        let vee = implication_algebra(&["01", "10", "11"]).unwrap();
        let cert = certify_exponential(&vee).unwrap().unwrap();
        for n in 1..=2 {
            let check = verify_lower_bound(&vee, &cert, n, None).unwrap();
            assert!(check.passed(), "{check:?}");
        }
    }

    #[test]
    fn selector_validation() {
        let lz = left_zero(true);
        assert!(Selector::new(&lz, vec![("m".into(), 3)]).is_err());
        assert!(Selector::new(&lz, vec![("e".into(), 1)]).is_err());
        assert!(Selector::new(&lz, vec![]).is_err());
        assert_eq!(Selector::enumerate(&lz).len(), 2);
    }

    #[test]
    fn implication_chain_dichotomy() {
        let chain: [&[&str]; 4] = [
            &["0", "1"],
            &["01", "10", "11"],
            &["00", "01", "10", "11"],
            &["100", "110", "101", "011", "111"],
        ];
        for (i, filter) in chain.iter().enumerate() {
            let alg = implication_algebra(filter).unwrap();
            let cert = certify_exponential(&alg).unwrap();
            assert_eq!(cert.is_some(), i % 2 == 1, "A_{}", i + 1);
            if let Some(cert) = cert {
                for n in 1..=2 {
                    assert!(verify_lower_bound(&alg, &cert, n, None).unwrap().passed());
                }
            }
        }
    }
}
