//! Exact values of `d_A(n)`, the least size of a generating set of `A^n`,
//! and of its adjoint `h_A(g)`, the largest `n` with `d_A(n) ≤ g`.

use std::time::{Duration, Instant};

use std::collections::HashSet;

use thiserror::Error;

mod oracle;

pub use oracle::{oracle_d, ORACLE_CAP};

use crate::algebra::{checked_pow, decode, AlgebraError, FiniteAlgebra, Guard, Subpower};

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("power of size {size} exceeds the oracle cap {cap}")]
    OracleCap { size: u128, cap: u64 },
    #[error("operation `{0}` has too many arguments for the essential-element analysis")]
    ArityTooLarge(String),
    #[error("inclusion-exclusion count overflowed")]
    Overflow,
}

/// Largest arity the row-selection analyses handle (state sets of size `2^arity`).
const MAX_ANALYSIS_ARITY: usize = 20;

/// For one operation: for each value `v`, the distinct sets of argument
/// positions that equal `v`, over the rows whose value is `v`.
struct EqProfile {
    arity: usize,
    by_value: Vec<Vec<u32>>,
}

fn eq_profiles(alg: &FiniteAlgebra) -> Result<Vec<EqProfile>, GrowthError> {
    let mut out = Vec::new();
    for op in alg.operations().iter().filter(|o| o.arity() > 0) {
        if op.arity() > MAX_ANALYSIS_ARITY {
            return Err(GrowthError::ArityTooLarge(op.name().to_string()));
        }
        let mut by_value = vec![Vec::new(); alg.size()];
        for (args, v) in op.entries() {
            let mask = args
                .iter()
                .enumerate()
                .filter(|(_, a)| **a == v)
                .fold(0u32, |m, (j, _)| m | (1 << j));
            by_value[v as usize].push(mask);
        }
        for masks in &mut by_value {
            masks.sort_unstable();
            masks.dedup();
        }
        out.push(EqProfile {
            arity: op.arity(),
            by_value,
        });
    }
    Ok(out)
}

fn nullary_tuples(alg: &FiniteAlgebra, n: usize) -> Vec<u64> {
    alg.operations()
        .iter()
        .filter(|o| o.arity() == 0)
        .map(|o| {
            let v = o
                .apply(&[])
                .ok()
                .flatten()
                .expect("nullary operations are total");
            crate::algebra::PowerTuple::constant(v, n, alg.size()).code
        })
        .collect()
}

/// Whether some row choice, one row per coordinate with value `e_i`, leaves
/// no argument column equal to `e`.
fn derivable_dp(
    profile: &EqProfile,
    e: &[u32],
    states: &mut Vec<bool>,
    next: &mut Vec<bool>,
) -> bool {
    let full = (1usize << profile.arity) - 1;
    states.clear();
    states.resize(full + 1, false);
    states[full] = true;
    for &v in e {
        let masks = &profile.by_value[v as usize];
        if masks.is_empty() {
            return false;
        }
        next.clear();
        next.resize(full + 1, false);
        let mut any = false;
        for (s, on) in states.iter().enumerate() {
            if *on {
                for &mk in masks {
                    next[s & mk as usize] = true;
                    any = true;
                }
            }
        }
        if !any {
            return false;
        }
        std::mem::swap(states, next);
    }
    states[0]
}

/// Elements of `A^n` that lie in every generating set: those not obtainable
/// in one step from the rest of `A^n`.
pub fn essential_elements(
    alg: &FiniteAlgebra,
    n: usize,
    guard: Guard,
) -> Result<Vec<u64>, GrowthError> {
    let size = guard.check(alg.size(), n)?;
    let profiles = eq_profiles(alg)?;
    let constants = nullary_tuples(alg, n);
    let (mut states, mut next) = (Vec::new(), Vec::new());
    let mut out = Vec::new();
    for code in 0..size as u64 {
        if constants.contains(&code) {
            continue;
        }
        let e = decode(code, n, alg.size());
        if !profiles
            .iter()
            .any(|p| derivable_dp(p, &e, &mut states, &mut next))
        {
            out.push(code);
        }
    }
    Ok(out)
}

fn ceil_log(base: usize, n: usize) -> usize {
    if base < 2 {
        return 0;
    }
    let mut k = 0;
    let mut p: u128 = 1;
    while p < n as u128 {
        p *= base as u128;
        k += 1;
    }
    k
}

/// `⌈log_|A| n⌉` for `n > 0` and `|A| > 1`, raised to 1 when `n > 0` and
/// there are no nullary operations (then `⟨∅⟩` is empty).
pub fn log_lower_bound(alg: &FiniteAlgebra, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let log = if alg.size() < 2 {
        0
    } else {
        ceil_log(alg.size(), n)
    };
    log.max(usize::from(!alg.has_nullary()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DResult {
    pub value: usize,
    /// Sorted codes; the lexicographically least generating set of least size.
    pub witness: Vec<u64>,
    pub essential: usize,
}

/// Exact `d_A(n)` with the lexicographically least optimal witness.
///
/// Every minimal generating set contains the essential elements, and no
/// member of a minimal set lies in the closure of the others, so extra
/// elements are searched in increasing code order among tuples outside the
/// current closure, by increasing set size. Failed leaves are enlarged to
/// maximal proper subuniverses whose complements ("cuts") every generating
/// set must meet; they bound the remaining budget and the candidate range.
pub fn d_exact(alg: &FiniteAlgebra, n: usize, guard: Guard) -> Result<DResult, GrowthError> {
    let essential = essential_elements(alg, n, guard)?;
    let base = Subpower::generate(alg, n, &essential, guard)?;
    if base.is_full() {
        return Ok(DResult {
            value: essential.len(),
            witness: essential.clone(),
            essential: essential.len(),
        });
    }
    let size = base.power_size() as u64;
    let lower = log_lower_bound(alg, n).max(essential.len() + 1);
    let mut cuts = Cuts::default();
    for total in lower..=size as usize {
        let budget = total - essential.len();
        let mut picked = Vec::with_capacity(budget);
        if search(alg, &base, 0, budget, &mut picked, &mut cuts) {
            let mut witness = essential.clone();
            witness.extend(picked);
            witness.sort_unstable();
            let check = Subpower::generate(alg, n, &witness, guard)?;
            assert!(check.is_full(), "witness must generate the power");
            return Ok(DResult {
                value: witness.len(),
                witness,
                essential: essential.len(),
            });
        }
    }
    unreachable!("the whole power generates itself")
}

/// Complements of proper subuniverses, each sorted.
#[derive(Default)]
struct Cuts {
    sets: Vec<Vec<u64>>,
    known: HashSet<Vec<u64>>,
}

/// What the cuts say about extending `sub` by picks of code `≥ from`.
struct CutBound {
    /// Some cut disjoint from `sub` has no element `≥ from`.
    dead: bool,
    /// Pairwise disjoint live cuts found greedily; each needs its own pick.
    disjoint: usize,
    /// Picks above this cannot meet every live cut.
    limit: u64,
    /// Live cuts restricted to codes `≥ from`.
    live: Vec<Vec<u64>>,
}

impl Cuts {
    fn bound(&self, sub: &Subpower, from: u64, size: u64) -> CutBound {
        let mut live: Vec<Vec<u64>> = Vec::new();
        for cut in &self.sets {
            if cut.iter().any(|c| sub.contains(*c)) {
                continue;
            }
            let tail = &cut[cut.partition_point(|c| *c < from)..];
            if tail.is_empty() {
                return CutBound {
                    dead: true,
                    disjoint: 0,
                    limit: 0,
                    live: Vec::new(),
                };
            }
            live.push(tail.to_vec());
        }
        live.sort_by_key(Vec::len);
        let mut used = HashSet::new();
        let mut disjoint = 0;
        for cut in &live {
            if cut.iter().all(|c| !used.contains(c)) {
                used.extend(cut.iter().copied());
                disjoint += 1;
            }
        }
        let limit = live
            .iter()
            .map(|c| *c.last().expect("nonempty"))
            .min()
            .unwrap_or(size - 1);
        CutBound {
            dead: false,
            disjoint,
            limit,
            live,
        }
    }

    /// Enlarges `sub` (a proper subuniverse) to a maximal proper one,
    /// preferring tuples already in cuts so the new cut tends to avoid them,
    /// and records its complement. Returns the new cut.
    fn learn(&mut self, alg: &FiniteAlgebra, sub: &Subpower) -> Vec<u64> {
        let size = sub.power_size() as u64;
        let mut w = sub.clone();
        let seen: HashSet<u64> = self.sets.iter().flatten().copied().collect();
        let mut preferred: Vec<u64> = seen.iter().copied().filter(|c| !w.contains(*c)).collect();
        preferred.sort_unstable();
        grow_maximal(alg, &mut w, &preferred);
        let rest: Vec<u64> = (0..size).filter(|c| !w.contains(*c)).collect();
        grow_maximal(alg, &mut w, &rest);
        let cut: Vec<u64> = (0..size).filter(|c| !w.contains(*c)).collect();
        if self.known.insert(cut.clone()) {
            self.sets.push(cut.clone());
        }
        cut
    }
}

/// Adds to `w` as many of `cands` as possible while keeping it proper:
/// whole batches when they fit, otherwise halves.
fn grow_maximal(alg: &FiniteAlgebra, w: &mut Subpower, cands: &[u64]) {
    let cands: Vec<u64> = cands.iter().copied().filter(|c| !w.contains(*c)).collect();
    if cands.is_empty() {
        return;
    }
    let mut trial = w.clone();
    trial.extend(alg, &cands);
    if !trial.is_full() {
        *w = trial;
    } else if cands.len() > 1 {
        let (lo, hi) = cands.split_at(cands.len() / 2);
        grow_maximal(alg, w, lo);
        grow_maximal(alg, w, hi);
    }
}

fn search(
    alg: &FiniteAlgebra,
    sub: &Subpower,
    from: u64,
    budget: usize,
    picked: &mut Vec<u64>,
    cuts: &mut Cuts,
) -> bool {
    let size = sub.power_size() as u64;
    if budget == 0 || (size as usize - sub.len()) < budget {
        return false;
    }
    let mut bound = cuts.bound(sub, from, size);
    let mut seen_cuts = cuts.sets.len();
    if budget == 1 {
        // The last pick must lie in every live cut.
        let mut cands: Vec<u64> = match bound.live.split_first() {
            None => (from..size).filter(|c| !sub.contains(*c)).collect(),
            Some((first, others)) => first
                .iter()
                .copied()
                .filter(|c| others.iter().all(|o| o.binary_search(c).is_ok()))
                .collect(),
        };
        if bound.dead {
            return false;
        }
        let mut i = 0;
        while i < cands.len() {
            let c = cands[i];
            let mut next = sub.clone();
            next.extend(alg, &[c]);
            if next.is_full() {
                picked.push(c);
                return true;
            }
            let cut = cuts.learn(alg, &next);
            // The new cut avoids `next ⊇ sub`, so it constrains this pick too.
            cands.retain(|x| *x < c || cut.binary_search(x).is_ok());
            i = cands.partition_point(|x| *x <= c);
        }
        return false;
    }
    let mut c = from;
    while c < size {
        if cuts.sets.len() != seen_cuts {
            bound = cuts.bound(sub, c, size);
            seen_cuts = cuts.sets.len();
        }
        if bound.dead || bound.disjoint > budget || c > bound.limit {
            return false;
        }
        if !sub.contains(c) {
            let mut next = sub.clone();
            next.extend(alg, &[c]);
            picked.push(c);
            if next.is_full() || search(alg, &next, c + 1, budget - 1, picked, cuts) {
                return true;
            }
            picked.pop();
        }
        c += 1;
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthEntry {
    pub n: usize,
    pub d: usize,
    pub witness: Vec<u64>,
    pub essential: usize,
    pub oracle: Option<usize>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    pub algebra: String,
    pub entries: Vec<GrowthEntry>,
    /// Guard cutoffs and similar notes.
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TableOptions {
    pub guard: Guard,
    pub oracle: bool,
}

/// `d_A(n)` for each `n` in `range`, stopping at the first guard refusal.
pub fn growth_table(
    alg: &FiniteAlgebra,
    id: &str,
    range: std::ops::RangeInclusive<usize>,
    opts: TableOptions,
) -> Result<GrowthTable, GrowthError> {
    let mut table = GrowthTable {
        algebra: id.to_string(),
        entries: Vec::new(),
        flags: Vec::new(),
    };
    for n in range {
        let start = Instant::now();
        let r = match d_exact(alg, n, opts.guard) {
            Ok(r) => r,
            Err(GrowthError::Algebra(AlgebraError::GuardExceeded { size, guard })) => {
                table.flags.push(format!(
                    "guard: n={n} needs |A|^n={size} > {guard}; stopped"
                ));
                break;
            }
            Err(e) => return Err(e),
        };
        let elapsed = start.elapsed();
        let oracle = if opts.oracle {
            match oracle_d(alg, n) {
                Ok(v) => Some(v),
                Err(GrowthError::OracleCap { .. }) => {
                    table
                        .flags
                        .push(format!("oracle: n={n} above cap {ORACLE_CAP}"));
                    None
                }
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        table.entries.push(GrowthEntry {
            n,
            d: r.value,
            witness: r.witness,
            essential: r.essential,
            oracle,
            elapsed,
        });
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HValue {
    Exact(usize),
    /// `d(n) ≤ g` for every `n` up to the horizon.
    AtLeast(usize),
    /// Even `d(0)` exceeds `g`.
    Never,
}

/// Largest `n ≤ horizon` with `d_A(n) ≤ g`, scanning upward and stopping at
/// the first `n` with `d_A(n) > g` (d is non-decreasing).
pub fn h_value(
    alg: &FiniteAlgebra,
    g: usize,
    horizon: usize,
    guard: Guard,
) -> Result<HValue, GrowthError> {
    guard.check(alg.size(), horizon)?;
    for n in 0..=horizon {
        if d_exact(alg, n, guard)?.value > g {
            return Ok(if n == 0 {
                HValue::Never
            } else {
                HValue::Exact(n - 1)
            });
        }
    }
    Ok(HValue::AtLeast(horizon))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub n: usize,
    pub lower: usize,
    pub d: usize,
    pub upper: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundsReport {
    pub rows: Vec<BoundRow>,
    pub violations: Vec<String>,
}

/// Checks `⌈log_|A| n⌉ ≤ d(n) ≤ |A|^n`, `d(0) ∈ {0,1}`, `d(2) > 0` when
/// `|A| > 1`, and monotonicity in `n`.
pub fn check_bounds(table: &GrowthTable, alg: &FiniteAlgebra) -> BoundsReport {
    let mut report = BoundsReport::default();
    let mut prev: Option<(usize, usize)> = None;
    for e in &table.entries {
        let lower = log_lower_bound(alg, e.n);
        let upper = checked_pow(alg.size(), e.n).unwrap_or(u128::MAX);
        if e.n > 0 && (e.d < lower || e.d as u128 > upper) {
            report
                .violations
                .push(format!("n={}: d={} outside [{lower}, {upper}]", e.n, e.d));
        }
        if e.n == 0 && e.d > 1 {
            report
                .violations
                .push(format!("n=0: d={} is not 0 or 1", e.d));
        }
        if e.n == 2 && alg.size() > 1 && e.d == 0 {
            report
                .violations
                .push("n=2: d=0 for a nontrivial algebra".into());
        }
        if let Some((pn, pd)) = prev {
            if e.n > pn && e.d < pd {
                report
                    .violations
                    .push(format!("d decreases from n={pn} to n={}", e.n));
            }
        }
        prev = Some((e.n, e.d));
        report.rows.push(BoundRow {
            n: e.n,
            lower,
            d: e.d,
            upper,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;

    fn bare(k: usize) -> FiniteAlgebra {
        FiniteAlgebra::numbered(k, vec![]).unwrap()
    }

    fn z2(with_zero: bool) -> FiniteAlgebra {
        let mut ops = vec![Operation::total("+", 2, 2, vec![0, 1, 1, 0]).unwrap()];
        if with_zero {
            ops.push(Operation::constant("0", 2, 0).unwrap());
        }
        FiniteAlgebra::numbered(2, ops).unwrap()
    }

    fn semilattice() -> FiniteAlgebra {
        FiniteAlgebra::numbered(
            2,
            vec![Operation::total("meet", 2, 2, vec![0, 0, 0, 1]).unwrap()],
        )
        .unwrap()
    }

    fn nu12() -> FiniteAlgebra {
        let f = Operation::partial(
            "F",
            2,
            2,
            vec![(vec![1, 0], 0), (vec![0, 1], 0), (vec![1, 1], 1)],
        )
        .unwrap();
        FiniteAlgebra::new(vec!["a".into(), "1".into()], vec![f]).unwrap()
    }

    #[test]
    fn essential_examples() {
        let g = Guard::default();
        assert_eq!(
            essential_elements(&bare(2), 2, g).unwrap(),
            vec![0, 1, 2, 3]
        );
        // Support ≤ 1 in {a=0, 1=1}^2: everything but (a,a).
        assert_eq!(essential_elements(&nu12(), 2, g).unwrap(), vec![1, 2, 3]);
        assert_eq!(essential_elements(&z2(false), 1, g).unwrap(), vec![1]);
    }

    #[test]
    fn d_exact_examples() {
        let g = Guard::default();
        assert_eq!(d_exact(&bare(2), 2, g).unwrap().value, 4);
        assert_eq!(d_exact(&semilattice(), 1, g).unwrap().value, 2);
        let r = d_exact(&z2(true), 2, g).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.witness, vec![1, 2]);
        let one = FiniteAlgebra::numbered(1, vec![]).unwrap();
        for n in 0..4 {
            assert!(d_exact(&one, n, g).unwrap().value <= 1);
        }
        let onec =
            FiniteAlgebra::numbered(1, vec![Operation::constant("c", 1, 0).unwrap()]).unwrap();
        assert_eq!(d_exact(&onec, 0, g).unwrap().value, 0);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_d(&semilattice(), 1).unwrap(), 2);
        assert_eq!(oracle_d(&z2(true), 2).unwrap(), 2);
        assert_eq!(oracle_d(&bare(2), 3).unwrap(), 8);
        assert!(matches!(
            oracle_d(&bare(2), 13),
            Err(GrowthError::OracleCap { .. })
        ));
    }

    #[test]
    fn h_examples() {
        let g = Guard::default();
        assert_eq!(h_value(&bare(2), 4, 5, g).unwrap(), HValue::Exact(2));
        let onec =
            FiniteAlgebra::numbered(1, vec![Operation::constant("c", 1, 0).unwrap()]).unwrap();
        assert_eq!(h_value(&onec, 0, 6, g).unwrap(), HValue::AtLeast(6));
        assert_eq!(h_value(&bare(2), 0, 3, g).unwrap(), HValue::Never);
    }

    #[test]
    fn bounds_on_bare_set() {
        let t = growth_table(&bare(2), "bare2", 1..=3, TableOptions::default()).unwrap();
        let r = check_bounds(&t, &bare(2));
        assert!(r.violations.is_empty());
        let got: Vec<(usize, usize, u128)> =
            r.rows.iter().map(|b| (b.lower, b.d, b.upper)).collect();
        assert_eq!(got, vec![(1, 2, 2), (1, 4, 4), (2, 8, 8)]);
    }

    #[test]
    fn table_stops_at_guard() {
        let opts = TableOptions {
            guard: Guard(8),
            oracle: false,
        };
        let t = growth_table(&bare(2), "bare2", 1..=5, opts).unwrap();
        assert_eq!(t.entries.len(), 3);
        assert_eq!(t.flags.len(), 1);
    }

    #[test]
    fn ceil_log_values() {
        assert_eq!(ceil_log(2, 1), 0);
        assert_eq!(ceil_log(2, 2), 1);
        assert_eq!(ceil_log(2, 5), 3);
        assert_eq!(ceil_log(3, 9), 2);
    }
}
