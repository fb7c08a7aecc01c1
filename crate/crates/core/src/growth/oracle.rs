//! An exact reference value for `d_A(n)`, computed without any of the
//! search machinery behind `d_exact`.
//!
//! A set generates `A^n` exactly when it is contained in no proper
//! subuniverse, i.e. when it meets the complement of every proper
//! subuniverse. The oracle alternates between a least set meeting the
//! complements found so far and, if that set fails to generate, a new
//! complement: its closure enlarged to a maximal proper subuniverse. Each
//! round rules out the current candidate, so the loop ends, and the first
//! generating candidate has least size because every generating set meets
//! all collected complements.

use crate::algebra::{checked_pow, decode, FiniteAlgebra, Guard, Operation, PowerTuple, Subpower};

use super::{GrowthError, MAX_ANALYSIS_ARITY};

/// Largest `|A|^n` the oracle accepts.
pub const ORACLE_CAP: u64 = 1 << 12;

/// For one operation: `counts[v][S]` is the number of rows with value `v`
/// whose arguments equal `v` at every position in `S`.
struct CountTable {
    arity: usize,
    counts: Vec<Vec<i128>>,
}

impl CountTable {
    fn new(op: &Operation, base: usize) -> Result<Self, GrowthError> {
        let m = op.arity();
        if m > MAX_ANALYSIS_ARITY {
            return Err(GrowthError::ArityTooLarge(op.name().to_string()));
        }
        let mut counts = vec![vec![0i128; 1 << m]; base];
        for (args, v) in op.entries() {
            for (s, count) in counts[v as usize].iter_mut().enumerate() {
                if (0..m).all(|j| s & (1 << j) == 0 || args[j] == v) {
                    *count += 1;
                }
            }
        }
        Ok(CountTable { arity: m, counts })
    }

    /// Number of ways to pick, per coordinate `i`, a row with value `e_i`
    /// such that no argument column equals `e`: inclusion-exclusion over the
    /// set of columns forced equal to `e`.
    fn avoiding(&self, e: &[u32]) -> Result<i128, GrowthError> {
        if e.iter().any(|v| self.counts[*v as usize][0] == 0) {
            return Ok(0);
        }
        let mut total: i128 = 0;
        for s in 0usize..(1 << self.arity) {
            let mut prod: i128 = 1;
            for &v in e {
                prod = prod
                    .checked_mul(self.counts[v as usize][s])
                    .ok_or(GrowthError::Overflow)?;
                if prod == 0 {
                    break;
                }
            }
            let term = if s.count_ones() % 2 == 0 { prod } else { -prod };
            total = total.checked_add(term).ok_or(GrowthError::Overflow)?;
        }
        Ok(total)
    }
}

/// Tuples that no operation produces from other tuples; they are singleton
/// complements (`A^n` minus one of them is a subuniverse).
fn forced_tuples(alg: &FiniteAlgebra, n: usize, size: u64) -> Result<Vec<u64>, GrowthError> {
    let mut constants = Vec::new();
    for op in alg.operations().iter().filter(|o| o.arity() == 0) {
        if let Some(v) = op.apply(&[])? {
            constants.push(PowerTuple::constant(v, n, alg.size()).code);
        }
    }
    let tables = alg
        .operations()
        .iter()
        .filter(|o| o.arity() > 0)
        .map(|o| CountTable::new(o, alg.size()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut forced = Vec::new();
    'codes: for code in 0..size {
        if constants.contains(&code) {
            continue;
        }
        let e = decode(code, n, alg.size());
        for t in &tables {
            if t.avoiding(&e)? > 0 {
                continue 'codes;
            }
        }
        forced.push(code);
    }
    Ok(forced)
}

/// Grows `w` to a maximal proper subuniverse by absorbing tuples of
/// `pending` in order. A galloping search finds the first tuple `x` whose
/// addition (after the tuples before it) makes `w` full; every shorter
/// prefix is absorbed on the way, and `x` is dropped for good since
/// `w ∪ {x}` already generates everything.
fn absorb(alg: &FiniteAlgebra, w: &mut Subpower, pending: Vec<u64>) {
    let mut rest = pending;
    loop {
        rest.retain(|c| !w.contains(*c));
        if rest.is_empty() {
            return;
        }
        // Invariant: w absorbs rest[..lo] and is not full; w ∪ rest[..hi] is full.
        let mut lo = 0;
        let mut step = 1;
        let mut hi = loop {
            let end = (lo + step).min(rest.len());
            let mut trial = w.clone();
            trial.extend(alg, &rest[lo..end]);
            if trial.is_full() {
                break end;
            }
            *w = trial;
            if end == rest.len() {
                return;
            }
            lo = end;
            step *= 2;
        };
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let mut trial = w.clone();
            trial.extend(alg, &rest[lo..mid]);
            if trial.is_full() {
                hi = mid;
            } else {
                *w = trial;
                lo = mid;
            }
        }
        rest.drain(..hi);
    }
}

/// Subsets of `0..size` as bit words.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(size: u64) -> Self {
        Bits(vec![0; (size as usize).div_ceil(64)])
    }
    fn of(size: u64, items: &[u64]) -> Self {
        let mut b = Bits::new(size);
        for &x in items {
            b.set(x);
        }
        b
    }
    fn set(&mut self, x: u64) {
        self.0[(x / 64) as usize] |= 1 << (x % 64);
    }
    fn clear(&mut self, x: u64) {
        self.0[(x / 64) as usize] &= !(1 << (x % 64));
    }
    fn has(&self, x: u64) -> bool {
        self.0[(x / 64) as usize] >> (x % 64) & 1 == 1
    }
    fn meets(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(i as u64 * 64 + b)
            })
        })
    }
}

/// A least set containing `base` and meeting every set in `families`.
fn least_hitting_set(size: u64, families: &[Bits], base: &[u64], at_least: usize) -> Vec<u64> {
    let base_bits = Bits::of(size, base);
    let open: Vec<&Bits> = families.iter().filter(|f| !f.meets(&base_bits)).collect();
    let mut extra = at_least.saturating_sub(base.len());
    loop {
        let mut chosen = Vec::new();
        let mut chosen_bits = Bits::new(size);
        let mut banned = Bits::new(size);
        if hit(&open, extra, &mut chosen, &mut chosen_bits, &mut banned) {
            let mut out = base.to_vec();
            out.extend(chosen);
            out.sort_unstable();
            return out;
        }
        extra += 1;
    }
}

fn hit(
    open: &[&Bits],
    budget: usize,
    chosen: &mut Vec<u64>,
    chosen_bits: &mut Bits,
    banned: &mut Bits,
) -> bool {
    let mut unmet: Vec<&Bits> = open
        .iter()
        .copied()
        .filter(|f| !f.meets(chosen_bits))
        .collect();
    if unmet.is_empty() {
        return true;
    }
    if budget == 0 {
        return false;
    }
    unmet.sort_by_key(|f| f.count());
    // Pairwise disjoint unmet sets each need their own element.
    let mut used = Bits(vec![0; chosen_bits.0.len()]);
    let mut disjoint = 0;
    for f in &unmet {
        if !f.meets(&used) {
            for (u, w) in used.0.iter_mut().zip(&f.0) {
                *u |= w;
            }
            disjoint += 1;
        }
    }
    if disjoint > budget {
        return false;
    }
    let branch = unmet[0];
    let mut newly_banned = Vec::new();
    let mut found = false;
    for x in branch.iter() {
        if banned.has(x) {
            continue;
        }
        chosen.push(x);
        chosen_bits.set(x);
        if hit(open, budget - 1, chosen, chosen_bits, banned) {
            found = true;
            break;
        }
        chosen.pop();
        chosen_bits.clear(x);
        // Later branches need not revisit x.
        banned.set(x);
        newly_banned.push(x);
    }
    for x in newly_banned {
        banned.clear(x);
    }
    found
}

/// Exact `d_A(n)` for `|A|^n ≤ ORACLE_CAP`.
pub fn oracle_d(alg: &FiniteAlgebra, n: usize) -> Result<usize, GrowthError> {
    let size = checked_pow(alg.size(), n).unwrap_or(u128::MAX);
    if size > ORACLE_CAP as u128 {
        return Err(GrowthError::OracleCap {
            size,
            cap: ORACLE_CAP,
        });
    }
    let size = size as u64;
    let guard = Guard(ORACLE_CAP);
    let forced = forced_tuples(alg, n, size)?;
    let mut families: Vec<Bits> = Vec::new();
    let mut at_least = forced.len();
    loop {
        let candidate = least_hitting_set(size, &families, &forced, at_least);
        at_least = candidate.len();
        let mut w = Subpower::generate(alg, n, &candidate, guard)?;
        if w.is_full() {
            return Ok(candidate.len());
        }
        let outside: Vec<u64> = (0..size).filter(|c| !w.contains(*c)).collect();
        absorb(alg, &mut w, outside);
        let complement: Vec<u64> = (0..size).filter(|c| !w.contains(*c)).collect();
        families.push(Bits::of(size, &complement));
    }
}
