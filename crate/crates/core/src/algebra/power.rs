//! Coordinatewise operations on `A^n` and subuniverse generation.
//!
//! A tuple of `A^n` is a base-`|A|` code with coordinate 1 most significant.
//! An operation is defined on a tuple of tuples iff it is defined in every
//! coordinate.

use super::{checked_pow, decode, encode, AlgebraError, FiniteAlgebra, OpGroup, Operation, Seeker};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PowerTuple {
    pub code: u64,
    pub width: usize,
    pub base: usize,
}

impl PowerTuple {
    pub fn from_digits(digits: &[u32], base: usize) -> Self {
        PowerTuple {
            code: encode(digits, base),
            width: digits.len(),
            base,
        }
    }

    pub fn from_code(code: u64, width: usize, base: usize) -> Self {
        PowerTuple { code, width, base }
    }

    /// The tuple `(c, c, ..., c)`.
    pub fn constant(c: u32, width: usize, base: usize) -> Self {
        Self::from_digits(&vec![c; width], base)
    }

    pub fn digits(&self) -> Vec<u32> {
        decode(self.code, self.width, self.base)
    }
}

/// Largest power size that closure computations will allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard(pub u64);

impl Default for Guard {
    fn default() -> Self {
        Guard(1 << 24)
    }
}

impl Guard {
    pub fn check(&self, base: usize, n: usize) -> Result<usize, AlgebraError> {
        match checked_pow(base, n) {
            Some(s) if s <= self.0 as u128 => Ok(s as usize),
            Some(s) => Err(AlgebraError::GuardExceeded {
                size: s,
                guard: self.0,
            }),
            None => Err(AlgebraError::GuardExceeded {
                size: u128::MAX,
                guard: self.0,
            }),
        }
    }
}

pub fn power_apply(
    op: &Operation,
    args: &[PowerTuple],
    n: usize,
) -> Result<Option<PowerTuple>, AlgebraError> {
    if args.len() != op.arity() {
        return Err(AlgebraError::ArityMismatch {
            name: op.name().to_string(),
            expected: op.arity(),
            found: args.len(),
        });
    }
    if let Some(a) = args.iter().find(|a| a.width != n) {
        return Err(AlgebraError::WidthMismatch {
            expected: n,
            found: a.width,
        });
    }
    let base = op.base;
    let cols: Vec<Vec<u32>> = args.iter().map(|a| a.digits()).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<u32> = cols.iter().map(|c| c[i]).collect();
        match op.apply_code(encode(&row, base)) {
            Some(v) => out.push(v),
            None => return Ok(None),
        }
    }
    Ok(Some(PowerTuple::from_digits(&out, base)))
}

/// The subuniverse of `A^n` generated by `generators`.
pub fn closure(
    alg: &FiniteAlgebra,
    n: usize,
    generators: &[PowerTuple],
) -> Result<Vec<PowerTuple>, AlgebraError> {
    let codes: Vec<u64> = generators.iter().map(|g| g.code).collect();
    for g in generators {
        if g.width != n {
            return Err(AlgebraError::WidthMismatch {
                expected: n,
                found: g.width,
            });
        }
    }
    let sub = Subpower::generate(alg, n, &codes, Guard::default())?;
    Ok(sub
        .sorted_codes()
        .into_iter()
        .map(|c| PowerTuple::from_code(c, n, alg.size()))
        .collect())
}

/// A closed subset of `A^n`, kept in a form that can be extended by further
/// generators without recomputing what is already closed.
#[derive(Debug, Clone)]
pub struct Subpower {
    n: usize,
    base: usize,
    size: usize,
    /// `base^(n-1-i)` for coordinate `i`.
    pows: Vec<u64>,
    /// Member index by code, `u32::MAX` when absent.
    index_of: Vec<u32>,
    members: Vec<u64>,
    /// Digits of member `t` at `digits[t*n .. (t+1)*n]`.
    digits: Vec<u32>,
    /// Per partial group and argument position: processed members whose
    /// digits all occur in that column of the group's domain.
    cand: Vec<Vec<Vec<u32>>>,
    processed: usize,
    seeded: bool,
    /// Member count at the last targeted search.
    sought_at: usize,
    /// Set after a targeted search finds nothing: the closure is then
    /// unlikely to fill, and further searches would only cost time.
    seek_off: bool,
}

impl Subpower {
    pub fn empty(alg: &FiniteAlgebra, n: usize, guard: Guard) -> Result<Self, AlgebraError> {
        let base = alg.size();
        let size = guard.check(base, n)?;
        let pows = (0..n)
            .map(|i| (base as u64).pow((n - 1 - i) as u32))
            .collect();
        let cand = alg
            .groups()
            .iter()
            .map(|g| match g {
                OpGroup::Partial { arity, .. } => vec![Vec::new(); *arity],
                _ => Vec::new(),
            })
            .collect();
        Ok(Subpower {
            n,
            base,
            size,
            pows,
            index_of: vec![u32::MAX; size],
            members: Vec::new(),
            digits: Vec::new(),
            cand,
            processed: 0,
            seeded: false,
            sought_at: 0,
            seek_off: false,
        })
    }

    pub fn generate(
        alg: &FiniteAlgebra,
        n: usize,
        gens: &[u64],
        guard: Guard,
    ) -> Result<Self, AlgebraError> {
        let mut s = Self::empty(alg, n, guard)?;
        s.extend(alg, gens);
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn power_size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.size
    }

    pub fn contains(&self, code: u64) -> bool {
        self.index_of
            .get(code as usize)
            .is_some_and(|i| *i != u32::MAX)
    }

    /// Members in discovery order.
    pub fn codes(&self) -> &[u64] {
        &self.members
    }

    pub fn sorted_codes(&self) -> Vec<u64> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }

    fn insert(&mut self, code: u64) {
        let slot = &mut self.index_of[code as usize];
        if *slot != u32::MAX {
            return;
        }
        *slot = self.members.len() as u32;
        self.members.push(code);
        let base = self.base as u64;
        let start = self.digits.len();
        self.digits.resize(start + self.n, 0);
        let mut c = code;
        for i in (0..self.n).rev() {
            self.digits[start + i] = (c % base) as u32;
            c /= base;
        }
    }

    fn member_digits(&self, t: usize) -> &[u32] {
        &self.digits[t * self.n..(t + 1) * self.n]
    }

    /// Adds generators and re-closes.
    pub fn extend(&mut self, alg: &FiniteAlgebra, gens: &[u64]) {
        if !self.seeded {
            self.seeded = true;
            for g in alg.groups() {
                if let OpGroup::Nullary(values) = g {
                    for &v in values {
                        let code = self.pows.iter().map(|p| p * v as u64).sum();
                        self.insert(code);
                    }
                }
            }
        }
        for &g in gens {
            self.insert(g);
        }
        self.saturate(alg);
    }

    fn saturate(&mut self, alg: &FiniteAlgebra) {
        let groups = alg.groups();
        let mut out: Vec<u64> = Vec::new();
        while self.processed < self.members.len() && !self.is_full() {
            // Near the end the worklist spends most of its time rediscovering
            // members; looking for the few missing tuples directly fills the
            // power sooner. The worklist below still decides closedness.
            let missing = self.size - self.members.len();
            if !self.seek_off
                && missing <= self.members.len()
                && self.members.len() >= self.sought_at + self.sought_at.max(256) / 8
            {
                self.sought_at = self.members.len();
                self.seek_off = !self.seek_missing(alg);
                if self.is_full() {
                    return;
                }
            }
            let t = self.processed;
            for (gi, g) in groups.iter().enumerate() {
                if let OpGroup::Partial { arity, colmask, .. } = g {
                    for (j, col) in colmask.iter().enumerate().take(*arity) {
                        let ok = self
                            .member_digits(t)
                            .iter()
                            .all(|d| col[*d as usize].iter().any(|w| *w != 0));
                        if ok {
                            self.cand[gi][j].push(t as u32);
                        }
                    }
                }
            }
            for (gi, g) in groups.iter().enumerate() {
                out.clear();
                match g {
                    OpGroup::Nullary(_) => {}
                    OpGroup::Total { arity, tables } => {
                        self.enum_total(*arity, tables, t, &mut out)
                    }
                    OpGroup::Partial { .. } => self.enum_partial(g, gi, t, &mut out),
                }
                for &c in &out {
                    self.insert(c);
                }
                if self.is_full() {
                    return;
                }
            }
            self.processed += 1;
        }
    }

    /// All argument tuples over members `0..=t` that use `t`, for total operations.
    fn enum_total(&self, m: usize, tables: &[Vec<u32>], t: usize, out: &mut Vec<u64>) {
        let mut args = vec![0usize; m];
        for f in 0..m {
            self.total_rec(m, tables, t, f, 0, &mut args, out);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn total_rec(
        &self,
        m: usize,
        tables: &[Vec<u32>],
        t: usize,
        f: usize,
        pos: usize,
        args: &mut [usize],
        out: &mut Vec<u64>,
    ) {
        if pos == m {
            let base = self.base as u64;
            let row_codes: Vec<u64> = (0..self.n)
                .map(|i| {
                    args.iter().fold(0u64, |rc, &a| {
                        rc * base + self.digits[a * self.n + i] as u64
                    })
                })
                .collect();
            for table in tables {
                let code = row_codes
                    .iter()
                    .zip(&self.pows)
                    .map(|(rc, p)| table[*rc as usize] as u64 * p)
                    .sum::<u64>();
                if !self.contains(code) {
                    out.push(code);
                }
            }
            return;
        }
        let range = if pos < f {
            0..t
        } else if pos == f {
            t..t + 1
        } else {
            0..t + 1
        };
        for a in range {
            args[pos] = a;
            self.total_rec(m, tables, t, f, pos + 1, args, out);
        }
    }

    /// Inserts missing tuples that some operation produces from current
    /// members, found by a bounded search per tuple.
    /// Returns whether any missing tuple was found.
    fn seek_missing(&mut self, alg: &FiniteAlgebra) -> bool {
        let seekers = alg.seekers();
        if seekers.is_empty() {
            return false;
        }
        let mut total = 16 * self.size;
        let mut missing: Vec<u64> = (0..self.size as u64)
            .filter(|c| !self.contains(*c))
            .collect();
        let initial = missing.len();
        // Each pass can enable the next, so repeat while passes make progress.
        loop {
            let before = missing.len();
            missing.retain(|&y| {
                if total == 0 {
                    return true;
                }
                let target = decode(y, self.n, self.base);
                for sk in seekers {
                    let mut budget = (4 * self.members.len()).min(total);
                    let start = budget;
                    let hit = self.seek(sk, &target, &mut budget);
                    total -= start - budget;
                    if hit {
                        self.insert(y);
                        return false;
                    }
                }
                true
            });
            if missing.len() == before || missing.is_empty() || total == 0 {
                return missing.len() < initial;
            }
        }
    }

    fn seek(&self, sk: &Seeker, target: &[u32], budget: &mut usize) -> bool {
        // Setting up costs a step too; algebras with thousands of small
        // operations would otherwise search for free.
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let (n, w) = (self.n, sk.words);
        let mut masks = vec![0u64; (sk.arity + 1) * n * w];
        for (i, v) in target.iter().enumerate() {
            let om = &sk.outmask[*v as usize];
            if om.iter().all(|x| *x == 0) {
                return false;
            }
            masks[i * w..(i + 1) * w].copy_from_slice(om);
        }
        self.seek_rec(sk, 0, &mut masks, budget)
    }

    fn seek_rec(&self, sk: &Seeker, pos: usize, masks: &mut [u64], budget: &mut usize) -> bool {
        if pos == sk.arity {
            return true;
        }
        let (n, w) = (self.n, sk.words);
        let layer = n * w;
        let cur = &masks[pos * layer..(pos + 1) * layer];
        // Digits admissible at this position, per coordinate.
        let mut digits: Vec<u32> = Vec::new();
        let mut starts = Vec::with_capacity(n + 1);
        let mut product: usize = 1;
        for i in 0..n {
            starts.push(digits.len());
            for (k, word) in cur[i * w..(i + 1) * w].iter().enumerate() {
                let mut x = *word;
                while x != 0 {
                    let r = k * 64 + x.trailing_zeros() as usize;
                    x &= x - 1;
                    let v = sk.rows[r][pos];
                    if !digits[starts[i]..].contains(&v) {
                        digits.push(v);
                    }
                }
            }
            product = product.saturating_mul(digits.len() - starts[i]);
        }
        starts.push(digits.len());
        let candidates: Vec<usize> = if product < self.members.len() {
            let mut found = Vec::new();
            let mut odo = vec![0usize; n];
            'odo: loop {
                let code: u64 = (0..n)
                    .map(|i| digits[starts[i] + odo[i]] as u64 * self.pows[i])
                    .sum();
                let idx = self.index_of[code as usize];
                if idx != u32::MAX {
                    found.push(idx as usize);
                }
                for i in (0..n).rev() {
                    odo[i] += 1;
                    if odo[i] < starts[i + 1] - starts[i] {
                        continue 'odo;
                    }
                    odo[i] = 0;
                }
                break;
            }
            found
        } else {
            (0..self.members.len()).collect()
        };
        for c in candidates {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let d = self.member_digits(c);
            let (head, tail) = masks.split_at_mut((pos + 1) * layer);
            let cur = &head[pos * layer..];
            let next = &mut tail[..layer];
            let mut ok = true;
            for i in 0..n {
                let cm = &sk.colmask[pos][d[i] as usize];
                let mut any = 0u64;
                for k in 0..w {
                    let v = cur[i * w + k] & cm[k];
                    next[i * w + k] = v;
                    any |= v;
                }
                if any == 0 {
                    ok = false;
                    break;
                }
            }
            if ok && self.seek_rec(sk, pos + 1, masks, budget) {
                return true;
            }
        }
        false
    }

    fn enum_partial(&self, g: &OpGroup, gi: usize, t: usize, out: &mut Vec<u64>) {
        let OpGroup::Partial {
            arity, words, rows, ..
        } = g
        else {
            unreachable!()
        };
        if rows.is_empty() {
            return;
        }
        let (m, w, n) = (*arity, *words, self.n);
        // masks[step] holds, per coordinate, the rows still consistent with
        // the arguments chosen at earlier steps.
        let mut masks = vec![0u64; (m + 1) * n * w];
        for i in 0..n {
            for r in 0..rows.len() {
                masks[i * w + r / 64] |= 1 << (r % 64);
            }
        }
        let mut scratch = Scratch {
            masks,
            order: Vec::with_capacity(m),
            row_of: vec![0; n],
        };
        for f in 0..m {
            if self.cand[gi][f].last() != Some(&(t as u32)) {
                continue;
            }
            // Place `t` first so it narrows the rows for every other position.
            scratch.order.clear();
            scratch.order.push(f);
            scratch.order.extend((0..m).filter(|p| *p != f));
            self.partial_rec(g, gi, t, f, 0, &mut scratch, out);
        }
    }

    /// Chooses the argument for position `s.order[step]`.
    #[allow(clippy::too_many_arguments)]
    fn partial_rec(
        &self,
        g: &OpGroup,
        gi: usize,
        t: usize,
        f: usize,
        step: usize,
        s: &mut Scratch,
        out: &mut Vec<u64>,
    ) {
        let OpGroup::Partial {
            arity,
            rows,
            outputs,
            colmask,
            words,
        } = g
        else {
            unreachable!()
        };
        let (m, w, n) = (*arity, *words, self.n);
        let layer = n * w;
        if step == m {
            let cur = &s.masks[step * layer..(step + 1) * layer];
            for i in 0..n {
                let mw = &cur[i * w..(i + 1) * w];
                s.row_of[i] = mw
                    .iter()
                    .enumerate()
                    .find(|(_, x)| **x != 0)
                    .map(|(k, x)| k * 64 + x.trailing_zeros() as usize)
                    .expect("nonempty mask");
            }
            for op_out in outputs {
                let code = s
                    .row_of
                    .iter()
                    .zip(&self.pows)
                    .map(|(r, p)| op_out[*r] as u64 * p)
                    .sum::<u64>();
                if !self.contains(code) {
                    out.push(code);
                }
            }
            return;
        }

        let pos = s.order[step];
        let cands = &self.cand[gi][pos];
        // Positions before `f` use members below `t`, `f` itself uses `t`,
        // later positions use members up to `t`; this counts each argument
        // tuple once, at its last member.
        let slice: &[u32] = if pos == f {
            std::slice::from_ref(cands.last().expect("t is a candidate"))
        } else if pos < f {
            let end = cands.partition_point(|c| (*c as usize) < t);
            &cands[..end]
        } else {
            cands
        };
        if slice.is_empty() {
            return;
        }

        // When the rows still admissible allow few digit combinations, look
        // the matching members up directly instead of scanning candidates.
        if pos != f && n > 0 {
            let cur = &s.masks[step * layer..(step + 1) * layer];
            // Flat digit sets: coordinate `i` owns `digits[starts[i]..starts[i+1]]`.
            let mut digits: Vec<u32> = Vec::new();
            let mut starts = Vec::with_capacity(n + 1);
            let mut product: usize = 1;
            for i in 0..n {
                starts.push(digits.len());
                let mw = &cur[i * w..(i + 1) * w];
                for (k, word) in mw.iter().enumerate() {
                    let mut x = *word;
                    while x != 0 {
                        let r = k * 64 + x.trailing_zeros() as usize;
                        x &= x - 1;
                        let v = rows[r][pos];
                        if !digits[starts[i]..].contains(&v) {
                            digits.push(v);
                        }
                    }
                }
                product = product.saturating_mul(digits.len() - starts[i]);
                if product >= slice.len() {
                    break;
                }
            }
            if product < slice.len() {
                starts.push(digits.len());
                let limit = if pos < f { t } else { t + 1 };
                let mut odo = vec![0usize; n];
                loop {
                    let code: u64 = (0..n)
                        .map(|i| digits[starts[i] + odo[i]] as u64 * self.pows[i])
                        .sum();
                    let idx = self.index_of[code as usize];
                    if idx != u32::MAX
                        && (idx as usize) < limit
                        && self.narrow(colmask, w, step, pos, idx as usize, s)
                    {
                        self.partial_rec(g, gi, t, f, step + 1, s, out);
                    }
                    let mut i = n;
                    let mut wrapped = true;
                    while i > 0 {
                        i -= 1;
                        odo[i] += 1;
                        if odo[i] < starts[i + 1] - starts[i] {
                            wrapped = false;
                            break;
                        }
                        odo[i] = 0;
                    }
                    if wrapped {
                        break;
                    }
                }
                return;
            }
        }

        for &c in slice {
            if self.narrow(colmask, w, step, pos, c as usize, s) {
                self.partial_rec(g, gi, t, f, step + 1, s, out);
            }
        }
    }

    /// Writes layer `step+1` = layer `step` restricted by member `c` at
    /// argument position `pos`; false if some coordinate has no row left.
    fn narrow(
        &self,
        colmask: &[Vec<Vec<u64>>],
        w: usize,
        step: usize,
        pos: usize,
        c: usize,
        s: &mut Scratch,
    ) -> bool {
        let n = self.n;
        let layer = n * w;
        let (head, tail) = s.masks.split_at_mut((step + 1) * layer);
        let cur = &head[step * layer..];
        let next = &mut tail[..layer];
        let d = self.member_digits(c);
        for i in 0..n {
            let cm = &colmask[pos][d[i] as usize];
            let mut any = 0u64;
            for k in 0..w {
                let v = cur[i * w + k] & cm[k];
                next[i * w + k] = v;
                any |= v;
            }
            if any == 0 {
                return false;
            }
        }
        true
    }
}

struct Scratch {
    masks: Vec<u64>,
    /// Argument positions in the order they are chosen.
    order: Vec<usize>,
    row_of: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;

    fn z2() -> FiniteAlgebra {
        FiniteAlgebra::numbered(
            2,
            vec![Operation::total("+", 2, 2, vec![0, 1, 1, 0]).unwrap()],
        )
        .unwrap()
    }

    /// The near-unanimity partial algebra on `{a, 1}` with `k = 2`: `F` is
    /// defined on `(1,a)`, `(a,1)` and `(1,1)`.
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

    fn codes(alg: &FiniteAlgebra, n: usize, gens: &[u64]) -> Vec<u64> {
        Subpower::generate(alg, n, gens, Guard::default())
            .unwrap()
            .sorted_codes()
    }

    #[test]
    fn power_apply_examples() {
        let meet = Operation::total("meet", 2, 2, vec![0, 0, 0, 1]).unwrap();
        let a = PowerTuple::from_digits(&[0, 1], 2);
        let b = PowerTuple::from_digits(&[1, 1], 2);
        assert_eq!(power_apply(&meet, &[a, b], 2).unwrap(), Some(a));
        let alg = nu12();
        let f = &alg.operations()[0];
        let x = PowerTuple::from_digits(&[1, 0, 1], 2);
        let y = PowerTuple::from_digits(&[0, 1, 1], 2);
        assert_eq!(
            power_apply(f, &[x, y], 3).unwrap(),
            Some(PowerTuple::from_digits(&[0, 0, 1], 2))
        );
        let z = PowerTuple::from_digits(&[0, 0, 1], 2);
        assert_eq!(power_apply(f, &[x, z], 3).unwrap(), None);
        assert!(power_apply(f, &[x, PowerTuple::from_digits(&[0], 2)], 3).is_err());
    }

    #[test]
    fn closure_examples() {
        let bare = FiniteAlgebra::numbered(2, vec![]).unwrap();
        assert_eq!(codes(&bare, 2, &[1]), vec![1]);
        assert_eq!(codes(&z2(), 1, &[1]), vec![0, 1]);
        // Support at most one: (1,1), (a,1), (1,a).
        let alg = nu12();
        assert_eq!(codes(&alg, 2, &[3, 1, 2]), vec![0, 1, 2, 3]);
    }

    #[test]
    fn zero_width_power() {
        let bare = FiniteAlgebra::numbered(2, vec![]).unwrap();
        assert!(codes(&bare, 0, &[]).is_empty());
        let c = FiniteAlgebra::numbered(2, vec![Operation::constant("c", 2, 1).unwrap()]).unwrap();
        assert_eq!(codes(&c, 0, &[]), vec![0]);
    }

    #[test]
    fn extension_matches_fresh_closure() {
        let alg = nu12();
        let mut s = Subpower::generate(&alg, 3, &[7], Guard::default()).unwrap();
        s.extend(&alg, &[3]);
        s.extend(&alg, &[5, 6]);
        assert_eq!(s.sorted_codes(), codes(&alg, 3, &[7, 3, 5, 6]));
    }

    #[test]
    fn guard_refuses_large_powers() {
        let alg = z2();
        assert!(matches!(
            Subpower::empty(&alg, 10, Guard(512)),
            Err(AlgebraError::GuardExceeded {
                size: 1024,
                guard: 512
            })
        ));
    }
}
