//! Finite total and partial algebras, their JSON format, realization checks
//! and the constructions used by growth computations.

mod io;
mod power;

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::sig::{Atom, BasicTerm, FnId, Theory};

pub use io::{from_json_str, to_json_string};
pub use power::{closure, power_apply, Guard, PowerTuple, Subpower};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("invalid algebra: {0}")]
    Invalid(String),
    #[error("operation `{name}` has arity {expected} but was given {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("tuple widths differ: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("power of size {size} exceeds the guard {guard}")]
    GuardExceeded { size: u128, guard: u64 },
    #[error("undefined partial application while evaluating identity {identity}")]
    Undefined { identity: usize },
    #[error("interpretation is missing symbol `{0}`")]
    Uninterpreted(String),
    #[error("malformed algebra file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Table {
    /// Dense values in row-major argument order.
    Total(Vec<u32>),
    /// Entries sorted by argument code, codes unique.
    Partial(Vec<(u64, u32)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    name: String,
    arity: usize,
    base: usize,
    table: Table,
}

impl Operation {
    pub fn total(
        name: &str,
        arity: usize,
        base: usize,
        values: Vec<u32>,
    ) -> Result<Self, AlgebraError> {
        let want = checked_pow(base, arity)
            .ok_or_else(|| AlgebraError::Invalid(format!("operation `{name}` is too large")))?;
        if values.len() as u128 != want {
            return Err(AlgebraError::Invalid(format!(
                "total operation `{name}` needs {want} table entries, found {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| **v as usize >= base) {
            return Err(AlgebraError::Invalid(format!(
                "operation `{name}` has out-of-range value {v}"
            )));
        }
        Ok(Operation {
            name: name.to_string(),
            arity,
            base,
            table: Table::Total(values),
        })
    }

    /// Builds from `(arguments, value)` rows; duplicate argument tuples are rejected.
    pub fn partial(
        name: &str,
        arity: usize,
        base: usize,
        rows: impl IntoIterator<Item = (Vec<u32>, u32)>,
    ) -> Result<Self, AlgebraError> {
        let mut entries = Vec::new();
        for (args, value) in rows {
            if args.len() != arity {
                return Err(AlgebraError::ArityMismatch {
                    name: name.to_string(),
                    expected: arity,
                    found: args.len(),
                });
            }
            if value as usize >= base || args.iter().any(|a| *a as usize >= base) {
                return Err(AlgebraError::Invalid(format!(
                    "operation `{name}` mentions an element outside the universe"
                )));
            }
            entries.push((encode(&args, base), value));
        }
        entries.sort_unstable();
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(AlgebraError::Invalid(format!(
                "operation `{name}` has a duplicate table entry"
            )));
        }
        if arity == 0 && entries.len() != 1 {
            return Err(AlgebraError::Invalid(format!(
                "nullary operation `{name}` must have exactly one value"
            )));
        }
        let full = checked_pow(base, arity).is_some_and(|s| s == entries.len() as u128);
        let table = if full {
            Table::Total(entries.into_iter().map(|(_, v)| v).collect())
        } else {
            Table::Partial(entries)
        };
        Ok(Operation {
            name: name.to_string(),
            arity,
            base,
            table,
        })
    }

    pub fn constant(name: &str, base: usize, value: u32) -> Result<Self, AlgebraError> {
        Self::total(name, 0, base, vec![value])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_total(&self) -> bool {
        matches!(self.table, Table::Total(_))
    }

    pub fn domain_size(&self) -> usize {
        match &self.table {
            Table::Total(v) => v.len(),
            Table::Partial(e) => e.len(),
        }
    }

    pub fn apply(&self, args: &[u32]) -> Result<Option<u32>, AlgebraError> {
        if args.len() != self.arity {
            return Err(AlgebraError::ArityMismatch {
                name: self.name.clone(),
                expected: self.arity,
                found: args.len(),
            });
        }
        Ok(self.apply_code(encode(args, self.base)))
    }

    pub(crate) fn apply_code(&self, code: u64) -> Option<u32> {
        match &self.table {
            Table::Total(v) => v.get(code as usize).copied(),
            Table::Partial(e) => e
                .binary_search_by_key(&code, |(c, _)| *c)
                .ok()
                .map(|i| e[i].1),
        }
    }

    /// The defined rows as `(arguments, value)`, in argument-code order.
    pub fn entries(&self) -> Vec<(Vec<u32>, u32)> {
        match &self.table {
            Table::Total(v) => v
                .iter()
                .enumerate()
                .map(|(c, val)| (decode(c as u64, self.arity, self.base), *val))
                .collect(),
            Table::Partial(e) => e
                .iter()
                .map(|(c, val)| (decode(*c, self.arity, self.base), *val))
                .collect(),
        }
    }

    pub(crate) fn dense_values(&self) -> Option<&[u32]> {
        match &self.table {
            Table::Total(v) => Some(v),
            Table::Partial(_) => None,
        }
    }

    pub(crate) fn partial_entries(&self) -> Option<&[(u64, u32)]> {
        match &self.table {
            Table::Total(_) => None,
            Table::Partial(e) => Some(e),
        }
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(exp as u32)
}

pub(crate) fn encode(digits: &[u32], base: usize) -> u64 {
    digits
        .iter()
        .fold(0u64, |acc, d| acc * base as u64 + *d as u64)
}

pub(crate) fn decode(mut code: u64, width: usize, base: usize) -> Vec<u32> {
    let mut out = vec![0u32; width];
    for i in (0..width).rev() {
        out[i] = (code % base as u64) as u32;
        code /= base as u64;
    }
    out
}

/// Operations sharing an execution strategy in the closure engine.
#[derive(Debug)]
pub(crate) enum OpGroup {
    Nullary(Vec<u32>),
    Total {
        arity: usize,
        tables: Vec<Vec<u32>>,
    },
    /// Partial operations with one common domain.
    Partial {
        arity: usize,
        rows: Vec<Vec<u32>>,
        /// `outputs[op][row]`.
        outputs: Vec<Vec<u32>>,
        /// `colmask[j][v]`: rows whose `j`-th argument is `v`, as a bitset.
        colmask: Vec<Vec<Vec<u64>>>,
        words: usize,
    },
}

#[derive(Debug)]
pub struct FiniteAlgebra {
    universe: Vec<String>,
    operations: Vec<Operation>,
    groups: OnceLock<Vec<OpGroup>>,
    seekers: OnceLock<Vec<Seeker>>,
}

impl Clone for FiniteAlgebra {
    fn clone(&self) -> Self {
        FiniteAlgebra {
            universe: self.universe.clone(),
            operations: self.operations.clone(),
            groups: OnceLock::new(),
            seekers: OnceLock::new(),
        }
    }
}

impl PartialEq for FiniteAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.operations == other.operations
    }
}

impl Eq for FiniteAlgebra {}

impl FiniteAlgebra {
    pub fn new(universe: Vec<String>, operations: Vec<Operation>) -> Result<Self, AlgebraError> {
        if universe.is_empty() {
            return Err(AlgebraError::Invalid("the universe is empty".into()));
        }
        let mut seen = HashMap::new();
        for (i, l) in universe.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return Err(AlgebraError::Invalid(format!(
                    "duplicate element label `{l}`"
                )));
            }
        }
        let mut names = HashMap::new();
        for op in &operations {
            if names.insert(op.name.as_str(), ()).is_some() {
                return Err(AlgebraError::Invalid(format!(
                    "duplicate operation name `{}`",
                    op.name
                )));
            }
            if op.base != universe.len() {
                return Err(AlgebraError::Invalid(format!(
                    "operation `{}` was built for a universe of size {}",
                    op.name, op.base
                )));
            }
        }
        Ok(FiniteAlgebra {
            universe,
            operations,
            groups: OnceLock::new(),
            seekers: OnceLock::new(),
        })
    }

    /// Universe labelled `0, 1, ..., size-1`.
    pub fn numbered(size: usize, operations: Vec<Operation>) -> Result<Self, AlgebraError> {
        Self::new((0..size).map(|i| i.to_string()).collect(), operations)
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn label(&self, e: u32) -> &str {
        &self.universe[e as usize]
    }

    pub fn element(&self, label: &str) -> Option<u32> {
        self.universe
            .iter()
            .position(|l| l == label)
            .map(|i| i as u32)
    }

    pub fn operations(&self) -> &[Operation] {
        &self.operations
    }

    pub fn operation(&self, name: &str) -> Option<(usize, &Operation)> {
        self.operations
            .iter()
            .enumerate()
            .find(|(_, o)| o.name == name)
    }

    pub fn is_total(&self) -> bool {
        self.operations.iter().all(Operation::is_total)
    }

    pub fn has_nullary(&self) -> bool {
        self.operations.iter().any(|o| o.arity == 0)
    }

    pub(crate) fn groups(&self) -> &[OpGroup] {
        self.groups.get_or_init(|| build_groups(self))
    }

    pub(crate) fn seekers(&self) -> &[Seeker] {
        self.seekers.get_or_init(|| build_seekers(self))
    }

    /// Renames to a name not used by any operation, by appending digits.
    pub fn fresh_op_name(&self, stem: &str) -> String {
        fresh_name(stem, |s| self.operation(s).is_some())
    }

    pub fn fresh_label(&self, stem: &str) -> String {
        fresh_name(stem, |s| self.element(s).is_some())
    }

    /// Keeps only the named operations, in their original order.
    pub fn reduct(&self, keep: &[&str]) -> Result<FiniteAlgebra, AlgebraError> {
        for k in keep {
            if self.operation(k).is_none() {
                return Err(AlgebraError::Invalid(format!("no operation named `{k}`")));
            }
        }
        let ops = self
            .operations
            .iter()
            .filter(|o| keep.contains(&o.name.as_str()))
            .cloned()
            .collect();
        FiniteAlgebra::new(self.universe.clone(), ops)
    }

    pub fn with_operation(&self, op: Operation) -> Result<FiniteAlgebra, AlgebraError> {
        let mut ops = self.operations.clone();
        ops.push(op);
        FiniteAlgebra::new(self.universe.clone(), ops)
    }

    /// Adds a nullary operation naming each element.
    pub fn expand_by_all_constants(&self) -> Result<FiniteAlgebra, AlgebraError> {
        let mut out = self.clone();
        for e in 0..self.size() as u32 {
            let name = out.fresh_op_name(&format!("c_{}", self.label(e)));
            out = out.with_operation(Operation::constant(&name, self.size(), e)?)?;
        }
        Ok(out)
    }

    /// The direct power `A^k` as an algebra on tuples, operations coordinatewise.
    pub fn power_algebra(&self, k: usize) -> Result<FiniteAlgebra, AlgebraError> {
        let size = checked_pow(self.size(), k)
            .filter(|s| *s <= 1 << 20)
            .ok_or_else(|| AlgebraError::Invalid("power algebra too large".into()))?
            as usize;
        let labels = (0..size as u64)
            .map(|c| {
                let parts: Vec<&str> = decode(c, k, self.size())
                    .into_iter()
                    .map(|d| self.label(d))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let mut ops = Vec::new();
        for op in &self.operations {
            let m = op.arity;
            let Some(cells) = checked_pow(size, m).filter(|c| *c <= 1 << 22) else {
                return Err(AlgebraError::Invalid(
                    "power algebra table too large".into(),
                ));
            };
            let mut rows = Vec::new();
            for code in 0..cells as u64 {
                let args: Vec<u32> = decode(code, m, size);
                let tuples: Vec<Vec<u32>> = args
                    .iter()
                    .map(|a| decode(*a as u64, k, self.size()))
                    .collect();
                let mut out = Vec::with_capacity(k);
                let mut defined = true;
                for i in 0..k {
                    let col: Vec<u32> = tuples.iter().map(|t| t[i]).collect();
                    match op.apply_code(encode(&col, self.size())) {
                        Some(v) => out.push(v),
                        None => {
                            defined = false;
                            break;
                        }
                    }
                }
                if defined {
                    rows.push((args, encode(&out, self.size()) as u32));
                }
            }
            ops.push(Operation::partial(&op.name, m, size, rows)?);
        }
        FiniteAlgebra::new(labels, ops)
    }

    /// Image under `map: A → B` (surjective onto `0..target_size`); fails if
    /// `map` is not compatible with the operations.
    pub fn image(
        &self,
        map: &[u32],
        target_labels: Vec<String>,
    ) -> Result<FiniteAlgebra, AlgebraError> {
        let b = target_labels.len();
        if map.len() != self.size() || map.iter().any(|v| *v as usize >= b) {
            return Err(AlgebraError::Invalid(
                "map does not send A into the target".into(),
            ));
        }
        if (0..b as u32).any(|t| !map.contains(&t)) {
            return Err(AlgebraError::Invalid("map is not surjective".into()));
        }
        let mut ops = Vec::new();
        for op in &self.operations {
            let mut table: HashMap<u64, u32> = HashMap::new();
            for (args, v) in op.entries() {
                let img: Vec<u32> = args.iter().map(|a| map[*a as usize]).collect();
                let key = encode(&img, b);
                match table.insert(key, map[v as usize]) {
                    Some(old) if old != map[v as usize] => {
                        return Err(AlgebraError::Invalid(format!(
                            "map is not compatible with `{}`",
                            op.name
                        )))
                    }
                    _ => {}
                }
            }
            let rows = table.into_iter().map(|(k, v)| (decode(k, op.arity, b), v));
            ops.push(Operation::partial(&op.name, op.arity, b, rows)?);
        }
        FiniteAlgebra::new(target_labels, ops)
    }
}

fn fresh_name(stem: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(stem) {
        return stem.to_string();
    }
    (2..)
        .map(|i| format!("{stem}{i}"))
        .find(|s| !taken(s))
        .expect("some suffix is free")
}

fn build_groups(alg: &FiniteAlgebra) -> Vec<OpGroup> {
    let base = alg.size();
    let mut nullary = Vec::new();
    let mut totals: Vec<(usize, Vec<Vec<u32>>)> = Vec::new();
    let mut partial_keys: HashMap<(usize, Vec<u64>), usize> = HashMap::new();
    let mut partials: Vec<(usize, Vec<u64>, Vec<Vec<u32>>)> = Vec::new();
    for op in &alg.operations {
        if op.arity == 0 {
            nullary.push(op.apply_code(0).expect("nullary operations are total"));
        } else if let Some(values) = op.dense_values() {
            match totals.iter_mut().find(|(a, _)| *a == op.arity) {
                Some((_, t)) => t.push(values.to_vec()),
                None => totals.push((op.arity, vec![values.to_vec()])),
            }
        } else {
            let entries = op.partial_entries().expect("partial");
            let codes: Vec<u64> = entries.iter().map(|(c, _)| *c).collect();
            let outs: Vec<u32> = entries.iter().map(|(_, v)| *v).collect();
            let key = (op.arity, codes.clone());
            match partial_keys.get(&key) {
                Some(&g) => partials[g].2.push(outs),
                None => {
                    partial_keys.insert(key, partials.len());
                    partials.push((op.arity, codes, vec![outs]));
                }
            }
        }
    }
    let mut groups = Vec::new();
    if !nullary.is_empty() {
        groups.push(OpGroup::Nullary(nullary));
    }
    for (arity, tables) in totals {
        groups.push(OpGroup::Total { arity, tables });
    }
    for (arity, codes, outputs) in partials {
        let rows: Vec<Vec<u32>> = codes.iter().map(|c| decode(*c, arity, base)).collect();
        let words = rows.len().div_ceil(64).max(1);
        let mut colmask = vec![vec![vec![0u64; words]; base]; arity];
        for (r, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                colmask[j][*v as usize][r / 64] |= 1 << (r % 64);
            }
        }
        groups.push(OpGroup::Partial {
            arity,
            rows,
            outputs,
            colmask,
            words,
        });
    }
    groups
}

/// Largest domain an operation may have to take part in targeted search.
const SEEKER_ROWS: usize = 1 << 16;

/// One non-nullary operation indexed by output value, for finding argument
/// tuples that produce a given tuple of `A^n`.
#[derive(Debug)]
pub(crate) struct Seeker {
    pub(crate) arity: usize,
    pub(crate) rows: Vec<Vec<u32>>,
    pub(crate) words: usize,
    /// `colmask[j][v]`: rows whose `j`-th argument is `v`.
    pub(crate) colmask: Vec<Vec<Vec<u64>>>,
    /// `outmask[v]`: rows with value `v`.
    pub(crate) outmask: Vec<Vec<u64>>,
}

fn build_seekers(alg: &FiniteAlgebra) -> Vec<Seeker> {
    let base = alg.size();
    let mut out = Vec::new();
    for op in alg.operations.iter().filter(|o| o.arity > 0) {
        if checked_pow(base, op.arity).is_none_or(|c| c > SEEKER_ROWS as u128) && op.is_total() {
            continue;
        }
        let entries = op.entries();
        if entries.len() > SEEKER_ROWS {
            continue;
        }
        let words = entries.len().div_ceil(64).max(1);
        let mut colmask = vec![vec![vec![0u64; words]; base]; op.arity];
        let mut outmask = vec![vec![0u64; words]; base];
        let mut rows = Vec::with_capacity(entries.len());
        for (r, (args, v)) in entries.into_iter().enumerate() {
            for (j, a) in args.iter().enumerate() {
                colmask[j][*a as usize][r / 64] |= 1 << (r % 64);
            }
            outmask[v as usize][r / 64] |= 1 << (r % 64);
            rows.push(args);
        }
        out.push(Seeker {
            arity: op.arity,
            rows,
            words,
            colmask,
            outmask,
        });
    }
    out
}

/// One-point completion: a new absorbing element, every operation totalized
/// with that element off its old domain, and the equality meet
/// `a ∧ b = a if a = b else new`.
pub fn one_point_completion(
    alg: &FiniteAlgebra,
    new_label: &str,
) -> Result<FiniteAlgebra, AlgebraError> {
    if alg.element(new_label).is_some() {
        return Err(AlgebraError::Invalid(format!(
            "label `{new_label}` is already in the universe"
        )));
    }
    let old = alg.size();
    let size = old + 1;
    let zero = old as u32;
    let mut ops = Vec::new();
    for op in alg.operations() {
        let cells = checked_pow(size, op.arity)
            .filter(|c| *c <= 1 << 26)
            .ok_or_else(|| AlgebraError::Invalid("completed table too large".into()))?;
        let mut values = Vec::with_capacity(cells as usize);
        for code in 0..cells as u64 {
            let args = decode(code, op.arity, size);
            let v = if args.contains(&zero) {
                None
            } else {
                op.apply_code(encode(&args, old))
            };
            values.push(v.unwrap_or(zero));
        }
        ops.push(Operation::total(op.name(), op.arity, size, values)?);
    }
    let meet_name = alg.fresh_op_name("meet");
    let meet = (0..size * size)
        .map(|c| {
            let (a, b) = (c / size, c % size);
            if a == b {
                a as u32
            } else {
                zero
            }
        })
        .collect();
    ops.push(Operation::total(&meet_name, 2, size, meet)?);
    let mut universe = alg.universe().to_vec();
    universe.push(new_label.to_string());
    FiniteAlgebra::new(universe, ops)
}

/// A term over an algebra's operations; variables are argument positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpTerm {
    Var(usize),
    App(usize, Vec<OpTerm>),
}

impl OpTerm {
    /// `op(x0, ..., x_{m-1})`.
    pub fn basic(op: usize, arity: usize) -> Self {
        OpTerm::App(op, (0..arity).map(OpTerm::Var).collect())
    }

    pub fn eval(&self, alg: &FiniteAlgebra, args: &[u32]) -> Option<u32> {
        match self {
            OpTerm::Var(i) => Some(args[*i]),
            OpTerm::App(op, sub) => {
                let vals: Option<Vec<u32>> = sub.iter().map(|s| s.eval(alg, args)).collect();
                let o = &alg.operations()[*op];
                o.apply_code(encode(&vals?, alg.size()))
            }
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            OpTerm::Var(i) => Some(*i),
            OpTerm::App(_, sub) => sub.iter().filter_map(|s| s.max_var()).max(),
        }
    }
}

/// Interprets a theory's symbols in an algebra: each function symbol by a
/// term, each constant by an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub functions: Vec<OpTerm>,
    pub constants: Vec<u32>,
}

impl Interpretation {
    /// Symbol `F` ↦ the operation named `F`; constant `c` ↦ the value of the
    /// nullary operation named `c`, else the element labelled `c`.
    pub fn by_name(theory: &Theory, alg: &FiniteAlgebra) -> Result<Self, AlgebraError> {
        let sig = &theory.signature;
        let mut functions = Vec::new();
        for (name, arity) in sig.functions() {
            let (i, op) = alg
                .operation(name)
                .ok_or_else(|| AlgebraError::Uninterpreted(name.clone()))?;
            if op.arity() != *arity {
                return Err(AlgebraError::ArityMismatch {
                    name: name.clone(),
                    expected: *arity,
                    found: op.arity(),
                });
            }
            functions.push(OpTerm::basic(i, *arity));
        }
        let mut constants = Vec::new();
        for name in sig.constants() {
            let v = match alg.operation(name) {
                Some((_, op)) if op.arity() == 0 => op.apply_code(0),
                _ => alg.element(name),
            };
            constants.push(v.ok_or_else(|| AlgebraError::Uninterpreted(name.clone()))?);
        }
        Ok(Interpretation {
            functions,
            constants,
        })
    }

    pub fn validate(&self, theory: &Theory, alg: &FiniteAlgebra) -> Result<(), AlgebraError> {
        let sig = &theory.signature;
        if self.functions.len() != sig.function_count()
            || self.constants.len() != sig.constant_count()
        {
            return Err(AlgebraError::Invalid(
                "interpretation does not cover the signature".into(),
            ));
        }
        for (i, (name, arity)) in sig.functions().iter().enumerate() {
            if self.functions[i].max_var().is_some_and(|v| v >= *arity) {
                return Err(AlgebraError::Invalid(format!(
                    "interpretation of `{name}` uses a variable beyond its arity"
                )));
            }
        }
        if self.constants.iter().any(|c| *c as usize >= alg.size()) {
            return Err(AlgebraError::Invalid(
                "constant outside the universe".into(),
            ));
        }
        Ok(())
    }

    /// Value of a basic term under a valuation of its variables.
    pub fn eval_term(&self, alg: &FiniteAlgebra, t: &BasicTerm, val: &[u32]) -> Option<u32> {
        let atom = |a: &Atom| match a {
            Atom::Var(v) => val[v.0 as usize],
            Atom::Const(c) => self.constants[c.0 as usize],
        };
        match t {
            BasicTerm::Var(v) => Some(val[v.0 as usize]),
            BasicTerm::Const(c) => Some(self.constants[c.0 as usize]),
            BasicTerm::App(f, args) => {
                let vals: Vec<u32> = args.iter().map(atom).collect();
                self.function(*f).eval(alg, &vals)
            }
        }
    }

    pub fn function(&self, f: FnId) -> &OpTerm {
        &self.functions[f.0 as usize]
    }
}

/// True iff every identity of Σ holds under every valuation. An undefined
/// application is an error, not a failure.
pub fn check_models(
    alg: &FiniteAlgebra,
    theory: &Theory,
    interp: &Interpretation,
) -> Result<bool, AlgebraError> {
    interp.validate(theory, alg)?;
    let a = alg.size() as u32;
    for (idx, id) in theory.identities.iter().enumerate() {
        let vars = id.variables();
        let mut val = vec![0u32; id.variable_bound()];
        let mut digits = vec![0u32; vars.len()];
        loop {
            for (v, d) in vars.iter().zip(&digits) {
                val[v.0 as usize] = *d;
            }
            let l = interp.eval_term(alg, &id.lhs, &val);
            let r = interp.eval_term(alg, &id.rhs, &val);
            match (l, r) {
                (Some(l), Some(r)) if l != r => return Ok(false),
                (Some(_), Some(_)) => {}
                _ => return Err(AlgebraError::Undefined { identity: idx }),
            }
            let mut i = digits.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < a {
                    break;
                }
                digits[i] = 0;
            }
            if i == 0 && digits.iter().all(|d| *d == 0) {
                break;
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::parse_theory;

    pub(crate) fn z2() -> FiniteAlgebra {
        FiniteAlgebra::numbered(
            2,
            vec![Operation::total("+", 2, 2, vec![0, 1, 1, 0]).unwrap()],
        )
        .unwrap()
    }

    fn semilattice() -> FiniteAlgebra {
        FiniteAlgebra::numbered(
            2,
            vec![Operation::total("meet", 2, 2, vec![0, 0, 0, 1]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = semilattice();
        assert_eq!(s.operations()[0].apply(&[0, 1]).unwrap(), Some(0));
        assert!(s.operations()[0].apply(&[0]).is_err());
        let f = Operation::partial(
            "F",
            2,
            2,
            vec![(vec![1, 0], 0), (vec![0, 1], 0), (vec![1, 1], 1)],
        )
        .unwrap();
        assert_eq!(f.apply(&[1, 0]).unwrap(), Some(0));
        assert_eq!(f.apply(&[0, 0]).unwrap(), None);
        let c = Operation::constant("c", 3, 2).unwrap();
        assert_eq!(c.apply(&[]).unwrap(), Some(2));
    }

    #[test]
    fn duplicate_entries_rejected() {
        assert!(Operation::partial("F", 1, 2, vec![(vec![0], 0), (vec![0], 0)]).is_err());
    }

    #[test]
    fn completion_of_bare_set() {
        let bare = FiniteAlgebra::numbered(2, vec![]).unwrap();
        let c = one_point_completion(&bare, "0'").unwrap();
        assert_eq!(c.size(), 3);
        assert_eq!(c.operations().len(), 1);
        let meet = &c.operations()[0];
        assert_eq!(meet.apply(&[1, 1]).unwrap(), Some(1));
        assert_eq!(meet.apply(&[0, 1]).unwrap(), Some(2));
        assert!(one_point_completion(&bare, "1").is_err());
    }

    #[test]
    fn iterated_completion() {
        let bare = FiniteAlgebra::numbered(2, vec![]).unwrap();
        let once = one_point_completion(&bare, "z").unwrap();
        let twice = one_point_completion(&once, "0'").unwrap();
        assert_eq!(twice.size(), 4);
        assert!(twice.is_total());
        let first_meet = &twice.operations()[0];
        assert_eq!(first_meet.apply(&[2, 2]).unwrap(), Some(2));
        assert_eq!(first_meet.apply(&[3, 2]).unwrap(), Some(3));
        assert_eq!(twice.operations()[1].name(), "meet2");
    }

    #[test]
    fn check_models_examples() {
        let t = parse_theory("fn m/3; m(x,y,y)=x; m(y,y,x)=x;").unwrap();
        let plus = OpTerm::App(
            0,
            vec![
                OpTerm::App(0, vec![OpTerm::Var(0), OpTerm::Var(1)]),
                OpTerm::Var(2),
            ],
        );
        let interp = Interpretation {
            functions: vec![plus],
            constants: vec![],
        };
        assert!(check_models(&z2(), &t, &interp).unwrap());
        let meet3 = OpTerm::App(
            0,
            vec![
                OpTerm::App(0, vec![OpTerm::Var(0), OpTerm::Var(1)]),
                OpTerm::Var(2),
            ],
        );
        let interp = Interpretation {
            functions: vec![meet3],
            constants: vec![],
        };
        assert!(!check_models(&semilattice(), &t, &interp).unwrap());
    }

    #[test]
    fn undefined_is_reported() {
        let f = Operation::partial("F", 1, 2, vec![(vec![0], 0)]).unwrap();
        let alg = FiniteAlgebra::numbered(2, vec![f]).unwrap();
        let t = parse_theory("fn F/1; F(x)=x;").unwrap();
        let interp = Interpretation::by_name(&t, &alg).unwrap();
        assert!(matches!(
            check_models(&alg, &t, &interp),
            Err(AlgebraError::Undefined { identity: 0 })
        ));
    }

    #[test]
    fn image_of_z4() {
        let plus: Vec<u32> = (0..16).map(|c| ((c / 4 + c % 4) % 4) as u32).collect();
        let z4 =
            FiniteAlgebra::numbered(4, vec![Operation::total("+", 2, 4, plus).unwrap()]).unwrap();
        let img = z4
            .image(&[0, 1, 0, 1], vec!["0".into(), "1".into()])
            .unwrap();
        assert_eq!(img, z2());
        assert!(z4
            .image(&[0, 1, 1, 0], vec!["0".into(), "1".into()])
            .is_err());
    }
}
