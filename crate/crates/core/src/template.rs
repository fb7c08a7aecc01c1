//! Polynomial-size generating sets from a pointed cube term.
//!
//! A witness matrix with every non-`x` variable replaced by one constant
//! gives a matrix `R` over `x` and constants. Repeatedly factoring a tuple
//! of `A^n` through the rows of `R` (one row per block of a near-equal
//! split of the still unprocessed coordinates) ends in tuples that are
//! constant on all but fewer than `k` coordinates. Those tuples fall into
//! few "types", each inside a copy of a small power `A^j`; the generators of
//! all these copies generate `A^n`.
//!
//! Coordinates and column/row indices are 0-based in this API.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Guard, Operation, Subpower};
use crate::cube::{CubeWitness, Entry, WitnessInterp};
use crate::growth::{d_exact, GrowthError};

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("the witness has no constant; adjoin one first")]
    NoConstant,
    #[error("constant `{0}` already occurs in the witness")]
    ConstantClash(String),
    #[error("column {0} has no constant")]
    BareColumn(usize),
    #[error("cannot split {size} coordinates into {k} nonempty blocks")]
    TooFew { size: usize, k: usize },
    #[error("constant `{0}` has no value in the algebra")]
    UnknownConstant(String),
    #[error("the algebra must be total")]
    Partial,
    #[error("the base generators do not generate A^{0}")]
    BaseGens(usize),
    #[error("{0}")]
    Precondition(String),
}

/// A cube matrix over `x` and constants only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubeMatrixR {
    pub symbol: String,
    /// Entries are `Entry::X` or `Entry::Const`.
    pub rows: Vec<Vec<Entry>>,
    /// `lambda[j]`: least row with a constant in column `j`.
    pub lambda: Vec<usize>,
}

impl CubeMatrixR {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Distinct constants, in order of first appearance.
    pub fn constants(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in self.rows.iter().flatten() {
            if let Entry::Const(c) = e {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        }
        out
    }

    pub fn p(&self) -> usize {
        self.constants().len()
    }

    fn from_rows(symbol: String, rows: Vec<Vec<Entry>>) -> Result<Self, TemplateError> {
        let m = rows.first().map_or(0, Vec::len);
        let mut lambda = Vec::with_capacity(m);
        for j in 0..m {
            let i = rows
                .iter()
                .position(|r| matches!(r[j], Entry::Const(_)))
                .ok_or(TemplateError::BareColumn(j))?;
            lambda.push(i);
        }
        Ok(CubeMatrixR {
            symbol,
            rows,
            lambda,
        })
    }
}

/// Replaces every non-`x` variable by the witness's first constant, taken
/// in `declared` order (constants not listed there follow in order of
/// appearance).
pub fn derive_r(witness: &CubeWitness, declared: &[String]) -> Result<CubeMatrixR, TemplateError> {
    let present = witness.constants();
    let c = declared
        .iter()
        .find(|d| present.contains(d))
        .or_else(|| present.first())
        .ok_or(TemplateError::NoConstant)?
        .clone();
    substitute(witness, &c)
}

/// Replaces every non-`x` variable by a new constant `name`, for witnesses
/// without constants; the algebra must then be expanded by a value for it.
pub fn derive_r_adjoined(witness: &CubeWitness, name: &str) -> Result<CubeMatrixR, TemplateError> {
    if witness.constants().iter().any(|c| c == name) {
        return Err(TemplateError::ConstantClash(name.to_string()));
    }
    substitute(witness, name)
}

fn substitute(witness: &CubeWitness, c: &str) -> Result<CubeMatrixR, TemplateError> {
    let rows = witness
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| match e {
                    Entry::Var(_) => Entry::Const(c.to_string()),
                    other => other.clone(),
                })
                .collect()
        })
        .collect();
    CubeMatrixR::from_rows(witness.symbol.clone(), rows)
}

/// Splits `u` (in its given order) into `k` consecutive nonempty blocks
/// whose sizes differ by at most one, larger blocks first.
pub fn partition_pi(u: &[usize], k: usize) -> Result<Vec<Vec<usize>>, TemplateError> {
    if k == 0 || u.len() < k {
        return Err(TemplateError::TooFew { size: u.len(), k });
    }
    let (q, rem) = (u.len() / k, u.len() % k);
    let mut out = Vec::with_capacity(k);
    let mut at = 0;
    for i in 0..k {
        let len = q + usize::from(i < rem);
        out.push(u[at..at + len].to_vec());
        at += len;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateNode {
    /// Column indices from the root.
    pub address: Vec<usize>,
    pub label: Vec<usize>,
    /// Union of the labels from the root to this node, sorted.
    pub processed: Vec<usize>,
    /// `n - |processed|`.
    pub unprocessed: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl TemplateNode {
    /// Address as 1-based column numbers, e.g. `"22"`; dot-separated when
    /// some column number has more than one digit; `"∅"` for the root.
    pub fn address_string(&self) -> String {
        if self.address.is_empty() {
            return "∅".into();
        }
        let parts: Vec<String> = self.address.iter().map(|a| (a + 1).to_string()).collect();
        if parts.iter().all(|p| p.len() == 1) {
            parts.concat()
        } else {
            parts.join(".")
        }
    }
}

/// The factoring tree; nodes in depth-first preorder, root first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Template {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub nodes: Vec<TemplateNode>,
}

impl Template {
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|i| self.nodes[*i].children.is_empty())
    }

    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .map(|x| x.address.len())
            .max()
            .unwrap_or(0)
    }

    /// Unprocessed coordinates of node `i`, split into the children's blocks.
    fn blocks(&self, i: usize) -> Vec<Vec<usize>> {
        let node = &self.nodes[i];
        let rest: Vec<usize> = (0..self.n)
            .filter(|c| node.processed.binary_search(c).is_err())
            .collect();
        partition_pi(&rest, self.k).expect("internal nodes have at least k unprocessed coordinates")
    }
}

pub fn build_template(n: usize, r: &CubeMatrixR) -> Template {
    let mut t = Template {
        n,
        k: r.k(),
        m: r.m(),
        nodes: vec![TemplateNode {
            address: Vec::new(),
            label: Vec::new(),
            processed: Vec::new(),
            unprocessed: n,
            parent: None,
            children: Vec::new(),
        }],
    };
    expand(&mut t, r, 0);
    t
}

fn expand(t: &mut Template, r: &CubeMatrixR, at: usize) {
    if t.nodes[at].unprocessed < t.k {
        return;
    }
    let blocks = t.blocks(at);
    for (i, &row) in r.lambda.iter().enumerate() {
        let parent = &t.nodes[at];
        let label = blocks[row].clone();
        let mut processed = parent.processed.clone();
        processed.extend(&label);
        processed.sort_unstable();
        let mut address = parent.address.clone();
        address.push(i);
        let child = TemplateNode {
            address,
            unprocessed: parent.unprocessed - label.len(),
            label,
            processed,
            parent: Some(at),
            children: Vec::new(),
        };
        let id = t.nodes.len();
        t.nodes.push(child);
        t.nodes[at].children.push(id);
        expand(t, r, id);
    }
}

/// `u_σ ≤ ((2k−1)/(2k))^{|σ|}·n` for every node, in exact arithmetic.
pub fn check_shrinkage(t: &Template) -> bool {
    let k = t.k as u64;
    t.nodes.iter().all(|node| {
        let d = node.address.len() as u32;
        BigUint::from(node.unprocessed) * BigUint::from(2 * k).pow(d)
            <= BigUint::from(t.n) * BigUint::from(2 * k - 1).pow(d)
    })
}

/// `⌈((k−1)/k)·u⌉ ≤ ((2k−1)/(2k))·u` for integers `u ≥ k ≥ 1`.
pub fn ceil_lemma_check(u: u64, k: u64) -> Result<bool, TemplateError> {
    if k == 0 || u < k {
        return Err(TemplateError::Precondition(format!(
            "need u ≥ k ≥ 1, got u = {u}, k = {k}"
        )));
    }
    let ceil = ((k - 1) * u).div_ceil(k);
    Ok(2 * k * ceil <= (2 * k - 1) * u)
}

/// A coordinate of a symbolically factored tuple: the original entry, or
/// a constant's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Sym {
    Orig,
    Val(u32),
}

/// Coefficients of `R` evaluated in an algebra.
struct Evaluated {
    /// `None` for `x`.
    rows: Vec<Vec<Option<u32>>>,
}

fn evaluate(r: &CubeMatrixR, interp: &WitnessInterp) -> Result<Evaluated, TemplateError> {
    let rows = r
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| match e {
                    Entry::X => Ok(None),
                    Entry::Const(c) => interp
                        .constants
                        .get(c)
                        .copied()
                        .map(Some)
                        .ok_or_else(|| TemplateError::UnknownConstant(c.clone())),
                    Entry::Var(_) => unreachable!("R has no variables"),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Evaluated { rows })
}

/// The `m` factors of `parent` at internal node `at`: the processed
/// coordinates and the first block follow row 0, block `i` follows row `i`;
/// an `x` entry copies the parent's coordinate, a constant replaces it.
fn factor<T: Copy>(
    t: &Template,
    at: usize,
    ev: &Evaluated,
    parent: &[T],
    constant: impl Fn(u32) -> T,
) -> Vec<Vec<T>> {
    let blocks = t.blocks(at);
    let mut row_of = vec![0usize; t.n];
    for (i, b) in blocks.iter().enumerate() {
        for &c in b {
            row_of[c] = i;
        }
    }
    (0..t.m)
        .map(|j| {
            (0..t.n)
                .map(|c| match ev.rows[row_of[c]][j] {
                    None => parent[c],
                    Some(v) => constant(v),
                })
                .collect()
        })
        .collect()
}

/// A tuple attached to every template node; internal nodes are `F` of
/// their children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorTree {
    /// `tuples[i]` belongs to `template.nodes[i]`.
    pub tuples: Vec<Vec<u32>>,
}

/// Factors `a` down the template.
pub fn process_tuple(
    a: &[u32],
    t: &Template,
    r: &CubeMatrixR,
    alg: &FiniteAlgebra,
    interp: &WitnessInterp,
) -> Result<FactorTree, TemplateError> {
    if a.len() != t.n || a.iter().any(|v| *v as usize >= alg.size()) {
        return Err(TemplateError::Precondition(format!(
            "expected a tuple of length {} over A",
            t.n
        )));
    }
    let ev = evaluate(r, interp)?;
    let mut tuples = vec![Vec::new(); t.nodes.len()];
    tuples[0] = a.to_vec();
    for at in 0..t.nodes.len() {
        if t.nodes[at].children.is_empty() {
            continue;
        }
        let parts = factor(t, at, &ev, &tuples[at], |v| v);
        for (child, part) in t.nodes[at].children.iter().zip(parts) {
            tuples[*child] = part;
        }
    }
    Ok(FactorTree { tuples })
}

/// Checks `F(children) = parent` at every internal node, and that every
/// leaf tuple is constant on each label along its path.
pub fn verify_factor_tree(
    tree: &FactorTree,
    t: &Template,
    alg: &FiniteAlgebra,
    interp: &WitnessInterp,
    r: &CubeMatrixR,
) -> Result<bool, TemplateError> {
    let values: BTreeSet<u32> = evaluate(r, interp)?
        .rows
        .into_iter()
        .flatten()
        .flatten()
        .collect();
    for (at, node) in t.nodes.iter().enumerate() {
        if node.children.is_empty() {
            let mut path = Some(at);
            while let Some(i) = path {
                let label = &t.nodes[i].label;
                if let Some(&first) = label.first() {
                    let v = tree.tuples[at][first];
                    if !values.contains(&v) || label.iter().any(|c| tree.tuples[at][*c] != v) {
                        return Ok(false);
                    }
                }
                path = t.nodes[i].parent;
            }
            continue;
        }
        for c in 0..t.n {
            let args: Vec<u32> = node.children.iter().map(|ch| tree.tuples[*ch][c]).collect();
            if interp.function.eval(alg, &args) != Some(tree.tuples[at][c]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Leaf patterns reached by factoring a symbolic tuple, deduplicated.
fn leaf_types(t: &Template, ev: &Evaluated) -> Vec<Vec<Sym>> {
    let mut syms = vec![Vec::new(); t.nodes.len()];
    syms[0] = vec![Sym::Orig; t.n];
    let mut types = BTreeSet::new();
    for at in 0..t.nodes.len() {
        if t.nodes[at].children.is_empty() {
            types.insert(syms[at].clone());
            continue;
        }
        let parts = factor(t, at, ev, &syms[at], Sym::Val);
        for (child, part) in t.nodes[at].children.iter().zip(parts) {
            syms[*child] = part;
        }
    }
    types.into_iter().collect()
}

/// Cells of a type: each original coordinate alone, then the coordinates
/// holding each constant value. Returns `cell[c]` and the cell count.
fn cells(ty: &[Sym]) -> (Vec<usize>, usize) {
    let mut keys: Vec<Sym> = Vec::new();
    let mut cell = Vec::with_capacity(ty.len());
    for (c, s) in ty.iter().enumerate() {
        let key = match s {
            Sym::Orig => Sym::Val(u32::MAX - c as u32),
            v => *v,
        };
        let idx = keys.iter().position(|k| *k == key).unwrap_or_else(|| {
            keys.push(key);
            keys.len() - 1
        });
        cell.push(idx);
    }
    (cell, keys.len())
}

fn digits(code: u64, width: usize, base: usize) -> Vec<u32> {
    let mut out = vec![0u32; width];
    let mut c = code;
    for slot in out.iter_mut().rev() {
        *slot = (c % base as u64) as u32;
        c /= base as u64;
    }
    out
}

fn code_of(d: &[u32], base: usize) -> u64 {
    d.iter().fold(0u64, |acc, v| acc * base as u64 + *v as u64)
}

/// Places `gens` (codes of `A^width`) into the tuples of `A^n` constant on
/// cells: coordinate `c` takes digit `cell[c]` of the generator.
fn embed(gens: &[u64], width: usize, base: usize, cell: &[usize], out: &mut BTreeSet<u64>) {
    for &g in gens {
        let d = digits(g, width, base);
        let t: Vec<u32> = cell.iter().map(|c| d[*c]).collect();
        out.insert(code_of(&t, base));
    }
}

fn require_total(alg: &FiniteAlgebra) -> Result<(), TemplateError> {
    if alg.is_total() {
        Ok(())
    } else {
        Err(TemplateError::Partial)
    }
}

fn check_base(
    alg: &FiniteAlgebra,
    width: usize,
    gens: &[u64],
    guard: Guard,
) -> Result<(), TemplateError> {
    let sub = Subpower::generate(alg, width, gens, guard)?;
    if sub.is_full() {
        Ok(())
    } else {
        Err(TemplateError::BaseGens(width))
    }
}

/// `m^{log_w(n/k)+1}·g` with `w = 2k/(2k−1)`.
pub fn polynomial_bound(m: usize, k: usize, n: usize, g: usize) -> f64 {
    let w = (2 * k) as f64 / (2 * k - 1) as f64;
    let r = (n as f64 / k as f64).ln() / w.ln() + 1.0;
    (m as f64).powf(r) * g as f64
}

/// `binom(n, k−1)·g`.
pub fn one_pointed_bound(n: usize, k: usize, g: usize) -> u128 {
    binom(n, k.saturating_sub(1)) * g as u128
}

fn binom(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub p: usize,
    /// Size of the base generating set of `A^{p+k−1}`.
    pub g: usize,
    pub nodes: usize,
    pub depth: usize,
    pub types: usize,
    /// Sorted codes of `A^n`.
    pub generators: Vec<u64>,
    /// The size bound for `n ≥ k`; `g` below that (a single type).
    pub bound: f64,
    /// Every node depth `D` has `k·(2k)^{D−1} ≤ n·(2k−1)^{D−1}`, i.e.
    /// `D ≤ log_w(n/k) + 1`.
    pub depth_ok: bool,
    pub shrinkage_ok: bool,
    /// Closure of `generators` is `A^n`; absent when not checked.
    pub generates: Option<bool>,
}

impl GeneratorReport {
    pub fn within_bound(&self) -> bool {
        self.generators.len() as f64 <= self.bound
    }
}

fn depth_within(n: usize, k: usize, depth: usize) -> bool {
    if depth == 0 {
        return true;
    }
    let e = (depth - 1) as u32;
    BigUint::from(k) * BigUint::from(2 * k).pow(e)
        <= BigUint::from(n) * BigUint::from(2 * k - 1).pow(e)
}

/// Generators of `A^n` from the template of `r`: the base generators of
/// `A^{p+k−1}` embedded into the subalgebra of each realized leaf type.
/// `base_gens` defaults to a least generating set. `verify` also checks
/// that the output generates `A^n`.
pub fn polynomial_generators(
    alg: &FiniteAlgebra,
    r: &CubeMatrixR,
    interp: &WitnessInterp,
    n: usize,
    base_gens: Option<&[u64]>,
    verify: bool,
    guard: Guard,
) -> Result<GeneratorReport, TemplateError> {
    require_total(alg)?;
    let (k, m, p) = (r.k(), r.m(), r.p());
    let width = p + k - 1;
    let base = match base_gens {
        Some(g) => {
            check_base(alg, width, g, guard)?;
            g.to_vec()
        }
        None => d_exact(alg, width, guard)?.witness,
    };
    let ev = evaluate(r, interp)?;
    let t = build_template(n, r);
    let types = leaf_types(&t, &ev);
    let mut out = BTreeSet::new();
    for ty in &types {
        let (cell, j) = cells(ty);
        debug_assert!(j <= width || n < width);
        // Projecting onto the first `j` coordinates keeps generation.
        let projected: Vec<u64> = base
            .iter()
            .map(|g| code_of(&digits(*g, width, alg.size())[..j.min(width)], alg.size()))
            .collect();
        embed(&projected, j.min(width), alg.size(), &cell, &mut out);
    }
    let generators: Vec<u64> = out.into_iter().collect();
    let generates = if verify {
        Some(Subpower::generate(alg, n, &generators, guard)?.is_full())
    } else {
        None
    };
    let g = base.len();
    Ok(GeneratorReport {
        n,
        k,
        m,
        p,
        g,
        nodes: t.nodes.len(),
        depth: t.depth(),
        types: types.len(),
        bound: if n >= k {
            polynomial_bound(m, k, n, g)
        } else {
            g as f64
        },
        depth_ok: depth_within(n, k, t.depth()),
        shrinkage_ok: check_shrinkage(&t),
        generates,
        generators,
    })
}

/// For a cube term with one constant: the base generators of `A^k` placed
/// in every `A[U]` (tuples constant off `U`) for the `(k−1)`-subsets `U` of
/// the coordinates, or `U` = all coordinates when `n < k`.
pub fn one_pointed_generators(
    alg: &FiniteAlgebra,
    k: usize,
    n: usize,
    base_gens: Option<&[u64]>,
    verify: bool,
    guard: Guard,
) -> Result<GeneratorReport, TemplateError> {
    require_total(alg)?;
    if k == 0 {
        return Err(TemplateError::Precondition("k must be positive".into()));
    }
    let base = match base_gens {
        Some(g) => {
            check_base(alg, k, g, guard)?;
            g.to_vec()
        }
        None => d_exact(alg, k, guard)?.witness,
    };
    let mut out = BTreeSet::new();
    let mut types = 0;
    if n < k {
        let projected: Vec<u64> = base
            .iter()
            .map(|g| code_of(&digits(*g, k, alg.size())[..n], alg.size()))
            .collect();
        let cell: Vec<usize> = (0..n).collect();
        embed(&projected, n, alg.size(), &cell, &mut out);
        types = 1;
    } else {
        let mut subset: Vec<usize> = (0..k - 1).collect();
        loop {
            let mut cell = vec![k - 1; n];
            for (i, c) in subset.iter().enumerate() {
                cell[*c] = i;
            }
            embed(&base, k, alg.size(), &cell, &mut out);
            types += 1;
            // Next (k−1)-subset in lexicographic order.
            let mut i = subset.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if subset[i] < n - (subset.len() - i) {
                    subset[i] += 1;
                    for j in i + 1..subset.len() {
                        subset[j] = subset[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    let generators: Vec<u64> = out.into_iter().collect();
    let generates = if verify {
        Some(Subpower::generate(alg, n, &generators, guard)?.is_full())
    } else {
        None
    };
    let g = base.len();
    Ok(GeneratorReport {
        n,
        k,
        m: 0,
        p: 1,
        g,
        nodes: 0,
        depth: 0,
        types,
        bound: one_pointed_bound(n, k, g).max(if n < k { g as u128 } else { 0 }) as f64,
        depth_ok: true,
        shrinkage_ok: true,
        generates,
        generators,
    })
}

/// For a witness without constants: expands `alg` by a nullary operation
/// naming `value`, runs [`polynomial_generators`] there, and adds the
/// diagonal copies of a generating set of `A` so the result generates `A^n`
/// without the new constant.
pub fn adjoined_generators(
    alg: &FiniteAlgebra,
    witness: &CubeWitness,
    interp: &WitnessInterp,
    value: u32,
    n: usize,
    verify: bool,
    guard: Guard,
) -> Result<GeneratorReport, TemplateError> {
    require_total(alg)?;
    if value as usize >= alg.size() {
        return Err(TemplateError::Precondition(format!(
            "element {value} is outside the algebra"
        )));
    }
    let name = alg.fresh_op_name("c");
    let r = derive_r_adjoined(witness, &name)?;
    let expanded = alg.with_operation(Operation::constant(&name, alg.size(), value)?)?;
    let mut inner = interp.clone();
    inner.constants.insert(name, value);
    let mut report = polynomial_generators(&expanded, &r, &inner, n, None, false, guard)?;
    let diagonal = d_exact(alg, 1, guard)?.witness;
    let mut all: BTreeSet<u64> = report.generators.iter().copied().collect();
    for g in diagonal {
        all.insert(code_of(&vec![g as u32; n], alg.size()));
    }
    report.generators = all.into_iter().collect();
    report.generates = if verify {
        Some(Subpower::generate(alg, n, &report.generators, guard)?.is_full())
    } else {
        None
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;
    use crate::cube::WitnessInterp;

    fn eq10() -> CubeMatrixR {
        let w = CubeWitness::from_json_str(
            r#"{"symbol":"F","rows":[["1","x","2"],["x","2","3"]]}"#,
            &["1".into(), "2".into(), "3".into()],
        )
        .unwrap();
        derive_r(&w, &["1".into(), "2".into(), "3".into()]).unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(eq10().lambda, vec![0, 1, 0]);
        let unit = CubeWitness::from_json_str(
            r#"{"symbol":"B","rows":[["1","x"],["x","1"]]}"#,
            &["1".into()],
        )
        .unwrap();
        assert_eq!(derive_r(&unit, &["1".into()]).unwrap().lambda, vec![0, 1]);
        let maltsev = CubeWitness::from_json_str(
            r#"{"symbol":"m","rows":[["x","y","y"],["y","y","x"]]}"#,
            &[],
        )
        .unwrap();
        assert!(matches!(
            derive_r(&maltsev, &[]),
            Err(TemplateError::NoConstant)
        ));
        let r = derive_r_adjoined(&maltsev, "c").unwrap();
        assert_eq!(r.lambda, vec![1, 0, 0]);
        assert_eq!(r.constants(), ["c"]);
    }

    #[test]
    fn partition_examples() {
        assert_eq!(
            partition_pi(&[1, 2, 3, 4, 5], 2).unwrap(),
            vec![vec![1, 2, 3], vec![4, 5]]
        );
        assert_eq!(partition_pi(&[1, 2], 2).unwrap(), vec![vec![1], vec![2]]);
        assert_eq!(
            partition_pi(&[2, 5, 7, 8], 3).unwrap(),
            vec![vec![2, 5], vec![7], vec![8]]
        );
        assert!(partition_pi(&[1], 2).is_err());
    }

    #[test]
    fn five_coordinate_template() {
        let t = build_template(5, &eq10());
        assert_eq!(t.nodes.len(), 16);
        let label = |addr: &str| {
            let node = t.nodes.iter().find(|x| x.address_string() == addr).unwrap();
            node.label.iter().map(|c| c + 1).collect::<Vec<_>>()
        };
        assert_eq!(label("1"), [1, 2, 3]);
        assert_eq!(label("2"), [4, 5]);
        assert_eq!(label("3"), [1, 2, 3]);
        assert_eq!(label("11"), [4]);
        assert_eq!(label("12"), [5]);
        assert_eq!(label("21"), [1, 2]);
        assert_eq!(label("22"), [3]);
        assert_eq!(label("221"), [1]);
        assert_eq!(label("222"), [2]);
        assert_eq!(label("223"), [1]);
        assert!(check_shrinkage(&t));
        assert_eq!(build_template(1, &eq10()).nodes.len(), 1);
    }

    #[test]
    fn ceil_lemma_examples() {
        assert!(ceil_lemma_check(2, 2).unwrap());
        assert!(ceil_lemma_check(5, 2).unwrap());
        assert!(ceil_lemma_check(1, 2).is_err());
    }

    /// Factoring only reads the matrix, so any operation named `F` will do.
    #[test]
    fn worked_factorization() {
        let labels: Vec<String> = ["1", "2", "3", "a1", "a2", "a3", "a4", "a5"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let size = labels.len();
        let table = vec![0u32; size * size * size];
        let alg = FiniteAlgebra::new(labels, vec![Operation::total("F", 3, size, table).unwrap()])
            .unwrap();
        let r = eq10();
        let w = CubeWitness {
            symbol: "F".into(),
            rows: r.rows.clone(),
        };
        let interp = WitnessInterp::by_name(&w, &alg).unwrap();
        let t = build_template(5, &r);
        let a = [3, 4, 5, 6, 7];
        let tree = process_tuple(&a, &t, &r, &alg, &interp).unwrap();
        let at = |addr: &str| {
            let i = t
                .nodes
                .iter()
                .position(|x| x.address_string() == addr)
                .unwrap();
            tree.tuples[i].clone()
        };
        assert_eq!(at("1"), [0, 0, 0, 6, 7]);
        assert_eq!(at("2"), [3, 4, 5, 1, 1]);
        assert_eq!(at("3"), [1, 1, 1, 2, 2]);
        assert_eq!(at("12"), [0, 0, 0, 6, 1]);
        assert_eq!(at("13"), [1, 1, 1, 1, 2]);
        assert_eq!(at("21"), [0, 0, 5, 0, 0]);
        assert_eq!(at("22"), [3, 4, 1, 1, 1]);
        assert_eq!(at("221"), [0, 4, 0, 0, 0]);
        assert_eq!(at("223"), [1, 2, 1, 1, 1]);
        assert_eq!(at("32"), [1, 1, 1, 2, 1]);
    }

    fn z2() -> FiniteAlgebra {
        let plus = Operation::total("B", 2, 2, vec![0, 1, 1, 0]).unwrap();
        let sum3 = Operation::total("m", 3, 2, vec![0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        let zero = Operation::constant("0", 2, 0).unwrap();
        FiniteAlgebra::new(vec!["0".into(), "1".into()], vec![plus, sum3, zero]).unwrap()
    }

    fn unit(symbol: &str, c: &str) -> CubeWitness {
        CubeWitness::from_json_str(
            &format!(r#"{{"symbol":"{symbol}","rows":[["x","{c}"],["{c}","x"]]}}"#),
            &[c.to_string()],
        )
        .unwrap()
    }

    #[test]
    fn generators_for_z2() {
        let alg = z2();
        let w = unit("B", "0");
        let interp = WitnessInterp::by_name(&w, &alg).unwrap();
        let r = derive_r(&w, &["0".into()]).unwrap();
        for n in 1..=6 {
            let rep =
                polynomial_generators(&alg, &r, &interp, n, None, true, Guard::default()).unwrap();
            assert_eq!(rep.generates, Some(true), "n = {n}");
            assert!(
                rep.within_bound() && rep.depth_ok && rep.shrinkage_ok,
                "n = {n}: {rep:?}"
            );
            let one = one_pointed_generators(&alg, 2, n, None, true, Guard::default()).unwrap();
            assert_eq!(one.generates, Some(true));
            assert!(one.within_bound());
        }
    }

    #[test]
    fn generators_for_near_unanimity_total() {
        let (_, alg) = crate::constructions::example_nu(1, 2).unwrap();
        let w = unit("F", "1");
        let interp = WitnessInterp::by_name(&w, &alg).unwrap();
        assert!(crate::cube::verify_witness(&w, &alg, &interp).unwrap());
        let r = derive_r(&w, &["1".into()]).unwrap();
        for n in 3..=5 {
            let rep =
                polynomial_generators(&alg, &r, &interp, n, None, true, Guard::default()).unwrap();
            assert_eq!(rep.generates, Some(true));
            assert!(rep.within_bound());
            let one = one_pointed_generators(&alg, 2, n, None, true, Guard::default()).unwrap();
            assert_eq!(one.generates, Some(true));
            assert!(one.generators.len() as u128 <= one_pointed_bound(n, 2, one.g));
        }
    }

    #[test]
    fn adjoined_constant_for_maltsev() {
        let alg = z2();
        let w = CubeWitness::from_json_str(
            r#"{"symbol":"m","rows":[["x","y","y"],["y","y","x"]]}"#,
            &[],
        )
        .unwrap();
        let interp = WitnessInterp::by_name(&w, &alg).unwrap();
        for n in 1..=5 {
            let rep = adjoined_generators(&alg, &w, &interp, 0, n, true, Guard::default()).unwrap();
            assert_eq!(rep.generates, Some(true), "n = {n}");
            assert!(rep.depth_ok);
        }
    }

    #[test]
    fn factor_trees_recombine() {
        let alg = z2();
        let w = CubeWitness::from_json_str(
            r#"{"symbol":"m","rows":[["x","y","y"],["y","y","x"]]}"#,
            &[],
        )
        .unwrap();
        let r = derive_r_adjoined(&w, "c").unwrap();
        let mut interp = WitnessInterp::by_name(&w, &alg).unwrap();
        interp.constants.insert("c".into(), 0);
        let t = build_template(6, &r);
        for code in 0..64u64 {
            let a: Vec<u32> = (0..6).map(|i| ((code >> (5 - i)) & 1) as u32).collect();
            let tree = process_tuple(&a, &t, &r, &alg, &interp).unwrap();
            assert!(verify_factor_tree(&tree, &t, &alg, &interp, &r).unwrap());
        }
    }

    #[test]
    fn base_generators_are_checked() {
        let alg = z2();
        let w = unit("B", "0");
        let interp = WitnessInterp::by_name(&w, &alg).unwrap();
        let r = derive_r(&w, &["0".into()]).unwrap();
        let bad = polynomial_generators(&alg, &r, &interp, 3, Some(&[0]), false, Guard::default());
        assert!(matches!(bad, Err(TemplateError::BaseGens(2))));
    }
}
