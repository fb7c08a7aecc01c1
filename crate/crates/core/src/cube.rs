//! Pointed cube terms: deciding whether Σ entails one, finding a least
//! witness, and checking a witness in a finite algebra.
//!
//! A witness for symbol `F` of arity `m` is a `k × m` matrix over `x`, other
//! variables and constants, with every column holding some entry other than
//! `x`, such that `Σ ⊢ F(row) ≈ x` for every row.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteAlgebra, Interpretation, OpTerm};
use crate::kelly::{weak_closure, ClosureRelation, KellyError};
use crate::sig::{large_enough_x, Atom, BasicTerm, ConstId, FnId, Theory, Var};

#[derive(Debug, Error)]
pub enum CubeError {
    #[error(transparent)]
    Kelly(#[from] KellyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the theory is inconsistent")]
    Inconsistent,
    #[error("unknown function symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("witness symbol `{symbol}` has arity {expected} but its rows have length {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("malformed witness: {0}")]
    Malformed(String),
}

/// A matrix entry. The derived order `x < variables < constants` is the
/// row order used for tie-breaking (constants by declaration when produced
/// by the decision procedure).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry {
    X,
    /// A variable other than `x`; `Var(1)` is written `z`.
    Var(u32),
    Const(String),
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::X => f.write_str("x"),
            Entry::Var(1) => f.write_str("z"),
            Entry::Var(i) => write!(f, "z{i}"),
            Entry::Const(c) => f.write_str(c),
        }
    }
}

/// Written as in witness files: `x`, `z`, `z2`, ..., or the constant name.
impl Serialize for Entry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeWitness {
    pub symbol: String,
    pub rows: Vec<Vec<Entry>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessFile {
    symbol: String,
    rows: Vec<Vec<String>>,
}

impl CubeWitness {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Number of distinct constants in the matrix.
    pub fn p(&self) -> usize {
        self.constants().len()
    }

    /// Distinct constants in order of first appearance (row by row).
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

    /// Every column has an entry other than `x`.
    pub fn covers_columns(&self) -> bool {
        (0..self.m()).all(|j| self.rows.iter().any(|r| r[j] != Entry::X))
    }

    /// Reads `{"symbol": F, "rows": [[...], ...]}`. `x` is the distinguished
    /// variable, names in `constants` are constants, any other name is a
    /// variable.
    pub fn from_json_str(text: &str, constants: &[String]) -> Result<Self, CubeError> {
        let file: WitnessFile =
            serde_json::from_str(text).map_err(|e| CubeError::Malformed(e.to_string()))?;
        let mut vars: BTreeMap<String, u32> = BTreeMap::new();
        let mut rows = Vec::new();
        for row in &file.rows {
            let mut out = Vec::new();
            for name in row {
                let e = if name == "x" {
                    Entry::X
                } else if constants.contains(name) {
                    Entry::Const(name.clone())
                } else {
                    let next = vars.len() as u32 + 1;
                    Entry::Var(*vars.entry(name.clone()).or_insert(next))
                };
                out.push(e);
            }
            rows.push(out);
        }
        let w = CubeWitness {
            symbol: file.symbol,
            rows,
        };
        if w.rows.is_empty() || w.rows.iter().any(|r| r.len() != w.m()) || w.m() == 0 {
            return Err(CubeError::Malformed(
                "rows must be nonempty and of equal length".into(),
            ));
        }
        Ok(w)
    }

    pub fn to_json_string(&self) -> String {
        let file = WitnessFile {
            symbol: self.symbol.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|e| e.to_string()).collect())
                .collect(),
        };
        serde_json::to_string(&file).expect("witness serializes")
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                let items: Vec<String> = r.iter().map(|e| e.to_string()).collect();
                format!("({})", items.join(","))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolCover {
    pub symbol: String,
    pub arity: usize,
    pub provable_rows: usize,
    pub min_cover: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeDecision {
    pub exists: bool,
    /// Σ is inconsistent, so every identity (and every cube term) is entailed.
    pub degenerate: bool,
    pub witness: Option<CubeWitness>,
    pub min_k: Option<usize>,
    pub symbols: Vec<SymbolCover>,
}

/// Internal row entry with constants by id, ordered `x < z < constants`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum RowEntry {
    X,
    Z,
    Const(ConstId),
}

fn constant_reps(closure: &ClosureRelation, theory: &Theory) -> Vec<ConstId> {
    let u = closure.universe();
    (0..theory.signature.constant_count() as u32)
        .map(ConstId)
        .filter(|c| {
            let i = u.atom_index(Atom::Const(*c)).expect("constant in universe");
            (0..c.0).all(|d| {
                let j = u
                    .atom_index(Atom::Const(ConstId(d)))
                    .expect("constant in universe");
                closure.rep(i) != closure.rep(j)
            })
        })
        .collect()
}

/// All rows `r` over `{x, z} ∪ C_rep` with `Σ ⊢ F(r) ≈ x`, in row order.
fn rows_for(closure: &ClosureRelation, reps: &[ConstId], f: FnId, m: usize) -> Vec<Vec<RowEntry>> {
    let mut alphabet = vec![RowEntry::X, RowEntry::Z];
    alphabet.extend(reps.iter().map(|c| RowEntry::Const(*c)));
    let x_class = closure
        .class_of(&BasicTerm::var(0))
        .expect("x0 in universe");
    let mut out = Vec::new();
    let mut digits = vec![0usize; m];
    loop {
        let row: Vec<RowEntry> = digits.iter().map(|d| alphabet[*d]).collect();
        let args = row
            .iter()
            .map(|e| match e {
                RowEntry::X => Atom::Var(Var(0)),
                RowEntry::Z => Atom::Var(Var(1)),
                RowEntry::Const(c) => Atom::Const(*c),
            })
            .collect();
        if closure.class_of(&BasicTerm::App(f, args)) == Some(x_class) {
            out.push(row);
        }
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < alphabet.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn to_entries(theory: &Theory, row: &[RowEntry]) -> Vec<Entry> {
    row.iter()
        .map(|e| match e {
            RowEntry::X => Entry::X,
            RowEntry::Z => Entry::Var(1),
            RowEntry::Const(c) => Entry::Const(theory.signature.constant_name(*c).to_string()),
        })
        .collect()
}

/// Provable rows for symbol `name`, rendered as entries (z is `Var(1)`).
pub fn provable_rows(theory: &Theory, name: &str) -> Result<Vec<Vec<Entry>>, CubeError> {
    let f = theory
        .signature
        .function_id(name)
        .ok_or_else(|| CubeError::UnknownSymbol(name.to_string()))?;
    let closure = weak_closure(theory, large_enough_x(theory, &[]))?;
    if !closure.is_consistent() {
        return Err(CubeError::Inconsistent);
    }
    let reps = constant_reps(&closure, theory);
    Ok(rows_for(&closure, &reps, f, theory.signature.arity(f))
        .iter()
        .map(|r| to_entries(theory, r))
        .collect())
}

/// Lexicographically least set of exactly `k` rows (by index) whose masks
/// cover `full`.
fn cover_of_size(masks: &[u32], k: usize, full: u32) -> Option<Vec<usize>> {
    let mut suffix = vec![0u32; masks.len() + 1];
    for i in (0..masks.len()).rev() {
        suffix[i] = suffix[i + 1] | masks[i];
    }
    let widest = masks.iter().map(|m| m.count_ones()).max().unwrap_or(0);
    let mut chosen = Vec::with_capacity(k);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        masks: &[u32],
        suffix: &[u32],
        widest: u32,
        full: u32,
        k: usize,
        from: usize,
        covered: u32,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == k {
            return covered == full;
        }
        let left = (k - chosen.len()) as u32;
        let missing = (full & !covered).count_ones();
        if missing > left * widest {
            return false;
        }
        for i in from..masks.len() {
            if (covered | suffix[i]) != full {
                return false;
            }
            chosen.push(i);
            if rec(
                masks,
                suffix,
                widest,
                full,
                k,
                i + 1,
                covered | masks[i],
                chosen,
            ) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    if rec(masks, &suffix, widest, full, k, 0, 0, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

/// Exact minimum cover of the columns by rows, least in row order among
/// minimum covers.
fn min_cover(rows: &[Vec<RowEntry>], m: usize) -> Option<Vec<usize>> {
    let full = if m >= 32 { u32::MAX } else { (1u32 << m) - 1 };
    let masks: Vec<u32> = rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, e)| **e != RowEntry::X)
                .fold(0u32, |acc, (j, _)| acc | (1 << j))
        })
        .collect();
    if masks.iter().fold(0, |a, b| a | b) != full {
        return None;
    }
    (1..=m).find_map(|k| cover_of_size(&masks, k, full))
}

/// Decides whether Σ entails a pointed cube term.
///
/// For an inconsistent Σ the answer is `exists` with `degenerate` set and no
/// witness. Otherwise each symbol's provable rows are covered exactly; the
/// witness minimizes `k`, then `m`, then declaration order, then row order.
pub fn decide_pointed_cube(theory: &Theory) -> Result<CubeDecision, CubeError> {
    if theory.signature.max_arity() > 31 {
        return Err(CubeError::Malformed(
            "arity above 31 is not supported".into(),
        ));
    }
    let closure = weak_closure(theory, large_enough_x(theory, &[]))?;
    if !closure.is_consistent() {
        return Ok(CubeDecision {
            exists: true,
            degenerate: true,
            witness: None,
            min_k: None,
            symbols: Vec::new(),
        });
    }
    let reps = constant_reps(&closure, theory);
    let mut best: Option<(usize, usize, usize, Vec<Vec<RowEntry>>)> = None;
    let mut symbols = Vec::new();
    for (fi, (name, m)) in theory.signature.functions().iter().enumerate() {
        let rows = rows_for(&closure, &reps, FnId(fi as u32), *m);
        let cover = min_cover(&rows, *m);
        symbols.push(SymbolCover {
            symbol: name.clone(),
            arity: *m,
            provable_rows: rows.len(),
            min_cover: cover.as_ref().map(Vec::len),
        });
        if let Some(idx) = cover {
            let key = (idx.len(), *m, fi);
            let better = best
                .as_ref()
                .is_none_or(|(k, bm, bf, _)| key < (*k, *bm, *bf));
            if better {
                best = Some((
                    idx.len(),
                    *m,
                    fi,
                    idx.iter().map(|&i| rows[i].clone()).collect(),
                ));
            }
        }
    }
    Ok(match best {
        None => CubeDecision {
            exists: false,
            degenerate: false,
            witness: None,
            min_k: None,
            symbols,
        },
        Some((k, _, fi, rows)) => CubeDecision {
            exists: true,
            degenerate: false,
            witness: Some(CubeWitness {
                symbol: theory.signature.function_name(FnId(fi as u32)).to_string(),
                rows: rows.iter().map(|r| to_entries(theory, r)).collect(),
            }),
            min_k: Some(k),
            symbols,
        },
    })
}

/// How a witness's symbol and constants are read in an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessInterp {
    pub function: OpTerm,
    pub constants: BTreeMap<String, u32>,
}

impl WitnessInterp {
    /// The symbol names an operation; each constant names a nullary
    /// operation, else an element label.
    pub fn by_name(w: &CubeWitness, alg: &FiniteAlgebra) -> Result<Self, CubeError> {
        let (i, op) = alg
            .operation(&w.symbol)
            .ok_or_else(|| CubeError::UnknownSymbol(w.symbol.clone()))?;
        if op.arity() != w.m() {
            return Err(CubeError::ArityMismatch {
                symbol: w.symbol.clone(),
                expected: op.arity(),
                found: w.m(),
            });
        }
        let mut constants = BTreeMap::new();
        for c in w.constants() {
            let v = match alg.operation(&c) {
                Some((_, op)) if op.arity() == 0 => op.apply(&[])?,
                _ => alg.element(&c),
            }
            .ok_or_else(|| CubeError::UnknownConstant(c.clone()))?;
            constants.insert(c, v);
        }
        Ok(WitnessInterp {
            function: OpTerm::basic(i, op.arity()),
            constants,
        })
    }

    /// Reads the witness through a theory interpretation.
    pub fn from_interpretation(
        w: &CubeWitness,
        theory: &Theory,
        interp: &Interpretation,
    ) -> Result<Self, CubeError> {
        let f = theory
            .signature
            .function_id(&w.symbol)
            .ok_or_else(|| CubeError::UnknownSymbol(w.symbol.clone()))?;
        let mut constants = BTreeMap::new();
        for c in w.constants() {
            let id = theory
                .signature
                .constant_id(&c)
                .ok_or_else(|| CubeError::UnknownConstant(c.clone()))?;
            constants.insert(c, interp.constants[id.0 as usize]);
        }
        Ok(WitnessInterp {
            function: interp.function(f).clone(),
            constants,
        })
    }
}

fn max_var(t: &OpTerm) -> Option<usize> {
    match t {
        OpTerm::Var(i) => Some(*i),
        OpTerm::App(_, s) => s.iter().filter_map(max_var).max(),
    }
}

/// True iff every row evaluates to `a` for every value `a` of `x` and every
/// assignment of the other variables.
pub fn verify_witness(
    w: &CubeWitness,
    alg: &FiniteAlgebra,
    interp: &WitnessInterp,
) -> Result<bool, CubeError> {
    if max_var(&interp.function).is_some_and(|v| v >= w.m()) {
        return Err(CubeError::ArityMismatch {
            symbol: w.symbol.clone(),
            expected: max_var(&interp.function).unwrap_or(0) + 1,
            found: w.m(),
        });
    }
    let size = alg.size() as u32;
    for row in &w.rows {
        let mut vars: Vec<u32> = row
            .iter()
            .filter_map(|e| {
                if let Entry::Var(v) = e {
                    Some(*v)
                } else {
                    None
                }
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        // digits[0] is x, then one digit per variable.
        let mut digits = vec![0u32; vars.len() + 1];
        loop {
            let args: Vec<u32> = row
                .iter()
                .map(|e| match e {
                    Entry::X => Ok(digits[0]),
                    Entry::Var(v) => Ok(digits[1 + vars.binary_search(v).expect("collected")]),
                    Entry::Const(c) => interp
                        .constants
                        .get(c)
                        .copied()
                        .ok_or_else(|| CubeError::UnknownConstant(c.clone())),
                })
                .collect::<Result<_, _>>()?;
            if interp.function.eval(alg, &args) != Some(digits[0]) {
                return Ok(false);
            }
            let mut i = digits.len();
            let mut wrapped = true;
            while i > 0 {
                i -= 1;
                digits[i] += 1;
                if digits[i] < size {
                    wrapped = false;
                    break;
                }
                digits[i] = 0;
            }
            if wrapped {
                break;
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operation;
    use crate::sig::parse_theory;

    const MALTSEV: &str = "fn m/3; m(x,y,y)=x; m(y,y,x)=x;";
    const UNIT: &str = "const 1; fn B/2; B(1,x)=x; B(x,1)=x;";
    const MAJORITY: &str = "fn M/3; M(y,x,x)=x; M(x,y,x)=x; M(x,x,y)=x;";
    const NO_CUBE: &str = "const c, d; fn B/2; B(c,x)=x; B(d,x)=d;";

    fn rows(w: &CubeWitness) -> Vec<String> {
        w.row_strings()
    }

    #[test]
    fn maltsev() {
        let d = decide_pointed_cube(&parse_theory(MALTSEV).unwrap()).unwrap();
        let w = d.witness.unwrap();
        assert_eq!((w.symbol.as_str(), w.k(), w.m(), w.p()), ("m", 2, 3, 0));
        assert_eq!(rows(&w), ["(x,z,z)", "(z,z,x)"]);
        assert_eq!(d.min_k, Some(2));
    }

    #[test]
    fn unit() {
        let d = decide_pointed_cube(&parse_theory(UNIT).unwrap()).unwrap();
        let w = d.witness.unwrap();
        assert_eq!((w.k(), w.m(), w.p()), (2, 2, 1));
        assert_eq!(rows(&w), ["(x,1)", "(1,x)"]);
    }

    #[test]
    fn majority() {
        let d = decide_pointed_cube(&parse_theory(MAJORITY).unwrap()).unwrap();
        let w = d.witness.unwrap();
        assert_eq!((w.k(), w.m(), w.p()), (3, 3, 0));
    }

    #[test]
    fn no_cube_term() {
        let d = decide_pointed_cube(&parse_theory(NO_CUBE).unwrap()).unwrap();
        assert!(!d.exists);
        assert!(d.witness.is_none() && d.min_k.is_none());
    }

    #[test]
    fn inconsistent_is_degenerate() {
        let d = decide_pointed_cube(&parse_theory("fn F/2; F(z,z)=x;").unwrap()).unwrap();
        assert!(d.exists && d.degenerate);
    }

    #[test]
    fn provable_rows_examples() {
        let t = parse_theory(MALTSEV).unwrap();
        let r = provable_rows(&t, "m").unwrap();
        let z = Entry::Var(1);
        assert!(r.contains(&vec![Entry::X, z.clone(), z.clone()]));
        assert!(r.contains(&vec![z.clone(), z.clone(), Entry::X]));
        assert!(r.contains(&vec![Entry::X, Entry::X, Entry::X]));
        let e = parse_theory("fn F/2;").unwrap();
        assert!(provable_rows(&e, "F").unwrap().is_empty());
        assert!(provable_rows(&e, "G").is_err());
    }

    fn z2() -> FiniteAlgebra {
        FiniteAlgebra::numbered(
            2,
            vec![
                Operation::total("+", 2, 2, vec![0, 1, 1, 0]).unwrap(),
                Operation::total(
                    "m",
                    3,
                    2,
                    (0..8).map(|c| ((c >> 2) ^ (c >> 1) ^ c) & 1).collect(),
                )
                .unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn verify_examples() {
        let w = decide_pointed_cube(&parse_theory(MALTSEV).unwrap())
            .unwrap()
            .witness
            .unwrap();
        let alg = z2();
        let interp = WitnessInterp::by_name(&w, &alg).unwrap();
        assert!(verify_witness(&w, &alg, &interp).unwrap());

        let u = CubeWitness::from_json_str(
            r#"{"symbol":"+","rows":[["1","x"],["x","1"]]}"#,
            &["1".into()],
        )
        .unwrap();
        let interp = WitnessInterp {
            function: OpTerm::basic(0, 2),
            constants: [("1".to_string(), 0)].into(),
        };
        assert!(verify_witness(&u, &alg, &interp).unwrap());

        let meet = FiniteAlgebra::numbered(
            2,
            vec![Operation::total("m", 3, 2, (0..8).map(|c| u32::from(c == 7)).collect()).unwrap()],
        )
        .unwrap();
        let interp = WitnessInterp::by_name(&w, &meet).unwrap();
        assert!(!verify_witness(&w, &meet, &interp).unwrap());
    }

    #[test]
    fn witness_json_round_trip() {
        let w = CubeWitness::from_json_str(
            r#"{"symbol":"m","rows":[["x","y","y"],["y","y","x"]]}"#,
            &[],
        )
        .unwrap();
        assert_eq!(w.rows[0], vec![Entry::X, Entry::Var(1), Entry::Var(1)]);
        let again = CubeWitness::from_json_str(&w.to_json_string(), &[]).unwrap();
        assert_eq!(w, again);
    }
}
