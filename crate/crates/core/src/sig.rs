//! Signatures, basic terms and basic identities, plus the `.eqn` theory format.
//!
//! A basic term has at most one function symbol: it is a variable, a constant,
//! or a symbol applied to atoms. Variables are indexed; `x0` is the
//! distinguished variable `x` of cube identities.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigError {
    #[error("line {line}, column {column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: symbol `{name}` has arity {expected} but was given {found} arguments")]
    ArityMismatch {
        line: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: undeclared function symbol `{name}`")]
    Undeclared { line: usize, name: String },
    #[error("line {line}: `{name}` is declared twice")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: function symbol `{name}` must have positive arity")]
    NullaryFunction { line: usize, name: String },
    #[error("line {line}: function symbol `{name}` used as an argument")]
    FunctionAsAtom { line: usize, name: String },
    #[error("occurrence {occurrence} of the constant is out of range ({count} occurrences)")]
    OccurrenceOutOfRange { occurrence: usize, count: usize },
    #[error("term uses a symbol outside the signature")]
    ForeignSymbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FnId(pub u32);

/// A variable or a constant: the only things allowed as arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(Var),
    Const(ConstId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicTerm {
    Var(Var),
    Const(ConstId),
    App(FnId, Vec<Atom>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: BasicTerm,
    pub rhs: BasicTerm,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    functions: Vec<(String, usize)>,
    constants: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    pub signature: Signature,
    pub identities: Vec<Identity>,
}

impl Atom {
    pub fn term(self) -> BasicTerm {
        match self {
            Atom::Var(v) => BasicTerm::Var(v),
            Atom::Const(c) => BasicTerm::Const(c),
        }
    }
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<FnId, SigError> {
        if arity == 0 {
            return Err(SigError::NullaryFunction {
                line: 0,
                name: name.to_string(),
            });
        }
        if self.has_name(name) {
            return Err(SigError::Duplicate {
                line: 0,
                name: name.to_string(),
            });
        }
        self.functions.push((name.to_string(), arity));
        Ok(FnId(self.functions.len() as u32 - 1))
    }

    pub fn add_constant(&mut self, name: &str) -> Result<ConstId, SigError> {
        if self.has_name(name) {
            return Err(SigError::Duplicate {
                line: 0,
                name: name.to_string(),
            });
        }
        self.constants.push(name.to_string());
        Ok(ConstId(self.constants.len() as u32 - 1))
    }

    fn has_name(&self, name: &str) -> bool {
        self.functions.iter().any(|(n, _)| n == name) || self.constants.iter().any(|n| n == name)
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn function_count(&self) -> usize {
        self.functions.len()
    }

    pub fn constant_count(&self) -> usize {
        self.constants.len()
    }

    pub fn arity(&self, f: FnId) -> usize {
        self.functions[f.0 as usize].1
    }

    pub fn function_name(&self, f: FnId) -> &str {
        &self.functions[f.0 as usize].0
    }

    pub fn constant_name(&self, c: ConstId) -> &str {
        &self.constants[c.0 as usize]
    }

    pub fn function_id(&self, name: &str) -> Option<FnId> {
        self.functions
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| FnId(i as u32))
    }

    pub fn constant_id(&self, name: &str) -> Option<ConstId> {
        self.constants
            .iter()
            .position(|n| n == name)
            .map(|i| ConstId(i as u32))
    }

    pub fn max_arity(&self) -> usize {
        self.functions.iter().map(|(_, a)| *a).max().unwrap_or(0)
    }

    /// Checks that every symbol of `t` is declared here with the right arity.
    pub fn check_term(&self, t: &BasicTerm) -> Result<(), SigError> {
        let atom_ok = |a: &Atom| match a {
            Atom::Var(_) => true,
            Atom::Const(c) => (c.0 as usize) < self.constants.len(),
        };
        let ok = match t {
            BasicTerm::Var(_) => true,
            BasicTerm::Const(c) => (c.0 as usize) < self.constants.len(),
            BasicTerm::App(f, args) => {
                (f.0 as usize) < self.functions.len()
                    && self.arity(*f) == args.len()
                    && args.iter().all(atom_ok)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SigError::ForeignSymbol)
        }
    }

    pub fn render_atom(&self, a: Atom) -> String {
        match a {
            Atom::Var(v) => format!("x{}", v.0),
            Atom::Const(c) => self.constant_name(c).to_string(),
        }
    }

    /// Renders with variables as `x0, x1, ...`.
    pub fn render_term(&self, t: &BasicTerm) -> String {
        match t {
            BasicTerm::Var(v) => format!("x{}", v.0),
            BasicTerm::Const(c) => self.constant_name(*c).to_string(),
            BasicTerm::App(f, args) => {
                let inner: Vec<String> = args.iter().map(|a| self.render_atom(*a)).collect();
                format!("{}({})", self.function_name(*f), inner.join(","))
            }
        }
    }

    pub fn render_identity(&self, id: &Identity) -> String {
        format!(
            "{}={}",
            self.render_term(&id.lhs),
            self.render_term(&id.rhs)
        )
    }

    /// Renders in a form that parses back to the same identity: `x0` is
    /// written `x`, which the parser always maps to `x0`.
    fn render_identity_source(&self, id: &Identity) -> String {
        let clash = |name: &str| self.has_name(name);
        let prefix = if self.constants.iter().any(|c| {
            c.strip_prefix('x')
                .is_some_and(|d| d.chars().all(|ch| ch.is_ascii_digit()))
        }) {
            "_x"
        } else {
            "x"
        };
        let atom = |a: Atom| match a {
            Atom::Var(Var(0)) if !clash("x") => "x".to_string(),
            Atom::Var(v) => format!("{prefix}{}", v.0),
            Atom::Const(c) => self.constant_name(c).to_string(),
        };
        let term = |t: &BasicTerm| match t {
            BasicTerm::Var(v) => atom(Atom::Var(*v)),
            BasicTerm::Const(c) => atom(Atom::Const(*c)),
            BasicTerm::App(f, args) => {
                let inner: Vec<String> = args.iter().map(|a| atom(*a)).collect();
                format!("{}({})", self.function_name(*f), inner.join(","))
            }
        };
        format!("{}={}", term(&id.lhs), term(&id.rhs))
    }
}

impl BasicTerm {
    pub fn var(i: u32) -> Self {
        BasicTerm::Var(Var(i))
    }

    /// Atoms of the term, left to right (the term itself if it is an atom).
    pub fn atoms(&self) -> Vec<Atom> {
        match self {
            BasicTerm::Var(v) => vec![Atom::Var(*v)],
            BasicTerm::Const(c) => vec![Atom::Const(*c)],
            BasicTerm::App(_, args) => args.clone(),
        }
    }

    /// Distinct variables in first-occurrence order.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for a in self.atoms() {
            if let Atom::Var(v) = a {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn substitute(&self, gamma: impl Fn(Var) -> Atom) -> BasicTerm {
        let map = |a: &Atom| match a {
            Atom::Var(v) => gamma(*v),
            Atom::Const(c) => Atom::Const(*c),
        };
        match self {
            BasicTerm::Var(v) => gamma(*v).term(),
            BasicTerm::Const(c) => BasicTerm::Const(*c),
            BasicTerm::App(f, args) => BasicTerm::App(*f, args.iter().map(map).collect()),
        }
    }

    /// Replaces the `occurrence`-th (0-based, left to right) occurrence of `c` by `d`.
    pub fn replace_constant_once(
        &self,
        c: ConstId,
        d: ConstId,
        occurrence: usize,
    ) -> Result<BasicTerm, SigError> {
        let count = self
            .atoms()
            .iter()
            .filter(|a| **a == Atom::Const(c))
            .count();
        if occurrence >= count {
            return Err(SigError::OccurrenceOutOfRange { occurrence, count });
        }
        Ok(match self {
            BasicTerm::Const(_) => BasicTerm::Const(d),
            BasicTerm::App(f, args) => {
                let mut seen = 0;
                let mut out = args.clone();
                for a in out.iter_mut() {
                    if *a == Atom::Const(c) {
                        if seen == occurrence {
                            *a = Atom::Const(d);
                            break;
                        }
                        seen += 1;
                    }
                }
                BasicTerm::App(*f, out)
            }
            BasicTerm::Var(_) => unreachable!("variables contain no constants"),
        })
    }
}

impl Identity {
    pub fn new(lhs: BasicTerm, rhs: BasicTerm) -> Self {
        Identity { lhs, rhs }
    }

    /// Distinct variables across both sides, first-occurrence order.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = self.lhs.variables();
        for v in self.rhs.variables() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// One more than the largest variable index used (0 if ground).
    pub fn variable_bound(&self) -> usize {
        self.variables()
            .iter()
            .map(|v| v.0 as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

impl Theory {
    pub fn new(signature: Signature) -> Self {
        Theory {
            signature,
            identities: Vec::new(),
        }
    }

    pub fn with_identities(&self, identities: Vec<Identity>) -> Theory {
        Theory {
            signature: self.signature.clone(),
            identities,
        }
    }

    /// Parses an identity against this theory's signature.
    pub fn parse_identity(&self, text: &str) -> Result<Identity, SigError> {
        let trimmed = text.trim_end();
        let owned;
        let text = if trimmed.ends_with(';') {
            trimmed
        } else {
            owned = format!("{trimmed};");
            &owned
        };
        let stmts = tokenize_statements(text)?;
        match stmts.as_slice() {
            [stmt] => parse_identity_stmt(&self.signature, stmt),
            _ => Err(SigError::Syntax {
                line: 1,
                column: 1,
                message: "expected exactly one identity".into(),
            }),
        }
    }

    /// Renders in the `.eqn` grammar; `parse_theory` reads it back unchanged.
    pub fn render(&self) -> String {
        let sig = &self.signature;
        let mut out = String::new();
        if !sig.constants.is_empty() {
            out.push_str(&format!("const {};\n", sig.constants.join(", ")));
        }
        for (name, arity) in &sig.functions {
            out.push_str(&format!("fn {name}/{arity};\n"));
        }
        for id in &self.identities {
            out.push_str(&sig.render_identity_source(id));
            out.push_str(";\n");
        }
        out
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `max(2, max arity, max distinct variables in any identity of Σ ∪ extra)`.
///
/// The arity term ranges over the whole signature, so the bound also covers
/// symbols that no identity mentions.
pub fn large_enough_x(theory: &Theory, extra: &[Identity]) -> usize {
    let vars = theory
        .identities
        .iter()
        .chain(extra)
        .map(|id| id.variables().len().max(id.variable_bound()))
        .max()
        .unwrap_or(0);
    2.max(theory.signature.max_arity()).max(vars)
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

type Statement = Vec<Token>;

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits into `;`-terminated statements. `#` starts a comment to end of line.
fn tokenize_statements(text: &str) -> Result<Vec<Statement>, SigError> {
    let mut stmts = Vec::new();
    let mut current: Statement = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if is_ident_char(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                current.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: li + 1,
                    column,
                });
            } else if "(),=/".contains(c) {
                current.push(Token {
                    tok: Tok::Sym(c),
                    line: li + 1,
                    column,
                });
                i += 1;
            } else if c == ';' {
                if !current.is_empty() {
                    stmts.push(std::mem::take(&mut current));
                }
                i += 1;
            } else {
                return Err(SigError::Syntax {
                    line: li + 1,
                    column,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    if let Some(tok) = current.first() {
        return Err(SigError::Syntax {
            line: tok.line,
            column: tok.column,
            message: "statement is missing its terminating `;`".into(),
        });
    }
    Ok(stmts)
}

fn syntax(tok: &Token, message: impl Into<String>) -> SigError {
    SigError::Syntax {
        line: tok.line,
        column: tok.column,
        message: message.into(),
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn last(&self) -> &'a Token {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .expect("statements are nonempty")
    }

    fn ident(&mut self) -> Result<(&'a str, &'a Token), SigError> {
        match self.peek() {
            Some(
                t @ Token {
                    tok: Tok::Ident(s), ..
                },
            ) => {
                self.pos += 1;
                Ok((s.as_str(), t))
            }
            _ => Err(syntax(self.last(), "expected a name")),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if let Some(Token {
            tok: Tok::Sym(s), ..
        }) = self.peek()
        {
            if *s == c {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn expect(&mut self, c: char) -> Result<(), SigError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.last(), format!("expected `{c}`")))
        }
    }

    fn done(&self) -> Result<(), SigError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(syntax(t, "unexpected trailing input")),
        }
    }
}

fn is_declaration(stmt: &Statement) -> bool {
    matches!(
        stmt.first(),
        Some(Token { tok: Tok::Ident(s), .. }) if s == "const" || s == "fn"
    ) && !matches!(
        stmt.get(1),
        Some(Token {
            tok: Tok::Sym('('),
            ..
        })
    ) && !matches!(
        stmt.get(1),
        Some(Token {
            tok: Tok::Sym('='),
            ..
        })
    )
}

pub fn parse_theory(text: &str) -> Result<Theory, SigError> {
    let stmts = tokenize_statements(text)?;
    let mut sig = Signature::new();
    // Declarations first, so identities may mention symbols declared later.
    for stmt in stmts.iter().filter(|s| is_declaration(s)) {
        let mut cur = Cursor { toks: stmt, pos: 0 };
        let (kw, _) = cur.ident()?;
        if kw == "const" {
            loop {
                let (name, tok) = cur.ident()?;
                sig.add_constant(name).map_err(|_| SigError::Duplicate {
                    line: tok.line,
                    name: name.to_string(),
                })?;
                if !cur.eat(',') {
                    break;
                }
            }
        } else {
            let (name, tok) = cur.ident()?;
            cur.expect('/')?;
            let (num, ntok) = cur.ident()?;
            let arity: usize = num
                .parse()
                .map_err(|_| syntax(ntok, format!("`{num}` is not an arity")))?;
            sig.add_function(name, arity).map_err(|e| match e {
                SigError::NullaryFunction { name, .. } => SigError::NullaryFunction {
                    line: tok.line,
                    name,
                },
                _ => SigError::Duplicate {
                    line: tok.line,
                    name: name.to_string(),
                },
            })?;
        }
        cur.done()?;
    }
    let mut theory = Theory::new(sig);
    for stmt in stmts.iter().filter(|s| !is_declaration(s)) {
        let id = parse_identity_stmt(&theory.signature, stmt)?;
        theory.identities.push(id);
    }
    Ok(theory)
}

enum RawAtom<'a> {
    Name(&'a str, &'a Token),
}

enum RawTerm<'a> {
    Atom(RawAtom<'a>),
    App(&'a str, &'a Token, Vec<RawAtom<'a>>),
}

fn parse_raw_term<'a>(cur: &mut Cursor<'a>) -> Result<RawTerm<'a>, SigError> {
    let (name, tok) = cur.ident()?;
    if cur.eat('(') {
        let mut args = Vec::new();
        loop {
            let (a, atok) = cur.ident()?;
            args.push(RawAtom::Name(a, atok));
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
        Ok(RawTerm::App(name, tok, args))
    } else {
        Ok(RawTerm::Atom(RawAtom::Name(name, tok)))
    }
}

fn parse_identity_stmt(sig: &Signature, stmt: &Statement) -> Result<Identity, SigError> {
    let mut cur = Cursor { toks: stmt, pos: 0 };
    let lhs = parse_raw_term(&mut cur)?;
    cur.expect('=')?;
    let rhs = parse_raw_term(&mut cur)?;
    cur.done()?;

    // Variable numbering: `x` is x0; other names take the next free index in
    // first-occurrence order.
    let mentions_x = [&lhs, &rhs].iter().any(|t| raw_names(t).contains(&"x"));
    let mut vars: HashMap<String, u32> = HashMap::new();
    if mentions_x && sig.constant_id("x").is_none() && sig.function_id("x").is_none() {
        vars.insert("x".to_string(), 0);
    }
    let mut next = vars.len() as u32;

    let mut resolve_atom = |name: &str, tok: &Token| -> Result<Atom, SigError> {
        if let Some(c) = sig.constant_id(name) {
            return Ok(Atom::Const(c));
        }
        if sig.function_id(name).is_some() {
            return Err(SigError::FunctionAsAtom {
                line: tok.line,
                name: name.to_string(),
            });
        }
        let idx = match vars.get(name) {
            Some(i) => *i,
            None => {
                let i = next;
                next += 1;
                vars.insert(name.to_string(), i);
                i
            }
        };
        Ok(Atom::Var(Var(idx)))
    };

    let mut build = |raw: &RawTerm| -> Result<BasicTerm, SigError> {
        match raw {
            RawTerm::Atom(RawAtom::Name(n, t)) => Ok(resolve_atom(n, t)?.term()),
            RawTerm::App(name, tok, args) => {
                let f = sig.function_id(name).ok_or_else(|| SigError::Undeclared {
                    line: tok.line,
                    name: name.to_string(),
                })?;
                if sig.arity(f) != args.len() {
                    return Err(SigError::ArityMismatch {
                        line: tok.line,
                        name: name.to_string(),
                        expected: sig.arity(f),
                        found: args.len(),
                    });
                }
                let mut atoms = Vec::with_capacity(args.len());
                for RawAtom::Name(a, t) in args {
                    atoms.push(resolve_atom(a, t)?);
                }
                Ok(BasicTerm::App(f, atoms))
            }
        }
    };
    let l = build(&lhs)?;
    let r = build(&rhs)?;
    Ok(Identity::new(l, r))
}

fn raw_names<'a>(t: &RawTerm<'a>) -> Vec<&'a str> {
    match t {
        RawTerm::Atom(RawAtom::Name(n, _)) => vec![n],
        RawTerm::App(_, _, args) => args.iter().map(|RawAtom::Name(n, _)| *n).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: u32) -> Atom {
        Atom::Const(ConstId(i))
    }
    fn v(i: u32) -> Atom {
        Atom::Var(Var(i))
    }

    #[test]
    fn parses_maltsev() {
        let t = parse_theory("fn m/3; m(x,y,y)=x; m(y,y,x)=x;").unwrap();
        assert_eq!(t.signature.function_count(), 1);
        assert_eq!(t.identities.len(), 2);
        assert_eq!(
            t.identities[0].lhs,
            BasicTerm::App(FnId(0), vec![v(0), v(1), v(1)])
        );
        assert_eq!(t.identities[1].rhs, BasicTerm::var(0));
    }

    #[test]
    fn parses_unit_theory() {
        let t = parse_theory("const 1; fn B/2; B(1,x)=x; B(x,1)=x;").unwrap();
        assert_eq!(t.signature.constant_count(), 1);
        assert_eq!(t.identities.len(), 2);
        assert_eq!(
            t.identities[0].lhs,
            BasicTerm::App(FnId(0), vec![c(0), v(0)])
        );
    }

    #[test]
    fn empty_sigma() {
        let t = parse_theory("fn m/3;").unwrap();
        assert!(t.identities.is_empty());
    }

    #[test]
    fn variables_without_x_start_at_zero() {
        let t = parse_theory("fn F/2; F(y,z)=F(z,y);").unwrap();
        assert_eq!(
            t.identities[0].lhs,
            BasicTerm::App(FnId(0), vec![v(0), v(1)])
        );
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_theory("fn m/3;\nm(x,y)=x;").unwrap_err();
        assert!(matches!(e, SigError::ArityMismatch { line: 2, .. }));
        let e = parse_theory("fn m/3;\n\nq(x)=x;").unwrap_err();
        assert!(matches!(e, SigError::Undeclared { line: 3, .. }));
        let e = parse_theory("fn m/3;\nm(x,y,y)=x").unwrap_err();
        assert!(matches!(e, SigError::Syntax { line: 2, .. }));
        let e = parse_theory("fn m/0;").unwrap_err();
        assert!(matches!(e, SigError::NullaryFunction { line: 1, .. }));
        let e = parse_theory("const a;\nfn a/2;").unwrap_err();
        assert!(matches!(e, SigError::Duplicate { line: 2, .. }));
        let e = parse_theory("fn m/2;\nm(m,x)=x;").unwrap_err();
        assert!(matches!(e, SigError::FunctionAsAtom { line: 2, .. }));
    }

    #[test]
    fn substitution_examples() {
        let t = BasicTerm::App(FnId(0), vec![v(0), v(1), v(1)]);
        assert_eq!(
            t.substitute(|_| v(0)),
            BasicTerm::App(FnId(0), vec![v(0), v(0), v(0)])
        );
        let b = BasicTerm::App(FnId(0), vec![v(0), v(1)]);
        let g = |x: Var| if x.0 == 0 { c(0) } else { Atom::Var(x) };
        assert_eq!(b.substitute(g), BasicTerm::App(FnId(0), vec![c(0), v(1)]));
        assert_eq!(BasicTerm::var(0).substitute(|_| v(1)), BasicTerm::var(1));
    }

    #[test]
    fn replace_once_examples() {
        let t = BasicTerm::App(FnId(0), vec![c(0), c(0), v(0)]);
        assert_eq!(
            t.replace_constant_once(ConstId(0), ConstId(1), 0).unwrap(),
            BasicTerm::App(FnId(0), vec![c(1), c(0), v(0)])
        );
        assert_eq!(
            t.replace_constant_once(ConstId(0), ConstId(1), 1).unwrap(),
            BasicTerm::App(FnId(0), vec![c(0), c(1), v(0)])
        );
        assert!(t.replace_constant_once(ConstId(0), ConstId(1), 2).is_err());
        assert_eq!(
            BasicTerm::Const(ConstId(0))
                .replace_constant_once(ConstId(0), ConstId(1), 0)
                .unwrap(),
            BasicTerm::Const(ConstId(1))
        );
    }

    #[test]
    fn large_enough_examples() {
        let m = parse_theory("fn m/3; m(x,y,y)=x; m(y,y,x)=x;").unwrap();
        assert_eq!(large_enough_x(&m, &[]), 3);
        let b = parse_theory("const 1; fn B/2; B(1,x)=x; B(x,1)=x;").unwrap();
        assert_eq!(large_enough_x(&b, &[]), 2);
        let e = parse_theory("").unwrap();
        let xy = Identity::new(BasicTerm::var(0), BasicTerm::var(1));
        assert_eq!(large_enough_x(&e, &[xy]), 2);
    }

    #[test]
    fn render_round_trip() {
        let src = "const c, d; fn B/2; fn m/3; m(y,y,x)=x; B(c,y)=B(y,d); c=d; m(u,v,w)=m(w,v,u);";
        let t = parse_theory(src).unwrap();
        let again = parse_theory(&t.render()).unwrap();
        assert_eq!(t, again);
        assert_eq!(again.render(), t.render());
    }
}
