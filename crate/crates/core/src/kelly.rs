//! Weak closure of a set of basic identities over a finite variable set.
//!
//! The closure is the least equivalence on basic terms over `X ∪ C` that
//! contains Σ, is closed under substitutions `X → X ∪ C`, and lets a
//! provably-equal constant replace a single occurrence of another.

use thiserror::Error;

use crate::sig::{large_enough_x, Atom, BasicTerm, ConstId, FnId, Identity, SigError, Theory, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KellyError {
    #[error("variable set of size {given} is too small; at least {needed} variables are required")]
    XCountTooSmall { needed: usize, given: usize },
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// Every basic term over `x_count` variables and the theory's constants,
/// indexed densely: variables, constants, then applications by symbol with
/// arguments in lexicographic atom order (first argument most significant).
#[derive(Debug, Clone)]
pub struct TermUniverse {
    x_count: usize,
    c_count: usize,
    arities: Vec<usize>,
    offsets: Vec<usize>,
    len: usize,
}

impl TermUniverse {
    pub fn new(theory: &Theory, x_count: usize) -> Self {
        let sig = &theory.signature;
        let c_count = sig.constant_count();
        let atoms = x_count + c_count;
        let arities: Vec<usize> = sig.functions().iter().map(|(_, a)| *a).collect();
        let mut offsets = Vec::with_capacity(arities.len());
        let mut len = atoms;
        for &a in &arities {
            offsets.push(len);
            len += atoms.pow(a as u32);
        }
        TermUniverse {
            x_count,
            c_count,
            arities,
            offsets,
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn x_count(&self) -> usize {
        self.x_count
    }

    pub fn atom_count(&self) -> usize {
        self.x_count + self.c_count
    }

    pub fn atom_index(&self, a: Atom) -> Option<usize> {
        match a {
            Atom::Var(v) if (v.0 as usize) < self.x_count => Some(v.0 as usize),
            Atom::Const(c) if (c.0 as usize) < self.c_count => Some(self.x_count + c.0 as usize),
            _ => None,
        }
    }

    pub fn atom_at(&self, i: usize) -> Atom {
        if i < self.x_count {
            Atom::Var(Var(i as u32))
        } else {
            Atom::Const(ConstId((i - self.x_count) as u32))
        }
    }

    pub fn index(&self, t: &BasicTerm) -> Option<usize> {
        match t {
            BasicTerm::Var(v) => self.atom_index(Atom::Var(*v)),
            BasicTerm::Const(c) => self.atom_index(Atom::Const(*c)),
            BasicTerm::App(f, args) => {
                let fi = f.0 as usize;
                if fi >= self.arities.len() || self.arities[fi] != args.len() {
                    return None;
                }
                let mut code = 0;
                for a in args {
                    code = code * self.atom_count() + self.atom_index(*a)?;
                }
                Some(self.offsets[fi] + code)
            }
        }
    }

    /// Symbol and argument atom indices of term `i` (`None` for atoms).
    pub fn decode(&self, i: usize) -> Option<(usize, Vec<usize>)> {
        if i < self.atom_count() {
            return None;
        }
        let f = self.offsets.partition_point(|&o| o <= i) - 1;
        let mut code = i - self.offsets[f];
        let m = self.arities[f];
        let mut args = vec![0; m];
        for j in (0..m).rev() {
            args[j] = code % self.atom_count();
            code /= self.atom_count();
        }
        Some((f, args))
    }

    /// Index of symbol `f` applied to the atoms with indices `args`.
    pub fn encode(&self, f: usize, args: &[usize]) -> usize {
        let mut code = 0;
        for &a in args {
            code = code * self.atom_count() + a;
        }
        self.offsets[f] + code
    }

    pub fn term(&self, i: usize) -> BasicTerm {
        match self.decode(i) {
            None => self.atom_at(i).term(),
            Some((f, args)) => BasicTerm::App(
                FnId(f as u32),
                args.into_iter().map(|a| self.atom_at(a)).collect(),
            ),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = BasicTerm> + '_ {
        (0..self.len).map(|i| self.term(i))
    }

    /// Index of `t[γ]` where `gamma[v]` is the atom index assigned to variable `v`.
    fn substituted(&self, t: &BasicTerm, gamma: &[usize]) -> usize {
        let atom = |a: &Atom| match a {
            Atom::Var(v) => gamma[v.0 as usize],
            Atom::Const(c) => self.x_count + c.0 as usize,
        };
        match t {
            BasicTerm::Var(v) => gamma[v.0 as usize],
            BasicTerm::Const(c) => self.x_count + c.0 as usize,
            BasicTerm::App(f, args) => {
                let mut code = 0;
                for a in args {
                    code = code * self.atom_count() + atom(a);
                }
                self.offsets[f.0 as usize] + code
            }
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        let mut root = a;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        while self.parent[a] as usize != root {
            let next = self.parent[a] as usize;
            self.parent[a] = root as u32;
            a = next;
        }
        root
    }

    /// Keeps the smaller index as root, so roots are least class members.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u32;
        true
    }
}

/// A frozen partition of the term universe; each class is represented by
/// its least index.
#[derive(Debug, Clone)]
pub struct ClosureRelation {
    universe: TermUniverse,
    rep: Vec<u32>,
}

/// Calls `visit` with every assignment of `vars` (by position) to atom indices.
fn for_each_assignment(
    vars: &[Var],
    atoms: usize,
    gamma: &mut [usize],
    mut visit: impl FnMut(&[usize]),
) {
    let k = vars.len();
    let mut digits = vec![0usize; k];
    loop {
        for (v, d) in vars.iter().zip(&digits) {
            gamma[v.0 as usize] = *d;
        }
        visit(gamma);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < atoms {
                break;
            }
            digits[i] = 0;
        }
    }
}

pub fn weak_closure(theory: &Theory, x_count: usize) -> Result<ClosureRelation, KellyError> {
    let needed = large_enough_x(theory, &[]);
    if x_count < needed {
        return Err(KellyError::XCountTooSmall {
            needed,
            given: x_count,
        });
    }
    for id in &theory.identities {
        theory.signature.check_term(&id.lhs)?;
        theory.signature.check_term(&id.rhs)?;
    }
    let u = TermUniverse::new(theory, x_count);
    let mut uf = UnionFind::new(u.len());
    let atoms = u.atom_count();

    // Substitution instances of the axioms. Instances of instances are
    // instances, so this set is already closed under substitution.
    let mut gamma = vec![0usize; x_count];
    for id in &theory.identities {
        let vars = id.variables();
        for_each_assignment(&vars, atoms, &mut gamma, |g| {
            let (s, t) = (u.substituted(&id.lhs, g), u.substituted(&id.rhs, g));
            uf.union(s, t);
        });
    }

    // Single-occurrence constant replacement. A replacement edge stays a
    // replacement edge under substitution, so adding all of them for the
    // current constant classes keeps substitution closure; repeat until the
    // constant classes stop changing.
    let c_count = theory.signature.constant_count();
    let mut applied: Option<Vec<usize>> = None;
    loop {
        let classes: Vec<usize> = (0..c_count).map(|c| uf.find(x_count + c)).collect();
        if applied.as_ref() == Some(&classes) {
            break;
        }
        let mates: Vec<Vec<usize>> = (0..c_count)
            .map(|c| {
                (0..c_count)
                    .filter(|&d| d != c && classes[d] == classes[c])
                    .map(|d| x_count + d)
                    .collect()
            })
            .collect();
        if mates.iter().any(|m| !m.is_empty()) {
            for t in atoms..u.len() {
                let (f, args) = u.decode(t).expect("application");
                for (j, &a) in args.iter().enumerate() {
                    if a < x_count {
                        continue;
                    }
                    let mut replaced = args.clone();
                    for &d in &mates[a - x_count] {
                        replaced[j] = d;
                        uf.union(t, u.encode(f, &replaced));
                    }
                }
            }
        }
        applied = Some(classes);
    }

    let rep = (0..u.len()).map(|i| uf.find(i) as u32).collect();
    Ok(ClosureRelation { universe: u, rep })
}

impl ClosureRelation {
    pub fn universe(&self) -> &TermUniverse {
        &self.universe
    }

    /// Least index in the class of term index `i`.
    pub fn rep(&self, i: usize) -> usize {
        self.rep[i] as usize
    }

    pub fn class_of(&self, t: &BasicTerm) -> Option<usize> {
        self.universe.index(t).map(|i| self.rep(i))
    }

    pub fn same_class(&self, s: &BasicTerm, t: &BasicTerm) -> Option<bool> {
        Some(self.class_of(s)? == self.class_of(t)?)
    }

    /// Classes ordered by representative; members in index order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.rep.len()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.rep.len() {
            let r = self.rep(i);
            if r == i {
                slot[i] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }

    pub fn class_count(&self) -> usize {
        (0..self.rep.len()).filter(|&i| self.rep(i) == i).count()
    }

    /// True iff no two distinct variables share a class.
    pub fn is_consistent(&self) -> bool {
        (0..self.universe.x_count()).all(|v| self.rep(v) == v)
    }

    /// One line per class, terms separated by spaces, classes sorted by representative.
    pub fn dump(&self, theory: &Theory) -> String {
        let mut out = String::new();
        for class in self.classes() {
            let terms: Vec<String> = class
                .iter()
                .map(|&i| theory.signature.render_term(&self.universe.term(i)))
                .collect();
            out.push_str(&terms.join(" "));
            out.push('\n');
        }
        out
    }

    /// Independent fixpoint check: Σ is contained, every substitution instance
    /// of every class member stays with the instance of its representative,
    /// and every single-occurrence constant replacement stays in class.
    pub fn is_closed(&self, theory: &Theory) -> bool {
        let u = &self.universe;
        for id in &theory.identities {
            if self.same_class(&id.lhs, &id.rhs) != Some(true) {
                return false;
            }
        }
        let mut gamma = vec![0usize; u.x_count()];
        for i in 0..u.len() {
            let r = self.rep(i);
            if r == i {
                continue;
            }
            let (s, t) = (u.term(i), u.term(r));
            let vars = Identity::new(s.clone(), t.clone()).variables();
            let mut ok = true;
            for_each_assignment(&vars, u.atom_count(), &mut gamma, |g| {
                let (a, b) = (u.substituted(&s, g), u.substituted(&t, g));
                ok &= self.rep(a) == self.rep(b);
            });
            if !ok {
                return false;
            }
        }
        let c_count = theory.signature.constant_count();
        for i in 0..u.len() {
            let t = u.term(i);
            for c in 0..c_count {
                for d in 0..c_count {
                    let (ci, di) = (u.x_count() + c, u.x_count() + d);
                    if c == d || self.rep(ci) != self.rep(di) {
                        continue;
                    }
                    let occurrences = t
                        .atoms()
                        .iter()
                        .filter(|a| **a == Atom::Const(ConstId(c as u32)))
                        .count();
                    for occ in 0..occurrences {
                        let t2 = t
                            .replace_constant_once(ConstId(c as u32), ConstId(d as u32), occ)
                            .expect("occurrence in range");
                        if self.class_of(&t2) != Some(self.rep(i)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Decides `Σ ⊢ φ` over the least large-enough variable set for `Σ ∪ {φ}`.
pub fn proves(theory: &Theory, phi: &Identity) -> Result<bool, KellyError> {
    theory.signature.check_term(&phi.lhs)?;
    theory.signature.check_term(&phi.rhs)?;
    let x = large_enough_x(theory, std::slice::from_ref(phi));
    let closure = weak_closure(theory, x)?;
    Ok(closure
        .same_class(&phi.lhs, &phi.rhs)
        .expect("terms fit the universe"))
}

pub fn consistent(theory: &Theory) -> Result<bool, KellyError> {
    Ok(weak_closure(theory, large_enough_x(theory, &[]))?.is_consistent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::parse_theory;

    const MALTSEV: &str = "fn m/3; m(x,y,y)=x; m(y,y,x)=x;";
    const UNIT: &str = "const 1; fn B/2; B(1,x)=x; B(x,1)=x;";

    #[test]
    fn universe_size_and_order() {
        let t = parse_theory("const c; fn B/2; fn s/1;").unwrap();
        let u = TermUniverse::new(&t, 2);
        assert_eq!(u.len(), 3 + 9 + 3);
        for i in 0..u.len() {
            assert_eq!(u.index(&u.term(i)), Some(i));
        }
        assert_eq!(u.term(2), BasicTerm::Const(ConstId(0)));
    }

    #[test]
    fn maltsev_class_of_x() {
        let t = parse_theory(MALTSEV).unwrap();
        let cl = weak_closure(&t, 3).unwrap();
        let x0 = cl.class_of(&BasicTerm::var(0)).unwrap();
        for s in ["m(x,y,y)=x", "m(y,y,x)=x", "m(x,x,x)=x"] {
            let id = t.parse_identity(s).unwrap();
            assert_eq!(cl.class_of(&id.lhs), Some(x0), "{s}");
        }
        assert!(cl.is_closed(&t));
    }

    #[test]
    fn singleton_class_under_two_constants() {
        let t = parse_theory("const c, d; fn B/2; B(c,x)=x; B(d,x)=d;").unwrap();
        let cl = weak_closure(&t, 2).unwrap();
        let id = t.parse_identity("B(x,d)=x").unwrap();
        let i = cl.universe().index(&id.lhs).unwrap();
        assert_eq!(
            cl.classes().iter().find(|c| c.contains(&i)).unwrap().len(),
            1
        );
        assert!(cl.is_closed(&t));
    }

    #[test]
    fn empty_sigma_is_discrete() {
        let t = parse_theory("fn F/2;").unwrap();
        let cl = weak_closure(&t, 2).unwrap();
        assert_eq!(cl.class_count(), cl.universe().len());
    }

    #[test]
    fn proves_examples() {
        let t = parse_theory(MALTSEV).unwrap();
        assert!(proves(&t, &t.parse_identity("m(x,x,x)=x").unwrap()).unwrap());
        assert!(!proves(&t, &t.parse_identity("m(x,y,x)=x").unwrap()).unwrap());
        let b = parse_theory(UNIT).unwrap();
        assert!(proves(&b, &b.parse_identity("B(1,1)=1").unwrap()).unwrap());
    }

    #[test]
    fn consistency_examples() {
        assert!(consistent(&parse_theory(MALTSEV).unwrap()).unwrap());
        assert!(!consistent(&parse_theory("x=y;").unwrap()).unwrap());
        assert!(!consistent(&parse_theory("fn F/2; F(z,z)=x;").unwrap()).unwrap());
    }

    #[test]
    fn constant_replacement_propagates() {
        let t = parse_theory("const a, b; fn G/2; a=b; G(a,x)=x;").unwrap();
        assert!(proves(&t, &t.parse_identity("G(b,x)=x").unwrap()).unwrap());
        let cl = weak_closure(&t, 2).unwrap();
        assert!(cl.is_closed(&t));
    }

    #[test]
    fn derived_constant_equality_reaches_fixpoint() {
        // c = G(a), d = G(b), a = b forces c = d, which then feeds rule (v) again.
        let t = parse_theory("const a, b, c, d; fn G/1; fn H/2; c=G(a); d=G(b); a=b; H(c,x)=x;")
            .unwrap();
        assert!(proves(&t, &t.parse_identity("c=d").unwrap()).unwrap());
        assert!(proves(&t, &t.parse_identity("H(d,x)=x").unwrap()).unwrap());
        assert!(weak_closure(&t, 2).unwrap().is_closed(&t));
    }

    #[test]
    fn rejects_small_x() {
        let t = parse_theory(MALTSEV).unwrap();
        assert!(matches!(
            weak_closure(&t, 2),
            Err(KellyError::XCountTooSmall {
                needed: 3,
                given: 2
            })
        ));
    }
}
