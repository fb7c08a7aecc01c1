//! The term model `M` on provability classes plus an absorbing-like `[0]`,
//! and its small submodel `V` on `[Y] ∪ [C] ∪ {[0]}`.

use crate::algebra::{checked_pow, FiniteAlgebra, Interpretation, Operation};
use crate::kelly::{weak_closure, ClosureRelation};
use crate::sig::{large_enough_x, Atom, ConstId, Theory};

use super::{ConstructionError, TABLE_GUARD};

/// What a class contains among the atoms, read off its least member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ClassKind {
    Var(usize),
    /// Atom index of the least constant in the class.
    Const(usize),
    Atomless,
}

fn kind(closure: &ClosureRelation, rep: usize) -> ClassKind {
    let u = closure.universe();
    if rep < u.x_count() {
        ClassKind::Var(rep)
    } else if rep < u.atom_count() {
        ClassKind::Const(rep)
    } else {
        ClassKind::Atomless
    }
}

fn closure_for(theory: &Theory, x_count: usize) -> Result<ClosureRelation, ConstructionError> {
    let closure = weak_closure(theory, x_count)?;
    if !closure.is_consistent() {
        return Err(ConstructionError::Inconsistent);
    }
    Ok(closure)
}

fn check_table_size(size: usize, theory: &Theory) -> Result<(), ConstructionError> {
    let mut total: u128 = 0;
    for (_, m) in theory.signature.functions() {
        total = total.saturating_add(checked_pow(size, *m).unwrap_or(u128::MAX));
    }
    if total > TABLE_GUARD as u128 {
        return Err(ConstructionError::TooLarge {
            size: total,
            guard: TABLE_GUARD,
        });
    }
    Ok(())
}

fn label_for(closure: &ClosureRelation, theory: &Theory, rep: usize) -> String {
    format!(
        "[{}]",
        theory.signature.render_term(&closure.universe().term(rep))
    )
}

fn zero_label(taken: &[String]) -> String {
    let mut label = "[0]".to_string();
    while taken.contains(&label) {
        label.push('\'');
    }
    label
}

/// Appends one nullary operation per constant, valued at `value(c)`.
fn constant_ops(
    theory: &Theory,
    size: usize,
    value: impl Fn(ConstId) -> u32,
) -> Result<Vec<Operation>, ConstructionError> {
    (0..theory.signature.constant_count() as u32)
        .map(|c| {
            let c = ConstId(c);
            Ok(Operation::constant(
                theory.signature.constant_name(c),
                size,
                value(c),
            )?)
        })
        .collect()
}

/// Odometer over `size^m` argument tuples.
fn next_digits(digits: &mut [u32], size: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < size {
            return true;
        }
        *d = 0;
    }
    false
}

#[derive(Debug, Clone)]
pub struct ModelM {
    pub algebra: FiniteAlgebra,
    closure: ClosureRelation,
    /// Element of each class representative; indexed by term index.
    element: Vec<u32>,
    pub zero: u32,
}

impl ModelM {
    pub fn x_count(&self) -> usize {
        self.closure.universe().x_count()
    }

    /// Element `[t]` of the term with universe index `i`.
    pub fn class_element(&self, i: usize) -> u32 {
        self.element[self.closure.rep(i)]
    }

    /// The valuation `x_i ↦ [x_i]`.
    pub fn canonical_valuation(&self) -> Vec<u32> {
        (0..self.x_count()).map(|i| self.class_element(i)).collect()
    }

    pub fn interpretation(&self, theory: &Theory) -> Result<Interpretation, ConstructionError> {
        Ok(Interpretation::by_name(theory, &self.algebra)?)
    }
}

/// Per class: the distinct variable masks of its members.
fn class_var_masks(closure: &ClosureRelation) -> Vec<Vec<u64>> {
    let u = closure.universe();
    let mut masks: Vec<Vec<u64>> = vec![Vec::new(); u.len()];
    for i in 0..u.len() {
        let mask = u
            .term(i)
            .variables()
            .iter()
            .fold(0u64, |m, v| m | (1 << v.0));
        let slot = &mut masks[closure.rep(i)];
        if !slot.contains(&mask) {
            slot.push(mask);
        }
    }
    masks
}

/// The model `M` over `X = large_enough_x(Σ)`.
pub fn model_m(theory: &Theory) -> Result<ModelM, ConstructionError> {
    model_m_over(theory, large_enough_x(theory, &[]))
}

/// The model `M` over `x_count` variables.
///
/// For arguments `S = {[a_1], ..., [a_m]}` the injection ı sends constant
/// classes to their least constant, variable classes to their variable, and
/// the remaining classes (including `[0]`) to the least unfixed variables in
/// element order. Tables are recomputed with the greatest unfixed variables
/// instead and must agree.
pub fn model_m_over(theory: &Theory, x_count: usize) -> Result<ModelM, ConstructionError> {
    if x_count > 64 {
        return Err(ConstructionError::Precondition(
            "at most 64 variables are supported".into(),
        ));
    }
    let closure = closure_for(theory, x_count)?;
    let u = closure.universe();
    let classes = closure.classes();
    let size = classes.len() + 1;
    check_table_size(size, theory)?;
    let mut element = vec![u32::MAX; u.len()];
    let mut reps = Vec::with_capacity(classes.len());
    for (e, class) in classes.iter().enumerate() {
        element[class[0]] = e as u32;
        reps.push(class[0]);
    }
    let zero = classes.len() as u32;
    let masks = class_var_masks(&closure);

    let table = |f: usize, m: usize, high: bool| -> Vec<u32> {
        let mut values = Vec::with_capacity(size.pow(m as u32));
        let mut digits = vec![0u32; m];
        let mut atoms = vec![0usize; m];
        loop {
            let mut fixed = 0u64;
            let mut members: Vec<u32> = digits.clone();
            members.sort_unstable();
            members.dedup();
            for &e in &members {
                if e != zero {
                    if let ClassKind::Var(v) = kind(&closure, reps[e as usize]) {
                        fixed |= 1 << v;
                    }
                }
            }
            let mut free: Vec<usize> = (0..x_count).filter(|v| fixed & (1 << v) == 0).collect();
            if high {
                free.reverse();
            }
            let mut free = free.into_iter();
            let mut image = vec![0usize; size];
            for &e in &members {
                let k = if e == zero {
                    ClassKind::Atomless
                } else {
                    kind(&closure, reps[e as usize])
                };
                image[e as usize] = match k {
                    ClassKind::Var(v) => v,
                    ClassKind::Const(c) => c,
                    ClassKind::Atomless => free.next().expect("|S| ≤ arity ≤ |X|"),
                };
            }
            for (a, d) in atoms.iter_mut().zip(&digits) {
                *a = image[*d as usize];
            }
            let rep = closure.rep(u.encode(f, &atoms));
            let value = if masks[rep].iter().any(|mk| mk & !fixed == 0) {
                element[rep]
            } else if let ClassKind::Var(v) = kind(&closure, rep) {
                *members
                    .iter()
                    .find(|e| image[**e as usize] == v)
                    .expect("a provable variable occurs among the arguments")
            } else {
                zero
            };
            values.push(value);
            if !next_digits(&mut digits, size as u32) {
                return values;
            }
        }
    };

    let mut ops = Vec::new();
    for (f, (name, m)) in theory.signature.functions().iter().enumerate() {
        let low = table(f, *m, false);
        if low != table(f, *m, true) {
            return Err(ConstructionError::Postcondition(format!(
                "`{name}` depends on the choice of injection"
            )));
        }
        ops.push(Operation::total(name, *m, size, low)?);
    }
    ops.extend(constant_ops(theory, size, |c| {
        element[closure.rep(u.atom_index(Atom::Const(c)).expect("constant"))]
    })?);
    let mut labels: Vec<String> = reps
        .iter()
        .map(|r| label_for(&closure, theory, *r))
        .collect();
    labels.push(zero_label(&labels));
    let algebra = FiniteAlgebra::new(labels, ops)?;
    Ok(ModelM {
        algebra,
        closure,
        element,
        zero,
    })
}

#[derive(Debug, Clone)]
pub struct ModelV {
    pub algebra: FiniteAlgebra,
    pub y_count: usize,
    /// Constant classes in order of their least constant.
    pub constant_classes: Vec<Vec<ConstId>>,
    pub zero: u32,
}

impl ModelV {
    pub fn interpretation(&self, theory: &Theory) -> Result<Interpretation, ConstructionError> {
        Ok(Interpretation::by_name(theory, &self.algebra)?)
    }
}

/// The model `V` with `|Y| = y_count`: elements `[x0..]`, then the constant
/// classes, then `[0]`. An application takes the class of the atom of
/// `Y ∪ C` it provably equals, else `[0]`; `[0]` is read as the fresh
/// variable `z = x_{y_count}`.
pub fn model_v(theory: &Theory, y_count: usize) -> Result<ModelV, ConstructionError> {
    if y_count == 0 {
        return Err(ConstructionError::Precondition(
            "y_count must be at least 1".into(),
        ));
    }
    let x_count = large_enough_x(theory, &[]).max(y_count + 1);
    let closure = closure_for(theory, x_count)?;
    let u = closure.universe();
    let mut constant_classes: Vec<Vec<ConstId>> = Vec::new();
    let mut const_rep: Vec<usize> = Vec::new();
    for c in 0..theory.signature.constant_count() as u32 {
        let i = u.atom_index(Atom::Const(ConstId(c))).expect("constant");
        match const_rep.iter().position(|r| *r == closure.rep(i)) {
            Some(j) => constant_classes[j].push(ConstId(c)),
            None => {
                const_rep.push(closure.rep(i));
                constant_classes.push(vec![ConstId(c)]);
            }
        }
    }
    let p = constant_classes.len();
    let size = y_count + p + 1;
    check_table_size(size, theory)?;
    let zero = (y_count + p) as u32;
    // ı on elements: variables, least constants, then z.
    let mut image: Vec<usize> = (0..y_count).collect();
    image.extend(&const_rep);
    image.push(y_count);
    let value_of_rep = |rep: usize| -> u32 {
        if rep < y_count {
            rep as u32
        } else if let Some(j) = const_rep.iter().position(|r| *r == rep) {
            (y_count + j) as u32
        } else {
            zero
        }
    };

    let mut ops = Vec::new();
    for (f, (name, m)) in theory.signature.functions().iter().enumerate() {
        let mut values = Vec::new();
        let mut digits = vec![0u32; *m];
        let mut atoms = vec![0usize; *m];
        loop {
            for (a, d) in atoms.iter_mut().zip(&digits) {
                *a = image[*d as usize];
            }
            values.push(value_of_rep(closure.rep(u.encode(f, &atoms))));
            if !next_digits(&mut digits, size as u32) {
                break;
            }
        }
        ops.push(Operation::total(name, *m, size, values)?);
    }
    ops.extend(constant_ops(theory, size, |c| {
        let j = constant_classes
            .iter()
            .position(|cl| cl.contains(&c))
            .expect("classified");
        (y_count + j) as u32
    })?);
    let mut labels: Vec<String> = (0..y_count)
        .map(|i| label_for(&closure, theory, i))
        .collect();
    labels.extend(const_rep.iter().map(|r| label_for(&closure, theory, *r)));
    labels.push(zero_label(&labels));
    Ok(ModelV {
        algebra: FiniteAlgebra::new(labels, ops)?,
        y_count,
        constant_classes,
        zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::check_models;
    use crate::sig::parse_theory;

    const MALTSEV: &str = "fn m/3; m(x,y,y)=x; m(y,y,x)=x;";
    const UNIT: &str = "const 1; fn B/2; B(1,x)=x; B(x,1)=x;";
    const TWO_CONSTANTS: &str = "const c, d; fn B/2; B(c,x)=x; B(d,x)=d;";

    fn models(theory: &Theory, alg: &FiniteAlgebra) -> bool {
        let interp = Interpretation::by_name(theory, alg).unwrap();
        check_models(alg, theory, &interp).unwrap()
    }

    #[test]
    fn maltsev_m_models_and_separates() {
        let t = parse_theory(MALTSEV).unwrap();
        let m = model_m(&t).unwrap();
        assert!(models(&t, &m.algebra));
        let val = m.canonical_valuation();
        let op = &m.algebra.operations()[0];
        let lhs = op.apply(&[val[0], val[1], val[0]]).unwrap().unwrap();
        assert_ne!(lhs, val[0]);
    }

    #[test]
    fn empty_theory_m() {
        let t = parse_theory("fn F/2;").unwrap();
        let m = model_m(&t).unwrap();
        // X = {x0, x1}: 2 variables and 4 applications, each alone, plus [0].
        assert_eq!(m.algebra.size(), 7);
        let (x0, x1) = (m.class_element(0), m.class_element(1));
        let f = m.algebra.operations()[0].apply(&[x0, x1]).unwrap().unwrap();
        assert_eq!(m.algebra.label(f), "[F(x0,x1)]");
    }

    #[test]
    fn unit_m_uses_provable_variable() {
        let t = parse_theory(UNIT).unwrap();
        let m = model_m(&t).unwrap();
        assert!(models(&t, &m.algebra));
        let one = m
            .algebra
            .operation("1")
            .unwrap()
            .1
            .apply(&[])
            .unwrap()
            .unwrap();
        let x0 = m.class_element(0);
        assert_eq!(
            m.algebra.operations()[0].apply(&[one, x0]).unwrap(),
            Some(x0)
        );
    }

    #[test]
    fn model_v_sizes() {
        let t = parse_theory(MALTSEV).unwrap();
        let v = model_v(&t, 2).unwrap();
        assert_eq!(v.algebra.size(), 3);
        assert!(models(&t, &v.algebra));

        let t = parse_theory(TWO_CONSTANTS).unwrap();
        let v = model_v(&t, 1).unwrap();
        assert_eq!(v.algebra.size(), 4);
        assert!(models(&t, &v.algebra));
        let interp = v.interpretation(&t).unwrap();
        assert_ne!(interp.constants[0], interp.constants[1]);

        let t = parse_theory("fn F/2; fn G/1;").unwrap();
        let v = model_v(&t, 3).unwrap();
        assert_eq!(v.algebra.size(), 4);
        assert!(v.algebra.operations()[0]
            .entries()
            .iter()
            .all(|(_, x)| *x == v.zero));
    }

    #[test]
    fn inconsistent_rejected() {
        let t = parse_theory("fn F/2; F(x,y)=x; F(x,y)=y;").unwrap();
        assert!(matches!(model_m(&t), Err(ConstructionError::Inconsistent)));
        assert!(matches!(
            model_v(&t, 1),
            Err(ConstructionError::Inconsistent)
        ));
    }
}
