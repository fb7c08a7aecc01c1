use crate::algebra::{
    check_models, one_point_completion, FiniteAlgebra, Interpretation, Operation,
};
use crate::sig::Theory;

use super::model::model_v;
use super::ConstructionError;

/// Merges `alg` with the model `V` of Σ so that the result realizes Σ.
///
/// `alg` is one-point completed once per constant class (new elements
/// `z1, ..., zp`, ordered by least constant) and once more (new element
/// `0`). `V` is built with `|Y| = |A|`; the bijection sends `[x_i]` to the
/// `i`-th element of `A`, the `j`-th constant class to `zj` and `[0]` to `0`.
/// Because both universes are laid out in that order the transport is the
/// identity on indices. Σ's symbols are added under their own names, so they
/// must not clash with operation names of the completed algebra.
pub fn sigma_merge(
    alg: &FiniteAlgebra,
    theory: &Theory,
) -> Result<(FiniteAlgebra, Interpretation), ConstructionError> {
    if alg.size() == 0 {
        return Err(ConstructionError::Precondition(
            "the algebra must be nonempty".into(),
        ));
    }
    let v = model_v(theory, alg.size())?;
    let p = v.constant_classes.len();
    let mut merged = alg.clone();
    for j in 1..=p {
        let label = merged.fresh_label(&format!("z{j}"));
        merged = one_point_completion(&merged, &label)?;
    }
    let label = merged.fresh_label("0");
    merged = one_point_completion(&merged, &label)?;
    debug_assert_eq!(merged.size(), v.algebra.size());

    for op in v.algebra.operations() {
        if merged.operation(op.name()).is_some() {
            return Err(ConstructionError::Precondition(format!(
                "symbol `{}` clashes with an operation of the completed algebra",
                op.name()
            )));
        }
        let values: Vec<u32> = op.entries().into_iter().map(|(_, x)| x).collect();
        merged = merged.with_operation(Operation::total(
            op.name(),
            op.arity(),
            merged.size(),
            values,
        )?)?;
    }
    let interp = Interpretation::by_name(theory, &merged)?;
    if !check_models(&merged, theory, &interp)? {
        return Err(ConstructionError::Postcondition(
            "the merge does not model the theory".into(),
        ));
    }
    for op in v.algebra.operations() {
        let (_, moved) = merged.operation(op.name()).expect("just added");
        if moved.entries() != op.entries() {
            return Err(ConstructionError::Postcondition(format!(
                "`{}` is not transported faithfully",
                op.name()
            )));
        }
    }
    Ok((merged, interp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Guard, Subpower};
    use crate::growth::oracle_d;
    use crate::sig::parse_theory;

    fn bare(k: usize) -> FiniteAlgebra {
        FiniteAlgebra::numbered(k, vec![]).unwrap()
    }

    #[test]
    fn two_constants_preserve_growth() {
        let t = parse_theory("const c, d; fn B/2; B(c,x)=x; B(d,x)=d;").unwrap();
        let (m, _) = sigma_merge(&bare(2), &t).unwrap();
        assert_eq!(m.size(), 5);
        assert_eq!(m.universe(), ["0", "1", "z1", "z2", "02"]);
        for n in 1..=2 {
            assert_eq!(oracle_d(&m, n).unwrap(), 1 << n);
        }
    }

    #[test]
    fn maltsev_merge_generates_from_outside() {
        let t = parse_theory("fn m/3; m(x,y,y)=x; m(y,y,x)=x;").unwrap();
        let (m, _) = sigma_merge(&bare(2), &t).unwrap();
        assert_eq!(m.size(), 3);
        assert!(oracle_d(&m, 2).unwrap() < 4);
        let outside: Vec<u64> = (0..9u64).filter(|c| c / 3 == 2 || c % 3 == 2).collect();
        assert!(Subpower::generate(&m, 2, &outside, Guard::default())
            .unwrap()
            .is_full());
    }

    #[test]
    fn one_element_base() {
        let t = parse_theory("const 1; fn B/2; B(1,x)=x; B(x,1)=x;").unwrap();
        let (m, interp) = sigma_merge(&bare(1), &t).unwrap();
        assert_eq!(m.size(), 3);
        assert!(check_models(&m, &t, &interp).unwrap());
    }
}
