use crate::algebra::{one_point_completion, FiniteAlgebra, Operation};

use super::ConstructionError;

/// `Σ_{i<k} q^i·C(n,i)`, the number of tuples in `{a_1..a_q,1}^n` with
/// support (entries other than `1`) of size below `k`.
pub fn nu_formula(q: usize, k: usize, n: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut power: u128 = 1;
    for i in 0..k.min(n + 1) {
        total += power * binom;
        binom = binom * (n - i) as u128 / (i + 1) as u128;
        power *= q as u128;
    }
    total
}

/// The partial algebra on `a1, ..., aq, 1` with one `k`-ary operation `F`
/// defined only on near-unanimous tuples whose dissenter is `1` (value: the
/// majority entry) and on the all-`1` tuple; and its total version: the
/// one-point completion (new element `0`) expanded by a nullary operation
/// `1` naming `1`.
pub fn example_nu(q: usize, k: usize) -> Result<(FiniteAlgebra, FiniteAlgebra), ConstructionError> {
    if q == 0 || k < 2 {
        return Err(ConstructionError::Precondition(
            "need q ≥ 1 and k ≥ 2".into(),
        ));
    }
    let mut labels: Vec<String> = (1..=q).map(|i| format!("a{i}")).collect();
    labels.push("1".into());
    let size = q + 1;
    let one = q as u32;
    let mut rows = vec![(vec![one; k], one)];
    for x in 0..q as u32 {
        for pos in 0..k {
            let mut args = vec![x; k];
            args[pos] = one;
            rows.push((args, x));
        }
    }
    let partial = FiniteAlgebra::new(labels, vec![Operation::partial("F", k, size, rows)?])?;
    let completed = one_point_completion(&partial, "0")?;
    let total = completed.with_operation(Operation::constant("1", completed.size(), one)?)?;
    Ok((partial, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::oracle_d;

    #[test]
    fn formula_values() {
        assert_eq!(nu_formula(1, 2, 4), 5);
        assert_eq!(nu_formula(2, 2, 3), 7);
        assert_eq!(nu_formula(1, 3, 3), 7);
        assert_eq!(nu_formula(1, 3, 1), 2);
        assert_eq!(nu_formula(3, 4, 0), 1);
    }

    #[test]
    fn small_cases_match_formula() {
        for (q, k, top) in [(1, 2, 4), (2, 2, 3), (1, 3, 3)] {
            let (p, t) = example_nu(q, k).unwrap();
            for n in 1..=top {
                let want = nu_formula(q, k, n) as usize;
                assert_eq!(oracle_d(&p, n).unwrap(), want, "partial q={q} k={k} n={n}");
                assert_eq!(
                    oracle_d(&t, n).unwrap(),
                    want - 1,
                    "total q={q} k={k} n={n}"
                );
            }
        }
    }
}
