use crate::algebra::{checked_pow, FiniteAlgebra, Operation};

use super::ConstructionError;

/// Most operations `prescribed_d` will create.
const MAX_OPERATIONS: u128 = 1 << 16;

/// `1 + Σ j·D(j)`.
pub fn prescribed_size(values: &[usize]) -> usize {
    1 + values.iter().enumerate().map(|(j, d)| j * d).sum::<usize>()
}

/// A finite partial algebra with `d(n) = D(n)` for `n ≤ k`, `D = values`.
///
/// Universe: `y`, then the entries `z{n}_{i}_{j}` of one `n × D(n)` matrix
/// `M(n)` per `n ≥ 1`, ordered by `(n, i, j)`. If `D(0) = 0` a nullary
/// operation `e` names `y`; if `D(1) = 0` nullary operations `k_<label>` name
/// every element. For each `n ≥ 1` with `D(n) ≥ 1` and each `b ∈ A^n` there is
/// a `D(n)`-ary operation `F{n}_{code(b)}` defined exactly on the rows of
/// `M(n)`, sending row `i` to `b_i`.
pub fn prescribed_d(values: &[usize]) -> Result<FiniteAlgebra, ConstructionError> {
    let pre = |m: &str| Err(ConstructionError::Precondition(m.to_string()));
    if values.is_empty() {
        return pre("D must have at least one value");
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return pre("D must be increasing");
    }
    if values[0] > 1 {
        return pre("D(0) must be 0 or 1");
    }
    if values.len() > 2 && values[2] == 0 {
        return pre("D(2) must be positive");
    }
    let size = prescribed_size(values);
    let mut ops_needed: u128 = 0;
    for n in 1..values.len() {
        ops_needed = ops_needed.saturating_add(checked_pow(size, n).unwrap_or(u128::MAX));
    }
    if ops_needed > MAX_OPERATIONS {
        return Err(ConstructionError::TooLarge {
            size: ops_needed,
            guard: MAX_OPERATIONS as u64,
        });
    }

    let mut labels = vec!["y".to_string()];
    // first[n] = index of z{n}_1_1.
    let mut first = vec![0usize; values.len()];
    for (n, &d) in values.iter().enumerate().skip(1) {
        first[n] = labels.len();
        for i in 1..=n {
            for j in 1..=d {
                labels.push(format!("z{n}_{i}_{j}"));
            }
        }
    }
    debug_assert_eq!(labels.len(), size);

    let mut ops = Vec::new();
    if values[0] == 0 {
        ops.push(Operation::constant("e", size, 0)?);
    }
    if values.len() > 1 && values[1] == 0 {
        for (e, label) in labels.iter().enumerate() {
            ops.push(Operation::constant(&format!("k_{label}"), size, e as u32)?);
        }
    }
    for (n, &d) in values.iter().enumerate().skip(1) {
        if d == 0 {
            continue;
        }
        let row =
            |i: usize| -> Vec<u32> { (0..d).map(|j| (first[n] + i * d + j) as u32).collect() };
        let count = size.pow(n as u32);
        for code in 0..count {
            let mut b = vec![0u32; n];
            let mut c = code;
            for slot in b.iter_mut().rev() {
                *slot = (c % size) as u32;
                c /= size;
            }
            let rows = (0..n).map(|i| (row(i), b[i]));
            ops.push(Operation::partial(&format!("F{n}_{code}"), d, size, rows)?);
        }
    }
    Ok(FiniteAlgebra::new(labels, ops)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::oracle_d;

    #[test]
    fn small_prescriptions() {
        for values in [vec![1, 1, 2], vec![0, 1, 1]] {
            let alg = prescribed_d(&values).unwrap();
            assert_eq!(alg.size(), prescribed_size(&values));
            for (n, d) in values.iter().enumerate() {
                assert_eq!(oracle_d(&alg, n).unwrap(), *d, "D = {values:?}, n = {n}");
            }
        }
        assert_eq!(prescribed_d(&[1, 1, 2]).unwrap().size(), 6);
        assert_eq!(prescribed_d(&[0, 1, 1]).unwrap().size(), 4);
    }

    #[test]
    fn naming_every_element() {
        let alg = prescribed_d(&[0, 0, 1]).unwrap();
        assert_eq!(alg.size(), 3);
        assert_eq!(oracle_d(&alg, 1).unwrap(), 0);
        assert_eq!(oracle_d(&alg, 2).unwrap(), 1);
    }

    #[test]
    fn preconditions() {
        assert!(prescribed_d(&[2, 3]).is_err());
        assert!(prescribed_d(&[1, 0]).is_err());
        assert!(prescribed_d(&[0, 0, 0]).is_err());
        assert!(prescribed_d(&[]).is_err());
    }
}
