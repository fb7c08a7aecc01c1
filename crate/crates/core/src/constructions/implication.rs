use crate::algebra::{FiniteAlgebra, Operation};

use super::ConstructionError;

/// Reads a bit string such as `"101"` (most significant first).
pub fn parse_bits(text: &str) -> Result<u64, ConstructionError> {
    if text.is_empty() || text.len() > 63 || !text.chars().all(|c| c == '0' || c == '1') {
        return Err(ConstructionError::Precondition(format!(
            "`{text}` is not a bit string of length 1..=63"
        )));
    }
    Ok(u64::from_str_radix(text, 2).expect("checked digits"))
}

/// The implication algebra on an order filter of the Boolean cube `2^k`,
/// with `x → y = x' ∨ y`. Elements are the filter's bit strings in
/// increasing lexicographic order; the operation is named `imp`.
pub fn implication_algebra(filter: &[&str]) -> Result<FiniteAlgebra, ConstructionError> {
    let pre = |m: String| Err(ConstructionError::Precondition(m));
    let Some(first) = filter.first() else {
        return pre("the filter must be nonempty".into());
    };
    let k = first.len();
    let mut elems: Vec<(String, u64)> = Vec::new();
    for s in filter {
        if s.len() != k {
            return pre(format!("`{s}` does not have length {k}"));
        }
        let bits = parse_bits(s)?;
        if elems.iter().any(|(_, b)| *b == bits) {
            return pre(format!("`{s}` is listed twice"));
        }
        elems.push((s.to_string(), bits));
    }
    elems.sort();
    let mask = (1u64 << k) - 1;
    let index = |b: u64| elems.iter().position(|(_, e)| *e == b);
    for (s, b) in &elems {
        for i in 0..k {
            if index(b | (1 << i)).is_none() {
                return pre(format!(
                    "not an order filter: `{s}` has an upper cover outside"
                ));
            }
        }
    }
    let size = elems.len();
    let mut table = Vec::with_capacity(size * size);
    for (xs, x) in &elems {
        for (ys, y) in &elems {
            match index((!x | y) & mask) {
                Some(v) => table.push(v as u32),
                None => return pre(format!("not closed under implication: `{xs}` → `{ys}`")),
            }
        }
    }
    let labels = elems.into_iter().map(|(s, _)| s).collect();
    Ok(FiniteAlgebra::new(
        labels,
        vec![Operation::total("imp", 2, size, table)?],
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let chain = implication_algebra(&["1", "0"]).unwrap();
        assert_eq!(chain.universe(), ["0", "1"]);
        assert_eq!(chain.operations()[0].apply(&[1, 0]).unwrap(), Some(0));
        assert_eq!(chain.operations()[0].apply(&[0, 0]).unwrap(), Some(1));

        let vee = implication_algebra(&["01", "10", "11"]).unwrap();
        assert_eq!(vee.size(), 3);
        assert_eq!(vee.operations()[0].apply(&[0, 1]).unwrap(), Some(1));

        let cube = implication_algebra(&["00", "01", "10", "11"]).unwrap();
        assert_eq!(cube.size(), 4);

        let a4 = implication_algebra(&["100", "110", "101", "011", "111"]).unwrap();
        assert_eq!(a4.size(), 5);
    }

    #[test]
    fn rejects_non_filters() {
        assert!(implication_algebra(&["01", "11", "00"]).is_err());
        assert!(implication_algebra(&["01"]).is_err());
        assert!(implication_algebra(&["01", "1"]).is_err());
        assert!(implication_algebra(&[]).is_err());
        assert!(implication_algebra(&["2"]).is_err());
    }
}
