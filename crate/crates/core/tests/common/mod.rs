//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use std::ops::RangeInclusive;
use std::path::PathBuf;

use algebra_growth::algebra::{from_json_str, FiniteAlgebra, Operation};
use algebra_growth::sig::{parse_theory, Theory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn algebra(name: &str) -> FiniteAlgebra {
    let text = std::fs::read_to_string(data_path(name)).expect("data file");
    from_json_str(&text).expect("valid algebra")
}

pub fn theory(name: &str) -> Theory {
    let text = std::fs::read_to_string(data_path(name)).expect("data file");
    parse_theory(&text).expect("valid theory")
}

/// A random algebra with `sizes` elements and one or two operations of
/// arity 1..=max_arity. With `partial`, each table entry is present with
/// probability 2/3; a nullary operation is added with probability 1/5.
pub fn random_algebra(
    seed: u64,
    sizes: RangeInclusive<usize>,
    max_arity: usize,
    partial: bool,
) -> FiniteAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.random_range(sizes);
    let mut ops = Vec::new();
    for i in 0..rng.random_range(1..=2) {
        let arity = rng.random_range(1..=max_arity);
        let cells = size.pow(arity as u32) as u64;
        let mut rows = Vec::new();
        for code in 0..cells {
            if partial && rng.random_range(0..3) == 0 {
                continue;
            }
            let mut args = vec![0u32; arity];
            let mut c = code;
            for a in args.iter_mut().rev() {
                *a = (c % size as u64) as u32;
                c /= size as u64;
            }
            rows.push((args, rng.random_range(0..size as u32)));
        }
        ops.push(Operation::partial(&format!("f{i}"), arity, size, rows).expect("valid rows"));
    }
    if rng.random_range(0..5) == 0 {
        ops.push(
            Operation::constant("c", size, rng.random_range(0..size as u32))
                .expect("valid constant"),
        );
    }
    FiniteAlgebra::numbered(size, ops).expect("valid algebra")
}
