//! A finite partial algebra realizing a prescribed initial segment of d.

use algebra_growth::constructions::{prescribed_d, prescribed_size};
use algebra_growth::growth::oracle_d;

fn main() -> anyhow::Result<()> {
    for values in [vec![1, 1, 2], vec![0, 1, 1], vec![1, 2, 2, 3]] {
        let alg = prescribed_d(&values)?;
        let d = (0..values.len())
            .map(|n| oracle_d(&alg, n))
            .collect::<Result<Vec<_>, _>>()?;
        println!(
            "D = {values:?}: {} elements (expected {}), {} operations, d = {d:?}",
            alg.size(),
            prescribed_size(&values),
            alg.operations().len()
        );
    }
    Ok(())
}
