//! Completing a partial algebra with an absorbing element keeps its d-function.

use algebra_growth::algebra::{from_json_str, one_point_completion};
use algebra_growth::growth::oracle_d;

fn main() -> anyhow::Result<()> {
    let partial = from_json_str(include_str!("../data/nu12_partial.json"))?;
    let total = one_point_completion(&partial, "0")?;
    println!(
        "partial size {}, completed size {}",
        partial.size(),
        total.size()
    );
    for n in 0..=5 {
        println!(
            "n={n}: d={} completed d={}",
            oracle_d(&partial, n)?,
            oracle_d(&total, n)?
        );
    }
    Ok(())
}
