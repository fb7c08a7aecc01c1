//! Merging a bare set with a theory's finite model: the growth of the set
//! survives unless the theory forces a cube term.

use algebra_growth::algebra::{check_models, closure, from_json_str, PowerTuple};
use algebra_growth::constructions::sigma_merge;
use algebra_growth::growth::oracle_d;
use algebra_growth::sig::parse_theory;

fn main() -> anyhow::Result<()> {
    let bare = from_json_str(include_str!("../data/bare2.json"))?;
    let free = parse_theory(include_str!("../data/two_constants.eqn"))?;
    let (merged, interp) = sigma_merge(&bare, &free)?;
    println!(
        "two constants: size {}, models the theory: {}, d(1..=2) = {}, {}",
        merged.size(),
        check_models(&merged, &free, &interp)?,
        oracle_d(&merged, 1)?,
        oracle_d(&merged, 2)?
    );

    // With a Maltsev term, the tuples outside A^2 already generate everything.
    let maltsev = parse_theory(include_str!("../data/maltsev.eqn"))?;
    let (merged, _) = sigma_merge(&bare, &maltsev)?;
    let base = merged.size();
    let outside: Vec<PowerTuple> = (0..(base * base) as u64)
        .map(|c| PowerTuple::from_code(c, 2, base))
        .filter(|t| t.digits().iter().any(|&e| e as usize >= bare.size()))
        .collect();
    let generated = closure(&merged, 2, &outside)?.len();
    println!(
        "maltsev: size {}, d(2) = {}, tuples outside A^2 generate {generated} of {}",
        merged.size(),
        oracle_d(&merged, 2)?,
        base * base
    );
    Ok(())
}
