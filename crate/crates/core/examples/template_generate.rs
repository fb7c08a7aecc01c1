//! Polynomial-size generating sets of A^n from a pointed cube term.

use algebra_growth::algebra::{from_json_str, Guard};
use algebra_growth::cube::{CubeWitness, WitnessInterp};
use algebra_growth::template::{
    derive_r, one_pointed_bound, one_pointed_generators, polynomial_generators,
};

fn main() -> anyhow::Result<()> {
    let alg = from_json_str(include_str!("../data/nu12_total.json"))?;
    let constants = vec!["1".to_string()];
    let w = CubeWitness::from_json_str(include_str!("../data/nu_unit_witness.json"), &constants)?;
    let interp = WitnessInterp::by_name(&w, &alg)?;
    let r = derive_r(&w, &constants)?;
    for n in 3..=7 {
        let rep = polynomial_generators(&alg, &r, &interp, n, None, true, Guard::default())?;
        let one = one_pointed_generators(&alg, w.k(), n, None, true, Guard::default())?;
        println!(
            "n={n}: template {} ≤ {:.1} (generates: {:?}); one-pointed {} ≤ {} (generates: {:?})",
            rep.generators.len(),
            rep.bound,
            rep.generates,
            one.generators.len(),
            one_pointed_bound(n, w.k(), one.g),
            one.generates
        );
    }
    Ok(())
}
