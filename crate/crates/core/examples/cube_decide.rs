//! Decide pointed cube terms for a few theories and check one witness in a
//! concrete algebra.

use algebra_growth::algebra::from_json_str;
use algebra_growth::cube::{decide_pointed_cube, verify_witness, CubeWitness, WitnessInterp};
use algebra_growth::sig::parse_theory;

fn main() -> anyhow::Result<()> {
    let theories = [
        ("maltsev", include_str!("../data/maltsev.eqn")),
        ("unit", include_str!("../data/unit.eqn")),
        ("majority", include_str!("../data/majority.eqn")),
        ("two constants", include_str!("../data/two_constants.eqn")),
    ];
    for (name, text) in theories {
        let theory = parse_theory(text)?;
        let d = decide_pointed_cube(&theory)?;
        match &d.witness {
            Some(w) => println!(
                "{name}: {}-ary, {}-pointed, {}-cube term {}: {}",
                w.m(),
                w.p(),
                w.k(),
                w.symbol,
                w.row_strings().join(" ")
            ),
            None => println!("{name}: no pointed cube term"),
        }
    }

    // x - y + z in Z2 interprets the Maltsev rows.
    let z2 = from_json_str(include_str!("../data/z2.json"))?;
    let w = CubeWitness::from_json_str(include_str!("../data/z2_maltsev_witness.json"), &[])?;
    let interp = WitnessInterp::by_name(&w, &z2)?;
    println!(
        "Z2 satisfies the Maltsev rows: {}",
        verify_witness(&w, &z2, &interp)?
    );
    Ok(())
}
