//! The models M and V: M refutes every unprovable basic identity under its
//! canonical valuation, and V is a finite model of any size above |C|.

use algebra_growth::algebra::check_models;
use algebra_growth::constructions::{model_m, model_v};
use algebra_growth::sig::parse_theory;

fn main() -> anyhow::Result<()> {
    let maltsev = parse_theory(include_str!("../data/maltsev.eqn"))?;
    let m = model_m(&maltsev)?;
    let interp = m.interpretation(&maltsev)?;
    let phi = maltsev.parse_identity("m(x,y,x)=x")?;
    let val = m.canonical_valuation();
    let lhs = interp.eval_term(&m.algebra, &phi.lhs, &val);
    let rhs = interp.eval_term(&m.algebra, &phi.rhs, &val);
    println!(
        "M has {} elements, models Σ: {}, m(x,y,x) and x differ: {}",
        m.algebra.size(),
        check_models(&m.algebra, &maltsev, &interp)?,
        lhs != rhs
    );

    let two = parse_theory(include_str!("../data/two_constants.eqn"))?;
    for y in 1..=3 {
        let v = model_v(&two, y)?;
        let interp = v.interpretation(&two)?;
        println!(
            "V with |Y|={y}: {} elements, models Σ: {}",
            v.algebra.size(),
            check_models(&v.algebra, &two, &interp)?
        );
    }
    Ok(())
}
