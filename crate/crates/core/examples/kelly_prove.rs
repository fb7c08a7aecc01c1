//! Provability of basic identities, consistency, and the provability classes
//! behind both.

use algebra_growth::kelly::{consistent, proves, weak_closure};
use algebra_growth::sig::{large_enough_x, parse_theory};

fn main() -> anyhow::Result<()> {
    let unit = parse_theory(include_str!("../data/unit.eqn"))?;
    for q in ["B(1,1)=1", "B(x,1)=B(1,x)", "B(x,y)=B(y,x)", "B(x,1)=y"] {
        let phi = unit.parse_identity(q)?;
        println!("unit ⊢ {q}: {}", proves(&unit, &phi)?);
    }

    // A constant absorbing on one side and neutral on the other.
    let t = parse_theory("const c, d; fn B/2; B(c,x) = x; B(d,x) = d;")?;
    let phi = t.parse_identity("B(d,c)=d")?;
    println!("B(d,c)=d provable: {}", proves(&t, &phi)?);
    println!("consistent: {}", consistent(&t)?);
    println!("x=y consistent: {}", consistent(&parse_theory("x = y;")?)?);

    let x = large_enough_x(&unit, &[]);
    let closure = weak_closure(&unit, x)?;
    println!("classes of the unit theory over {x} variables:");
    print!("{}", closure.dump(&unit));
    Ok(())
}
