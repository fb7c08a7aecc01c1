//! Exponential growth certificates along a chain of implication algebras:
//! exactly the ones without a least element are certified.

use algebra_growth::constructions::implication_algebra;
use algebra_growth::ideals::{certify_exponential, verify_lower_bound};

fn main() -> anyhow::Result<()> {
    let chain: [&[&str]; 4] = [
        &["0", "1"],
        &["01", "10", "11"],
        &["00", "01", "10", "11"],
        &["100", "110", "101", "011", "111"],
    ];
    for (i, filter) in chain.iter().enumerate() {
        let alg = implication_algebra(filter)?;
        match certify_exponential(&alg)? {
            None => println!("A_{}: no certificate", i + 1),
            Some(cert) => {
                let label = |s: &std::collections::BTreeSet<u32>| {
                    s.iter()
                        .map(|e| alg.label(*e))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                println!(
                    "A_{}: selector {:?}, I = {{{}}}, J = {{{}}}",
                    i + 1,
                    cert.selector.places,
                    label(&cert.i),
                    label(&cert.j)
                );
                for n in 1..=2 {
                    let c = verify_lower_bound(&alg, &cert, n, None)?;
                    println!("  n={n}: d = {} ≥ {}: {}", c.d, c.required, c.passed());
                }
            }
        }
    }
    Ok(())
}
