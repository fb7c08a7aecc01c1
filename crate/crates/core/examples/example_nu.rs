//! A partial near-unanimity operation whose d-function is a polynomial of
//! degree k - 1, and its total version with one constant.

use algebra_growth::algebra::Guard;
use algebra_growth::constructions::{example_nu, nu_formula};
use algebra_growth::growth::d_exact;

fn main() -> anyhow::Result<()> {
    for (q, k) in [(1, 2), (2, 2), (1, 3)] {
        let (partial, total) = example_nu(q, k)?;
        for n in 1..=6 {
            let p = d_exact(&partial, n, Guard::default())?.value;
            let t = d_exact(&total, n, Guard::default())?.value;
            println!(
                "q={q} k={k} n={n}: partial {p}, total {t}, formula {}",
                nu_formula(q, k, n)
            );
        }
    }
    Ok(())
}
