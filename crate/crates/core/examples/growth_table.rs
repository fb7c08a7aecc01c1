//! Exact d-functions with witnesses, the independent oracle, basic bounds and
//! the upper adjoint h.

use algebra_growth::algebra::{from_json_str, Guard};
use algebra_growth::growth::{check_bounds, growth_table, h_value, TableOptions};

fn main() -> anyhow::Result<()> {
    for (name, text) in [
        ("bare2", include_str!("../data/bare2.json")),
        ("z2", include_str!("../data/z2.json")),
        ("vee", include_str!("../data/vee.json")),
    ] {
        let alg = from_json_str(text)?;
        let opts = TableOptions {
            oracle: true,
            ..TableOptions::default()
        };
        let table = growth_table(&alg, name, 0..=4, opts)?;
        let values: Vec<String> = table.entries.iter().map(|e| e.d.to_string()).collect();
        let agree = table
            .entries
            .iter()
            .all(|e| e.oracle.is_none_or(|o| o == e.d));
        let bounds = check_bounds(&table, &alg);
        println!(
            "{name}: d(0..=4) = {}; oracle agrees: {agree}; bound violations: {}",
            values.join(","),
            bounds.violations.len()
        );
        println!("  h(4) = {:?}", h_value(&alg, 4, 4, Guard::default())?);
    }
    Ok(())
}
