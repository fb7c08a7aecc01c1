//! JSON algebra files.
//!
//! ```json
//! {"universe": ["0", "1"],
//!  "operations": {"+": {"arity": 2, "total": true, "table": [0, 1, 1, 0]},
//!                 "F": {"arity": 2, "total": false, "table": [[0, 1, 1], [1, 0, 1]]}}}
//! ```
//!
//! Tables are index-based. A row `[a1, ..., ak, v]` sets the value at
//! `(a1, ..., ak)`; a total operation may instead give a flat value array in
//! row-major argument order. Operation order in the file is preserved.

use std::fmt;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::Value;

use super::{checked_pow, AlgebraError, FiniteAlgebra, Operation};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    universe: Vec<String>,
    #[serde(default)]
    operations: OpList,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OpSpec {
    arity: usize,
    #[serde(default = "default_total")]
    total: bool,
    table: Vec<Value>,
}

fn default_total() -> bool {
    true
}

#[derive(Default)]
struct OpList(Vec<(String, OpSpec)>);

impl<'de> Deserialize<'de> for OpList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OpList;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from operation names to operation tables")
            }
            fn visit_map<M: MapAccess<'de>>(self, mut m: M) -> Result<OpList, M::Error> {
                let mut out: Vec<(String, OpSpec)> = Vec::new();
                while let Some((k, v)) = m.next_entry::<String, OpSpec>()? {
                    if out.iter().any(|(n, _)| *n == k) {
                        return Err(de::Error::custom(format!("duplicate operation `{k}`")));
                    }
                    out.push((k, v));
                }
                Ok(OpList(out))
            }
        }
        d.deserialize_map(V)
    }
}

fn index(v: &Value, name: &str) -> Result<u32, AlgebraError> {
    v.as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| {
            AlgebraError::Invalid(format!("operation `{name}`: `{v}` is not an element index"))
        })
}

pub fn from_json_str(text: &str) -> Result<FiniteAlgebra, AlgebraError> {
    let file: AlgebraFile = serde_json::from_str(text)?;
    let base = file.universe.len();
    let mut ops = Vec::new();
    for (name, spec) in file.operations.0 {
        let flat = spec.table.iter().all(|v| !v.is_array());
        let op = if flat && !spec.table.is_empty() {
            if !spec.total {
                return Err(AlgebraError::Invalid(format!(
                    "operation `{name}`: a flat table is only allowed for total operations"
                )));
            }
            let values = spec
                .table
                .iter()
                .map(|v| index(v, &name))
                .collect::<Result<Vec<_>, _>>()?;
            Operation::total(&name, spec.arity, base, values)?
        } else {
            let mut rows = Vec::with_capacity(spec.table.len());
            for row in &spec.table {
                let Some(items) = row.as_array() else {
                    return Err(AlgebraError::Invalid(format!(
                        "operation `{name}`: mixed flat and row entries"
                    )));
                };
                if items.len() != spec.arity + 1 {
                    return Err(AlgebraError::Invalid(format!(
                        "operation `{name}`: row {row} should have {} entries",
                        spec.arity + 1
                    )));
                }
                let vals = items
                    .iter()
                    .map(|v| index(v, &name))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push((vals[..spec.arity].to_vec(), vals[spec.arity]));
            }
            let op = Operation::partial(&name, spec.arity, base, rows)?;
            if spec.total && !op.is_total() {
                let want = checked_pow(base, spec.arity).unwrap_or(u128::MAX);
                return Err(AlgebraError::Invalid(format!(
                    "operation `{name}` is marked total but defines {} of {want} entries",
                    op.domain_size()
                )));
            }
            op
        };
        ops.push(op);
    }
    FiniteAlgebra::new(file.universe, ops)
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text: one operation per line, total tables flat, partial tables
/// as rows in argument order.
pub fn to_json_string(alg: &FiniteAlgebra) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!(
        "  \"universe\": [{}],\n",
        join(alg.universe().iter().map(|l| json_str(l)))
    ));
    out.push_str("  \"operations\": {");
    let n = alg.operations().len();
    for (i, op) in alg.operations().iter().enumerate() {
        let table = match op.dense_values() {
            Some(values) => join(values),
            None => join(op.entries().into_iter().map(|(mut args, v)| {
                args.push(v);
                format!("[{}]", join(args))
            })),
        };
        out.push_str(&format!(
            "\n    {}: {{\"arity\": {}, \"total\": {}, \"table\": [{}]}}{}",
            json_str(op.name()),
            op.arity(),
            op.is_total(),
            table,
            if i + 1 < n { "," } else { "\n  " }
        ));
    }
    out.push_str("}\n}\n");
    out
}
