//! JSON graph file format.
//!
//! ```json
//! {
//!   "alphabet": [-1, 1],
//!   "singletons": [[1, 3], [1, 1]],
//!   "pairwise": [{"i": 0, "j": 1, "table": [[2, 1], [1, 2]]}]
//! }
//! ```
//!
//! Tables are linear-domain and strictly positive. `pairwise` may be omitted
//! for graphs without couplings.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{Alphabet, FactorGraph, PairwiseSpec};

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        message: message.into(),
    }
}

fn number_array(value: &Value, field: &str) -> Result<Vec<f64>> {
    let arr = value
        .as_array()
        .ok_or_else(|| parse_err(field, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(n, v)| {
            v.as_f64()
                .ok_or_else(|| parse_err(format!("{field}[{n}]"), "expected a number"))
        })
        .collect()
}

fn index(value: &Value, field: &str) -> Result<usize> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| parse_err(field, "expected a non-negative integer"))
}

/// Parses a graph document. Errors name the offending field.
pub fn parse_graph(text: &str) -> Result<FactorGraph> {
    let doc: Value = serde_json::from_str(text).map_err(|e| parse_err("<document>", e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| parse_err("<document>", "expected a top-level object"))?;

    let alphabet = obj
        .get("alphabet")
        .ok_or_else(|| parse_err("alphabet", "missing required field"))?;
    let alphabet = Alphabet::new(number_array(alphabet, "alphabet")?)
        .map_err(|e| parse_err("alphabet", e.to_string()))?;

    let singletons = obj
        .get("singletons")
        .ok_or_else(|| parse_err("singletons", "missing required field"))?
        .as_array()
        .ok_or_else(|| parse_err("singletons", "expected an array of tables"))?
        .iter()
        .enumerate()
        .map(|(n, t)| number_array(t, &format!("singletons[{n}]")))
        .collect::<Result<Vec<_>>>()?;

    let mut pairwise = Vec::new();
    if let Some(p) = obj.get("pairwise") {
        let arr = p
            .as_array()
            .ok_or_else(|| parse_err("pairwise", "expected an array of factors"))?;
        for (n, f) in arr.iter().enumerate() {
            let field = format!("pairwise[{n}]");
            let f = f
                .as_object()
                .ok_or_else(|| parse_err(&field, "expected an object with i, j, table"))?;
            let get = |key: &str| {
                f.get(key)
                    .ok_or_else(|| parse_err(format!("{field}.{key}"), "missing required field"))
            };
            let i = index(get("i")?, &format!("{field}.i"))?;
            let j = index(get("j")?, &format!("{field}.j"))?;
            let table = get("table")?
                .as_array()
                .ok_or_else(|| parse_err(format!("{field}.table"), "expected an array of rows"))?
                .iter()
                .enumerate()
                .map(|(r, row)| number_array(row, &format!("{field}.table[{r}]")))
                .collect::<Result<Vec<_>>>()?;
            pairwise.push(PairwiseSpec { i, j, table });
        }
    }

    FactorGraph::new(alphabet, singletons, pairwise)
}

#[derive(Serialize)]
struct GraphDoc<'a> {
    alphabet: &'a [f64],
    singletons: Vec<Vec<f64>>,
    pairwise: Vec<PairwiseSpec>,
}

fn shifted(log_table: &[f64], what: impl Fn() -> String) -> Result<Vec<f64>> {
    let max = log_table.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    log_table
        .iter()
        .map(|l| {
            let v = (l - max).exp();
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::NonPositiveEntry { what: what(), value: v })
            }
        })
        .collect()
}

/// Serializes a graph to the JSON file format.
///
/// Each table is rescaled so its largest entry is 1, which leaves the
/// distribution unchanged. Fails if a rescaled entry underflows to zero.
pub fn write_graph(graph: &FactorGraph) -> Result<String> {
    let a = graph.alphabet().len();
    let singletons = graph
        .singletons()
        .iter()
        .map(|f| shifted(f.log_table(), || format!("singleton {}", f.variable())))
        .collect::<Result<Vec<_>>>()?;
    let pairwise = graph
        .pairwise()
        .iter()
        .map(|t| {
            let flat = shifted(t.log_table(), || format!("pairwise factor {}", t.id()))?;
            let (i, j) = t.endpoints();
            Ok(PairwiseSpec {
                i,
                j,
                table: flat.chunks(a).map(<[f64]>::to_vec).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = GraphDoc {
        alphabet: graph.alphabet().values(),
        singletons,
        pairwise,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))
}
