//! Loading problem files.
//!
//! ```json
//! {
//!   "booleans": ["B1"],
//!   "reals": [{"name": "x", "lower": -10, "upper": 10}],
//!   "formula": {"op": "le", "lhs": {"var": "x"}, "rhs": {"const": 1}},
//!   "weight": {"op": "ite", "args": [{"var": "B1"}, {"var": "x"}, {"const": 1}]},
//!   "query": "wmi",
//!   "mc": {"samples": 100000, "seed": 42},
//!   "oracle": {"resolution": 1000}
//! }
//! ```

use serde_json::{Map, Value};

use crate::error::{Result, WmiError};
use crate::formula::json::parse_const;
use crate::formula::{parse_formula, JsonPath, RealVar, Universe};
use crate::measures::WeightSpec;
use crate::wmi::{Problem, Query};

const KEYS: [&str; 7] = ["booleans", "reals", "formula", "weight", "query", "mc", "oracle"];

pub fn parse_query(s: &str) -> Option<Query> {
    Some(match s {
        "wmc" => Query::Wmc,
        "wmi" => Query::Wmi,
        "validate-pdf" => Query::ValidatePdf,
        "factorize" => Query::Factorize,
        "check-identities" => Query::CheckIdentities,
        _ => return None,
    })
}

fn u64_field(obj: &Map<String, Value>, key: &str, path: &JsonPath) -> Result<Option<u64>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| path.key(key).error(format!("expected a non-negative integer, found {v}"))),
    }
}

fn universe(obj: &Map<String, Value>) -> Result<Universe> {
    let root = JsonPath::root("problem");
    let booleans = match obj.get("booleans") {
        None => Vec::new(),
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| root.key("booleans").index(i).error("expected a name"))
            })
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(root.key("booleans").error("expected an array of names")),
    };
    let reals = match obj.get("reals") {
        None => Vec::new(),
        Some(Value::Array(a)) => a
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let path = root.key("reals").index(i);
                let o = v.as_object().ok_or_else(|| path.error("expected an object"))?;
                let name = o
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| path.error("missing `name`"))?;
                let bound = |k: &str| -> Result<_> {
                    let b = o
                        .get(k)
                        .ok_or_else(|| path.error(format!("missing `{k}`; every real needs finite bounds")))?;
                    parse_const(b, &path.key(k))
                };
                Ok(RealVar {
                    name: name.to_string(),
                    lower: bound("lower")?,
                    upper: bound("upper")?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(root.key("reals").error("expected an array")),
    };
    Universe::new(booleans, reals)
}

/// Parses a problem document. Command-line options override `query`, `mc`
/// and `oracle` afterwards.
pub fn parse_problem(v: &Value) -> Result<Problem> {
    let root = JsonPath::root("problem");
    let obj = v
        .as_object()
        .ok_or_else(|| root.error("a problem must be a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(root.key(k).error("unknown key"));
    }
    let u = universe(obj)?;
    let formula = parse_formula(
        obj.get("formula").ok_or_else(|| root.error("missing `formula`"))?,
        &u,
        &JsonPath::root("formula"),
    )?;
    let weight = match obj.get("weight") {
        None => WeightSpec::one(&u),
        Some(w) => WeightSpec::parse(w, &u, &JsonPath::root("weight"))?,
    };
    let mut p = Problem::new(u, formula, weight)?;
    if let Some(q) = obj.get("query") {
        let s = q.as_str().unwrap_or_default();
        p.query = parse_query(s).ok_or_else(|| root.key("query").error(format!("unknown query {q}")))?;
    }
    if let Some(mc) = obj.get("mc") {
        let path = root.key("mc");
        let mc = mc.as_object().ok_or_else(|| path.error("expected an object"))?;
        if let Some(n) = u64_field(mc, "samples", &path)? {
            p.settings.mc_samples = n;
        }
        if let Some(s) = u64_field(mc, "seed", &path)? {
            p.settings.seed = s;
        }
    }
    if let Some(o) = obj.get("oracle") {
        let path = root.key("oracle");
        let o = o.as_object().ok_or_else(|| path.error("expected an object"))?;
        p.oracle_resolution = u64_field(o, "resolution", &path)?.map(|r| r as usize);
    }
    Ok(p)
}

/// Parses problem text, reporting JSON syntax errors by line and column.
pub fn parse_problem_str(text: &str) -> Result<Problem> {
    let v: Value = serde_json::from_str(text).map_err(|e| WmiError::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    parse_problem(&v)
}
