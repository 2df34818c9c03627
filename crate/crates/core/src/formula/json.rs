//! The JSON expression grammar shared by problem files and the CLI.
//!
//! Arithmetic: `{"var":x}`, `{"const":"1/2"}`, `{"op":"add"|"mul"|"neg"|"pow","args":[..]}`.
//! Atoms: `{"op":"le"|"lt"|"ge"|"gt","lhs":e,"rhs":e}`.
//! Logic: `{"op":"and"|"or"|"not","args":[..]}`, `{"op":"true"}`, `{"op":"false"}`.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Map, Value};

use super::{Formula, Universe};
use crate::error::{Result, WmiError};
use crate::polynomial::Polynomial;
use crate::rational::{parse_rational, Rational};

/// A JSON-pointer-like location used in error messages.
#[derive(Debug, Clone, Default)]
pub struct JsonPath(Vec<String>);

impl JsonPath {
    pub fn root(name: &str) -> Self {
        JsonPath(vec![name.to_string()])
    }

    pub fn key(&self, k: &str) -> Self {
        let mut p = self.0.clone();
        p.push(k.to_string());
        JsonPath(p)
    }

    pub fn index(&self, i: usize) -> Self {
        self.key(&i.to_string())
    }

    pub fn error(&self, message: impl Into<String>) -> WmiError {
        WmiError::parse(self.to_string(), message)
    }
}

impl fmt::Display for JsonPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}", self.0.join("/"))
    }
}

pub(crate) fn as_object<'a>(v: &'a Value, path: &JsonPath) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| path.error(format!("expected an object, found {v}")))
}

pub(crate) fn op_of<'a>(obj: &'a Map<String, Value>, path: &JsonPath) -> Result<Option<&'a str>> {
    match obj.get("op") {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.as_str())),
        Some(other) => Err(path.key("op").error(format!("expected a string, found {other}"))),
    }
}

/// The `args` array of an operator node.
pub(crate) fn args_of<'a>(obj: &'a Map<String, Value>, path: &JsonPath) -> Result<&'a [Value]> {
    match obj.get("args") {
        Some(Value::Array(a)) => Ok(a),
        Some(other) => Err(path.key("args").error(format!("expected an array, found {other}"))),
        None => Err(path.error("missing `args`")),
    }
}

pub(crate) fn exactly<'a>(args: &'a [Value], n: usize, op: &str, path: &JsonPath) -> Result<&'a [Value]> {
    if args.len() != n {
        return Err(path.error(format!("`{op}` takes {n} argument(s), got {}", args.len())));
    }
    Ok(args)
}

/// Reads a rational from a JSON number or string.
pub(crate) fn parse_const(v: &Value, path: &JsonPath) -> Result<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(path.error(format!("expected a rational constant, found {other}"))),
    };
    parse_rational(&text).ok_or_else(|| path.error(format!("malformed rational `{text}`")))
}

/// Reads a non-negative integer exponent from a `pow` node.
pub(crate) fn parse_exponent(v: &Value, path: &JsonPath) -> Result<u32> {
    let obj = as_object(v, path)?;
    let c = obj
        .get("const")
        .ok_or_else(|| path.error("`pow` exponent must be a constant"))?;
    let r = parse_const(c, &path.key("const"))?;
    if !r.is_integer() || r.is_negative() {
        return Err(path.error(format!("`pow` exponent must be a non-negative integer, got {r}")));
    }
    r.to_integer()
        .to_u32()
        .ok_or_else(|| path.error("`pow` exponent too large"))
}

/// Parses an arithmetic expression over the universe's real variables.
pub fn parse_arith(v: &Value, u: &Universe, path: &JsonPath) -> Result<Polynomial> {
    let n = u.num_reals();
    let obj = as_object(v, path)?;
    if let Some(name) = obj.get("var") {
        let name = name
            .as_str()
            .ok_or_else(|| path.key("var").error("variable name must be a string"))?;
        return match u.real_index(name) {
            Some(i) => Ok(Polynomial::var(n, i)),
            None if u.boolean_index(name).is_some() => Err(path.error(format!(
                "Boolean variable `{name}` used in an arithmetic expression"
            ))),
            None => Err(WmiError::UndeclaredVariable(name.to_string())),
        };
    }
    if let Some(c) = obj.get("const") {
        return Ok(Polynomial::constant(n, parse_const(c, &path.key("const"))?));
    }
    let op = op_of(obj, path)?.ok_or_else(|| path.error("expected `var`, `const` or `op`"))?;
    match op {
        "add" | "mul" => {
            let args = args_of(obj, path)?;
            if args.is_empty() {
                return Err(path.error(format!("`{op}` needs at least one argument")));
            }
            let mut acc: Option<Polynomial> = None;
            for (i, a) in args.iter().enumerate() {
                let p = parse_arith(a, u, &path.key("args").index(i))?;
                acc = Some(match acc {
                    None => p,
                    Some(prev) if op == "add" => &prev + &p,
                    Some(prev) => &prev * &p,
                });
            }
            Ok(acc.unwrap())
        }
        "neg" => {
            let args = exactly(args_of(obj, path)?, 1, op, path)?;
            Ok(-&parse_arith(&args[0], u, &path.key("args").index(0))?)
        }
        "pow" => {
            let args = exactly(args_of(obj, path)?, 2, op, path)?;
            let base = parse_arith(&args[0], u, &path.key("args").index(0))?;
            let k = parse_exponent(&args[1], &path.key("args").index(1))?;
            Ok(base.pow(k))
        }
        other => Err(path.error(format!("unknown arithmetic operator `{other}`"))),
    }
}

/// Parses a logic node into a formula.
pub fn parse_formula(v: &Value, u: &Universe, path: &JsonPath) -> Result<Formula> {
    let obj = as_object(v, path)?;
    if let Some(name) = obj.get("var") {
        let name = name
            .as_str()
            .ok_or_else(|| path.key("var").error("variable name must be a string"))?;
        return match u.boolean_index(name) {
            Some(i) => Ok(Formula::Var(i)),
            None if u.real_index(name).is_some() => Err(path.error(format!(
                "real variable `{name}` used as a formula"
            ))),
            None => Err(WmiError::UndeclaredVariable(name.to_string())),
        };
    }
    if obj.contains_key("const") {
        return Err(path.error("a constant is not a formula"));
    }
    let op = op_of(obj, path)?.ok_or_else(|| path.error("expected `var` or `op`"))?;
    let side = |key: &str| -> Result<Polynomial> {
        let e = obj
            .get(key)
            .ok_or_else(|| path.error(format!("`{op}` needs `{key}`")))?;
        parse_arith(e, u, &path.key(key))
    };
    match op {
        "true" => Ok(Formula::True),
        "false" => Ok(Formula::False),
        "and" | "or" => {
            let args = args_of(obj, path)?;
            let kids = args
                .iter()
                .enumerate()
                .map(|(i, a)| parse_formula(a, u, &path.key("args").index(i)))
                .collect::<Result<Vec<_>>>()?;
            Ok(if op == "and" {
                Formula::and(kids)
            } else {
                Formula::or(kids)
            })
        }
        "not" => {
            let args = exactly(args_of(obj, path)?, 1, op, path)?;
            Ok(Formula::not(parse_formula(&args[0], u, &path.key("args").index(0))?))
        }
        // Strict and non-strict comparisons differ on a null set only.
        "le" | "lt" => Ok(Formula::le(&side("lhs")?, &side("rhs")?)),
        "ge" | "gt" => Ok(Formula::le(&side("rhs")?, &side("lhs")?)),
        "eq" => Err(path.error(
            "equality atoms denote measure-zero sets and are not supported",
        )),
        other => Err(path.error(format!("unknown logical operator `{other}`"))),
    }
}

/// Parses formula text, reporting JSON syntax errors by line and column.
pub fn parse_formula_str(text: &str, u: &Universe) -> Result<Formula> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        WmiError::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    parse_formula(&v, u, &JsonPath::root("formula"))
}

fn rational_json(r: &Rational) -> Value {
    json!({ "const": r.to_string() })
}

pub fn serialize_polynomial(p: &Polynomial, u: &Universe) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| {
            let mut factors = Vec::new();
            let has_vars = e.iter().any(|&k| k > 0);
            if !c.is_one() || !has_vars {
                factors.push(rational_json(c));
            }
            for (i, &k) in e.iter().enumerate() {
                let var = json!({ "var": u.reals()[i].name });
                match k {
                    0 => {}
                    1 => factors.push(var),
                    _ => factors.push(json!({"op": "pow", "args": [var, {"const": k.to_string()}]})),
                }
            }
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                json!({"op": "mul", "args": factors})
            }
        })
        .collect();
    match terms.len() {
        0 => json!({"const": "0"}),
        1 => terms.into_iter().next().unwrap(),
        _ => json!({"op": "add", "args": terms}),
    }
}

pub fn serialize_formula(f: &Formula, u: &Universe) -> Value {
    match f {
        Formula::True => json!({"op": "true"}),
        Formula::False => json!({"op": "false"}),
        Formula::Var(i) => json!({"var": u.booleans()[*i]}),
        Formula::Atom(a) => json!({
            "op": "le",
            "lhs": serialize_polynomial(a.expr(), u),
            "rhs": {"const": "0"},
        }),
        Formula::Not(c) => json!({"op": "not", "args": [serialize_formula(c, u)]}),
        Formula::And(cs) => json!({
            "op": "and",
            "args": cs.iter().map(|c| serialize_formula(c, u)).collect::<Vec<_>>(),
        }),
        Formula::Or(cs) => json!({
            "op": "or",
            "args": cs.iter().map(|c| serialize_formula(c, u)).collect::<Vec<_>>(),
        }),
    }
}
