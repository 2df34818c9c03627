//! Weight functions `w: B^M × R^N → R≥0` as expression trees.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::Value;

use crate::boolean_engine::{AssignmentWeight, LiteralWeights};
use crate::error::{Result, WmiError};
use crate::formula::json::{args_of, as_object, exactly, op_of, parse_const, parse_exponent};
use crate::formula::{
    parse_formula, Assignment, Atom, FloatFormula, FloatPoly, Formula, JsonPath, Universe,
};
use crate::polynomial::Polynomial;
use crate::rational::{to_f64, Rational};

pub type BlackBoxFn = dyn Fn(&[bool], &[f64]) -> f64 + Send + Sync;

/// An opaque evaluator, usable only by the sampling backends.
#[derive(Clone)]
pub struct BlackBox {
    pub name: String,
    f: Arc<BlackBoxFn>,
}

impl BlackBox {
    pub fn new(name: impl Into<String>, f: impl Fn(&[bool], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        BlackBox {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn call(&self, b: &[bool], x: &[f64]) -> f64 {
        (self.f)(b, x)
    }
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlackBox({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub enum WeightExpr {
    Const(Rational),
    /// A real variable by index.
    Var(usize),
    Add(Vec<WeightExpr>),
    Mul(Vec<WeightExpr>),
    Neg(Box<WeightExpr>),
    Pow(Box<WeightExpr>, u32),
    Ite(Box<Formula>, Box<WeightExpr>, Box<WeightExpr>),
    Exp(Box<WeightExpr>),
    BlackBox(BlackBox),
}

impl WeightExpr {
    pub fn constant(c: Rational) -> Self {
        WeightExpr::Const(c)
    }

    pub fn ite(cond: Formula, then: WeightExpr, otherwise: WeightExpr) -> Self {
        WeightExpr::Ite(Box::new(cond), Box::new(then), Box::new(otherwise))
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        let terms: Vec<WeightExpr> = p
            .terms()
            .map(|(e, c)| {
                let mut factors = vec![WeightExpr::Const(c.clone())];
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => factors.push(WeightExpr::Var(i)),
                        _ => factors.push(WeightExpr::Pow(Box::new(WeightExpr::Var(i)), k)),
                    }
                }
                WeightExpr::Mul(factors)
            })
            .collect();
        if terms.is_empty() {
            WeightExpr::Const(Rational::zero())
        } else {
            WeightExpr::Add(terms)
        }
    }

    fn children(&self) -> Vec<&WeightExpr> {
        match self {
            WeightExpr::Const(_) | WeightExpr::Var(_) | WeightExpr::BlackBox(_) => vec![],
            WeightExpr::Add(cs) | WeightExpr::Mul(cs) => cs.iter().collect(),
            WeightExpr::Neg(c) | WeightExpr::Pow(c, _) | WeightExpr::Exp(c) => vec![c],
            WeightExpr::Ite(_, a, b) => vec![a, b],
        }
    }

    fn any(&self, pred: &dyn Fn(&WeightExpr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    fn conditions<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        if let WeightExpr::Ite(c, _, _) = self {
            out.push(c);
        }
        for c in self.children() {
            c.conditions(out);
        }
    }

    fn max_real(&self) -> Option<usize> {
        let own = match self {
            WeightExpr::Var(i) => Some(*i),
            _ => None,
        };
        self.children()
            .into_iter()
            .filter_map(WeightExpr::max_real)
            .chain(own)
            .max()
    }

    /// Upper bound on the total degree of every polynomial piece.
    fn degree(&self) -> Option<u32> {
        Some(match self {
            WeightExpr::Const(_) => 0,
            WeightExpr::Var(_) => 1,
            WeightExpr::Add(cs) => cs.iter().map(|c| c.degree()).collect::<Option<Vec<_>>>()?.into_iter().max().unwrap_or(0),
            WeightExpr::Mul(cs) => cs.iter().map(|c| c.degree()).sum::<Option<u32>>()?,
            WeightExpr::Neg(c) => c.degree()?,
            WeightExpr::Pow(c, k) => c.degree()? * k,
            WeightExpr::Ite(_, a, b) => a.degree()?.max(b.degree()?),
            WeightExpr::Exp(_) | WeightExpr::BlackBox(_) => return None,
        })
    }

    fn condition(&self, b: &Assignment) -> WeightExpr {
        match self {
            WeightExpr::Ite(c, t, e) => {
                let cond = crate::formula::condition_on(c, b);
                match cond {
                    Formula::True => t.condition(b),
                    Formula::False => e.condition(b),
                    cond => WeightExpr::ite(cond, t.condition(b), e.condition(b)),
                }
            }
            WeightExpr::Add(cs) => WeightExpr::Add(cs.iter().map(|c| c.condition(b)).collect()),
            WeightExpr::Mul(cs) => WeightExpr::Mul(cs.iter().map(|c| c.condition(b)).collect()),
            WeightExpr::Neg(c) => WeightExpr::Neg(Box::new(c.condition(b))),
            WeightExpr::Pow(c, k) => WeightExpr::Pow(Box::new(c.condition(b)), *k),
            WeightExpr::Exp(c) => WeightExpr::Exp(Box::new(c.condition(b))),
            WeightExpr::Const(_) | WeightExpr::Var(_) | WeightExpr::BlackBox(_) => self.clone(),
        }
    }

    fn piece(
        &self,
        n: usize,
        b: &[bool],
        atom: &dyn Fn(&Atom) -> Option<bool>,
    ) -> Option<Polynomial> {
        Some(match self {
            WeightExpr::Const(c) => Polynomial::constant(n, c.clone()),
            WeightExpr::Var(i) => Polynomial::var(n, *i),
            WeightExpr::Add(cs) => {
                let mut acc = Polynomial::zero(n);
                for c in cs {
                    acc = &acc + &c.piece(n, b, atom)?;
                }
                acc
            }
            WeightExpr::Mul(cs) => {
                let mut acc = Polynomial::one(n);
                for c in cs {
                    acc = &acc * &c.piece(n, b, atom)?;
                }
                acc
            }
            WeightExpr::Neg(c) => -&c.piece(n, b, atom)?,
            WeightExpr::Pow(c, k) => c.piece(n, b, atom)?.pow(*k),
            WeightExpr::Ite(c, t, e) => {
                if c.eval_partial(&|i| b.get(i).copied(), atom)? {
                    t.piece(n, b, atom)?
                } else {
                    e.piece(n, b, atom)?
                }
            }
            WeightExpr::Exp(_) | WeightExpr::BlackBox(_) => return None,
        })
    }

    fn eval(&self, b: &[bool], x: &[Rational]) -> Option<Rational> {
        Some(match self {
            WeightExpr::Const(c) => c.clone(),
            WeightExpr::Var(i) => x[*i].clone(),
            WeightExpr::Add(cs) => {
                let mut acc = Rational::zero();
                for c in cs {
                    acc += c.eval(b, x)?;
                }
                acc
            }
            WeightExpr::Mul(cs) => {
                let mut acc = Rational::one();
                for c in cs {
                    acc *= c.eval(b, x)?;
                }
                acc
            }
            WeightExpr::Neg(c) => -c.eval(b, x)?,
            WeightExpr::Pow(c, k) => num_traits::pow(c.eval(b, x)?, *k as usize),
            WeightExpr::Ite(c, t, e) => {
                if c.eval(b, x) {
                    t.eval(b, x)?
                } else {
                    e.eval(b, x)?
                }
            }
            WeightExpr::Exp(_) | WeightExpr::BlackBox(_) => return None,
        })
    }

    fn scale_literals(&self, m: usize, out: &mut Vec<(Rational, Rational)>) -> bool {
        match self {
            WeightExpr::Const(c) if c.is_one() => true,
            WeightExpr::Mul(cs) => cs.iter().all(|c| c.scale_literals(m, out)),
            WeightExpr::Ite(cond, t, e) => match (&**cond, &**t, &**e) {
                (Formula::Var(i), WeightExpr::Const(a), WeightExpr::Const(c)) if *i < m => {
                    let slot = &mut out[*i];
                    slot.0 *= a;
                    slot.1 *= c;
                    true
                }
                _ => false,
            },
            _ => false,
        }
    }
}

/// A weight function over a fixed universe.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    nbools: usize,
    nreals: usize,
    expr: WeightExpr,
}

impl WeightSpec {
    /// Wraps `expr`, checking that it only refers to variables of `u`.
    pub fn new(u: &Universe, expr: WeightExpr) -> Result<Self> {
        if let Some(i) = expr.max_real() {
            if i >= u.num_reals() {
                return Err(WmiError::InvalidInput(format!(
                    "weight refers to real variable {i} outside a universe of {}",
                    u.num_reals()
                )));
            }
        }
        let mut conds = Vec::new();
        expr.conditions(&mut conds);
        for c in conds {
            c.check_universe(u)?;
        }
        Ok(WeightSpec {
            nbools: u.num_booleans(),
            nreals: u.num_reals(),
            expr,
        })
    }

    pub fn one(u: &Universe) -> Self {
        Self::constant(u, Rational::one())
    }

    pub fn constant(u: &Universe, c: Rational) -> Self {
        WeightSpec {
            nbools: u.num_booleans(),
            nreals: u.num_reals(),
            expr: WeightExpr::Const(c),
        }
    }

    /// The weight `Π_i ite(B_i, w(B_i), w(¬B_i))`.
    pub fn from_literal_weights(u: &Universe, lw: &LiteralWeights) -> Result<Self> {
        if lw.len() != u.num_booleans() {
            return Err(WmiError::SizeMismatch {
                expected: u.num_booleans(),
                actual: lw.len(),
            });
        }
        let factors = (0..lw.len())
            .map(|i| {
                WeightExpr::ite(
                    Formula::var(i),
                    WeightExpr::Const(lw.literal(i, true).clone()),
                    WeightExpr::Const(lw.literal(i, false).clone()),
                )
            })
            .collect();
        Self::new(u, WeightExpr::Mul(factors))
    }

    pub fn expr(&self) -> &WeightExpr {
        &self.expr
    }

    pub fn num_booleans(&self) -> usize {
        self.nbools
    }

    pub fn num_reals(&self) -> usize {
        self.nreals
    }

    /// Parses the weight grammar: arithmetic nodes plus
    /// `{"op":"ite","args":[formula, then, else]}` and `{"op":"exp","args":[e]}`.
    pub fn parse(v: &Value, u: &Universe, path: &JsonPath) -> Result<Self> {
        let expr = parse_weight_expr(v, u, path)?;
        Self::new(u, expr)
    }

    /// True when every piece is a polynomial (no `exp`, no black box).
    pub fn is_polynomial(&self) -> bool {
        !self
            .expr
            .any(&|e| matches!(e, WeightExpr::Exp(_) | WeightExpr::BlackBox(_)))
    }

    pub fn degree(&self) -> Option<u32> {
        self.expr.degree()
    }

    /// Real atoms occurring in `ite` conditions.
    pub fn ite_atoms(&self) -> Vec<Atom> {
        let mut conds = Vec::new();
        self.expr.conditions(&mut conds);
        conds
            .into_iter()
            .flat_map(|c| c.atoms().into_iter().cloned())
            .collect()
    }

    /// The section `w_b`, with Boolean conditions resolved.
    pub fn condition(&self, b: &Assignment) -> WeightSpec {
        WeightSpec {
            nbools: self.nbools,
            nreals: self.nreals,
            expr: self.expr.condition(b),
        }
    }

    /// The polynomial `w(b, ·)` takes where each atom has the given truth
    /// value. `None` if the weight is not polynomial or a condition is left
    /// undetermined.
    pub fn piece(&self, b: &[bool], atom: &dyn Fn(&Atom) -> Option<bool>) -> Option<Polynomial> {
        self.expr.piece(self.nreals, b, atom)
    }

    /// Exact value; `None` for non-polynomial weights.
    pub fn eval(&self, b: &[bool], x: &[Rational]) -> Option<Rational> {
        self.expr.eval(b, x)
    }

    /// `c·w`.
    pub fn scale(&self, c: &Rational) -> WeightSpec {
        WeightSpec {
            nbools: self.nbools,
            nreals: self.nreals,
            expr: WeightExpr::Mul(vec![WeightExpr::Const(c.clone()), self.expr.clone()]),
        }
    }

    /// Recognizes a product of literal factors `ite(B_i, a_i, c_i)`.
    pub fn as_literal_weights(&self) -> Option<LiteralWeights> {
        let m = self.nbools;
        let mut pairs = vec![(Rational::one(), Rational::one()); m];
        if !self.expr.scale_literals(m, &mut pairs) {
            return None;
        }
        LiteralWeights::from_pairs(pairs).ok()
    }

    /// The table `b ↦ w(b)` of a weight without real variables.
    pub fn boolean_table(&self, max_booleans: usize) -> Result<AssignmentWeight> {
        if self.nreals != 0 {
            return Err(WmiError::InvalidInput(
                "a Boolean weight table needs a weight without real variables".into(),
            ));
        }
        if self.nbools > max_booleans {
            return Err(WmiError::Capacity {
                what: "Boolean variables for a weight table",
                limit: max_booleans as u64,
                actual: self.nbools as u64,
            });
        }
        let values = Assignment::all(self.nbools)
            .map(|b| {
                self.eval(b.values(), &[]).ok_or_else(|| {
                    WmiError::BackendUnavailable("weight is not exactly evaluable".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        AssignmentWeight::table(self.nbools, values)
    }
}

fn parse_weight_expr(v: &Value, u: &Universe, path: &JsonPath) -> Result<WeightExpr> {
    let obj = as_object(v, path)?;
    if let Some(name) = obj.get("var") {
        let name = name
            .as_str()
            .ok_or_else(|| path.key("var").error("variable name must be a string"))?;
        return match u.real_index(name) {
            Some(i) => Ok(WeightExpr::Var(i)),
            None if u.boolean_index(name).is_some() => Err(path.error(format!(
                "Boolean variable `{name}` used as a weight value; use `ite`"
            ))),
            None => Err(WmiError::UndeclaredVariable(name.to_string())),
        };
    }
    if let Some(c) = obj.get("const") {
        return Ok(WeightExpr::Const(parse_const(c, &path.key("const"))?));
    }
    let op = op_of(obj, path)?.ok_or_else(|| path.error("expected `var`, `const` or `op`"))?;
    let args = args_of(obj, path)?;
    let arg = |i: usize| parse_weight_expr(&args[i], u, &path.key("args").index(i));
    match op {
        "add" | "mul" => {
            if args.is_empty() {
                return Err(path.error(format!("`{op}` needs at least one argument")));
            }
            let kids = (0..args.len()).map(arg).collect::<Result<Vec<_>>>()?;
            Ok(if op == "add" {
                WeightExpr::Add(kids)
            } else {
                WeightExpr::Mul(kids)
            })
        }
        "neg" => {
            exactly(args, 1, op, path)?;
            Ok(WeightExpr::Neg(Box::new(arg(0)?)))
        }
        "exp" => {
            exactly(args, 1, op, path)?;
            Ok(WeightExpr::Exp(Box::new(arg(0)?)))
        }
        "pow" => {
            exactly(args, 2, op, path)?;
            let k = parse_exponent(&args[1], &path.key("args").index(1))?;
            Ok(WeightExpr::Pow(Box::new(arg(0)?), k))
        }
        "ite" => {
            exactly(args, 3, op, path)?;
            let cond = parse_formula(&args[0], u, &path.key("args").index(0))?;
            Ok(WeightExpr::ite(cond, arg(1)?, arg(2)?))
        }
        other => Err(path.error(format!("unknown weight operator `{other}`"))),
    }
}

/// A weight compiled to `f64` evaluation for the sampling backends.
#[derive(Debug, Clone)]
pub enum FloatWeight {
    Const(f64),
    Var(usize),
    Poly(FloatPoly),
    Add(Vec<FloatWeight>),
    Mul(Vec<FloatWeight>),
    Neg(Box<FloatWeight>),
    Pow(Box<FloatWeight>, i32),
    Ite(FloatFormula, Box<FloatWeight>, Box<FloatWeight>),
    Exp(Box<FloatWeight>),
    BlackBox(BlackBox),
}

impl FloatWeight {
    /// Node-for-node translation of the expression tree.
    pub fn direct(w: &WeightSpec) -> Self {
        Self::build(&w.expr, None)
    }

    /// Like [`FloatWeight::direct`], with `ite`-free polynomial subtrees
    /// expanded into flat polynomials.
    pub fn compiled(w: &WeightSpec) -> Self {
        Self::build(&w.expr, Some(w.nreals))
    }

    fn build(e: &WeightExpr, expand: Option<usize>) -> Self {
        if let Some(n) = expand {
            let flat = !e.any(&|s| {
                matches!(s, WeightExpr::Ite(..) | WeightExpr::Exp(_) | WeightExpr::BlackBox(_))
            });
            if flat && !matches!(e, WeightExpr::Const(_) | WeightExpr::Var(_)) {
                let p = e.piece(n, &[], &|_| None).expect("ite-free polynomial");
                return FloatWeight::Poly(FloatPoly::new(&p));
            }
        }
        let rec = |c: &WeightExpr| Box::new(Self::build(c, expand));
        match e {
            WeightExpr::Const(c) => FloatWeight::Const(to_f64(c)),
            WeightExpr::Var(i) => FloatWeight::Var(*i),
            WeightExpr::Add(cs) => FloatWeight::Add(cs.iter().map(|c| Self::build(c, expand)).collect()),
            WeightExpr::Mul(cs) => FloatWeight::Mul(cs.iter().map(|c| Self::build(c, expand)).collect()),
            WeightExpr::Neg(c) => FloatWeight::Neg(rec(c)),
            WeightExpr::Pow(c, k) => FloatWeight::Pow(rec(c), *k as i32),
            WeightExpr::Ite(c, t, f) => FloatWeight::Ite(FloatFormula::new(c), rec(t), rec(f)),
            WeightExpr::Exp(c) => FloatWeight::Exp(rec(c)),
            WeightExpr::BlackBox(bb) => FloatWeight::BlackBox(bb.clone()),
        }
    }

    pub fn eval(&self, b: &[bool], x: &[f64]) -> f64 {
        match self {
            FloatWeight::Const(c) => *c,
            FloatWeight::Var(i) => x[*i],
            FloatWeight::Poly(p) => p.eval(x),
            FloatWeight::Add(cs) => cs.iter().map(|c| c.eval(b, x)).sum(),
            FloatWeight::Mul(cs) => cs.iter().map(|c| c.eval(b, x)).product(),
            FloatWeight::Neg(c) => -c.eval(b, x),
            FloatWeight::Pow(c, k) => c.eval(b, x).powi(*k),
            FloatWeight::Ite(cond, t, f) => {
                if cond.eval(b, x) {
                    t.eval(b, x)
                } else {
                    f.eval(b, x)
                }
            }
            FloatWeight::Exp(c) => c.eval(b, x).exp(),
            FloatWeight::BlackBox(bb) => bb.call(b, x),
        }
    }
}
