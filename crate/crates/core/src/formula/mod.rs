//! Propositional and SMT formulas: the variable universe, the AST,
//! interpretation, and conditioning on a Boolean assignment.

mod float;
pub(crate) mod json;

use std::collections::HashSet;
use std::fmt;

use num_traits::Signed;

use crate::error::{Result, WmiError};
use crate::polynomial::Polynomial;
use crate::rational::Rational;

pub use float::{FloatFormula, FloatPoly};
pub use json::{
    parse_arith, parse_formula, parse_formula_str, serialize_formula, serialize_polynomial,
    JsonPath,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealVar {
    pub name: String,
    pub lower: Rational,
    pub upper: Rational,
}

/// The ordered Boolean and real variables a problem ranges over. Every real
/// variable carries a finite bounding interval.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Universe {
    booleans: Vec<String>,
    reals: Vec<RealVar>,
}

impl Universe {
    pub fn new(booleans: Vec<String>, reals: Vec<RealVar>) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in booleans.iter().chain(reals.iter().map(|r| &r.name)) {
            if name.is_empty() {
                return Err(WmiError::InvalidInput("empty variable name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(WmiError::InvalidInput(format!(
                    "variable `{name}` declared twice"
                )));
            }
        }
        for r in &reals {
            if r.lower >= r.upper {
                return Err(WmiError::InvalidInput(format!(
                    "bounds of `{}` must satisfy lower < upper, got [{}, {}]",
                    r.name, r.lower, r.upper
                )));
            }
        }
        Ok(Universe { booleans, reals })
    }

    /// Boolean-only universe with variables `B1..Bm`.
    pub fn booleans_only(m: usize) -> Self {
        Universe {
            booleans: (1..=m).map(|i| format!("B{i}")).collect(),
            reals: Vec::new(),
        }
    }

    pub fn num_booleans(&self) -> usize {
        self.booleans.len()
    }

    pub fn num_reals(&self) -> usize {
        self.reals.len()
    }

    pub fn booleans(&self) -> &[String] {
        &self.booleans
    }

    pub fn reals(&self) -> &[RealVar] {
        &self.reals
    }

    pub fn boolean_index(&self, name: &str) -> Option<usize> {
        self.booleans.iter().position(|b| b == name)
    }

    pub fn real_index(&self, name: &str) -> Option<usize> {
        self.reals.iter().position(|r| r.name == name)
    }

    pub fn bounds(&self) -> Vec<(Rational, Rational)> {
        self.reals
            .iter()
            .map(|r| (r.lower.clone(), r.upper.clone()))
            .collect()
    }

    pub fn bounds_f64(&self) -> Vec<(f64, f64)> {
        self.reals
            .iter()
            .map(|r| (crate::rational::to_f64(&r.lower), crate::rational::to_f64(&r.upper)))
            .collect()
    }

    /// `Π (upper − lower)`, the Lebesgue measure of the bounding box.
    pub fn box_volume(&self) -> Rational {
        self.reals
            .iter()
            .fold(Rational::from_integer(1.into()), |acc, r| acc * (&r.upper - &r.lower))
    }

    /// The same reals with no Boolean variables.
    pub fn reals_only(&self) -> Universe {
        Universe {
            booleans: Vec::new(),
            reals: self.reals.clone(),
        }
    }
}

/// The real-arithmetic atom `expr ≤ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    expr: Polynomial,
}

impl Atom {
    pub fn new(expr: Polynomial) -> Self {
        Atom { expr }
    }

    pub fn expr(&self) -> &Polynomial {
        &self.expr
    }

    pub fn is_linear(&self) -> bool {
        self.expr.is_linear()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        !self.expr.eval(x).is_positive()
    }

    /// Canonical positive rescaling: the last term (in exponent order) gets
    /// coefficient ±1. Atoms with equal keys define the same set.
    pub fn canonical(&self) -> Atom {
        match self.expr.terms().last() {
            Some((_, c)) => {
                let scale = c.abs().recip();
                Atom::new(self.expr.scale(&scale))
            }
            None => self.clone(),
        }
    }
}

/// Formula AST. Connectives are n-ary and flattened; constant atoms are
/// folded to `True`/`False` on construction through the smart constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Var(usize),
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn var(index: usize) -> Formula {
        Formula::Var(index)
    }

    /// `expr ≤ 0`, folded when `expr` is constant.
    pub fn atom(expr: Polynomial) -> Formula {
        match expr.as_constant() {
            Some(c) => Formula::from_bool(!c.is_positive()),
            None => Formula::Atom(Atom::new(expr)),
        }
    }

    /// `lhs ≤ rhs`.
    pub fn le(lhs: &Polynomial, rhs: &Polynomial) -> Formula {
        Formula::atom(lhs - rhs)
    }

    pub fn from_bool(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(children: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for c in children {
            match c {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(children: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for c in children {
            match c {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([Formula::not(a), b])
    }

    /// True when the formula has no real atoms.
    pub fn is_propositional(&self) -> bool {
        self.atoms().is_empty()
    }

    /// True when no Boolean variable occurs.
    pub fn is_real_only(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Var(_) => false,
            Formula::Not(c) => c.is_real_only(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().all(Formula::is_real_only),
        }
    }

    /// Atoms in order of first occurrence (syntactic duplicates included).
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::Not(c) => c.collect_atoms(out),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
            _ => {}
        }
    }

    pub fn max_boolean(&self) -> Option<usize> {
        match self {
            Formula::Var(i) => Some(*i),
            Formula::Not(c) => c.max_boolean(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().filter_map(Formula::max_boolean).max(),
            _ => None,
        }
    }

    pub fn max_real_arity(&self) -> Option<usize> {
        self.atoms().iter().map(|a| a.expr().nvars()).max()
    }

    /// Evaluates under a total interpretation; sizes are not checked.
    pub fn eval(&self, b: &[bool], x: &[Rational]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(i) => b[*i],
            Formula::Atom(a) => a.holds(x),
            Formula::Not(c) => !c.eval(b, x),
            Formula::And(cs) => cs.iter().all(|c| c.eval(b, x)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval(b, x)),
        }
    }

    /// Kleene three-valued evaluation given partial knowledge of variables
    /// and atoms; `None` means undetermined.
    pub fn eval_partial(
        &self,
        var: &dyn Fn(usize) -> Option<bool>,
        atom: &dyn Fn(&Atom) -> Option<bool>,
    ) -> Option<bool> {
        match self {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Var(i) => var(*i),
            Formula::Atom(a) => atom(a),
            Formula::Not(c) => c.eval_partial(var, atom).map(|v| !v),
            Formula::And(cs) => {
                let mut unknown = false;
                for c in cs {
                    match c.eval_partial(var, atom) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                (!unknown).then_some(true)
            }
            Formula::Or(cs) => {
                let mut unknown = false;
                for c in cs {
                    match c.eval_partial(var, atom) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                (!unknown).then_some(false)
            }
        }
    }

    /// Substitutes known Boolean values and re-simplifies with constant
    /// absorption. Variables mapped to `None` are left in place.
    pub fn substitute(&self, value: &dyn Fn(usize) -> Option<bool>) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Var(i) => match value(*i) {
                Some(v) => Formula::from_bool(v),
                None => self.clone(),
            },
            Formula::Not(c) => Formula::not(c.substitute(value)),
            Formula::And(cs) => Formula::and(cs.iter().map(|c| c.substitute(value))),
            Formula::Or(cs) => Formula::or(cs.iter().map(|c| c.substitute(value))),
        }
    }

    /// Negation pushed down to literals (negation normal form). Negated atoms
    /// stay as `Not(Atom)`.
    pub fn nnf(&self) -> Formula {
        self.nnf_with(false)
    }

    fn nnf_with(&self, negate: bool) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Var(_) | Formula::Atom(_) => {
                if negate {
                    Formula::not(self.clone())
                } else {
                    self.clone()
                }
            }
            Formula::Not(c) => c.nnf_with(!negate),
            Formula::And(cs) => {
                let kids = cs.iter().map(|c| c.nnf_with(negate));
                if negate {
                    Formula::or(kids)
                } else {
                    Formula::and(kids)
                }
            }
            Formula::Or(cs) => {
                let kids = cs.iter().map(|c| c.nnf_with(negate));
                if negate {
                    Formula::and(kids)
                } else {
                    Formula::or(kids)
                }
            }
        }
    }

    /// Checks that every variable index is declared in `u` and every atom is
    /// over exactly `u`'s real variables.
    pub fn check_universe(&self, u: &Universe) -> Result<()> {
        if let Some(i) = self.max_boolean() {
            if i >= u.num_booleans() {
                return Err(WmiError::InvalidInput(format!(
                    "Boolean variable index {i} outside a universe of {}",
                    u.num_booleans()
                )));
            }
        }
        for a in self.atoms() {
            if a.expr().nvars() != u.num_reals() {
                return Err(WmiError::InvalidInput(format!(
                    "atom over {} reals in a universe of {}",
                    a.expr().nvars(),
                    u.num_reals()
                )));
            }
        }
        Ok(())
    }
}

/// A total Boolean assignment. Index order is lexicographic with ⊤ before ⊥:
/// index 0 is all-⊤, and variable 0 is the most significant position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn from_index(index: u64, m: usize) -> Self {
        Assignment(
            (0..m)
                .map(|i| (index >> (m - 1 - i)) & 1 == 0)
                .collect(),
        )
    }

    pub fn index(&self) -> u64 {
        self.0
            .iter()
            .fold(0u64, |acc, &v| (acc << 1) | u64::from(!v))
    }

    /// All of `B^m` in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = Assignment> {
        (0..(1u64 << m)).map(move |i| Assignment::from_index(i, m))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.0 {
            f.write_str(if v { "T" } else { "F" })?;
        }
        Ok(())
    }
}

/// `I(f)` for the total interpretation `(ib, ix)`.
pub fn interpret(u: &Universe, f: &Formula, ib: &Assignment, ix: &[Rational]) -> Result<bool> {
    if ib.len() != u.num_booleans() {
        return Err(WmiError::SizeMismatch {
            expected: u.num_booleans(),
            actual: ib.len(),
        });
    }
    if ix.len() != u.num_reals() {
        return Err(WmiError::SizeMismatch {
            expected: u.num_reals(),
            actual: ix.len(),
        });
    }
    Ok(f.eval(ib.values(), ix))
}

/// The real-only formula whose models are `M_x(f)/b`.
pub fn condition_on(f: &Formula, b: &Assignment) -> Formula {
    f.substitute(&|i| Some(b.get(i)))
}
