//! Enumeration of Boolean (partial) models, weighted model counting, and its
//! counting-measure formulation.

use num_traits::{One, Signed, Zero};

use crate::error::{Result, WmiError};
use crate::formula::{Assignment, Formula};
use crate::limits::Limits;
use crate::rational::Rational;
use crate::result::{MeasureResult, Quantity};

/// Non-negative weights for both polarities of every Boolean variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralWeights {
    positive: Vec<Rational>,
    negative: Vec<Rational>,
}

impl LiteralWeights {
    pub fn new(positive: Vec<Rational>, negative: Vec<Rational>) -> Result<Self> {
        if positive.len() != negative.len() {
            return Err(WmiError::SizeMismatch {
                expected: positive.len(),
                actual: negative.len(),
            });
        }
        for (i, w) in positive.iter().chain(&negative).enumerate() {
            if w.is_negative() {
                return Err(WmiError::NegativeWeight {
                    value: w.to_string(),
                    at: format!("literal {}", i % positive.len().max(1)),
                });
            }
        }
        Ok(LiteralWeights { positive, negative })
    }

    /// `(w(B_i), w(¬B_i))` pairs.
    pub fn from_pairs(pairs: Vec<(Rational, Rational)>) -> Result<Self> {
        let (p, n) = pairs.into_iter().unzip();
        Self::new(p, n)
    }

    pub fn uniform(m: usize) -> Self {
        LiteralWeights {
            positive: vec![Rational::one(); m],
            negative: vec![Rational::one(); m],
        }
    }

    pub fn len(&self) -> usize {
        self.positive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty()
    }

    pub fn literal(&self, var: usize, polarity: bool) -> &Rational {
        if polarity {
            &self.positive[var]
        } else {
            &self.negative[var]
        }
    }

    /// `Π_i ite(b_i, w(B_i), w(¬B_i))`.
    pub fn product(&self, b: &Assignment) -> Rational {
        b.values()
            .iter()
            .enumerate()
            .fold(Rational::one(), |acc, (i, &v)| acc * self.literal(i, v))
    }
}

/// A weight function on `B^M`: a materialized table, or a product of literal
/// weights when the table would be too large.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignmentWeight {
    /// Indexed by [`Assignment::index`].
    Table { m: usize, values: Vec<Rational> },
    Product(LiteralWeights),
}

impl AssignmentWeight {
    pub fn table(m: usize, values: Vec<Rational>) -> Result<Self> {
        if values.len() as u64 != 1u64 << m {
            return Err(WmiError::SizeMismatch {
                expected: 1 << m,
                actual: values.len(),
            });
        }
        if let Some(w) = values.iter().find(|w| w.is_negative()) {
            return Err(WmiError::NegativeWeight {
                value: w.to_string(),
                at: "assignment table".into(),
            });
        }
        Ok(AssignmentWeight::Table { m, values })
    }

    pub fn num_booleans(&self) -> usize {
        match self {
            AssignmentWeight::Table { m, .. } => *m,
            AssignmentWeight::Product(lw) => lw.len(),
        }
    }

    pub fn weight(&self, b: &Assignment) -> Rational {
        match self {
            AssignmentWeight::Table { values, .. } => values[b.index() as usize].clone(),
            AssignmentWeight::Product(lw) => lw.product(b),
        }
    }
}

fn check_capacity(m: usize, limits: &Limits) -> Result<()> {
    if m > limits.max_booleans {
        return Err(WmiError::Capacity {
            what: "Boolean variables for enumeration",
            limit: limits.max_booleans as u64,
            actual: m as u64,
        });
    }
    Ok(())
}

fn require_propositional(f: &Formula) -> Result<()> {
    if f.is_propositional() {
        Ok(())
    } else {
        Err(WmiError::InvalidInput(
            "formula contains real atoms; weighted model counting needs a propositional formula"
                .into(),
        ))
    }
}

/// Literal forced by a top-level unit clause of the residual formula.
fn forced_value(residual: &Formula, var: usize) -> Option<bool> {
    let units: &[Formula] = match residual {
        Formula::And(cs) => cs,
        other => std::slice::from_ref(other),
    };
    for u in units {
        match u {
            Formula::Var(i) if *i == var => return Some(true),
            Formula::Not(inner) if **inner == Formula::Var(var) => return Some(false),
            _ => {}
        }
    }
    None
}

fn dfs(
    residual: &Formula,
    var: usize,
    m: usize,
    prefix: &mut Vec<bool>,
    propositional: bool,
    visit: &mut dyn FnMut(Assignment),
) {
    if *residual == Formula::False {
        return;
    }
    if var == m {
        if !propositional || *residual == Formula::True {
            visit(Assignment::new(prefix.clone()));
        }
        return;
    }
    let forced = forced_value(residual, var);
    for value in [true, false] {
        if forced.is_some_and(|f| f != value) {
            continue;
        }
        let next = residual.substitute(&|i| (i == var).then_some(value));
        prefix.push(value);
        dfs(&next, var + 1, m, prefix, propositional, visit);
        prefix.pop();
    }
}

/// Visits, in lexicographic order (⊤ before ⊥), every assignment of `B^m`
/// that satisfies a propositional `f`, or, when `f` has real atoms, every
/// assignment whose conditioned formula is not syntactically `False`.
pub fn for_each_model(
    f: &Formula,
    m: usize,
    limits: &Limits,
    mut visit: impl FnMut(Assignment),
) -> Result<()> {
    check_capacity(m, limits)?;
    let propositional = f.is_propositional();
    let mut prefix = Vec::with_capacity(m);
    dfs(f, 0, m, &mut prefix, propositional, &mut visit);
    Ok(())
}

pub fn enumerate_models(f: &Formula, m: usize) -> Result<Vec<Assignment>> {
    enumerate_models_with(f, m, &Limits::default())
}

pub fn enumerate_models_with(f: &Formula, m: usize, limits: &Limits) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    for_each_model(f, m, limits, |a| out.push(a))?;
    Ok(out)
}

/// `Σ_{models} Π_{literals} w(ℓ)`, exact.
pub fn wmc(f: &Formula, lw: &LiteralWeights) -> Result<MeasureResult> {
    wmc_with(f, lw, &Limits::default())
}

pub fn wmc_with(f: &Formula, lw: &LiteralWeights, limits: &Limits) -> Result<MeasureResult> {
    require_propositional(f)?;
    let mut total = Rational::zero();
    let mut breakdown = Vec::new();
    for_each_model(f, lw.len(), limits, |a| {
        let w = lw.product(&a);
        total += &w;
        breakdown.push((a, Quantity::Exact(w)));
    })?;
    Ok(MeasureResult::exact(total, breakdown))
}

/// `∫_{M(f)} w dμ` against the counting measure, computed as the simple-function
/// sum `Σ_{b ∈ B^M} w(b)·μ(M(f) ∩ {b})` over the whole space.
pub fn lwmc(f: &Formula, w: &AssignmentWeight) -> Result<MeasureResult> {
    lwmc_with(f, w, &Limits::default())
}

pub fn lwmc_with(f: &Formula, w: &AssignmentWeight, limits: &Limits) -> Result<MeasureResult> {
    require_propositional(f)?;
    let m = w.num_booleans();
    check_capacity(m, limits)?;
    let mut total = Rational::zero();
    let mut breakdown = Vec::new();
    for b in Assignment::all(m) {
        // μ(M(f) ∩ {b}) is 1 or 0.
        if f.eval(b.values(), &[]) {
            let wb = w.weight(&b);
            total += &wb;
            breakdown.push((b, Quantity::Exact(wb)));
        }
    }
    Ok(MeasureResult::exact(total, breakdown))
}
