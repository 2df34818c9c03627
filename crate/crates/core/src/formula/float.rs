//! Floating-point compilations of formulas for the sampling backends.

use super::{Atom, Formula};
use crate::polynomial::Polynomial;
use crate::rational::to_f64;

#[derive(Debug, Clone)]
pub enum FloatPoly {
    Affine { coeffs: Vec<f64>, constant: f64 },
    General { terms: Vec<(f64, Vec<(usize, i32)>)> },
}

impl FloatPoly {
    pub fn new(p: &Polynomial) -> Self {
        if let Some((coeffs, constant)) = p.as_affine() {
            return FloatPoly::Affine {
                coeffs: coeffs.iter().map(to_f64).collect(),
                constant: to_f64(&constant),
            };
        }
        FloatPoly::General {
            terms: p
                .terms()
                .map(|(e, c)| {
                    let powers = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| (i, k as i32))
                        .collect();
                    (to_f64(c), powers)
                })
                .collect(),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            FloatPoly::Affine { coeffs, constant } => coeffs
                .iter()
                .zip(x)
                .fold(*constant, |acc, (a, xi)| acc + a * xi),
            FloatPoly::General { terms } => terms
                .iter()
                .map(|(c, powers)| {
                    powers
                        .iter()
                        .fold(*c, |acc, &(i, k)| acc * x[i].powi(k))
                })
                .sum(),
        }
    }
}

/// A formula with atoms compiled to `f64` evaluators.
#[derive(Debug, Clone)]
pub enum FloatFormula {
    Const(bool),
    Var(usize),
    Atom(FloatPoly),
    Not(Box<FloatFormula>),
    And(Vec<FloatFormula>),
    Or(Vec<FloatFormula>),
}

impl FloatFormula {
    pub fn new(f: &Formula) -> Self {
        match f {
            Formula::True => FloatFormula::Const(true),
            Formula::False => FloatFormula::Const(false),
            Formula::Var(i) => FloatFormula::Var(*i),
            Formula::Atom(Atom { expr }) => FloatFormula::Atom(FloatPoly::new(expr)),
            Formula::Not(c) => FloatFormula::Not(Box::new(FloatFormula::new(c))),
            Formula::And(cs) => FloatFormula::And(cs.iter().map(FloatFormula::new).collect()),
            Formula::Or(cs) => FloatFormula::Or(cs.iter().map(FloatFormula::new).collect()),
        }
    }

    #[inline]
    pub fn eval(&self, b: &[bool], x: &[f64]) -> bool {
        match self {
            FloatFormula::Const(v) => *v,
            FloatFormula::Var(i) => b[*i],
            FloatFormula::Atom(p) => p.eval(x) <= 0.0,
            FloatFormula::Not(c) => !c.eval(b, x),
            FloatFormula::And(cs) => cs.iter().all(|c| c.eval(b, x)),
            FloatFormula::Or(cs) => cs.iter().any(|c| c.eval(b, x)),
        }
    }
}
