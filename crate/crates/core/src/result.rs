//! Computed quantities and the result record shared by every backend.

use std::fmt;
use std::time::Duration;

use num_traits::Zero;

use crate::formula::Assignment;
use crate::rational::{to_f64, Rational};

/// An exact rational or a floating-point estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Exact(Rational),
    Approx(f64),
}

impl Quantity {
    pub fn zero_like(exact: bool) -> Quantity {
        if exact {
            Quantity::Exact(Rational::zero())
        } else {
            Quantity::Approx(0.0)
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Exact(r) => to_f64(r),
            Quantity::Approx(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Quantity::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Quantity::Exact(r) => Some(r),
            Quantity::Approx(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Quantity::Exact(r) => r.is_zero(),
            Quantity::Approx(v) => *v == 0.0,
        }
    }

    /// Sum, staying exact only when both sides are.
    pub fn add(&self, other: &Quantity) -> Quantity {
        match (self, other) {
            (Quantity::Exact(a), Quantity::Exact(b)) => Quantity::Exact(a + b),
            _ => Quantity::Approx(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Quantity) -> Quantity {
        match (self, other) {
            (Quantity::Exact(a), Quantity::Exact(b)) => Quantity::Exact(a * b),
            _ => Quantity::Approx(self.to_f64() * other.to_f64()),
        }
    }

    /// `self / other`; `None` on division by zero.
    pub fn div(&self, other: &Quantity) -> Option<Quantity> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Quantity::Exact(a), Quantity::Exact(b)) => Quantity::Exact(a / b),
            _ => Quantity::Approx(self.to_f64() / other.to_f64()),
        })
    }

    /// Exact values render as `p/q` strings, estimates as JSON numbers.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Quantity::Exact(r) => serde_json::Value::String(r.to_string()),
            Quantity::Approx(v) => serde_json::json!(v),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Exact(r) => write!(f, "{r}"),
            Quantity::Approx(v) => write!(f, "{v}"),
        }
    }
}

impl From<Rational> for Quantity {
    fn from(r: Rational) -> Self {
        Quantity::Exact(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "mc",
            Method::Oracle => "oracle",
        }
    }
}

/// Which integral a value instantiates: the sum-of-Riemann-integrals form
/// (piecewise-polynomial weights on polytopes) or the Lebesgue form, which
/// also admits any evaluable non-negative weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definition {
    Riemann,
    Lebesgue,
}

impl Definition {
    pub fn as_str(self) -> &'static str {
        match self {
            Definition::Riemann => "wmi",
            Definition::Lebesgue => "l-wmi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub value: Quantity,
    pub method: Method,
    pub definition: Definition,
    /// Standard error; present only for Monte Carlo results.
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    /// Contribution of each Boolean assignment that was integrated.
    pub breakdown: Vec<(Assignment, Quantity)>,
    pub cells: usize,
    pub empty_cells: usize,
    pub elapsed: Duration,
}

impl MeasureResult {
    pub fn exact(value: Rational, breakdown: Vec<(Assignment, Quantity)>) -> Self {
        MeasureResult {
            value: Quantity::Exact(value),
            method: Method::Exact,
            definition: Definition::Riemann,
            stderr: None,
            seed: None,
            samples: None,
            breakdown,
            cells: 0,
            empty_cells: 0,
            elapsed: Duration::ZERO,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.value.as_exact()
    }
}
