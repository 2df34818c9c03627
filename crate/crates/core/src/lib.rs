//! Weighted model counting and weighted model integration over propositional
//! and SMT(LRA/NRA) formulas, with an exact rational backend, a seeded
//! Monte Carlo backend, and a brute-force grid oracle.

pub mod boolean_engine;
pub mod error;
pub mod formula;
pub mod geometry;
pub mod limits;
pub mod measures;
pub mod montecarlo;
pub mod oracle;
pub mod polynomial;
pub mod problem;
pub mod rational;
pub mod region;
pub mod result;
pub mod wmi;

pub use error::{Result, WmiError};
pub use formula::{Assignment, Formula, RealVar, Universe};
pub use limits::Limits;
pub use measures::{WeightExpr, WeightSpec};
pub use polynomial::Polynomial;
pub use rational::Rational;
pub use result::{MeasureResult, Method, Quantity};
pub use wmi::{Backend, Problem, Query, Settings};
