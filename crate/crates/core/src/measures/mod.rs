//! Weight lifting, probability densities on `B^M × R^N`, their unique
//! factorization into a Boolean marginal and real conditionals, and the
//! probabilities these induce.

mod weight;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::boolean_engine::{AssignmentWeight, LiteralWeights};
use crate::error::{Result, WmiError};
use crate::formula::{condition_on, Assignment, Formula, Universe};
use crate::rational::{to_f64, Rational};
use crate::result::{Definition, MeasureResult, Method, Quantity};
use crate::wmi::{integrate, section, Settings};

pub use weight::{BlackBox, BlackBoxFn, FloatWeight, WeightExpr, WeightSpec};

/// `w(b) = Π_i ite(b_i, w(B_i), w(¬B_i))`, tabulated when small enough.
pub fn lift_literal_weights(lw: &LiteralWeights) -> AssignmentWeight {
    let m = lw.len();
    if m <= crate::limits::Limits::default().max_table_booleans {
        let values = Assignment::all(m).map(|b| lw.product(&b)).collect();
        AssignmentWeight::Table { m, values }
    } else {
        AssignmentWeight::Product(lw.clone())
    }
}

/// A probability table on `B^M`, indexed by [`Assignment::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoolPdf {
    m: usize,
    probs: Vec<Quantity>,
}

impl BoolPdf {
    /// Checks that entries lie in `[0, 1]` and sum to 1 (exactly, or within
    /// `1e-9` for estimates).
    pub fn new(m: usize, probs: Vec<Quantity>) -> Result<Self> {
        if probs.len() as u64 != 1u64 << m {
            return Err(WmiError::SizeMismatch {
                expected: 1 << m,
                actual: probs.len(),
            });
        }
        let total = probs
            .iter()
            .fold(Quantity::Exact(Rational::zero()), |acc, p| acc.add(p));
        let ok = match &total {
            Quantity::Exact(t) => t.is_one(),
            Quantity::Approx(t) => (t - 1.0).abs() <= 1e-9,
        };
        let in_range = probs.iter().all(|p| match p {
            Quantity::Exact(v) => !v.is_negative() && *v <= Rational::one(),
            Quantity::Approx(v) => (-1e-9..=1.0 + 1e-9).contains(v),
        });
        if !ok || !in_range {
            return Err(WmiError::NotPdf(total.to_string()));
        }
        Ok(BoolPdf { m, probs })
    }

    pub fn from_weight(w: &AssignmentWeight) -> Result<Self> {
        let m = w.num_booleans();
        Self::new(
            m,
            Assignment::all(m).map(|b| Quantity::Exact(w.weight(&b))).collect(),
        )
    }

    pub fn num_booleans(&self) -> usize {
        self.m
    }

    pub fn prob(&self, b: &Assignment) -> &Quantity {
        &self.probs[b.index() as usize]
    }

    pub fn probs(&self) -> &[Quantity] {
        &self.probs
    }
}

/// `η(S) = Σ_{b ∈ S} w(b)`.
pub fn eta<'a>(pdf: &BoolPdf, s: impl IntoIterator<Item = &'a Assignment>) -> Quantity {
    let set: BTreeSet<&Assignment> = s.into_iter().collect();
    set.into_iter()
        .fold(Quantity::Exact(Rational::zero()), |acc, b| acc.add(pdf.prob(b)))
}

#[derive(Debug, Clone)]
pub struct PdfReport {
    pub mass: MeasureResult,
    pub is_pdf: bool,
}

/// Total mass `∫ w d(μ×λ)` over `B^M × box`. Exact masses must equal 1;
/// estimates must be within `max(3·stderr, 1e-9)` of 1.
pub fn validate_pdf(w: &WeightSpec, u: &Universe, settings: &Settings) -> Result<PdfReport> {
    let mass = integrate(u, &Formula::True, w, settings)?;
    let is_pdf = match &mass.value {
        Quantity::Exact(v) => v.is_one(),
        Quantity::Approx(v) => (v - 1.0).abs() <= (3.0 * mass.stderr.unwrap_or(0.0)).max(1e-9),
    };
    Ok(PdfReport { mass, is_pdf })
}

/// `w_x^b = w_b / normalizer`, or the zero function when the normalizer is 0.
#[derive(Debug, Clone)]
pub struct ConditionalPdf {
    pub weight: WeightSpec,
    pub normalizer: Quantity,
}

impl ConditionalPdf {
    pub fn is_zero(&self) -> bool {
        self.normalizer.is_zero()
    }

    /// Exact density value; `None` for non-polynomial weights or estimated
    /// normalizers.
    pub fn eval(&self, b: &[bool], x: &[Rational]) -> Option<Rational> {
        let z = self.normalizer.as_exact()?;
        if z.is_zero() {
            return Some(Rational::zero());
        }
        Some(self.weight.eval(b, x)? / z)
    }

    pub fn eval_f64(&self, b: &[bool], x: &[f64]) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        FloatWeight::direct(&self.weight).eval(b, x) / self.normalizer.to_f64()
    }
}

/// One conditional density per Boolean assignment, indexed like [`BoolPdf`].
#[derive(Debug, Clone)]
pub struct RealPdfFamily {
    pub members: Vec<ConditionalPdf>,
}

impl RealPdfFamily {
    pub fn member(&self, b: &Assignment) -> &ConditionalPdf {
        &self.members[b.index() as usize]
    }
}

#[derive(Debug, Clone)]
pub struct Factorization {
    pub marginal: BoolPdf,
    pub family: RealPdfFamily,
    pub method: Method,
    /// Standard error of each marginal (zero on the exact path).
    pub marginal_stderr: Vec<f64>,
}

impl Factorization {
    /// JSON report: one row per assignment with its marginal probability and
    /// the normalizer of its conditional.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = Assignment::all(self.marginal.num_booleans())
            .map(|b| {
                let member = self.family.member(&b);
                json!({
                    "assignment": b.to_string(),
                    "probability": self.marginal.prob(&b).to_json(),
                    "normalizer": member.normalizer.to_json(),
                    "zero_mass": member.is_zero(),
                })
            })
            .collect();
        json!({ "method": self.method.as_str(), "marginal": rows })
    }

    /// Counts seeded sample points where `w_B(b)·w_x^b(x) ≠ w(b, x)`, over
    /// assignments with non-zero mass. Exact comparisons use rational points;
    /// estimated factorizations compare with relative tolerance `1e-6`.
    pub fn reconstruction_mismatches(
        &self,
        w: &WeightSpec,
        u: &Universe,
        points: usize,
        seed: u64,
    ) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bounds = u.bounds();
        let m = u.num_booleans();
        let direct = FloatWeight::direct(w);
        let mut bad = 0;
        for _ in 0..points {
            let b = Assignment::from_index(rng.random_range(0..(1u64 << m)), m);
            let x: Vec<Rational> = bounds
                .iter()
                .map(|(lo, hi)| {
                    let t = Rational::new(rng.random_range(0..=1024i64).into(), 1024.into());
                    lo + (hi - lo) * t
                })
                .collect();
            let member = self.family.member(&b);
            if member.is_zero() {
                continue;
            }
            let pb = self.marginal.prob(&b);
            let ok = match (pb, member.eval(b.values(), &x), w.eval(b.values(), &x)) {
                (Quantity::Exact(p), Some(c), Some(v)) => p * c == v,
                _ => {
                    let xf: Vec<f64> = x.iter().map(to_f64).collect();
                    let lhs = pb.to_f64() * member.eval_f64(b.values(), &xf);
                    let rhs = direct.eval(b.values(), &xf);
                    (lhs - rhs).abs() <= 1e-6 * rhs.abs().max(1e-300)
                }
            };
            if !ok {
                bad += 1;
            }
        }
        bad
    }
}

/// Splits a density into its Boolean marginal `w_B(b) = ∫ w_b dλ` and the
/// conditionals `w_x^b`.
pub fn factorize(w: &WeightSpec, u: &Universe, settings: &Settings) -> Result<Factorization> {
    let report = validate_pdf(w, u, settings)?;
    if !report.is_pdf {
        return Err(WmiError::NotPdf(report.mass.value.to_string()));
    }
    let m = u.num_booleans();
    if m > settings.limits.max_table_booleans {
        return Err(WmiError::Capacity {
            what: "Boolean variables for a marginal table",
            limit: settings.limits.max_table_booleans as u64,
            actual: m as u64,
        });
    }
    let mut probs = Vec::with_capacity(1 << m);
    let mut stderrs = Vec::with_capacity(1 << m);
    let mut members = Vec::with_capacity(1 << m);
    let mut rows = report.mass.breakdown.iter().peekable();
    for b in Assignment::all(m) {
        let (p, se) = match rows.peek() {
            Some((rb, q)) if *rb == b => {
                rows.next();
                (q.clone(), per_assignment_stderr(&report.mass))
            }
            _ => (Quantity::zero_like(report.mass.method == Method::Exact), 0.0),
        };
        members.push(ConditionalPdf {
            weight: w.condition(&b),
            normalizer: p.clone(),
        });
        probs.push(p);
        stderrs.push(se);
    }
    let marginal = match report.mass.method {
        Method::Exact => BoolPdf::new(m, probs)?,
        // Estimated marginals sum to the estimated mass, not exactly 1.
        _ => BoolPdf { m, probs },
    };
    Ok(Factorization {
        marginal,
        family: RealPdfFamily { members },
        method: report.mass.method,
        marginal_stderr: stderrs,
    })
}

fn per_assignment_stderr(r: &MeasureResult) -> f64 {
    let k = r.breakdown.len().max(1) as f64;
    r.stderr.unwrap_or(0.0) / k.sqrt()
}

/// `(η×τ)(M(s)) = Σ_b w_B(b)·τ^b(E_b)`, where `E_b` is the section of `M(s)`
/// at `b` and `τ^b(E) = ∫_E w_x^b dλ`.
pub fn eta_times_tau(
    fact: &Factorization,
    s: &Formula,
    u: &Universe,
    settings: &Settings,
) -> Result<MeasureResult> {
    let exact = fact.method == Method::Exact;
    let mut total = Quantity::zero_like(exact);
    let mut var = 0.0;
    let mut breakdown = Vec::new();
    for b in Assignment::all(u.num_booleans()) {
        let member = fact.family.member(&b);
        if member.is_zero() {
            continue;
        }
        let eb = condition_on(s, &b);
        if eb == Formula::False {
            continue;
        }
        let (raw, se) = section(u, &eb, &member.weight, &b, settings, fact.method)?;
        let tau = raw.div(&member.normalizer).expect("non-zero normalizer");
        let pb = fact.marginal.prob(&b);
        let contribution = pb.mul(&tau);
        var += (pb.to_f64() * se / member.normalizer.to_f64()).powi(2);
        total = total.add(&contribution);
        breakdown.push((b, contribution));
    }
    Ok(MeasureResult {
        value: total,
        method: fact.method,
        definition: Definition::Lebesgue,
        stderr: (!exact).then(|| var.sqrt()),
        seed: (!exact).then_some(settings.seed),
        samples: (!exact).then_some(settings.mc_samples),
        breakdown,
        cells: 0,
        empty_cells: 0,
        elapsed: Default::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::RealVar;
    use crate::polynomial::Polynomial;
    use crate::rational::{frac, int};

    fn unit_universe() -> Universe {
        Universe::new(
            vec!["B1".into()],
            vec![RealVar {
                name: "x".into(),
                lower: int(0),
                upper: int(1),
            }],
        )
        .unwrap()
    }

    /// w(⊤, x) = x, w(⊥, x) = 1/2 on [0, 1].
    fn pdf_fixture() -> WeightSpec {
        WeightSpec::new(
            &unit_universe(),
            WeightExpr::ite(
                Formula::var(0),
                WeightExpr::Var(0),
                WeightExpr::Const(frac(1, 2)),
            ),
        )
        .unwrap()
    }

    fn weights() -> LiteralWeights {
        LiteralWeights::from_pairs(vec![(frac(3, 10), frac(7, 10)), (frac(6, 10), frac(4, 10))]).unwrap()
    }

    #[test]
    fn lifting_examples() {
        let lifted = lift_literal_weights(&weights());
        assert_eq!(lifted.weight(&Assignment::new(vec![true, false])), frac(12, 100));
        let ones = lift_literal_weights(&LiteralWeights::uniform(3));
        assert!(Assignment::all(3).all(|b| ones.weight(&b) == int(1)));
        let single = lift_literal_weights(&LiteralWeights::from_pairs(vec![(int(2), int(5))]).unwrap());
        assert_eq!(single, AssignmentWeight::Table { m: 1, values: vec![int(2), int(5)] });
    }

    #[test]
    fn eta_examples() {
        let pdf = BoolPdf::from_weight(&lift_literal_weights(&weights())).unwrap();
        let f = Formula::or([Formula::var(0), Formula::var(1)]);
        let models = crate::boolean_engine::enumerate_models(&f, 2).unwrap();
        assert_eq!(eta(&pdf, &models), Quantity::Exact(frac(72, 100)));
        let all: Vec<Assignment> = Assignment::all(2).collect();
        assert_eq!(eta(&pdf, &all), Quantity::Exact(int(1)));
        assert_eq!(eta(&pdf, &[]), Quantity::Exact(int(0)));
        assert!(BoolPdf::from_weight(&lift_literal_weights(&LiteralWeights::uniform(1))).is_err());
    }

    #[test]
    fn validate_pdf_examples() {
        let u = unit_universe();
        let s = Settings::exact();
        let r = validate_pdf(&pdf_fixture(), &u, &s).unwrap();
        assert!(r.is_pdf);
        assert_eq!(r.mass.as_exact(), Some(&int(1)));
        let r = validate_pdf(&WeightSpec::one(&u), &u, &s).unwrap();
        assert!(!r.is_pdf);
        assert_eq!(r.mass.as_exact(), Some(&int(2)));
        let r = validate_pdf(&WeightSpec::constant(&u, int(0)), &u, &s).unwrap();
        assert!(!r.is_pdf);
        assert_eq!(r.mass.as_exact(), Some(&int(0)));
    }

    #[test]
    fn factorize_fixture() {
        let u = unit_universe();
        let fact = factorize(&pdf_fixture(), &u, &Settings::exact()).unwrap();
        let (t, f) = (Assignment::new(vec![true]), Assignment::new(vec![false]));
        assert_eq!(fact.marginal.prob(&t), &Quantity::Exact(frac(1, 2)));
        assert_eq!(fact.marginal.prob(&f), &Quantity::Exact(frac(1, 2)));
        let x = frac(3, 7);
        assert_eq!(fact.family.member(&t).eval(&[true], std::slice::from_ref(&x)), Some(frac(6, 7)));
        assert_eq!(fact.family.member(&f).eval(&[false], &[x]), Some(int(1)));
        assert_eq!(fact.reconstruction_mismatches(&pdf_fixture(), &u, 1000, 1), 0);
        let report = fact.to_json();
        assert_eq!(report["marginal"][0]["probability"], "1/2");
    }

    #[test]
    fn factorize_zero_mass_branch() {
        let u = unit_universe();
        let w = WeightSpec::new(
            &u,
            WeightExpr::ite(Formula::var(0), WeightExpr::Const(int(1)), WeightExpr::Const(int(0))),
        )
        .unwrap();
        let fact = factorize(&w, &u, &Settings::exact()).unwrap();
        let f = Assignment::new(vec![false]);
        assert!(fact.marginal.prob(&f).is_zero());
        assert!(fact.family.member(&f).is_zero());
        assert_eq!(fact.family.member(&f).eval(&[false], &[frac(1, 2)]), Some(int(0)));
    }

    #[test]
    fn factorize_fully_factorized_weight() {
        // w(b, x) = w_B(b)·2x with w_B = (1/4, 3/4)
        let u = unit_universe();
        let two_x = WeightExpr::Mul(vec![WeightExpr::Const(int(2)), WeightExpr::Var(0)]);
        let w = WeightSpec::new(
            &u,
            WeightExpr::Mul(vec![
                WeightExpr::ite(Formula::var(0), WeightExpr::Const(frac(1, 4)), WeightExpr::Const(frac(3, 4))),
                two_x,
            ]),
        )
        .unwrap();
        let fact = factorize(&w, &u, &Settings::exact()).unwrap();
        for k in 0..=10 {
            let x = vec![frac(k, 10)];
            let a = fact.family.member(&Assignment::new(vec![true])).eval(&[true], &x);
            let b = fact.family.member(&Assignment::new(vec![false])).eval(&[false], &x);
            assert_eq!(a, b);
            assert_eq!(a, Some(frac(2 * k, 10)));
        }
    }

    #[test]
    fn factorize_rejects_non_pdf() {
        let u = unit_universe();
        assert!(matches!(
            factorize(&WeightSpec::one(&u), &u, &Settings::exact()),
            Err(WmiError::NotPdf(_))
        ));
    }

    #[test]
    fn eta_times_tau_examples() {
        let u = unit_universe();
        let s = Settings::exact();
        let fact = factorize(&pdf_fixture(), &u, &s).unwrap();
        let x = Polynomial::var(1, 0);
        let half = Polynomial::constant(1, frac(1, 2));
        let phi = Formula::and([Formula::var(0), Formula::le(&x, &half)]);
        let v = eta_times_tau(&fact, &phi, &u, &s).unwrap();
        assert_eq!(v.as_exact(), Some(&frac(1, 8)));
        let wmi = integrate(&u, &phi, &pdf_fixture(), &s).unwrap();
        assert_eq!(wmi.as_exact(), Some(&frac(1, 8)));
        assert_eq!(eta_times_tau(&fact, &Formula::True, &u, &s).unwrap().as_exact(), Some(&int(1)));
        assert_eq!(eta_times_tau(&fact, &Formula::False, &u, &s).unwrap().as_exact(), Some(&int(0)));
    }

    #[test]
    fn mc_validation_uses_stderr() {
        let u = unit_universe();
        let r = validate_pdf(&pdf_fixture(), &u, &Settings::mc(100_000, 5)).unwrap();
        assert!(r.is_pdf, "{:?}", r.mass);
        assert_eq!(r.mass.method, Method::MonteCarlo);
    }
}
