//! Weighted model integration: the sum over Boolean partial models of the
//! integral of the weight over each real section, plus identity checks.

use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::boolean_engine::{enumerate_models_with, lwmc_with, wmc_with};
use crate::error::{Result, WmiError};
use crate::formula::{condition_on, Assignment, Atom, FloatFormula, Formula, Universe};
use crate::geometry::{centroid, triangulate_with};
use crate::limits::Limits;
use crate::measures::{
    eta_times_tau, factorize, lift_literal_weights, validate_pdf, FloatWeight, WeightSpec,
};
use crate::montecarlo::{mc_integrate, McParams};
use crate::polynomial::{first_negative, integrate_poly_simplex, Polynomial};
use crate::rational::Rational;
use crate::region::{decompose_with, Decomposition};
use crate::result::{Definition, MeasureResult, Method, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    Exact,
    Mc,
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Query {
    Wmc,
    #[default]
    Wmi,
    ValidatePdf,
    Factorize,
    CheckIdentities,
}

/// Backend choice and its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    pub backend: Backend,
    pub mc_samples: u64,
    pub seed: u64,
    pub limits: Limits,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            backend: Backend::Auto,
            mc_samples: 100_000,
            seed: 0,
            limits: Limits::default(),
        }
    }
}

impl Settings {
    pub fn exact() -> Self {
        Settings {
            backend: Backend::Exact,
            ..Settings::default()
        }
    }

    pub fn mc(samples: u64, seed: u64) -> Self {
        Settings {
            backend: Backend::Mc,
            mc_samples: samples,
            seed,
            ..Settings::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub universe: Universe,
    pub formula: Formula,
    pub weight: WeightSpec,
    pub query: Query,
    pub settings: Settings,
    pub oracle_resolution: Option<usize>,
}

impl Problem {
    pub fn new(universe: Universe, formula: Formula, weight: WeightSpec) -> Result<Self> {
        formula.check_universe(&universe)?;
        check_weight(&universe, &weight)?;
        Ok(Problem {
            universe,
            formula,
            weight,
            query: Query::default(),
            settings: Settings::default(),
            oracle_resolution: None,
        })
    }

    pub fn with_settings(mut self, settings: Settings) -> Self {
        self.settings = settings;
        self
    }

    pub fn with_formula(&self, formula: Formula) -> Self {
        Problem {
            formula,
            ..self.clone()
        }
    }
}

fn check_weight(u: &Universe, w: &WeightSpec) -> Result<()> {
    if w.num_booleans() != u.num_booleans() || w.num_reals() != u.num_reals() {
        return Err(WmiError::InvalidInput(format!(
            "weight is over {} Booleans and {} reals, universe has {} and {}",
            w.num_booleans(),
            w.num_reals(),
            u.num_booleans(),
            u.num_reals()
        )));
    }
    Ok(())
}

/// Why the exact backend cannot handle `(f, w)`, if it cannot.
pub fn exact_obstacle(u: &Universe, f: &Formula, w: &WeightSpec, limits: &Limits) -> Option<String> {
    if !w.is_polynomial() {
        return Some("the weight is not piecewise polynomial".into());
    }
    if let Some(d) = w.degree().filter(|&d| d > limits.max_exact_degree) {
        return Some(format!(
            "weight degree {d} exceeds the exact cap {}",
            limits.max_exact_degree
        ));
    }
    if u.num_reals() > limits.max_exact_dim {
        return Some(format!(
            "{} real variables exceed the exact cap {}",
            u.num_reals(),
            limits.max_exact_dim
        ));
    }
    let ite_atoms = w.ite_atoms();
    let atoms: Vec<&Atom> = f.atoms().into_iter().chain(ite_atoms.iter()).collect();
    if atoms.iter().any(|a| !a.is_linear()) {
        return Some("non-linear atoms need the Monte Carlo backend".into());
    }
    let distinct: std::collections::HashSet<Atom> = atoms.iter().map(|a| a.canonical()).collect();
    if distinct.len() > limits.max_atoms {
        return Some(format!(
            "{} distinct atoms exceed the exact cap {}",
            distinct.len(),
            limits.max_atoms
        ));
    }
    None
}

/// Per-cell exact integrals of one section `∫_{M_x(f)/b} w_b dλ`.
#[derive(Debug, Clone, Default)]
pub(crate) struct ExactSection {
    pub total: Rational,
    pub cells: Vec<Rational>,
    pub empty: usize,
}

fn cell_piece(d: &Decomposition, cell_idx: usize, wb: &WeightSpec, b: &[bool]) -> Result<Polynomial> {
    let cell = &d.cells[cell_idx];
    wb.piece(b, &|a| d.sign_in(a, cell)).ok_or_else(|| {
        WmiError::BackendUnavailable("weight is not a polynomial on every cell".into())
    })
}

pub(crate) fn exact_section(
    u: &Universe,
    fb: &Formula,
    wb: &WeightSpec,
    b: &Assignment,
    limits: &Limits,
) -> Result<ExactSection> {
    let mut out = ExactSection::default();
    if *fb == Formula::False {
        return Ok(out);
    }
    let d = decompose_with(fb, &wb.ite_atoms(), u, limits)?;
    for (i, cell) in d.cells.iter().enumerate() {
        let q = cell.polytope().ok_or_else(|| {
            WmiError::BackendUnavailable("non-linear atoms need the Monte Carlo backend".into())
        })?;
        let piece = cell_piece(&d, i, wb, b.values())?;
        if piece.degree() > limits.max_exact_degree {
            return Err(WmiError::BackendUnavailable(format!(
                "polynomial degree {} exceeds exact cap {}",
                piece.degree(),
                limits.max_exact_degree
            )));
        }
        let simplices = triangulate_with(q, limits)?;
        if simplices.is_empty() {
            out.empty += 1;
            out.cells.push(Rational::zero());
            continue;
        }
        let verts = q.vertices_with(limits)?;
        let mut probes = verts.to_vec();
        probes.extend(centroid(verts));
        if let Some((x, v)) = first_negative(&piece, &probes) {
            return Err(WmiError::NegativeWeight {
                value: v.to_string(),
                at: format!("b = {b}, x = {x:?}"),
            });
        }
        let value = simplices
            .iter()
            .map(|s| integrate_poly_simplex(&piece, s))
            .fold(Rational::zero(), |acc, v| acc + v);
        out.total += &value;
        out.cells.push(value);
    }
    Ok(out)
}

pub(crate) fn mc_section(
    u: &Universe,
    fb: &Formula,
    wb: &WeightSpec,
    b: &Assignment,
    settings: &Settings,
) -> Result<(f64, f64)> {
    if *fb == Formula::False {
        return Ok((0.0, 0.0));
    }
    let member = FloatFormula::new(fb);
    let density = FloatWeight::compiled(wb);
    let bv = b.values();
    let params = McParams::new(settings.mc_samples, settings.seed).with_stream(b.index());
    let est = mc_integrate(
        |x| member.eval(bv, x),
        |x| density.eval(bv, x),
        &u.bounds_f64(),
        params,
    )?;
    Ok((est.estimate, est.stderr))
}

/// `∫_{section} w_b dλ` by the given method, with its standard error.
pub(crate) fn section(
    u: &Universe,
    fb: &Formula,
    wb: &WeightSpec,
    b: &Assignment,
    settings: &Settings,
    method: Method,
) -> Result<(Quantity, f64)> {
    match method {
        Method::Exact => Ok((
            Quantity::Exact(exact_section(u, fb, wb, b, &settings.limits)?.total),
            0.0,
        )),
        _ => {
            let (v, se) = mc_section(u, fb, wb, b, settings)?;
            Ok((Quantity::Approx(v), se))
        }
    }
}

fn exact_sections(
    u: &Universe,
    f: &Formula,
    w: &WeightSpec,
    models: &[Assignment],
    limits: &Limits,
) -> Result<Vec<ExactSection>> {
    models
        .par_iter()
        .map(|b| exact_section(u, &condition_on(f, b), &w.condition(b), b, limits))
        .collect()
}

fn exact_sum(
    u: &Universe,
    f: &Formula,
    w: &WeightSpec,
    models: Vec<Assignment>,
    limits: &Limits,
) -> Result<MeasureResult> {
    let sections = exact_sections(u, f, w, &models, limits)?;
    let mut total = Rational::zero();
    let mut cells = 0;
    let mut empty = 0;
    let mut breakdown = Vec::with_capacity(models.len());
    for (b, s) in models.into_iter().zip(sections) {
        total += &s.total;
        cells += s.cells.len();
        empty += s.empty;
        breakdown.push((b, Quantity::Exact(s.total)));
    }
    let mut r = MeasureResult::exact(total, breakdown);
    r.cells = cells;
    r.empty_cells = empty;
    Ok(r)
}

fn mc_sum(
    u: &Universe,
    f: &Formula,
    w: &WeightSpec,
    models: Vec<Assignment>,
    settings: &Settings,
) -> Result<MeasureResult> {
    let mut total = 0.0;
    let mut var = 0.0;
    let mut breakdown = Vec::with_capacity(models.len());
    for b in models {
        let (v, se) = mc_section(u, &condition_on(f, &b), &w.condition(&b), &b, settings)?;
        total += v;
        var += se * se;
        breakdown.push((b, Quantity::Approx(v)));
    }
    Ok(MeasureResult {
        value: Quantity::Approx(total),
        method: Method::MonteCarlo,
        definition: Definition::Lebesgue,
        stderr: Some(var.sqrt()),
        seed: Some(settings.seed),
        samples: Some(settings.mc_samples),
        breakdown,
        cells: 0,
        empty_cells: 0,
        elapsed: Default::default(),
    })
}

/// The method `settings` resolves to for `(f, w)`, before any fallback.
pub fn resolve_method(u: &Universe, f: &Formula, w: &WeightSpec, settings: &Settings) -> Result<Method> {
    match settings.backend {
        Backend::Mc => Ok(Method::MonteCarlo),
        Backend::Exact => match exact_obstacle(u, f, w, &settings.limits) {
            Some(reason) => Err(WmiError::BackendUnavailable(reason)),
            None => Ok(Method::Exact),
        },
        Backend::Auto => Ok(match exact_obstacle(u, f, w, &settings.limits) {
            Some(_) => Method::MonteCarlo,
            None => Method::Exact,
        }),
    }
}

/// `Σ_{b ∈ M_b(f)} ∫_{M_x(f)/b} w_b dλ`, Boolean assignments outermost.
pub fn integrate(u: &Universe, f: &Formula, w: &WeightSpec, settings: &Settings) -> Result<MeasureResult> {
    let start = Instant::now();
    f.check_universe(u)?;
    check_weight(u, w)?;
    let models = enumerate_models_with(f, u.num_booleans(), &settings.limits)?;
    let mut r = match resolve_method(u, f, w, settings)? {
        Method::Exact => match exact_sum(u, f, w, models.clone(), &settings.limits) {
            Err(e) if settings.backend == Backend::Auto && e.is_capacity() => {
                mc_sum(u, f, w, models, settings)?
            }
            other => other?,
        },
        _ => mc_sum(u, f, w, models, settings)?,
    };
    r.definition = if w.is_polynomial() {
        Definition::Riemann
    } else {
        Definition::Lebesgue
    };
    r.elapsed = start.elapsed();
    Ok(r)
}

pub fn compute_wmi(p: &Problem) -> Result<MeasureResult> {
    integrate(&p.universe, &p.formula, &p.weight, &p.settings)
}

/// Weighted model count of a problem without real variables.
pub fn compute_wmc(p: &Problem) -> Result<MeasureResult> {
    if p.universe.num_reals() != 0 {
        return Err(WmiError::InvalidInput(
            "a wmc query needs a problem without real variables".into(),
        ));
    }
    let limits = &p.settings.limits;
    match p.weight.as_literal_weights() {
        Some(lw) => wmc_with(&p.formula, &lw, limits),
        None => lwmc_with(&p.formula, &p.weight.boolean_table(limits.max_table_booleans)?, limits),
    }
}

/// `compute_wmi` with the weight multiplied by `c > 0`.
pub fn scale_weight(p: &Problem, c: &Rational) -> Result<MeasureResult> {
    if !c.is_positive() {
        return Err(WmiError::InvalidInput(format!("scale factor must be positive, got {c}")));
    }
    let scaled = Problem {
        weight: p.weight.scale(c),
        ..p.clone()
    };
    compute_wmi(&scaled)
}

/// One identity: both sides and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub pass: bool,
}

impl Check {
    /// Exact sides must be equal; otherwise the sides must agree within four
    /// combined standard errors.
    pub fn compare(name: &str, lhs: (Quantity, f64), rhs: (Quantity, f64)) -> Check {
        let pass = match (&lhs.0, &rhs.0) {
            (Quantity::Exact(a), Quantity::Exact(b)) => a == b,
            (a, b) => {
                let (a, b) = (a.to_f64(), b.to_f64());
                let tol = 4.0 * (lhs.1 * lhs.1 + rhs.1 * rhs.1).sqrt() + 1e-9 * (1.0 + b.abs());
                (a - b).abs() <= tol
            }
        };
        Check {
            name: name.to_string(),
            lhs: lhs.0,
            rhs: rhs.0,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub method: Method,
    pub checks: Vec<Check>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn with_se(r: &MeasureResult) -> (Quantity, f64) {
    (r.value.clone(), r.stderr.unwrap_or(0.0))
}

/// The same sum with cells outermost: every `(b, cell)` contribution sorted
/// by cell position first.
fn tonelli_check(p: &Problem, result: &MeasureResult) -> Result<Check> {
    if result.method != Method::Exact {
        let reversed = result
            .breakdown
            .iter()
            .rev()
            .fold(0.0, |acc, (_, q)| acc + q.to_f64());
        return Ok(Check::compare(
            "tonelli",
            with_se(result),
            (Quantity::Approx(reversed), 0.0),
        ));
    }
    let models: Vec<Assignment> = result.breakdown.iter().map(|(b, _)| b.clone()).collect();
    let sections = exact_sections(&p.universe, &p.formula, &p.weight, &models, &p.settings.limits)?;
    let mut terms: Vec<(usize, usize, &Rational)> = sections
        .iter()
        .enumerate()
        .flat_map(|(bi, s)| s.cells.iter().enumerate().map(move |(ci, v)| (ci, bi, v)))
        .collect();
    terms.sort_by_key(|&(ci, bi, _)| (ci, bi));
    let swapped = terms
        .into_iter()
        .fold(Rational::zero(), |acc, (_, _, v)| acc + v);
    Ok(Check::compare(
        "tonelli",
        with_se(result),
        (Quantity::Exact(swapped), 0.0),
    ))
}

/// `∫ w·1_{M(f)} d(μ×λ)` as a simple-function sum: the box is split once
/// along every atom of `f` and `w`, and each cell contributes for every
/// `b ∈ B^M` whose formula holds on it.
fn lebesgue_sum(p: &Problem) -> Result<Rational> {
    let u = &p.universe;
    let limits = &p.settings.limits;
    let mut extra: Vec<Atom> = p.formula.atoms().into_iter().cloned().collect();
    extra.extend(p.weight.ite_atoms());
    let d = decompose_with(&Formula::True, &extra, u, limits)?;
    let mut total = Rational::zero();
    for (ci, cell) in d.cells.iter().enumerate() {
        let q = cell.polytope().ok_or_else(|| {
            WmiError::BackendUnavailable("non-linear atoms need the Monte Carlo backend".into())
        })?;
        let simplices = triangulate_with(q, limits)?;
        if simplices.is_empty() {
            continue;
        }
        let signs = |a: &Atom| d.sign_in(a, cell);
        for b in Assignment::all(u.num_booleans()) {
            let holds = p
                .formula
                .eval_partial(&|i| Some(b.get(i)), &signs)
                .ok_or_else(|| WmiError::InvalidInput("undetermined cell".into()))?;
            if !holds {
                continue;
            }
            let piece = cell_piece(&d, ci, &p.weight, b.values())?;
            for s in &simplices {
                total += integrate_poly_simplex(&piece, s);
            }
        }
    }
    Ok(total)
}

/// Runs every identity that applies to the problem's shape.
pub fn check_identities(p: &Problem) -> Result<IdentityReport> {
    let u = &p.universe;
    let result = compute_wmi(p)?;
    let exact = result.method == Method::Exact;
    let mut checks = vec![tonelli_check(p, &result)?];

    if exact && u.num_booleans() <= p.settings.limits.max_table_booleans {
        let rhs = lebesgue_sum(p)?;
        checks.push(Check::compare(
            "theorem2",
            with_se(&result),
            (Quantity::Exact(rhs), 0.0),
        ));
    }

    if u.num_reals() == 0 && p.formula.is_propositional() {
        let limits = &p.settings.limits;
        if let Some(lw) = p.weight.as_literal_weights() {
            let counted = wmc_with(&p.formula, &lw, limits)?;
            let lifted = lwmc_with(&p.formula, &lift_literal_weights(&lw), limits)?;
            checks.push(Check::compare("theorem1", with_se(&lifted), with_se(&counted)));
            checks.push(Check::compare("corollary1", with_se(&result), with_se(&counted)));
        } else if u.num_booleans() <= limits.max_table_booleans && p.weight.is_polynomial() {
            let table = p.weight.boolean_table(limits.max_table_booleans)?;
            let lifted = lwmc_with(&p.formula, &table, limits)?;
            checks.push(Check::compare("corollary1", with_se(&result), with_se(&lifted)));
        }
    }

    // A weight that is negative somewhere in the box is not a density.
    let is_pdf = match validate_pdf(&p.weight, u, &p.settings) {
        Ok(report) => report.is_pdf,
        Err(WmiError::NegativeWeight { .. }) => false,
        Err(e) => return Err(e),
    };
    if is_pdf {
        let neg = integrate(u, &Formula::not(p.formula.clone()), &p.weight, &p.settings)?;
        let mut t4 = Check::compare(
            "theorem4",
            (
                result.value.add(&neg.value),
                (result.stderr.unwrap_or(0.0).powi(2) + neg.stderr.unwrap_or(0.0).powi(2)).sqrt(),
            ),
            (Quantity::Exact(Rational::one()), 0.0),
        );
        t4.pass &= match &result.value {
            Quantity::Exact(v) => !v.is_negative() && *v <= Rational::one(),
            Quantity::Approx(v) => {
                let slack = 4.0 * result.stderr.unwrap_or(0.0) + 1e-9;
                *v >= -slack && *v <= 1.0 + slack
            }
        };
        checks.push(t4);

        let fact = factorize(&p.weight, u, &p.settings)?;
        let joint = eta_times_tau(&fact, &p.formula, u, &p.settings)?;
        checks.push(Check::compare("corollary2", with_se(&joint), with_se(&result)));

        let mismatches = fact.reconstruction_mismatches(&p.weight, u, 1000, p.settings.seed);
        checks.push(Check::compare(
            "lemma3",
            (Quantity::Exact(Rational::from_integer(mismatches.into())), 0.0),
            (Quantity::Exact(Rational::zero()), 0.0),
        ));
    }

    Ok(IdentityReport {
        method: result.method,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::RealVar;
    use crate::measures::WeightExpr;
    use crate::rational::{frac, int};

    /// φ = (B1 ∧ 0≤x≤1) ∨ (¬B1 ∧ 0≤x≤2), w = ite(B1, x, 1), x ∈ [−10, 10].
    pub(crate) fn fixture() -> Problem {
        let u = Universe::new(
            vec!["B1".into()],
            vec![RealVar {
                name: "x".into(),
                lower: int(-10),
                upper: int(10),
            }],
        )
        .unwrap();
        let x = Polynomial::var(1, 0);
        let c = |v| Polynomial::constant(1, int(v));
        let f = Formula::or([
            Formula::and([Formula::var(0), Formula::le(&c(0), &x), Formula::le(&x, &c(1))]),
            Formula::and([
                Formula::not(Formula::var(0)),
                Formula::le(&c(0), &x),
                Formula::le(&x, &c(2)),
            ]),
        ]);
        let w = WeightSpec::new(
            &u,
            WeightExpr::ite(Formula::var(0), WeightExpr::Var(0), WeightExpr::Const(int(1))),
        )
        .unwrap();
        Problem::new(u, f, w).unwrap().with_settings(Settings::exact())
    }

    #[test]
    fn fixture_value() {
        let r = compute_wmi(&fixture()).unwrap();
        assert_eq!(r.as_exact(), Some(&frac(5, 2)));
        assert_eq!(r.method, Method::Exact);
        assert_eq!(r.stderr, None);
        let parts: Vec<Rational> = r.breakdown.iter().map(|(_, q)| q.as_exact().unwrap().clone()).collect();
        assert_eq!(parts, vec![frac(1, 2), int(2)]);
    }

    #[test]
    fn unsatisfiable_is_zero() {
        let p = fixture().with_formula(Formula::and([Formula::var(0), Formula::not(Formula::var(0))]));
        assert_eq!(compute_wmi(&p).unwrap().as_exact(), Some(&int(0)));
    }

    #[test]
    fn scaling() {
        let p = fixture();
        assert_eq!(scale_weight(&p, &int(1)).unwrap().as_exact(), Some(&frac(5, 2)));
        assert_eq!(scale_weight(&p, &int(2)).unwrap().as_exact(), Some(&int(5)));
        assert_eq!(scale_weight(&p, &frac(1, 2)).unwrap().as_exact(), Some(&frac(5, 4)));
        assert!(scale_weight(&p, &int(0)).is_err());
    }

    #[test]
    fn mc_agrees_with_exact() {
        let p = fixture().with_settings(Settings::mc(200_000, 42));
        let r = compute_wmi(&p).unwrap();
        let se = r.stderr.unwrap();
        assert!((r.value.to_f64() - 2.5).abs() <= 4.0 * se, "{} ± {se}", r.value);
        assert_eq!(r.seed, Some(42));
    }

    #[test]
    fn exact_mode_refuses_black_boxes() {
        let mut p = fixture();
        p.weight = WeightSpec::new(
            &p.universe,
            WeightExpr::Exp(Box::new(WeightExpr::Var(0))),
        )
        .unwrap();
        assert!(matches!(compute_wmi(&p), Err(WmiError::BackendUnavailable(_))));
        p.settings.backend = Backend::Auto;
        let r = compute_wmi(&p).unwrap();
        assert_eq!(r.method, Method::MonteCarlo);
        assert_eq!(r.definition, Definition::Lebesgue);
    }

    #[test]
    fn negative_weight_is_rejected() {
        let mut p = fixture();
        p.weight = WeightSpec::new(
            &p.universe,
            WeightExpr::Add(vec![WeightExpr::Var(0), WeightExpr::Const(int(-1))]),
        )
        .unwrap();
        assert!(matches!(compute_wmi(&p), Err(WmiError::NegativeWeight { .. })));
    }

    #[test]
    fn wmc_query_and_degenerate_case() {
        let u = Universe::booleans_only(2);
        let lw = crate::boolean_engine::LiteralWeights::from_pairs(vec![
            (frac(3, 10), frac(7, 10)),
            (frac(6, 10), frac(4, 10)),
        ])
        .unwrap();
        let w = WeightSpec::from_literal_weights(&u, &lw).unwrap();
        let f = Formula::or([Formula::var(0), Formula::var(1)]);
        let p = Problem::new(u, f, w).unwrap().with_settings(Settings::exact());
        assert_eq!(compute_wmc(&p).unwrap().as_exact(), Some(&frac(72, 100)));
        assert_eq!(compute_wmi(&p).unwrap().as_exact(), Some(&frac(72, 100)));
        let report = check_identities(&p).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(report.get("theorem1").is_some());
        assert!(report.get("corollary1").is_some());
        assert!(compute_wmc(&fixture()).is_err());
    }

    #[test]
    fn identities_on_fixture() {
        let report = check_identities(&fixture()).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(report.get("tonelli").is_some());
        assert!(report.get("theorem2").is_some());
        // w is negative on part of the box, so it is not a density
        assert!(report.get("corollary2").is_none());
    }

    #[test]
    fn auto_prefers_exact() {
        let mut p = fixture();
        p.settings.backend = Backend::Auto;
        assert_eq!(compute_wmi(&p).unwrap().method, Method::Exact);
    }
}
