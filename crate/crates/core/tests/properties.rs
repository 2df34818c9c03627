mod common;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::*;
use wmi_core::boolean_engine::{lwmc, wmc};
use wmi_core::formula::{
    condition_on, interpret, parse_formula, serialize_formula, Assignment, Formula, JsonPath,
};
use wmi_core::geometry::{triangulate, volume, HalfSpace, Polytope};
use wmi_core::measures::{eta, eta_times_tau, factorize, lift_literal_weights, BoolPdf};
use wmi_core::montecarlo::{mc_integrate, McParams};
use wmi_core::oracle::{grid_oracle, GridSpec};
use wmi_core::polynomial::integrate_poly_polytope;
use wmi_core::rational::{int, to_f64};
use wmi_core::region::{decompose, total_volume};
use wmi_core::wmi::{compute_wmi, Settings};
use wmi_core::{Limits, Quantity, Rational};

fn exact(q: &Quantity) -> Rational {
    q.as_exact().expect("exact value").clone()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

// ----------------------------------------------------------------- formula

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn connectives_commute_with_interpretation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_universe(&mut r, 3, 2);
        let pool: Vec<Formula> = (0..4).map(|_| random_atom(&mut r, &u)).collect();
        let f = random_lra_formula(&mut r, 3, &pool, 6);
        let g = random_lra_formula(&mut r, 3, &pool, 6);
        for _ in 0..20 {
            let b = Assignment::from_index(r.random_range(0..8), 3);
            let x = random_point(&mut r, &u, 16);
            let (vf, vg) = (interpret(&u, &f, &b, &x).unwrap(), interpret(&u, &g, &b, &x).unwrap());
            let and = Formula::and([f.clone(), g.clone()]);
            let or = Formula::or([f.clone(), g.clone()]);
            prop_assert_eq!(interpret(&u, &and, &b, &x).unwrap(), vf && vg);
            prop_assert_eq!(interpret(&u, &or, &b, &x).unwrap(), vf || vg);
            prop_assert_eq!(interpret(&u, &Formula::not(f.clone()), &b, &x).unwrap(), !vf);
        }
    }

    #[test]
    fn conditioning_preserves_truth(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_universe(&mut r, 3, 2);
        let pool: Vec<Formula> = (0..4).map(|_| random_atom(&mut r, &u)).collect();
        let f = random_lra_formula(&mut r, 3, &pool, 5);
        for _ in 0..1000 {
            let b = Assignment::from_index(r.random_range(0..8), 3);
            let x = random_point(&mut r, &u, 64);
            let fb = condition_on(&f, &b);
            prop_assert!(fb.is_real_only());
            prop_assert_eq!(fb.eval(b.values(), &x), f.eval(b.values(), &x));
        }
    }

    #[test]
    fn formula_json_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_universe(&mut r, 3, 2);
        let pool: Vec<Formula> = (0..4).map(|_| random_atom(&mut r, &u)).collect();
        let f = random_lra_formula(&mut r, 3, &pool, 5);
        let v = serialize_formula(&f, &u);
        let back = parse_formula(&v, &u, &JsonPath::root("formula")).unwrap();
        prop_assert_eq!(back, f);
    }
}

// ---------------------------------------------------------- boolean engine

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn wmc_matches_truth_table_and_lifting(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(1..=8);
        let f = random_prop_formula(&mut r, m, 5);
        let lw = random_literal_weights(&mut r, m);
        let direct = exact(&wmc(&f, &lw).unwrap().value);
        prop_assert_eq!(&direct, &truth_table_wmc(&f, &lw));
        let lifted = exact(&lwmc(&f, &lift_literal_weights(&lw)).unwrap().value);
        prop_assert_eq!(direct, lifted);
    }

    #[test]
    fn wmc_complement_additivity_monotonicity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(1..=8);
        let f = random_prop_formula(&mut r, m, 4);
        let g = Formula::and([random_prop_formula(&mut r, m, 4), Formula::not(f.clone())]);
        let lw = random_literal_weights(&mut r, m);
        let w = |h: &Formula| exact(&wmc(h, &lw).unwrap().value);
        let total = (0..m).fold(Rational::one(), |acc, i| acc * (lw.literal(i, true) + lw.literal(i, false)));
        prop_assert_eq!(w(&f) + w(&Formula::not(f.clone())), total);
        let union = Formula::or([f.clone(), g.clone()]);
        prop_assert_eq!(w(&union), w(&f) + w(&g));
        prop_assert!(w(&f) <= w(&union));
    }
}

// ---------------------------------------------------------------- geometry

fn permuted(p: &Polytope, perm: &[usize]) -> Polytope {
    let hs = p
        .halfspaces()
        .iter()
        .map(|h| HalfSpace::new(perm.iter().map(|&j| h.normal[j].clone()).collect(), h.bound.clone()))
        .collect();
    Polytope::new(p.dim(), hs)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn volume_invariants(seed in any::<u64>(), d in 2usize..=3) {
        let mut r = rng(seed);
        let cuts = r.random_range(0..=3);
        let p = random_polytope(&mut r, d, cuts);
        let v = volume(&p).unwrap();
        let simplices: Rational = triangulate(&p).unwrap().iter().map(|s| s.volume()).sum();
        prop_assert_eq!(&simplices, &v);
        let h = random_halfspace(&mut r, d);
        let split = volume(&p.with(h.clone())).unwrap() + volume(&p.with(h.flipped())).unwrap();
        prop_assert_eq!(&split, &v);
        let perm: Vec<usize> = if d == 2 { vec![1, 0] } else { vec![2, 0, 1] };
        prop_assert_eq!(&volume(&permuted(&p, &perm)).unwrap(), &v);
        let verts = p.vertices().unwrap().to_vec();
        let independent = if d == 2 { shoelace_area(&verts) } else { cone_volume_3d(&p, &verts) };
        prop_assert_eq!(independent, v);
    }

    #[test]
    fn polytope_integration_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = r.random_range(1..=3);
        let u = random_universe(&mut r, 0, d);
        let p = Polytope::from_box(&u.bounds()).with(random_halfspace(&mut r, d));
        let f = nonneg_poly(&mut r, &u, 3, false);
        let g = nonneg_poly(&mut r, &u, 3, false);
        let a = rat(&mut r, -3, 3, 4);
        let combo = &f.scale(&a) + &g;
        let lhs = integrate_poly_polytope(&combo, &p).unwrap();
        let rhs = a * integrate_poly_polytope(&f, &p).unwrap() + integrate_poly_polytope(&g, &p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

// ------------------------------------------------------------------ region

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn cells_partition_the_box_and_respect_signs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=2);
        let u = random_universe(&mut r, 0, n);
        let pool: Vec<Formula> = (0..r.random_range(1..=4)).map(|_| random_atom(&mut r, &u)).collect();
        let f = random_lra_formula(&mut r, 0, &pool, 3);
        let sat = decompose(&f, &u).unwrap();
        let unsat = decompose(&Formula::not(f.clone()), &u).unwrap();
        let limits = Limits::default();
        let covered = total_volume(&sat, &limits).unwrap() + total_volume(&unsat, &limits).unwrap();
        prop_assert_eq!(covered, u.box_volume());
        for cell in &sat.cells {
            let poly = cell.polytope().unwrap();
            // Flat cells lie on atom boundaries; only full cells have interior centroids.
            if volume(poly).unwrap().is_zero() {
                continue;
            }
            let verts = poly.vertices().unwrap();
            let centre = wmi_core::geometry::centroid(verts).unwrap();
            prop_assert!(f.eval(&[], &centre));
            for (i, atom) in sat.atoms.iter().enumerate() {
                prop_assert_eq!(atom.holds(&centre), cell.signs[i]);
            }
        }
        // The satisfying volume agrees with a grid count.
        let p = wmi_core::wmi::Problem::new(u.clone(), f, wmi_core::WeightSpec::one(&u)).unwrap();
        let grid = grid_oracle(&p, GridSpec::for_budget(n, 250_000)).unwrap();
        let exact = to_f64(&total_volume(&sat, &limits).unwrap());
        prop_assert!((grid - exact).abs() <= 2e-2 * (1.0 + exact), "{} vs {}", grid, exact);
    }
}

// ------------------------------------------------------------- Monte Carlo

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn mc_is_deterministic_and_unbiased_on_a_box(seed in any::<u64>()) {
        let bounds = [(0.0, 2.0), (-1.0, 1.0)];
        let f = |x: &[f64]| x[0] * x[0] + (x[1] + 1.0);
        let params = McParams::new(20_000, seed);
        let a = mc_integrate(|_: &[f64]| true, f, &bounds, params).unwrap();
        let b = mc_integrate(|_: &[f64]| true, f, &bounds, params).unwrap();
        prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        // ∫∫ x² + y + 1 over [0,2]×[-1,1] = 16/3 + 4.
        let truth = 16.0 / 3.0 + 4.0;
        prop_assert!((a.estimate - truth).abs() <= 6.0 * a.stderr);
    }
}

// ---------------------------------------------------------------- measures

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn eta_is_complementary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(1..=6);
        let lw = probabilistic_literal_weights(&mut r, m);
        let pdf = BoolPdf::from_weight(&lift_literal_weights(&lw)).unwrap();
        let all: Vec<Assignment> = Assignment::all(m).collect();
        let (s, rest): (Vec<&Assignment>, Vec<&Assignment>) = all.iter().partition(|_| r.random_bool(0.5));
        let total = exact(&eta(&pdf, s.iter().copied())) + exact(&eta(&pdf, rest.iter().copied()));
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn product_measure_matches_wmi_and_is_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fx = pdf_fixture(&mut r, seed % 3 == 0);
        let u = &fx.universe;
        let settings = Settings::exact();
        let fact = factorize(&fx.weight, u, &settings).unwrap();
        let m = u.num_booleans();
        let f = random_lra_formula(&mut r, m, &fx.pool, 3);
        let g = Formula::and([random_lra_formula(&mut r, m, &fx.pool, 3), Formula::not(f.clone())]);
        let nu = |h: &Formula| {
            let p = wmi_core::wmi::Problem::new(u.clone(), h.clone(), fx.weight.clone()).unwrap().with_settings(settings.clone());
            exact(&compute_wmi(&p).unwrap().value)
        };
        let prod = exact(&eta_times_tau(&fact, &f, u, &settings).unwrap().value);
        prop_assert_eq!(&prod, &nu(&f));
        prop_assert_eq!(nu(&Formula::or([f.clone(), g.clone()])), nu(&f) + nu(&g));
        prop_assert!(prod >= Rational::zero() && prod <= Rational::one());
    }
}

// --------------------------------------------------------------------- wmi

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn wmi_backends_agree_and_measure_is_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_lra_problem(&mut r, 3, 2, 4, 2).with_settings(Settings::exact());
        let m = p.universe.num_booleans();
        let pool: Vec<Formula> = (0..3).map(|_| random_atom(&mut r, &p.universe)).collect();
        let g = Formula::and([random_lra_formula(&mut r, m, &pool, 3), Formula::not(p.formula.clone())]);
        let v = |f: &Formula| exact(&compute_wmi(&p.with_formula(f.clone())).unwrap().value);
        let (vf, vg) = (v(&p.formula), v(&g));
        let union = Formula::or([p.formula.clone(), g.clone()]);
        prop_assert_eq!(v(&union), &vf + &vg);
        prop_assert!(vf <= v(&union));

        let mc = compute_wmi(&p.clone().with_settings(Settings::mc(50_000, seed))).unwrap();
        let se = mc.stderr.unwrap();
        let diff = (mc.value.to_f64() - to_f64(&vf)).abs();
        prop_assert!(diff <= 5.0 * se + 1e-9 * (1.0 + to_f64(&vf)), "{} vs {} (se {})", mc.value.to_f64(), vf, se);
        prop_assert!(vf >= int(0));
    }
}
