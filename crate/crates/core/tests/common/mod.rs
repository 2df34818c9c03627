//! Seeded generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wmi_core::boolean_engine::LiteralWeights;
use wmi_core::formula::{Assignment, Formula, RealVar, Universe};
use wmi_core::geometry::{HalfSpace, Point, Polytope};
use wmi_core::measures::{WeightExpr, WeightSpec};
use wmi_core::polynomial::Polynomial;
use wmi_core::rational::{frac, int, Rational};
use wmi_core::wmi::Problem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `k/den` with `k` uniform in `lo*den..=hi*den`.
pub fn rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    frac(rng.random_range(lo * den..=hi * den), den)
}

// ---------------------------------------------------------------- formulas

pub fn literal(rng: &mut ChaCha8Rng, m: usize) -> Formula {
    let v = Formula::var(rng.random_range(0..m));
    if rng.random_bool(0.5) {
        Formula::not(v)
    } else {
        v
    }
}

pub fn random_prop_formula(rng: &mut ChaCha8Rng, m: usize, depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..20) {
            0 => Formula::True,
            1 => Formula::False,
            _ => literal(rng, m),
        };
    }
    match rng.random_range(0..5) {
        0 => Formula::not(random_prop_formula(rng, m, depth - 1)),
        k => {
            let n = rng.random_range(2..=3);
            let kids: Vec<Formula> = (0..n).map(|_| random_prop_formula(rng, m, depth - 1)).collect();
            if k % 2 == 0 {
                Formula::and(kids)
            } else {
                Formula::or(kids)
            }
        }
    }
}

pub fn random_literal_weights(rng: &mut ChaCha8Rng, m: usize) -> LiteralWeights {
    let pairs = (0..m)
        .map(|_| {
            let den = rng.random_range(1..=9);
            (rat(rng, 0, 3, den), rat(rng, 0, 3, den))
        })
        .collect();
    LiteralWeights::from_pairs(pairs).unwrap()
}

/// Literal weights with `w(B_i) + w(¬B_i) = 1`.
pub fn probabilistic_literal_weights(rng: &mut ChaCha8Rng, m: usize) -> LiteralWeights {
    let pairs = (0..m)
        .map(|_| {
            let den = rng.random_range(1..=12);
            let p = rat(rng, 0, 1, den);
            (p.clone(), Rational::one() - p)
        })
        .collect();
    LiteralWeights::from_pairs(pairs).unwrap()
}

/// Truth value computed by a separate tree walk over the AST (Boolean part
/// only; atoms are not allowed).
pub fn truth(f: &Formula, b: &[bool]) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Var(i) => b[*i],
        Formula::Atom(_) => panic!("propositional formula expected"),
        Formula::Not(c) => !truth(c, b),
        Formula::And(cs) => cs.iter().all(|c| truth(c, b)),
        Formula::Or(cs) => cs.iter().any(|c| truth(c, b)),
    }
}

/// `Σ_{b ⊨ f} Π w(ℓ)` over the full truth table, with its own bit order.
pub fn truth_table_wmc(f: &Formula, lw: &LiteralWeights) -> Rational {
    let m = lw.len();
    let mut total = Rational::zero();
    for mask in 0u32..(1 << m) {
        let b: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        if truth(f, &b) {
            let mut w = Rational::one();
            for (i, &v) in b.iter().enumerate() {
                w *= lw.literal(i, v);
            }
            total += w;
        }
    }
    total
}

// ------------------------------------------------------- SMT(LRA) problems

pub fn random_universe(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Universe {
    let names = ["x", "y", "z"];
    let reals = (0..n)
        .map(|i| {
            let lower = rat(rng, -1, 0, 2);
            let upper = &lower + rat(rng, 1, 2, 2).max(frac(1, 2));
            RealVar {
                name: names[i].into(),
                lower,
                upper,
            }
        })
        .collect();
    Universe::new((0..m).map(|i| format!("B{}", i + 1)).collect(), reals).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, u: &Universe, den: i64) -> Point {
    u.bounds()
        .iter()
        .map(|(lo, hi)| lo + (hi - lo) * frac(rng.random_range(0..=den), den))
        .collect()
}

/// A linear atom whose hyperplane passes through a random box point.
pub fn random_atom(rng: &mut ChaCha8Rng, u: &Universe) -> Formula {
    let n = u.num_reals();
    loop {
        let a: Vec<Rational> = (0..n).map(|_| int(rng.random_range(-2..=2))).collect();
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        let p = random_point(rng, u, 8);
        let c: Rational = a.iter().zip(&p).map(|(ai, pi)| ai * pi).sum();
        let lhs = Polynomial::linear(&a, Rational::zero());
        let rhs = Polynomial::constant(n, c);
        return if rng.random_bool(0.5) {
            Formula::le(&lhs, &rhs)
        } else {
            Formula::le(&rhs, &lhs)
        };
    }
}

pub fn random_lra_formula(rng: &mut ChaCha8Rng, m: usize, pool: &[Formula], depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        let leaf = if m == 0 || rng.random_bool(0.6) {
            pool[rng.random_range(0..pool.len())].clone()
        } else {
            Formula::var(rng.random_range(0..m))
        };
        return if rng.random_bool(0.3) {
            Formula::not(leaf)
        } else {
            leaf
        };
    }
    let n = rng.random_range(2..=3);
    let kids: Vec<Formula> = (0..n)
        .map(|_| random_lra_formula(rng, m, pool, depth - 1))
        .collect();
    match rng.random_range(0..5) {
        0 => Formula::not(Formula::and(kids)),
        1 | 2 => Formula::and(kids),
        _ => Formula::or(kids),
    }
}

/// `(x_j − lo_j)` or `(hi_j − x_j)`: non-negative on the box.
fn box_factor(rng: &mut ChaCha8Rng, u: &Universe) -> Polynomial {
    let n = u.num_reals();
    let j = rng.random_range(0..n);
    let (lo, hi) = u.bounds()[j].clone();
    let x = Polynomial::var(n, j);
    if rng.random_bool(0.5) {
        &x - &Polynomial::constant(n, lo)
    } else {
        &Polynomial::constant(n, hi) - &x
    }
}

/// A polynomial of degree at most `max_deg` that is non-negative on the box:
/// a non-negative combination of products of box factors.
pub fn nonneg_poly(rng: &mut ChaCha8Rng, u: &Universe, max_deg: u32, positive_constant: bool) -> Polynomial {
    let n = u.num_reals();
    let base = if positive_constant {
        rat(rng, 1, 2, 4)
    } else {
        rat(rng, 0, 1, 4)
    };
    let mut p = Polynomial::constant(n, base);
    for _ in 0..rng.random_range(1..=3) {
        let mut t = Polynomial::constant(n, rat(rng, 0, 1, 4));
        for _ in 0..rng.random_range(0..=max_deg) {
            t = &t * &box_factor(rng, u);
        }
        p = &p + &t;
    }
    p
}

pub fn poly_expr(p: &Polynomial) -> WeightExpr {
    WeightExpr::from_polynomial(p)
}

/// `ite(B_i, P1, ite(atom, P2, P3))` with non-negative polynomial pieces.
pub fn random_weight(rng: &mut ChaCha8Rng, u: &Universe, pool: &[Formula], max_deg: u32) -> WeightSpec {
    let piece = |rng: &mut ChaCha8Rng| poly_expr(&nonneg_poly(rng, u, max_deg, false));
    let inner = WeightExpr::ite(pool[0].clone(), piece(rng), piece(rng));
    let expr = if u.num_booleans() > 0 {
        let i = rng.random_range(0..u.num_booleans());
        WeightExpr::ite(Formula::var(i), piece(rng), inner)
    } else {
        inner
    };
    WeightSpec::new(u, expr).unwrap()
}

/// Random SMT(LRA) problem: `M ≤ max_m`, `1 ≤ N ≤ max_n`, at most `max_atoms`
/// distinct atoms, weight degree at most `max_deg`.
pub fn random_lra_problem(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize, max_atoms: usize, max_deg: u32) -> Problem {
    let m = rng.random_range(1..=max_m);
    let n = rng.random_range(1..=max_n);
    let u = random_universe(rng, m, n);
    let pool: Vec<Formula> = (0..rng.random_range(2..=max_atoms))
        .map(|_| random_atom(rng, &u))
        .collect();
    let f = random_lra_formula(rng, m, &pool, 3);
    let w = random_weight(rng, &u, &pool, max_deg);
    Problem::new(u, f, w).unwrap()
}

// ----------------------------------------------------------- PDF fixtures

/// `w(b, x) = π_b·P_b(x)/Z_b` with `Z_b = ∫_box P_b`.
pub struct PdfFixture {
    pub universe: Universe,
    pub weight: WeightSpec,
    /// `π_b`, indexed by `Assignment::index`.
    pub mix: Vec<Rational>,
    /// Normalized densities `P_b/Z_b`.
    pub densities: Vec<Polynomial>,
    pub pool: Vec<Formula>,
}

/// The conjunction of literals fixing every Boolean to `b`.
pub fn cube(b: &Assignment) -> Formula {
    Formula::and(b.values().iter().enumerate().map(|(i, &v)| {
        if v {
            Formula::var(i)
        } else {
            Formula::not(Formula::var(i))
        }
    }))
}

/// `∫_box p dλ` by the product rule for monomials.
pub fn box_integral(p: &Polynomial, bounds: &[(Rational, Rational)]) -> Rational {
    p.terms()
        .map(|(e, c)| {
            e.iter().zip(bounds).fold(c.clone(), |acc, (&k, (lo, hi))| {
                let k1 = k as usize + 1;
                acc * (num_traits::pow(hi.clone(), k1) - num_traits::pow(lo.clone(), k1))
                    / int(k1 as i64)
            })
        })
        .sum()
}

pub fn pdf_fixture(rng: &mut ChaCha8Rng, zero_branch: bool) -> PdfFixture {
    let m = rng.random_range(1..=3);
    let n = rng.random_range(1..=2);
    let u = random_universe(rng, m, n);
    let k = 1usize << m;
    let mut raw: Vec<i64> = (0..k).map(|_| rng.random_range(1..=5)).collect();
    if zero_branch {
        raw[rng.random_range(0..k)] = 0;
    }
    let total: i64 = raw.iter().sum();
    let mix: Vec<Rational> = raw.iter().map(|&r| frac(r, total)).collect();
    let bounds = u.bounds();
    let densities: Vec<Polynomial> = (0..k)
        .map(|_| {
            let p = nonneg_poly(rng, &u, 2, true);
            let z = box_integral(&p, &bounds);
            p.scale(&z.recip())
        })
        .collect();
    let mut expr = poly_expr(&densities[k - 1].scale(&mix[k - 1]));
    for idx in (0..k - 1).rev() {
        let b = Assignment::from_index(idx as u64, m);
        expr = WeightExpr::ite(cube(&b), poly_expr(&densities[idx].scale(&mix[idx])), expr);
    }
    let weight = WeightSpec::new(&u, expr).unwrap();
    let pool = (0..rng.random_range(2..=4)).map(|_| random_atom(rng, &u)).collect();
    PdfFixture {
        universe: u,
        weight,
        mix,
        densities,
        pool,
    }
}

// --------------------------------------------------------------- polytopes

/// The unit box `[0,1]^d` cut by `cuts` half-spaces through random points
/// that keep the centre inside.
pub fn random_polytope(rng: &mut ChaCha8Rng, d: usize, cuts: usize) -> Polytope {
    let mut p = Polytope::from_box(&vec![(int(0), int(1)); d]);
    let centre = vec![frac(1, 2); d];
    for _ in 0..cuts {
        let h = random_halfspace(rng, d);
        p = p.with(if h.contains(&centre) { h } else { h.flipped() });
    }
    p
}

pub fn random_halfspace(rng: &mut ChaCha8Rng, d: usize) -> HalfSpace {
    loop {
        let a: Vec<Rational> = (0..d).map(|_| int(rng.random_range(-3..=3))).collect();
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        let p: Vec<Rational> = (0..d).map(|_| frac(rng.random_range(1..=15), 16)).collect();
        let c = a.iter().zip(&p).map(|(x, y)| x * y).sum();
        return HalfSpace::new(a, c);
    }
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn mean(points: &[&Point]) -> Point {
    let k = int(points.len() as i64);
    (0..points[0].len())
        .map(|i| points.iter().map(|p| p[i].clone()).sum::<Rational>() / &k)
        .collect()
}

/// Exact angular order of planar points `(u, v)` around the origin.
fn angle_cmp(a: &(Rational, Rational), b: &(Rational, Rational)) -> Ordering {
    let half = |p: &(Rational, Rational)| p.1.is_negative() || (p.1.is_zero() && p.0.is_negative());
    half(a).cmp(&half(b)).then_with(|| {
        let c = &a.0 * &b.1 - &a.1 * &b.0;
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Vertices of a face ordered counter-clockwise around `normal`.
fn ordered_face(verts: &[&Point], normal: &[Rational]) -> Vec<Point> {
    let c = mean(verts);
    let e1 = sub(verts[0], &c);
    let e2 = cross(normal, &e1);
    let mut coords: Vec<((Rational, Rational), &Point)> = verts
        .iter()
        .map(|v| {
            let d = sub(v, &c);
            ((dot(&d, &e1), dot(&d, &e2)), *v)
        })
        .collect();
    coords.sort_by(|a, b| angle_cmp(&a.0, &b.0));
    coords.into_iter().map(|(_, v)| v.clone()).collect()
}

/// Shoelace area of a 2D polytope from its vertices.
pub fn shoelace_area(verts: &[Point]) -> Rational {
    if verts.len() < 3 {
        return Rational::zero();
    }
    let refs: Vec<&Point> = verts.iter().collect();
    let c = mean(&refs);
    let mut pts: Vec<((Rational, Rational), &Point)> = verts
        .iter()
        .map(|v| ((&v[0] - &c[0], &v[1] - &c[1]), v))
        .collect();
    pts.sort_by(|a, b| angle_cmp(&a.0, &b.0));
    let n = pts.len();
    let twice: Rational = (0..n)
        .map(|i| {
            let (p, q) = (pts[i].1, pts[(i + 1) % n].1);
            &p[0] * &q[1] - &q[0] * &p[1]
        })
        .sum();
    twice.abs() / int(2)
}

/// Volume of a 3D polytope as a sum of cones from its vertex centroid over
/// the faces, each face fanned from its own centroid.
pub fn cone_volume_3d(p: &Polytope, verts: &[Point]) -> Rational {
    if verts.len() < 4 {
        return Rational::zero();
    }
    let all: Vec<&Point> = verts.iter().collect();
    let apex = mean(&all);
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut total = Rational::zero();
    for h in p.halfspaces() {
        let idx: Vec<usize> = (0..verts.len())
            .filter(|&i| h.is_tight(&verts[i]))
            .collect();
        if idx.len() < 3 || seen.contains(&idx) {
            continue;
        }
        seen.push(idx.clone());
        let face: Vec<&Point> = idx.iter().map(|&i| &verts[i]).collect();
        let ordered = ordered_face(&face, &h.normal);
        let fc = mean(&face);
        let k = ordered.len();
        for i in 0..k {
            let a = sub(&ordered[i], &apex);
            let b = sub(&ordered[(i + 1) % k], &apex);
            let c = sub(&fc, &apex);
            total += dot(&a, &cross(&b, &c)).abs() / int(6);
        }
    }
    total
}
