//! Sparse multivariate polynomials with rational coefficients, and their exact
//! integration over simplices and convex polytopes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, WmiError};
use crate::geometry::{self, Polytope, Simplex};
use crate::limits::Limits;
use crate::rational::{factorial, to_f64, Rational};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// A polynomial over a fixed number of variables. Zero coefficients are never
/// stored and terms are kept in exponent order, so structural equality is
/// polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exps, Rational::one());
        p
    }

    /// Builds `Σ coeffs[i]·x_i + constant`.
    pub fn linear(coeffs: &[Rational], constant: Rational) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, constant);
        for (i, c) in coeffs.iter().enumerate() {
            let mut exps = vec![0; n];
            exps[i] = 1;
            p.add_term(exps, c.clone());
        }
        p
    }

    pub fn monomial(exponents: Exponents, coeff: Rational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    /// The value of a constant polynomial.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Splits an affine polynomial into `(coefficients, constant)`.
    pub fn as_affine(&self) -> Option<(Vec<Rational>, Rational)> {
        if !self.is_linear() {
            return None;
        }
        let mut coeffs = vec![Rational::zero(); self.nvars];
        let mut constant = Rational::zero();
        for (e, c) in &self.terms {
            match e.iter().position(|&k| k == 1) {
                Some(i) => coeffs[i] = c.clone(),
                None => constant = c.clone(),
            }
        }
        Some((coeffs, constant))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact evaluation. Powers of each coordinate are computed once and
    /// shared across terms.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars, "point dimension mismatch");
        let mut powers: Vec<Vec<Rational>> = vec![vec![Rational::one()]; self.nvars];
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let table = &mut powers[i];
                while table.len() <= k as usize {
                    let next = table.last().unwrap() * &x[i];
                    table.push(next);
                }
                term *= &table[k as usize];
            }
            acc += term;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(to_f64(c), |acc, (&k, &xi)| acc * xi.powi(k as i32))
            })
            .sum()
    }

    /// Substitutes `x_i = images[i]` where every image is a polynomial over a
    /// common variable set.
    pub fn compose(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target = images.first().map_or(0, |p| p.nvars);
        let mut cache: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(p.nvars), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let table = &mut cache[i];
                while table.len() <= k as usize {
                    let next = table.last().unwrap() * &images[i];
                    table.push(next);
                }
                term = &term * &table[k as usize];
            }
            out = &out + &term;
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "polynomial arity mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

pub fn poly_eval(p: &Polynomial, x: &[Rational]) -> Rational {
    p.eval(x)
}

/// `∫_{Δ_N} λ^β dλ = Π β_i! / (N + |β|)!` over the standard simplex
/// `{λ ≥ 0, Σλ ≤ 1}`.
fn dirichlet_moment(beta: &[u32]) -> Rational {
    let n = beta.len() as u32;
    let total: u32 = beta.iter().sum();
    let num = beta
        .iter()
        .fold(BigInt::one(), |acc, &b| acc * factorial(b));
    Rational::new(num, factorial(n + total))
}

/// Integral over the standard simplex of a polynomial in barycentric-offset
/// coordinates.
fn integrate_standard_simplex(p: &Polynomial) -> Rational {
    p.terms()
        .map(|(e, c)| c * dirichlet_moment(e))
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// Affine images `x_i = v0_i + Σ_j (v_j − v0)_i λ_j` mapping the standard
/// simplex onto `s`.
fn simplex_chart(s: &Simplex) -> Vec<Polynomial> {
    let verts = s.vertices();
    let n = s.dim();
    let base = &verts[0];
    (0..n)
        .map(|i| {
            let coeffs: Vec<Rational> = (1..=n).map(|j| &verts[j][i] - &base[i]).collect();
            Polynomial::linear(&coeffs, base[i].clone())
        })
        .collect()
}

/// Exact `∫_s p dλ` by pulling `p` back to the standard simplex.
pub fn integrate_poly_simplex(p: &Polynomial, s: &Simplex) -> Rational {
    assert_eq!(p.nvars(), s.dim(), "dimension mismatch");
    let jac = s.abs_det();
    if jac.is_zero() || p.is_zero() {
        return Rational::zero();
    }
    let pulled = p.compose(&simplex_chart(s));
    integrate_standard_simplex(&pulled) * jac
}

/// Exact `∫_s x^α dλ`; degenerate simplices integrate to 0.
pub fn integrate_monomial_simplex(exponents: &[u32], s: &Simplex) -> Rational {
    integrate_poly_simplex(
        &Polynomial::monomial(exponents.to_vec(), Rational::one()),
        s,
    )
}

/// Exact `∫_q p dλ` over a bounded polytope, summed over its triangulation.
pub fn integrate_poly_polytope(p: &Polynomial, q: &Polytope) -> Result<Rational> {
    integrate_poly_polytope_with(p, q, &Limits::default())
}

pub fn integrate_poly_polytope_with(p: &Polynomial, q: &Polytope, limits: &Limits) -> Result<Rational> {
    if p.degree() > limits.max_exact_degree {
        return Err(WmiError::BackendUnavailable(format!(
            "polynomial degree {} exceeds exact cap {}",
            p.degree(),
            limits.max_exact_degree
        )));
    }
    if p.is_zero() {
        return Ok(Rational::zero());
    }
    let simplices = geometry::triangulate_with(q, limits)?;
    Ok(simplices
        .iter()
        .map(|s| integrate_poly_simplex(p, s))
        .fold(Rational::zero(), |acc, v| acc + v))
}

/// The first point at which `p` is negative, with its value.
pub fn first_negative(p: &Polynomial, points: &[Vec<Rational>]) -> Option<(Vec<Rational>, Rational)> {
    points
        .iter()
        .map(|x| (x.clone(), p.eval(x)))
        .find(|(_, v)| v.is_negative())
}
