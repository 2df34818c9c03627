//! Exact convex polytope computations over the rationals: vertex enumeration,
//! triangulation and volume.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, WmiError};
use crate::limits::Limits;
use crate::rational::{factorial, Rational};

pub type Point = Vec<Rational>;

/// The closed half-space `normal · x ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub bound: Rational,
}

impl HalfSpace {
    pub fn new(normal: Vec<Rational>, bound: Rational) -> Self {
        HalfSpace { normal, bound }
    }

    /// The closure of the complement, `−normal · x ≤ −bound`.
    pub fn flipped(&self) -> Self {
        HalfSpace {
            normal: self.normal.iter().map(|a| -a).collect(),
            bound: -&self.bound,
        }
    }

    fn lhs(&self, x: &[Rational]) -> Rational {
        self.normal
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (a, xi)| acc + a * xi)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.lhs(x) <= self.bound
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        self.lhs(x) == self.bound
    }
}

/// A bounded polytope in H-representation. The vertex list is computed on
/// first use and cached.
#[derive(Debug)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    vertices: OnceLock<Vec<Point>>,
}

impl Clone for Polytope {
    fn clone(&self) -> Self {
        let vertices = OnceLock::new();
        if let Some(v) = self.vertices.get() {
            let _ = vertices.set(v.clone());
        }
        Polytope {
            dim: self.dim,
            halfspaces: self.halfspaces.clone(),
            vertices,
        }
    }
}

impl Polytope {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Self {
        for h in &halfspaces {
            assert_eq!(h.normal.len(), dim, "half-space dimension mismatch");
        }
        Polytope {
            dim,
            halfspaces,
            vertices: OnceLock::new(),
        }
    }

    /// The axis-aligned box `Π [lo_i, hi_i]`.
    pub fn from_box(bounds: &[(Rational, Rational)]) -> Self {
        let dim = bounds.len();
        let mut hs = Vec::with_capacity(2 * dim);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            hs.push(HalfSpace::new(e.clone(), hi.clone()));
            e[i] = -Rational::one();
            hs.push(HalfSpace::new(e, -lo));
        }
        Polytope::new(dim, hs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn with(&self, h: HalfSpace) -> Polytope {
        let mut hs = self.halfspaces.clone();
        hs.push(h);
        Polytope::new(self.dim, hs)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x))
    }

    pub fn vertices(&self) -> Result<&[Point]> {
        self.vertices_with(&Limits::default())
    }

    pub fn vertices_with(&self, limits: &Limits) -> Result<&[Point]> {
        if let Some(v) = self.vertices.get() {
            return Ok(v);
        }
        let v = enumerate_vertices(self, limits)?;
        Ok(self.vertices.get_or_init(|| v))
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.vertices()?.is_empty())
    }
}

/// Solves the square system `rows · x = rhs`; `None` when singular.
fn solve(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = rows[col][col].recip();
        for r in 0..n {
            if r == col || rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] * &inv;
            subtract_row(&mut rows, r, col, &factor, col);
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some((0..n).map(|i| &rhs[i] / &rows[i][i]).collect())
}

/// `rows[target][from..] -= factor · rows[pivot][from..]`.
fn subtract_row(rows: &mut [Vec<Rational>], target: usize, pivot: usize, factor: &Rational, from: usize) {
    let (src, dst) = if pivot < target {
        let (a, b) = rows.split_at_mut(target);
        (&a[pivot], &mut b[0])
    } else {
        let (a, b) = rows.split_at_mut(pivot);
        (&b[0], &mut a[target])
    };
    for (d, s) in dst[from..].iter_mut().zip(&src[from..]) {
        *d -= factor * s;
    }
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for r in (rank + 1)..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] * &inv;
            subtract_row(&mut rows, r, rank, &factor, col);
        }
        rank += 1;
    }
    rank
}

/// Dimension of the affine hull of a point set; `None` for the empty set.
pub fn affine_dimension(points: &[&Point]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs: Vec<Vec<Rational>> = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    Some(rank(diffs))
}

fn determinant(mut rows: Vec<Vec<Rational>>) -> Rational {
    let n = rows.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            rows.swap(col, pivot);
            det = -det;
        }
        det *= &rows[col][col];
        let inv = rows[col][col].recip();
        for r in (col + 1)..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] * &inv;
            subtract_row(&mut rows, r, col, &factor, col);
        }
    }
    det
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn enumerate_vertices(p: &Polytope, limits: &Limits) -> Result<Vec<Point>> {
    let m = p.halfspaces.len();
    let n = p.dim;
    if m < n {
        return Err(WmiError::InvalidInput(format!(
            "polytope in dimension {n} needs at least {n} constraints, has {m}"
        )));
    }
    let subsets = binomial(m as u64, n as u64);
    if subsets > limits.max_vertex_subsets {
        return Err(WmiError::Capacity {
            what: "vertex enumeration subsets",
            limit: limits.max_vertex_subsets,
            actual: subsets,
        });
    }
    let mut found = BTreeSet::new();
    for combo in (0..m).combinations(n) {
        let rows = combo.iter().map(|&i| p.halfspaces[i].normal.clone()).collect();
        let rhs = combo.iter().map(|&i| p.halfspaces[i].bound.clone()).collect();
        if let Some(x) = solve(rows, rhs) {
            if p.contains(&x) {
                found.insert(x);
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Exact vertices of `p`, deduplicated and sorted lexicographically. Empty
/// iff `p` is empty.
pub fn vertex_enumeration(p: &Polytope) -> Result<Vec<Point>> {
    Ok(p.vertices()?.to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    vertices: Vec<Point>,
}

impl Simplex {
    /// `vertices` must hold `dim + 1` points of dimension `dim`.
    pub fn new(vertices: Vec<Point>) -> Self {
        let dim = vertices.len().saturating_sub(1);
        assert!(
            vertices.iter().all(|v| v.len() == dim),
            "a simplex in dimension d needs d + 1 vertices"
        );
        Simplex { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// `|det [v_1 − v_0, …, v_N − v_0]|`.
    pub fn abs_det(&self) -> Rational {
        let base = &self.vertices[0];
        let rows = self.vertices[1..]
            .iter()
            .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        determinant(rows).abs()
    }

    pub fn volume(&self) -> Rational {
        self.abs_det() / Rational::from_integer(factorial(self.dim() as u32))
    }
}

/// Pulling triangulation: cone from the lexicographically smallest vertex of
/// each face over the triangulations of the facets that avoid it.
fn fan(
    face: &[usize],
    dim: usize,
    verts: &[Point],
    tight: &[BTreeSet<usize>],
    out: &mut Vec<Vec<usize>>,
) {
    if dim == 0 {
        out.push(vec![face[0]]);
        return;
    }
    let apex = face[0];
    let face_set: BTreeSet<usize> = face.iter().copied().collect();
    let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for t in tight {
        if t.contains(&apex) {
            continue;
        }
        let sub: Vec<usize> = face_set.intersection(t).copied().collect();
        if sub.len() < dim || facets.contains(&sub) {
            continue;
        }
        let pts: Vec<&Point> = sub.iter().map(|&i| &verts[i]).collect();
        if affine_dimension(&pts) == Some(dim - 1) {
            facets.insert(sub);
        }
    }
    for facet in facets {
        let mut sub = Vec::new();
        fan(&facet, dim - 1, verts, tight, &mut sub);
        for mut s in sub {
            s.insert(0, apex);
            out.push(s);
        }
    }
}

pub fn triangulate(p: &Polytope) -> Result<Vec<Simplex>> {
    triangulate_with(p, &Limits::default())
}

/// Simplices covering `p` with null-measure overlaps. Lower-dimensional
/// polytopes yield no simplices.
pub fn triangulate_with(p: &Polytope, limits: &Limits) -> Result<Vec<Simplex>> {
    if p.dim > limits.max_exact_dim {
        return Err(WmiError::BackendUnavailable(format!(
            "exact triangulation supports dimension <= {}, got {}",
            limits.max_exact_dim, p.dim
        )));
    }
    let verts = p.vertices_with(limits)?;
    if verts.is_empty() {
        return Ok(Vec::new());
    }
    let all: Vec<&Point> = verts.iter().collect();
    if affine_dimension(&all) != Some(p.dim) {
        return Ok(Vec::new());
    }
    let tight: Vec<BTreeSet<usize>> = p
        .halfspaces
        .iter()
        .map(|h| {
            verts
                .iter()
                .enumerate()
                .filter(|(_, v)| h.is_tight(v))
                .map(|(i, _)| i)
                .collect::<BTreeSet<usize>>()
        })
        .unique()
        .collect();
    let face: Vec<usize> = (0..verts.len()).collect();
    let mut index_simplices = Vec::new();
    fan(&face, p.dim, verts, &tight, &mut index_simplices);
    Ok(index_simplices
        .into_iter()
        .map(|s| Simplex::new(s.into_iter().map(|i| verts[i].clone()).collect()))
        .collect())
}

/// Lebesgue measure of `p`.
pub fn volume(p: &Polytope) -> Result<Rational> {
    volume_with(p, &Limits::default())
}

pub fn volume_with(p: &Polytope, limits: &Limits) -> Result<Rational> {
    Ok(triangulate_with(p, limits)?
        .iter()
        .map(Simplex::volume)
        .fold(Rational::zero(), |acc, v| acc + v))
}

/// Vertex average, used as an interior witness point.
pub fn centroid(points: &[Point]) -> Option<Point> {
    let first = points.first()?;
    let n = Rational::from_integer(points.len().into());
    Some(
        (0..first.len())
            .map(|i| points.iter().fold(Rational::zero(), |acc, p| acc + &p[i]) / &n)
            .collect(),
    )
}
