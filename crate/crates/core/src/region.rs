//! Decomposition of a real-only formula into pairwise-disjoint cells by
//! enumerating sign vectors over its distinct atoms.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, WmiError};
use crate::formula::{Atom, Formula, Universe};
use crate::geometry::{HalfSpace, Point, Polytope};
use crate::limits::Limits;
use crate::polynomial::Polynomial;
use crate::rational::Rational;

/// The geometric content of a cell.
#[derive(Debug, Clone)]
pub enum CellKind {
    /// Every constraint is linear; the cell is a bounded polytope.
    Polytope(Polytope),
    /// Some constraint is polynomial. `linear` holds the box and the linear
    /// constraints; `nonlinear` holds `p ≤ 0` conditions.
    Semialgebraic {
        linear: Polytope,
        nonlinear: Vec<Polynomial>,
    },
}

/// One cell of a decomposition: the region where each atom has the sign
/// recorded in `signs` (`true` = `θ̂ ≤ 0`, `false` = `θ̂ ≥ 0`).
#[derive(Debug, Clone)]
pub struct Cell {
    pub kind: CellKind,
    pub signs: Vec<bool>,
}

impl Cell {
    pub fn polytope(&self) -> Option<&Polytope> {
        match &self.kind {
            CellKind::Polytope(p) => Some(p),
            CellKind::Semialgebraic { .. } => None,
        }
    }

    pub fn is_exact_capable(&self) -> bool {
        matches!(self.kind, CellKind::Polytope(_))
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        match &self.kind {
            CellKind::Polytope(p) => p.contains(x),
            CellKind::Semialgebraic { linear, nonlinear } => {
                linear.contains(x) && nonlinear.iter().all(|p| !p.eval(x).is_positive())
            }
        }
    }
}

/// Cells together with the canonical atoms their sign vectors refer to.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub atoms: Vec<Atom>,
    pub cells: Vec<Cell>,
    index: HashMap<Atom, usize>,
}

impl Decomposition {
    /// Position of `atom` (after canonical rescaling) in the sign vectors.
    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        self.index.get(&atom.canonical()).copied()
    }

    /// The truth value `atom` takes throughout `cell`.
    pub fn sign_in(&self, atom: &Atom, cell: &Cell) -> Option<bool> {
        self.atom_index(atom).map(|i| cell.signs[i])
    }

    pub fn has_nonlinear(&self) -> bool {
        self.atoms.iter().any(|a| !a.is_linear())
    }
}

fn constraint_for(atom: &Atom, sign: bool) -> Constraint {
    let expr = if sign { atom.expr().clone() } else { -atom.expr() };
    match expr.as_affine() {
        // a·x + c ≤ 0  ⇔  a·x ≤ −c
        Some((a, c)) => Constraint::Linear(HalfSpace::new(a, -c)),
        None => Constraint::Nonlinear(expr),
    }
}

enum Constraint {
    Linear(HalfSpace),
    Nonlinear(Polynomial),
}

struct Search<'a> {
    skeleton: &'a Formula,
    atoms: &'a [Atom],
    index: &'a HashMap<Atom, usize>,
    limits: &'a Limits,
    dim: usize,
    cells: Vec<Cell>,
}

impl Search<'_> {
    fn skeleton_value(&self, signs: &[bool]) -> Option<bool> {
        self.skeleton.eval_partial(&|_| None, &|a: &Atom| {
            let i = self.index[&a.canonical()];
            signs.get(i).copied()
        })
    }

    fn run(
        &mut self,
        signs: &mut Vec<bool>,
        halfspaces: &mut Vec<HalfSpace>,
        nonlinear: &mut Vec<Polynomial>,
    ) -> Result<()> {
        if self.skeleton_value(signs) == Some(false) {
            return Ok(());
        }
        let polytope = Polytope::new(self.dim, halfspaces.clone());
        if polytope.vertices_with(self.limits)?.is_empty() {
            return Ok(());
        }
        if signs.len() == self.atoms.len() {
            let kind = if nonlinear.is_empty() {
                CellKind::Polytope(polytope)
            } else {
                CellKind::Semialgebraic {
                    linear: polytope,
                    nonlinear: nonlinear.clone(),
                }
            };
            self.cells.push(Cell {
                kind,
                signs: signs.clone(),
            });
            return Ok(());
        }
        let atom = &self.atoms[signs.len()];
        for sign in [true, false] {
            signs.push(sign);
            match constraint_for(atom, sign) {
                Constraint::Linear(h) => {
                    halfspaces.push(h);
                    self.run(signs, halfspaces, nonlinear)?;
                    halfspaces.pop();
                }
                Constraint::Nonlinear(p) => {
                    nonlinear.push(p);
                    self.run(signs, halfspaces, nonlinear)?;
                    nonlinear.pop();
                }
            }
            signs.pop();
        }
        Ok(())
    }
}

/// Splits `M(f) ∩ box` into cells, one per feasible sign vector over the
/// distinct atoms of `f` under which `f` holds.
pub fn decompose(f: &Formula, u: &Universe) -> Result<Decomposition> {
    decompose_with(f, &[], u, &Limits::default())
}

/// Like [`decompose`], additionally splitting along `extra` atoms (used for
/// piecewise weights so that every cell sees a single weight piece).
pub fn decompose_with(
    f: &Formula,
    extra: &[Atom],
    u: &Universe,
    limits: &Limits,
) -> Result<Decomposition> {
    if !f.is_real_only() {
        return Err(WmiError::InvalidInput(
            "decomposition needs a formula without Boolean variables".into(),
        ));
    }
    f.check_universe(u)?;
    let mut atoms: Vec<Atom> = Vec::new();
    let mut index = HashMap::new();
    for a in f.atoms().into_iter().chain(extra.iter()) {
        let key = a.canonical();
        if !index.contains_key(&key) {
            index.insert(key.clone(), atoms.len());
            atoms.push(key);
        }
    }
    if atoms.len() > limits.max_atoms {
        return Err(WmiError::Capacity {
            what: "distinct atoms in decomposition",
            limit: limits.max_atoms as u64,
            actual: atoms.len() as u64,
        });
    }
    let bounds = u.bounds();
    let mut search = Search {
        skeleton: f,
        atoms: &atoms,
        index: &index,
        limits,
        dim: u.num_reals(),
        cells: Vec::new(),
    };
    let mut halfspaces = Polytope::from_box(&bounds).halfspaces().to_vec();
    search.run(&mut Vec::new(), &mut halfspaces, &mut Vec::new())?;
    let cells = search.cells;
    Ok(Decomposition {
        atoms,
        cells,
        index,
    })
}

/// Outcome of an emptiness test; `exact` is false for sampled verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emptiness {
    pub empty: bool,
    pub exact: bool,
}

/// Number of seeded samples used to probe a semialgebraic cell.
pub const EMPTINESS_SAMPLES: usize = 4096;

/// Exact for polytopes (no vertex means empty). Semialgebraic cells are first
/// tested on their linear part, then probed with seeded rational samples in
/// the linear part's bounding box.
pub fn is_empty(cell: &Cell) -> Result<Emptiness> {
    match &cell.kind {
        CellKind::Polytope(p) => Ok(Emptiness {
            empty: p.vertices()?.is_empty(),
            exact: true,
        }),
        CellKind::Semialgebraic { linear, .. } => {
            let verts = linear.vertices()?;
            if verts.is_empty() {
                return Ok(Emptiness { empty: true, exact: true });
            }
            let hit = sample_hit(cell, verts);
            Ok(Emptiness {
                empty: !hit,
                exact: hit,
            })
        }
    }
}

fn sample_hit(cell: &Cell, verts: &[Point]) -> bool {
    let dim = verts[0].len();
    let lo: Vec<Rational> = (0..dim)
        .map(|i| verts.iter().map(|v| &v[i]).min().unwrap().clone())
        .collect();
    let hi: Vec<Rational> = (0..dim)
        .map(|i| verts.iter().map(|v| &v[i]).max().unwrap().clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ce11);
    let denom = Rational::from_integer(1_000_000.into());
    (0..EMPTINESS_SAMPLES).any(|_| {
        let x: Vec<Rational> = (0..dim)
            .map(|i| {
                let t = Rational::from_integer(rng.random_range(0..=1_000_000i64).into()) / &denom;
                &lo[i] + (&hi[i] - &lo[i]) * t
            })
            .collect();
        cell.contains(&x)
    })
}

/// Total measure of the polytope cells; semialgebraic cells are rejected.
pub fn total_volume(d: &Decomposition, limits: &Limits) -> Result<Rational> {
    let mut total = Rational::zero();
    for c in &d.cells {
        let p = c.polytope().ok_or_else(|| {
            WmiError::BackendUnavailable("semialgebraic cells have no exact volume".into())
        })?;
        total += crate::geometry::volume_with(p, limits)?;
    }
    Ok(total)
}
