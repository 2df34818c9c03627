//! Brute-force midpoint Riemann sums over a uniform grid.
//!
//! Deliberately naive: formulas and weights are evaluated node by node in
//! floating point at every grid midpoint, with no use of the polytope or
//! polynomial integration code.

use rayon::prelude::*;

use crate::error::{Result, WmiError};
use crate::formula::{condition_on, Assignment, FloatFormula, Formula};
use crate::measures::FloatWeight;
use crate::result::{Definition, MeasureResult, Method, Quantity};
use crate::wmi::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Cells per axis.
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(WmiError::InvalidInput(format!(
                "grid resolution must be at least 2, got {resolution}"
            )));
        }
        Ok(GridSpec { resolution })
    }

    /// The largest resolution with at most `cells` grid cells in `n` dimensions,
    /// capped at 1000.
    pub fn for_budget(n: usize, cells: u64) -> Self {
        let r = if n == 0 {
            1000
        } else {
            ((cells as f64).powf(1.0 / n as f64).floor() as usize).clamp(2, 1000)
        };
        GridSpec { resolution: r }
    }
}

/// `Σ_b Σ_cells [midpoint ⊨ φ]·w(b, midpoint)·cellvol`.
pub fn grid_oracle(p: &Problem, g: GridSpec) -> Result<f64> {
    Ok(grid_oracle_result(p, g)?.value.to_f64())
}

pub fn grid_oracle_result(p: &Problem, g: GridSpec) -> Result<MeasureResult> {
    let start = std::time::Instant::now();
    let g = GridSpec::new(g.resolution)?;
    let u = &p.universe;
    let n = u.num_reals();
    let r = g.resolution;
    let cells = (r as u64)
        .checked_pow(n as u32)
        .filter(|&c| c <= p.settings.limits.max_oracle_cells)
        .ok_or(WmiError::Capacity {
            what: "oracle grid cells",
            limit: p.settings.limits.max_oracle_cells,
            actual: (r as f64).powi(n as i32).min(u64::MAX as f64) as u64,
        })?;
    let m = u.num_booleans();
    if m > p.settings.limits.max_booleans {
        return Err(WmiError::Capacity {
            what: "Boolean variables for enumeration",
            limit: p.settings.limits.max_booleans as u64,
            actual: m as u64,
        });
    }
    let bounds = u.bounds_f64();
    let step: Vec<f64> = bounds.iter().map(|(lo, hi)| (hi - lo) / r as f64).collect();
    let cell_volume: f64 = step.iter().product();
    let weight = FloatWeight::direct(&p.weight);

    // Stripes along the first axis; the rest of the grid is walked inside.
    let stripes = if n == 0 { 1 } else { r };
    let inner = cells / stripes as u64;
    let mut breakdown = Vec::new();
    let mut total = 0.0;
    for b in Assignment::all(m) {
        let bv = b.values();
        let section = condition_on(&p.formula, &b);
        if section == Formula::False {
            continue;
        }
        let member = FloatFormula::new(&section);
        let partial: Vec<Result<f64>> = (0..stripes)
            .into_par_iter()
            .map(|s| {
                let mut x = vec![0.0; n];
                let mut sum = 0.0;
                for k in 0..inner {
                    let mut rest = k;
                    for axis in (0..n).rev() {
                        let i = if axis == 0 {
                            s
                        } else {
                            let i = (rest % r as u64) as usize;
                            rest /= r as u64;
                            i
                        };
                        x[axis] = bounds[axis].0 + (i as f64 + 0.5) * step[axis];
                    }
                    if member.eval(bv, &x) {
                        let v = weight.eval(bv, &x);
                        if v < 0.0 {
                            return Err(WmiError::NegativeWeight {
                                value: v.to_string(),
                                at: format!("b = {b}, x = {x:?}"),
                            });
                        }
                        sum += v;
                    }
                }
                Ok(sum)
            })
            .collect();
        let mut sum_b = 0.0;
        for s in partial {
            sum_b += s?;
        }
        let value = sum_b * cell_volume;
        if value != 0.0 {
            breakdown.push((b.clone(), Quantity::Approx(value)));
        }
        total += value;
    }
    Ok(MeasureResult {
        value: Quantity::Approx(total),
        method: Method::Oracle,
        definition: Definition::Riemann,
        stderr: None,
        seed: None,
        samples: None,
        breakdown,
        cells: cells as usize,
        empty_cells: 0,
        elapsed: start.elapsed(),
    })
}
