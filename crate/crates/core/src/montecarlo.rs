//! Seeded hit-or-miss Monte Carlo integration over a bounding box.
//!
//! Sample `i` of stream `s` is read from a fixed position of the ChaCha8
//! stream selected by `(seed, s)`, so an estimate depends only on the inputs
//! and never on how the work is split across threads. Samples are grouped
//! into a fixed number of contiguous shards; each shard accumulates with
//! Kahan summation and shard totals are combined in shard order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, WmiError};

/// Number of shards a run is split into, independent of the thread count.
pub const SHARDS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McParams {
    pub samples: u64,
    pub seed: u64,
    /// Independent sub-stream, e.g. one per Boolean assignment.
    pub stream: u64,
}

impl McParams {
    pub fn new(samples: u64, seed: u64) -> Self {
        McParams {
            samples,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        McParams { stream, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: Kahan,
    sum_sq: Kahan,
}

fn shard_range(shard: u64, n: u64) -> (u64, u64) {
    (shard * n / SHARDS, (shard + 1) * n / SHARDS)
}

fn rng_at(params: &McParams, dim: usize, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(params.stream);
    // Each coordinate consumes one u64, i.e. two 32-bit words.
    rng.set_word_pos(u128::from(index) * 2 * dim as u128);
    rng
}

/// Estimates `∫_box density·[member] dλ` from `n` uniform samples.
///
/// Values are shifted by the first sample's integrand before accumulating
/// second moments, so a constant integrand has exactly zero variance.
pub fn mc_integrate<M, D>(
    member: M,
    density: D,
    bounds: &[(f64, f64)],
    params: McParams,
) -> Result<McEstimate>
where
    M: Fn(&[f64]) -> bool + Sync,
    D: Fn(&[f64]) -> f64 + Sync,
{
    let n = params.samples;
    if n < 2 {
        return Err(WmiError::InvalidInput(format!(
            "Monte Carlo needs at least 2 samples, got {n}"
        )));
    }
    if bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
        return Err(WmiError::InvalidInput("Monte Carlo box must be finite".into()));
    }
    let dim = bounds.len();
    let volume: f64 = bounds.iter().map(|(lo, hi)| hi - lo).product();

    let integrand = |x: &[f64]| -> Result<f64> {
        if !member(x) {
            return Ok(0.0);
        }
        let v = density(x);
        if v < 0.0 || v.is_nan() {
            return Err(WmiError::NegativeWeight {
                value: v.to_string(),
                at: format!("{x:?}"),
            });
        }
        Ok(v)
    };

    let draw = |rng: &mut ChaCha8Rng, x: &mut [f64]| {
        for (xi, (lo, hi)) in x.iter_mut().zip(bounds) {
            let u: f64 = rng.random();
            *xi = lo + (hi - lo) * u;
        }
    };

    let shift = {
        let mut x = vec![0.0; dim];
        draw(&mut rng_at(&params, dim, 0), &mut x);
        integrand(&x)?
    };

    let shards: Vec<Result<Moments>> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let (start, end) = shard_range(shard, n);
            let mut m = Moments::default();
            if start == end {
                return Ok(m);
            }
            let mut rng = rng_at(&params, dim, start);
            let mut x = vec![0.0; dim];
            for _ in start..end {
                draw(&mut rng, &mut x);
                let d = integrand(&x)? - shift;
                m.sum.add(d);
                m.sum_sq.add(d * d);
            }
            Ok(m)
        })
        .collect();

    let mut sum = Kahan::default();
    let mut sum_sq = Kahan::default();
    for s in shards {
        let s = s?;
        sum.add(s.sum.sum);
        sum_sq.add(s.sum_sq.sum);
    }
    let nf = n as f64;
    let mean_shifted = sum.sum / nf;
    let mean = shift + mean_shifted;
    let var = ((sum_sq.sum - sum.sum * mean_shifted) / (nf - 1.0)).max(0.0);
    Ok(McEstimate {
        estimate: volume * mean,
        stderr: volume * (var / nf).sqrt(),
        samples: n,
        seed: params.seed,
    })
}
