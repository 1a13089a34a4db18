//! Null calibration by simulation, and multiple-testing helpers.
//!
//! The null is `x ~ N(0, I_n)` on the graph's nodes. A calibration run
//! draws `B` independent score vectors, evaluates the chosen statistic on
//! each, and keeps the sorted sample. Inference then uses finite-sample
//! exact constructions:
//!
//! * p-value with the add-one correction,
//!   `p = (1 + #{T_b >= T_obs}) / (B + 1)`, which is super-uniform under
//!   the null and never returns zero;
//! * critical value as the `ceil((1 - alpha)(B + 1))`-th order statistic,
//!   so that `T_obs > cv  <=>  p <= alpha`.
//!
//! Ties count toward the null (the `>=` above), keeping both conservative.
//!
//! `randomization_null` replaces the Gaussian draw with scores resampled
//! from a supplied universe (e.g. all gene scores on an array), assigning
//! a uniformly random subset of the universe to the graph's nodes on each
//! draw. This calibrates against the empirical score distribution instead
//! of the parametric null.
//!
//! Every draw re-keys its own RNG substream from `(seed, purpose, draw)`,
//! so results do not depend on evaluation order or thread count.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::stats::{GraphContext, Statistic};

/// A calibrated null distribution: `b` draws of one statistic, sorted.
#[derive(Debug, Clone)]
pub struct NullSample {
    statistic: String,
    seed: u64,
    /// Ascending.
    values: Vec<f64>,
}

impl NullSample {
    /// Wrap raw draws (any order); sorts internally.
    pub fn from_draws(statistic: String, seed: u64, mut values: Vec<f64>) -> Result<NullSample> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty null sample".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite value in null sample".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(NullSample {
            statistic,
            seed,
            values,
        })
    }

    pub fn statistic(&self) -> &str {
        &self.statistic
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn b(&self) -> usize {
        self.values.len()
    }

    /// Sorted ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Add-one Monte-Carlo p-value of an observed statistic.
    pub fn p_value(&self, observed: f64) -> f64 {
        let b = self.values.len();
        // First index with value >= observed; everything after ties or
        // exceeds the observation.
        let idx = self.values.partition_point(|v| *v < observed);
        (1 + (b - idx)) as f64 / (b + 1) as f64
    }

    /// Rejection threshold at level `alpha`: reject when the observed
    /// statistic strictly exceeds it.
    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        let b = self.values.len();
        let r = ((1.0 - alpha) * (b + 1) as f64).ceil() as usize;
        let r = r.clamp(1, b);
        Ok(self.values[r - 1])
    }
}

/// Calibrate `stat` against the `N(0, I_n)` null with `b` draws.
pub fn mc_null(ctx: &GraphContext, stat: Statistic, b: usize, seed: u64) -> Result<NullSample> {
    if b == 0 {
        return Err(Error::InvalidParameter("b must be positive".into()));
    }
    let n = ctx.graph().n();
    let values: Vec<f64> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::McNull, i as u64, 0);
            let x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            ctx.evaluate(stat, &x).map(|sv| sv.value)
        })
        .collect::<Result<_>>()?;
    NullSample::from_draws(stat.name(), seed, values)
}

/// Calibrate `stat` by resampling node scores from `universe`: each draw
/// assigns a uniformly random `n`-subset of the universe (order included)
/// to the graph's nodes.
pub fn randomization_null(
    ctx: &GraphContext,
    stat: Statistic,
    universe: &[f64],
    b: usize,
    seed: u64,
) -> Result<NullSample> {
    if b == 0 {
        return Err(Error::InvalidParameter("b must be positive".into()));
    }
    let n = ctx.graph().n();
    let big_n = universe.len();
    if big_n < n {
        return Err(Error::InvalidParameter(format!(
            "universe has {big_n} scores but the graph needs {n}"
        )));
    }
    if universe.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "universe contains a non-finite score".into(),
        ));
    }
    let values: Vec<f64> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::Randomization, i as u64, 0);
            // Partial Fisher-Yates: after k steps the prefix holds a
            // uniformly random ordered k-subset of the universe indices.
            let mut idx: Vec<usize> = (0..big_n).collect();
            for k in 0..n {
                let j = rng.random_range(k..big_n);
                idx.swap(k, j);
            }
            let x = DVector::from_fn(n, |v, _| universe[idx[v]]);
            ctx.evaluate(stat, &x).map(|sv| sv.value)
        })
        .collect::<Result<_>>()?;
    NullSample::from_draws(stat.name(), seed, values)
}

/// Benjamini-Hochberg step-up over a family of p-values.
#[derive(Debug, Clone)]
pub struct BhOutcome {
    /// Aligned with the input order.
    pub rejected: Vec<bool>,
    /// BH-adjusted p-values (q-values), aligned with the input order.
    pub q: Vec<f64>,
}

pub fn bh_fdr(pvals: &[f64], alpha: f64) -> Result<BhOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in (0, 1), got {alpha}"
        )));
    }
    for &p in pvals {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "p-value {p} outside [0, 1]"
            )));
        }
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).unwrap());

    // q_(k) = min_{j >= k} m p_(j) / j, clamped to 1; rejection at level
    // alpha is exactly q <= alpha, which reproduces the step-up rule.
    let mut q = vec![0.0; m];
    let mut running = 1.0f64;
    for k in (0..m).rev() {
        let i = order[k];
        running = running.min(m as f64 * pvals[i] / (k + 1) as f64);
        q[i] = running;
    }
    let rejected = q.iter().map(|&qi| qi <= alpha).collect();
    Ok(BhOutcome { rejected, q })
}
