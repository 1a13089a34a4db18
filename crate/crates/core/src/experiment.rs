//! Simulation harnesses: rejection frequency over a `(xi1, xi2)` grid,
//! and power comparison of several statistics on one graph.
//!
//! The boundary experiment estimates where the adaptive test starts to
//! reject reliably as effect energy (`n^{xi1}`) and roughness (`n^{xi2}`)
//! vary. Each replicate works on its own graph — resampled for the
//! Erdos-Renyi family, identical for deterministic families — and runs
//! its own Monte-Carlo calibration; all grid cells of a replicate share
//! that graph and critical value, and the `zeta2` weight solve is cached
//! per distinct smoothness-to-energy ratio since it does not depend on
//! the energy target.
//!
//! Cells whose ratio falls outside the graph's feasible interval are
//! counted as infeasible rather than silently clamped; a cell's rejection
//! frequency is reported only over its feasible replicates.
//!
//! Replicates are the parallel unit, each keyed by a derived seed, and
//! per-cell tallies are order-independent integer sums, so results do not
//! depend on the thread count.

use std::collections::HashMap;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::calibrate::mc_null;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind};
use crate::rng::{derive_seed, stream, Purpose};
use crate::signal::{draw_effect, solve_zeta2, weights_for};
use crate::stats::{GraphContext, Statistic};

/// Inclusive equally spaced grid; `count = 1` degenerates to `[lo]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

#[derive(Debug, Clone)]
pub struct BoundaryConfig {
    pub kind: GraphKind,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
    pub replicates: usize,
    /// Calibration draws per replicate graph.
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
}

/// Per-cell tallies over replicates: each replicate contributes to exactly
/// one of `rejected + accepted` (feasible) or `infeasible`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundaryCell {
    pub rejected: usize,
    pub feasible: usize,
    pub infeasible: usize,
}

#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    pub kind: GraphKind,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
    pub replicates: usize,
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Row-major `xi1 x xi2`.
    pub cells: Vec<BoundaryCell>,
}

impl BoundaryGrid {
    pub fn cell(&self, i: usize, j: usize) -> &BoundaryCell {
        &self.cells[i * self.xi2.len() + j]
    }

    /// Rejection frequency over feasible replicates; `None` when the cell
    /// was never feasible.
    pub fn frequency(&self, i: usize, j: usize) -> Option<f64> {
        let c = self.cell(i, j);
        (c.feasible > 0).then(|| c.rejected as f64 / c.feasible as f64)
    }

    /// Mean frequency over the feasible cells of one `xi1` row.
    pub fn row_mean(&self, i: usize) -> Option<f64> {
        let freqs: Vec<f64> = (0..self.xi2.len())
            .filter_map(|j| self.frequency(i, j))
            .collect();
        if freqs.is_empty() {
            None
        } else {
            Some(freqs.iter().sum::<f64>() / freqs.len() as f64)
        }
    }

    /// Number of cells with no feasible replicate (reported as missing).
    pub fn na_count(&self) -> usize {
        self.cells.iter().filter(|c| c.feasible == 0).count()
    }
}

/// Per-replicate cell outcome, summed across replicates afterwards.
enum CellOutcome {
    Infeasible,
    Accept,
    Reject,
}

pub fn run_boundary_experiment(cfg: &BoundaryConfig) -> Result<BoundaryGrid> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    if cfg.xi1.is_empty() || cfg.xi2.is_empty() {
        return Err(Error::InvalidParameter("empty (xi1, xi2) grid".into()));
    }
    if cfg.xi1.iter().chain(&cfg.xi2).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "grid exponents must be finite".into(),
        ));
    }
    let n = cfg.kind.node_count();
    let cells_per_rep = cfg.xi1.len() * cfg.xi2.len();

    let per_rep: Vec<Vec<CellOutcome>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| -> Result<Vec<CellOutcome>> {
            let rep_seed = derive_seed(cfg.seed, Purpose::ChildSeed, rep as u64, 0);
            let graph = Graph::generate(cfg.kind, rep_seed)?;
            let ctx = GraphContext::new(graph)?;
            let null = mc_null(&ctx, Statistic::TMax, cfg.b, rep_seed)?;
            let cv = null.critical_value(cfg.alpha)?;

            // zeta2 depends only on the ratio n^{xi2 - xi1}; with aligned
            // grids many cells share it.
            let mut zeta2_by_ratio: HashMap<u64, Option<f64>> = HashMap::new();
            let mut out = Vec::with_capacity(cells_per_rep);
            for (i, &xi1) in cfg.xi1.iter().enumerate() {
                for (j, &xi2) in cfg.xi2.iter().enumerate() {
                    let rho = (n as f64).powf(xi2 - xi1);
                    let entry = match zeta2_by_ratio.get(&rho.to_bits()) {
                        Some(v) => *v,
                        None => {
                            // Only infeasibility is a per-cell outcome;
                            // any other failure aborts the experiment.
                            let v = match solve_zeta2(ctx.spectrum(), rho) {
                                Ok(z) => Some(z),
                                Err(Error::Infeasible(_)) => None,
                                Err(e) => return Err(e),
                            };
                            zeta2_by_ratio.insert(rho.to_bits(), v);
                            v
                        }
                    };
                    let Some(zeta2) = entry else {
                        out.push(CellOutcome::Infeasible);
                        continue;
                    };
                    let (_, u) = weights_for(ctx.spectrum(), xi1, zeta2);
                    let cell = (i * cfg.xi2.len() + j) as u64;
                    let mu = draw_effect(
                        ctx.spectrum(),
                        &u,
                        derive_seed(rep_seed, Purpose::ChildSeed, cell, 1),
                    )?;
                    let mut noise_rng = stream(rep_seed, Purpose::Noise, cell, 0);
                    let x = DVector::from_fn(ctx.graph().n(), |v, _| {
                        mu[v] + noise_rng.sample::<f64, _>(StandardNormal)
                    });
                    let value = ctx.evaluate(Statistic::TMax, &x)?.value;
                    out.push(if value > cv {
                        CellOutcome::Reject
                    } else {
                        CellOutcome::Accept
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut cells = vec![BoundaryCell::default(); cells_per_rep];
    for rep in &per_rep {
        for (cell, outcome) in cells.iter_mut().zip(rep) {
            match outcome {
                CellOutcome::Infeasible => cell.infeasible += 1,
                CellOutcome::Accept => cell.feasible += 1,
                CellOutcome::Reject => {
                    cell.feasible += 1;
                    cell.rejected += 1;
                }
            }
        }
    }
    Ok(BoundaryGrid {
        kind: cfg.kind,
        xi1: cfg.xi1.clone(),
        xi2: cfg.xi2.clone(),
        replicates: cfg.replicates,
        b: cfg.b,
        alpha: cfg.alpha,
        seed: cfg.seed,
        cells,
    })
}

#[derive(Debug, Clone)]
pub struct PowerComparisonConfig {
    pub statistics: Vec<Statistic>,
    pub replicates: usize,
    /// Calibration draws per statistic.
    pub b: usize,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct PowerRow {
    pub statistic: String,
    pub power: f64,
}

/// Power of each statistic on a fixed graph against effects
/// `mu = sum e_k u_k w_k` with the given weights: every replicate redraws
/// the Rademacher signs and the noise, and all statistics see the same
/// score vector, so the comparison is paired.
pub fn run_power_comparison(
    graph: Graph,
    u: &DVector<f64>,
    cfg: &PowerComparisonConfig,
) -> Result<Vec<PowerRow>> {
    if cfg.statistics.is_empty() {
        return Err(Error::InvalidParameter("no statistics requested".into()));
    }
    if cfg.replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    let ctx = GraphContext::new(graph)?;
    if u.len() != ctx.graph().n() {
        return Err(Error::DimensionMismatch(format!(
            "weights have length {}, graph has {} nodes",
            u.len(),
            ctx.graph().n()
        )));
    }

    let cvs: Vec<f64> = cfg
        .statistics
        .iter()
        .enumerate()
        .map(|(si, &stat)| {
            let null = mc_null(
                &ctx,
                stat,
                cfg.b,
                derive_seed(cfg.seed, Purpose::McNull, si as u64, 0),
            )?;
            null.critical_value(cfg.alpha)
        })
        .collect::<Result<_>>()?;

    let rejections: Vec<usize> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| -> Result<Vec<usize>> {
            let rep_seed = derive_seed(cfg.seed, Purpose::ChildSeed, rep as u64, 0);
            let mu = draw_effect(ctx.spectrum(), u, rep_seed)?;
            let mut noise_rng = stream(rep_seed, Purpose::Noise, 0, 0);
            let x = DVector::from_fn(ctx.graph().n(), |v, _| {
                mu[v] + noise_rng.sample::<f64, _>(StandardNormal)
            });
            cfg.statistics
                .iter()
                .zip(&cvs)
                .map(|(&stat, &cv)| Ok((ctx.evaluate(stat, &x)?.value > cv) as usize))
                .collect()
        })
        .try_reduce(
            || vec![0usize; cfg.statistics.len()],
            |mut acc, row| {
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a += r;
                }
                Ok(acc)
            },
        )?;

    Ok(cfg
        .statistics
        .iter()
        .zip(&rejections)
        .map(|(stat, &r)| PowerRow {
            statistic: stat.name(),
            power: r as f64 / cfg.replicates as f64,
        })
        .collect())
}
