//! Closed-form asymptotics and detection-boundary rate functions.
//!
//! On a dense graph the adaptive statistic has a two-dimensional limit.
//! With `Y1 ~ N(delta1^2, 1)` (centered score energy) and
//! `Y2 ~ N(delta2, 1)` (scaled score mean), independent,
//!
//! ```text
//! T_max  ->d  sqrt(2 Y1^2 + (Y2^2 - 1)^2)   if Y1 > 0 and Y2^2 > 1,
//!             max(sqrt(2) Y1, Y2^2 - 1)     otherwise,
//! ```
//!
//! the two branches agreeing on the boundary. Sampling this law gives the
//! asymptotic power surface of the level-alpha test over `(delta1,
//! delta2)`; the z-analog (`Y2^2` against the 1-df chi-square quantile)
//! and the chi-square-analog (the standardized norm statistic, limiting
//! shift `delta1^2 / sqrt(2)`) powers are available in closed form for
//! the power-ratio comparison.
//!
//! For a general graph the attainable-rate analysis runs through the
//! master equation
//!
//! ```text
//! x^2 = loglog(n) * trace[(I + x/(2 eta^2) L)^{-2}],
//! ```
//!
//! whose left side increases and right side decreases in `x`, giving a
//! unique root `x_* in (0, sqrt(n loglog n)]`; the detection boundary for
//! effects with smoothness budget `eta^2` scales like `x_*`. The printed
//! piecewise rate functions for the Erdos-Renyi, star, cycle, and lattice
//! families are exposed directly by [`rate_function`], each continuous at
//! its breakpoints.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::calibrate::NullSample;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream, Purpose};
use crate::spectrum::Spectrum;

/// Limit parameters: `delta1^2` is the limiting centered energy
/// `||mu_c||^2 / sqrt(n-1)`, `delta2` the limiting scaled mean
/// `sqrt(n) mubar`.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticParams {
    pub delta1: f64,
    pub delta2: f64,
}

impl AsymptoticParams {
    pub fn new(delta1: f64, delta2: f64) -> Result<AsymptoticParams> {
        if !delta1.is_finite() || !delta2.is_finite() || delta1 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "need finite delta2 and finite delta1 >= 0, got ({delta1}, {delta2})"
            )));
        }
        Ok(AsymptoticParams { delta1, delta2 })
    }
}

/// The limit statistic as a function of the latent pair `(Y1, Y2)`.
pub fn combined_law(y1: f64, y2: f64) -> f64 {
    let w2 = y2 * y2 - 1.0;
    if y1 > 0.0 && w2 > 0.0 {
        (2.0 * y1 * y1 + w2 * w2).sqrt()
    } else {
        (std::f64::consts::SQRT_2 * y1).max(w2)
    }
}

/// One draw of the limit law at `(delta1, delta2)`.
pub fn asymptotic_tmax_draw<R: Rng + ?Sized>(params: AsymptoticParams, rng: &mut R) -> f64 {
    let y1 = params.delta1 * params.delta1 + rng.sample::<f64, _>(StandardNormal);
    let y2 = params.delta2 + rng.sample::<f64, _>(StandardNormal);
    combined_law(y1, y2)
}

/// Draws are grouped into fixed-size chunks, each chunk on its own RNG
/// substream, so parallel sampling is reproducible at any thread count.
const DRAW_CHUNK: usize = 4096;

fn chunked<T: Send, F: Fn(usize, usize, &mut rand_chacha::ChaCha12Rng) -> T + Sync>(
    b: usize,
    seed: u64,
    purpose: Purpose,
    f: F,
) -> Vec<T> {
    let chunks = b.div_ceil(DRAW_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * DRAW_CHUNK;
            let len = DRAW_CHUNK.min(b - start);
            let mut rng = stream(seed, purpose, c as u64, 0);
            f(start, len, &mut rng)
        })
        .collect()
}

/// `b` draws of the null (`delta1 = delta2 = 0`) limit law.
pub fn asymptotic_null_sample(b: usize, seed: u64) -> Result<NullSample> {
    if b == 0 {
        return Err(Error::InvalidParameter("b must be positive".into()));
    }
    let zero = AsymptoticParams {
        delta1: 0.0,
        delta2: 0.0,
    };
    let values: Vec<f64> = chunked(b, seed, Purpose::AsymptoticNull, |_, len, rng| {
        (0..len)
            .map(|_| asymptotic_tmax_draw(zero, rng))
            .collect::<Vec<f64>>()
    })
    .into_iter()
    .flatten()
    .collect();
    NullSample::from_draws("t_max_asymptotic".into(), seed, values)
}

/// Monte-Carlo rejection probability against a fixed threshold `q`.
pub fn asymptotic_power_given_q(params: AsymptoticParams, q: f64, b: usize, seed: u64) -> f64 {
    let hits: usize = chunked(b, seed, Purpose::AsymptoticAlt, |_, len, rng| {
        (0..len)
            .filter(|_| asymptotic_tmax_draw(params, rng) > q)
            .count()
    })
    .into_iter()
    .sum();
    hits as f64 / b as f64
}

/// Power of the level-`alpha` asymptotic test at `(delta1, delta2)`: the
/// threshold comes from `b` null draws, the power from `b` alternative
/// draws on a separate substream.
pub fn asymptotic_power(params: AsymptoticParams, alpha: f64, b: usize, seed: u64) -> Result<f64> {
    let null = asymptotic_null_sample(b, derive_seed(seed, Purpose::ChildSeed, 0, 0))?;
    let q = null.critical_value(alpha)?;
    Ok(asymptotic_power_given_q(
        params,
        q,
        b,
        derive_seed(seed, Purpose::ChildSeed, 1, 0),
    ))
}

/// Power of the level-`alpha` z-analog test, which rejects when
/// `Y2^2` exceeds the 1-df chi-square quantile: with `Y2 ~ N(delta2, 1)`
/// this is `Phi(delta2 - z) + Phi(-delta2 - z)`, `z` the standard-normal
/// `1 - alpha/2` quantile.
pub fn power_z_analog(delta2: f64, alpha: f64) -> f64 {
    let n01 = Normal::standard();
    let z = n01.inverse_cdf(1.0 - alpha / 2.0);
    n01.cdf(delta2 - z) + n01.cdf(-delta2 - z)
}

/// Power of the level-`alpha` chi-square-analog test. The chi-square
/// statistic `||X||^2` standardized by `sqrt(2n)` tends to
/// `N(delta1^2 / sqrt(2), 1)` (the noncentrality `delta1^2 sqrt(n-1)`
/// divided by `sqrt(2n)`), so the limiting power is
/// `Phi(delta1^2 / sqrt(2) - z)`, `z` the standard-normal `1 - alpha`
/// quantile.
pub fn power_chi2_analog(delta1: f64, alpha: f64) -> f64 {
    let n01 = Normal::standard();
    let z = n01.inverse_cdf(1.0 - alpha);
    n01.cdf(delta1 * delta1 / std::f64::consts::SQRT_2 - z)
}

#[derive(Debug, Clone, Copy)]
pub struct PowerPoint {
    pub delta1: f64,
    pub delta2: f64,
    pub power_tmax: f64,
    pub power_z: f64,
    pub power_chi2: f64,
    pub ratio_z: f64,
    pub ratio_chi2: f64,
}

#[derive(Debug, Clone)]
pub struct PowerSurface {
    pub alpha: f64,
    /// Shared rejection threshold of the adaptive test, from the null draws.
    pub q_alpha: f64,
    /// Row-major over `delta1_grid x delta2_grid`.
    pub points: Vec<PowerPoint>,
}

/// Power surface of the asymptotic test over a `(delta1, delta2)` grid,
/// with the closed-form analog powers and the power ratios alongside.
/// All cells share one threshold `q_alpha` estimated from `b_null` null
/// draws; each cell spends `b_point` draws on its own substream.
pub fn power_surface(
    delta1_grid: &[f64],
    delta2_grid: &[f64],
    alpha: f64,
    b_point: usize,
    b_null: usize,
    seed: u64,
) -> Result<PowerSurface> {
    if delta1_grid.is_empty() || delta2_grid.is_empty() {
        return Err(Error::InvalidParameter("empty delta grid".into()));
    }
    for &d in delta1_grid {
        AsymptoticParams::new(d, 0.0)?;
    }
    for &d in delta2_grid {
        AsymptoticParams::new(0.0, d)?;
    }
    if b_point == 0 {
        return Err(Error::InvalidParameter("b_point must be positive".into()));
    }
    let null = asymptotic_null_sample(b_null, derive_seed(seed, Purpose::ChildSeed, 0, 0))?;
    let q = null.critical_value(alpha)?;

    let cells: Vec<(usize, usize)> = (0..delta1_grid.len())
        .flat_map(|i| (0..delta2_grid.len()).map(move |j| (i, j)))
        .collect();
    let points: Vec<PowerPoint> = cells
        .into_par_iter()
        .enumerate()
        .map(|(idx, (i, j))| {
            let params = AsymptoticParams {
                delta1: delta1_grid[i],
                delta2: delta2_grid[j],
            };
            let cell_seed = derive_seed(seed, Purpose::ChildSeed, 1 + idx as u64, 0);
            let power_tmax = asymptotic_power_given_q(params, q, b_point, cell_seed);
            let power_z = power_z_analog(params.delta2, alpha);
            let power_chi2 = power_chi2_analog(params.delta1, alpha);
            PowerPoint {
                delta1: params.delta1,
                delta2: params.delta2,
                power_tmax,
                power_z,
                power_chi2,
                ratio_z: power_tmax / power_z,
                ratio_chi2: power_tmax / power_chi2,
            }
        })
        .collect();
    Ok(PowerSurface {
        alpha,
        q_alpha: q,
        points,
    })
}

/// `max(ln ln n, 0.1)`. The floor only binds for tiny `n` (at `n = 3`,
/// `ln ln n` is about 0.094) where the asymptotic factor is meaningless;
/// callers surface the floor in output metadata.
pub fn loglog(n: usize) -> f64 {
    ((n as f64).ln().ln()).max(0.1)
}

/// Root of the master equation for a spectrum with the given collapsed
/// eigenvalue view. See [`master_root`].
pub fn master_root_from_distinct(distinct: &[(f64, usize)], eta2: f64) -> Result<f64> {
    let n: usize = distinct.iter().map(|&(_, m)| m).sum();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "master equation needs n >= 3, got {n}"
        )));
    }
    if !(eta2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eta2 must be >= 0, got {eta2}"
        )));
    }
    let c = loglog(n);
    let k = distinct
        .iter()
        .filter(|&&(rho, _)| rho == 0.0)
        .map(|&(_, m)| m)
        .sum::<usize>();

    // eta2 = 0 kills every nonzero-eigenvalue direction: x = sqrt(K c).
    if eta2 == 0.0 {
        return Ok((k as f64 * c).sqrt());
    }
    // Edgeless graph: the trace is constantly n, so x = sqrt(n c).
    if distinct.iter().all(|&(rho, _)| rho == 0.0) {
        return Ok((n as f64 * c).sqrt());
    }

    let rhs = |x: f64| -> f64 {
        c * distinct
            .iter()
            .map(|&(rho, m)| {
                let d = 1.0 + x * rho / (2.0 * eta2);
                m as f64 / (d * d)
            })
            .sum::<f64>()
    };

    // x^2 - rhs(x) rises from -cn at 0 to >= 0 at sqrt(n c).
    let mut lo = 0.0f64;
    let mut hi = (n as f64 * c).sqrt();
    for _ in 0..200 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid * mid < rhs(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let residual = (x * x - rhs(x)).abs();
    if residual > 1e-8 * x * x {
        return Err(Error::Numerical(format!(
            "master-equation residual {residual} too large at x = {x}"
        )));
    }
    Ok(x)
}

/// Unique root `x_*` of `x^2 = loglog(n) trace[(I + x/(2 eta^2) L)^{-2}]`,
/// by bisection on `(0, sqrt(n loglog n)]` to relative tolerance 1e-10.
/// The returned root satisfies `|x^2 - rhs(x)| <= 1e-8 x^2`.
pub fn master_root(s: &Spectrum, eta2: f64) -> Result<f64> {
    master_root_from_distinct(s.distinct(), eta2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateFamily {
    ErdosRenyi,
    Star,
    Cycle,
    /// Hypercubic lattice with the given dimension.
    Lattice(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct RateQuery {
    pub family: RateFamily,
    pub n: usize,
    /// Smoothness budget `eta^2 >= 0`.
    pub eta2: f64,
}

/// Printed detection-boundary rate `r^2(n, eta)` for the worked families,
/// continuous at its breakpoints:
///
/// ```text
/// ER:       n^{1/2}   | eta^2 / n                        | 1
///           at eta = n^{3/4} and eta = n^{1/2}
/// star:     n^{1/2}   | eta^2                            | 1
///           at eta = n^{1/4} and eta = 1
/// cycle:    (n l)^{1/2} | (n eta l)^{2/5}                | l^{1/2}
///           at eta = (n l)^{1/4} and eta = l^{1/4} / n
/// lattice d: (n l)^{1/2} | eta^{2d/(4+d)} (n l)^{2/(4+d)} | l^{1/2}
///           at eta = (n l)^{1/4} and eta = n^{-1/d} l^{1/4}
/// ```
///
/// with `l = loglog(n)` (floored, see [`loglog`]). Rougher budgets (larger
/// `eta`) cost more signal, up to the chi-square rate `~ n^{1/2}`.
pub fn rate_function(q: &RateQuery) -> Result<f64> {
    if q.n < 2 {
        return Err(Error::InvalidParameter(format!(
            "rate query needs n >= 2, got {}",
            q.n
        )));
    }
    if !(q.eta2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eta2 must be >= 0, got {}",
            q.eta2
        )));
    }
    let n = q.n as f64;
    let eta = q.eta2.sqrt();
    let l = loglog(q.n);
    Ok(match q.family {
        RateFamily::ErdosRenyi => {
            if eta >= n.powf(0.75) {
                n.sqrt()
            } else if eta >= n.sqrt() {
                q.eta2 / n
            } else {
                1.0
            }
        }
        RateFamily::Star => {
            if eta >= n.powf(0.25) {
                n.sqrt()
            } else if eta >= 1.0 {
                q.eta2
            } else {
                1.0
            }
        }
        RateFamily::Cycle => {
            let nl = n * l;
            if eta >= nl.powf(0.25) {
                nl.sqrt()
            } else if eta >= l.powf(0.25) / n {
                (n * eta * l).powf(0.4)
            } else {
                l.sqrt()
            }
        }
        RateFamily::Lattice(d) => {
            if d == 0 {
                return Err(Error::InvalidParameter(
                    "lattice dimension must be positive".into(),
                ));
            }
            let df = d as f64;
            let nl = n * l;
            if eta >= nl.powf(0.25) {
                nl.sqrt()
            } else if eta >= n.powf(-1.0 / df) * l.powf(0.25) {
                eta.powf(2.0 * df / (4.0 + df)) * nl.powf(2.0 / (4.0 + df))
            } else {
                l.sqrt()
            }
        }
    })
}
