//! Test statistics on a score vector over a graph.
//!
//! In the Laplacian eigenbasis `L = W diag(lambda) W'` the regularized
//! statistic becomes a weighted chi-square contrast: with `c = W' x` and
//! `w_k(lambda) = 1 / (1 + lambda lambda_k)`,
//!
//! ```text
//! T_lambda = ( sum_k w_k c_k^2 - sum_k w_k ) / sqrt( sum_k w_k^2 )
//! ```
//!
//! so one projection pays for every lambda afterwards, and equal
//! eigenvalues can be collapsed to make each evaluation O(#distinct).
//!
//! The adaptive statistic is `T_max = sup T_lambda` over
//! `lambda in [0, infinity]`. The supremum is found in the compactified
//! coordinate `t = lambda / (1 + lambda) in [0, 1]`: a uniform grid scan
//! (both endpoints evaluated exactly, `t = 1` meaning `lambda = infinity`)
//! followed by golden-section refinement around the best grid point. The
//! grid guards against multimodality, which the small/large-lambda regimes
//! of the statistic make plausible; a pure Newton iteration can stall.
//!
//! At the endpoints the statistic reduces to familiar forms:
//! `T_0 = (||x||^2 - n) / sqrt(n)` (chi-square) and
//! `T_inf = (R - K) / sqrt(K)` where `R` is the likelihood-ratio statistic
//! for effects constant on each of the `K` components.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectrum::Spectrum;

/// Scores rotated into the eigenbasis.
#[derive(Debug, Clone)]
pub struct ProjectedScores {
    /// `c_k = <w_k, x>`, aligned with the descending eigenvalue order.
    pub coeffs: DVector<f64>,
    /// Per-distinct-eigenvalue sums of `c_k^2`, aligned with
    /// `Spectrum::distinct`.
    pub collapsed: Vec<f64>,
}

pub fn project_scores(s: &Spectrum, x: &DVector<f64>) -> Result<ProjectedScores> {
    if x.len() != s.n() {
        return Err(Error::DimensionMismatch(format!(
            "scores have length {}, graph has {} nodes",
            x.len(),
            s.n()
        )));
    }
    let coeffs = s.eigenvectors().tr_mul(x);
    let mut collapsed = Vec::with_capacity(s.distinct().len());
    let mut k = 0;
    for &(_, m) in s.distinct() {
        let mut sum = 0.0;
        for _ in 0..m {
            sum += coeffs[k] * coeffs[k];
            k += 1;
        }
        collapsed.push(sum);
    }
    Ok(ProjectedScores { coeffs, collapsed })
}

/// Weight of an eigenvalue at grid coordinate `t = lambda / (1 + lambda)`.
/// Zero eigenvalues keep weight 1 for every lambda including infinity.
#[inline]
fn weight(t: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let omt = 1.0 - t;
        omt / (omt + t * rho)
    }
}

/// `T_lambda` at coordinate `t`, from the collapsed representation.
fn eval_t(distinct: &[(f64, usize)], collapsed: &[f64], t: f64) -> f64 {
    let mut num = 0.0;
    let mut trace2 = 0.0;
    for (&(rho, m), &c2) in distinct.iter().zip(collapsed) {
        let w = weight(t, rho);
        num += w * (c2 - m as f64);
        trace2 += w * w * m as f64;
    }
    num / trace2.sqrt()
}

/// `T_lambda` for `lambda in [0, infinity]` (`f64::INFINITY` accepted).
pub fn t_lambda(p: &ProjectedScores, s: &Spectrum, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    let t = if lambda.is_infinite() {
        1.0
    } else {
        lambda / (1.0 + lambda)
    };
    Ok(eval_t(s.distinct(), &p.collapsed, t))
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    /// Uniform grid size in `t`, endpoints included.
    pub grid_points: usize,
    /// Golden-section bracket width (in `t`) at which refinement stops.
    pub tol_t: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_points: 513,
            tol_t: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TmaxResult {
    pub value: f64,
    /// A maximizing lambda; `f64::INFINITY` when the supremum sits at the
    /// component-mean end.
    pub lambda_star: f64,
    pub t_at_zero: f64,
    pub t_at_infinity: f64,
}

/// Precomputed grid for repeated `T_max` evaluation against one spectrum.
///
/// Row `i` holds the eigenvalue weights at grid point `t_i` together with
/// the trace terms, so each draw costs one dot product per row plus a local
/// refinement. Build once per graph when calibrating.
pub struct TmaxTable {
    distinct: Vec<(f64, usize)>,
    grid_t: Vec<f64>,
    /// Row-major `grid_points x #distinct` weight matrix.
    weights: Vec<f64>,
    /// `sum_k w_k` per grid row.
    trace1: Vec<f64>,
    /// `sqrt(sum_k w_k^2)` per grid row.
    denom: Vec<f64>,
    tol_t: f64,
}

impl TmaxTable {
    pub fn new(s: &Spectrum, cfg: &OptimizerConfig) -> TmaxTable {
        TmaxTable::from_distinct(s.distinct().to_vec(), cfg)
    }

    pub fn from_distinct(distinct: Vec<(f64, usize)>, cfg: &OptimizerConfig) -> TmaxTable {
        let g = cfg.grid_points.max(3);
        let j = distinct.len();
        let grid_t: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
        let mut weights = vec![0.0; g * j];
        let mut trace1 = vec![0.0; g];
        let mut denom = vec![0.0; g];
        for (i, &t) in grid_t.iter().enumerate() {
            let mut tr1 = 0.0;
            let mut tr2 = 0.0;
            for (jj, &(rho, m)) in distinct.iter().enumerate() {
                let w = weight(t, rho);
                weights[i * j + jj] = w;
                tr1 += w * m as f64;
                tr2 += w * w * m as f64;
            }
            trace1[i] = tr1;
            denom[i] = tr2.sqrt();
        }
        TmaxTable {
            distinct,
            grid_t,
            weights,
            trace1,
            denom,
            tol_t: cfg.tol_t,
        }
    }

    /// `T_max` of one collapsed coefficient vector.
    pub fn tmax(&self, collapsed: &[f64]) -> TmaxResult {
        debug_assert_eq!(collapsed.len(), self.distinct.len());
        let g = self.grid_t.len();
        let j = self.distinct.len();

        let mut best_i = 0;
        let mut best_v = f64::NEG_INFINITY;
        let mut at_zero = 0.0;
        let mut at_inf = 0.0;
        for i in 0..g {
            let row = &self.weights[i * j..(i + 1) * j];
            let mut dot = 0.0;
            for (w, c2) in row.iter().zip(collapsed) {
                dot += w * c2;
            }
            let v = (dot - self.trace1[i]) / self.denom[i];
            if i == 0 {
                at_zero = v;
            }
            if i == g - 1 {
                at_inf = v;
            }
            if v > best_v {
                best_v = v;
                best_i = i;
            }
        }

        // Refine inside the bracket spanned by the neighbors of the best
        // grid point; the endpoints stay as exact candidates either way.
        let lo = self.grid_t[best_i.saturating_sub(1)];
        let hi = self.grid_t[(best_i + 1).min(g - 1)];
        let f = |t: f64| eval_t(&self.distinct, collapsed, t);
        let (t_ref, v_ref) = golden_max(f, lo, hi, self.tol_t);

        let (mut value, mut t_star) = (best_v, self.grid_t[best_i]);
        if v_ref > value {
            value = v_ref;
            t_star = t_ref;
        }
        if at_inf >= value {
            value = at_inf;
            t_star = 1.0;
        }
        if at_zero >= value {
            value = at_zero;
            t_star = 0.0;
        }

        let lambda_star = if t_star >= 1.0 {
            f64::INFINITY
        } else {
            t_star / (1.0 - t_star)
        };
        TmaxResult {
            value,
            lambda_star,
            t_at_zero: at_zero,
            t_at_infinity: at_inf,
        }
    }
}

/// Adaptive statistic `T_max` with its maximizer.
pub fn t_max(p: &ProjectedScores, s: &Spectrum, cfg: &OptimizerConfig) -> TmaxResult {
    TmaxTable::new(s, cfg).tmax(&p.collapsed)
}

/// Golden-section maximization on `[a, b]`, returning the better of the two
/// final interior probes. Assumes `f` continuous; tolerates plateaus.
fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const GR: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2
    let (mut a, mut b) = (a, b);
    let mut c = b - GR * (b - a);
    let mut d = a + GR * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GR * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GR * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Exact `T_max` on the complete graph `K_n`.
///
/// On `K_n` the statistic collapses to two degrees of freedom. With
/// `W1 = (||x_c||^2 - (n-1)) / sqrt(n-1)` (centered energy) and
/// `W2 = n xbar^2 - 1` (squared mean),
///
/// ```text
/// T_lambda = sqrt(1 - theta^2) W1 + theta W2,
/// theta = (1 + s^2 (n-1))^{-1/2},  s = 1 / (1 + lambda n),
/// ```
///
/// and lambda ranging over `[0, infinity]` sweeps
/// `theta in [n^{-1/2}, 1]`. The maximum over theta is attained either at
/// an endpoint (`theta = n^{-1/2}` is `T_0`, `theta = 1` is `T_inf`) or,
/// when `W1 > 0` and `W2 > 0`, at the stationary point
/// `theta* = W2 / sqrt(W1^2 + W2^2)` with value `sqrt(W1^2 + W2^2)`.
pub fn tmax_complete_theta(n: usize, w1: f64, w2: f64) -> f64 {
    let a = 1.0 / (n as f64).sqrt();
    let h = |theta: f64| (1.0 - theta * theta).max(0.0).sqrt() * w1 + theta * w2;
    let mut best = h(a).max(w2);
    if w1 > 0.0 && w2 > 0.0 {
        let norm = w1.hypot(w2);
        let theta_star = w2 / norm;
        if theta_star > a && theta_star < 1.0 {
            best = best.max(norm);
        }
    }
    best
}

/// `(W1, W2)` of a score vector on `K_n`, for [`tmax_complete_theta`].
pub fn complete_graph_w(x: &DVector<f64>) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    let centered = norm2 - n * mean * mean;
    let w1 = (centered - (n - 1.0)) / (n - 1.0).sqrt();
    let w2 = n * mean * mean - 1.0;
    (w1, w2)
}

/// Likelihood-ratio statistic `R`: sum over components of the squared,
/// size-normalized score sums.
pub fn r_statistic(g: &Graph, x: &DVector<f64>) -> Result<f64> {
    if x.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "scores have length {}, graph has {} nodes",
            x.len(),
            g.n()
        )));
    }
    let (count, labels) = g.components();
    let mut sums = vec![0.0; count];
    let mut sizes = vec![0usize; count];
    for (v, &lab) in labels.iter().enumerate() {
        sums[lab] += x[v];
        sizes[lab] += 1;
    }
    Ok(sums
        .iter()
        .zip(&sizes)
        .map(|(s, &m)| s * s / m as f64)
        .sum())
}

fn nonempty(x: &DVector<f64>) -> Result<()> {
    if x.is_empty() {
        Err(Error::InvalidParameter("empty score vector".into()))
    } else {
        Ok(())
    }
}

/// `||x||^2`.
pub fn chi2_statistic(x: &DVector<f64>) -> Result<f64> {
    nonempty(x)?;
    Ok(x.iter().map(|v| v * v).sum())
}

/// `sqrt(n) * xbar`.
pub fn z_statistic(x: &DVector<f64>) -> Result<f64> {
    nonempty(x)?;
    let n = x.len() as f64;
    Ok(x.iter().sum::<f64>() / n.sqrt())
}

/// Mean of absolute scores.
pub fn meanabs_statistic(x: &DVector<f64>) -> Result<f64> {
    nonempty(x)?;
    Ok(x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64)
}

/// Mean of squared scores.
pub fn meansq_statistic(x: &DVector<f64>) -> Result<f64> {
    nonempty(x)?;
    Ok(x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64)
}

/// Larger of the positive-part mean and the negative-part mean.
pub fn maxmean_statistic(x: &DVector<f64>) -> Result<f64> {
    nonempty(x)?;
    let n = x.len() as f64;
    let pos: f64 = x.iter().map(|v| v.max(0.0)).sum();
    let neg: f64 = x.iter().map(|v| (-v).max(0.0)).sum();
    Ok((pos / n).max(neg / n))
}

/// `(I + lambda L)^{-1} x` through the eigenbasis. `lambda = infinity`
/// projects each component onto its mean.
pub fn smooth_scores(s: &Spectrum, x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    if s.n() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "spectrum has {} nodes, scores have {}",
            s.n(),
            x.len()
        )));
    }
    // No penalty means no smoothing; skip the eigenbasis round trip so
    // the input comes back bit-exact.
    if lambda == 0.0 {
        return Ok(x.clone());
    }
    let p = project_scores(s, x)?;
    let mut shrunk = p.coeffs.clone();
    for (k, &lam) in s.eigenvalues().iter().enumerate() {
        let w = if lam == 0.0 {
            1.0
        } else if lambda.is_infinite() {
            0.0
        } else {
            1.0 / (1.0 + lambda * lam)
        };
        shrunk[k] *= w;
    }
    Ok(s.eigenvectors() * shrunk)
}

/// Statistic identifiers used by calibration, experiments, and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    TMax,
    TLambda(f64),
    Chi2,
    Z,
    MeanAbs,
    MeanSq,
    MaxMean,
    R,
}

impl Statistic {
    pub fn name(&self) -> String {
        match self {
            Statistic::TMax => "t_max".into(),
            Statistic::TLambda(l) => format!("t_lambda[{l}]"),
            Statistic::Chi2 => "chi2".into(),
            Statistic::Z => "z".into(),
            Statistic::MeanAbs => "meanabs".into(),
            Statistic::MeanSq => "meansq".into(),
            Statistic::MaxMean => "maxmean".into(),
            Statistic::R => "r".into(),
        }
    }

    /// Whether evaluation needs the projection into the eigenbasis.
    pub fn spectral(&self) -> bool {
        matches!(self, Statistic::TMax | Statistic::TLambda(_))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StatisticValue {
    pub value: f64,
    /// Maximizing lambda, for `T_max` only.
    pub lambda_star: Option<f64>,
}

/// Everything needed to evaluate any statistic repeatedly on one graph:
/// the spectrum, the `T_max` grid table, and the component partition.
pub struct GraphContext {
    graph: Graph,
    spectrum: Spectrum,
    table: TmaxTable,
}

impl GraphContext {
    pub fn new(graph: Graph) -> Result<GraphContext> {
        GraphContext::with_config(graph, &OptimizerConfig::default())
    }

    pub fn with_config(graph: Graph, cfg: &OptimizerConfig) -> Result<GraphContext> {
        let spectrum = Spectrum::of_graph(&graph)?;
        let table = TmaxTable::new(&spectrum, cfg);
        Ok(GraphContext {
            graph,
            spectrum,
            table,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn table(&self) -> &TmaxTable {
        &self.table
    }

    pub fn evaluate(&self, stat: Statistic, x: &DVector<f64>) -> Result<StatisticValue> {
        let value = match stat {
            Statistic::TMax => {
                let p = project_scores(&self.spectrum, x)?;
                let r = self.table.tmax(&p.collapsed);
                return Ok(StatisticValue {
                    value: r.value,
                    lambda_star: Some(r.lambda_star),
                });
            }
            Statistic::TLambda(l) => {
                let p = project_scores(&self.spectrum, x)?;
                t_lambda(&p, &self.spectrum, l)?
            }
            Statistic::Chi2 => chi2_statistic(x)?,
            Statistic::Z => z_statistic(x)?,
            Statistic::MeanAbs => meanabs_statistic(x)?,
            Statistic::MeanSq => meansq_statistic(x)?,
            Statistic::MaxMean => maxmean_statistic(x)?,
            Statistic::R => r_statistic(&self.graph, x)?,
        };
        Ok(StatisticValue {
            value,
            lambda_star: None,
        })
    }
}
