//! Adaptive combined hypothesis testing of multivariate means on graphs.
//!
//! The setting: scores `x_v = mu_v + eps_v` are observed on the nodes of an
//! undirected graph `G`, with `eps ~ N(0, I)`. The global null `mu = 0` is
//! tested against alternatives whose plausibility is graded by smoothness
//! over the graph, measured through the Laplacian quadratic form
//! `mu' L mu = sum_{(u,v) in E} (mu_u - mu_v)^2`.
//!
//! The central statistic is the regularized quadratic form
//!
//! ```text
//! T_lambda = ( x' (I + lambda L)^{-1} x - trace[(I + lambda L)^{-1}] )
//!            / sqrt( trace[(I + lambda L)^{-2}] )
//! ```
//!
//! which interpolates between a chi-square statistic at `lambda = 0` and a
//! component-mean (likelihood-ratio) statistic as `lambda -> infinity`. The
//! adaptive statistic `T_max = sup_{lambda in [0, inf]} T_lambda` needs no
//! knowledge of the smoothness of the effect, and its null distribution on a
//! fixed graph is calibrated by Monte Carlo.
//!
//! Crate layout:
//!
//! - [`graph`]: graph construction, generators, components, Laplacians;
//! - [`spectrum`]: dense symmetric eigendecomposition and closed forms;
//! - [`stats`]: `T_lambda`, the `T_max` optimizer, and competitor statistics;
//! - [`calibrate`]: Monte-Carlo and score-randomization nulls, p-values,
//!   critical values, Benjamini-Hochberg FDR;
//! - [`theory`]: limit laws, power surfaces, the master-equation root, and
//!   detection-boundary rate functions;
//! - [`signal`]: effect simulation with prescribed energy and smoothness;
//! - [`experiment`]: detection-boundary and power-comparison harnesses;
//! - [`io`]: text formats for graphs, scores, and gene sets;
//! - [`rng`]: keyed substreams for reproducible parallel sampling.
//!
//! Everything is deterministic given the inputs and a `u64` seed; thread
//! count never changes any output.

pub mod calibrate;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod rng;
pub mod signal;
pub mod spectrum;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{Graph, GraphKind};
pub use spectrum::Spectrum;
