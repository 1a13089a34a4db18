//! `graphtest`: adaptive testing of multivariate means on graphs.
//!
//! The subcommands cover the whole pipeline: generating benchmark
//! graphs, testing observed node scores with Monte-Carlo or
//! score-randomization calibration, tracing detection-boundary grids,
//! tabulating the asymptotic power surface, simulating effects with
//! prescribed energy and smoothness, FDR post-processing over families
//! of tests, and Laplacian smoothing of score vectors.
//!
//! Every randomized subcommand takes `--seed`; output is a pure
//! function of (inputs, flags, seed) and does not depend on
//! `--threads`. Exit codes: 0 success, 2 usage error, 3 data error,
//! 4 infeasible request.

mod output;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Value};

use graphtest_core::calibrate::{bh_fdr, mc_null, randomization_null};
use graphtest_core::experiment::{
    linspace, run_boundary_experiment, run_power_comparison, BoundaryConfig,
    PowerComparisonConfig,
};
use graphtest_core::io::{
    parse_edge_list, parse_gene_sets, parse_named_scores, parse_scores, reduce_to_universe,
};
use graphtest_core::signal::{generate_effect, generate_theta0_effect, solve_weights, theta0_weights};
use graphtest_core::spectrum::Spectrum;
use graphtest_core::stats::{
    project_scores, smooth_scores, t_max, GraphContext, OptimizerConfig, Statistic,
};
use graphtest_core::theory::power_surface;
use graphtest_core::{Error, Graph, GraphKind, Result};

use output::{metadata_line, write_output};

#[derive(Parser)]
#[command(
    name = "graphtest",
    version,
    about = "Adaptive combined testing of multivariate means on graphs"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    /// Results do not depend on this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark graph and emit its edge list.
    GenGraph(GenGraphArgs),
    /// Test a score vector on a graph; prints a JSON result record.
    Test(TestArgs),
    /// Draw and store a Monte-Carlo null sample for a statistic.
    Calibrate(CalibrateArgs),
    /// Rejection-frequency grid over (xi1, xi2) energy/smoothness targets.
    Boundary(BoundaryArgs),
    /// Asymptotic power surface of the adaptive statistic and its analogs.
    PowerSurface(PowerSurfaceArgs),
    /// Simulate a mean effect with prescribed energy and smoothness.
    SimulateSignal(SimulateSignalArgs),
    /// Benjamini-Hochberg FDR control over a table of p-values.
    Fdr(FdrArgs),
    /// Laplacian smoothing of a score vector at fixed or maximizing penalty.
    Smooth(SmoothArgs),
    /// Power of several statistics on one graph under a simulated effect.
    PowerCompare(PowerCompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Er,
    Star,
    Cycle,
    Complete,
    Empty,
    Lattice,
}

#[derive(Args)]
struct FamilyArgs {
    /// Graph family.
    #[arg(long, value_enum)]
    family: Family,
    /// Number of nodes (star, cycle, complete, empty, er).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// Side length (lattice; the graph has m^d nodes).
    #[arg(long)]
    m: Option<usize>,
    /// Lattice dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
}

impl FamilyArgs {
    fn kind(&self) -> Result<GraphKind> {
        let need_n = || {
            self.n.ok_or_else(|| {
                Error::InvalidParameter("--n is required for this family".into())
            })
        };
        Ok(match self.family {
            Family::Er => GraphKind::ErdosRenyi {
                n: need_n()?,
                p: self.p.ok_or_else(|| {
                    Error::InvalidParameter("--p is required for the er family".into())
                })?,
            },
            Family::Star => GraphKind::Star { n: need_n()? },
            Family::Cycle => GraphKind::Cycle { n: need_n()? },
            Family::Complete => GraphKind::Complete { n: need_n()? },
            Family::Empty => GraphKind::Empty { n: need_n()? },
            Family::Lattice => GraphKind::Lattice {
                m: self.m.ok_or_else(|| {
                    Error::InvalidParameter("--m is required for the lattice family".into())
                })?,
                d: self.d,
            },
        })
    }
}

fn kind_params(kind: GraphKind) -> Value {
    match kind {
        GraphKind::ErdosRenyi { n, p } => json!({"family": "er", "n": n, "p": p}),
        GraphKind::Star { n } => json!({"family": "star", "n": n}),
        GraphKind::Cycle { n } => json!({"family": "cycle", "n": n}),
        GraphKind::Complete { n } => json!({"family": "complete", "n": n}),
        GraphKind::Empty { n } => json!({"family": "empty", "n": n}),
        GraphKind::Lattice { m, d } => json!({"family": "lattice", "m": m, "d": d}),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StatChoice {
    Tmax,
    Tlambda,
    Chi2,
    Z,
    Meanabs,
    Meansq,
    Maxmean,
    R,
}

impl StatChoice {
    fn to_statistic(self, lambda: Option<f64>) -> Result<Statistic> {
        Ok(match self {
            StatChoice::Tmax => Statistic::TMax,
            StatChoice::Tlambda => {
                // clap enforces --lambda's presence for tlambda.
                let l = lambda.unwrap();
                if l.is_nan() || l < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "penalty must be nonnegative, got {l}"
                    )));
                }
                Statistic::TLambda(l)
            }
            StatChoice::Chi2 => Statistic::Chi2,
            StatChoice::Z => Statistic::Z,
            StatChoice::Meanabs => Statistic::MeanAbs,
            StatChoice::Meansq => Statistic::MeanSq,
            StatChoice::Maxmean => Statistic::MaxMean,
            StatChoice::R => Statistic::R,
        })
    }
}

#[derive(Args)]
struct GenGraphArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// RNG seed; required for er, unused by the deterministic families.
    #[arg(long, required_if_eq("family", "er"))]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    /// Edge-list file for the graph under test.
    #[arg(long)]
    graph: PathBuf,
    /// Scores: one value per line or "node value" pairs; with --gmt,
    /// "gene value" pairs over the whole measurement universe.
    #[arg(long)]
    scores: PathBuf,
    /// GMT gene-set collection; switches calibration from Gaussian
    /// Monte Carlo to score randomization over the universe.
    #[arg(long, requires = "set")]
    gmt: Option<PathBuf>,
    /// Name of the gene set to test (with --gmt).
    #[arg(long, requires = "gmt")]
    set: Option<String>,
    #[arg(long, value_enum, default_value_t = StatChoice::Tmax)]
    statistic: StatChoice,
    /// Penalty value for the tlambda statistic.
    #[arg(long, required_if_eq("statistic", "tlambda"))]
    lambda: Option<f64>,
    /// Calibration draws.
    #[arg(long, default_value_t = 1000)]
    b: usize,
    /// Nominal level; validated but the decision is left to the caller.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = StatChoice::Tmax)]
    statistic: StatChoice,
    /// Penalty value for the tlambda statistic.
    #[arg(long, required_if_eq("statistic", "tlambda"))]
    lambda: Option<f64>,
    /// Null draws.
    #[arg(long, default_value_t = 1000)]
    b: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundaryArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Replicates per cell (default 100; 500 with --full).
    #[arg(long)]
    replicates: Option<usize>,
    /// Calibration draws per replicate.
    #[arg(long, default_value_t = 1000)]
    b: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Grid points per axis (default 25; 50 with --full).
    #[arg(long)]
    grid: Option<usize>,
    /// Figure-faithful scale: 50x50 grid and 500 replicates.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PowerSurfaceArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Grid step on both delta axes (default 0.1; 0.05 with --full).
    #[arg(long)]
    step: Option<f64>,
    /// Upper end of the delta1 axis.
    #[arg(long, default_value_t = 3.0)]
    d1_max: f64,
    /// Upper end of the delta2 axis.
    #[arg(long, default_value_t = 4.0)]
    d2_max: f64,
    /// Draws per grid point (default 20000; 100000 with --full).
    #[arg(long)]
    b_point: Option<usize>,
    /// Draws for the shared null threshold (default 200000; 1000000 with --full).
    #[arg(long)]
    b_null: Option<usize>,
    #[arg(long)]
    full: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["xi2", "theta0"])))]
struct SimulateSignalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Energy exponent: the squared norm target is n^xi1.
    #[arg(long)]
    xi1: f64,
    /// Smoothness exponent: the quadratic-form target is n^xi2.
    #[arg(long)]
    xi2: Option<f64>,
    /// Perfectly smooth effect: constant on every connected component.
    #[arg(long)]
    theta0: bool,
    #[arg(long)]
    seed: u64,
    /// Output TSV; a JSON sidecar is written to "<out>.json".
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FdrArgs {
    /// Table of p-values: "id<TAB>p" rows, or one p-value per line.
    #[arg(long)]
    pvalues: PathBuf,
    /// Target false-discovery rate.
    #[arg(long, default_value_t = 0.05)]
    q: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    scores: PathBuf,
    /// Penalty: a nonnegative number, "inf", or "argmax" to reuse the
    /// maximizer of the adaptive statistic on these scores.
    #[arg(long)]
    lambda: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["xi2", "theta0"])))]
struct PowerCompareArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Energy exponent of the simulated effect.
    #[arg(long)]
    xi1: f64,
    /// Smoothness exponent of the simulated effect.
    #[arg(long)]
    xi2: Option<f64>,
    /// Perfectly smooth effect.
    #[arg(long)]
    theta0: bool,
    /// Comma-separated statistics to compare.
    #[arg(long, default_value = "tmax,maxmean,meanabs,meansq,chi2")]
    statistics: String,
    #[arg(long, default_value_t = 500)]
    replicates: usize,
    /// Calibration draws per statistic.
    #[arg(long, default_value_t = 1000)]
    b: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
        if let Err(e) = pool {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(3);
        }
    }
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Infeasible(_) => ExitCode::from(4),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::GenGraph(a) => run_gen_graph(a),
        Command::Test(a) => run_test(a),
        Command::Calibrate(a) => run_calibrate(a),
        Command::Boundary(a) => run_boundary(a),
        Command::PowerSurface(a) => run_power_surface(a),
        Command::SimulateSignal(a) => run_simulate_signal(a),
        Command::Fdr(a) => run_fdr(a),
        Command::Smooth(a) => run_smooth(a),
        Command::PowerCompare(a) => run_power_compare(a),
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "level must lie in (0,1), got {alpha}"
        )));
    }
    Ok(())
}

fn load_graph(path: &PathBuf) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

fn run_gen_graph(a: &GenGraphArgs) -> Result<()> {
    let kind = a.family.kind()?;
    let g = Graph::generate(kind, a.seed.unwrap_or(0))?;
    let mut body = metadata_line("gen-graph", a.seed, kind_params(kind), &[]);
    body.push_str(&format!("n {}\n", g.n()));
    for &(u, v) in g.edges() {
        body.push_str(&format!("{u} {v}\n"));
    }
    write_output(a.out.as_deref(), &body)?;
    Ok(())
}

fn run_test(a: &TestArgs) -> Result<()> {
    check_alpha(a.alpha)?;
    let g = load_graph(&a.graph)?;
    let stat = a.statistic.to_statistic(a.lambda)?;
    let scores_text = fs::read_to_string(&a.scores)?;

    let ctx;
    let set_name;
    let x;
    let null;
    if let Some(gmt) = &a.gmt {
        // Pathway mode: the gene set fixes the node order, the full
        // score table is the randomization universe.
        let wanted = a.set.clone().unwrap();
        let named = parse_named_scores(&scores_text)?;
        let sets = parse_gene_sets(&fs::read_to_string(gmt)?)?;
        let set = sets
            .into_iter()
            .find(|s| s.name == wanted)
            .ok_or_else(|| Error::InvalidParameter(format!("no gene set named {wanted:?}")))?;
        let have: HashSet<&str> = named.iter().map(|(k, _)| k.as_str()).collect();
        let (reduced, missing) = reduce_to_universe(&set, &have);
        if !missing.is_empty() {
            eprintln!(
                "note: {} of {} members of {wanted:?} have no score and were dropped: {}",
                missing.len(),
                missing.len() + reduced.members.len(),
                missing.join(", ")
            );
        }
        if reduced.members.len() != g.n() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} nodes but {} scored members remain in {wanted:?}",
                g.n(),
                reduced.members.len()
            )));
        }
        let table: HashMap<&str, f64> =
            named.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        x = DVector::from_iterator(
            reduced.members.len(),
            reduced.members.iter().map(|m| table[m.as_str()]),
        );
        let universe: Vec<f64> = named.iter().map(|&(_, v)| v).collect();
        ctx = GraphContext::new(g)?;
        null = randomization_null(&ctx, stat, &universe, a.b, a.seed)?;
        set_name = wanted;
    } else {
        let scores = parse_scores(&scores_text)?;
        if scores.len() != g.n() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} nodes but {} scores were given",
                g.n(),
                scores.len()
            )));
        }
        x = scores;
        ctx = GraphContext::new(g)?;
        null = mc_null(&ctx, stat, a.b, a.seed)?;
        set_name = "scores".to_string();
    }

    let sv = ctx.evaluate(stat, &x)?;
    let p_value = null.p_value(sv.value);
    let record = json!({
        "set": set_name,
        "statistic": stat.name(),
        "value": sv.value,
        "lambda_star": sv.lambda_star,
        "p_value": p_value,
        "B": a.b,
        "seed": a.seed,
    });
    write_output(a.out.as_deref(), &format!("{record}\n"))?;
    Ok(())
}

fn run_calibrate(a: &CalibrateArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let stat = a.statistic.to_statistic(a.lambda)?;
    let ctx = GraphContext::new(g)?;
    let null = mc_null(&ctx, stat, a.b, a.seed)?;
    let params = json!({
        "graph": a.graph.display().to_string(),
        "statistic": stat.name(),
        "b": a.b,
        "columns": ["null_draw"],
    });
    let mut body = metadata_line("calibrate", Some(a.seed), params, &[]);
    for v in null.values() {
        body.push_str(&format!("{v}\n"));
    }
    write_output(a.out.as_deref(), &body)?;
    Ok(())
}

fn run_boundary(a: &BoundaryArgs) -> Result<()> {
    check_alpha(a.alpha)?;
    let kind = a.family.kind()?;
    let grid_pts = a.grid.unwrap_or(if a.full { 50 } else { 25 });
    let replicates = a.replicates.unwrap_or(if a.full { 500 } else { 100 });
    let cfg = BoundaryConfig {
        kind,
        xi1: linspace(0.0, 2.0, grid_pts),
        xi2: linspace(-0.2, 0.8, grid_pts),
        replicates,
        b: a.b,
        alpha: a.alpha,
        seed: a.seed,
    };
    let grid = run_boundary_experiment(&cfg)?;

    let mut params = kind_params(kind);
    {
        let map = params.as_object_mut().unwrap();
        map.insert("replicates".into(), json!(replicates));
        map.insert("b".into(), json!(a.b));
        map.insert("alpha".into(), json!(a.alpha));
        map.insert("grid".into(), json!(grid_pts));
        map.insert(
            "columns".into(),
            json!(["xi1", "xi2", "rejection_freq"]),
        );
    }
    let mut body = metadata_line(
        "boundary",
        Some(a.seed),
        params,
        &[("na_cells", json!(grid.na_count()))],
    );
    for (i, &x1) in cfg.xi1.iter().enumerate() {
        for (j, &x2) in cfg.xi2.iter().enumerate() {
            let freq = grid
                .frequency(i, j)
                .map_or_else(|| "NA".to_string(), |f| f.to_string());
            body.push_str(&format!("{x1}\t{x2}\t{freq}\n"));
        }
    }
    write_output(a.out.as_deref(), &body)?;
    Ok(())
}

fn delta_grid(max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !max.is_finite() || max < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "grid needs step > 0 and max >= 0, got step {step}, max {max}"
        )));
    }
    let count = (max / step).round() as usize;
    Ok((0..=count).map(|i| i as f64 * step).collect())
}

fn run_power_surface(a: &PowerSurfaceArgs) -> Result<()> {
    check_alpha(a.alpha)?;
    let step = a.step.unwrap_or(if a.full { 0.05 } else { 0.1 });
    let b_point = a.b_point.unwrap_or(if a.full { 100_000 } else { 20_000 });
    let b_null = a.b_null.unwrap_or(if a.full { 1_000_000 } else { 200_000 });
    let d1 = delta_grid(a.d1_max, step)?;
    let d2 = delta_grid(a.d2_max, step)?;
    let surface = power_surface(&d1, &d2, a.alpha, b_point, b_null, a.seed)?;

    let params = json!({
        "alpha": a.alpha,
        "step": step,
        "d1_max": a.d1_max,
        "d2_max": a.d2_max,
        "b_point": b_point,
        "b_null": b_null,
        "columns": ["delta1", "delta2", "power_tmax", "power_z", "power_chi2",
                    "ratio_z", "ratio_chi2"],
    });
    let mut body = metadata_line(
        "power-surface",
        Some(a.seed),
        params,
        &[("q_alpha", json!(surface.q_alpha))],
    );
    for pt in &surface.points {
        body.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            pt.delta1, pt.delta2, pt.power_tmax, pt.power_z, pt.power_chi2,
            pt.ratio_z, pt.ratio_chi2
        ));
    }
    write_output(a.out.as_deref(), &body)?;
    Ok(())
}

fn run_simulate_signal(a: &SimulateSignalArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let s = Spectrum::of_graph(&g)?;
    let spec = if a.theta0 {
        generate_theta0_effect(&g, &s, a.xi1, a.seed)?
    } else {
        generate_effect(&g, &s, a.xi1, a.xi2.unwrap(), a.seed)?
    };

    let params = json!({
        "graph": a.graph.display().to_string(),
        "xi1": a.xi1,
        "xi2": a.xi2,
        "theta0": a.theta0,
        "columns": ["node_id", "mu_value"],
    });
    let mut body = metadata_line("simulate-signal", Some(a.seed), params, &[]);
    for (i, mu) in spec.mu.iter().enumerate() {
        body.push_str(&format!("{i}\t{mu}\n"));
    }
    write_output(Some(&a.out), &body)?;

    let sidecar = json!({
        "xi1": spec.xi1,
        "xi2": if a.theta0 { Value::Null } else { json!(spec.xi2) },
        "zeta1": spec.zeta1,
        "zeta2": spec.zeta2,
        "achieved_energy": spec.achieved_energy,
        "achieved_smoothness": spec.achieved_smoothness,
        "seed": a.seed,
    });
    let sidecar_path = PathBuf::from(format!("{}.json", a.out.display()));
    fs::write(&sidecar_path, format!("{sidecar}\n"))?;
    Ok(())
}

fn parse_pvalue_table(text: &str) -> Result<Vec<(String, f64)>> {
    let mut rows: Vec<(String, f64)> = Vec::new();
    for (num, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (id, p_token) = match tokens.as_slice() {
            [p] => (rows.len().to_string(), *p),
            [id, p] => ((*id).to_string(), *p),
            _ => {
                return Err(Error::Parse {
                    line: num + 1,
                    msg: "expected \"p\" or \"id p\"".into(),
                })
            }
        };
        let p: f64 = p_token.parse().map_err(|_| Error::Parse {
            line: num + 1,
            msg: format!("cannot parse p-value {p_token:?}"),
        })?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parse {
                line: num + 1,
                msg: format!("p-value {p} outside [0,1]"),
            });
        }
        rows.push((id, p));
    }
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no p-values found".into()));
    }
    Ok(rows)
}

fn run_fdr(a: &FdrArgs) -> Result<()> {
    check_alpha(a.q)?;
    let rows = parse_pvalue_table(&fs::read_to_string(&a.pvalues)?)?;
    let pvals: Vec<f64> = rows.iter().map(|&(_, p)| p).collect();
    let outcome = bh_fdr(&pvals, a.q)?;

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| {
        pvals[i]
            .total_cmp(&pvals[j])
            .then_with(|| rows[i].0.cmp(&rows[j].0))
    });

    let params = json!({
        "q": a.q,
        "m": rows.len(),
        "columns": ["id", "p_value", "rejected", "q"],
    });
    let mut body = metadata_line("fdr", None, params, &[]);
    for &i in &order {
        body.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            rows[i].0,
            rows[i].1,
            outcome.rejected[i] as u8,
            outcome.q[i]
        ));
    }
    write_output(a.out.as_deref(), &body)?;
    Ok(())
}

fn run_smooth(a: &SmoothArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let x = parse_scores(&fs::read_to_string(&a.scores)?)?;
    if x.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} nodes but {} scores were given",
            g.n(),
            x.len()
        )));
    }
    let s = Spectrum::of_graph(&g)?;
    let lambda = match a.lambda.as_str() {
        "argmax" => {
            let p = project_scores(&s, &x)?;
            t_max(&p, &s, &OptimizerConfig::default()).lambda_star
        }
        text => {
            let v: f64 = text.parse().map_err(|_| {
                Error::InvalidParameter(format!(
                    "penalty must be a number, \"inf\", or \"argmax\"; got {text:?}"
                ))
            })?;
            if v.is_nan() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "penalty must be nonnegative, got {v}"
                )));
            }
            v
        }
    };
    let y = smooth_scores(&s, &x, lambda)?;

    let params = json!({
        "graph": a.graph.display().to_string(),
        "lambda": a.lambda,
        "columns": ["node_id", "value"],
    });
    let resolved = if lambda.is_finite() {
        json!(lambda)
    } else {
        json!("inf")
    };
    let mut body = metadata_line("smooth", None, params, &[("lambda_used", resolved)]);
    for (i, v) in y.iter().enumerate() {
        body.push_str(&format!("{i}\t{v}\n"));
    }
    write_output(a.out.as_deref(), &body)?;
    Ok(())
}

fn parse_statistic_list(text: &str) -> Result<Vec<Statistic>> {
    let mut stats = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        stats.push(match token {
            "tmax" => Statistic::TMax,
            "chi2" => Statistic::Chi2,
            "z" => Statistic::Z,
            "meanabs" => Statistic::MeanAbs,
            "meansq" => Statistic::MeanSq,
            "maxmean" => Statistic::MaxMean,
            "r" => Statistic::R,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown statistic {other:?}"
                )))
            }
        });
    }
    Ok(stats)
}

fn run_power_compare(a: &PowerCompareArgs) -> Result<()> {
    check_alpha(a.alpha)?;
    let g = load_graph(&a.graph)?;
    let s = Spectrum::of_graph(&g)?;
    let u = if a.theta0 {
        theta0_weights(&s, a.xi1).2
    } else {
        solve_weights(&s, a.xi1, a.xi2.unwrap())?.2
    };
    let statistics = parse_statistic_list(&a.statistics)?;
    let names: Vec<String> = statistics.iter().map(|s| s.name()).collect();
    let cfg = PowerComparisonConfig {
        statistics,
        replicates: a.replicates,
        b: a.b,
        alpha: a.alpha,
        seed: a.seed,
    };
    let rows = run_power_comparison(g, &u, &cfg)?;

    let params = json!({
        "graph": a.graph.display().to_string(),
        "xi1": a.xi1,
        "xi2": a.xi2,
        "theta0": a.theta0,
        "statistics": names,
        "replicates": a.replicates,
        "b": a.b,
        "alpha": a.alpha,
        "columns": ["statistic", "power"],
    });
    let mut body = metadata_line("power-compare", Some(a.seed), params, &[]);
    for row in &rows {
        body.push_str(&format!("{}\t{}\n", row.statistic, row.power));
    }
    write_output(a.out.as_deref(), &body)?;
    Ok(())
}
