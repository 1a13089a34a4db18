//! Acceptance gate: one test per release criterion, each at its stated
//! scale and tolerance. Every test prints a single summary line; run
//! with `--nocapture` to see them on success.

use std::fs;
use std::process::Command;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use graphtest_core::calibrate::mc_null;
use graphtest_core::experiment::{linspace, run_boundary_experiment, run_power_comparison, BoundaryConfig, PowerComparisonConfig};
use graphtest_core::rng::{derive_seed, stream, Purpose};
use graphtest_core::signal::{feasible_ratio_sup, generate_effect, theta0_weights, verify_effect};
use graphtest_core::spectrum::{closed_form_eigenvalues, collapse, Spectrum};
use graphtest_core::stats::{self, project_scores, t_lambda, t_max, GraphContext, OptimizerConfig, Statistic};
use graphtest_core::theory::{asymptotic_null_sample, loglog, master_root, master_root_from_distinct, power_surface};
use graphtest_core::{Graph, GraphKind};

fn gaussian(n: usize, seed: u64) -> DVector<f64> {
    let mut rng = stream(seed, Purpose::Noise, 0, 0);
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Mixed family rotation: connected, disconnected, regular, degenerate.
fn random_graph(i: usize, max_n: usize) -> Graph {
    let n = (5 + (i * 13) % (max_n - 4)).max(5);
    match i % 7 {
        0 => Graph::generate(GraphKind::ErdosRenyi { n, p: 0.08 }, i as u64).unwrap(),
        1 => Graph::generate(GraphKind::ErdosRenyi { n, p: 0.3 }, i as u64).unwrap(),
        2 => Graph::generate(GraphKind::Star { n }, 0).unwrap(),
        3 => Graph::generate(GraphKind::Cycle { n: n.max(3) }, 0).unwrap(),
        4 => Graph::generate(GraphKind::Complete { n }, 0).unwrap(),
        5 => Graph::generate(GraphKind::Empty { n }, 0).unwrap(),
        _ => {
            let half = (n / 2).max(2);
            let mut edges = Vec::new();
            for u in 0..half {
                edges.push((u, (u + 1) % half));
                edges.push((half + u, half + (u + 1) % half));
            }
            Graph::build(2 * half, &edges).unwrap()
        }
    }
}

#[test]
fn criterion_01_spectral_exactness() {
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for n in [4usize, 16, 100, 200] {
        for kind in [
            GraphKind::Star { n },
            GraphKind::Cycle { n },
            GraphKind::Complete { n },
            GraphKind::Empty { n },
        ] {
            let s = Spectrum::of_graph(&Graph::generate(kind, 0).unwrap()).unwrap();
            let want = closed_form_eigenvalues(kind).unwrap();
            for (a, b) in s.eigenvalues().iter().zip(&want) {
                worst = worst.max((a - b).abs());
            }
            cases += 1;
        }
    }
    // Square lattices at the admissible sizes nearest {4, 16, 100, 200}.
    for m in [2usize, 4, 10, 14] {
        let kind = GraphKind::Lattice { m, d: 2 };
        let s = Spectrum::of_graph(&Graph::generate(kind, 0).unwrap()).unwrap();
        let want = closed_form_eigenvalues(kind).unwrap();
        for (a, b) in s.eigenvalues().iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
        cases += 1;
    }
    assert!(worst <= 1e-8, "worst deviation {worst}");
    println!("criterion 01 PASS: {cases} spectra match closed forms, worst deviation {worst:.2e}");
}

#[test]
fn criterion_02_endpoint_identities() {
    let mut worst = 0.0f64;
    for i in 0..100 {
        let g = random_graph(i, 90);
        let s = Spectrum::of_graph(&g).unwrap();
        let x = gaussian(g.n(), 20_000 + i as u64);
        let p = project_scores(&s, &x).unwrap();
        let n = g.n() as f64;
        let k = g.components().0 as f64;

        let t0 = (x.norm_squared() - n) / n.sqrt();
        worst = worst.max((t_lambda(&p, &s, 0.0).unwrap() - t0).abs());

        let r = stats::r_statistic(&g, &x).unwrap();
        let tinf = (r - k) / k.sqrt();
        worst = worst.max((t_lambda(&p, &s, f64::INFINITY).unwrap() - tinf).abs());
    }
    assert!(worst <= 1e-10, "worst deviation {worst}");
    println!("criterion 02 PASS: endpoint identities on 100 instances, worst deviation {worst:.2e}");
}

#[test]
fn criterion_03_optimizer_oracle() {
    let cfg = OptimizerConfig::default();
    let mut hits = 0usize;
    let mut total = 0usize;
    let mut worst_gap = 0.0f64;
    for gi in 0..50 {
        let g = random_graph(gi, 100);
        let s = Spectrum::of_graph(&g).unwrap();
        for xi in 0..20 {
            let x = gaussian(g.n(), 30_000 + (gi * 20 + xi) as u64);
            let p = project_scores(&s, &x).unwrap();

            let mut grid_best = f64::NEG_INFINITY;
            for k in 0..10_000usize {
                let t = k as f64 / 9_999.0;
                let lambda = if t >= 1.0 { f64::INFINITY } else { t / (1.0 - t) };
                grid_best = grid_best.max(t_lambda(&p, &s, lambda).unwrap());
            }
            let res = t_max(&p, &s, &cfg);
            assert!(
                res.value >= grid_best - 1e-6,
                "graph {gi} scores {xi}: {} below grid {}",
                res.value,
                grid_best
            );
            worst_gap = worst_gap.max(grid_best - res.value);
            total += 1;
            if (res.value - grid_best).abs() <= 1e-6 {
                hits += 1;
            }
        }
    }
    assert!(
        hits * 100 >= total * 95,
        "grid equality in {hits}/{total} cases"
    );
    println!("criterion 03 PASS: optimizer >= dense grid on {total} cases, equal within 1e-6 in {hits}; worst shortfall {worst_gap:.2e}");
}

#[test]
fn criterion_04_complete_graph_exact_form() {
    let n = 200usize;
    let g = Graph::generate(GraphKind::Complete { n }, 0).unwrap();
    let s = Spectrum::of_graph(&g).unwrap();
    let cfg = OptimizerConfig::default();
    let mut worst = 0.0f64;
    for i in 0..100 {
        let x = gaussian(n, 40_000 + i);
        let p = project_scores(&s, &x).unwrap();
        let full = t_max(&p, &s, &cfg).value;
        let (w1, w2) = stats::complete_graph_w(&x);
        let reduced = stats::tmax_complete_theta(n, w1, w2);
        worst = worst.max((full - reduced).abs());
    }
    assert!(worst <= 1e-8, "worst deviation {worst}");
    println!("criterion 04 PASS: optimizer matches the reduced complete-graph form, worst deviation {worst:.2e}");
}

#[test]
fn criterion_05_size_control() {
    use rayon::prelude::*;

    let master = 0xC5u64;
    let graphs: Vec<(&str, Graph)> = vec![
        ("star", Graph::generate(GraphKind::Star { n: 100 }, 0).unwrap()),
        ("cycle", Graph::generate(GraphKind::Cycle { n: 100 }, 0).unwrap()),
        ("er", Graph::generate(GraphKind::ErdosRenyi { n: 100, p: 0.2 }, 905).unwrap()),
    ];
    let stats_list = [
        Statistic::TMax,
        Statistic::Chi2,
        Statistic::MaxMean,
        Statistic::MeanAbs,
    ];
    let repeats = 1000usize;
    let b = 1000usize;

    let mut report = String::new();
    for (gi, (label, g)) in graphs.iter().enumerate() {
        let ctx = GraphContext::new(g.clone()).unwrap();
        for (si, &stat) in stats_list.iter().enumerate() {
            let combo = (gi * stats_list.len() + si) as u64;
            let rejections: usize = (0..repeats)
                .into_par_iter()
                .map(|rep| {
                    // Fresh calibration per repeat on its own substream,
                    // observation on an independent stream.
                    let null_seed = derive_seed(master, Purpose::McNull, combo, rep as u64);
                    let null = mc_null(&ctx, stat, b, null_seed).unwrap();
                    let obs_seed = derive_seed(master, Purpose::ChildSeed, combo, rep as u64);
                    let x = gaussian(ctx.graph().n(), obs_seed);
                    let v = ctx.evaluate(stat, &x).unwrap().value;
                    (null.p_value(v) <= 0.05) as usize
                })
                .sum();
            let size = rejections as f64 / repeats as f64;
            assert!(
                (0.03..=0.07).contains(&size),
                "{label}/{} empirical size {size}",
                stat.name()
            );
            report.push_str(&format!(" {label}/{}={size:.3}", stat.name()));
        }
    }
    println!("criterion 05 PASS: empirical sizes in [0.03, 0.07]:{report}");
}

fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[test]
fn criterion_06_asymptotic_law() {
    let g = Graph::generate(GraphKind::Complete { n: 500 }, 0).unwrap();
    let ctx = GraphContext::new(g).unwrap();
    let exact = mc_null(&ctx, Statistic::TMax, 10_000, 61).unwrap();
    let asym = asymptotic_null_sample(100_000, 62).unwrap();
    let d = ks_two_sample(exact.values().to_vec(), asym.values().to_vec());
    assert!(d <= 0.05, "KS distance {d}");
    println!("criterion 06 PASS: KS(exact n=500, limit law) = {d:.4} <= 0.05");
}

#[test]
fn criterion_07_power_ratio_reproduction() {
    let d1: Vec<f64> = (0..=60).map(|i| i as f64 * 0.05).collect();
    let d2: Vec<f64> = (0..=80).map(|i| i as f64 * 0.05).collect();
    let surface = power_surface(&d1, &d2, 0.05, 100_000, 1_000_000, 7).unwrap();

    let min_z = surface
        .points
        .iter()
        .map(|p| p.ratio_z)
        .fold(f64::INFINITY, f64::min);
    let min_chi2 = surface
        .points
        .iter()
        .map(|p| p.ratio_chi2)
        .fold(f64::INFINITY, f64::min);
    let above_one_z = surface.points.iter().any(|p| p.ratio_z > 1.0);
    let above_one_chi2 = surface.points.iter().any(|p| p.ratio_chi2 > 1.0);

    let z_ok = (min_z - 0.857).abs() <= 0.03;
    let chi2_ok = (min_chi2 - 0.612).abs() <= 0.03;
    let verdict = if z_ok && chi2_ok && above_one_z && above_one_chi2 {
        "PASS"
    } else {
        "FAIL"
    };
    println!(
        "criterion 07 {verdict}: min ratio vs z = {min_z:.4} (target 0.857 +/- 0.03), \
         vs chi2 = {min_chi2:.4} (target 0.612 +/- 0.03), ratios above 1: z {above_one_z}, chi2 {above_one_chi2}"
    );
    assert!(above_one_z && above_one_chi2, "no ratios above 1 found");
    // Exact integration of the limit law puts these minima at 0.921 and
    // 0.753; the published targets are reproducible only by dropping the
    // branch conditions of the limit law, which the distributional check
    // against exact finite-n draws rules out. The stated targets are kept.
    assert!(z_ok, "min ratio vs z = {min_z:.4}, outside 0.857 +/- 0.03");
    assert!(chi2_ok, "min ratio vs chi2 = {min_chi2:.4}, outside 0.612 +/- 0.03");
}

#[test]
fn criterion_08_master_equation() {
    // 1000 queries: 100 graphs x 10 penalties each, residuals recomputed
    // from the collapsed spectrum.
    let mut worst_rel = 0.0f64;
    let mut queries = 0usize;
    for gi in 0..100usize {
        let n = 3 + (gi * 17) % 280;
        let (distinct, nn): (Vec<(f64, usize)>, usize) = match gi % 5 {
            0 => {
                let vals = closed_form_eigenvalues(GraphKind::Star { n }).unwrap();
                (collapse(&vals, 1e-9), n)
            }
            1 => {
                let vals = closed_form_eigenvalues(GraphKind::Cycle { n: n.max(3) }).unwrap();
                (collapse(&vals, 1e-9), n.max(3))
            }
            2 => {
                let vals = closed_form_eigenvalues(GraphKind::Complete { n }).unwrap();
                (collapse(&vals, 1e-9), n)
            }
            3 => {
                let vals = closed_form_eigenvalues(GraphKind::Empty { n }).unwrap();
                (collapse(&vals, 1e-9), n)
            }
            _ => {
                let m = (n / 3).clamp(4, 60);
                let g = Graph::generate(GraphKind::ErdosRenyi { n: m, p: 0.2 }, gi as u64)
                    .unwrap();
                let s = Spectrum::of_graph(&g).unwrap();
                (s.distinct().to_vec(), m)
            }
        };
        if nn < 3 {
            continue;
        }
        let c = loglog(nn);
        for qi in 0..10usize {
            let eta2 = 10f64.powf(((gi * 10 + qi) as f64 * 0.713).sin() * 6.0);
            let x = master_root_from_distinct(&distinct, eta2).unwrap();
            let rhs: f64 = distinct
                .iter()
                .map(|&(lam, m)| m as f64 / (1.0 + x * lam / (2.0 * eta2)).powi(2))
                .sum::<f64>()
                * c;
            let rel = (x * x - rhs).abs() / (x * x);
            worst_rel = worst_rel.max(rel);
            queries += 1;
        }
    }
    assert!(queries >= 1000, "only {queries} queries");
    assert!(worst_rel <= 1e-8, "worst residual {worst_rel}");

    // Limits and monotonicity on representative graphs.
    for kind in [
        GraphKind::Star { n: 80 },
        GraphKind::Cycle { n: 48 },
        GraphKind::ErdosRenyi { n: 50, p: 0.15 },
    ] {
        let g = Graph::generate(kind, 4).unwrap();
        let s = Spectrum::of_graph(&g).unwrap();
        let c = loglog(g.n());
        let k = s.zero_multiplicity() as f64;
        let n = g.n() as f64;
        let lo = master_root(&s, 1e-12).unwrap();
        let hi = master_root(&s, 1e12).unwrap();
        assert!(((lo - (k * c).sqrt()) / (k * c).sqrt()).abs() <= 1e-3);
        assert!(((hi - (n * c).sqrt()) / (n * c).sqrt()).abs() <= 1e-3);
        let mut prev = 0.0;
        for e in -24..=24 {
            let x = master_root(&s, 10f64.powf(e as f64 / 2.0)).unwrap();
            assert!(x >= prev - 1e-12, "{kind:?} not monotone");
            prev = x;
        }
    }
    println!("criterion 08 PASS: {queries} master-equation roots, worst residual {worst_rel:.2e}; limits and monotonicity verified");
}

#[test]
fn criterion_09_signal_simulator_fidelity() {
    let mut worst_target = 0.0f64;
    let mut worst_edge = 0.0f64;
    let mut draws = 0usize;
    for gi in 0..50usize {
        // Only families with edges; the ratio interval must be nonempty.
        let g = match gi % 4 {
            0 => Graph::generate(
                GraphKind::ErdosRenyi { n: 12 + (gi * 7) % 60, p: 0.25 },
                gi as u64,
            )
            .unwrap(),
            1 => Graph::generate(GraphKind::Star { n: 10 + (gi * 5) % 60 }, 0).unwrap(),
            2 => Graph::generate(GraphKind::Cycle { n: 10 + (gi * 3) % 60 }, 0).unwrap(),
            _ => Graph::generate(GraphKind::Lattice { m: 3 + gi % 5, d: 2 }, 0).unwrap(),
        };
        let s = Spectrum::of_graph(&g).unwrap();
        let n = g.n() as f64;
        let sup = feasible_ratio_sup(&s);
        for qi in 0..20usize {
            let i = gi * 20 + qi;
            let xi1 = 0.1 + 1.1 * ((i as f64 * 0.37).sin().abs());
            let frac = 0.02 + 0.96 * ((i as f64 * 0.59).cos().abs());
            let xi2 = xi1 + (frac * sup).ln() / n.ln();

            let spec = generate_effect(&g, &s, xi1, xi2, 50_000 + i as u64).unwrap();
            let te = n.powf(xi1);
            let ts = n.powf(xi2);
            let (energy, smooth) = verify_effect(&g, &spec.mu).unwrap();
            worst_target = worst_target
                .max(((energy - te) / te).abs())
                .max(((smooth - ts) / ts).abs());

            // Independent route: the same quantities through the eigenbasis.
            let coef = s.eigenvectors().tr_mul(&spec.mu);
            let spectral_energy = coef.norm_squared();
            let spectral_smooth: f64 = s
                .eigenvalues()
                .iter()
                .zip(coef.iter())
                .map(|(lam, c)| lam * c * c)
                .sum();
            worst_edge = worst_edge
                .max((energy - spectral_energy).abs() / te.max(1.0))
                .max((smooth - spectral_smooth).abs() / ts.max(1.0));
            draws += 1;
        }
    }
    assert_eq!(draws, 1000);
    assert!(worst_target <= 1e-6, "worst target error {worst_target}");
    assert!(worst_edge <= 1e-8, "worst edgewise disagreement {worst_edge}");
    println!("criterion 09 PASS: 1000 effects, worst target error {worst_target:.2e}, worst edgewise disagreement {worst_edge:.2e}");
}

#[test]
fn criterion_10_boundary_shape() {
    let cfg = BoundaryConfig {
        kind: GraphKind::ErdosRenyi { n: 200, p: 0.2 },
        xi1: linspace(0.0, 2.0, 25),
        xi2: linspace(-0.2, 0.8, 25),
        replicates: 100,
        b: 1000,
        alpha: 0.05,
        seed: 10,
    };
    let grid = run_boundary_experiment(&cfg).unwrap();

    // Supercritical region: xi1 >= 1.5.
    let (mut hi_sum, mut hi_cnt) = (0.0, 0usize);
    // Subcritical region: xi1 <= 0.2, xi2 >= 0.6.
    let (mut lo_sum, mut lo_cnt) = (0.0, 0usize);
    for (i, &x1) in cfg.xi1.iter().enumerate() {
        for (j, &x2) in cfg.xi2.iter().enumerate() {
            if let Some(f) = grid.frequency(i, j) {
                if x1 >= 1.5 - 1e-12 {
                    hi_sum += f;
                    hi_cnt += 1;
                }
                if x1 <= 0.2 + 1e-12 && x2 >= 0.6 - 1e-12 {
                    lo_sum += f;
                    lo_cnt += 1;
                }
            }
        }
    }
    let hi = hi_sum / hi_cnt as f64;
    let lo = lo_sum / lo_cnt as f64;
    assert!(hi >= 0.9, "supercritical mean rejection {hi}");
    assert!(lo <= 0.15, "subcritical mean rejection {lo}");

    // Row averages nondecreasing in xi1 up to 3 binomial sd of the
    // row-mean estimate.
    let mut rows = Vec::new();
    for i in 0..cfg.xi1.len() {
        let feasible: usize = (0..cfg.xi2.len())
            .filter(|&j| grid.frequency(i, j).is_some())
            .count();
        rows.push((grid.row_mean(i).unwrap(), feasible));
    }
    for w in rows.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        let tol = 3.0
            * (0.25 / (cfg.replicates as f64 * fa as f64)
                + 0.25 / (cfg.replicates as f64 * fb as f64))
                .sqrt();
        assert!(b >= a - tol, "row means decreasing: {a} -> {b} (tol {tol})");
    }
    println!("criterion 10 PASS: mean rejection {hi:.3} in the supercritical region, {lo:.3} in the subcritical region, {} NA cells, row averages monotone", grid.na_count());
}

#[test]
fn criterion_11_determinism_across_threads() {
    let bin = env!("CARGO_BIN_EXE_graphtest");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    let graph_file = path("g.txt");
    let scores_file = path("s.txt");
    let pvals_file = path("p.txt");
    let sv = |args: &[&str]| -> Vec<String> { args.iter().map(|a| a.to_string()).collect() };
    let run_ok = |args: &[String]| {
        let st = Command::new(bin).args(args).status().unwrap();
        assert!(st.success(), "graphtest {args:?} failed");
    };
    run_ok(&sv(&[
        "gen-graph", "--family", "er", "--n", "40", "--p", "0.2", "--seed", "3",
        "--out", &graph_file,
    ]));
    fs::write(
        &scores_file,
        (0..40).map(|i| format!("{}\n", (i as f64 * 0.37).sin())).collect::<String>(),
    )
    .unwrap();
    fs::write(&pvals_file, "a 0.01\nb 0.3\nc 0.04\n").unwrap();

    // Every subcommand, exercised at 1 and at 8 worker threads.
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("gen-graph", sv(&["gen-graph", "--family", "er", "--n", "50", "--p",
            "0.15", "--seed", "9"])),
        ("test", sv(&["test", "--graph", &graph_file, "--scores", &scores_file,
            "--b", "500", "--seed", "4"])),
        ("calibrate", sv(&["calibrate", "--graph", &graph_file, "--statistic",
            "tmax", "--b", "400", "--seed", "5"])),
        ("boundary", sv(&["boundary", "--family", "er", "--n", "20", "--p",
            "0.25", "--grid", "3", "--replicates", "6", "--b", "150",
            "--seed", "6"])),
        ("power-surface", sv(&["power-surface", "--step", "1.0", "--b-point",
            "20000", "--b-null", "40000", "--seed", "7"])),
        ("simulate-signal", sv(&["simulate-signal", "--graph", &graph_file,
            "--xi1", "0.6", "--xi2", "0.2", "--seed", "8"])),
        ("power-compare", sv(&["power-compare", "--graph", &graph_file, "--xi1",
            "0.8", "--theta0", "--replicates", "60", "--b", "300", "--seed", "9"])),
        ("fdr", sv(&["fdr", "--pvalues", &pvals_file, "--q", "0.1"])),
        ("smooth", sv(&["smooth", "--graph", &graph_file, "--scores",
            &scores_file, "--lambda", "argmax"])),
    ];

    for (name, base) in cases {
        let mut outputs = Vec::new();
        for (tag, threads) in [("t1", "1"), ("t8", "8")] {
            let out_file = path(&format!("{name}-{tag}.out"));
            let mut args = base.clone();
            args.extend(["--out".to_string(), out_file.clone()]);
            args.extend(["--threads".to_string(), threads.to_string()]);
            run_ok(&args);
            let mut bytes = fs::read(&out_file).unwrap();
            if name == "simulate-signal" {
                bytes.extend(fs::read(format!("{out_file}.json")).unwrap());
            }
            outputs.push(bytes);
        }
        assert_eq!(outputs[0], outputs[1], "{name} differs across thread counts");
    }
    println!("criterion 11 PASS: all 9 subcommands byte-identical at 1 and 8 threads");
}

#[test]
fn criterion_12_competitor_dominance_on_smooth_signals() {
    // First ER(60, 0.1) seed giving a connected graph; deterministic.
    let seed = (0..200u64)
        .find(|&s| {
            Graph::generate(GraphKind::ErdosRenyi { n: 60, p: 0.1 }, s)
                .unwrap()
                .components()
                .0
                == 1
        })
        .expect("no connected draw");
    let g = Graph::generate(GraphKind::ErdosRenyi { n: 60, p: 0.1 }, seed).unwrap();
    let s = Spectrum::of_graph(&g).unwrap();
    let n = 60f64;

    let run = |norm2: f64, replicates: usize, seed: u64| -> (f64, f64) {
        let xi1 = norm2.ln() / n.ln();
        let u = theta0_weights(&s, xi1).2;
        let cfg = PowerComparisonConfig {
            statistics: vec![Statistic::TMax, Statistic::Chi2],
            replicates,
            b: 1000,
            alpha: 0.05,
            seed,
        };
        let rows = run_power_comparison(g.clone(), &u, &cfg).unwrap();
        (rows[0].power, rows[1].power)
    };

    // Pilot scan picks the signal norm whose adaptive power sits nearest
    // the middle of [0.6, 0.9]; the final verdict uses 500 replicates.
    let candidates = [4.0, 6.0, 8.0, 10.0, 13.0, 16.0, 20.0];
    let norm2 = candidates
        .iter()
        .copied()
        .map(|c| (c, (run(c, 150, 120).0 - 0.8).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;

    let (p_tmax, p_chi2) = run(norm2, 500, 121);
    assert!(
        (0.6..=0.9).contains(&p_tmax),
        "adaptive power {p_tmax} at norm2 {norm2}"
    );
    assert!(
        p_tmax - p_chi2 >= 0.1,
        "advantage {} at norm2 {norm2}",
        p_tmax - p_chi2
    );
    println!("criterion 12 PASS: ||mu||^2 = {norm2} gives T_max power {p_tmax:.3} vs chi2 {p_chi2:.3} on a connected n=60 graph");
}

// Dense-matrix cross-check kept alongside the criteria: the projected
// statistic agrees with the direct (I + lambda L)^{-1} evaluation.
#[test]
fn spectral_equals_direct_resolvent_form() {
    for i in 0..10 {
        let g = random_graph(i, 45);
        let s = Spectrum::of_graph(&g).unwrap();
        let x = gaussian(g.n(), 70_000 + i as u64);
        let p = project_scores(&s, &x).unwrap();
        let n = g.n();
        for lambda in [0.0, 0.5, 5.0] {
            let m = (DMatrix::<f64>::identity(n, n) + lambda * g.laplacian())
                .try_inverse()
                .unwrap();
            let quad = (x.transpose() * &m * &x)[(0, 0)];
            let tr2: f64 = m.iter().map(|v| v * v).sum();
            let direct = (quad - m.trace()) / tr2.sqrt();
            assert!((t_lambda(&p, &s, lambda).unwrap() - direct).abs() <= 1e-8);
        }
    }
}
