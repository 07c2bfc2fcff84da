//! End-to-end acceptance gates for the toolkit.
//!
//! Each test prints a single summary line
//! `criterion N: PASS|FAIL — detail` before asserting, so running
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```
//!
//! produces a readable checklist. The suite covers: analytic phase and
//! support guarantees of the model-based oracle (1–3), convergence of the
//! statistical estimate to the oracle (4), exact topology recovery on the
//! bundled desk-scale fixtures (5), the error-decay trend over record length
//! (6), solver/estimator contract properties (7), and byte determinism
//! across reruns and thread counts (8).

use gridtopo::config::RunConfig;
use gridtopo::estimation::{estimate_bank, estimate_correlations, predict_series, solve_wiener};
use gridtopo::experiment::{run_pipeline, simulate_case, sweep};
use gridtopo::graph::{
    generate_graph, load_case_dir, neighbor_sets, GraphKind, GridGraph, NeighborSets,
};
use gridtopo::noise::NoiseModel;
use gridtopo::panel::TimeSeriesPanel;
use gridtopo::spectral::{
    fir_frequency_response, oracle_wiener_response, swing_polynomial, FrequencyGrid,
};
use nalgebra::{Complex, DMatrix, DVector};
use std::path::{Path, PathBuf};
use std::time::Instant;

type Complex64 = Complex<f64>;

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed — {detail}");
}

fn case_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../cases")
        .join(name)
}

fn load_fixture(name: &str) -> GridGraph {
    load_case_dir(&case_dir(name)).expect("bundled case must load")
}

/// Deterministic graph battery for the oracle suites: paths n=3..6,
/// stars n=4..6, cycles n=4..6, and 20 random loopy graphs with n ≤ 12,
/// every parameter drawn from [0.5, 2].
fn oracle_battery() -> Vec<(String, GridGraph)> {
    let r = (0.5, 2.0);
    let mut graphs = Vec::new();
    let mut seed = 1_000u64;
    for n in 3..=6 {
        graphs.push((
            format!("path-{n}"),
            generate_graph(GraphKind::Path, n, seed, r, r, r).unwrap(),
        ));
        seed += 1;
    }
    for n in 4..=6 {
        graphs.push((
            format!("star-{n}"),
            generate_graph(GraphKind::Star, n, seed, r, r, r).unwrap(),
        ));
        seed += 1;
    }
    for n in 4..=6 {
        graphs.push((
            format!("cycle-{n}"),
            generate_graph(GraphKind::Cycle, n, seed, r, r, r).unwrap(),
        ));
        seed += 1;
    }
    for k in 0..20u64 {
        let n = 4 + (k as usize % 9); // 4..=12
        graphs.push((
            format!("loopy-{n}-s{}", 2_000 + k),
            generate_graph(GraphKind::RandomLoopy, n, 2_000 + k, r, r, r).unwrap(),
        ));
    }
    graphs
}

/// Heterogeneous but deterministic per-node noise PSDs in [0.5, 2].
fn battery_psd(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| 0.5 + 1.5 * (j as f64 + 0.5) / n as f64)
        .collect()
}

/// Unit-circle evaluation step small enough that every battery graph is
/// stable: damping ratios stay far above the discrete coupling strengths.
const BATTERY_TS: f64 = 0.001;

fn has_triangle(g: &GridGraph, ns: &NeighborSets) -> bool {
    g.edges().iter().any(|e| {
        ns.one_hop(e.from)
            .intersection(ns.one_hop(e.to))
            .next()
            .is_some()
    })
}

#[test]
fn criterion_1_two_hop_phase_and_neighbor_sign() {
    let started = Instant::now();
    let grid = FrequencyGrid::uniform(65).unwrap();
    let mut two_hop_pairs = 0usize;
    let mut adjacent_pairs = 0usize;
    let mut worst_im_ratio = 0.0f64;
    for (name, g) in oracle_battery() {
        let ns = neighbor_sets(&g);
        let psd = battery_psd(g.node_count());
        let set = oracle_wiener_response(&g, &psd, BATTERY_TS, &grid).unwrap();
        for j in 0..g.node_count() {
            for &i in ns.strict_two_hop(j) {
                two_hop_pairs += 1;
                for (k, v) in set.response(j, i).values().iter().enumerate() {
                    assert!(
                        v.re < 0.0,
                        "{name}: pair ({j},{i}) point {k}: Re = {} not negative",
                        v.re
                    );
                    assert!(
                        v.im.abs() < 1e-9 * v.re.abs(),
                        "{name}: pair ({j},{i}) point {k}: Im/Re = {}",
                        v.im / v.re
                    );
                    worst_im_ratio = worst_im_ratio.max(v.im.abs() / v.re.abs());
                }
            }
        }
        if !has_triangle(&g, &ns) {
            for j in 0..g.node_count() {
                for &i in ns.one_hop(j) {
                    adjacent_pairs += 1;
                    let v = set.response(j, i).values()[0]; // grid point ω = 0
                    assert!(
                        v.re > 0.0 && v.im.abs() < 1e-9 * v.re,
                        "{name}: adjacent pair ({j},{i}) at zero frequency: {v}"
                    );
                }
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    verdict(
        1,
        two_hop_pairs > 0 && adjacent_pairs > 0 && elapsed < 10.0,
        &format!(
            "{two_hop_pairs} strict two-hop directed pairs real-negative on all 65 points \
             (worst Im/Re {worst_im_ratio:.2e}); {adjacent_pairs} triangle-free adjacent pairs \
             positive at zero frequency; {elapsed:.2} s"
        ),
    );
}

#[test]
fn criterion_2_support_confined_to_two_hop() {
    let started = Instant::now();
    let grid = FrequencyGrid::uniform(65).unwrap();
    let mut outside_pairs = 0usize;
    let mut worst = 0.0f64;
    for (name, g) in oracle_battery() {
        let ns = neighbor_sets(&g);
        let psd = battery_psd(g.node_count());
        let set = oracle_wiener_response(&g, &psd, BATTERY_TS, &grid).unwrap();
        for j in 0..g.node_count() {
            for i in 0..g.node_count() {
                if i == j || ns.one_hop(j).contains(&i) || ns.two_hop(j).contains(&i) {
                    continue;
                }
                outside_pairs += 1;
                for (k, v) in set.response(j, i).values().iter().enumerate() {
                    assert!(
                        v.norm() < 1e-9,
                        "{name}: outside pair ({j},{i}) point {k}: |W| = {}",
                        v.norm()
                    );
                    worst = worst.max(v.norm());
                }
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    verdict(
        2,
        outside_pairs > 0 && elapsed < 10.0,
        &format!(
            "{outside_pairs} directed pairs beyond the two-hop neighborhood all below 1e-9 \
             (worst {worst:.2e}); {elapsed:.2} s"
        ),
    );
}

#[test]
fn criterion_3_path3_closed_form() {
    let g = GridGraph::new(
        3,
        vec![(0, 1, 1.0), (1, 2, 1.0)],
        vec![1.0; 3],
        vec![1.0; 3],
    )
    .unwrap();
    let ts = 0.01;
    let grid = FrequencyGrid::uniform(65).unwrap();
    let set = oracle_wiener_response(&g, &[1.0; 3], ts, &grid).unwrap();
    let far = set.response(0, 2);
    let mut worst = 0.0f64;
    for (k, &omega) in grid.points().iter().enumerate() {
        let z = Complex64::from_polar(1.0, omega);
        let s1 = swing_polynomial(&g, 0, ts, z);
        let closed = Complex64::new(-1.0 / (s1.norm_sqr() + 1.0), 0.0);
        worst = worst.max((far.values()[k] - closed).norm());
    }
    verdict(
        3,
        worst < 1e-9,
        &format!("end-to-end response matches −1/(|S₁|²+1) to {worst:.2e} on all 65 points"),
    );
}

#[test]
fn criterion_4_fir_estimate_approaches_oracle() {
    let started = Instant::now();
    // Unit-range parameters on a 4-cycle; the 0.4 s step makes every swing
    // mode decay within a few samples so 30 taps cover the full response.
    let g = GridGraph::new(
        4,
        vec![(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5), (0, 3, 0.5)],
        vec![0.5; 4],
        vec![2.0; 4],
    )
    .unwrap();
    let cfg = RunConfig {
        ts: 0.4,
        samples: 1_000_000,
        fir_order: 30,
        seed: 0,
        ..RunConfig::default()
    };
    let panel = simulate_case(&g, &cfg).unwrap();
    let bank = estimate_bank(&panel, cfg.fir_order).unwrap();
    let grid = FrequencyGrid::uniform(cfg.omega_points).unwrap();
    let est = fir_frequency_response(&bank, &grid);
    let orc = oracle_wiener_response(&g, &[cfg.psd; 4], cfg.ts, &grid).unwrap();
    let mut max_dev = 0.0f64;
    let mut max_orc = 0.0f64;
    for j in 0..4 {
        for i in 0..4 {
            if i == j {
                continue;
            }
            for (e, o) in est
                .response(j, i)
                .values()
                .iter()
                .zip(orc.response(j, i).values())
            {
                max_dev = max_dev.max((e - o).norm());
                max_orc = max_orc.max(o.norm());
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    verdict(
        4,
        max_dev <= 0.1 * max_orc,
        &format!(
            "30-tap estimate from 10⁶ samples within {max_dev:.4} of the oracle everywhere \
             (allowed {:.4}); {elapsed:.1} s",
            0.1 * max_orc
        ),
    );
}

/// The four bundled desk-scale fixtures with their frozen noise seed.
const RECOVERY_FIXTURES: [&str; 4] = ["path3", "star4", "cycle4", "loopy5"];
const RECOVERY_SEED: u64 = 4;

#[test]
fn criterion_5_exact_recovery_on_fixtures() {
    let mut details = Vec::new();
    let mut all_ok = true;
    for name in RECOVERY_FIXTURES {
        let g = load_fixture(name);
        let cfg = RunConfig {
            seed: RECOVERY_SEED,
            ..RunConfig::default()
        };
        let panel = simulate_case(&g, &cfg).unwrap();
        let pruned = run_pipeline(&panel, &cfg, true, Some(&g))
            .unwrap()
            .report
            .unwrap();
        let unpruned = run_pipeline(&panel, &cfg, false, Some(&g))
            .unwrap()
            .report
            .unwrap();
        // Every fixture has strict two-hop pairs, so skipping the pruning
        // step must leave spurious edges behind.
        let ok = pruned.relative_error == 0.0 && unpruned.relative_error > 0.0;
        all_ok &= ok;
        details.push(format!(
            "{name} [{} | no-prune {}]",
            pruned.report_line(),
            unpruned.report_line()
        ));
    }
    verdict(
        5,
        all_ok,
        &format!("seed {RECOVERY_SEED}: {}", details.join("; ")),
    );
}

#[test]
fn criterion_6_error_decays_with_record_length() {
    let g = load_fixture("loopy5");
    let cfg = RunConfig {
        seed: 1,
        ..RunConfig::default()
    };
    let result = sweep(&g, &cfg, &[10_000, 50_000, 200_000, 500_000]).unwrap();
    let reports: Vec<_> = result
        .rows()
        .iter()
        .map(|row| {
            row.outcome
                .as_ref()
                .unwrap_or_else(|e| panic!("sweep row T={} failed: {e}", row.samples))
        })
        .collect();
    let first = reports.first().unwrap().relative_error;
    let last = reports.last().unwrap().relative_error;
    let curve: Vec<String> = result
        .rows()
        .iter()
        .zip(&reports)
        .map(|(row, r)| format!("T={}: {:.3}", row.samples, r.relative_error))
        .collect();
    verdict(
        6,
        last == 0.0 && last <= first,
        &format!("loopy5 base seed 1: {}", curve.join(", ")),
    );
}

/// Optional long-running target, excluded from the gated suite: the bundled
/// 39-bus network at 10⁶ samples. Reports the achieved error without a pass
/// threshold. Run with `cargo test --test acceptance -- --ignored --nocapture`.
#[test]
#[ignore = "long-running optional target; reports error without a threshold"]
fn optional_39_bus_recovery_at_1e6() {
    let g = load_fixture("ieee39");
    let cfg = RunConfig {
        samples: 1_000_000,
        seed: 0,
        ..RunConfig::default()
    };
    let started = Instant::now();
    let panel = simulate_case(&g, &cfg).unwrap();
    let report = run_pipeline(&panel, &cfg, true, Some(&g))
        .unwrap()
        .report
        .unwrap();
    println!(
        "optional 39-bus target (not gated): {} in {:.0} s",
        report.report_line(),
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_7_solver_contract_properties() {
    let mut notes = Vec::new();

    // (a) System dimension for a 39-node, order-20 fit is (2·20+1)·38 = 1558.
    let noise = NoiseModel::white(1.0, 7).unwrap();
    let rows: Vec<Vec<f64>> = (0..39).map(|j| noise.draw_noise(j, 400)).collect();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let panel39 = TimeSeriesPanel::new(39, 400, 0.01, data).unwrap();
    let table39 = estimate_correlations(&panel39, 40).unwrap();
    let (taps39, _) = solve_wiener(&table39, 0, 20).unwrap();
    let dim_ok = taps39.len() == 1558;
    notes.push(format!("dimension {} (want 1558)", taps39.len()));

    // (b) Correlation mirror symmetry is exact, bit for bit.
    let noise = NoiseModel::white(1.0, 11).unwrap();
    let rows: Vec<Vec<f64>> = (0..4).map(|j| noise.draw_noise(j, 3_000)).collect();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    let panel4 = TimeSeriesPanel::new(4, 3_000, 0.01, data).unwrap();
    let table4 = estimate_correlations(&panel4, 25).unwrap();
    let mut mirror_ok = true;
    for i in 0..4 {
        for j in 0..4 {
            for l in -25isize..=25 {
                if table4.get(i, j, l).to_bits() != table4.get(j, i, -l).to_bits() {
                    mirror_ok = false;
                }
            }
        }
    }
    notes.push(format!(
        "mirror symmetry {}",
        if mirror_ok { "bit-exact" } else { "BROKEN" }
    ));

    // (c) The solved taps satisfy the stated normal equations: re-assemble
    // the system from the public correlation accessors and check the
    // residual. This is an independent reconstruction of the solve, not a
    // replay of its internals.
    let f = 6isize;
    let (taps, _) = solve_wiener(&table4, 1, f as usize).unwrap();
    let others: Vec<usize> = (0..4).filter(|&k| k != 1).collect();
    let width = (2 * f + 1) as usize;
    let dim = width * others.len();
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    for (bi, &i) in others.iter().enumerate() {
        for (li, l) in (-f..=f).enumerate() {
            let row = bi * width + li;
            b[row] = table4.get(1, i, -l);
            for (bk, &k) in others.iter().enumerate() {
                for (pi, p) in (-f..=f).enumerate() {
                    a[(row, bk * width + pi)] = table4.get(k, i, p - l);
                }
            }
        }
    }
    let residual = (&a * &taps - &b).norm() / b.norm();
    let residual_ok = residual < 1e-8;
    notes.push(format!("normal-equation residual {residual:.2e}"));

    // (d) Known-lag synthetic recovery: y(n) = 0.5·x(n−2) + small noise.
    let noise = NoiseModel::white(1.0, 13).unwrap();
    let x = noise.draw_noise(0, 200_000);
    let e = noise.draw_noise(1, 200_000);
    let y: Vec<f64> = (0..200_000)
        .map(|n| if n >= 2 { 0.5 * x[n - 2] } else { 0.0 } + 0.05 * e[n])
        .collect();
    let data: Vec<f64> = x.iter().chain(&y).cloned().collect();
    let panel2 = TimeSeriesPanel::new(2, 200_000, 0.01, data).unwrap();
    let bank2 = estimate_bank(&panel2, 5).unwrap();
    let from_x = bank2.pair_taps(1, 0); // lags −5..=5; lag −2 sits at index 3
    let peak = from_x[3];
    let stray = from_x
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != 3)
        .map(|(_, h)| h.abs())
        .fold(0.0, f64::max);
    let known_ok = (peak - 0.5).abs() < 0.02 && stray < 0.02;
    notes.push(format!("known-lag tap {peak:.4} (stray {stray:.1e})"));

    // (e) Orthogonality and variance reduction on a simulated fixture:
    // residual θ_j − θ̂_j decorrelated from every other series at every lag
    // |l| ≤ F, and no louder than θ_j itself. Computed on de-meaned series,
    // matching the correlation conventions of the fit.
    let g = load_fixture("path3");
    let cfg = RunConfig {
        samples: 100_000,
        seed: 2,
        ..RunConfig::default()
    };
    let panel = simulate_case(&g, &cfg).unwrap();
    let t = panel.n_samples();
    let centered: Vec<Vec<f64>> = (0..3)
        .map(|j| {
            let row = panel.row(j);
            let mean = row.iter().sum::<f64>() / t as f64;
            row.iter().map(|v| v - mean).collect()
        })
        .collect();
    let data: Vec<f64> = centered.iter().flatten().cloned().collect();
    let centered_panel = TimeSeriesPanel::new(3, t, cfg.ts, data).unwrap();
    let bank = estimate_bank(&centered_panel, cfg.fir_order).unwrap();
    let fo = cfg.fir_order;
    let mut worst_orth = 0.0f64;
    let mut variance_ok = true;
    for j in 0..3 {
        let (pred, first) = predict_series(&centered_panel, &bank, j);
        let target = &centered[j][first..first + pred.len()];
        let resid: Vec<f64> = target.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let var = |xs: &[f64]| xs.iter().map(|v| v * v).sum::<f64>() / xs.len() as f64;
        variance_ok &= var(&resid) <= var(target);
        let r_jj = var(&centered[j]);
        for i in (0..3).filter(|&i| i != j) {
            let r_ii = var(&centered[i]);
            let scale = (r_jj * r_ii).sqrt();
            for l in -(fo as isize)..=(fo as isize) {
                // E[resid(n) · θ_i(n + l)] over the interior window.
                let mut acc = 0.0;
                let mut count = 0usize;
                for (k, &r) in resid.iter().enumerate() {
                    let idx = first as isize + k as isize + l;
                    if idx >= 0 && (idx as usize) < t {
                        acc += r * centered[i][idx as usize];
                        count += 1;
                    }
                }
                worst_orth = worst_orth.max((acc / count as f64).abs() / scale);
            }
        }
    }
    let orth_ok = worst_orth < 1e-3;
    notes.push(format!(
        "orthogonality residual {worst_orth:.2e}, variance reduction {}",
        if variance_ok { "holds" } else { "BROKEN" }
    ));

    verdict(
        7,
        dim_ok && mirror_ok && residual_ok && known_ok && orth_ok && variance_ok,
        &notes.join("; "),
    );
}

#[test]
fn criterion_8_byte_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    };

    // (a) Rerunning the simulation produces identical panel bytes.
    let g = load_fixture("path3");
    let cfg = RunConfig {
        seed: RECOVERY_SEED,
        ..RunConfig::default()
    };
    let p1 = simulate_case(&g, &cfg).unwrap();
    let p2 = simulate_case(&g, &cfg).unwrap();
    let panel_a = dir.path().join("panel_a.bin");
    let panel_b = dir.path().join("panel_b.bin");
    p1.write_binary(&panel_a).unwrap();
    p2.write_binary(&panel_b).unwrap();
    let panels_equal = std::fs::read(&panel_a).unwrap() == std::fs::read(&panel_b).unwrap();

    // (b) The estimated edge set is identical bytes whether the per-node
    // solves run on 1 thread or 4.
    let edges_one = dir.path().join("edges_1.csv");
    let edges_four = dir.path().join("edges_4.csv");
    pool(1).install(|| {
        let outcome = run_pipeline(&p1, &cfg, true, Some(&g)).unwrap();
        outcome.estimate.write_csv(&edges_one).unwrap();
    });
    pool(4).install(|| {
        let outcome = run_pipeline(&p1, &cfg, true, Some(&g)).unwrap();
        outcome.estimate.write_csv(&edges_four).unwrap();
    });
    let edges_equal = std::fs::read(&edges_one).unwrap() == std::fs::read(&edges_four).unwrap();

    // (c) The full sweep writes identical bytes across both a rerun and a
    // change of thread count.
    let loopy = load_fixture("loopy5");
    let sweep_cfg = RunConfig {
        seed: 1,
        ..RunConfig::default()
    };
    let list = [10_000usize, 50_000, 200_000, 500_000];
    let sweep_one = dir.path().join("sweep_1.csv");
    let sweep_four = dir.path().join("sweep_4.csv");
    pool(1).install(|| {
        sweep(&loopy, &sweep_cfg, &list)
            .unwrap()
            .write_csv(&sweep_one)
            .unwrap();
    });
    pool(4).install(|| {
        sweep(&loopy, &sweep_cfg, &list)
            .unwrap()
            .write_csv(&sweep_four)
            .unwrap();
    });
    let sweeps_equal = std::fs::read(&sweep_one).unwrap() == std::fs::read(&sweep_four).unwrap();

    verdict(
        8,
        panels_equal && edges_equal && sweeps_equal,
        &format!(
            "panel rerun bytes {}; edge CSV across 1 vs 4 threads {}; sweep CSV across rerun \
             and 1 vs 4 threads {}",
            if panels_equal { "identical" } else { "DIFFER" },
            if edges_equal { "identical" } else { "DIFFER" },
            if sweeps_equal { "identical" } else { "DIFFER" },
        ),
    );
}
