//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use botma_core::cma::{self, cma_sample, cma_update, BoxRepair, CmaConfig, CmaState, RecombinationWeights};
use botma_core::ga::{self, bit_width, ChromosomeLayout, GaConfig};
use botma_core::grid::{grid_cell_count, grid_search, GridSpec};
use botma_core::harness::{compare_solvers, noise_sweep, run_monte_carlo};
use botma_core::kinematics::{synthesize_bearings, BearingSeries, Observation};
use botma_core::objective::{angle_residual, cost_euclidean, cost_total_deviation_nonmetric};
use botma_core::{presets, BearingObjective, CandidateXY, Scenario, SearchBoundsXY, SolverConfig};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const PROPERTY_CASES: usize = 10_000;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn trial07() -> Scenario {
    presets::preset("trial07").expect("trial07 preset")
}

fn observe(s: &Scenario) -> Observation {
    synthesize_bearings(s, &mut ChaCha8Rng::seed_from_u64(s.seed)).expect("synthesis")
}

fn objective_for(s: &Scenario) -> BearingObjective {
    let o = observe(s);
    BearingObjective::new(&o.noisy, &o.observer).expect("objective")
}

fn c1_bit_width() -> Outcome {
    let widths = [
        bit_width(20_000.0, 0.0, 7),
        bit_width(20_000.0, 0.0, 7),
        bit_width(360.0, 0.0, 7),
        bit_width(25.0, 0.0, 7),
    ];
    let widths: Vec<u32> = widths.into_iter().map(|w| w.expect("bit width")).collect();
    let total = ChromosomeLayout::new(&SearchBoundsXY::reference(), 7)
        .expect("layout")
        .total_bits;
    outcome(
        widths == [38, 38, 32, 28] && total == 136,
        format!("widths {widths:?}, total {total} (want [38, 38, 32, 28], 136)"),
    )
}

fn c2_feval_accounting() -> Outcome {
    let def = GaConfig::default();
    let closed_form = def.fevals_per_outer_run() == 700_000 && def.fevals_total() == 14_000_000;

    let small = GaConfig {
        population_size: 10,
        narrowing_generations: 3,
        main_generations: 5,
        inner_runs: 2,
        outer_runs: 3,
        ..GaConfig::default()
    };
    let per_run = (small.population_size * (small.narrowing_generations + small.main_generations) * small.inner_runs) as u64;
    let summary = run_monte_carlo(&SolverConfig::Ga(small.clone()), &trial07(), small.outer_runs, 1).expect("mc");
    let small_ok = small.fevals_per_outer_run() == per_run
        && summary.records.iter().all(|r| r.fevals == per_run)
        && summary.total_fevals == per_run * small.outer_runs as u64;

    let f = objective_for(&trial07());
    let report = ga::run_tmaga(&f, &def, &mut ChaCha8Rng::seed_from_u64(2)).expect("tmaga");
    let full_ok = report.fevals == 700_000 && f.fevals() == 700_000;
    outcome(
        closed_form && small_ok && full_ok,
        format!(
            "closed form {} / {}; reduced scale {} x {per_run} counted {}; full run counted {} (want 700000)",
            def.fevals_per_outer_run(),
            def.fevals_total(),
            small.outer_runs,
            summary.total_fevals,
            f.fevals()
        ),
    )
}

fn c3_grid_arithmetic() -> Outcome {
    let n = grid_cell_count(&GridSpec::reference()).expect("count");
    outcome(n == 50_400_000, format!("{n} cells (want 50400000)"))
}

fn c4_noiseless_recovery() -> Outcome {
    let tol = [10.0, 0.1, 0.05];
    let s = trial07();
    let summary = run_monte_carlo(&SolverConfig::Cma(CmaConfig::default()), &s, 20, 4).expect("mc");
    let truth = [4006.0, 90.0, 10.0];
    let worst = summary.records.iter().fold([0.0f64; 3], |acc, r| {
        [
            acc[0].max((r.r - truth[0]).abs()),
            acc[1].max(angle_residual(r.course, truth[1]).abs()),
            acc[2].max((r.speed - truth[2]).abs()),
        ]
    });
    let [sr, sc, ss] = summary.stats();
    let stds = [sr.std, sc.std, ss.std];
    let pass = (0..3).all(|i| worst[i] <= tol[i] && stds[i] < tol[i]);
    outcome(
        pass,
        format!(
            "M=20 max |err| R {:.3e} m, C {:.3e} deg, S {:.3e} m/s; std {:.3e} / {:.3e} / {:.3e} (tol 10 / 0.1 / 0.05)",
            worst[0], worst[1], worst[2], stds[0], stds[1], stds[2]
        ),
    )
}

fn c5_feval_ratio() -> Outcome {
    // noiseless trial07 with the budget as the only stopping rule
    let configs = vec![
        ("ga".to_string(), SolverConfig::Ga(GaConfig::default())),
        ("cma".to_string(), SolverConfig::Cma(CmaConfig::default().budget_only())),
    ];
    let cmp = compare_solvers(&trial07(), &configs, 2, 5).expect("compare");
    let ratio = cmp.feval_ratio("ga", "cma").expect("ratio");
    let ga = cmp.row("ga").expect("ga row").fevals_per_run();
    let cma = cmp.row("cma").expect("cma row").fevals_per_run();
    outcome(
        ratio == 14.0,
        format!("ga {ga} / cma {cma} fevals per run = {ratio} (want exactly 14)"),
    )
}

fn c6_grid_dominance() -> Outcome {
    let f = objective_for(&trial07());
    let spec = GridSpec::coarse();
    let grid = grid_search(&f, &spec).expect("grid");
    let cma = cma::run_cma(&f, &CmaConfig::default(), &mut ChaCha8Rng::seed_from_u64(6)).expect("cma");
    let steps = [spec.r0.step, spec.course.step, spec.speed.step];
    let b = grid.best;
    let near = (b.r0 - 4006.0).abs() <= steps[0]
        && angle_residual(b.course, 90.0).abs() <= steps[1]
        && (b.speed - 10.0).abs() <= steps[2];
    outcome(
        cma.best_cost <= grid.best_cost && near,
        format!(
            "cma cost {:.3e} <= grid cost {:.3e}; grid argmin ({}, {}, {}) within one step of (4006, 90, 10)",
            cma.best_cost, grid.best_cost, b.r0, b.course, b.speed
        ),
    )
}

fn series(values: Vec<f64>) -> BearingSeries {
    BearingSeries {
        times: (0..values.len()).map(|i| i as f64).collect(),
        bearings_deg: values,
    }
}

fn c7_nonmetric_defect() -> Outcome {
    let m = series(vec![3.0]);
    let g = series(vec![4.0]);
    let nm = cost_total_deviation_nonmetric(&m, &g).expect("cost");
    let eu = cost_euclidean(&m, &g).expect("cost");
    let pair_ok = nm.undefined_count == 1 && (eu.value - 1.0).abs() < 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut undefined = 0usize;
    let mut terms = 0usize;
    for _ in 0..1000 {
        let n = rng.random_range(1..50);
        let a = series((0..n).map(|_| rng.random_range(0.0..360.0)).collect());
        let b = series((0..n).map(|_| rng.random_range(0.0..360.0)).collect());
        undefined += cost_total_deviation_nonmetric(&a, &b).expect("cost").undefined_count;
        terms += n;
    }
    let freq = undefined as f64 / terms as f64;
    outcome(
        pair_ok && undefined > 0,
        format!(
            "(3, 4): undefined_count {}, euclidean {}; random series undefined-term frequency {freq:.3}",
            nm.undefined_count, eu.value
        ),
    )
}

fn c8a_noise_monotonicity() -> Outcome {
    let sigmas = [0.0, 0.5, 1.0, 2.0];
    let sweep = noise_sweep(&SolverConfig::Cma(CmaConfig::default()), &trial07(), &sigmas, 100, 8).expect("sweep");
    let stds: Vec<f64> = sweep.rows.iter().map(|(_, s)| s.stats()[0].std).collect();
    let pass = stds.windows(2).all(|w| w[1] >= w[0]);
    let shown: Vec<String> = sigmas.iter().zip(&stds).map(|(s, d)| format!("{s}: {d:.1}")).collect();
    outcome(pass, format!("M=100 range std by noise {{{}}} non-decreasing", shown.join(", ")))
}

fn c8b_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut failures = Vec::new();

    // wrap invariance
    let wrap_ok = (0..PROPERTY_CASES).all(|_| {
        let a: f64 = rng.random_range(-720.0..720.0);
        let b: f64 = rng.random_range(-720.0..720.0);
        let k = rng.random_range(-3..=3) as f64 * 360.0;
        let r = angle_residual(a, b);
        (-180.0..180.0).contains(&r) && (angle_residual(a + k, b) - r).abs() < 1e-9
    });
    if !wrap_ok {
        failures.push("wrap invariance");
    }

    // metric axioms of the euclidean cost
    let metric_ok = (0..PROPERTY_CASES).all(|_| {
        let n = rng.random_range(1..8);
        let mut draw = || series((0..n).map(|_| rng.random_range(0.0..360.0)).collect());
        let (x, y, z) = (draw(), draw(), draw());
        let d = |p: &BearingSeries, q: &BearingSeries| cost_euclidean(p, q).expect("cost").value;
        d(&x, &x) < 1e-12 && (d(&x, &y) - d(&y, &x)).abs() < 1e-9 && d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9
    });
    if !metric_ok {
        failures.push("metric axioms");
    }

    // chromosome codec round trip
    let layout = ChromosomeLayout::new(&SearchBoundsXY::reference(), 7).expect("layout");
    let codec_ok = (0..PROPERTY_CASES).all(|_| {
        let c = CandidateXY::new(
            rng.random_range(0.0..=20_000.0),
            rng.random_range(0.0..=20_000.0),
            rng.random_range(0.0..=360.0),
            rng.random_range(0.0..=25.0),
        );
        let d = layout.decode(&layout.encode(&c).expect("encode"));
        c.to_array()
            .iter()
            .zip(d.to_array())
            .zip(layout.segments.iter())
            .all(|((a, b), seg)| (a - b).abs() <= 0.5 * seg.step() + 1e-9)
    });
    if !codec_ok {
        failures.push("codec round trip");
    }

    // recombination weights: positive, non-increasing, sum to one
    let weights_ok = (0..PROPERTY_CASES).all(|_| {
        let mu = rng.random_range(1..200);
        let w = RecombinationWeights::log_linear(mu);
        let s = w.as_slice();
        s.len() == mu
            && s.iter().all(|v| *v > 0.0)
            && s.windows(2).all(|p| p[1] <= p[0])
            && (s.iter().sum::<f64>() - 1.0).abs() < 1e-12
    });
    if !weights_ok {
        failures.push("weight constraint");
    }

    // covariance stays symmetric positive definite under random rankings
    let weights = RecombinationWeights::log_linear(5);
    let rates = botma_core::cma::LearningRates::defaults(3, &weights);
    let mut state = CmaState::new(DVector::from_element(3, 0.5), 0.3);
    let mut pd_ok = true;
    for _ in 0..PROPERTY_CASES {
        let mut xs = cma_sample(&state, 10, BoxRepair::ResampleThenClamp(10), &mut rng);
        let keys: Vec<f64> = (0..xs.len()).map(|_| rng.random()).collect();
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|a, b| keys[*a].total_cmp(&keys[*b]));
        xs = idx.into_iter().map(|i| xs[i].clone()).collect();
        if cma_update(&mut state, &xs, &weights, &rates).is_err() {
            pd_ok = false;
            break;
        }
        let c = &state.cov;
        let sym = (c - c.transpose()).abs().max() <= 1e-12 * c.abs().max();
        let min_eig = c.clone().symmetric_eigen().eigenvalues.min();
        if !sym || min_eig.is_nan() || min_eig <= 0.0 {
            pd_ok = false;
            break;
        }
    }
    if !pd_ok {
        failures.push("covariance positive definiteness");
    }

    // determinism per seed
    let s = trial07().with_noise(1.0);
    let cfg = SolverConfig::Cma(CmaConfig {
        feval_budget: 2_000,
        ..CmaConfig::default()
    });
    let a = run_monte_carlo(&cfg, &s, 4, 99).expect("mc");
    let b = run_monte_carlo(&cfg, &s, 4, 99).expect("mc");
    if a.records != b.records {
        failures.push("determinism per seed");
    }

    let detail = if failures.is_empty() {
        format!("wrap, metric, codec, weights, covariance PD ({PROPERTY_CASES} cases each), determinism all hold")
    } else {
        format!("failed: {}", failures.join(", "))
    };
    outcome(failures.is_empty(), detail)
}

fn c9_ga_sanity() -> Outcome {
    let f = objective_for(&trial07());
    let cfg = GaConfig::default();
    let truth = CandidateXY::new(0.0, 4006.0, 90.0, 10.0);
    let results: Vec<_> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let g = objective_for(&trial07());
            let r = ga::run_tmaga(&g, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).expect("tmaga");
            let est = r.solution.to_range_form(f.observer_start());
            let ok = angle_residual(est.course, 90.0).abs() <= 2.0 && (est.speed - 10.0).abs() <= 1.0;
            let narrowed_hits = r.inner.iter().filter(|i| i.narrowed.contains(&truth)).count();
            (ok, est, narrowed_hits)
        })
        .collect();
    let hits = results.iter().filter(|r| r.0).count();
    let narrowed: usize = results.iter().map(|r| r.2).sum();
    let detail: Vec<String> = results
        .iter()
        .map(|(_, e, _)| format!("({:.1}, {:.2})", e.course, e.speed))
        .collect();
    outcome(
        hits >= 8,
        format!(
            "{hits}/10 runs within +-2 deg / +-1 m/s (want >= 8); course, speed per run {}; truth inside narrowed box in {narrowed}/200 inner runs",
            detail.join(" ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("1  bit-width replication", c1_bit_width),
        ("2  feval accounting", c2_feval_accounting),
        ("3  grid arithmetic", c3_grid_arithmetic),
        ("4  noiseless recovery", c4_noiseless_recovery),
        ("5  feval ratio", c5_feval_ratio),
        ("6  grid oracle dominance", c6_grid_dominance),
        ("7  non-metric cost defect", c7_nonmetric_defect),
        ("8a noise monotonicity", c8a_noise_monotonicity),
        ("8b property suites", c8b_properties),
        ("9  GA sanity", c9_ga_sanity),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {name}: {} [{secs:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    }
}
