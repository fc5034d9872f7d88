//! Acceptance criteria. Every criterion runs and prints one `ACn PASS|FAIL`
//! line with the measured values; the process exits non-zero if any failed.
//!
//! Run with `cargo test -p gp-lab --test acceptance`, optionally followed by
//! `-- ac3 ac7` to select criteria by id.

use std::time::Instant;

use gp_lab::analysis::{
    classify_leaves, classify_leaves_naive, estimate_drift, exact_drift, lemma3_bounds, Potential,
    Predicate,
};
use gp_lab::drift_lab::{run_checks, CheckOptions, Direction};
use gp_lab::experiments::{
    fraction_within, sweep, write_raw_csv, write_summary_csv, SweepConfig, SweepInit, SweepOutput,
};
use gp_lab::mutation::{hvl_prime_in_place, sample_k};
use gp_lab::{
    GpTree, InitSpec, KDistribution, Literal, OrderTracking, Problem, RngStream, RunConfig,
    TraceMode,
};

fn verdict(id: u32, pass: bool, detail: &str) -> bool {
    println!("AC{id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn random_leaves(n: u32, size: usize, rng: &mut RngStream) -> Vec<Literal> {
    (0..size)
        .map(|_| Literal::from_code(rng.below(2 * u64::from(n))))
        .collect()
}

/// Log-uniform integer in [1, hi].
fn log_uniform(hi: usize, rng: &mut RngStream) -> usize {
    let x = (rng.unit() * (hi as f64).ln()).exp();
    (x as usize).clamp(1, hi)
}

fn ac1_incremental_fitness_matches_recomputation() -> bool {
    let start = Instant::now();
    let mut rng = RngStream::new(0xAC1);
    let mut edits = 0u64;
    let mut mismatches = 0u64;
    let mut max_size = 0usize;
    for problem in [Problem::Majority, Problem::Order] {
        let trackings: &[OrderTracking] = match problem {
            Problem::Order => &[OrderTracking::Indexed, OrderTracking::Rescan],
            Problem::Majority => &[OrderTracking::Indexed],
        };
        for tree_no in 0..20 {
            let n = 1 + rng.below(50) as u32;
            let size = log_uniform(5_000, &mut rng);
            let leaves = random_leaves(n, size, &mut rng);
            let tracking = trackings[tree_no % trackings.len()];
            let mut tree = GpTree::with_tracking(problem, n, &leaves, tracking).unwrap();
            for _ in 0..5_000 {
                hvl_prime_in_place(&mut tree, &mut rng);
                edits += 1;
                max_size = max_size.max(tree.size());
                let full = problem.evaluate(&tree.leaves(), n);
                if tree.expressed() != full {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = edits >= 100_000 && mismatches == 0 && max_size <= 10_000 && elapsed < 60.0;
    verdict(
        1,
        pass,
        &format!("{edits} edits, {mismatches} mismatches, max size {max_size}, {elapsed:.1}s"),
    )
}

fn ac2_leaf_partition_properties() -> bool {
    let start = Instant::now();
    let mut rng = RngStream::new(0xAC2);
    let mut failures = Vec::new();
    for problem in [Problem::Majority, Problem::Order] {
        for _ in 0..10_000 {
            let n = 1 + rng.below(20) as u32;
            let size = 1 + rng.below(200) as usize;
            let leaves = random_leaves(n, size, &mut rng);
            let c = classify_leaves_naive(problem, n, &leaves);
            let v = problem.evaluate(&leaves, n) as usize;
            let (r, cp, cn) = (c.redundant, c.critical_pos, c.critical_neg);
            let mut ok = r + cp + cn == size && cp <= r + v && cn <= 2 * r;
            if problem == Problem::Order {
                ok &= cn <= r;
            }
            let tree = GpTree::new(problem, n, &leaves).unwrap();
            ok &= classify_leaves(&tree) == c;
            if !ok && failures.len() < 5 {
                failures.push(format!(
                    "{problem:?} n={n} r={r} c+={cp} c-={cn} v={v} s={size}"
                ));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && elapsed < 60.0;
    verdict(
        2,
        pass,
        &format!("2x10^4 trees, failures {failures:?}, {elapsed:.1}s"),
    )
}

fn ac3_series_bounds_at_m_ten() -> bool {
    let b = lemma3_bounds(10).unwrap();
    let first = b.b1_times_e();
    let second = b.b2_coefficient_times_e();
    let target_first = 4e-7;
    let target_second = 0.7 * 4e-6;
    let err_first = (first - target_first).abs() / target_first;
    let err_second = (second - target_second).abs() / target_second;
    let pass = err_first <= 0.10 && err_second <= 0.10;
    verdict(
        3,
        pass,
        &format!(
            "e*b1 = {first:.4e} vs 4e-7 ({:.1}% off); e*b2 = {second:.4e} vs 2.8e-6 ({:.1}% off); tolerance 10%",
            100.0 * err_first,
            100.0 * err_second
        )
    )
}

fn ac4_one_plus_poisson_moments() -> bool {
    let start = Instant::now();
    let mut rng = RngStream::new(0xAC4);
    let samples = 1_000_000u64;
    let (mut ones, mut sum) = (0u64, 0u64);
    for _ in 0..samples {
        let k = sample_k(KDistribution::OnePlusPoisson, &mut rng);
        ones += u64::from(k == 1);
        sum += k;
    }
    let nf = samples as f64;
    let p1 = (-1.0f64).exp();
    let p_hat = ones as f64 / nf;
    let sigma_p = (p1 * (1.0 - p1) / nf).sqrt();
    let mean = sum as f64 / nf;
    let sigma_mean = 1.0 / nf.sqrt();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = (p_hat - p1).abs() <= 3.0 * sigma_p
        && (mean - 2.0).abs() <= 3.0 * sigma_mean
        && elapsed < 10.0;
    verdict(
        4,
        pass,
        &format!(
            "Pr[k=1] = {p_hat:.5} ({:+.2} sigma), mean = {mean:.5} ({:+.2} sigma), {elapsed:.1}s",
            (p_hat - p1) / sigma_p,
            (mean - 2.0) / sigma_mean
        ),
    )
}

fn ac5_one_step_drift_matches_enumeration() -> bool {
    let start = Instant::now();
    let tree = GpTree::parse(Problem::Majority, 1, "!x1").unwrap();
    let potential = Potential::VPrime { var: 1 };
    let exact = exact_drift(&tree, false, potential).unwrap().mean_delta;
    let config = RunConfig {
        problem: Problem::Majority,
        bloat_control: false,
        k_dist: KDistribution::ConstantOne,
        n: 1,
        init: InitSpec::Explicit {
            leaves: "!x1".into(),
        },
        seed: 0xAC5,
        max_iterations: 1_000,
        trace: TraceMode::Off,
        stop_at_any_optimum: false,
        order_tracking: OrderTracking::Indexed,
    };
    let predicate = Predicate::leaves_equal(vec![Literal::neg(1)]);
    let mc = estimate_drift(&config, potential, &predicate, 100_000, 10_000_000).unwrap();
    let z = (mc.mean_delta - exact) / mc.std_error;
    let elapsed = start.elapsed().as_secs_f64();
    let pass = (exact + 1.0 / 6.0).abs() < 1e-12 && z.abs() <= 3.0 && elapsed < 30.0;
    verdict(
        5,
        pass,
        &format!(
            "exact {exact:.6}, Monte Carlo {:.6} +- {:.6} over {} samples ({z:+.2} sigma), {elapsed:.1}s",
            mc.mean_delta, mc.std_error, mc.sample_count
        )
    )
}

fn grid_config(
    problem: Problem,
    bloat_control: bool,
    k_dist: KDistribution,
    n_values: Vec<u32>,
    t_init_values: Vec<usize>,
    seed: u64,
) -> SweepConfig {
    SweepConfig {
        problem,
        bloat_control,
        k_dist,
        init: SweepInit::AllNegOfVar { var: 1 },
        n_values,
        t_init_values,
        repetitions: 50,
        master_seed: seed,
        max_iterations: None,
        stop_at_any_optimum: false,
        order_tracking: OrderTracking::Indexed,
        threads: None,
        record_wall_time: false,
    }
}

fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

/// max/min of `value(n, t, mean)` over the cells; `None` if any cell had no success.
fn ratio_spread(
    out: &SweepOutput,
    value: impl Fn(f64, f64, f64) -> f64,
) -> Option<(f64, f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &out.summaries {
        let r = value(f64::from(s.n), s.t_init as f64, s.mean_iterations?);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Some((lo, hi, hi / lo))
}

fn exhausted(out: &SweepOutput) -> usize {
    out.raw.iter().filter(|r| r.exhausted).count()
}

fn ac6_bloat_control_scaling() -> bool {
    let mut lines = Vec::new();
    let mut pass = true;
    for problem in [Problem::Majority, Problem::Order] {
        let cfg = grid_config(
            problem,
            true,
            KDistribution::OnePlusPoisson,
            vec![8, 16, 32, 64, 128],
            powers_of_two(6, 13),
            0xAC6,
        );
        let out = sweep(&cfg).unwrap();
        let spread = ratio_spread(&out, |n, t, m| m / (t + n * n.ln()));
        match spread {
            Some((lo, hi, s)) => {
                pass &= s <= 3.0 && exhausted(&out) == 0;
                lines.push(format!(
                    "{problem:?}: ratio in [{lo:.3}, {hi:.3}], spread {s:.2}, {} exhausted",
                    exhausted(&out)
                ));
            }
            None => {
                pass = false;
                lines.push(format!("{problem:?}: a cell had no successful run"));
            }
        }
    }
    verdict(
        6,
        pass,
        &format!("mean/(T_init + n ln n) spread <= 3: {}", lines.join("; ")),
    )
}

/// Ordinary least-squares slope of ln y on ln x.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn ac7_no_bloat_control_trend_in_t_init() -> bool {
    let mut lines = Vec::new();
    let mut pass = true;
    for k_dist in [KDistribution::ConstantOne, KDistribution::OnePlusPoisson] {
        let cfg = grid_config(
            Problem::Majority,
            false,
            k_dist,
            vec![16],
            powers_of_two(8, 14),
            0xAC7,
        );
        let out = sweep(&cfg).unwrap();
        let points: Option<Vec<(f64, f64)>> = out
            .summaries
            .iter()
            .map(|s| s.mean_iterations.map(|m| (s.t_init as f64, m)))
            .collect();
        match points {
            Some(points) => {
                let slope = log_log_slope(&points);
                pass &= (0.9..=1.3).contains(&slope) && exhausted(&out) == 0;
                lines.push(format!(
                    "{k_dist}: slope {slope:.3}, {} exhausted",
                    exhausted(&out)
                ));
            }
            None => {
                pass = false;
                lines.push(format!("{k_dist}: a cell had no successful run"));
            }
        }
    }
    verdict(
        7,
        pass,
        &format!("log-log slope in [0.9, 1.3]: {}", lines.join("; ")),
    )
}

fn ac8_single_variable_lower_bound_trend() -> bool {
    let mut lines = Vec::new();
    let mut pass = true;
    for k_dist in [KDistribution::ConstantOne, KDistribution::OnePlusPoisson] {
        let cfg = grid_config(
            Problem::Majority,
            false,
            k_dist,
            vec![1],
            powers_of_two(8, 14),
            0xAC8,
        );
        let out = sweep(&cfg).unwrap();
        match ratio_spread(&out, |_, t, m| m / (t * t.ln())) {
            Some((lo, hi, s)) => {
                // "Bounded away from 0": the smallest ratio is not below a
                // tenth of the largest, and the lower end is not shrinking
                // along the grid faster than the spread allows.
                pass &= s <= 4.0 && lo >= 0.1 * hi && exhausted(&out) == 0;
                lines.push(format!(
                    "{k_dist}: ratio in [{lo:.3}, {hi:.3}], spread {s:.2}, {} exhausted",
                    exhausted(&out)
                ));
            }
            None => {
                pass = false;
                lines.push(format!("{k_dist}: a cell had no successful run"));
            }
        }
    }
    verdict(
        8,
        pass,
        &format!("mean/(T_init ln T_init) spread <= 4: {}", lines.join("; ")),
    )
}

fn ac9_bloat_containment() -> bool {
    let mut raw = Vec::new();
    for n in [8u32, 16, 32] {
        let nf = f64::from(n);
        let floor = nf * nf.ln().powi(2);
        let ts: Vec<usize> = powers_of_two(6, 12)
            .into_iter()
            .filter(|&t| t as f64 >= floor)
            .collect();
        let cfg = grid_config(
            Problem::Majority,
            false,
            KDistribution::OnePlusPoisson,
            vec![n],
            ts,
            0xAC9,
        );
        raw.extend(sweep(&cfg).unwrap().raw);
    }
    let finished: Vec<_> = raw.iter().filter(|r| !r.exhausted).cloned().collect();
    let frac = fraction_within(&raw, 4.0);
    let worst = raw
        .iter()
        .map(|r| r.max_size as f64 / r.t_init as f64)
        .fold(0.0, f64::max);
    let pass = frac >= 0.95 && finished.len() == raw.len();
    verdict(
        9,
        pass,
        &format!(
            "{} runs, {:.1}% with T_max <= 4 T_init, worst T_max/T_init = {worst:.2}",
            raw.len(),
            100.0 * frac
        ),
    )
}

fn ac10_drift_lab_fixtures() -> bool {
    let start = Instant::now();
    let reports = run_checks(None, None, CheckOptions::default()).unwrap();
    let violated: Vec<String> = reports
        .iter()
        .filter(|r| r.is_violated())
        .map(|r| format!("{} {} {}", r.theorem, r.fixture, r.quantity))
        .collect();
    let has =
        |theorem: &str, fixture: &str, pred: &dyn Fn(&gp_lab::drift_lab::BoundReport) -> bool| {
            reports
                .iter()
                .any(|r| r.theorem == theorem && r.fixture == fixture && pred(r))
        };
    let tight_walk = has("2", "biased-walk", &|r| r.direction == Direction::Equal);
    let halving = has("4", "halving", &|r| {
        r.quantity.starts_with("E[T]") && (r.bound - 15.863).abs() < 1e-3 && r.estimate <= r.bound
    });
    let t6_rows = reports
        .iter()
        .filter(|r| r.theorem == "6" && r.direction == Direction::Lower)
        .count();
    let t5_rows = ["symmetric-walk", "drifted-walk"]
        .iter()
        .all(|f| has("5", f, &|r| r.quantity.starts_with("spread")));
    let l8_rows = has("L8", "two-state", &|r| r.quantity.starts_with("E[N_A(r)]"))
        && has("L8", "two-state", &|r| r.quantity.starts_with("Pr[N_A(r)"));
    let elapsed = start.elapsed().as_secs_f64();
    let pass = violated.is_empty()
        && tight_walk
        && halving
        && t6_rows >= 3
        && t5_rows
        && l8_rows
        && elapsed < 120.0;
    println!("{}", gp_lab::drift_lab::format_reports(&reports));
    verdict(
        10,
        pass,
        &format!(
            "{} reports, violated {violated:?}, {elapsed:.1}s",
            reports.len()
        ),
    )
}

fn csv_bytes(out: &SweepOutput) -> (Vec<u8>, Vec<u8>) {
    let mut raw = Vec::new();
    let mut summary = Vec::new();
    write_raw_csv(&out.raw, &mut raw).unwrap();
    write_summary_csv(&out.summaries, &mut summary).unwrap();
    (raw, summary)
}

fn ac11_determinism_across_thread_counts() -> bool {
    let mut pass = true;
    let mut lines = Vec::new();
    for problem in [Problem::Majority, Problem::Order] {
        let mut cfg = grid_config(
            problem,
            problem == Problem::Order,
            KDistribution::OnePlusPoisson,
            vec![4, 8],
            vec![16, 64],
            0xAC11,
        );
        cfg.repetitions = 8;
        let mut outputs = Vec::new();
        for threads in [1usize, 2, 4, 1] {
            cfg.threads = Some(threads);
            outputs.push(csv_bytes(&sweep(&cfg).unwrap()));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        lines.push(format!(
            "{problem:?}: {}",
            if same { "identical" } else { "differs" }
        ));
    }
    let config = RunConfig {
        problem: Problem::Order,
        bloat_control: true,
        k_dist: KDistribution::OnePlusPoisson,
        n: 10,
        init: InitSpec::RandomLiterals { count: 50 },
        seed: 0xAC11,
        max_iterations: 100_000,
        trace: TraceMode::Full,
        stop_at_any_optimum: false,
        order_tracking: OrderTracking::Indexed,
    };
    let trace = || {
        let r = gp_lab::run(&config).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        (r.summary_json(), buf)
    };
    let single_same = trace() == trace();
    pass &= single_same;
    lines.push(format!("single run trace identical: {single_same}"));
    verdict(11, pass, &lines.join("; "))
}

type Criterion = (&'static str, fn() -> bool);

const CRITERIA: [Criterion; 11] = [
    ("ac1", ac1_incremental_fitness_matches_recomputation),
    ("ac2", ac2_leaf_partition_properties),
    ("ac3", ac3_series_bounds_at_m_ten),
    ("ac4", ac4_one_plus_poisson_moments),
    ("ac5", ac5_one_step_drift_matches_enumeration),
    ("ac6", ac6_bloat_control_scaling),
    ("ac7", ac7_no_bloat_control_trend_in_t_init),
    ("ac8", ac8_single_variable_lower_bound_trend),
    ("ac9", ac9_bloat_containment),
    ("ac10", ac10_drift_lab_fixtures),
    ("ac11", ac11_determinism_across_thread_counts),
];

fn main() -> std::process::ExitCode {
    // Positional arguments select criteria; cargo's harness flags are ignored.
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for (id, criterion) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| f == id) {
            continue;
        }
        if !criterion() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        std::process::ExitCode::FAILURE
    }
}
