//! Shipped fixtures and the per-theorem checks run by `drift-check`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::{simulate_hitting_time, ChainKind, ChainSpec, HittingStats, TwoStateChain};
use super::{
    additive_drift_bound, mult_drift_lower_bound_bounded_step, multiplicative_drift_bound,
    variable_drift_bound, BoundReport, Direction, Z95,
};
use crate::error::{Error, Result};
use crate::mutation::{derive_seed, RngStream};

/// Drift results with a runnable check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Additive drift upper bound.
    T2,
    /// Variable drift upper bound.
    T3,
    /// Multiplicative drift upper bound and tail.
    T4,
    /// Weak additive drift lower bounds.
    T5,
    /// Multiplicative drift lower bound with bounded steps.
    T6,
    /// Two-state occupation bound.
    L8,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::T2,
        TheoremId::T3,
        TheoremId::T4,
        TheoremId::T5,
        TheoremId::T6,
        TheoremId::L8,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TheoremId::T2 => "2",
            TheoremId::T3 => "3",
            TheoremId::T4 => "4",
            TheoremId::T5 => "5",
            TheoremId::T6 => "6",
            TheoremId::L8 => "L8",
        }
    }

    fn code(self) -> u64 {
        TheoremId::ALL.iter().position(|&t| t == self).unwrap() as u64
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::config(
                    "theorem",
                    format!("expected one of 2, 3, 4, 5, 6, L8, got `{s}`"),
                )
            })
    }
}

/// Fixture names per theorem, in run order.
pub fn fixture_names(theorem: TheoremId) -> &'static [&'static str] {
    match theorem {
        TheoremId::T2 => &["biased-walk"],
        TheoremId::T3 => &["variable-descent"],
        TheoremId::T4 => &["halving", "thinning"],
        TheoremId::T5 => &["symmetric-walk", "drifted-walk"],
        TheoremId::T6 => &["multiplicative-walk"],
        TheoremId::L8 => &["two-state", "renewal", "zero-rounds"],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Trials per simulated quantity.
    pub trials: u64,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            trials: 10_000,
            seed: 20_240_601,
        }
    }
}

impl CheckOptions {
    fn derive(&self, parts: &[u64]) -> CheckOptions {
        CheckOptions {
            trials: self.trials,
            seed: derive_seed(self.seed, parts),
        }
    }
}

const STEP_CAP: u64 = 50_000_000;

fn condition(chain: &str, reason: String) -> Error {
    Error::ChainCondition {
        chain: chain.to_string(),
        reason,
    }
}

fn ci(h: &HittingStats) -> (f64, f64) {
    (h.ci_low, h.ci_high)
}

/// Additive drift: audits drift ≥ c on states 1..=4·s0 + 100, then compares
/// the simulated E[T] with s0/c.
pub fn check_additive(chain: &ChainSpec, c: f64, opts: CheckOptions) -> Result<Vec<BoundReport>> {
    chain.validate()?;
    for x in 1..=4 * chain.s0 + 100 {
        let d = chain.drift(x);
        if d < c - 1e-12 {
            return Err(condition(
                &chain.name,
                format!("drift {d} < c = {c} at {x}"),
            ));
        }
    }
    let bound = additive_drift_bound(chain.s0 as f64, c)?;
    let h = simulate_hitting_time(chain, 0, opts.trials, opts.seed, STEP_CAP)?;
    let mut out = vec![BoundReport::new(
        "2",
        &chain.name,
        "E[T] <= s0/c",
        bound,
        h.mean,
        ci(&h),
        opts.trials,
        Direction::Upper,
    )];
    // Drift exactly c everywhere makes the bound an equality.
    if (1..=4 * chain.s0 + 100).all(|x| (chain.drift(x) - c).abs() < 1e-12) {
        out.push(BoundReport::new(
            "2",
            &chain.name,
            "E[T] = s0/c (tight)",
            bound,
            h.mean,
            ci(&h),
            opts.trials,
            Direction::Equal,
        ));
    }
    Ok(out)
}

/// Variable drift with h(u) = min(cap, δu) on a [`ChainKind::VariableDescent`] chain.
pub fn check_variable(chain: &ChainSpec, opts: CheckOptions) -> Result<Vec<BoundReport>> {
    chain.validate()?;
    let ChainKind::VariableDescent { delta, cap } = chain.kind else {
        return Err(condition(
            &chain.name,
            "expected a variable-descent chain".into(),
        ));
    };
    let h = move |u: f64| (delta * u).min(cap);
    for x in 1..=chain.s0 {
        let d = chain.drift(x);
        if d < h(x as f64) - 1e-12 {
            return Err(condition(&chain.name, format!("drift {d} < h({x})")));
        }
    }
    let bound = variable_drift_bound(chain.s0 as f64, &h)?;
    let sim = simulate_hitting_time(chain, 0, opts.trials, opts.seed, STEP_CAP)?;
    Ok(vec![BoundReport::new(
        "3",
        &chain.name,
        "E[T] <= 1/h(1) + int 1/h",
        bound,
        sim.mean,
        ci(&sim),
        opts.trials,
        Direction::Upper,
    )])
}

/// Multiplicative drift δ: audits drift ≥ δx on 1..=s0, compares E[T] with
/// (1 + ln(s0/s_min))/δ and the tail at k = 1 with e^{−1}. The chain is
/// stopped once X ≤ `target`.
pub fn check_multiplicative(
    chain: &ChainSpec,
    delta: f64,
    target: i64,
    opts: CheckOptions,
) -> Result<Vec<BoundReport>> {
    chain.validate()?;
    for x in 1..=chain.s0 {
        let d = chain.drift(x);
        if d < delta * x as f64 - 1e-12 {
            return Err(condition(
                &chain.name,
                format!("drift {d} < delta*x at {x}"),
            ));
        }
    }
    let b = multiplicative_drift_bound(chain.s0 as f64, chain.s_min, delta)?;
    let sim = simulate_hitting_time(chain, target, opts.trials, opts.seed, STEP_CAP)?;
    let steps = b.tail_steps(1.0);
    let (p, se) = sim.tail(steps as u64 + 1);
    Ok(vec![
        BoundReport::new(
            "4",
            &chain.name,
            "E[T] <= (1+ln(s0/s_min))/delta",
            b.expectation,
            sim.mean,
            ci(&sim),
            opts.trials,
            Direction::Upper,
        ),
        BoundReport::new(
            "4",
            &chain.name,
            format!("Pr[T > {steps}] <= e^-1"),
            b.tail_probability(1.0),
            p,
            (p - Z95 * se, p + Z95 * se),
            opts.trials,
            Direction::Upper,
        ),
    ])
}

/// Multiplicative lower bound with steps bounded by κ on a
/// [`ChainKind::MultiplicativeWalk`] run to X ≤ s_min.
pub fn check_mult_lower(
    chain: &ChainSpec,
    delta: f64,
    kappa: u32,
    opts: CheckOptions,
) -> Result<Vec<BoundReport>> {
    chain.validate()?;
    let s_min = chain.s_min;
    let reach = chain.s0.max((1.0 / delta).ceil() as i64) + i64::from(kappa);
    for x in (s_min.floor() as i64 + 1)..=reach {
        let moves = chain
            .moves(x)
            .ok_or_else(|| condition(&chain.name, "needs explicit moves".into()))?;
        if let Some(&(d, _)) = moves.iter().find(|&&(d, _)| d.abs() > i64::from(kappa)) {
            return Err(condition(
                &chain.name,
                format!("step {d} at {x} exceeds kappa"),
            ));
        }
        let drift = chain.drift(x);
        if drift > delta * x as f64 + 1e-12 {
            return Err(condition(
                &chain.name,
                format!("drift {drift} > delta*x at {x}"),
            ));
        }
    }
    let bound = mult_drift_lower_bound_bounded_step(chain.s0 as f64, s_min, kappa, delta)?;
    let sim = simulate_hitting_time(
        chain,
        s_min.floor() as i64,
        opts.trials,
        opts.seed,
        STEP_CAP,
    )?;
    Ok(vec![BoundReport::new(
        "6",
        &chain.name,
        format!("E[T] >= bound (delta={delta})"),
        bound,
        sim.mean,
        ci(&sim),
        opts.trials,
        Direction::Lower,
    )])
}

/// Lazy ±1 walks for the weak-drift lower bounds: move probability 2/3,
/// drift C/N towards the target, reflecting ceiling at 2N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakDriftFamily {
    pub name: String,
    /// Drift constant C; the walk's drift towards the target is exactly C/N.
    pub c: f64,
    /// Rate δ used by the step-tail and up-probability conditions.
    pub delta: f64,
    /// Start s0 minus target x.
    pub gap: i64,
}

impl WeakDriftFamily {
    pub fn chain(&self, n: i64) -> ChainSpec {
        let tilt = self.c / (2.0 * n as f64);
        ChainSpec {
            name: format!("{}(N={n})", self.name),
            s0: self.gap,
            s_min: 1.0,
            kind: ChainKind::LazyWalk {
                p_down: 1.0 / 3.0 + tilt,
                p_up: 1.0 / 3.0 - tilt,
                ceiling: Some(2 * n),
            },
            step_bound: Some(1),
        }
    }

    fn audit(&self, chain: &ChainSpec, n: i64) -> Result<()> {
        for x in 0..=n {
            let moves = chain.moves(x).expect("lazy walk has explicit moves");
            let drift = chain.drift(x);
            if drift > self.c / n as f64 + 1e-12 {
                return Err(condition(
                    &chain.name,
                    format!("drift {drift} > C/N at {x}"),
                ));
            }
            for k in 1..=2 {
                let tail: f64 = moves
                    .iter()
                    .filter(|&&(d, _)| d.abs() >= k)
                    .map(|&(_, p)| p)
                    .sum();
                if tail > (1.0 + self.delta).powi(-(k as i32)) + 1e-12 {
                    return Err(condition(&chain.name, format!("step tail {tail} at k={k}")));
                }
            }
            let up: f64 = moves.iter().filter(|&&(d, _)| d > 0).map(|&(_, p)| p).sum();
            // At x = 0 the process has already stopped.
            if x > 0 && up < self.delta - 1e-12 {
                return Err(condition(
                    &chain.name,
                    format!("up probability {up} < delta at {x}"),
                ));
            }
        }
        Ok(())
    }
}

/// Scaling checks for the weak-drift lower bounds across `n_values`:
/// E[T]/((s0 − x)N) must vary by less than a factor 2 and N·Pr[T ≥ N²/4]
/// by at most a factor 4, with every entry positive.
pub fn check_weak_drift_lower(
    family: &WeakDriftFamily,
    n_values: &[i64],
    opts: CheckOptions,
) -> Result<Vec<BoundReport>> {
    if n_values.len() < 2 {
        return Err(Error::config("n_values", "need at least two values of N"));
    }
    let mut out = Vec::new();
    let mut ratios = Vec::new();
    let mut tails = Vec::new();
    for (i, &n) in n_values.iter().enumerate() {
        let chain = family.chain(n);
        chain.validate()?;
        family.audit(&chain, n)?;
        let sim = simulate_hitting_time(
            &chain,
            0,
            opts.trials,
            derive_seed(opts.seed, &[i as u64]),
            STEP_CAP,
        )?;
        let scale = (family.gap * n) as f64;
        let r = (sim.mean / scale, sim.ci_low / scale, sim.ci_high / scale);
        out.push(BoundReport::new(
            "5",
            &family.name,
            format!("E[T]/((s0-x)N) > 0, N={n}"),
            f64::MIN_POSITIVE,
            r.0,
            (r.1, r.2),
            opts.trials,
            Direction::Lower,
        ));
        let cut = ((n * n) as f64 / 4.0).ceil() as u64;
        let (p, se) = sim.tail(cut);
        let nf = n as f64;
        let t = (nf * p, nf * (p - Z95 * se), nf * (p + Z95 * se));
        out.push(BoundReport::new(
            "5",
            &family.name,
            format!("N*Pr[T>=N^2/4] > 0, N={n}"),
            f64::MIN_POSITIVE,
            t.0,
            (t.1, t.2),
            opts.trials,
            Direction::Lower,
        ));
        ratios.push(r);
        tails.push(t);
    }
    out.push(spread_report(
        &family.name,
        "spread of E[T]/((s0-x)N)",
        2.0,
        &ratios,
        opts.trials,
    ));
    out.push(spread_report(
        &family.name,
        "spread of N*Pr[T>=N^2/4]",
        4.0,
        &tails,
        opts.trials,
    ));
    let c_fit = tails.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let lowest = tails
        .iter()
        .find(|t| t.0 == c_fit)
        .copied()
        .unwrap_or_default();
    out.push(BoundReport::new(
        "5",
        &family.name,
        "fitted c = min N*Pr[T>=N^2/4] > 0",
        f64::MIN_POSITIVE,
        c_fit,
        (lowest.1, lowest.2),
        opts.trials,
        Direction::Lower,
    ));
    Ok(out)
}

/// max/min of point estimates, with the interval from the extreme ends of the per-point intervals.
fn spread_report(
    fixture: &str,
    quantity: &str,
    limit: f64,
    points: &[(f64, f64, f64)],
    trials: u64,
) -> BoundReport {
    let max =
        |f: fn(&(f64, f64, f64)) -> f64| points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let min = |f: fn(&(f64, f64, f64)) -> f64| points.iter().map(f).fold(f64::INFINITY, f64::min);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { f64::INFINITY };
    let est = ratio(max(|p| p.0), min(|p| p.0));
    let lo = ratio(max(|p| p.1), min(|p| p.2)).min(est);
    let hi = ratio(max(|p| p.2), min(|p| p.1.max(0.0))).max(est);
    BoundReport::new(
        "5",
        fixture,
        quantity,
        limit,
        est,
        (lo, hi),
        trials,
        Direction::Upper,
    )
}

/// Monte-Carlo occupation counts N_A(r).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationStats {
    pub mean: f64,
    pub std_error: f64,
    pub samples: Vec<u64>,
}

pub fn simulate_occupation(
    chain: &TwoStateChain,
    r: u64,
    trials: u64,
    seed: u64,
) -> Result<OccupationStats> {
    chain.validate()?;
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let samples: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|i| chain.sample_occupation(r, &mut RngStream::new(derive_seed(seed, &[i]))))
        .collect();
    let k = trials as f64;
    let mean = samples.iter().sum::<u64>() as f64 / k;
    let var = if trials > 1 {
        samples
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (k - 1.0)
    } else {
        0.0
    };
    Ok(OccupationStats {
        mean,
        std_error: (var / k).sqrt(),
        samples,
    })
}

/// Exact E[N_A(r)] by propagating the state distribution round by round.
/// State j ≥ 1 means "in B, back in A after j more rounds".
pub fn occupation_expectation_exact(chain: &TwoStateChain, r: u64) -> Result<f64> {
    chain.validate()?;
    let s = chain.s as usize;
    let long = chain.long_stay_probability();
    let mut a = 1.0f64;
    let mut b = vec![0.0f64; s + 1];
    let mut total = 0.0;
    for _ in 0..r {
        let mut next_b = vec![0.0f64; s + 1];
        let next_a = a * (1.0 - chain.delta) + b[1];
        next_b[..s].copy_from_slice(&b[1..=s]);
        next_b[0] = 0.0;
        // Entering B now; stays of length j return to A j rounds later.
        let enter = a * chain.delta;
        if s == 1 {
            next_b[1] += enter;
        } else {
            next_b[1] += enter * (1.0 - long);
            next_b[s] += enter * long;
        }
        a = next_a;
        b = next_b;
        total += a;
    }
    Ok(total)
}

/// Occupation bounds: E[N_A(r)] ≤ 2r/(bδ) and Pr[N_A(r) > 4r/(bδ)] ≤ e^{−r/(2s)},
/// plus agreement of the simulated mean with the exact value.
pub fn check_occupation(
    name: &str,
    chain: &TwoStateChain,
    r: u64,
    opts: CheckOptions,
) -> Result<Vec<BoundReport>> {
    chain.validate()?;
    let bd = chain.b * chain.delta;
    if !(bd > 0.0) {
        return Err(Error::Domain("occupation bound needs b*delta > 0".into()));
    }
    let sim = simulate_occupation(chain, r, opts.trials, opts.seed)?;
    let exact = occupation_expectation_exact(chain, r)?;
    let mean_bound = 2.0 * r as f64 / bd;
    let cut = 4.0 * r as f64 / bd;
    let hits = sim.samples.iter().filter(|&&x| x as f64 > cut).count();
    let p = hits as f64 / opts.trials as f64;
    let se = (p * (1.0 - p) / opts.trials as f64).sqrt();
    let half = Z95 * sim.std_error;
    Ok(vec![
        BoundReport::new(
            "L8",
            name,
            "E[N_A(r)] <= 2r/(b*delta)",
            mean_bound,
            sim.mean,
            (sim.mean - half, sim.mean + half),
            opts.trials,
            Direction::Upper,
        ),
        BoundReport::new(
            "L8",
            name,
            "Pr[N_A(r) > 4r/(b*delta)] <= e^(-r/(2s))",
            (-(r as f64) / (2.0 * chain.s as f64)).exp(),
            p,
            (p - Z95 * se, p + Z95 * se),
            opts.trials,
            Direction::Upper,
        ),
        BoundReport::new(
            "L8",
            name,
            "exact E[N_A(r)] <= 2r/(b*delta)",
            mean_bound,
            exact,
            (exact, exact),
            0,
            Direction::Upper,
        ),
        BoundReport::new(
            "L8",
            name,
            "simulated E[N_A(r)] = exact (3 sigma)",
            exact,
            sim.mean,
            (
                sim.mean - 3.0 * sim.std_error,
                sim.mean + 3.0 * sim.std_error,
            ),
            opts.trials,
            Direction::Equal,
        ),
    ])
}

fn run_fixture(theorem: TheoremId, fixture: &str, opts: CheckOptions) -> Result<Vec<BoundReport>> {
    let idx = fixture_names(theorem)
        .iter()
        .position(|&f| f == fixture)
        .expect("caller checked the name") as u64;
    let opts = opts.derive(&[theorem.code(), idx]);
    let walk = |name: &str, s0, s_min, kind, step_bound| ChainSpec {
        name: name.to_string(),
        s0,
        s_min,
        kind,
        step_bound,
    };
    match (theorem, fixture) {
        (TheoremId::T2, "biased-walk") => {
            let c = walk(
                fixture,
                20,
                1.0,
                ChainKind::LazyWalk {
                    p_down: 0.6,
                    p_up: 0.4,
                    ceiling: None,
                },
                Some(1),
            );
            check_additive(&c, 0.2, opts)
        }
        (TheoremId::T3, "variable-descent") => {
            let c = walk(
                fixture,
                100,
                1.0,
                ChainKind::VariableDescent {
                    delta: 0.02,
                    cap: 0.5,
                },
                Some(1),
            );
            check_variable(&c, opts)
        }
        (TheoremId::T4, "halving") => {
            let c = walk(fixture, 1024, 1.0, ChainKind::Halving, None);
            check_multiplicative(&c, 0.5, 1, opts)
        }
        (TheoremId::T4, "thinning") => {
            let c = walk(fixture, 1024, 1.0, ChainKind::Thinning { delta: 0.5 }, None);
            check_multiplicative(&c, 0.5, 0, opts)
        }
        (TheoremId::T5, "symmetric-walk" | "drifted-walk") => {
            let family = WeakDriftFamily {
                name: fixture.to_string(),
                c: if fixture == "symmetric-walk" {
                    0.0
                } else {
                    1.0
                },
                delta: 0.25,
                gap: 5,
            };
            check_weak_drift_lower(&family, &[25, 50, 100], opts)
        }
        (TheoremId::T6, "multiplicative-walk") => {
            let mut out = Vec::new();
            for (i, delta) in [0.01, 0.02, 0.05].into_iter().enumerate() {
                let c = walk(
                    fixture,
                    200,
                    8.0,
                    ChainKind::MultiplicativeWalk { delta },
                    Some(1),
                );
                out.extend(check_mult_lower(&c, delta, 1, opts.derive(&[i as u64]))?);
            }
            Ok(out)
        }
        (TheoremId::L8, "two-state") => check_occupation(
            fixture,
            &TwoStateChain {
                delta: 0.5,
                b: 10.0,
                s: 100,
            },
            1000,
            opts,
        ),
        (TheoremId::L8, "renewal") => check_occupation(
            fixture,
            &TwoStateChain {
                delta: 1.0,
                b: 10.0,
                s: 100,
            },
            1000,
            opts,
        ),
        (TheoremId::L8, "zero-rounds") => check_occupation(
            fixture,
            &TwoStateChain {
                delta: 0.5,
                b: 10.0,
                s: 100,
            },
            0,
            opts,
        ),
        _ => unreachable!("fixture table and dispatch agree"),
    }
}

/// Runs the checks of `theorem` (all theorems when `None`), optionally
/// restricted to one fixture.
pub fn run_checks(
    theorem: Option<TheoremId>,
    fixture: Option<&str>,
    opts: CheckOptions,
) -> Result<Vec<BoundReport>> {
    if opts.trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let theorems: Vec<TheoremId> = match theorem {
        Some(t) => vec![t],
        None => TheoremId::ALL.to_vec(),
    };
    if let Some(f) = fixture {
        if !theorems.iter().any(|&t| fixture_names(t).contains(&f)) {
            let known: Vec<&str> = theorems
                .iter()
                .flat_map(|&t| fixture_names(t))
                .copied()
                .collect();
            return Err(Error::config(
                "fixture",
                format!(
                    "unknown fixture `{f}`; expected one of {}",
                    known.join(", ")
                ),
            ));
        }
    }
    let mut out = Vec::new();
    for t in theorems {
        for &name in fixture_names(t) {
            if fixture.is_none_or(|f| f == name) {
                out.extend(run_fixture(t, name, opts)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_ids_parse() {
        assert_eq!("L8".parse::<TheoremId>().unwrap(), TheoremId::L8);
        assert_eq!("l8".parse::<TheoremId>().unwrap(), TheoremId::L8);
        assert_eq!("5".parse::<TheoremId>().unwrap(), TheoremId::T5);
        assert!("7".parse::<TheoremId>().is_err());
    }

    #[test]
    fn unknown_fixture_is_rejected() {
        let err = run_checks(
            Some(TheoremId::T2),
            Some("halving"),
            CheckOptions::default(),
        );
        assert!(matches!(err, Err(Error::Config { ref key, .. }) if key == "fixture"));
    }

    #[test]
    fn zero_rounds_means_zero_occupation() {
        let c = TwoStateChain {
            delta: 0.5,
            b: 10.0,
            s: 100,
        };
        let sim = simulate_occupation(&c, 0, 100, 1).unwrap();
        assert!(sim.samples.iter().all(|&x| x == 0));
        assert_eq!(occupation_expectation_exact(&c, 0).unwrap(), 0.0);
    }

    #[test]
    fn weak_drift_audit_rejects_strong_drift() {
        let family = WeakDriftFamily {
            name: "steep".into(),
            c: 1.0,
            delta: 0.25,
            gap: 5,
        };
        let mut chain = family.chain(50);
        chain.kind = ChainKind::LazyWalk {
            p_down: 0.6,
            p_up: 0.3,
            ceiling: Some(100),
        };
        assert!(matches!(
            family.audit(&chain, 50),
            Err(Error::ChainCondition { .. })
        ));
    }
}
