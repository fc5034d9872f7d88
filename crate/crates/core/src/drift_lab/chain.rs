//! Synthetic chains and the hitting-time simulator.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Z95;
use crate::error::{Error, Result};
use crate::mutation::{derive_seed, RngStream};

/// Step law of an integer-valued chain X_t ≥ 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainKind {
    /// −1 with `p_down`, +1 with `p_up`, otherwise stay. At `ceiling` an up
    /// move becomes a stay.
    LazyWalk {
        p_down: f64,
        p_up: f64,
        ceiling: Option<i64>,
    },
    /// ±1 walk with down probability min(1, (1 + δx)/2), so the drift is
    /// min(1, δx).
    MultiplicativeWalk { delta: f64 },
    /// x → ⌊x/2⌋.
    Halving,
    /// x → Binomial(x, 1 − δ): every unit survives independently.
    Thinning { delta: f64 },
    /// −1 with probability min(cap, δx), otherwise stay.
    VariableDescent { delta: f64, cap: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub name: String,
    pub s0: i64,
    pub s_min: f64,
    pub kind: ChainKind,
    /// Declared bound κ on |X_{t+1} − X_t|, audited during simulation.
    pub step_bound: Option<i64>,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::ChainCondition {
                chain: self.name.clone(),
                reason,
            })
        };
        if self.s0 < 0 {
            return fail(format!("start {} is negative", self.s0));
        }
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        match self.kind {
            ChainKind::LazyWalk {
                p_down,
                p_up,
                ceiling,
            } => {
                if !prob(p_down) || !prob(p_up) || p_down + p_up > 1.0 + 1e-12 {
                    return fail(format!("invalid probabilities {p_down}, {p_up}"));
                }
                if ceiling.is_some_and(|c| c < self.s0) {
                    return fail("ceiling below the start".into());
                }
            }
            ChainKind::MultiplicativeWalk { delta } | ChainKind::Thinning { delta } => {
                if !(delta > 0.0 && delta <= 1.0) {
                    return fail(format!("delta {delta} outside (0, 1]"));
                }
            }
            ChainKind::VariableDescent { delta, cap } => {
                if !(delta > 0.0) || !(cap > 0.0 && cap <= 1.0) {
                    return fail(format!("invalid delta {delta} or cap {cap}"));
                }
            }
            ChainKind::Halving => {}
        }
        Ok(())
    }

    /// Exact one-step law at state `x` as (increment, probability) pairs, for
    /// the walk kinds. `None` for thinning, whose law is binomial.
    pub fn moves(&self, x: i64) -> Option<Vec<(i64, f64)>> {
        let out = match self.kind {
            ChainKind::LazyWalk {
                p_down,
                p_up,
                ceiling,
            } => {
                let up = if ceiling.is_some_and(|c| x >= c) {
                    0.0
                } else {
                    p_up
                };
                vec![(-1, p_down), (1, up), (0, 1.0 - p_down - up)]
            }
            ChainKind::MultiplicativeWalk { delta } => {
                let down = ((1.0 + delta * x as f64) / 2.0).min(1.0);
                vec![(-1, down), (1, 1.0 - down)]
            }
            ChainKind::Halving => vec![(x / 2 - x, 1.0)],
            ChainKind::VariableDescent { delta, cap } => {
                let down = (delta * x as f64).min(cap);
                vec![(-1, down), (0, 1.0 - down)]
            }
            ChainKind::Thinning { .. } => return None,
        };
        Some(out.into_iter().filter(|&(_, p)| p > 0.0).collect())
    }

    /// E[X_t − X_{t+1} | X_t = x].
    pub fn drift(&self, x: i64) -> f64 {
        match self.kind {
            ChainKind::Thinning { delta } => delta * x as f64,
            _ => self
                .moves(x)
                .expect("walk kinds have explicit moves")
                .iter()
                .map(|&(d, p)| -(d as f64) * p)
                .sum(),
        }
    }

    fn step(&self, x: i64, rng: &mut RngStream) -> i64 {
        match self.kind {
            ChainKind::LazyWalk {
                p_down,
                p_up,
                ceiling,
            } => {
                let u = rng.unit();
                if u < p_down {
                    x - 1
                } else if u < p_down + p_up && !ceiling.is_some_and(|c| x >= c) {
                    x + 1
                } else {
                    x
                }
            }
            ChainKind::MultiplicativeWalk { delta } => {
                let down = ((1.0 + delta * x as f64) / 2.0).min(1.0);
                if rng.unit() < down {
                    x - 1
                } else {
                    x + 1
                }
            }
            ChainKind::Halving => x / 2,
            ChainKind::Thinning { delta } => {
                let keep = 1.0 - delta;
                (0..x).filter(|_| rng.unit() < keep).count() as i64
            }
            ChainKind::VariableDescent { delta, cap } => {
                if rng.unit() < (delta * x as f64).min(cap) {
                    x - 1
                } else {
                    x
                }
            }
        }
    }
}

/// Hitting-time sample over independent trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingStats {
    /// Mean over trials that reached the target.
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    /// Trials stopped by the step cap, excluded from the mean.
    pub capped: u64,
    /// Hitting times of completed trials in trial order.
    pub times: Vec<u64>,
}

impl HittingStats {
    /// Fraction of all trials (capped ones count as exceeding) with T ≥ `t`,
    /// with its normal-approximation standard error.
    pub fn tail(&self, t: u64) -> (f64, f64) {
        let hits = self.times.iter().filter(|&&x| x >= t).count() as u64 + self.capped;
        let p = hits as f64 / self.trials as f64;
        (p, (p * (1.0 - p) / self.trials as f64).sqrt())
    }
}

/// Simulates `trials` independent trajectories from `chain.s0` until X ≤
/// `target`, each with its own seed derived from `seed`.
pub fn simulate_hitting_time(
    chain: &ChainSpec,
    target: i64,
    trials: u64,
    seed: u64,
    step_cap: u64,
) -> Result<HittingStats> {
    if trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    chain.validate()?;
    let outcomes: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = RngStream::new(derive_seed(seed, &[trial]));
            let mut x = chain.s0;
            let mut t = 0;
            while x > target {
                if t == step_cap {
                    return Ok(None);
                }
                let next = chain.step(x, &mut rng);
                if let Some(kappa) = chain.step_bound {
                    if (next - x).abs() > kappa {
                        return Err(Error::ChainCondition {
                            chain: chain.name.clone(),
                            reason: format!("step {x} -> {next} exceeds the bound {kappa}"),
                        });
                    }
                }
                x = next;
                t += 1;
            }
            Ok(Some(t))
        })
        .collect::<Result<_>>()?;
    let times: Vec<u64> = outcomes.iter().flatten().copied().collect();
    let capped = trials - times.len() as u64;
    let k = times.len() as f64;
    let (mean, std_error) = if times.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let mean = times.iter().map(|&t| t as f64).sum::<f64>() / k;
        let var = if times.len() > 1 {
            times
                .iter()
                .map(|&t| (t as f64 - mean).powi(2))
                .sum::<f64>()
                / (k - 1.0)
        } else {
            0.0
        };
        (mean, (var / k).sqrt())
    };
    Ok(HittingStats {
        mean,
        std_error,
        ci_low: mean - Z95 * std_error,
        ci_high: mean + Z95 * std_error,
        trials,
        capped,
        times,
    })
}

/// Two-state process A/B for the occupation bound. From A the chain moves to
/// B with probability `delta`. On entering B it stays for exactly `s` rounds
/// with probability b/s and returns after one round otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoStateChain {
    pub delta: f64,
    pub b: f64,
    pub s: u64,
}

impl TwoStateChain {
    pub fn validate(&self) -> Result<()> {
        let ok = self.delta > 0.0
            && self.delta <= 1.0
            && self.s >= 1
            && self.b >= 0.0
            && self.b <= self.s as f64;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "two-state chain needs 0 < delta <= 1 and 0 <= b <= s, got delta = {}, b = {}, s = {}",
                self.delta, self.b, self.s
            )))
        }
    }

    pub fn long_stay_probability(&self) -> f64 {
        self.b / self.s as f64
    }

    /// N_A(r): rounds among 1..=r spent in A, starting in A at round 0.
    pub(crate) fn sample_occupation(&self, r: u64, rng: &mut RngStream) -> u64 {
        let long = self.long_stay_probability();
        let mut t = 0;
        let mut in_a = 0;
        while t < r {
            if rng.unit() < self.delta {
                // Enter B at t + 1, back in A at t + 1 + stay.
                let stay = if rng.unit() < long { self.s } else { 1 };
                t += 1 + stay;
                if t <= r {
                    in_a += 1;
                }
            } else {
                t += 1;
                in_a += 1;
            }
        }
        in_a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(name: &str, s0: i64, p_down: f64, p_up: f64, ceiling: Option<i64>) -> ChainSpec {
        ChainSpec {
            name: name.into(),
            s0,
            s_min: 1.0,
            kind: ChainKind::LazyWalk {
                p_down,
                p_up,
                ceiling,
            },
            step_bound: Some(1),
        }
    }

    #[test]
    fn halving_is_deterministic() {
        let c = ChainSpec {
            name: "halving".into(),
            s0: 1024,
            s_min: 1.0,
            kind: ChainKind::Halving,
            step_bound: None,
        };
        let h = simulate_hitting_time(&c, 1, 50, 7, 1000).unwrap();
        assert_eq!(h.mean, 10.0);
        assert_eq!(h.ci_high - h.ci_low, 0.0);
        assert_eq!(h.capped, 0);
    }

    #[test]
    fn target_at_or_above_start_takes_no_steps() {
        let c = walk("w", 5, 0.5, 0.5, None);
        let h = simulate_hitting_time(&c, 5, 10, 1, 100).unwrap();
        assert!(h.times.iter().all(|&t| t == 0));
        let h = simulate_hitting_time(&c, 9, 10, 1, 100).unwrap();
        assert_eq!(h.mean, 0.0);
    }

    #[test]
    fn step_cap_excludes_trials() {
        let c = walk("stuck", 5, 0.0, 0.0, None);
        let h = simulate_hitting_time(&c, 0, 20, 1, 50).unwrap();
        assert_eq!(h.capped, 20);
        assert!(h.times.is_empty());
        assert_eq!(h.tail(1), (1.0, 0.0));
    }

    #[test]
    fn declared_step_bound_is_enforced() {
        let mut c = ChainSpec {
            name: "halving".into(),
            s0: 64,
            s_min: 1.0,
            kind: ChainKind::Halving,
            step_bound: Some(1),
        };
        assert!(matches!(
            simulate_hitting_time(&c, 1, 3, 1, 100),
            Err(Error::ChainCondition { .. })
        ));
        c.step_bound = Some(32);
        assert!(simulate_hitting_time(&c, 1, 3, 1, 100).is_ok());
    }

    #[test]
    fn same_seed_same_sample() {
        let c = walk("w", 10, 0.5, 0.5, Some(20));
        let a = simulate_hitting_time(&c, 0, 200, 3, 1 << 20).unwrap();
        let b = simulate_hitting_time(&c, 0, 200, 3, 1 << 20).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn drift_from_moves() {
        let c = walk("w", 10, 0.6, 0.4, None);
        assert!((c.drift(3) - 0.2).abs() < 1e-15);
        let c = walk("w", 10, 0.3, 0.3, Some(10));
        assert!((c.drift(10) - 0.3).abs() < 1e-15);
        let m = ChainSpec {
            name: "m".into(),
            s0: 10,
            s_min: 2.0,
            kind: ChainKind::MultiplicativeWalk { delta: 0.05 },
            step_bound: Some(1),
        };
        assert!((m.drift(10) - 0.5).abs() < 1e-15);
        assert!((m.drift(40) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_state_with_certain_exit_and_short_stays() {
        // δ = 1 and b = 0: A, B, A, B, ... so N_A(r) = ⌊r/2⌋.
        let c = TwoStateChain {
            delta: 1.0,
            b: 0.0,
            s: 5,
        };
        let mut rng = RngStream::new(1);
        for r in 0..20 {
            assert_eq!(c.sample_occupation(r, &mut rng), r / 2);
        }
    }
}
