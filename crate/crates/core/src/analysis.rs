//! Leaf classification, potentials, variable balances, drift estimation and
//! the series bounds used in the runtime analysis with bloat control.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{run_observed, select, Fitness, Observer, RunConfig};
use crate::fitness::Problem;
use crate::literal::Literal;
use crate::mutation::{derive_seed, KDistribution, MutationOp, RngStream, Side};
use crate::tree::GpTree;

/// Effect of deleting a single leaf on the fitness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafLabel {
    /// Deleting it leaves the fitness unchanged.
    Redundant,
    /// Deleting it lowers the fitness.
    CriticalPos,
    /// Deleting it raises the fitness.
    CriticalNeg,
}

impl LeafLabel {
    pub fn short(self) -> &'static str {
        match self {
            LeafLabel::Redundant => "r",
            LeafLabel::CriticalPos => "c+",
            LeafLabel::CriticalNeg => "c-",
        }
    }

    fn from_change(before: u32, after: u32) -> Self {
        match after.cmp(&before) {
            std::cmp::Ordering::Equal => LeafLabel::Redundant,
            std::cmp::Ordering::Less => LeafLabel::CriticalPos,
            std::cmp::Ordering::Greater => LeafLabel::CriticalNeg,
        }
    }
}

impl fmt::Display for LeafLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafClassification {
    pub redundant: usize,
    pub critical_pos: usize,
    pub critical_neg: usize,
    /// One label per leaf, in order.
    pub labels: Vec<LeafLabel>,
}

impl LeafClassification {
    fn from_labels(labels: Vec<LeafLabel>) -> Self {
        let count = |l| labels.iter().filter(|&&x| x == l).count();
        LeafClassification {
            redundant: count(LeafLabel::Redundant),
            critical_pos: count(LeafLabel::CriticalPos),
            critical_neg: count(LeafLabel::CriticalNeg),
            labels,
        }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }
}

impl fmt::Display for LeafClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r={} c+={} c-={}",
            self.redundant, self.critical_pos, self.critical_neg
        )
    }
}

/// Classifies every leaf by deleting it and re-evaluating the fitness from
/// scratch. O(s²); the reference the fast path is tested against.
///
/// A single-leaf tree cannot lose its leaf (the delete is a no-op), so its
/// only leaf is redundant.
pub fn classify_leaves_naive(problem: Problem, n: u32, leaves: &[Literal]) -> LeafClassification {
    let base = problem.evaluate(leaves, n);
    if leaves.len() <= 1 {
        return LeafClassification::from_labels(vec![LeafLabel::Redundant; leaves.len()]);
    }
    let mut rest = Vec::with_capacity(leaves.len() - 1);
    let labels = (0..leaves.len())
        .map(|i| {
            rest.clear();
            rest.extend_from_slice(&leaves[..i]);
            rest.extend_from_slice(&leaves[i + 1..]);
            LeafLabel::from_change(base, problem.evaluate(&rest, n))
        })
        .collect();
    LeafClassification::from_labels(labels)
}

/// Classifies every leaf in O(s + n) by reasoning on counts: deleting a leaf
/// only changes whether its own variable is expressed.
pub fn classify_leaves(tree: &GpTree) -> LeafClassification {
    if tree.size() == 1 {
        return LeafClassification::from_labels(vec![LeafLabel::Redundant]);
    }
    let labels = match tree.problem() {
        Problem::Majority => tree
            .iter()
            .map(|lit| {
                let (p, q) = (tree.pos_count(lit.var()), tree.neg_count(lit.var()));
                let before = p >= 1 && p >= q;
                let after = if lit.is_positive() {
                    p >= 2 && p > q
                } else {
                    p >= 1 && p + 1 >= q
                };
                LeafLabel::from_change(u32::from(before), u32::from(after))
            })
            .collect(),
        Problem::Order => {
            let leaves = tree.leaves();
            let n = tree.n() as usize;
            // First and second occurrence of each variable.
            let mut first: Vec<Option<usize>> = vec![None; n];
            let mut second: Vec<Option<usize>> = vec![None; n];
            for (i, lit) in leaves.iter().enumerate() {
                let v = lit.var() as usize - 1;
                if first[v].is_none() {
                    first[v] = Some(i);
                } else if second[v].is_none() {
                    second[v] = Some(i);
                }
            }
            leaves
                .iter()
                .enumerate()
                .map(|(i, lit)| {
                    let v = lit.var() as usize - 1;
                    if first[v] != Some(i) {
                        return LeafLabel::Redundant;
                    }
                    let before = lit.is_positive();
                    let after = second[v].is_some_and(|j| leaves[j].is_positive());
                    LeafLabel::from_change(u32::from(before), u32::from(after))
                })
                .collect()
        }
    };
    LeafClassification::from_labels(labels)
}

/// g(t) = m·(n − v(t)) + s(t) − v(t).
pub fn potential_g(tree: &GpTree, m: u64) -> u64 {
    let n = u64::from(tree.n());
    let v = u64::from(tree.expressed());
    m * (n - v) + tree.size() as u64 - v
}

/// Balance of variable `var`: −1 without any of its literals, −z when there
/// are z > 0 more negated than positive literals, and the surplus z ≥ 0 of
/// positive literals otherwise.
///
/// # Panics
/// If `var` is not in `1..=n`.
pub fn variable_balance(tree: &GpTree, var: u32) -> i64 {
    assert!(var >= 1 && var <= tree.n(), "variable x{var} out of range");
    let p = i64::from(tree.pos_count(var));
    let q = i64::from(tree.neg_count(var));
    if p == 0 && q == 0 {
        -1
    } else {
        p - q
    }
}

/// V′(t, i) = max(−V(t, i), 0).
pub fn v_prime(tree: &GpTree, var: u32) -> i64 {
    (-variable_balance(tree, var)).max(0)
}

/// Magnitudes from the drift bound with bloat control.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Bounds {
    /// (1/e)·Σ_{i>m} (i − m)/(i − 1)!, the constant loss from deletions.
    pub b1: f64,
    /// (1/(6m) + 2/3)·(1/e)·Σ_{i>m} i(i − m)/(i − 1)!, the coefficient of g(t)/n.
    pub b2_coefficient: f64,
}

impl Lemma3Bounds {
    /// b1 without the 1/e factor; this is the quantity the m = 10 constant 4·10⁻⁷ rounds.
    pub fn b1_times_e(&self) -> f64 {
        self.b1 * std::f64::consts::E
    }

    /// b2_coefficient without the 1/e factor, compared with (7/10)·4·10⁻⁶ at m = 10.
    pub fn b2_coefficient_times_e(&self) -> f64 {
        self.b2_coefficient * std::f64::consts::E
    }
}

/// Evaluates both series for weight `m`.
///
/// The finite closed forms (e.g. 2e − me + Σ_{i≤m} (m − i)/(i − 1)! for the
/// first) cancel catastrophically for large m, so the equivalent tails
/// Σ_{i>m} are summed instead; every term is positive.
pub fn lemma3_bounds(m: u64) -> Result<Lemma3Bounds> {
    if m == 0 {
        return Err(Error::Domain("lemma3_bounds requires m >= 1".into()));
    }
    // w = 1/(e·(i − 1)!), the Poisson(1) mass at i − 1.
    let mut w = (-1.0f64).exp();
    for i in 1..=m {
        w /= i as f64;
    }
    let (mut t1, mut t2) = (0.0f64, 0.0f64);
    let mut i = m + 1;
    loop {
        let d = (i - m) as f64;
        let a = d * w;
        let b = i as f64 * d * w;
        t1 += a;
        t2 += b;
        if b < t2 * 1e-20 || w == 0.0 {
            break;
        }
        w /= i as f64;
        i += 1;
    }
    let c = 1.0 / (6.0 * m as f64) + 2.0 / 3.0;
    Ok(Lemma3Bounds {
        b1: t1,
        b2_coefficient: c * t2,
    })
}

/// Potential functions over trees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    G {
        m: u64,
    },
    VPrime {
        var: u32,
    },
    Size,
    /// n − v(t).
    Unexpressed,
}

impl Potential {
    pub fn eval(&self, tree: &GpTree) -> f64 {
        match *self {
            Potential::G { m } => potential_g(tree, m) as f64,
            Potential::VPrime { var } => v_prime(tree, var) as f64,
            Potential::Size => tree.size() as f64,
            Potential::Unexpressed => f64::from(tree.n() - tree.expressed()),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::G { m } => write!(f, "g(m={m})"),
            Potential::VPrime { var } => write!(f, "V'(x{var})"),
            Potential::Size => f.write_str("size"),
            Potential::Unexpressed => f.write_str("n-v"),
        }
    }
}

/// A named condition on the current state.
pub struct Predicate<'a, S: ?Sized> {
    description: String,
    test: Box<dyn Fn(&S) -> bool + 'a>,
}

impl<'a, S: ?Sized> Predicate<'a, S> {
    pub fn new(description: impl Into<String>, test: impl Fn(&S) -> bool + 'a) -> Self {
        Predicate {
            description: description.into(),
            test: Box::new(test),
        }
    }

    pub fn any() -> Self {
        Predicate::new("any state", |_| true)
    }

    pub fn holds(&self, state: &S) -> bool {
        (self.test)(state)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl<'a> Predicate<'a, GpTree> {
    /// Matches trees whose leaf sequence equals `leaves` exactly.
    pub fn leaves_equal(leaves: Vec<Literal>) -> Self {
        let text = crate::literal::format_leaves(&leaves);
        Predicate::new(format!("t = [{text}]"), move |t: &GpTree| {
            t.size() == leaves.len() && t.iter().eq(leaves.iter().copied())
        })
    }
}

/// Mean one-step change of a potential, Δ = after − before.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    pub mean_delta: f64,
    /// Sample standard deviation over √sample_count; 0 for exact values.
    pub std_error: f64,
    pub sample_count: usize,
    pub predicate: String,
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn estimate(&self, predicate: &str) -> DriftEstimate {
        let std_error = if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).sqrt() / (self.count as f64).sqrt()
        } else {
            0.0
        };
        DriftEstimate {
            mean_delta: self.mean,
            std_error,
            sample_count: self.count,
            predicate: predicate.to_string(),
        }
    }
}

/// A Markov process the generic estimator can drive.
pub trait DriftProcess {
    type State;
    fn initial(&mut self, rng: &mut RngStream) -> Self::State;
    /// Next state, or `None` when the trajectory has ended.
    fn step(&mut self, state: &Self::State, rng: &mut RngStream) -> Option<Self::State>;
}

/// Estimates the drift of `potential` at states satisfying `predicate` along
/// trajectories of `process`, restarting whenever a trajectory ends, until
/// `samples` transitions are collected or `max_steps` steps are spent.
pub fn estimate_process_drift<P: DriftProcess>(
    process: &mut P,
    potential: impl Fn(&P::State) -> f64,
    predicate: &Predicate<'_, P::State>,
    samples: usize,
    max_steps: u64,
    seed: u64,
) -> Result<DriftEstimate> {
    if samples == 0 {
        return Err(Error::config("samples", "must be at least 1"));
    }
    let mut rng = RngStream::new(seed);
    let mut moments = Moments::default();
    let mut state = process.initial(&mut rng);
    let mut steps = 0;
    while moments.count < samples && steps < max_steps {
        steps += 1;
        match process.step(&state, &mut rng) {
            Some(next) => {
                if predicate.holds(&state) {
                    moments.push(potential(&next) - potential(&state));
                }
                state = next;
            }
            None => state = process.initial(&mut rng),
        }
    }
    if moments.count < samples {
        return Err(Error::InsufficientSamples {
            collected: moments.count,
            requested: samples,
        });
    }
    Ok(moments.estimate(predicate.description()))
}

struct DriftObserver<'p, 'a> {
    potential: Potential,
    predicate: &'p Predicate<'a, GpTree>,
    moments: Moments,
    samples: usize,
}

impl Observer for DriftObserver<'_, '_> {
    fn wants(&mut self, parent: &GpTree) -> bool {
        self.predicate.holds(parent)
    }

    fn observe(&mut self, before: &GpTree, after: &GpTree) {
        self.moments
            .push(self.potential.eval(after) - self.potential.eval(before));
    }

    fn satisfied(&self) -> bool {
        self.moments.count >= self.samples
    }
}

/// Monte-Carlo drift of `potential` over iterations of the GP whose parent
/// satisfies `predicate`. Runs `config` repeatedly with seeds derived from
/// `config.seed`, up to `max_runs` runs.
pub fn estimate_drift(
    config: &RunConfig,
    potential: Potential,
    predicate: &Predicate<'_, GpTree>,
    samples: usize,
    max_runs: u64,
) -> Result<DriftEstimate> {
    if samples == 0 {
        return Err(Error::config("samples", "must be at least 1"));
    }
    config.validate()?;
    let mut obs = DriftObserver {
        potential,
        predicate,
        moments: Moments::default(),
        samples,
    };
    for run in 0..max_runs {
        if obs.satisfied() {
            break;
        }
        let cfg = RunConfig {
            seed: derive_seed(config.seed, &[run]),
            ..config.clone()
        };
        run_observed(&cfg, &mut obs)?;
    }
    if !obs.satisfied() {
        return Err(Error::InsufficientSamples {
            collected: obs.moments.count,
            requested: samples,
        });
    }
    Ok(obs.moments.estimate(predicate.description()))
}

/// Largest tree accepted by [`exact_drift`].
pub const EXACT_DRIFT_MAX_SIZE: usize = 64;

/// Exact one-step drift for k = 1 from `tree`: enumerates every HVL-Prime
/// edit with its probability and applies selection.
pub fn exact_drift(
    tree: &GpTree,
    bloat_control: bool,
    potential: Potential,
) -> Result<DriftEstimate> {
    let s = tree.size();
    if s > EXACT_DRIFT_MAX_SIZE {
        return Err(Error::Domain(format!(
            "exhaustive drift supports trees of at most {EXACT_DRIFT_MAX_SIZE} leaves, got {s}"
        )));
    }
    let n = tree.n();
    let lits: Vec<Literal> = (0..2 * u64::from(n)).map(Literal::from_code).collect();
    let third = 1.0 / 3.0;
    let sf = s as f64;
    let lf = lits.len() as f64;
    let mut ops: Vec<(f64, MutationOp)> = Vec::new();
    for pos in 0..s {
        for &literal in &lits {
            ops.push((third / sf / lf, MutationOp::Substitute { pos, literal }));
            for side in [Side::Before, Side::After] {
                ops.push((
                    third / lf / sf / 2.0,
                    MutationOp::Insert {
                        anchor: pos,
                        literal,
                        side,
                    },
                ));
            }
        }
        ops.push((third / sf, MutationOp::Delete { pos }));
    }
    let parent = Fitness::of(tree);
    let before = potential.eval(tree);
    let mut mean = 0.0;
    for (p, op) in &ops {
        let child = tree.apply_edit(op)?;
        let after = if select(parent, Fitness::of(&child), bloat_control) {
            potential.eval(&child)
        } else {
            before
        };
        mean += p * (after - before);
    }
    Ok(DriftEstimate {
        mean_delta: mean,
        std_error: 0.0,
        sample_count: ops.len(),
        predicate: format!("t = [{tree}]"),
    })
}

/// Convenience for the k = 1 assumption of [`exact_drift`].
pub fn exact_drift_for(
    config: &RunConfig,
    tree: &GpTree,
    potential: Potential,
) -> Result<DriftEstimate> {
    if config.k_dist != KDistribution::ConstantOne {
        return Err(Error::config(
            "k_dist",
            "exhaustive drift is defined for constant_one only",
        ));
    }
    exact_drift(tree, config.bloat_control, potential)
}
