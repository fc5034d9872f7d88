//! The (1+1) GP loop: mutate a copy k times, keep it if it is not worse.
//!
//! The offspring is built by editing the parent in place and undoing the
//! edits on rejection, so an iteration costs O(k log s) rather than O(s).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::Problem;
use crate::literal::{parse_leaves, Literal};
use crate::mutation::{sample_k, sample_operation, KDistribution, MutationOp, RngStream};
use crate::tree::{GpTree, OrderTracking};

/// Objective pair compared by selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fitness {
    pub expressed: u32,
    pub size: usize,
}

impl Fitness {
    pub fn of(tree: &GpTree) -> Self {
        Fitness {
            expressed: tree.expressed(),
            size: tree.size(),
        }
    }
}

/// Whether the offspring replaces the parent. Ties are accepted.
pub fn select(parent: Fitness, child: Fitness, bloat_control: bool) -> bool {
    if bloat_control {
        child.expressed > parent.expressed
            || (child.expressed == parent.expressed && child.size <= parent.size)
    } else {
        child.expressed >= parent.expressed
    }
}

/// Initial tree construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// `count` copies of the negated literal of `var`.
    AllNegOfVar { var: u32, count: usize },
    /// `count` literals drawn uniformly from the 2n labels.
    RandomLiterals { count: usize },
    /// A fixed leaf sequence in the tree text format.
    Explicit { leaves: String },
}

impl InitSpec {
    /// Initial size T_init, when known without building the tree.
    pub fn t_init(&self) -> Option<usize> {
        match self {
            InitSpec::AllNegOfVar { count, .. } | InitSpec::RandomLiterals { count } => {
                Some(*count)
            }
            InitSpec::Explicit { leaves } => parse_leaves(leaves).ok().map(|l| l.len()),
        }
    }

    /// Same construction with a different leaf count. Explicit sequences are unchanged.
    pub fn with_count(&self, count: usize) -> Self {
        match self {
            InitSpec::AllNegOfVar { var, .. } => InitSpec::AllNegOfVar { var: *var, count },
            InitSpec::RandomLiterals { .. } => InitSpec::RandomLiterals { count },
            InitSpec::Explicit { .. } => self.clone(),
        }
    }

    fn validate(&self, n: u32) -> Result<()> {
        match self {
            InitSpec::AllNegOfVar { var, count } => {
                if *var == 0 || *var > n {
                    return Err(Error::config("init.var", format!("must lie in 1..={n}")));
                }
                if *count == 0 {
                    return Err(Error::config("init.count", "must be at least 1"));
                }
            }
            InitSpec::RandomLiterals { count } => {
                if *count == 0 {
                    return Err(Error::config("init.count", "must be at least 1"));
                }
            }
            InitSpec::Explicit { leaves } => {
                let parsed = parse_leaves(leaves)
                    .map_err(|e| Error::config("init.leaves", e.to_string()))?;
                if parsed.is_empty() {
                    return Err(Error::config(
                        "init.leaves",
                        "must contain at least one leaf",
                    ));
                }
                if let Some(l) = parsed.iter().find(|l| l.var() > n) {
                    return Err(Error::config(
                        "init.leaves",
                        format!("literal {l} exceeds n = {n}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self, problem: Problem, n: u32, rng: &mut RngStream) -> Result<GpTree> {
        GpTree::new(problem, n, &self.leaves(n, rng)?)
    }

    fn leaves(&self, n: u32, rng: &mut RngStream) -> Result<Vec<Literal>> {
        Ok(match self {
            InitSpec::AllNegOfVar { var, count } => vec![Literal::neg(*var); *count],
            InitSpec::RandomLiterals { count } => (0..*count)
                .map(|_| Literal::from_code(rng.below(2 * u64::from(n))))
                .collect(),
            InitSpec::Explicit { leaves } => parse_leaves(leaves)?,
        })
    }
}

/// Per-iteration recording.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    #[default]
    Off,
    Summary,
    /// Every `every`-th iteration.
    Sampled {
        every: u64,
    },
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    pub bloat_control: bool,
    #[serde(default)]
    pub k_dist: KDistribution,
    pub n: u32,
    pub init: InitSpec,
    pub seed: u64,
    pub max_iterations: u64,
    #[serde(default)]
    pub trace: TraceMode,
    /// With bloat control, stop as soon as all variables are expressed
    /// instead of waiting for the minimal-size optimum.
    #[serde(default)]
    pub stop_at_any_optimum: bool,
    #[serde(default)]
    pub order_tracking: OrderTracking,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("max_iterations", "must be at least 1"));
        }
        if let TraceMode::Sampled { every: 0 } = self.trace {
            return Err(Error::config("trace.sampled.every", "must be at least 1"));
        }
        self.init.validate(self.n)
    }

    /// Parses a JSON document. Unknown keys are rejected; errors name the offending key.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = crate::config::from_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Whether `tree` satisfies the stopping rule.
    pub fn is_done(&self, tree: &GpTree) -> bool {
        let all = tree.expressed() == self.n;
        if self.bloat_control && !self.stop_at_any_optimum {
            all && tree.size() == self.n as usize
        } else {
            all
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub fitness: u32,
    pub size: usize,
    pub k: u64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Generations until the stopping rule held; equals the budget when exhausted.
    pub iterations_to_opt: u64,
    pub exhausted: bool,
    pub t_init: usize,
    /// Largest best-so-far size over the run, T_max.
    pub max_size: usize,
    pub final_size: usize,
    pub final_fitness: u32,
    pub accepted_count: u64,
    #[serde(skip)]
    pub trace: Vec<TraceRecord>,
}

impl RunResult {
    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunResult serializes")
    }

    /// Writes the trace as `iteration,fitness,size,k,accepted` rows.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for rec in &self.trace {
            w.serialize(rec)?;
        }
        if self.trace.is_empty() {
            w.write_record(["iteration", "fitness", "size", "k", "accepted"])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Hook into the loop, used by drift estimation.
pub(crate) trait Observer {
    /// Called with the parent at the start of each iteration; `true` requests
    /// a call to [`Observer::observe`] once the iteration has finished.
    fn wants(&mut self, parent: &GpTree) -> bool;
    /// `before` is the parent the iteration started from, `after` the tree
    /// after selection.
    fn observe(&mut self, before: &GpTree, after: &GpTree);
    /// Ends the run early.
    fn satisfied(&self) -> bool;
}

struct Unobserved;

impl Observer for Unobserved {
    fn wants(&mut self, _: &GpTree) -> bool {
        false
    }
    fn observe(&mut self, _: &GpTree, _: &GpTree) {}
    fn satisfied(&self) -> bool {
        false
    }
}

/// Runs the (1+1) GP to the stopping rule or the iteration budget.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    run_observed(config, &mut Unobserved)
}

pub(crate) fn run_observed(config: &RunConfig, observer: &mut dyn Observer) -> Result<RunResult> {
    config.validate()?;
    let mut rng = RngStream::new(config.seed);
    let leaves = config.init.leaves(config.n, &mut rng)?;
    let mut tree = GpTree::with_tracking(config.problem, config.n, &leaves, config.order_tracking)?;
    let t_init = tree.size();
    let mut parent = Fitness::of(&tree);
    let mut max_size = tree.size();
    let mut accepted_count = 0;
    let mut trace = Vec::new();
    let mut undo: Vec<MutationOp> = Vec::new();
    let mut iteration = 0;

    while !config.is_done(&tree) && iteration < config.max_iterations && !observer.satisfied() {
        iteration += 1;
        let before = observer.wants(&tree).then(|| tree.clone());
        let k = sample_k(config.k_dist, &mut rng);
        undo.clear();
        for _ in 0..k {
            let op = sample_operation(tree.size(), config.n, &mut rng);
            if let Some(inv) = tree.apply(&op)? {
                undo.push(inv);
            }
        }
        let child = Fitness::of(&tree);
        let accepted = select(parent, child, config.bloat_control);
        if accepted {
            parent = child;
            max_size = max_size.max(child.size);
            accepted_count += 1;
        } else {
            for inv in undo.iter().rev() {
                tree.apply(inv)?;
            }
        }
        if let Some(before) = &before {
            observer.observe(before, &tree);
        }
        let record = match config.trace {
            TraceMode::Full => true,
            TraceMode::Sampled { every } => iteration % every == 0,
            TraceMode::Off | TraceMode::Summary => false,
        };
        if record {
            trace.push(TraceRecord {
                iteration,
                fitness: parent.expressed,
                size: parent.size,
                k,
                accepted,
            });
        }
    }

    Ok(RunResult {
        iterations_to_opt: iteration,
        exhausted: !config.is_done(&tree),
        t_init,
        max_size,
        final_size: tree.size(),
        final_fitness: tree.expressed(),
        accepted_count,
        trace,
    })
}
