use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gp_lab::analysis::{classify_leaves, lemma3_bounds};
use gp_lab::drift_lab::{format_reports, run_checks, CheckOptions, TheoremId};
use gp_lab::experiments::{read_summary_csv, sweep, write_outputs, write_plots, SweepConfig};
use gp_lab::{Error, GpTree, Problem, RunConfig, TraceMode};

/// Experiments with the (1+1) GP on ORDER and MAJORITY.
#[derive(Debug, Parser)]
#[command(name = "gp-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one GP and print its summary as JSON.
    Run {
        /// Run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Write the per-iteration trace to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Override the configured seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a parameter sweep and write raw.csv, summary.csv, bloat.csv, fit.json and plots.
    Sweep {
        /// Sweep configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Override the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Count redundant and critical leaves of a tree.
    Classify {
        /// `order` or `majority`.
        #[arg(long)]
        problem: String,
        /// Number of variables.
        #[arg(long)]
        n: u32,
        /// Leaf sequence, e.g. "x1 !x1 x2".
        #[arg(long)]
        tree: String,
        /// Also print the label of every leaf.
        #[arg(long)]
        labels: bool,
    },
    /// Evaluate the negative-drift series for weight m.
    Bounds {
        /// Weight of the fitness term in the potential.
        #[arg(long)]
        m: u64,
    },
    /// Simulate the drift-theorem fixtures and compare with the analytic bounds.
    DriftCheck {
        /// 2, 3, 4, 5, 6, L8 or all.
        #[arg(long, default_value = "all")]
        theorem: String,
        /// Restrict to one fixture of the chosen theorem.
        #[arg(long)]
        fixture: Option<String>,
        /// Trials per simulated quantity.
        #[arg(long, default_value_t = CheckOptions::default().trials)]
        trials: u64,
        /// Master seed for the simulations.
        #[arg(long, default_value_t = CheckOptions::default().seed)]
        seed: u64,
        /// Print the reports as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Render log-log plots from a sweep's summary.csv.
    Plot {
        /// Directory holding summary.csv.
        #[arg(long = "in")]
        input: PathBuf,
        /// Directory for the SVG files.
        #[arg(long)]
        out: PathBuf,
    },
}

enum Outcome {
    Ok,
    Violated,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn execute(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Run {
            config,
            trace,
            seed,
        } => {
            let mut cfg = RunConfig::from_json(&read(&config)?)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if trace.is_some() && cfg.trace == TraceMode::Off {
                cfg.trace = TraceMode::Full;
            }
            let result = gp_lab::run(&cfg)?;
            if let Some(path) = trace {
                result.write_trace_csv(fs::File::create(path)?)?;
            }
            println!("{}", result.summary_json());
        }
        Command::Sweep { config, out, seed } => {
            let mut cfg = SweepConfig::from_json(&read(&config)?)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            let output = sweep(&cfg)?;
            write_outputs(&output, &out)?;
            write_plots(&output.summaries, &out)?;
            let flagged = output.summaries.iter().filter(|s| s.flagged).count();
            println!(
                "{} runs over {} cells written to {} ({flagged} cells with exhausted runs)",
                output.raw.len(),
                output.summaries.len(),
                out.display()
            );
        }
        Command::Classify {
            problem,
            n,
            tree,
            labels,
        } => {
            let problem: Problem = problem.parse()?;
            let tree = GpTree::parse(problem, n, &tree)?;
            let c = classify_leaves(&tree);
            println!("{c}");
            if labels {
                let text: Vec<&str> = c.labels.iter().map(|l| l.short()).collect();
                println!("{}", text.join(" "));
            }
        }
        Command::Bounds { m } => {
            let b = lemma3_bounds(m)?;
            println!("b1 = {:.6e}", b.b1);
            println!("b2_coefficient = {:.6e}", b.b2_coefficient);
            println!("b1_times_e = {:.6e}", b.b1_times_e());
            println!(
                "b2_coefficient_times_e = {:.6e}",
                b.b2_coefficient_times_e()
            );
        }
        Command::DriftCheck {
            theorem,
            fixture,
            trials,
            seed,
            json,
        } => {
            let theorem = if theorem.eq_ignore_ascii_case("all") {
                None
            } else {
                Some(theorem.parse::<TheoremId>()?)
            };
            let reports = run_checks(theorem, fixture.as_deref(), CheckOptions { trials, seed })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                print!("{}", format_reports(&reports));
            }
            if reports.iter().any(|r| r.is_violated()) {
                return Ok(Outcome::Violated);
            }
        }
        Command::Plot { input, out } => {
            let summaries = read_summary_csv(fs::File::open(input.join("summary.csv"))?)?;
            write_plots(&summaries, &out)?;
            println!("plots written to {}", out.display());
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => {
            eprintln!("error: at least one drift bound is violated");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
