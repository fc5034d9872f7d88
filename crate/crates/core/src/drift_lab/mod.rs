//! Drift-theorem calculators and a harness that checks their conclusions
//! against simulated hitting times of small Markov chains.

mod chain;
mod checks;

use std::cell::Cell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chain::{simulate_hitting_time, ChainKind, ChainSpec, HittingStats, TwoStateChain};
pub use checks::{
    check_additive, check_mult_lower, check_multiplicative, check_occupation, check_variable,
    check_weak_drift_lower, fixture_names, occupation_expectation_exact, run_checks,
    simulate_occupation, CheckOptions, OccupationStats, TheoremId, WeakDriftFamily,
};

/// Normal quantile for two-sided 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Upper bound on the expected time to reach 0 under additive drift c: s0 / c.
pub fn additive_drift_bound(s0: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!(
            "additive drift needs c > 0, got {c}"
        )));
    }
    if !(s0 >= 0.0) {
        return Err(Error::Domain(format!("s0 must be non-negative, got {s0}")));
    }
    Ok(s0 / c)
}

/// Variable drift bound 1/h(1) + ∫₁^{s0} du/h(u) for a positive increasing h.
/// The integral uses adaptive Simpson quadrature to relative tolerance 1e-9.
/// A start at 0 needs no steps.
pub fn variable_drift_bound(s0: f64, h: &dyn Fn(f64) -> f64) -> Result<f64> {
    if s0 == 0.0 {
        return Ok(0.0);
    }
    if !(s0 >= 1.0) || !s0.is_finite() {
        return Err(Error::Domain(format!(
            "variable drift needs s0 = 0 or s0 >= 1, got {s0}"
        )));
    }
    let bad = Cell::new(None);
    let inv = |u: f64| {
        let v = h(u);
        if !(v > 0.0) || !v.is_finite() {
            bad.set(Some((u, v)));
            return 1.0;
        }
        1.0 / v
    };
    let head = inv(1.0);
    let integral = integrate(&inv, 1.0, s0, 1e-9);
    if let Some((u, v)) = bad.get() {
        return Err(Error::Domain(format!("h({u}) = {v} is not positive")));
    }
    Ok(head + integral)
}

/// Adaptive Simpson quadrature of `f` over [a, b] to relative tolerance `rtol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Coarse composite estimate sets the absolute tolerance.
    let pieces = 64;
    let w = (b - a) / pieces as f64;
    let coarse: f64 = (0..pieces)
        .map(|i| {
            let l = a + w * i as f64;
            let r = l + w;
            w / 6.0 * (f(l) + 4.0 * f(0.5 * (l + r)) + f(r))
        })
        .sum();
    let tol = (rtol * coarse.abs()).max(f64::MIN_POSITIVE) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let l = a + w * i as f64;
            let r = if i + 1 == pieces { b } else { l + w };
            let (fl, fr, fm) = (f(l), f(r), f(0.5 * (l + r)));
            let whole = (r - l) / 6.0 * (fl + 4.0 * fm + fr);
            simpson(f, l, r, fl, fr, fm, whole, tol, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1)
}

/// Multiplicative drift bounds for a start at `s0` with minimum positive value `s_min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeBound {
    pub s0: f64,
    pub s_min: f64,
    pub delta: f64,
    /// (1 + ln(s0/s_min)) / δ.
    pub expectation: f64,
}

impl MultiplicativeBound {
    /// Steps after which the chain is still positive with probability at most e^{−k}.
    pub fn tail_steps(&self, k: f64) -> f64 {
        (((self.s0 / self.s_min).ln() + k) / self.delta).ceil()
    }

    pub fn tail_probability(&self, k: f64) -> f64 {
        (-k).exp()
    }
}

pub fn multiplicative_drift_bound(s0: f64, s_min: f64, delta: f64) -> Result<MultiplicativeBound> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    if !(s_min > 0.0) || !(s0 >= s_min) {
        return Err(Error::Domain(format!(
            "need s0 >= s_min > 0, got s0 = {s0}, s_min = {s_min}"
        )));
    }
    Ok(MultiplicativeBound {
        s0,
        s_min,
        delta,
        expectation: (1.0 + (s0 / s_min).ln()) / delta,
    })
}

/// Lower bound on the time to reach s_min under multiplicative drift at most
/// δ with steps bounded by κ: (1 + ln s0 − ln s_min) / (2δ + κ²/(s_min² − κ²)).
pub fn mult_drift_lower_bound_bounded_step(
    s0: f64,
    s_min: f64,
    kappa: u32,
    delta: f64,
) -> Result<f64> {
    let k = f64::from(kappa);
    if kappa == 0 {
        return Err(Error::Domain("kappa must be at least 1".into()));
    }
    if !(s_min >= std::f64::consts::SQRT_2 * k) {
        return Err(Error::Domain(format!(
            "s_min = {s_min} is below sqrt(2)*kappa = {}",
            std::f64::consts::SQRT_2 * k
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(s0 > 0.0) {
        return Err(Error::Domain(format!("s0 must be positive, got {s0}")));
    }
    Ok((1.0 + s0.ln() - s_min.ln()) / (2.0 * delta + k * k / (s_min * s_min - k * k)))
}

/// Which side of the bound the simulated quantity must stay on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Estimate must not exceed the bound.
    Upper,
    /// Estimate must not fall below the bound.
    Lower,
    /// Bound is attained; the interval must contain it.
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
        })
    }
}

/// An analytic bound next to its simulated counterpart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: String,
    pub fixture: String,
    pub quantity: String,
    pub bound: f64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub direction: Direction,
    pub verdict: Verdict,
}

impl BoundReport {
    /// Builds a report; the verdict is `Violated` only when the interval
    /// lies entirely on the forbidden side of the bound.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theorem: impl Into<String>,
        fixture: impl Into<String>,
        quantity: impl Into<String>,
        bound: f64,
        estimate: f64,
        ci: (f64, f64),
        trials: u64,
        direction: Direction,
    ) -> Self {
        let (ci_low, ci_high) = ci;
        let violated = match direction {
            Direction::Upper => ci_low > bound,
            Direction::Lower => ci_high < bound,
            Direction::Equal => ci_low > bound || ci_high < bound,
        };
        BoundReport {
            theorem: theorem.into(),
            fixture: fixture.into(),
            quantity: quantity.into(),
            bound,
            estimate,
            ci_low,
            ci_high,
            trials,
            direction,
            verdict: if violated {
                Verdict::Violated
            } else {
                Verdict::Consistent
            },
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

/// Renders reports as an aligned text table.
pub fn format_reports(reports: &[BoundReport]) -> String {
    let header = [
        "theorem", "fixture", "quantity", "dir", "bound", "estimate", "ci_low", "ci_high",
        "trials", "verdict",
    ];
    let rows: Vec<[String; 10]> = reports
        .iter()
        .map(|r| {
            [
                r.theorem.clone(),
                r.fixture.clone(),
                r.quantity.clone(),
                match r.direction {
                    Direction::Upper => "<=",
                    Direction::Lower => ">=",
                    Direction::Equal => "==",
                }
                .to_string(),
                format!("{:.6}", r.bound),
                format!("{:.6}", r.estimate),
                format!("{:.6}", r.ci_low),
                format!("{:.6}", r.ci_high),
                r.trials.to_string(),
                r.verdict.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in &rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}
