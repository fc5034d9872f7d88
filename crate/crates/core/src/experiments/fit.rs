//! Least-squares fits of mean iterations against the runtime forms.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::CellSummary;
use crate::error::{Error, Result};

/// Ratio spread (max/min of observed/predicted) above which a fit is flagged.
pub const DEFAULT_SPREAD_THRESHOLD: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingModel {
    /// y = a·T_init^b.
    PowerLawTInit,
    /// y = a·n^b.
    PowerLawN,
    /// y = a·(T_init + n·ln n).
    TInitPlusNLogN,
    /// y = a·T_init·ln T_init + b·n·ln³n.
    TLogTPlusNLog3N,
    /// y = a·T_init·ln T_init.
    TLogT,
}

impl ScalingModel {
    pub const ALL: [ScalingModel; 5] = [
        ScalingModel::PowerLawTInit,
        ScalingModel::PowerLawN,
        ScalingModel::TInitPlusNLogN,
        ScalingModel::TLogTPlusNLog3N,
        ScalingModel::TLogT,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ScalingModel::PowerLawTInit => "power_law_t_init",
            ScalingModel::PowerLawN => "power_law_n",
            ScalingModel::TInitPlusNLogN => "t_init_plus_n_log_n",
            ScalingModel::TLogTPlusNLog3N => "t_log_t_plus_n_log3_n",
            ScalingModel::TLogT => "t_log_t",
        }
    }

    /// Basis functions of the linear models.
    fn basis(self, p: &ScalingPoint) -> Vec<f64> {
        let t = p.t_init;
        let n = p.n;
        match self {
            ScalingModel::TInitPlusNLogN => vec![t + n * n.ln()],
            ScalingModel::TLogTPlusNLog3N => vec![t * t.ln(), n * n.ln().powi(3)],
            ScalingModel::TLogT => vec![t * t.ln()],
            ScalingModel::PowerLawTInit => vec![t],
            ScalingModel::PowerLawN => vec![n],
        }
    }
}

/// One observation: grid coordinates and the measured value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: f64,
    pub t_init: f64,
    pub value: f64,
}

/// Cells with at least one successful run, valued by mean iterations.
pub fn points_from_summaries(summaries: &[CellSummary]) -> Vec<ScalingPoint> {
    summaries
        .iter()
        .filter_map(|s| {
            s.mean_iterations.map(|value| ScalingPoint {
                n: f64::from(s.n),
                t_init: s.t_init as f64,
                value,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: f64,
    pub t_init: f64,
    pub observed: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: String,
    /// Linear models: one coefficient per basis term. Power laws: [a, b].
    pub coefficients: Vec<f64>,
    /// Log-log slope (power laws only).
    pub slope: Option<f64>,
    /// 95% interval of the slope (power laws with at least three points).
    pub slope_ci: Option<(f64, f64)>,
    pub ratios: Vec<RatioRow>,
    /// max/min of the ratio column.
    pub ratio_spread: f64,
    pub spread_threshold: f64,
    pub spread_flagged: bool,
}

type Predictor = Box<dyn Fn(&ScalingPoint) -> f64>;

/// Fits `model` to `points`. Needs at least three points spanning at least a
/// factor 10 in the model's dominant variable (the regressor for power laws,
/// the summed basis otherwise).
pub fn fit_scaling(
    points: &[ScalingPoint],
    model: ScalingModel,
    spread_threshold: f64,
) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Domain(format!(
            "fit needs at least 3 cells, got {}",
            points.len()
        )));
    }
    let dominant: Vec<f64> = points.iter().map(|p| model.basis(p).iter().sum()).collect();
    let (lo, hi) = dominant
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    if !(lo > 0.0) || hi / lo < 10.0 {
        return Err(Error::Domain(format!(
            "grid spans [{lo}, {hi}] in the dominant variable of {}; need a positive range of at least one decade",
            model.id()
        )));
    }
    if points
        .iter()
        .any(|p| !(p.value > 0.0) || !p.value.is_finite())
    {
        return Err(Error::Domain(
            "observed values must be positive and finite".into(),
        ));
    }

    let (coefficients, slope, slope_ci, predict): (Vec<f64>, _, _, Predictor) = match model {
        ScalingModel::PowerLawTInit | ScalingModel::PowerLawN => {
            let xs: Vec<f64> = dominant.iter().map(|x| x.ln()).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.value.ln()).collect();
            let (a, b, se) = ols_line(&xs, &ys);
            let ci = se.and_then(|se| {
                let df = (points.len() - 2) as f64;
                let t = StudentsT::new(0.0, 1.0, df).ok()?.inverse_cdf(0.975);
                Some((b - t * se, b + t * se))
            });
            let coef = a.exp();
            (
                vec![coef, b],
                Some(b),
                ci,
                Box::new(move |p: &ScalingPoint| coef * model.basis(p)[0].powf(b)),
            )
        }
        _ => {
            let rows: Vec<Vec<f64>> = points.iter().map(|p| model.basis(p)).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.value).collect();
            let coef = least_squares(&rows, &ys)?;
            let c = coef.clone();
            (
                coef,
                None,
                None,
                Box::new(move |p: &ScalingPoint| {
                    model.basis(p).iter().zip(&c).map(|(x, k)| x * k).sum()
                }),
            )
        }
    };

    let ratios: Vec<RatioRow> = points
        .iter()
        .map(|p| {
            let predicted = predict(p);
            RatioRow {
                n: p.n,
                t_init: p.t_init,
                observed: p.value,
                predicted,
                ratio: p.value / predicted,
            }
        })
        .collect();
    if ratios
        .iter()
        .any(|r| !(r.ratio > 0.0) || !r.ratio.is_finite())
    {
        return Err(Error::Domain(format!(
            "{} predicts a non-positive value on this grid",
            model.id()
        )));
    }
    let max = ratios
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let ratio_spread = max / min;
    Ok(FitResult {
        model: model.id().to_string(),
        coefficients,
        slope,
        slope_ci,
        ratios,
        ratio_spread,
        spread_threshold,
        spread_flagged: ratio_spread > spread_threshold,
    })
}

/// Ordinary least squares y = a + b·x; returns (a, b, standard error of b).
fn ols_line(xs: &[f64], ys: &[f64]) -> (f64, f64, Option<f64>) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let se = (xs.len() > 2).then(|| {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - a - b * x).powi(2))
            .sum();
        (rss / (k - 2.0) / sxx).sqrt()
    });
    (a, b, se)
}

/// Least squares without intercept via the normal equations (one or two terms).
fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    let p = rows[0].len();
    let mut g = vec![vec![0.0; p]; p];
    let mut r = vec![0.0; p];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..p {
            r[i] += row[i] * y;
            for j in 0..p {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    let singular = || Error::Domain("basis terms are linearly dependent on this grid".into());
    match p {
        1 => {
            if g[0][0] <= 0.0 {
                return Err(singular());
            }
            Ok(vec![r[0] / g[0][0]])
        }
        2 => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if det.abs() <= 1e-12 * g[0][0] * g[1][1] {
                return Err(singular());
            }
            Ok(vec![
                (r[0] * g[1][1] - r[1] * g[0][1]) / det,
                (g[0][0] * r[1] - g[1][0] * r[0]) / det,
            ])
        }
        _ => unreachable!("models have one or two terms"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: f64, t_init: f64, value: f64) -> ScalingPoint {
        ScalingPoint { n, t_init, value }
    }

    #[test]
    fn exact_linear_power_law() {
        let points: Vec<_> = [10.0, 30.0, 100.0, 300.0, 1000.0]
            .iter()
            .map(|&t| pt(4.0, t, 5.0 * t))
            .collect();
        let fit = fit_scaling(
            &points,
            ScalingModel::PowerLawTInit,
            DEFAULT_SPREAD_THRESHOLD,
        )
        .unwrap();
        let slope = fit.slope.unwrap();
        assert!((slope - 1.0).abs() < 0.01, "{slope}");
        assert!((fit.coefficients[0] - 5.0).abs() < 1e-9);
        assert!(!fit.spread_flagged);
    }

    #[test]
    fn additive_model_recovers_exact_data() {
        let mut points = Vec::new();
        for n in [8.0f64, 32.0, 128.0] {
            for t in [64.0, 512.0, 4096.0] {
                points.push(pt(n, t, t + n * n.ln()));
            }
        }
        let fit = fit_scaling(&points, ScalingModel::TInitPlusNLogN, 3.0).unwrap();
        for r in &fit.ratios {
            assert!((r.ratio - 1.0).abs() < 1e-9);
        }
        assert!((fit.ratio_spread - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_data_is_flagged_under_linear_model() {
        let points: Vec<_> = [10.0, 30.0, 100.0, 300.0, 1000.0]
            .iter()
            .map(|&t| pt(1.0, t, t * t))
            .collect();
        let fit = fit_scaling(&points, ScalingModel::TInitPlusNLogN, 3.0).unwrap();
        assert!(fit.spread_flagged, "spread {}", fit.ratio_spread);
    }

    #[test]
    fn degenerate_grids_are_rejected() {
        let two = [pt(1.0, 10.0, 1.0), pt(1.0, 1000.0, 2.0)];
        assert!(fit_scaling(&two, ScalingModel::PowerLawTInit, 3.0).is_err());
        let narrow = [pt(1.0, 10.0, 1.0), pt(1.0, 20.0, 2.0), pt(1.0, 50.0, 3.0)];
        assert!(fit_scaling(&narrow, ScalingModel::PowerLawTInit, 3.0).is_err());
    }

    #[test]
    fn slope_interval_covers_noisy_slope() {
        let points: Vec<_> = [16.0, 64.0, 256.0, 1024.0, 4096.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| pt(1.0, t, 3.0 * t * if i % 2 == 0 { 1.1 } else { 0.9 }))
            .collect();
        let fit = fit_scaling(&points, ScalingModel::PowerLawTInit, 3.0).unwrap();
        let (lo, hi) = fit.slope_ci.unwrap();
        assert!(lo < 1.0 && 1.0 < hi, "[{lo}, {hi}]");
    }
}
