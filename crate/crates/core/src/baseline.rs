//! Classical random-sampling baseline, power-law fits and the QWOA versus
//! classical comparison.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cvrp::QualityTable;
use crate::optimize::OptimizationRun;
use crate::qwoa::pairwise_sum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("power-law fit needs at least 3 records, got {0}")]
    TooFewRecords(usize),
    #[error("gap at r = {r} is {gap}; a power law needs positive gaps")]
    NonPositiveGap { r: usize, gap: f64 },
    #[error("runs must be sorted by strictly increasing depth")]
    Unsorted,
}

pub type Result<T> = std::result::Result<T, BaselineError>;

/// Exact expected minimum of `samples` uniform draws (with replacement) from
/// the solution qualities.
pub fn expected_best_of(q: &QualityTable, samples: u64) -> Result<f64> {
    if samples == 0 {
        return Err(BaselineError::NoSamples);
    }
    let m = q.len() as f64;
    let levels = q.levels();
    // tail[k] = #solutions with quality >= v_k
    let mut tail = vec![0u64; levels.len() + 1];
    for k in (0..levels.len()).rev() {
        tail[k] = tail[k + 1] + levels[k].multiplicity;
    }
    let pow = |count: u64| -> f64 { (count as f64 / m).powf(samples as f64) };
    Ok(pairwise_sum(0, levels.len(), &|k| {
        levels[k].value * (pow(tail[k]) - pow(tail[k + 1]))
    }))
}

/// Monte Carlo estimate of [`expected_best_of`] with its standard error.
/// Trial `i` draws from its own ChaCha8 stream, so the result does not
/// depend on the thread count.
pub fn monte_carlo_best_of(
    q: &QualityTable,
    samples: u64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(BaselineError::NoSamples);
    }
    if trials == 0 {
        return Err(BaselineError::NoTrials);
    }
    let f = q.qualities();
    let m = f.len() as u64;
    let mins: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            (0..samples)
                .map(|_| f[rng.random_range(0..m) as usize])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let n = mins.len();
    let mean = pairwise_sum(0, n, &|i| mins[i]) / n as f64;
    let stderr = if n > 1 {
        let var = pairwise_sum(0, n, &|i| {
            let d = mins[i] - mean;
            d * d
        }) / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Ok((mean, stderr))
}

/// One row of the QWOA versus classical table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub r: usize,
    pub qwoa_expectation: f64,
    /// Expected best of `2r` uniform samples.
    pub classical_expected_best: f64,
    /// Minimum quality.
    pub target: f64,
}

impl ConvergenceRecord {
    pub fn samples(&self) -> u64 {
        2 * self.r as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Curve {
    Qwoa,
    Classical,
}

impl Curve {
    pub fn name(self) -> &'static str {
        match self {
            Curve::Qwoa => "qwoa",
            Curve::Classical => "classical",
        }
    }

    fn value(self, rec: &ConvergenceRecord) -> f64 {
        match self {
            Curve::Qwoa => rec.qwoa_expectation,
            Curve::Classical => rec.classical_expected_best,
        }
    }
}

/// `gap(r) ~ c / r^alpha` fitted by least squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub curve: Curve,
    pub alpha: f64,
    /// `log c`
    pub intercept: f64,
    pub r_min: usize,
    pub r_max: usize,
    /// Root-mean-square residual of `log gap`.
    pub residual: f64,
}

pub fn fit_power_law(records: &[ConvergenceRecord], curve: Curve) -> Result<PowerLawFit> {
    if records.len() < 3 {
        return Err(BaselineError::TooFewRecords(records.len()));
    }
    let mut xs = Vec::with_capacity(records.len());
    let mut ys = Vec::with_capacity(records.len());
    for rec in records {
        let gap = curve.value(rec) - rec.target;
        if gap.is_nan() || gap <= 0.0 {
            return Err(BaselineError::NonPositiveGap { r: rec.r, gap });
        }
        xs.push((rec.r as f64).ln());
        ys.push(gap.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit {
        curve,
        alpha: -slope,
        intercept,
        r_min: records.iter().map(|r| r.r).min().unwrap_or(0),
        r_max: records.iter().map(|r| r.r).max().unwrap_or(0),
        residual,
    })
}

/// Pairs each QWOA run with the classical baseline of equal effort: `2r`
/// quality evaluations.
pub fn compare(q: &QualityTable, runs: &[OptimizationRun]) -> Result<Vec<ConvergenceRecord>> {
    if runs.windows(2).any(|w| w[0].depth >= w[1].depth) {
        return Err(BaselineError::Unsorted);
    }
    runs.iter()
        .map(|run| {
            Ok(ConvergenceRecord {
                r: run.depth,
                qwoa_expectation: run.best_objective,
                classical_expected_best: expected_best_of(q, 2 * run.depth as u64)?,
                target: q.min(),
            })
        })
        .collect()
}

/// Classical-only records for `r_values`, with no QWOA column (`NaN`).
pub fn classical_records(q: &QualityTable, r_values: &[usize]) -> Result<Vec<ConvergenceRecord>> {
    r_values
        .iter()
        .map(|&r| {
            Ok(ConvergenceRecord {
                r,
                qwoa_expectation: f64::NAN,
                classical_expected_best: expected_best_of(q, 2 * r as u64)?,
                target: q.min(),
            })
        })
        .collect()
}
