//! Run metrics and replication statistics.
//!
//! Utilization counts a developer as busy on a day when they hold at least one
//! assignment at the end of that day. Queue length is averaged over the whole
//! run with the daily value held constant for the day.

use std::fmt;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::engine::RunResult;
use crate::error::{Error, Result};

/// The three per-run performance measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationSummary {
    pub avg_waiting_days: f64,
    pub avg_utilization: f64,
    pub avg_queue_length: f64,
}

impl ReplicationSummary {
    pub fn of(result: &RunResult) -> Result<Self> {
        Ok(ReplicationSummary {
            avg_waiting_days: avg_waiting_time(result)?,
            avg_utilization: avg_utilization(result, result.n_developers)?,
            avg_queue_length: time_avg_queue_length(result)?,
        })
    }
}

/// Mean of `start − arrival` over started projects.
pub fn avg_waiting_time(result: &RunResult) -> Result<f64> {
    let waits: Vec<f64> = result
        .records
        .iter()
        .filter_map(|r| r.waiting_days())
        .collect();
    if waits.is_empty() {
        return Err(Error::UndefinedMetric(
            "waiting time of a run without started projects",
        ));
    }
    Ok(waits.iter().sum::<f64>() / waits.len() as f64)
}

/// Busy developer-days over available developer-days.
pub fn avg_utilization(result: &RunResult, n_developers: usize) -> Result<f64> {
    if result.horizon_days <= 0.0 {
        return Err(Error::UndefinedMetric("utilization over a zero horizon"));
    }
    if n_developers == 0 {
        return Err(Error::UndefinedMetric("utilization without developers"));
    }
    let busy: usize = result.traces.iter().map(|t| t.busy_developers).sum();
    Ok(busy as f64 / (n_developers as f64 * result.horizon_days))
}

pub fn time_avg_queue_length(result: &RunResult) -> Result<f64> {
    if result.horizon_days <= 0.0 {
        return Err(Error::UndefinedMetric("queue length over a zero horizon"));
    }
    let area: usize = result.traces.iter().map(|t| t.queue_length).sum();
    Ok(area as f64 / result.horizon_days)
}

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Sample mean with a Student-t confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub mean: f64,
    pub half_width: f64,
    pub n: usize,
    pub confidence: f64,
}

impl IntervalEstimate {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.mean).abs() <= self.half_width
    }
}

/// `mean±half_width` with four decimals.
impl fmt::Display for IntervalEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}±{:.4}", self.mean, self.half_width)
    }
}

/// Quantile of Student's t distribution with `df` degrees of freedom.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} outside (0, 1)"
        )));
    }
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidParameter(format!("degrees of freedom {df}: {e}")))?;
    Ok(t.inverse_cdf(p))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample standard deviation.
pub fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

/// Mean ± `t_{(1+c)/2, n−1} · s / √n`.
pub fn summarize(values: &[f64], confidence: f64) -> Result<IntervalEstimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientReplications(n));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence {confidence} outside (0, 1)"
        )));
    }
    // order-independent sums
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let t = student_t_quantile((1.0 + confidence) / 2.0, (n - 1) as f64)?;
    Ok(IntervalEstimate {
        mean: mean(&sorted),
        half_width: t * sample_std(&sorted) / (n as f64).sqrt(),
        n,
        confidence,
    })
}

/// Percentage reduction from `baseline` to `treated`; positive means `treated` is lower.
pub fn improvement_pct(baseline: f64, treated: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok(100.0 * (baseline - treated) / baseline)
}
