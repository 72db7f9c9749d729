//! Statistics for comparing prototypes in a user study.
//!
//! Responses are scored against an answer key ([`score_responses`]),
//! participants who answered too fast are dropped ([`exclude_fast`]), and
//! every pair of prototypes is compared with a one-indicator regression
//! ([`pairwise_compare`]) whose p-values are Bonferroni corrected within a
//! family of tests. [`build_report`] does all of it.

mod dist;
mod report;
mod score;

use alloc::vec::Vec;

use libm::sqrt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dist::{beta_inc, t_two_sided_p};
pub use report::{
    build_report, ComparisonRow, CorrelationCell, Exclusion, Family, LikertRow, Metric, Report,
    ReportConfig,
};
pub use score::{
    exclude_fast, score_responses, AnswerKey, KeyEntry, LikertRecord, Part, Prototype,
    ResponseRecord, ScoreRow,
};

pub const DEFAULT_THRESHOLD_SEC: f64 = 30.0;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least 2 observations per group, got {0}")]
    TooFewSamples(usize),
    #[error("pooled variance is zero")]
    DegenerateVariance,
    #[error("series is constant")]
    ConstantSeries,
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("rating {0} is outside 1..=5")]
    OutOfRangeRating(u8),
    #[error("no ratings")]
    NoRatings,
    #[error("question {0:?} is not in the answer key")]
    UnknownQuestion(alloc::string::String),
    #[error("question {question_id:?} is listed under task {key_task} part {key_part} in the answer key")]
    QuestionMismatch {
        question_id: alloc::string::String,
        key_task: u8,
        key_part: Part,
    },
    #[error("duplicate response from {participant_id:?} to question {question_id:?}")]
    DuplicateResponse {
        participant_id: alloc::string::String,
        question_id: alloc::string::String,
    },
    #[error("participant {0:?} appears under more than one prototype")]
    MixedPrototype(alloc::string::String),
    #[error("invalid time {time_sec} for participant {participant_id:?}")]
    InvalidTime {
        participant_id: alloc::string::String,
        time_sec: f64,
    },
    #[error("invalid task {0}, expected 1 or 2")]
    InvalidTask(u8),
    #[error("need at least 2 prototypes, found {0}")]
    InsufficientGroups(usize),
    #[error("{context}: {source}")]
    InFamily {
        context: alloc::string::String,
        source: alloc::boxed::Box<StatsError>,
    },
}

/// Core of one pairwise comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `mean(b) - mean(a)`: the indicator is 1 for group `b`.
    pub coef: f64,
    pub t: f64,
    /// Two-sided.
    pub p: f64,
    /// `(mean(a) - mean(b)) / pooled sd`, so its sign is opposite to `coef`.
    pub cohens_d: f64,
    pub df: usize,
    pub n_a: usize,
    pub n_b: usize,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sum_sq_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

fn check(a: &[f64], b: &[f64]) -> Result<(), StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewSamples(a.len().min(b.len())));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Pooled standard deviation with Bessel-corrected group variances.
pub fn pooled_sd(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    check(a, b)?;
    let var = (sum_sq_dev(a) + sum_sq_dev(b)) / (a.len() + b.len() - 2) as f64;
    if var <= 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    Ok(sqrt(var))
}

/// Regresses the pooled outcomes on an indicator that is 0 for `a` and 1 for
/// `b`, with an intercept and no covariates.
pub fn pairwise_compare(a: &[f64], b: &[f64]) -> Result<Comparison, StatsError> {
    let sd = pooled_sd(a, b)?;
    let n = a.len() + b.len();
    let xs = || core::iter::repeat_n(0.0, a.len()).chain(core::iter::repeat_n(1.0, b.len()));
    let ys = || a.iter().chain(b).copied();
    let x_bar = xs().sum::<f64>() / n as f64;
    let y_bar = ys().sum::<f64>() / n as f64;
    let sxx: f64 = xs().map(|x| (x - x_bar) * (x - x_bar)).sum();
    let sxy: f64 = xs().zip(ys()).map(|(x, y)| (x - x_bar) * (y - y_bar)).sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let ssr: f64 = xs()
        .zip(ys())
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    let df = n - 2;
    let se = sqrt(ssr / df as f64 / sxx);
    let t = if slope == 0.0 { 0.0 } else { slope / se };
    Ok(Comparison {
        coef: slope,
        t,
        p: t_two_sided_p(t, df as f64),
        cohens_d: (mean(a) - mean(b)) / sd,
        df,
        n_a: a.len(),
        n_b: b.len(),
    })
}

/// Student's pooled two-sample t statistic for `mean(b) - mean(a)`.
pub fn pooled_t(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    let sd = pooled_sd(a, b)?;
    let se = sd * sqrt(1.0 / a.len() as f64 + 1.0 / b.len() as f64);
    Ok((mean(b) - mean(a)) / se)
}

/// `min(1, m * p)`.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m as f64).min(1.0)
}

/// Pearson correlation coefficient.
pub fn correlate(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewSamples(xs.len()));
    }
    if xs.iter().chain(ys).any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let (mx, my) = (mean(xs), mean(ys));
    let sxx = sum_sq_dev(xs);
    let syy = sum_sq_dev(ys);
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantSeries);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok((sxy / sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Percentage of ratings that agree (4 or 5), rounded half-up to one
/// decimal place.
pub fn likert_summary(ratings: &[u8]) -> Result<f64, StatsError> {
    if let Some(&r) = ratings.iter().find(|r| !(1..=5).contains(*r)) {
        return Err(StatsError::OutOfRangeRating(r));
    }
    if ratings.is_empty() {
        return Err(StatsError::NoRatings);
    }
    let agree = ratings.iter().filter(|&&r| r >= 4).count() as u64;
    let n = ratings.len() as u64;
    // tenths of a percent, rounded in integers to avoid 57.49999 artefacts
    let tenths = (2000 * agree + n) / (2 * n);
    Ok(tenths as f64 / 10.0)
}

pub(crate) fn pairs<T: Copy>(items: &[T]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    for (i, &a) in items.iter().enumerate() {
        for &b in &items[i + 1..] {
            out.push((a, b));
        }
    }
    out
}
