//! Conditional-ordered-list (DCOL) statistics and the association tests built
//! on them.
//!
//! Sorting the pairs `(x_i, y_i)` by `x` and summing squared consecutive
//! differences of `y` gives a model-free estimate of the noise variance of
//! `y` given `x`:
//!
//! ```text
//! S = 1 / (2 (n - 2)) * sum_{i=1}^{n-1} (y_{i+1} - y_i)^2
//! ```
//!
//! `S` is small when `x` predicts `y` smoothly. Its null distribution depends
//! only on the multiset of `y` values, so one permutation null per response
//! serves every candidate predictor.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NvsdError, Result};
use crate::stats;

/// Paired observations of one predictor and the response.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PairedSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(NvsdError::InvalidSample(format!(
                "x has {} values but y has {}",
                x.len(),
                y.len()
            )));
        }
        check_len(x.len())?;
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(NvsdError::InvalidSample("non-finite value".into()));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// A [`PairedSample`] whose `x` is nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample(PairedSample);

impl SortedSample {
    pub fn x(&self) -> &[f64] {
        self.0.x()
    }

    pub fn y(&self) -> &[f64] {
        self.0.y()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> PairedSample {
        self.0
    }
}

fn check_len(n: usize) -> Result<()> {
    if n < 3 {
        return Err(NvsdError::InvalidSample(format!(
            "need at least 3 observations, got {n}"
        )));
    }
    Ok(())
}

/// Indices that sort `x` ascending. Stable: tied values keep their original
/// relative order.
pub fn sort_order(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    idx
}

pub fn sort_pairs(s: &PairedSample) -> SortedSample {
    let order = sort_order(s.x());
    let x = order.iter().map(|&i| s.x[i]).collect();
    let y = order.iter().map(|&i| s.y[i]).collect();
    SortedSample(PairedSample { x, y })
}

/// Sum of squared consecutive differences, `sum (y_{i+1} - y_i)^2`.
fn dcol_sum(y: impl Iterator<Item = f64>) -> f64 {
    let mut prev: Option<f64> = None;
    let mut acc = 0.0;
    for v in y {
        if let Some(p) = prev {
            let d = v - p;
            acc += d * d;
        }
        prev = Some(v);
    }
    acc
}

fn normalize(sum: f64, n: usize) -> f64 {
    sum / (2.0 * (n - 2) as f64)
}

/// `S` for a response vector already arranged in predictor order.
pub fn s_delta_ordered(y: &[f64]) -> Result<f64> {
    check_len(y.len())?;
    Ok(normalize(dcol_sum(y.iter().copied()), y.len()))
}

pub fn s_delta(s: &SortedSample) -> Result<f64> {
    s_delta_ordered(s.y())
}

/// `S` of `y` visited in the order given by `order` (a sort permutation of
/// some predictor).
pub fn s_delta_by_order(y: &[f64], order: &[usize]) -> f64 {
    debug_assert_eq!(y.len(), order.len());
    normalize(dcol_sum(order.iter().map(|&i| y[i])), y.len())
}

/// Share of the response variance attributed to the predictor,
/// `(var(y) - S) / var(y)`. Not clamped: small samples can give slightly
/// negative values.
pub fn explained_fraction(s: &SortedSample) -> Result<f64> {
    let var_y = stats::sample_variance(s.y());
    if var_y <= 0.0 {
        return Err(NvsdError::DegenerateResponse("response is constant".into()));
    }
    Ok((var_y - s_delta(s)?) / var_y)
}

/// Sorted permutation null of `S` for one response vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    key: Vec<u64>,
    values: Vec<f64>,
}

impl NullDistribution {
    pub(crate) fn from_parts(y: &[f64], mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self {
            key: y_key(y),
            values,
        }
    }

    /// Whether this null was computed for exactly this response (bitwise).
    pub fn matches(&self, y: &[f64]) -> bool {
        self.key.len() == y.len() && self.key.iter().zip(y).all(|(k, v)| *k == v.to_bits())
    }

    /// Ascending null values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Add-one smoothed lower-tail p-value: `(1 + #{null <= observed}) / (m + 1)`.
    pub fn p_value(&self, observed: f64) -> f64 {
        let below = self.values.partition_point(|&v| v <= observed);
        (1 + below) as f64 / (self.values.len() + 1) as f64
    }
}

fn y_key(y: &[f64]) -> Vec<u64> {
    y.iter().map(|v| v.to_bits()).collect()
}

/// Draws `m` permutations of `y` and returns the sorted null values of `S`.
///
/// Replicate `j` shuffles with its own ChaCha stream `j` under `seed`, so the
/// result does not depend on how the work is split across threads.
pub fn permutation_null(y: &[f64], m: usize, seed: u64) -> Result<NullDistribution> {
    check_len(y.len())?;
    if m == 0 {
        return Err(NvsdError::Config("need at least one permutation".into()));
    }
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map_init(
            || y.to_vec(),
            |buf, j| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(j as u64);
                buf.copy_from_slice(y);
                buf.shuffle(&mut rng);
                normalize(dcol_sum(buf.iter().copied()), buf.len())
            },
        )
        .collect();
    Ok(NullDistribution::from_parts(y, values))
}

/// Permutation count, seed and an optional cached null for the current
/// response.
#[derive(Debug, Clone)]
pub struct PermutationPlan {
    m: usize,
    seed: u64,
    cached_null: Option<NullDistribution>,
}

impl PermutationPlan {
    pub const DEFAULT_PERMUTATIONS: usize = 2000;

    pub fn new(m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(NvsdError::Config("need at least one permutation".into()));
        }
        Ok(Self {
            m,
            seed,
            cached_null: None,
        })
    }

    pub fn permutations(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cached_null(&self) -> Option<&NullDistribution> {
        self.cached_null.as_ref()
    }

    /// Null for `y`, computed on first use and reused while `y` is unchanged.
    pub fn null_for(&mut self, y: &[f64]) -> Result<&NullDistribution> {
        let fresh = match &self.cached_null {
            Some(null) => !null.matches(y),
            None => true,
        };
        if fresh {
            self.cached_null = Some(permutation_null(y, self.m, self.seed)?);
        }
        Ok(self.cached_null.as_ref().expect("null just populated"))
    }
}

/// Permutation p-value of the DCOL association between `x` and `y`.
pub fn permutation_p(s: &PairedSample, plan: &mut PermutationPlan) -> Result<f64> {
    let observed = s_delta_by_order(s.y(), &sort_order(s.x()));
    Ok(plan.null_for(s.y())?.p_value(observed))
}

/// Two-sided Pearson correlation p-value.
pub fn pearson_p(s: &PairedSample) -> Result<f64> {
    let r = stats::pearson_r(s.x(), s.y())
        .ok_or_else(|| NvsdError::DegenerateInput("constant predictor or response".into()))?;
    Ok(stats::correlation_p_value(r, s.len()))
}

/// Bonferroni-style union of the linear and DCOL tests, capped at 1.
pub fn combined_p(p_linear: f64, p_dcol: f64) -> f64 {
    (2.0 * p_linear.min(p_dcol)).min(1.0)
}

/// Everything the selector needs to know about one candidate predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationScore {
    pub s_delta: f64,
    pub sigma2_y: f64,
    pub explained_fraction: f64,
    pub p_dcol: f64,
    pub p_linear: f64,
    pub p_combined: f64,
}

impl AssociationScore {
    /// Score for a predictor carrying no usable information (constant column).
    pub(crate) fn uninformative(sigma2_y: f64) -> Self {
        Self {
            s_delta: sigma2_y,
            sigma2_y,
            explained_fraction: 0.0,
            p_dcol: 1.0,
            p_linear: 1.0,
            p_combined: 1.0,
        }
    }
}

/// Scores one predictor against the response.
pub fn score(s: &PairedSample, plan: &mut PermutationPlan) -> Result<AssociationScore> {
    let sigma2_y = stats::sample_variance(s.y());
    if sigma2_y <= 0.0 {
        return Err(NvsdError::DegenerateResponse("response is constant".into()));
    }
    let sorted = sort_pairs(s);
    let s_delta = s_delta(&sorted)?;
    let p_dcol = plan.null_for(s.y())?.p_value(s_delta);
    let p_linear = pearson_p(s)?;
    Ok(AssociationScore {
        s_delta,
        sigma2_y,
        explained_fraction: (sigma2_y - s_delta) / sigma2_y,
        p_dcol,
        p_linear,
        p_combined: combined_p(p_linear, p_dcol),
    })
}
