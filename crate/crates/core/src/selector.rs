//! Incremental forward stagewise selection.
//!
//! Every iteration scores all predictors against the current response
//! (Pearson and DCOL permutation p-values combined), picks the most
//! significant one and roughens the response along it. The loop ends when
//! the smallest combined p-value exceeds the stopping threshold.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assoc::{combined_p, s_delta_by_order, sort_order, AssociationScore, PermutationPlan};
use crate::data::Dataset;
use crate::error::{NvsdError, Result};
use crate::predictor::AdditiveModel;
use crate::roughening::{roughen_with_order, RougheningConfig};
use crate::simulation::nrmse;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Stop once the smallest combined p-value is strictly larger than this.
    pub alpha_stop: f64,
    pub permutations: usize,
    /// Iteration cap; `None` means ten times the number of predictors.
    pub max_iters: Option<usize>,
    pub roughening: RougheningConfig,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            alpha_stop: 0.001,
            permutations: PermutationPlan::DEFAULT_PERMUTATIONS,
            max_iters: None,
            roughening: RougheningConfig::default(),
            seed: 0,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_stop > 0.0 && self.alpha_stop < 1.0) {
            return Err(NvsdError::Config(format!(
                "stopping threshold must be in (0, 1), got {}",
                self.alpha_stop
            )));
        }
        if self.permutations == 0 {
            return Err(NvsdError::Config("need at least one permutation".into()));
        }
        if self.max_iters == Some(0) {
            return Err(NvsdError::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, p: usize) -> usize {
        self.max_iters.unwrap_or(10 * p.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Threshold,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub variable: usize,
    pub name: String,
    pub p_combined: f64,
    pub p_linear: f64,
    pub p_dcol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub iterations: Vec<IterationRecord>,
    /// Distinct chosen variables, by first selection.
    pub selected: Vec<usize>,
    pub selected_names: Vec<String>,
    pub stop_reason: StopReason,
}

/// Per-column quantities that do not change while the response is
/// roughened.
struct ColumnCache {
    orders: Vec<Vec<usize>>,
    centered: Vec<Vec<f64>>,
    ss: Vec<f64>,
}

impl ColumnCache {
    fn new(d: &Dataset) -> Self {
        let (orders, (centered, ss)): (Vec<_>, (Vec<_>, Vec<_>)) = (0..d.p())
            .into_par_iter()
            .map(|j| {
                let x = d.column(j);
                let m = stats::mean(x);
                let c: Vec<f64> = x.iter().map(|v| v - m).collect();
                let ss = c.iter().map(|v| v * v).sum::<f64>();
                (sort_order(x), (c, ss))
            })
            .unzip();
        Self {
            orders,
            centered,
            ss,
        }
    }

    fn score_all(&self, y: &[f64], plan: &mut PermutationPlan) -> Result<Vec<AssociationScore>> {
        let n = y.len();
        let sigma2_y = stats::sample_variance(y);
        if !(sigma2_y > 0.0) {
            return Err(NvsdError::DegenerateResponse("response is constant".into()));
        }
        let null = plan.null_for(y)?;
        let my = stats::mean(y);
        let yc: Vec<f64> = y.iter().map(|v| v - my).collect();
        let syy: f64 = yc.iter().map(|v| v * v).sum();
        Ok((0..self.orders.len())
            .into_par_iter()
            .map(|j| {
                if self.ss[j] == 0.0 {
                    return AssociationScore::uninformative(sigma2_y);
                }
                let s = s_delta_by_order(y, &self.orders[j]);
                let p_dcol = null.p_value(s);
                let sxy: f64 = self.centered[j].iter().zip(&yc).map(|(a, b)| a * b).sum();
                let r = (sxy / (self.ss[j].sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
                let p_linear = stats::correlation_p_value(r, n);
                AssociationScore {
                    s_delta: s,
                    sigma2_y,
                    explained_fraction: (sigma2_y - s) / sigma2_y,
                    p_dcol,
                    p_linear,
                    p_combined: combined_p(p_linear, p_dcol),
                }
            })
            .collect())
    }
}

fn iteration_plan(cfg: &SelectionConfig, iteration: usize) -> Result<PermutationPlan> {
    PermutationPlan::new(cfg.permutations, stats::derive_seed(cfg.seed, iteration as u64))
}

/// Index of the smallest combined p-value; ties go to the lowest index.
fn argmin_p(scores: &[AssociationScore]) -> Option<usize> {
    scores
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (j, s)| match best {
            Some((_, p)) if p <= s.p_combined => best,
            _ => Some((j, s.p_combined)),
        })
        .map(|(j, _)| j)
}

/// One scoring pass of every predictor against the response. Constant
/// predictors get p-values of 1.
pub fn rank_variables(d: &Dataset, cfg: &SelectionConfig) -> Result<Vec<AssociationScore>> {
    cfg.validate()?;
    let cache = ColumnCache::new(d);
    cache.score_all(d.response(), &mut iteration_plan(cfg, 0)?)
}

pub fn select_variables(d: &Dataset, cfg: &SelectionConfig) -> Result<SelectionTrace> {
    cfg.validate()?;
    let cache = ColumnCache::new(d);
    let cap = cfg.iteration_cap(d.p());
    let mut y = d.response().to_vec();
    let mut iterations = Vec::new();
    let mut selected: Vec<usize> = Vec::new();
    let mut stop_reason = StopReason::MaxIters;
    for iteration in 0..cap {
        let scores = match cache.score_all(&y, &mut iteration_plan(cfg, iteration)?) {
            Ok(s) => s,
            Err(NvsdError::DegenerateResponse(_)) => {
                stop_reason = StopReason::Threshold;
                break;
            }
            Err(e) => return Err(e),
        };
        let Some(best) = argmin_p(&scores) else {
            stop_reason = StopReason::Threshold;
            break;
        };
        let s = scores[best];
        if s.p_combined > cfg.alpha_stop {
            stop_reason = StopReason::Threshold;
            break;
        }
        iterations.push(IterationRecord {
            iteration,
            variable: best,
            name: d.names()[best].clone(),
            p_combined: s.p_combined,
            p_linear: s.p_linear,
            p_dcol: s.p_dcol,
        });
        if !selected.contains(&best) {
            selected.push(best);
        }
        y = roughen_with_order(d.column(best), &y, &cache.orders[best], &cfg.roughening)?;
    }
    Ok(SelectionTrace {
        selected_names: selected.iter().map(|&j| d.names()[j].clone()).collect(),
        iterations,
        selected,
        stop_reason,
    })
}

/// Deterministic assignment of rows to `folds` folds.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in idx.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

/// Mean cross-validated NRMSE of the additive predictor on the top-`k`
/// ranked variables, for `k = 1..=ranked.len()`.
pub fn cv_curve(d: &Dataset, ranked: &[usize], folds: usize, seed: u64) -> Result<Vec<f64>> {
    if ranked.is_empty() {
        return Err(NvsdError::EmptySelection);
    }
    if folds < 2 {
        return Err(NvsdError::Config(format!("need at least 2 folds, got {folds}")));
    }
    if d.n() < 2 * folds {
        return Err(NvsdError::Config(format!(
            "{} observations are too few for {folds}-fold cross-validation",
            d.n()
        )));
    }
    let assignment = fold_assignment(d.n(), folds, seed);
    let splits: Vec<(Dataset, Dataset)> = (0..folds)
        .map(|f| {
            let train: Vec<usize> = (0..d.n()).filter(|&i| assignment[i] != f).collect();
            let test: Vec<usize> = (0..d.n()).filter(|&i| assignment[i] == f).collect();
            Ok((d.subset_rows(&train)?, d.subset_rows(&test)?))
        })
        .collect::<Result<_>>()?;
    (1..=ranked.len())
        .into_par_iter()
        .map(|k| {
            let vars = &ranked[..k];
            let mut total = 0.0;
            for (train, test) in &splits {
                let model = AdditiveModel::fit(&train.select_columns(vars))?;
                let pred = model.predict(test.predictors())?;
                total += nrmse(test.response(), &pred)?;
            }
            Ok(total / folds as f64)
        })
        .collect()
}

/// Number of leading ranked variables with the lowest cross-validated
/// error (smallest `k` on ties).
pub fn choose_k_by_cv(d: &Dataset, ranked: &[usize], folds: usize, seed: u64) -> Result<usize> {
    if ranked.len() == 1 {
        return Ok(1);
    }
    let curve = cv_curve(d, ranked, folds, seed)?;
    let best = curve
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
    Ok(best.0 + 1)
}

/// Repeated selection, removing each selected group from the candidate pool,
/// until a group smaller than `min_group` is produced (and kept) or no
/// candidates remain. Groups hold column indices of `d`.
pub fn iterative_group_selection(
    d: &Dataset,
    cfg: &SelectionConfig,
    min_group: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut groups = Vec::new();
    let mut removed: Vec<usize> = Vec::new();
    while removed.len() < d.p() {
        let (working, kept) = d.without_columns(&removed);
        let trace = select_variables(&working, cfg)?;
        let group: Vec<usize> = trace.selected.iter().map(|&j| kept[j]).collect();
        removed.extend(&group);
        let done = group.len() < min_group;
        groups.push(group);
        if done {
            break;
        }
    }
    Ok(groups)
}
