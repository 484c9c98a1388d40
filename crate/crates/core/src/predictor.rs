//! Sparse additive model fitted by backfitting smoothing splines.
//!
//! `y ~ intercept + sum_j f_j(x_j)`, with every `f_j` centred to mean zero on
//! the training data. Used to turn a selected variable set into predictions.
//!
//! # Model file format
//!
//! Plain text, one record per line, numbers written with the shortest
//! representation that round-trips exactly:
//!
//! ```text
//! nvsd-additive-model 1
//! intercept <value>
//! components <count>
//! component <knot-count> <variable name, rest of line>
//! <knot> <value> <second derivative>      (knot-count lines)
//! ...
//! ```

use std::fmt::Write as _;

use crate::data::{Dataset, Frame};
use crate::error::{NvsdError, Result};
use crate::smoother::{SmootherSpec, SmoothingSpline};
use crate::stats;

const FORMAT_HEADER: &str = "nvsd-additive-model";
const FORMAT_VERSION: u32 = 1;

const MIN_ROWS: usize = 10;
const MAX_SWEEPS: usize = 100;
const TOLERANCE: f64 = 1e-6;
/// Sweeps during which each component re-selects its penalty by GCV; after
/// that the penalty is frozen so backfitting converges.
const GCV_SWEEPS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveComponent {
    pub variable: String,
    pub spline: SmoothingSpline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveModel {
    intercept: f64,
    components: Vec<AdditiveComponent>,
    sweeps: usize,
}

impl AdditiveModel {
    /// A model predicting a constant.
    pub fn intercept_only(intercept: f64) -> Self {
        Self {
            intercept,
            components: Vec::new(),
            sweeps: 0,
        }
    }

    /// Backfits one smooth component per predictor column of `d`.
    pub fn fit(d: &Dataset) -> Result<Self> {
        if d.p() == 0 {
            return Err(NvsdError::Fit("no variables to fit".into()));
        }
        if d.n() < MIN_ROWS {
            return Err(NvsdError::Fit(format!(
                "additive model needs at least {MIN_ROWS} rows, got {}",
                d.n()
            )));
        }
        let y = d.response();
        let n = d.n();
        let p = d.p();
        let intercept = stats::mean(y);
        let mut fitted = vec![vec![0.0; n]; p];
        let mut splines: Vec<Option<SmoothingSpline>> = vec![None; p];
        let mut total: Vec<f64> = vec![0.0; n];
        let mut sweeps = 0;
        for sweep in 0..MAX_SWEEPS {
            sweeps = sweep + 1;
            let mut max_change: f64 = 0.0;
            for j in 0..p {
                let x = d.column(j);
                let partial: Vec<f64> = (0..n)
                    .map(|i| y[i] - intercept - (total[i] - fitted[j][i]))
                    .collect();
                let spec = match &splines[j] {
                    Some(s) if sweep >= GCV_SWEEPS && s.lambda().is_finite() && s.lambda() > 0.0 => {
                        SmootherSpec::Lambda(s.lambda())
                    }
                    _ => SmootherSpec::Gcv,
                };
                let mut spline = SmoothingSpline::fit(x, &partial, spec)?;
                let mut new = spline.evaluate_many(x);
                let centre = stats::mean(&new);
                spline.shift(centre);
                new.iter_mut().for_each(|v| *v -= centre);
                for i in 0..n {
                    max_change = max_change.max((new[i] - fitted[j][i]).abs());
                    total[i] += new[i] - fitted[j][i];
                }
                fitted[j] = new;
                splines[j] = Some(spline);
            }
            if max_change < TOLERANCE {
                break;
            }
        }
        let components = splines
            .into_iter()
            .zip(d.names())
            .map(|(s, name)| AdditiveComponent {
                variable: name.clone(),
                spline: s.expect("every component fitted"),
            })
            .collect();
        Ok(Self {
            intercept,
            components,
            sweeps,
        })
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn components(&self) -> &[AdditiveComponent] {
        &self.components
    }

    pub fn variables(&self) -> Vec<&str> {
        self.components.iter().map(|c| c.variable.as_str()).collect()
    }

    /// Backfitting sweeps used by the fit (0 for loaded models).
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Predictions for every row of `rows`, which must contain each model
    /// variable by name. Values beyond a component's training range take the
    /// boundary value.
    pub fn predict(&self, rows: &Frame) -> Result<Vec<f64>> {
        let mut out = vec![self.intercept; rows.n_rows()];
        for c in &self.components {
            let x = rows
                .column_by_name(&c.variable)
                .ok_or_else(|| NvsdError::Schema(format!("missing column {:?}", c.variable)))?;
            for (o, &v) in out.iter_mut().zip(x) {
                *o += c.spline.evaluate(v);
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{FORMAT_HEADER} {FORMAT_VERSION}");
        let _ = writeln!(s, "intercept {}", self.intercept);
        let _ = writeln!(s, "components {}", self.components.len());
        for c in &self.components {
            let sp = &c.spline;
            let _ = writeln!(s, "component {} {}", sp.knots().len(), c.variable);
            for ((k, v), g) in sp.knots().iter().zip(sp.values()).zip(sp.second_derivatives()) {
                let _ = writeln!(s, "{k} {v} {g}");
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| NvsdError::Parse(format!("unexpected end of model file, expected {what}")))
        };
        let (ln, header) = next("header")?;
        let version = header
            .strip_prefix(FORMAT_HEADER)
            .map(str::trim)
            .ok_or_else(|| NvsdError::Parse(format!("line {}: not an additive model file", ln + 1)))?;
        if version != FORMAT_VERSION.to_string() {
            return Err(NvsdError::Parse(format!("unsupported model version {version:?}")));
        }
        let (ln, l) = next("intercept")?;
        let intercept = keyed_number(l, "intercept", ln)?;
        let (ln, l) = next("components")?;
        let count = keyed_number(l, "components", ln)? as usize;
        let mut components = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, l) = next("component")?;
            let rest = l
                .strip_prefix("component ")
                .ok_or_else(|| NvsdError::Parse(format!("line {}: expected component", ln + 1)))?;
            let (k, name) = rest
                .split_once(' ')
                .ok_or_else(|| NvsdError::Parse(format!("line {}: malformed component", ln + 1)))?;
            let k: usize = k
                .parse()
                .map_err(|_| NvsdError::Parse(format!("line {}: bad knot count", ln + 1)))?;
            let (mut knots, mut values, mut second) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..k {
                let (ln, l) = next("knot")?;
                let nums: Vec<f64> = l
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| NvsdError::Parse(format!("line {}: bad number", ln + 1)))?;
                if nums.len() != 3 {
                    return Err(NvsdError::Parse(format!("line {}: expected 3 numbers", ln + 1)));
                }
                knots.push(nums[0]);
                values.push(nums[1]);
                second.push(nums[2]);
            }
            components.push(AdditiveComponent {
                variable: name.to_string(),
                spline: SmoothingSpline::from_parts(knots, values, second)?,
            });
        }
        Ok(Self {
            intercept,
            components,
            sweeps: 0,
        })
    }
}

fn keyed_number(line: &str, key: &str, ln: usize) -> Result<f64> {
    line.strip_prefix(key)
        .and_then(|r| r.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| NvsdError::Parse(format!("line {}: expected `{key} <number>`", ln + 1)))
}

/// Fits the additive model on the columns `vars` of `d`.
pub fn fit_additive(d: &Dataset, vars: &[usize]) -> Result<AdditiveModel> {
    AdditiveModel::fit(&d.select_columns(vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::nrmse;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn dataset(cols: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
        let names = (0..cols.len()).map(|j| format!("x{}", j + 1)).collect();
        Dataset::new(Frame::new(names, cols).unwrap(), y, "y").unwrap()
    }

    #[test]
    fn constant_response() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 1.7).sin()).collect();
        let d = dataset(vec![x], vec![2.5; 30]);
        let m = AdditiveModel::fit(&d).unwrap();
        assert_eq!(m.intercept(), 2.5);
        for v in m.components()[0].spline.values() {
            assert!(v.abs() < 1e-10);
        }
        for v in m.predict(d.predictors()).unwrap() {
            assert!((v - 2.5).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_signal_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..500).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 3.0 * v + 0.5 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d = dataset(vec![x.clone()], y);
        let pred = AdditiveModel::fit(&d).unwrap().predict(d.predictors()).unwrap();
        let truth: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        assert!(stats::pearson_r(&pred, &truth).unwrap() > 0.95);
    }

    #[test]
    fn additive_structure_beats_single_variable() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 400;
        let x1: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
        let x2: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| x1[i].sin() + x2[i].abs() + 0.3 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d = dataset(vec![x1, x2], y.clone());
        let both = AdditiveModel::fit(&d).unwrap().predict(d.predictors()).unwrap();
        let err_both = nrmse(&y, &both).unwrap();
        for j in 0..2 {
            let single = fit_additive(&d, &[j]).unwrap().predict(d.predictors()).unwrap();
            assert!(err_both < nrmse(&y, &single).unwrap());
        }
    }

    #[test]
    fn residuals_have_zero_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200;
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|i| cols[0][i].powi(2) - cols[1][i] + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d = dataset(cols, y.clone());
        let m = AdditiveModel::fit(&d).unwrap();
        let pred = m.predict(d.predictors()).unwrap();
        let resid: Vec<f64> = y.iter().zip(&pred).map(|(a, b)| a - b).collect();
        assert!(stats::mean(&resid).abs() < 1e-8 * stats::sample_sd(&y));
        for c in m.components() {
            let f = c.spline.evaluate_many(d.predictors().column_by_name(&c.variable).unwrap());
            assert!(stats::mean(&f).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_clamp_and_missing_column() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let d = dataset(vec![x], y);
        let m = AdditiveModel::fit(&d).unwrap();
        let probe = Frame::new(vec!["x1".into()], vec![vec![1.0, 7.0]]).unwrap();
        let p = m.predict(&probe).unwrap();
        assert_eq!(p[0], p[1]);
        assert!((p[0] - 2.0).abs() < 1e-6);
        let wrong = Frame::new(vec!["z".into()], vec![vec![1.0]]).unwrap();
        assert!(matches!(m.predict(&wrong), Err(NvsdError::Schema(_))));
    }

    #[test]
    fn needs_variables_and_rows() {
        let d = dataset(vec![], vec![1.0, 2.0, 3.0]);
        assert!(matches!(AdditiveModel::fit(&d), Err(NvsdError::Fit(_))));
        let d = dataset(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![1.0, 2.0, 3.0, 5.0]);
        assert!(AdditiveModel::fit(&d).is_err());
    }

    #[test]
    fn text_format_round_trips_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 60;
        let cols: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|i| cols[0][i].sin() + cols[1][i] / 3.0).collect();
        let names = vec!["first var".to_string(), "x2".to_string()];
        let d = Dataset::new(Frame::new(names.clone(), cols).unwrap(), y, "y").unwrap();
        let m = AdditiveModel::fit(&d).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("nvsd-additive-model 1\n"));
        let back = AdditiveModel::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.predict(d.predictors()).unwrap(), m.predict(d.predictors()).unwrap());
        assert_eq!(back.variables(), vec!["first var", "x2"]);
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(AdditiveModel::from_text("").is_err());
        assert!(AdditiveModel::from_text("nvsd-additive-model 2\nintercept 1\ncomponents 0\n").is_err());
        assert!(AdditiveModel::from_text("nvsd-additive-model 1\nintercept x\ncomponents 0\n").is_err());
        let ok = AdditiveModel::from_text("nvsd-additive-model 1\nintercept 1.5\ncomponents 0\n").unwrap();
        let rows = Frame::new(vec!["a".into()], vec![vec![0.0, 1.0]]).unwrap();
        assert_eq!(ok.predict(&rows).unwrap(), vec![1.5, 1.5]);
    }
}
