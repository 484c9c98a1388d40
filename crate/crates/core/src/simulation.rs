//! Sparse additive simulation scheme, the NRMSE metric and the benchmark
//! driver built on them.
//!
//! Generation follows four steps: fix `(q, p, n)`; draw correlated
//! multivariate normal predictors (optionally mapped to uniform marginals);
//! pick `q` true predictors and give each a random link function and
//! coefficient; add Gaussian noise.

use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Frame};
use crate::error::{NvsdError, Result};
use crate::predictor::AdditiveModel;
use crate::selector::{choose_k_by_cv, select_variables, SelectionConfig};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkFamily {
    Linear,
    Absolute,
    Sine,
    Sawtooth,
    Box,
}

impl LinkFamily {
    pub const ALL: [LinkFamily; 5] = [
        LinkFamily::Linear,
        LinkFamily::Absolute,
        LinkFamily::Sine,
        LinkFamily::Sawtooth,
        LinkFamily::Box,
    ];
}

/// Shape of one true predictor's contribution. Periodic families use
/// `period` (default 2): `sine(z) = sin(2 pi z / period)`,
/// `sawtooth(z) = 2 (z/period - floor(z/period + 1/2))`,
/// `box(z) = sign(sin(2 pi z / period))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkFunction {
    pub family: LinkFamily,
    #[serde(default = "default_period")]
    pub period: f64,
}

fn default_period() -> f64 {
    2.0
}

impl LinkFunction {
    pub fn new(family: LinkFamily) -> Self {
        Self {
            family,
            period: default_period(),
        }
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        let phase = z / self.period;
        match self.family {
            LinkFamily::Linear => z,
            LinkFamily::Absolute => z.abs(),
            LinkFamily::Sine => (std::f64::consts::TAU * phase).sin(),
            LinkFamily::Sawtooth => 2.0 * (phase - (phase + 0.5).floor()),
            LinkFamily::Box => {
                let s = (std::f64::consts::TAU * phase).sin();
                if s > 0.0 {
                    1.0
                } else if s < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// A link function with its signed coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    #[serde(flatten)]
    pub function: LinkFunction,
    pub coefficient: f64,
}

/// Draws `q` links: linear with probability 1/2, each other family with
/// probability 1/8; `|beta| ~ U[1, 3]` with a random sign.
pub fn draw_links<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Vec<Link> {
    let beta = Uniform::new_inclusive(1.0, 3.0).expect("valid range");
    (0..q)
        .map(|_| {
            let u: f64 = rng.random();
            let family = if u < 0.5 {
                LinkFamily::Linear
            } else {
                LinkFamily::ALL[1 + ((u - 0.5) * 8.0).floor().min(3.0) as usize]
            };
            let magnitude = beta.sample(rng);
            let coefficient = if rng.random_bool(0.5) { -magnitude } else { magnitude };
            Link {
                function: LinkFunction::new(family),
                coefficient,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorrelationSource {
    Identity,
    /// `corr(x_i, x_j) = rho^|i - j|`.
    Ar1 { rho: f64 },
    /// `p x p` matrix in a delimited text file without header.
    File { path: PathBuf },
    /// Inline matrix, row-major.
    Matrix { rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marginal {
    Normal,
    /// Normal draws mapped through the standard normal CDF.
    Uniform,
}

impl Marginal {
    /// Standardizes a predictor value to mean 0 and unit variance under the
    /// marginal; links are evaluated on this scale.
    pub fn standardize(&self, x: f64) -> f64 {
        match self {
            Marginal::Normal => x,
            Marginal::Uniform => (x - 0.5) * 12f64.sqrt(),
        }
    }
}

/// Full description of one simulation cell. Human-editable as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub q: usize,
    pub p: usize,
    pub n: usize,
    pub sigma: f64,
    #[serde(default = "default_correlation")]
    pub correlation: CorrelationSource,
    #[serde(default = "default_marginal")]
    pub marginal: Marginal,
    /// Fixed links for the `q` true predictors; drawn at random when absent.
    #[serde(default)]
    pub links: Option<Vec<Link>>,
    #[serde(default)]
    pub seed: u64,
}

fn default_correlation() -> CorrelationSource {
    CorrelationSource::Identity
}

fn default_marginal() -> Marginal {
    Marginal::Uniform
}

impl SimulationSpec {
    pub fn new(q: usize, p: usize, n: usize, sigma: f64, seed: u64) -> Self {
        Self {
            q,
            p,
            n,
            sigma,
            correlation: CorrelationSource::Identity,
            marginal: Marginal::Uniform,
            links: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || self.q > self.p {
            return Err(NvsdError::Config(format!(
                "need 1 <= q <= p, got q = {}, p = {}",
                self.q, self.p
            )));
        }
        if self.n < 3 {
            return Err(NvsdError::Config(format!("need n >= 3, got {}", self.n)));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(NvsdError::Config(format!("invalid noise sd {}", self.sigma)));
        }
        if let Some(links) = &self.links {
            if links.len() != self.q {
                return Err(NvsdError::Config(format!(
                    "{} links given for q = {}",
                    links.len(),
                    self.q
                )));
            }
        }
        if let CorrelationSource::Ar1 { rho } = self.correlation {
            if !(rho > -1.0 && rho < 1.0) {
                return Err(NvsdError::Config(format!("AR(1) rho must be in (-1, 1), got {rho}")));
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self =
            toml::from_str(text).map_err(|e| NvsdError::Parse(format!("simulation spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| NvsdError::Parse(format!("simulation spec: {e}")))
    }

    fn correlation_matrix(&self) -> Result<Option<DMatrix<f64>>> {
        let p = self.p;
        let m = match &self.correlation {
            CorrelationSource::Identity => return Ok(None),
            CorrelationSource::Ar1 { rho } => {
                DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
            }
            CorrelationSource::Matrix { rows } => matrix_from_rows(rows)?,
            CorrelationSource::File { path } => {
                matrix_from_rows(&crate::io::read_numeric_matrix(path, b',')?)?
            }
        };
        if m.nrows() != p {
            return Err(NvsdError::Config(format!(
                "correlation matrix is {}x{}, expected {p}x{p}",
                m.nrows(),
                m.ncols()
            )));
        }
        for i in 0..p {
            if (m[(i, i)] - 1.0).abs() > 1e-9 {
                return Err(NvsdError::Config("correlation matrix needs unit diagonal".into()));
            }
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-9 {
                    return Err(NvsdError::Config("correlation matrix is not symmetric".into()));
                }
            }
        }
        Ok(Some(m))
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let p = rows.len();
    if rows.iter().any(|r| r.len() != p) {
        return Err(NvsdError::Config("correlation matrix must be square".into()));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
}

fn predictor_names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{}", j + 1)).collect()
}

/// `n x p` predictors with the spec's correlation and marginal.
pub fn gen_predictors<R: Rng + ?Sized>(spec: &SimulationSpec, rng: &mut R) -> Result<Frame> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let chol = match spec.correlation_matrix()? {
        Some(m) => Some(
            m.cholesky()
                .ok_or_else(|| {
                    NvsdError::Decomposition("correlation matrix is not positive definite".into())
                })?
                .l(),
        ),
        None => None,
    };
    let mut columns = vec![vec![0.0; n]; p];
    let mut z = vec![0.0; p];
    for i in 0..n {
        z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        for j in 0..p {
            let v = match &chol {
                Some(l) => (0..=j).map(|k| l[(j, k)] * z[k]).sum(),
                None => z[j],
            };
            columns[j][i] = match spec.marginal {
                Marginal::Normal => v,
                Marginal::Uniform => stats::standard_normal_cdf(v),
            };
        }
    }
    Frame::new(predictor_names(p), columns)
}

/// `y_i = sum_k beta_k f_k(z_{i, t_k}) + eps_i`, `z` the standardized
/// predictor and `t_k` the true columns.
pub fn gen_outcome<R: Rng + ?Sized>(
    x: &Frame,
    true_vars: &[usize],
    links: &[Link],
    marginal: Marginal,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if true_vars.len() != links.len() {
        return Err(NvsdError::Config(format!(
            "{} true predictors but {} links",
            true_vars.len(),
            links.len()
        )));
    }
    if let Some(&j) = true_vars.iter().find(|&&j| j >= x.n_cols()) {
        return Err(NvsdError::Config(format!("true predictor {j} out of range")));
    }
    let noise = Normal::new(0.0, sigma).map_err(|e| NvsdError::Config(e.to_string()))?;
    Ok((0..x.n_rows())
        .map(|i| {
            let signal: f64 = true_vars
                .iter()
                .zip(links)
                .map(|(&j, l)| l.coefficient * l.function.evaluate(marginal.standardize(x.column(j)[i])))
                .sum();
            let eps = if sigma > 0.0 { noise.sample(rng) } else { 0.0 };
            signal + eps
        })
        .collect())
}

/// One generated dataset with its ground truth.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub dataset: Dataset,
    /// Sorted column indices of the true predictors.
    pub true_vars: Vec<usize>,
    /// Links aligned with `true_vars`.
    pub links: Vec<Link>,
}

pub fn simulate(spec: &SimulationSpec) -> Result<SimulatedData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let x = gen_predictors(spec, &mut rng)?;
    let mut true_vars = index::sample(&mut rng, spec.p, spec.q).into_vec();
    true_vars.sort_unstable();
    let links = match &spec.links {
        Some(l) => l.clone(),
        None => draw_links(spec.q, &mut rng),
    };
    let y = gen_outcome(&x, &true_vars, &links, spec.marginal, spec.sigma, &mut rng)?;
    Ok(SimulatedData {
        dataset: Dataset::new(x, y, "y")?,
        true_vars,
        links,
    })
}

/// Root mean squared error divided by the interquartile range of `y_true`.
pub fn nrmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(NvsdError::InvalidSample(format!(
            "{} observations but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.len() < 2 {
        return Err(NvsdError::InvalidSample("need at least 2 observations".into()));
    }
    let spread = stats::iqr(y_true);
    if !(spread > 0.0) {
        return Err(NvsdError::DegenerateResponse("interquartile range is zero".into()));
    }
    let mse = y_true
        .iter()
        .zip(y_pred)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / y_true.len() as f64;
    Ok(mse.sqrt() / spread)
}

/// Outcome of the full pipeline on one train/test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    /// Selected variables, in selection order.
    pub selected: Vec<usize>,
    /// Leading selected variables kept by cross-validation.
    pub k: usize,
    pub nrmse: f64,
    /// NRMSE of predicting the training mean.
    pub baseline_nrmse: f64,
}

/// Select on `train`, pick `k` by 5-fold CV, fit the additive predictor on
/// the top `k` and score it on `test`.
pub fn train_and_evaluate(
    train: &Dataset,
    test: &Dataset,
    cfg: &SelectionConfig,
    folds: usize,
) -> Result<PipelineResult> {
    let trace = select_variables(train, cfg)?;
    let baseline = vec![stats::mean(train.response()); test.n()];
    let baseline_nrmse = nrmse(test.response(), &baseline)?;
    let (k, model) = if trace.selected.is_empty() {
        (0, AdditiveModel::intercept_only(stats::mean(train.response())))
    } else {
        let k = choose_k_by_cv(train, &trace.selected, folds, stats::derive_seed(cfg.seed, 0xC5))?;
        (k, AdditiveModel::fit(&train.select_columns(&trace.selected[..k]))?)
    };
    let pred = model.predict(test.predictors())?;
    Ok(PipelineResult {
        selected: trace.selected,
        k,
        nrmse: nrmse(test.response(), &pred)?,
        baseline_nrmse,
    })
}

/// Random 1:1 split of row indices into (train, test).
pub fn split_half(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = idx.split_off(n / 2);
    (idx, test)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub q: usize,
    pub p: usize,
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub selected: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub k: usize,
    pub nrmse: f64,
    pub baseline_nrmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    pub q: usize,
    pub p: usize,
    pub n: usize,
    pub replicates: usize,
    pub mean_nrmse: f64,
    pub sd_nrmse: f64,
    pub mean_baseline_nrmse: f64,
    pub mean_true_positives: f64,
    pub mean_false_positives: f64,
    /// Fraction of replicates in which every true predictor was selected.
    pub full_recovery_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<ReplicateResult>,
    pub summary: BenchmarkSummary,
}

/// Runs `replicates` independent simulate/split/select/predict cycles.
/// Replicate `r` uses seed `derive_seed(spec.seed, r)` for data and
/// selection alike.
pub fn run_benchmark(
    spec: &SimulationSpec,
    cfg: &SelectionConfig,
    replicates: usize,
) -> Result<BenchmarkReport> {
    spec.validate()?;
    cfg.validate()?;
    if replicates == 0 {
        return Err(NvsdError::Config("need at least one replicate".into()));
    }
    let rows: Vec<ReplicateResult> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let seed = stats::derive_seed(spec.seed, r as u64);
            let sim = simulate(&SimulationSpec {
                seed,
                ..spec.clone()
            })?;
            let (train_idx, test_idx) = split_half(spec.n, stats::derive_seed(seed, 1));
            let train = sim.dataset.subset_rows(&train_idx)?;
            let test = sim.dataset.subset_rows(&test_idx)?;
            let run_cfg = SelectionConfig {
                seed: stats::derive_seed(seed, 2),
                ..cfg.clone()
            };
            let res = train_and_evaluate(&train, &test, &run_cfg, 5)?;
            let tp = res.selected.iter().filter(|j| sim.true_vars.contains(j)).count();
            Ok(ReplicateResult {
                q: spec.q,
                p: spec.p,
                n: spec.n,
                replicate: r,
                seed,
                selected: res.selected.len(),
                true_positives: tp,
                false_positives: res.selected.len() - tp,
                k: res.k,
                nrmse: res.nrmse,
                baseline_nrmse: res.baseline_nrmse,
            })
        })
        .collect::<Result<_>>()?;
    let nrmses: Vec<f64> = rows.iter().map(|r| r.nrmse).collect();
    let mean_of = |f: &dyn Fn(&ReplicateResult) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    let summary = BenchmarkSummary {
        q: spec.q,
        p: spec.p,
        n: spec.n,
        replicates,
        mean_nrmse: stats::mean(&nrmses),
        sd_nrmse: stats::sample_sd(&nrmses),
        mean_baseline_nrmse: mean_of(&|r| r.baseline_nrmse),
        mean_true_positives: mean_of(&|r| r.true_positives as f64),
        mean_false_positives: mean_of(&|r| r.false_positives as f64),
        full_recovery_rate: mean_of(&|r| if r.true_positives == spec.q { 1.0 } else { 0.0 }),
    };
    Ok(BenchmarkReport { rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_shapes() {
        let saw = LinkFunction::new(LinkFamily::Sawtooth);
        assert_eq!(saw.evaluate(0.5), 0.5);
        assert_eq!(saw.evaluate(1.5), -0.5);
        assert_eq!(saw.evaluate(-0.5), -0.5);
        let bx = LinkFunction::new(LinkFamily::Box);
        assert_eq!(bx.evaluate(0.5), 1.0);
        assert_eq!(bx.evaluate(1.5), -1.0);
        let sine = LinkFunction::new(LinkFamily::Sine);
        assert!((sine.evaluate(0.5) - 1.0).abs() < 1e-12);
        assert_eq!(LinkFunction::new(LinkFamily::Absolute).evaluate(-2.0), 2.0);
    }

    #[test]
    fn link_draw_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let links = draw_links(100_000, &mut rng);
        let n = links.len() as f64;
        for (family, want) in LinkFamily::ALL.iter().zip([0.5, 0.125, 0.125, 0.125, 0.125]) {
            let got = links.iter().filter(|l| l.function.family == *family).count() as f64 / n;
            assert!((got - want).abs() < 0.01, "{family:?}: {got}");
        }
        assert!(links.iter().all(|l| (1.0..=3.0).contains(&l.coefficient.abs())));
        let neg = links.iter().filter(|l| l.coefficient < 0.0).count() as f64 / n;
        assert!((neg - 0.5).abs() < 0.01);
    }

    #[test]
    fn noiseless_linear_outcome() {
        let spec = SimulationSpec {
            marginal: Marginal::Normal,
            ..SimulationSpec::new(1, 3, 50, 0.0, 5)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = gen_predictors(&spec, &mut rng).unwrap();
        let link = Link {
            function: LinkFunction::new(LinkFamily::Linear),
            coefficient: 2.0,
        };
        let y = gen_outcome(&x, &[1], &[link], spec.marginal, 0.0, &mut rng).unwrap();
        for (a, b) in y.iter().zip(x.column(1)) {
            assert_eq!(*a, 2.0 * b);
        }
    }

    #[test]
    fn noiseless_outcome_is_a_function_of_x() {
        let spec = SimulationSpec::new(3, 6, 40, 0.0, 8);
        let a = simulate(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let again = gen_outcome(
            a.dataset.predictors(),
            &a.true_vars,
            &a.links,
            spec.marginal,
            0.0,
            &mut rng,
        )
        .unwrap();
        assert_eq!(again, a.dataset.response());
    }

    #[test]
    fn nrmse_values() {
        let y = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(nrmse(&y, &y).unwrap(), 0.0);
        let shifted: Vec<f64> = y.iter().map(|v| v + 1.0).collect();
        assert!((nrmse(&y, &shifted).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            nrmse(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(NvsdError::DegenerateResponse(_))
        ));
        assert!(nrmse(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn spec_validation_and_toml() {
        assert!(SimulationSpec::new(0, 5, 10, 1.0, 0).validate().is_err());
        assert!(SimulationSpec::new(6, 5, 10, 1.0, 0).validate().is_err());
        let spec = SimulationSpec {
            correlation: CorrelationSource::Ar1 { rho: 0.4 },
            links: Some(vec![Link {
                function: LinkFunction::new(LinkFamily::Sine),
                coefficient: -1.5,
            }]),
            ..SimulationSpec::new(1, 4, 30, 0.5, 3)
        };
        let text = spec.to_toml().unwrap();
        assert_eq!(SimulationSpec::from_toml(&text).unwrap(), spec);
        let minimal = SimulationSpec::from_toml("q = 2\np = 10\nn = 100\nsigma = 1.0\n").unwrap();
        assert_eq!(minimal.marginal, Marginal::Uniform);
        assert_eq!(minimal.correlation, CorrelationSource::Identity);
    }

    #[test]
    fn non_pd_matrix_is_rejected() {
        let spec = SimulationSpec {
            correlation: CorrelationSource::Matrix {
                rows: vec![vec![1.0, 0.9, 0.9], vec![0.9, 1.0, -0.9], vec![0.9, -0.9, 1.0]],
            },
            ..SimulationSpec::new(1, 3, 10, 1.0, 0)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            gen_predictors(&spec, &mut rng),
            Err(NvsdError::Decomposition(_))
        ));
    }

    #[test]
    fn split_is_half_and_disjoint() {
        let (a, b) = split_half(11, 3);
        assert_eq!(a.len(), 5);
        assert_eq!(b.len(), 6);
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..11).collect::<Vec<_>>());
    }
}
