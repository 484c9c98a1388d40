//! Roughening: the reverse of smoothing.
//!
//! Each step pushes the response away from a smooth fit against the current
//! predictor, damping that predictor's share of the signal relative to the
//! others. Two variants are provided:
//!
//! * DCOL gradient ascent, `y_new = y + theta * grad S` with the `1/(n-2)`
//!   factor absorbed into `theta`;
//! * smoother residual inflation, `y_new = y + theta * (y - y_smooth)`.
//!
//! Both take `y` in predictor order. [`roughen`] handles the reordering and
//! scatters the result back to the original sample order.

use serde::{Deserialize, Serialize};

use crate::assoc::{sort_order, sort_pairs, PairedSample, SortedSample};
use crate::error::{NvsdError, Result};
use crate::smoother::{fit_smoother, SmootherSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RougheningMode {
    /// Step along the gradient of `S_delta` in the chosen predictor's order.
    DcolGradient,
    /// Inflate residuals from a GCV cubic smoothing spline fit.
    #[default]
    Smoother,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougheningConfig {
    theta: f64,
    mode: RougheningMode,
    smoother: SmootherSpec,
}

impl Default for RougheningConfig {
    fn default() -> Self {
        Self {
            theta: Self::DEFAULT_THETA,
            mode: RougheningMode::default(),
            smoother: SmootherSpec::default(),
        }
    }
}

impl RougheningConfig {
    pub const DEFAULT_THETA: f64 = 0.01;

    /// `theta` must lie in `(0, 1]`.
    pub fn new(theta: f64, mode: RougheningMode, smoother: SmootherSpec) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(NvsdError::Config(format!(
                "roughening step must be in (0, 1], got {theta}"
            )));
        }
        Ok(Self {
            theta,
            mode,
            smoother,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mode(&self) -> RougheningMode {
        self.mode
    }

    pub fn smoother(&self) -> SmootherSpec {
        self.smoother
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

/// Gradient of `S` with respect to `y` (in predictor order), including the
/// `1/(n-2)` factor. Components sum to zero.
pub fn grad_s_delta(y_sorted: &[f64]) -> Result<Vec<f64>> {
    let n = y_sorted.len();
    check_len(n)?;
    let c = 1.0 / (n - 2) as f64;
    let y = y_sorted;
    Ok((0..n)
        .map(|i| {
            let v = if i == 0 {
                y[0] - y[1]
            } else if i == n - 1 {
                y[n - 1] - y[n - 2]
            } else {
                2.0 * y[i] - y[i - 1] - y[i + 1]
            };
            c * v
        })
        .collect())
}

/// One DCOL roughening step, written out componentwise:
/// end points `y(1 + theta) - theta * neighbour`, interior points
/// `y(1 + 2 theta) - theta (left + right)`.
pub fn roughen_dcol(y_sorted: &[f64], theta: f64) -> Result<Vec<f64>> {
    let n = y_sorted.len();
    check_len(n)?;
    let y = y_sorted;
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                y[0] * (1.0 + theta) - y[1] * theta
            } else if i == n - 1 {
                y[n - 1] * (1.0 + theta) - y[n - 2] * theta
            } else {
                y[i] * (1.0 + 2.0 * theta) - (y[i - 1] + y[i + 1]) * theta
            }
        })
        .collect())
}

/// `y + theta (y - fitted)`, elementwise.
pub fn inflate_residuals(y: &[f64], fitted: &[f64], theta: f64) -> Vec<f64> {
    y.iter()
        .zip(fitted)
        .map(|(v, f)| v + theta * (v - f))
        .collect()
}

/// One smoother roughening step on a sorted sample.
pub fn roughen_smoother(s: &SortedSample, theta: f64, spec: SmootherSpec) -> Result<Vec<f64>> {
    let fitted = fit_smoother(s, spec)?;
    Ok(inflate_residuals(s.y(), &fitted, theta))
}

/// Roughens `y` against predictor `x`; input and output are in the original
/// sample order.
pub fn roughen(x: &[f64], y: &[f64], cfg: &RougheningConfig) -> Result<Vec<f64>> {
    let order = sort_order(x);
    roughen_with_order(x, y, &order, cfg)
}

/// As [`roughen`], with a precomputed sort order of `x`.
pub(crate) fn roughen_with_order(
    x: &[f64],
    y: &[f64],
    order: &[usize],
    cfg: &RougheningConfig,
) -> Result<Vec<f64>> {
    let y_sorted: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let stepped = match cfg.mode {
        RougheningMode::DcolGradient => roughen_dcol(&y_sorted, cfg.theta)?,
        RougheningMode::Smoother => {
            let x_sorted: Vec<f64> = order.iter().map(|&i| x[i]).collect();
            let s = sort_pairs(&PairedSample::new(x_sorted, y_sorted)?);
            roughen_smoother(&s, cfg.theta, cfg.smoother)?
        }
    };
    let mut out = vec![0.0; y.len()];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = stepped[pos];
    }
    Ok(out)
}
