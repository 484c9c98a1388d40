//! Cubic smoothing spline with the penalty chosen by generalized
//! cross-validation.
//!
//! The fit minimizes `sum w_k (ybar_k - g(t_k))^2 + lambda * int g''(t)^2 dt`
//! over natural cubic splines with knots at the distinct abscissae `t_k`
//! (tied `x` values are collapsed into one weighted knot). The solution uses
//! the Reinsch formulation: with `Q` the `K x (K-2)` second-difference matrix
//! and `R` the `(K-2) x (K-2)` tridiagonal Gram matrix,
//!
//! ```text
//! (R + lambda Q' W^-1 Q) gamma = Q' ybar
//! g = ybar - lambda W^-1 Q gamma
//! ```
//!
//! `gamma` holds the second derivatives at the interior knots. The system is
//! pentadiagonal, so each fit is O(K), and the hat-matrix trace needed by GCV
//! comes from the band of the inverse (Hutchinson & de Hoog recursion).

use serde::{Deserialize, Serialize};

use crate::assoc::{sort_order, SortedSample};
use crate::error::{NvsdError, Result};

/// How the roughness penalty is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherSpec {
    /// Minimize the GCV score over the penalty.
    #[default]
    Gcv,
    /// Fixed penalty, expressed for abscissae rescaled to `[0, 1]`.
    Lambda(f64),
}

/// Minimum number of observations accepted by [`SmoothingSpline::fit`].
pub const MIN_POINTS: usize = 4;

/// A fitted natural cubic spline.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
    lambda: f64,
    edf: f64,
}

/// Collapsed data: distinct abscissae with counts, means and the
/// within-knot residual sum of squares.
struct Knots {
    t: Vec<f64>,
    w: Vec<f64>,
    ybar: Vec<f64>,
    within_ss: f64,
    n: usize,
}

impl Knots {
    fn collapse(x: &[f64], y: &[f64]) -> Self {
        let order = sort_order(x);
        let mut t = Vec::new();
        let mut w: Vec<f64> = Vec::new();
        let mut sums: Vec<f64> = Vec::new();
        for &i in &order {
            if t.last() == Some(&x[i]) {
                *w.last_mut().unwrap() += 1.0;
                *sums.last_mut().unwrap() += y[i];
            } else {
                t.push(x[i]);
                w.push(1.0);
                sums.push(y[i]);
            }
        }
        let ybar: Vec<f64> = sums.iter().zip(&w).map(|(s, c)| s / c).collect();
        let mut within_ss = 0.0;
        let mut k = 0;
        for (pos, &i) in order.iter().enumerate() {
            if pos > 0 && x[i] != x[order[pos - 1]] {
                k += 1;
            }
            within_ss += (y[i] - ybar[k]).powi(2);
        }
        Self {
            t,
            w,
            ybar,
            within_ss,
            n: x.len(),
        }
    }
}

/// Banded pieces of the Reinsch system on rescaled abscissae.
struct System {
    /// `q[a] = [Q(a,a), Q(a+1,a), Q(a+2,a)]`
    q: Vec<[f64; 3]>,
    r_diag: Vec<f64>,
    r_off: Vec<f64>,
    /// `Q' W^-1 Q` band: diagonal, first and second super-diagonals.
    m0: Vec<f64>,
    m1: Vec<f64>,
    m2: Vec<f64>,
    qty: Vec<f64>,
}

impl System {
    fn build(u: &[f64], w: &[f64], ybar: &[f64]) -> Self {
        let k = u.len();
        let m = k - 2;
        let h: Vec<f64> = u.windows(2).map(|p| p[1] - p[0]).collect();
        let q: Vec<[f64; 3]> = (0..m)
            .map(|a| [1.0 / h[a], -1.0 / h[a] - 1.0 / h[a + 1], 1.0 / h[a + 1]])
            .collect();
        let r_diag = (0..m).map(|a| (h[a] + h[a + 1]) / 3.0).collect();
        let r_off = (0..m.saturating_sub(1)).map(|a| h[a + 1] / 3.0).collect();
        let mut m0 = vec![0.0; m];
        let mut m1 = vec![0.0; m.saturating_sub(1)];
        let mut m2 = vec![0.0; m.saturating_sub(2)];
        for a in 0..m {
            m0[a] = (0..3).map(|r| q[a][r] * q[a][r] / w[a + r]).sum();
            if a + 1 < m {
                // shared rows a+1, a+2
                m1[a] = q[a][1] * q[a + 1][0] / w[a + 1] + q[a][2] * q[a + 1][1] / w[a + 2];
            }
            if a + 2 < m {
                m2[a] = q[a][2] * q[a + 2][0] / w[a + 2];
            }
        }
        let qty = (0..m)
            .map(|a| (0..3).map(|r| q[a][r] * ybar[a + r]).sum())
            .collect();
        Self {
            q,
            r_diag,
            r_off,
            m0,
            m1,
            m2,
            qty,
        }
    }

    fn dim(&self) -> usize {
        self.r_diag.len()
    }

    /// `Q gamma` at knot `k`.
    fn q_times(&self, gamma: &[f64], k: usize) -> f64 {
        let m = self.dim();
        (0..3)
            .filter_map(|r| {
                let a = k.checked_sub(r)?;
                (a < m).then(|| self.q[a][r] * gamma[a])
            })
            .sum()
    }
}

/// LDL' factorization of a symmetric pentadiagonal matrix.
struct BandLdl {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl BandLdl {
    fn factor(b0: &[f64], b1: &[f64], b2: &[f64]) -> Result<Self> {
        let m = b0.len();
        let mut d = vec![0.0; m];
        let mut l1 = vec![0.0; m.saturating_sub(1)];
        let mut l2 = vec![0.0; m.saturating_sub(2)];
        for i in 0..m {
            let mut di = b0[i];
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !(di > 0.0) || !di.is_finite() {
                return Err(NvsdError::Fit("penalized system is not positive definite".into()));
            }
            d[i] = di;
            if i + 1 < m {
                let mut v = b1[i];
                if i >= 1 {
                    v -= l2[i - 1] * d[i - 1] * l1[i - 1];
                }
                l1[i] = v / di;
            }
            if i + 2 < m {
                l2[i] = b2[i] / di;
            }
        }
        Ok(Self { d, l1, l2 })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.d.len();
        let mut z = rhs.to_vec();
        for i in 0..m {
            if i >= 1 {
                z[i] -= self.l1[i - 1] * z[i - 1];
            }
            if i >= 2 {
                z[i] -= self.l2[i - 2] * z[i - 2];
            }
        }
        for i in 0..m {
            z[i] /= self.d[i];
        }
        for i in (0..m).rev() {
            if i + 1 < m {
                z[i] -= self.l1[i] * z[i + 1];
            }
            if i + 2 < m {
                z[i] -= self.l2[i] * z[i + 2];
            }
        }
        z
    }

    /// Entries of the inverse within the band: `(s0, s1, s2)` hold
    /// `S(i,i)`, `S(i,i+1)` and `S(i,i+2)`.
    fn inverse_band(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = self.d.len();
        let mut s0 = vec![0.0; m];
        let mut s1 = vec![0.0; m];
        let mut s2 = vec![0.0; m];
        let l1 = |i: usize| if i + 1 < m { self.l1[i] } else { 0.0 };
        let l2 = |i: usize| if i + 2 < m { self.l2[i] } else { 0.0 };
        for i in (0..m).rev() {
            let s11 = if i + 1 < m { s0[i + 1] } else { 0.0 };
            let s12 = if i + 1 < m { s1[i + 1] } else { 0.0 };
            let s22 = if i + 2 < m { s0[i + 2] } else { 0.0 };
            s2[i] = -l1(i) * s12 - l2(i) * s22;
            s1[i] = -l1(i) * s11 - l2(i) * s12;
            s0[i] = 1.0 / self.d[i] - l1(i) * s1[i] - l2(i) * s2[i];
        }
        (s0, s1, s2)
    }
}

/// Result of one penalized solve.
struct Solution {
    g: Vec<f64>,
    gamma: Vec<f64>,
    edf: f64,
    rss: f64,
}

fn solve_at(sys: &System, knots: &Knots, lambda: f64, want_trace: bool) -> Result<Solution> {
    let m = sys.dim();
    let b0: Vec<f64> = (0..m).map(|i| sys.r_diag[i] + lambda * sys.m0[i]).collect();
    let b1: Vec<f64> = (0..m.saturating_sub(1))
        .map(|i| sys.r_off[i] + lambda * sys.m1[i])
        .collect();
    let b2: Vec<f64> = sys.m2.iter().map(|v| lambda * v).collect();
    let ldl = BandLdl::factor(&b0, &b1, &b2)?;
    let gamma = ldl.solve(&sys.qty);
    let k = knots.t.len();
    let g: Vec<f64> = (0..k)
        .map(|i| knots.ybar[i] - lambda * sys.q_times(&gamma, i) / knots.w[i])
        .collect();
    let rss = knots.within_ss
        + (0..k)
            .map(|i| knots.w[i] * (knots.ybar[i] - g[i]).powi(2))
            .sum::<f64>();
    let mut edf = f64::NAN;
    if want_trace {
        let (s0, s1, s2) = ldl.inverse_band();
        let s = |a: usize, b: usize| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            match hi - lo {
                0 => s0[lo],
                1 => s1[lo],
                2 => s2[lo],
                _ => unreachable!("outside band"),
            }
        };
        edf = 0.0;
        for kk in 0..k {
            let cols: Vec<(usize, f64)> = (0..3)
                .filter_map(|r| {
                    let a = kk.checked_sub(r)?;
                    (a < m).then(|| (a, sys.q[a][r]))
                })
                .collect();
            let mut quad = 0.0;
            for &(a, qa) in &cols {
                for &(b, qb) in &cols {
                    quad += qa * s(a, b) * qb;
                }
            }
            edf += 1.0 - lambda * quad / knots.w[kk];
        }
    }
    Ok(Solution {
        g,
        gamma,
        edf,
        rss,
    })
}

fn gcv_score(sol: &Solution, n: usize) -> f64 {
    let n = n as f64;
    let denom = n - sol.edf;
    if denom <= 1e-8 * n {
        return f64::INFINITY;
    }
    n * sol.rss / (denom * denom)
}

/// Grid search on `log10(lambda)` followed by golden-section refinement.
fn choose_lambda(sys: &System, knots: &Knots) -> Result<f64> {
    let n = knots.n as f64;
    let lo = n.log10() - 4.0 * (std::f64::consts::PI * n).log10() - 1.0;
    let hi = n.log10() + 4.0;
    let steps = 60;
    let step = (hi - lo) / steps as f64;
    let eval = |s: f64| -> Result<f64> {
        Ok(gcv_score(&solve_at(sys, knots, 10f64.powf(s), true)?, knots.n))
    };
    let mut best = (f64::INFINITY, lo);
    for i in 0..=steps {
        let s = lo + step * i as f64;
        let v = eval(s)?;
        if v < best.0 {
            best = (v, s);
        }
    }
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..40 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d)?;
        }
    }
    let refined = if fc <= fd { (fc, c) } else { (fd, d) };
    let s = if refined.0 <= best.0 { refined.1 } else { best.1 };
    Ok(10f64.powf(s))
}

impl SmoothingSpline {
    /// Fits a smoothing spline to `(x, y)`; `x` need not be sorted.
    pub fn fit(x: &[f64], y: &[f64], spec: SmootherSpec) -> Result<Self> {
        if x.len() != y.len() {
            return Err(NvsdError::Fit(format!(
                "x has {} values but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < MIN_POINTS {
            return Err(NvsdError::Fit(format!(
                "smoothing spline needs at least {MIN_POINTS} points, got {}",
                x.len()
            )));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(NvsdError::Fit("non-finite input".into()));
        }
        if let SmootherSpec::Lambda(l) = spec {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(NvsdError::Fit(format!("invalid penalty {l}")));
            }
        }
        let knots = Knots::collapse(x, y);
        let k = knots.t.len();
        match k {
            1 => {
                return Ok(Self {
                    knots: knots.t.clone(),
                    values: knots.ybar.clone(),
                    second: vec![0.0],
                    lambda: f64::INFINITY,
                    edf: 1.0,
                })
            }
            2 => {
                // a natural spline on two knots is the line through them
                return Ok(Self {
                    knots: knots.t.clone(),
                    values: knots.ybar.clone(),
                    second: vec![0.0; 2],
                    lambda: 0.0,
                    edf: 2.0,
                });
            }
            _ => {}
        }
        let origin = knots.t[0];
        let range = knots.t[k - 1] - origin;
        let u: Vec<f64> = knots.t.iter().map(|t| (t - origin) / range).collect();
        let sys = System::build(&u, &knots.w, &knots.ybar);
        let lambda = match spec {
            SmootherSpec::Gcv => choose_lambda(&sys, &knots)?,
            SmootherSpec::Lambda(l) => l,
        };
        let sol = solve_at(&sys, &knots, lambda, true)?;
        let scale = range * range;
        let mut second = Vec::with_capacity(k);
        second.push(0.0);
        second.extend(sol.gamma.iter().map(|g| g / scale));
        second.push(0.0);
        Ok(Self {
            knots: knots.t,
            values: sol.g,
            second,
            lambda,
            edf: sol.edf,
        })
    }

    /// Rebuilds a spline from stored knots, knot values and second
    /// derivatives (natural boundary: first and last second derivative 0).
    pub fn from_parts(knots: Vec<f64>, values: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() || knots.len() != second.len() {
            return Err(NvsdError::Parse("spline arrays must be non-empty and equal length".into()));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(NvsdError::Parse("spline knots must be strictly increasing".into()));
        }
        if knots.iter().chain(&values).chain(&second).any(|v| !v.is_finite()) {
            return Err(NvsdError::Parse("non-finite spline coefficient".into()));
        }
        Ok(Self {
            knots,
            values,
            second,
            lambda: f64::NAN,
            edf: f64::NAN,
        })
    }

    /// Value at `t`. Outside the knot range the boundary value is returned.
    pub fn evaluate(&self, t: f64) -> f64 {
        let k = self.knots.len();
        if k == 1 || t <= self.knots[0] {
            return self.values[0];
        }
        if t >= self.knots[k - 1] {
            return self.values[k - 1];
        }
        let i = self.knots.partition_point(|&v| v <= t) - 1;
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let (a, b) = (t - t0, t1 - t);
        let linear = (a * self.values[i + 1] + b * self.values[i]) / h;
        linear
            - a * b / 6.0
                * ((1.0 + a / h) * self.second[i + 1] + (1.0 + b / h) * self.second[i])
    }

    pub fn evaluate_many(&self, t: &[f64]) -> Vec<f64> {
        t.iter().map(|&v| self.evaluate(v)).collect()
    }

    /// Subtracts a constant from the fitted curve.
    pub fn shift(&mut self, offset: f64) {
        self.values.iter_mut().for_each(|v| *v -= offset);
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.second
    }

    /// Penalty on the `[0, 1]`-rescaled abscissae.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Trace of the smoother matrix.
    pub fn edf(&self) -> f64 {
        self.edf
    }
}

/// Fitted values of the smoother at every point of a sorted sample.
pub fn fit_smoother(s: &SortedSample, spec: SmootherSpec) -> Result<Vec<f64>> {
    let spline = SmoothingSpline::fit(s.x(), s.y(), spec)?;
    Ok(spline.evaluate_many(s.x()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assoc::{sort_pairs, PairedSample};
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    /// Dense reference solve of `(W + lambda Q R^-1 Q') g = W ybar` and the
    /// trace of its hat matrix.
    fn dense_reference(u: &[f64], w: &[f64], ybar: &[f64], lambda: f64) -> (Vec<f64>, f64) {
        let k = u.len();
        let h: Vec<f64> = u.windows(2).map(|p| p[1] - p[0]).collect();
        let mut q = DMatrix::<f64>::zeros(k, k - 2);
        let mut r = DMatrix::<f64>::zeros(k - 2, k - 2);
        for j in 0..k - 2 {
            q[(j, j)] = 1.0 / h[j];
            q[(j + 1, j)] = -1.0 / h[j] - 1.0 / h[j + 1];
            q[(j + 2, j)] = 1.0 / h[j + 1];
            r[(j, j)] = (h[j] + h[j + 1]) / 3.0;
            if j + 1 < k - 2 {
                r[(j, j + 1)] = h[j + 1] / 3.0;
                r[(j + 1, j)] = h[j + 1] / 3.0;
            }
        }
        let penalty = &q * r.try_inverse().unwrap() * q.transpose();
        let wm = DMatrix::from_diagonal(&DVector::from_column_slice(w));
        let sys = &wm + penalty * lambda;
        let inv = sys.try_inverse().unwrap();
        let hat = &inv * &wm;
        let g = &hat * DVector::from_column_slice(ybar);
        (g.iter().copied().collect(), hat.trace())
    }

    #[test]
    fn banded_solve_matches_dense_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut u: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        u.sort_by(f64::total_cmp);
        let (lo, hi) = (u[0], u[24]);
        u.iter_mut().for_each(|v| *v = (*v - lo) / (hi - lo));
        let w: Vec<f64> = (0..25).map(|i| 1.0 + (i % 3) as f64).collect();
        let ybar: Vec<f64> = u.iter().map(|v| (5.0 * v).sin() + rng.random::<f64>()).collect();
        let knots = Knots {
            t: u.clone(),
            w: w.clone(),
            ybar: ybar.clone(),
            within_ss: 0.0,
            n: w.iter().sum::<f64>() as usize,
        };
        let sys = System::build(&u, &w, &ybar);
        for &lambda in &[1e-6, 1e-3, 0.1, 10.0] {
            let sol = solve_at(&sys, &knots, lambda, true).unwrap();
            let (g_ref, tr_ref) = dense_reference(&u, &w, &ybar, lambda);
            for (a, b) in sol.g.iter().zip(&g_ref) {
                assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "lambda {lambda}: {a} vs {b}");
            }
            assert!((sol.edf - tr_ref).abs() < 1e-6, "trace {} vs {tr_ref}", sol.edf);
        }
    }

    #[test]
    fn reproduces_linear_data() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).powf(1.3)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let s = sort_pairs(&PairedSample::new(x, y.clone()).unwrap());
        let fit = fit_smoother(&s, SmootherSpec::Gcv).unwrap();
        for (a, b) in fit.iter().zip(s.y()) {
            assert!((a - b).abs() < 1e-8);
        }
        let fit = fit_smoother(&s, SmootherSpec::Lambda(1e3)).unwrap();
        for (a, b) in fit.iter().zip(s.y()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_data_stays_constant() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        let s = sort_pairs(&PairedSample::new(x, vec![4.25; 20]).unwrap());
        for v in fit_smoother(&s, SmootherSpec::Gcv).unwrap() {
            assert!((v - 4.25).abs() < 1e-10);
        }
    }

    #[test]
    fn smoothing_reduces_error_to_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let x: Vec<f64> = (0..500).map(|_| rng.random::<f64>() * 6.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin() + noise.sample(&mut rng)).collect();
        let s = sort_pairs(&PairedSample::new(x, y).unwrap());
        let fit = fit_smoother(&s, SmootherSpec::Gcv).unwrap();
        let mse = |v: &[f64]| {
            v.iter()
                .zip(s.x())
                .map(|(a, t)| (a - t.sin()).powi(2))
                .sum::<f64>()
                / v.len() as f64
        };
        assert!(mse(&fit) < mse(s.y()) * 0.5, "{} vs {}", mse(&fit), mse(s.y()));
    }

    #[test]
    fn ties_are_collapsed() {
        let x = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0];
        let y = [1.0, 3.0, 2.0, 2.0, 5.0, 7.0, 4.0];
        let spline = SmoothingSpline::fit(&x, &y, SmootherSpec::Lambda(1e-12)).unwrap();
        assert_eq!(spline.knots(), &[0.0, 1.0, 2.0, 3.0]);
        // essentially interpolates the knot means
        for (got, want) in spline.values().iter().zip([2.0, 2.0, 6.0, 4.0]) {
            assert!((got - want).abs() < 1e-6);
        }
        let gcv = SmoothingSpline::fit(&x, &y, SmootherSpec::Gcv).unwrap();
        assert!(gcv.edf() >= 2.0 - 1e-9 && gcv.edf() <= 4.0 + 1e-9);
    }

    #[test]
    fn two_distinct_values_give_group_means() {
        let x = [0.0, 1.0, 0.0, 1.0, 0.0];
        let y = [1.0, 10.0, 3.0, 12.0, 2.0];
        let spline = SmoothingSpline::fit(&x, &y, SmootherSpec::Gcv).unwrap();
        assert_eq!(spline.evaluate(0.0), 2.0);
        assert_eq!(spline.evaluate(1.0), 11.0);
        assert_eq!(spline.evaluate(0.5), 6.5);
    }

    #[test]
    fn clamps_outside_range() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 / 29.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let spline = SmoothingSpline::fit(&x, &y, SmootherSpec::Gcv).unwrap();
        assert_eq!(spline.evaluate(5.0), spline.evaluate(1.0));
        assert_eq!(spline.evaluate(-5.0), spline.evaluate(0.0));
    }

    #[test]
    fn evaluation_at_knots_matches_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 10.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v.cos() + rng.random::<f64>()).collect();
        let spline = SmoothingSpline::fit(&x, &y, SmootherSpec::Gcv).unwrap();
        for (t, v) in spline.knots().iter().zip(spline.values()) {
            assert!((spline.evaluate(*t) - v).abs() < 1e-10);
        }
        let rebuilt = SmoothingSpline::from_parts(
            spline.knots().to_vec(),
            spline.values().to_vec(),
            spline.second_derivatives().to_vec(),
        )
        .unwrap();
        assert_eq!(rebuilt.evaluate(3.3), spline.evaluate(3.3));
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            SmoothingSpline::fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], SmootherSpec::Gcv),
            Err(NvsdError::Fit(_))
        ));
    }
}
