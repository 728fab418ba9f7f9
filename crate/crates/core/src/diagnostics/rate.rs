use rand::Rng;
use serde::Serialize;

use super::stats::{count_histogram, linear_fit, tv_counts};
use super::DiagnosticsError;
use crate::bd_chain::{SimpleChainSpec, Verdict};
use crate::config_space::Configuration;
use crate::engine::{simulate_with, ModelSpec, SimOptions};
use crate::rng::{keyed, par_map};
use crate::scalar::Scalar;

/// Convergence-rate estimate from two starting configurations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimate {
    pub times: Vec<f64>,
    /// TV between the count laws at each time.
    pub tv: Vec<f64>,
    /// Expected TV of two samples of the same law at each time.
    pub noise_floor: Vec<f64>,
    /// Times used in the log-linear fit.
    pub fitted: Vec<bool>,
    pub slope: f64,
    pub intercept: f64,
    pub r_hat: f64,
    /// Bootstrap percentile interval for `r_hat`.
    pub ci: (f64, f64),
    pub trials: usize,
}

/// Options for [`rate_estimate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateOptions {
    pub bootstrap: usize,
    /// Confidence level of the interval.
    pub level: f64,
    /// Fit only where `tv > floor_multiple × noise floor`.
    pub floor_multiple: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            bootstrap: 200,
            level: 0.95,
            floor_multiple: 5.0,
        }
    }
}

pub fn rate_estimate<S: Scalar>(
    model: &ModelSpec<S>,
    x0: &Configuration<S>,
    y0: &Configuration<S>,
    t_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<RateEstimate, DiagnosticsError> {
    rate_estimate_with(model, x0, y0, t_grid, trials, &RateOptions::default(), seed)
}

/// Runs `trials` paths from each of `x0` and `y0`, measures the TV between
/// the count laws on `t_grid`, and fits `log tv ≈ a + slope · t`.
pub fn rate_estimate_with<S: Scalar>(
    model: &ModelSpec<S>,
    x0: &Configuration<S>,
    y0: &Configuration<S>,
    t_grid: &[f64],
    trials: usize,
    opts: &RateOptions,
    seed: u64,
) -> Result<RateEstimate, DiagnosticsError> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] <= 0.0 {
        return Err(DiagnosticsError::InvalidInput("time grid must be positive and strictly increasing".into()));
    }
    if trials < 2 {
        return Err(DiagnosticsError::InvalidInput("need at least two trials".into()));
    }
    let chain = SimpleChainSpec::dominating(&model.intensities, &model.domain)?;
    let verdict = chain.ergodicity_check(10_000).verdict;
    if !matches!(verdict, Verdict::Eq30 | Verdict::Eq31) {
        return Err(DiagnosticsError::NotErgodic(verdict));
    }
    let horizon = *t_grid.last().expect("non-empty");
    let sim = SimOptions {
        checkpoints: t_grid.to_vec(),
        state_cap: 0,
        record_events: false,
    };
    let counts = |start: &Configuration<S>, s: u64| -> Result<Vec<Vec<usize>>, DiagnosticsError> {
        let runs = par_map(trials, |i| simulate_with(model, start, horizon, &sim, s, i as u64));
        let mut by_time = vec![Vec::with_capacity(trials); t_grid.len()];
        for r in runs {
            for (k, c) in r?.checkpoints.iter().enumerate() {
                by_time[k].push(c.n);
            }
        }
        Ok(by_time)
    };
    let cx = counts(x0, seed)?;
    let cy = counts(y0, seed ^ 0x2545_f491_4f6c_dd1d)?;

    let tv_at = |a: &[usize], b: &[usize]| {
        let bins = a.iter().chain(b).max().copied().unwrap_or(0) + 1;
        tv_counts(&count_histogram(a.iter().copied(), bins), &count_histogram(b.iter().copied(), bins))
    };
    let tv: Vec<f64> = cx.iter().zip(&cy).map(|(a, b)| tv_at(a, b)).collect();
    let noise_floor: Vec<f64> = cx.iter().zip(&cy).map(|(a, b)| noise_floor(a, b)).collect();
    let fitted: Vec<bool> = tv.iter().zip(&noise_floor).map(|(&v, &f)| v > opts.floor_multiple * f && v > 0.0).collect();

    let fit = |tvs: &[f64]| -> Option<(f64, f64)> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = t_grid
            .iter()
            .zip(tvs)
            .zip(&fitted)
            .filter(|&((_, &v), &m)| m && v > 0.0)
            .map(|((&t, &v), _)| (t, v.ln()))
            .unzip();
        (xs.len() >= 2).then(|| linear_fit(&xs, &ys))
    };
    let (slope, intercept) = fit(&tv).ok_or_else(|| DiagnosticsError::InvalidInput("fewer than two times above the noise floor".into()))?;

    let mut rng = keyed(seed, u64::MAX, 7);
    let mut boot = Vec::with_capacity(opts.bootstrap);
    for _ in 0..opts.bootstrap {
        let ia: Vec<usize> = (0..trials).map(|_| rng.random_range(0..trials)).collect();
        let ib: Vec<usize> = (0..trials).map(|_| rng.random_range(0..trials)).collect();
        let tvs: Vec<f64> = cx
            .iter()
            .zip(&cy)
            .map(|(a, b)| {
                let ra: Vec<usize> = ia.iter().map(|&i| a[i]).collect();
                let rb: Vec<usize> = ib.iter().map(|&i| b[i]).collect();
                tv_at(&ra, &rb)
            })
            .collect();
        if let Some((s, _)) = fit(&tvs) {
            boot.push(s.exp());
        }
    }
    boot.sort_by(f64::total_cmp);
    let q = |p: f64| boot.get(((boot.len() as f64 - 1.0) * p).round() as usize).copied().unwrap_or(f64::NAN);
    let tail = (1.0 - opts.level) / 2.0;
    Ok(RateEstimate {
        times: t_grid.to_vec(),
        tv,
        noise_floor,
        fitted,
        slope,
        intercept,
        r_hat: slope.exp(),
        ci: (q(tail), q(1.0 - tail)),
        trials,
    })
}

/// `E[TV]` of two independent samples of the pooled law, from the half-normal mean
/// of each cell difference.
fn noise_floor(a: &[usize], b: &[usize]) -> f64 {
    let bins = a.iter().chain(b).max().copied().unwrap_or(0) + 1;
    let pooled = count_histogram(a.iter().chain(b).copied(), bins);
    let total = (a.len() + b.len()) as f64;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let c = (2.0 / std::f64::consts::PI).sqrt();
    0.5 * pooled
        .iter()
        .map(|&k| {
            let p = k as f64 / total;
            c * (p * (1.0 - p) * (1.0 / na + 1.0 / nb)).sqrt()
        })
        .sum::<f64>()
}

/// `P(E₁ + … + Eₙ > t)` for i.i.d. `Eᵢ ~ Exp(rate)`.
pub fn erlang_tail(n: usize, rate: f64, t: f64) -> f64 {
    let x = rate * t;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..n {
        if k > 0 {
            term *= x / k as f64;
        }
        sum += term;
    }
    (-x).exp() * sum
}
