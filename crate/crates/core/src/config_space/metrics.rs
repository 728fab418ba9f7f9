//! Distances between configurations.

use super::assignment::min_cost_assignment;
use super::{ConfigError, Configuration};
use crate::scalar::Scalar;

pub(crate) fn euclid<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&p, &q)| {
            let d = p.as_f64() - q.as_f64();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// The `d₁` distance: optimal matching of the smaller configuration into the
/// larger one with point costs `‖xᵢ − yⱼ‖ ∧ 1`, plus one per unmatched point,
/// normalised by the larger count.
pub fn d1<S: Scalar>(x: &Configuration<S>, y: &Configuration<S>) -> f64 {
    let (small, large) = if x.count() <= y.count() { (x, y) } else { (y, x) };
    let m = small.count();
    let n = large.count();
    if n == 0 {
        return 0.0;
    }
    if m == 0 {
        return 1.0;
    }
    // rows beyond `m` are dummies of cost 1: each unmatched point of the
    // larger configuration contributes exactly one
    let mut cost = vec![1.0f64; n * n];
    for (i, p) in small.points().enumerate() {
        for (j, q) in large.points().enumerate() {
            cost[i * n + j] = euclid(p, q).min(1.0);
        }
    }
    let (total, _) = min_cost_assignment(&cost, n);
    total / n as f64
}

/// Hausdorff distance between two non-empty simple configurations.
pub fn hausdorff<S: Scalar>(x: &Configuration<S>, y: &Configuration<S>) -> Result<f64, ConfigError> {
    if x.is_empty() || y.is_empty() {
        return Err(ConfigError::EmptyConfiguration);
    }
    if !x.is_simple() || !y.is_simple() {
        return Err(ConfigError::NonSimpleConfiguration);
    }
    let directed = |a: &Configuration<S>, b: &Configuration<S>| {
        a.points()
            .map(|p| b.points().map(|q| euclid(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max)
    };
    Ok(directed(x, y).max(directed(y, x)))
}
