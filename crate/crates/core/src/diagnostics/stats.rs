//! Small statistical helpers shared by the diagnostics.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean.
pub fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Asymptotic Kolmogorov survival function `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// `(D, p)` for the one-sample KS test, with the small-sample correction of
/// the effective `√n`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let d = ks_statistic(samples, cdf);
    let en = (samples.len() as f64).sqrt();
    (d, kolmogorov_sf((en + 0.12 + 0.11 / en) * d))
}

/// Two-sample KS statistic.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d = ks_two_sample_statistic(a, b);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let en = (n * m / (n + m)).sqrt();
    (d, kolmogorov_sf((en + 0.12 + 0.11 / en) * d))
}

/// DKW band half-width at level `alpha` for `n` samples.
pub fn dkw_epsilon(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Histogram of counts with `bins` cells; the last cell collects overflow.
pub fn count_histogram(counts: impl IntoIterator<Item = usize>, bins: usize) -> Vec<usize> {
    let mut h = vec![0usize; bins];
    for c in counts {
        h[c.min(bins - 1)] += 1;
    }
    h
}

/// Total variation between two empirical count laws.
pub fn tv_counts(a: &[usize], b: &[usize]) -> f64 {
    let bins = a.len().max(b.len());
    let (na, nb) = (a.iter().sum::<usize>() as f64, b.iter().sum::<usize>() as f64);
    let get = |h: &[usize], k: usize| h.get(k).copied().unwrap_or(0) as f64;
    0.5 * (0..bins).map(|k| (get(a, k) / na - get(b, k) / nb).abs()).sum::<f64>()
}

/// Pearson goodness-of-fit against probabilities `p` (summing to one).
/// Adjacent cells are pooled from the right until each expects at least 5.
/// Returns `(statistic, degrees of freedom, p-value)`.
pub fn chi2_gof(observed: &[usize], p: &[f64]) -> (f64, usize, f64) {
    let n = observed.iter().sum::<usize>() as f64;
    let cells = pool_cells(observed.iter().map(|&o| o as f64).zip(p.iter().map(|&q| q * n)).collect());
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = cells.len().saturating_sub(1).max(1);
    (stat, df, chi2_sf(stat, df))
}

/// Two-sample homogeneity test on count histograms, pooling sparse cells.
/// Returns `(statistic, degrees of freedom, p-value)`.
pub fn chi2_two_sample(a: &[usize], b: &[usize]) -> (f64, usize, f64) {
    let bins = a.len().max(b.len());
    let get = |h: &[usize], k: usize| h.get(k).copied().unwrap_or(0) as f64;
    let (na, nb) = (a.iter().sum::<usize>() as f64, b.iter().sum::<usize>() as f64);
    let n = na + nb;
    // pool on combined expected counts
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for k in 0..bins {
        cur.0 += get(a, k);
        cur.1 += get(b, k);
        let tot = cur.0 + cur.1;
        if tot * na.min(nb) / n >= 5.0 {
            groups.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.0 + cur.1 > 0.0 {
        match groups.last_mut() {
            Some(g) => {
                g.0 += cur.0;
                g.1 += cur.1;
            }
            None => groups.push(cur),
        }
    }
    if groups.len() < 2 {
        return (0.0, 0, 1.0);
    }
    let mut stat = 0.0;
    for &(oa, ob) in &groups {
        let tot = oa + ob;
        let ea = tot * na / n;
        let eb = tot * nb / n;
        stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    let df = groups.len() - 1;
    (stat, df, chi2_sf(stat, df))
}

fn pool_cells(cells: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for (o, e) in cells {
        cur.0 += o;
        cur.1 += e;
        if cur.1 >= 5.0 {
            out.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.1 > 0.0 || cur.0 > 0.0 {
        match out.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => out.push(cur),
        }
    }
    out
}

pub fn chi2_sf(stat: f64, df: usize) -> f64 {
    ChiSquared::new(df.max(1) as f64).map(|c| c.sf(stat)).unwrap_or(f64::NAN)
}

/// `P(N > n)` for `N ~ Poisson(lambda)`.
pub fn poisson_sf(lambda: f64, n: u64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    Poisson::new(lambda).map(|p| p.sf(n)).unwrap_or(f64::NAN)
}

/// Poisson(`lambda`) probabilities on `0..bins−1`, the last cell holding the tail.
pub fn poisson_probs(lambda: f64, bins: usize) -> Vec<f64> {
    let pois = Poisson::new(lambda).expect("positive rate");
    let mut p: Vec<f64> = (0..bins as u64 - 1).map(|k| pois.pmf(k)).collect();
    p.push(pois.sf(bins as u64 - 2));
    p
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_reference_values() {
        // P(K > 1.36) ≈ 0.05 and P(K > 1.63) ≈ 0.01
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 5e-4);
    }

    #[test]
    fn two_sample_ks_on_identical_samples_is_zero() {
        let a = [0.1, 0.4, 0.2, 0.9];
        assert_eq!(ks_two_sample_statistic(&a, &a), 0.0);
        assert_eq!(ks_two_sample_statistic(&[0.0, 0.1], &[0.5, 0.6]), 1.0);
    }

    #[test]
    fn chi2_perfect_fit() {
        let (s, _, p) = chi2_gof(&[25, 25, 25, 25], &[0.25; 4]);
        assert_eq!(s, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_probs_sum_to_one() {
        let p = poisson_probs(1.0, 8);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p[0] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tv_of_disjoint_laws() {
        assert_eq!(tv_counts(&[10, 0], &[0, 5]), 1.0);
        assert_eq!(tv_counts(&[3, 3], &[1, 1]), 0.0);
    }
}
