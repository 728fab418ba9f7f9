use rand::Rng;
use serde::Serialize;

use super::stats::{count_histogram, ks_two_sample_statistic, tv_counts};
use super::DiagnosticsError;
use crate::config_space::{Configuration, Domain};
use crate::engine::{simulate_with, ModelSpec, SimOptions};
use crate::jump_kernels::BirthRate;
use crate::potentials::GibbsPotential;
use crate::rng::{keyed, par_map};
use crate::scalar::Scalar;

/// Unclipped Metropolis-Hastings ratio for adding `ξ` to `x`:
/// `|W| e^{−(V(x ∪ ξ) − V(x))} / (n + 1)`.
pub fn birth_acceptance_ratio<S: Scalar>(g: &GibbsPotential<S>, volume: f64, x: &Configuration<S>, xi: &[S]) -> f64 {
    volume * g.boltzmann_delta(x, xi) / (x.count() + 1) as f64
}

/// Unclipped ratio for removing point `i` of `x`:
/// `n e^{V(x) − V(x \ xᵢ)} / |W|`.
pub fn death_acceptance_ratio<S: Scalar>(g: &GibbsPotential<S>, volume: f64, x: &Configuration<S>, i: usize) -> f64 {
    let rest = x.remove(i).expect("index in range");
    x.count() as f64 / (volume * g.boltzmann_delta(&rest, x.point(i)))
}

/// Sampler layout for [`mcmc_gibbs_oracle_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOptions {
    /// Independent chains, each started from `Ø`.
    pub chains: usize,
    /// Proposals per sweep; one sample is kept per sweep.
    pub sweep_len: usize,
    /// Sweeps discarded at the start of each chain.
    pub burn_in_sweeps: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            chains: 16,
            sweep_len: 20,
            burn_in_sweeps: 200,
        }
    }
}

/// Birth-death Metropolis-Hastings samples of the density `e^{−V}` with
/// respect to the unit-rate Poisson process on `W`, one per sweep.
pub fn mcmc_gibbs_oracle<S: Scalar>(g: &GibbsPotential<S>, domain: &Domain<S>, sweeps: usize, seed: u64) -> Result<Vec<Configuration<S>>, DiagnosticsError> {
    mcmc_gibbs_oracle_with(g, domain, sweeps, &OracleOptions::default(), seed)
}

/// As [`mcmc_gibbs_oracle`]; `sweeps` post-burn-in samples are split evenly
/// over the chains.
pub fn mcmc_gibbs_oracle_with<S: Scalar>(
    g: &GibbsPotential<S>,
    domain: &Domain<S>,
    sweeps: usize,
    opts: &OracleOptions,
    seed: u64,
) -> Result<Vec<Configuration<S>>, DiagnosticsError> {
    let volume = domain.volume().ok_or(DiagnosticsError::UnboundedDomain)?;
    let chains = opts.chains.max(1);
    let per = sweeps.div_ceil(chains);
    let out = par_map(chains, |c| {
        let mut rng = keyed(seed, c as u64, 0);
        let mut x = Configuration::empty(domain.dim());
        let mut kept = Vec::with_capacity(per);
        for s in 0..opts.burn_in_sweeps + per {
            for _ in 0..opts.sweep_len {
                x = mh_step(g, domain, volume, x, &mut rng);
            }
            if s >= opts.burn_in_sweeps {
                kept.push(x.clone());
            }
        }
        kept
    });
    Ok(out.into_iter().flatten().take(sweeps).collect())
}

fn mh_step<S: Scalar, R: Rng + ?Sized>(g: &GibbsPotential<S>, domain: &Domain<S>, volume: f64, x: Configuration<S>, rng: &mut R) -> Configuration<S> {
    if rng.random::<bool>() {
        let xi = domain.sample_uniform(rng).expect("bounded domain");
        let r = birth_acceptance_ratio(g, volume, &x, &xi);
        if rng.random::<f64>() < r {
            return x.with_point(&xi);
        }
    } else if !x.is_empty() {
        let i = rng.random_range(0..x.count());
        let r = death_acceptance_ratio(g, volume, &x, i);
        if rng.random::<f64>() < r {
            return x.remove(i).expect("index in range");
        }
    }
    x
}

/// Pooled nearest-neighbour distances over all configurations with at least
/// two points.
pub fn nearest_neighbour_distances<S: Scalar>(samples: &[Configuration<S>]) -> Vec<f64> {
    let mut out = Vec::new();
    for x in samples {
        let n = x.count();
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let mut best = f64::INFINITY;
            for j in 0..n {
                if i != j {
                    let d: f64 = x.point(i).iter().zip(x.point(j)).map(|(&a, &b)| (a - b).as_f64().powi(2)).sum();
                    best = best.min(d);
                }
            }
            out.push(best.sqrt());
        }
    }
    out
}

/// Layout of the process side of [`gibbs_invariance_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GibbsCheckOptions {
    /// Discarded initial time of every trajectory.
    pub burn_in: f64,
    /// Time between recorded checkpoints.
    pub spacing: f64,
    /// Total number of recorded checkpoints, split over the trajectories.
    pub samples: usize,
    pub trajectories: usize,
    pub oracle: OracleOptions,
    pub count_tv_max: f64,
    pub ks_max: f64,
}

impl Default for GibbsCheckOptions {
    fn default() -> Self {
        Self {
            burn_in: 20.0,
            spacing: 1.0,
            samples: 20_000,
            trajectories: 40,
            oracle: OracleOptions::default(),
            count_tv_max: 0.03,
            ks_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsReport {
    pub count_law_distance: f64,
    pub pairdist_ks: f64,
    pub mean_count: f64,
    pub oracle_mean_count: f64,
    pub nn_samples: usize,
    pub oracle_nn_samples: usize,
    pub pass: bool,
}

/// Post-burn-in checkpoint states of the process started from `Ø`.
pub fn process_samples<S: Scalar>(model: &ModelSpec<S>, opts: &GibbsCheckOptions, seed: u64) -> Result<Vec<Configuration<S>>, DiagnosticsError> {
    let traj = opts.trajectories.max(1);
    let per = opts.samples.div_ceil(traj);
    let checkpoints: Vec<f64> = (0..per).map(|k| opts.burn_in + k as f64 * opts.spacing).collect();
    let horizon = checkpoints.last().copied().unwrap_or(opts.burn_in).max(f64::MIN_POSITIVE);
    let sim = SimOptions {
        checkpoints,
        state_cap: usize::MAX,
        record_events: false,
    };
    let x0 = Configuration::empty(model.domain.dim());
    let runs = par_map(traj, |i| simulate_with(model, &x0, horizon, &sim, seed, i as u64));
    let mut out = Vec::with_capacity(traj * per);
    for r in runs {
        out.extend(r?.checkpoints.into_iter().filter_map(|c| c.state));
    }
    out.truncate(opts.samples);
    Ok(out)
}

/// Count TV and nearest-neighbour KS between two sample sets.
pub fn compare_samples<S: Scalar>(a: &[Configuration<S>], b: &[Configuration<S>], opts: &GibbsCheckOptions) -> GibbsReport {
    let bins = a.iter().chain(b).map(|x| x.count()).max().unwrap_or(0) + 1;
    let ha = count_histogram(a.iter().map(|x| x.count()), bins);
    let hb = count_histogram(b.iter().map(|x| x.count()), bins);
    let tv = tv_counts(&ha, &hb);
    let na = nearest_neighbour_distances(a);
    let nb = nearest_neighbour_distances(b);
    let ks = if na.is_empty() || nb.is_empty() { 0.0 } else { ks_two_sample_statistic(&na, &nb) };
    let mean = |s: &[Configuration<S>]| s.iter().map(|x| x.count() as f64).sum::<f64>() / s.len().max(1) as f64;
    GibbsReport {
        count_law_distance: tv,
        pairdist_ks: ks,
        mean_count: mean(a),
        oracle_mean_count: mean(b),
        nn_samples: na.len(),
        oracle_nn_samples: nb.len(),
        pass: tv <= opts.count_tv_max && ks <= opts.ks_max,
    }
}

/// The Gibbs potential driving a model's birth rate.
pub fn model_potential<S: Scalar>(model: &ModelSpec<S>) -> Result<&GibbsPotential<S>, DiagnosticsError> {
    match &model.intensities.birth {
        BirthRate::Gibbs { potential, .. } => Ok(potential),
        other => Err(DiagnosticsError::NotGibbs(format!("{other:?}"))),
    }
}

/// Compares post-burn-in process states with oracle samples of the Gibbs
/// measure named by the model's birth rate.
pub fn gibbs_invariance_check<S: Scalar>(model: &ModelSpec<S>, opts: &GibbsCheckOptions, seed: u64) -> Result<GibbsReport, DiagnosticsError> {
    let g = model_potential(model)?;
    let bdm = process_samples(model, opts, seed)?;
    let oracle = mcmc_gibbs_oracle_with(g, &model.domain, opts.samples, &opts.oracle, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    Ok(compare_samples(&bdm, &oracle, opts))
}

/// Oracle against an independent oracle run, for threshold calibration.
pub fn gibbs_oracle_calibration<S: Scalar>(g: &GibbsPotential<S>, domain: &Domain<S>, opts: &GibbsCheckOptions, seed: u64) -> Result<GibbsReport, DiagnosticsError> {
    let a = mcmc_gibbs_oracle_with(g, domain, opts.samples, &opts.oracle, seed)?;
    let b = mcmc_gibbs_oracle_with(g, domain, opts.samples, &opts.oracle, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    Ok(compare_samples(&a, &b, opts))
}
