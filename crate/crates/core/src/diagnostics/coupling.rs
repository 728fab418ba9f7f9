use serde::Serialize;

use super::stats::{chi2_two_sample, count_histogram};
use super::DiagnosticsError;
use crate::bd_chain::SimpleChainSpec;
use crate::config_space::Configuration;
use crate::engine::{simulate_coupled, simulate_with, ModelSpec, SimOptions};
use crate::rng::par_map;
use crate::scalar::Scalar;

/// Two-sample comparison of count laws at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalTest {
    pub t: f64,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub mean_coupled: f64,
    pub mean_standalone: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub trials: usize,
    /// Chain component of the coupled process against the standalone chain.
    pub chain_marginal: Vec<MarginalTest>,
    /// Count of the coupled configuration against the count of the process.
    pub count_marginal: Vec<MarginalTest>,
    /// Trajectories on which `n(X′) > η′` was ever observed.
    pub violations: usize,
    /// Whether `n(x0) ≤ n0`, the precondition of the domination claim.
    pub starts_dominated: bool,
}

impl CouplingReport {
    /// Marginal p-values above `alpha` and, when the start is dominated, no violations.
    pub fn pass(&self, alpha: f64) -> bool {
        let ok = |v: &[MarginalTest]| v.iter().all(|m| m.p_value > alpha);
        ok(&self.chain_marginal) && ok(&self.count_marginal) && (!self.starts_dominated || self.violations == 0)
    }
}

/// Runs `trials` coupled trajectories next to independent runs of the chain
/// and of the process, and compares the marginal count laws at each time in
/// `times`.
#[allow(clippy::too_many_arguments)]
pub fn coupling_check<S: Scalar>(
    model: &ModelSpec<S>,
    chain: &SimpleChainSpec,
    x0: &Configuration<S>,
    n0: usize,
    times: &[f64],
    trials: usize,
    seed: u64,
) -> Result<CouplingReport, DiagnosticsError> {
    if times.is_empty() || trials < 2 {
        return Err(DiagnosticsError::InvalidInput("need at least one time and two trials".into()));
    }
    let mut times = times.to_vec();
    times.sort_by(f64::total_cmp);
    let horizon = *times.last().expect("non-empty");
    let opts = SimOptions {
        checkpoints: times.clone(),
        state_cap: 0,
        record_events: false,
    };
    let standalone_seed = seed ^ 0x5851_f42d_4c95_7f2d;
    let rows = par_map(trials, |i| -> Result<_, DiagnosticsError> {
        let c = simulate_coupled(model, chain, x0, n0, horizon, &opts, seed, i as u64)?;
        let x = simulate_with(model, x0, horizon, &opts, standalone_seed, i as u64)?;
        let eta = chain.simulate(n0, horizon, standalone_seed, i as u64);
        let coupled: Vec<(usize, usize)> = c.checkpoints.iter().map(|k| (k.n_x, k.n_eta)).collect();
        let alone: Vec<(usize, usize)> = x.checkpoints.iter().zip(&times).map(|(k, &t)| (k.n, eta.state_at(t))).collect();
        Ok((coupled, alone, c.dominated))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut chain_marginal = Vec::new();
    let mut count_marginal = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let pick = |f: &dyn Fn(&(Vec<(usize, usize)>, Vec<(usize, usize)>, bool)) -> usize| rows.iter().map(f).collect::<Vec<usize>>();
        let eta_c = pick(&|r| r.0[k].1);
        let eta_s = pick(&|r| r.1[k].1);
        let nx_c = pick(&|r| r.0[k].0);
        let nx_s = pick(&|r| r.1[k].0);
        chain_marginal.push(marginal_test(t, &eta_c, &eta_s));
        count_marginal.push(marginal_test(t, &nx_c, &nx_s));
    }
    Ok(CouplingReport {
        trials,
        chain_marginal,
        count_marginal,
        violations: rows.iter().filter(|r| !r.2).count(),
        starts_dominated: x0.count() <= n0,
    })
}

fn marginal_test(t: f64, a: &[usize], b: &[usize]) -> MarginalTest {
    let bins = a.iter().chain(b).max().copied().unwrap_or(0) + 1;
    let ha = count_histogram(a.iter().copied(), bins);
    let hb = count_histogram(b.iter().copied(), bins);
    let (statistic, df, p_value) = chi2_two_sample(&ha, &hb);
    let mean = |v: &[usize]| v.iter().sum::<usize>() as f64 / v.len() as f64;
    MarginalTest {
        t,
        statistic,
        df,
        p_value,
        mean_coupled: mean(a),
        mean_standalone: mean(b),
    }
}
