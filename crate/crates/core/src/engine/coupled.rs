use rand::Rng;
use serde::Serialize;

use super::{check_run, EngineError, ModelSpec, SimOptions};
use crate::bd_chain::{exp_sample, SimpleChainSpec};
use crate::config_space::Configuration;
use crate::rng::Streams;
use crate::scalar::Scalar;

/// A state `(x, n)` of the coupled process.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState<S: Scalar = f64> {
    pub x: Configuration<S>,
    pub n: usize,
}

/// Which components moved at a coupled jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoupledBranch {
    XBirth,
    XDeath,
    EtaBirth,
    EtaDeath,
    JointBirth,
    JointDeath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledEvent {
    pub t: f64,
    pub branch: CoupledBranch,
    pub n_x: usize,
    pub n_eta: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledCheckpoint<S: Scalar = f64> {
    pub t: f64,
    pub n_x: usize,
    pub n_eta: usize,
    pub state: Option<Configuration<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTrajectoryLog<S: Scalar = f64> {
    pub seed: u64,
    pub index: u64,
    pub horizon: f64,
    pub initial: CoupledState<S>,
    pub events: Vec<CoupledEvent>,
    pub checkpoints: Vec<CoupledCheckpoint<S>>,
    pub final_state: CoupledState<S>,
    pub jumps: usize,
    /// Whether `n(x) ≤ n` held at time 0, at every jump and at every checkpoint.
    pub dominated: bool,
    /// Largest `|Σ branch masses − ǎ|` seen at a candidate.
    pub row_mass_error: f64,
}

/// Simulates the coupled process `(X′, η′)` by thinning against `2α*`.
///
/// With `n(x) ≠ n` the two components jump independently: masses `β(x)`,
/// `δ(x)`, `βₙ`, `δₙ`. With `n(x) = n` the masses are: joint birth `β(x)`,
/// chain-only birth `βₙ − β(x)`, joint death `δₙ`, X-only death `δ(x) − δₙ`.
/// The move acts on `x` only.
#[allow(clippy::too_many_arguments)]
pub fn simulate_coupled<S: Scalar>(
    model: &ModelSpec<S>,
    chain: &SimpleChainSpec,
    x0: &Configuration<S>,
    n0: usize,
    horizon: f64,
    opts: &SimOptions,
    seed: u64,
    index: u64,
) -> Result<CoupledTrajectoryLog<S>, EngineError> {
    check_run(model, x0, horizon, &opts.checkpoints)?;
    let mut rng = Streams::new(seed, index);
    let bound = 2.0 * model.alpha_star();
    let keep = |x: &Configuration<S>| (x.count() <= opts.state_cap).then(|| x.clone());
    let mut log = CoupledTrajectoryLog {
        seed,
        index,
        horizon,
        initial: CoupledState { x: x0.clone(), n: n0 },
        events: Vec::new(),
        checkpoints: Vec::with_capacity(opts.checkpoints.len()),
        final_state: CoupledState { x: x0.clone(), n: n0 },
        jumps: 0,
        dominated: x0.count() <= n0,
        row_mass_error: 0.0,
    };
    let mut x = x0.clone();
    let mut n = n0;
    let mut t = 0.0;
    let mut next_ck = 0;
    loop {
        let cand = t + exp_sample(&mut rng.waiting, bound);
        let stop = cand.min(horizon);
        while next_ck < opts.checkpoints.len() && opts.checkpoints[next_ck] <= stop {
            let c = opts.checkpoints[next_ck];
            x = model.mover.advance(&model.domain, &x, c - t, &mut rng.noise)?;
            t = c;
            log.dominated &= x.count() <= n;
            log.checkpoints.push(CoupledCheckpoint { t, n_x: x.count(), n_eta: n, state: keep(&x) });
            next_ck += 1;
        }
        if cand > horizon {
            x = model.mover.advance(&model.domain, &x, horizon - t, &mut rng.noise)?;
            log.final_state = CoupledState { x, n };
            return Ok(log);
        }
        x = model.mover.advance(&model.domain, &x, cand - t, &mut rng.noise)?;
        t = cand;

        let b = model.intensities.beta(&model.domain, &x)?;
        let d = model.intensities.delta(&x);
        let bn = chain.beta(n);
        let dn = chain.delta(n);
        let (masses, a_check) = if x.count() != n {
            (
                [
                    (CoupledBranch::XBirth, b),
                    (CoupledBranch::XDeath, d),
                    (CoupledBranch::EtaBirth, bn),
                    (CoupledBranch::EtaDeath, dn),
                ],
                b + d + bn + dn,
            )
        } else {
            (
                [
                    (CoupledBranch::JointBirth, b),
                    (CoupledBranch::EtaBirth, bn - b),
                    (CoupledBranch::JointDeath, dn),
                    (CoupledBranch::XDeath, d - dn),
                ],
                bn + d,
            )
        };
        for &(branch, m) in &masses {
            if m < -1e-12 * bound {
                return Err(EngineError::NegativeKernelMass { branch: branch_name(branch), mass: m });
            }
        }
        let total: f64 = masses.iter().map(|&(_, m)| m.max(0.0)).sum();
        log.row_mass_error = log.row_mass_error.max((total - a_check).abs());
        if total > bound * (1.0 + 1e-12) {
            return Err(EngineError::ThinningBoundViolated { alpha: total, alpha_star: bound, t });
        }
        let u = rng.kernel.random::<f64>() * bound;
        let mut acc = 0.0;
        let mut chosen = None;
        for &(branch, m) in &masses {
            acc += m.max(0.0);
            if u < acc {
                chosen = Some(branch);
                break;
            }
        }
        let Some(branch) = chosen else { continue };
        match branch {
            CoupledBranch::XBirth => x = model.birth.sample(&model.domain, &x, &mut rng.kernel)?,
            CoupledBranch::XDeath => x = model.death.sample(&x, &mut rng.kernel)?,
            CoupledBranch::EtaBirth => n += 1,
            CoupledBranch::EtaDeath => n -= 1,
            CoupledBranch::JointBirth => {
                x = model.birth.sample(&model.domain, &x, &mut rng.kernel)?;
                n += 1;
            }
            CoupledBranch::JointDeath => {
                x = model.death.sample(&x, &mut rng.kernel)?;
                n -= 1;
            }
        }
        log.jumps += 1;
        log.dominated &= x.count() <= n;
        if opts.record_events {
            log.events.push(CoupledEvent { t, branch, n_x: x.count(), n_eta: n });
        }
    }
}

fn branch_name(b: CoupledBranch) -> &'static str {
    match b {
        CoupledBranch::XBirth => "x_birth",
        CoupledBranch::XDeath => "x_death",
        CoupledBranch::EtaBirth => "eta_birth",
        CoupledBranch::EtaDeath => "eta_death",
        CoupledBranch::JointBirth => "joint_birth",
        CoupledBranch::JointDeath => "joint_death",
    }
}
