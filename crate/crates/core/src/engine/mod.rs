//! Jump-move simulation by thinning, and the coupled simulator of a process
//! with its dominating birth-death chain.

mod coupled;
mod log;

use rand::Rng;
use sha2::{Digest, Sha256};
use statrs::distribution::{DiscreteCDF, Poisson};
use thiserror::Error;

pub use coupled::{simulate_coupled, CoupledBranch, CoupledCheckpoint, CoupledEvent, CoupledState, CoupledTrajectoryLog};
pub use log::{Checkpoint, Event, LogError, TrajectoryLog};

use crate::bd_chain::exp_sample;
use crate::config_space::{ConfigError, Configuration, Domain};
use crate::jump_kernels::{BirthKernel, BirthRate, CountNorm, DeathKernel, DeathRate, IntensitySpec, JumpType, KernelError};
use crate::movers::{MoverError, MoverKind, MoverSpec};
use crate::potentials::{GibbsPotential, QuadratureSpec};
use crate::rng::Streams;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("alpha = {alpha} exceeds alpha_star = {alpha_star} at t = {t}")]
    ThinningBoundViolated { alpha: f64, alpha_star: f64, t: f64 },
    #[error("coupled kernel branch {branch} has negative mass {mass}")]
    NegativeKernelMass { branch: &'static str, mass: f64 },
    #[error("invalid run parameters: {0}")]
    InvalidRun(String),
    #[error("components disagree on the domain: {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Mover(#[from] MoverError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// A complete birth-death-move model.
#[derive(Debug, Clone)]
pub struct ModelSpec<S: Scalar = f64> {
    pub domain: Domain<S>,
    pub intensities: IntensitySpec<S>,
    pub birth: BirthKernel<S>,
    pub death: DeathKernel,
    pub mover: MoverSpec<S>,
    certified: bool,
}

/// Relative slack on `α ≤ α*` to absorb quadrature rounding.
const BOUND_SLACK: f64 = 1e-12;

impl<S: Scalar> ModelSpec<S> {
    pub fn new(
        domain: Domain<S>,
        intensities: IntensitySpec<S>,
        birth: BirthKernel<S>,
        death: DeathKernel,
        mover: MoverSpec<S>,
    ) -> Result<Self, EngineError> {
        intensities.validate(&domain)?;
        Self::assemble(domain, intensities, birth, death, mover)
    }

    /// As [`ModelSpec::new`] without the `α ≤ α*` checks; a violated bound
    /// then surfaces during simulation as [`EngineError::ThinningBoundViolated`].
    pub fn new_unverified(
        domain: Domain<S>,
        intensities: IntensitySpec<S>,
        birth: BirthKernel<S>,
        death: DeathKernel,
        mover: MoverSpec<S>,
    ) -> Result<Self, EngineError> {
        intensities.validate_parameters(&domain)?;
        Self::assemble(domain, intensities, birth, death, mover)
    }

    fn assemble(
        domain: Domain<S>,
        intensities: IntensitySpec<S>,
        birth: BirthKernel<S>,
        death: DeathKernel,
        mover: MoverSpec<S>,
    ) -> Result<Self, EngineError> {
        birth.validate(&domain)?;
        death.validate()?;
        mover.validate(&domain)?;
        if let MoverKind::Growth(_) = mover.kind {
            if !domain.is_bounded() {
                return Err(EngineError::DomainMismatch("growth marks need a bounded last coordinate".into()));
            }
        }
        let certified = intensities.bound_certified(&domain);
        Ok(Self {
            domain,
            intensities,
            birth,
            death,
            mover,
            certified,
        })
    }

    /// The Gibbs-invariant model: `β = z(x)/(n + 1)`, `δ = 1_{n≥1}`, Gibbs
    /// births, uniform deaths, Langevin motion with drift `−Σ∇φ` and inverse
    /// temperature 2, `α* = e^{−a}|W| + 1`.
    pub fn gibbs_invariant(domain: Domain<S>, potential: GibbsPotential<S>, quadrature: QuadratureSpec) -> Result<Self, EngineError> {
        let mass = domain.volume().ok_or(KernelError::UnboundedDomain)?;
        let alpha_star = (-potential.activity.as_f64()).exp() * mass + 1.0;
        let intens = IntensitySpec::new(
            BirthRate::Gibbs {
                potential: potential.clone(),
                quadrature,
                norm: CountNorm::PlusOne,
            },
            DeathRate::Unit,
            alpha_star,
        );
        let mover = MoverSpec::new(MoverKind::Langevin {
            pair: potential.pair.clone(),
            inv_temp: 2.0,
        });
        Self::new(domain, intens, BirthKernel::gibbs(potential), DeathKernel::Uniform, mover)
    }

    pub fn alpha_star(&self) -> f64 {
        self.intensities.alpha_star
    }

    pub fn with_mover(mut self, mover: MoverSpec<S>) -> Result<Self, EngineError> {
        mover.validate(&self.domain)?;
        self.mover = mover;
        Ok(self)
    }

    /// Hex SHA-256 of the model's debug representation.
    pub fn model_hash(&self) -> String {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// One thinning decision at state `x` with `u` uniform on `[0, α*)`:
    /// death if `u < δ`, birth if `u < δ + β`, otherwise no jump. `β` is only
    /// evaluated when its closed-form bound cannot settle the outcome.
    pub fn thin<R: Rng + ?Sized>(&self, x: &Configuration<S>, u: f64, t: f64, rng: &mut R) -> Result<Option<(Configuration<S>, JumpType)>, EngineError> {
        let astar = self.alpha_star();
        let d = self.intensities.delta(x);
        if !self.certified {
            let b = self.intensities.beta(&self.domain, x)?;
            if b + d > astar * (1.0 + BOUND_SLACK) {
                return Err(EngineError::ThinningBoundViolated { alpha: b + d, alpha_star: astar, t });
            }
            return self.apply(x, u, b, d, rng);
        }
        if u < d {
            return self.apply(x, u, 0.0, d, rng);
        }
        let bound = self.intensities.birth_sup(&self.domain, x.count())?;
        if u >= d + bound {
            return Ok(None);
        }
        let b = self.intensities.beta(&self.domain, x)?;
        self.apply(x, u, b, d, rng)
    }

    fn apply<R: Rng + ?Sized>(&self, x: &Configuration<S>, u: f64, b: f64, d: f64, rng: &mut R) -> Result<Option<(Configuration<S>, JumpType)>, EngineError> {
        if u < d {
            Ok(Some((self.death.sample(x, rng)?, JumpType::Death)))
        } else if u < d + b {
            Ok(Some((self.birth.sample(&self.domain, x, rng)?, JumpType::Birth)))
        } else {
            Ok(None)
        }
    }
}

/// Recording options for [`simulate_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Observation times in `[0, horizon]`, non-decreasing.
    pub checkpoints: Vec<f64>,
    /// Records with more points than this keep only the count.
    pub state_cap: usize,
    /// Keep per-event records; when false only the jump count is kept.
    pub record_events: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            checkpoints: Vec::new(),
            state_cap: 1024,
            record_events: true,
        }
    }
}

/// [`simulate_with`] for trajectory 0 with default recording options.
pub fn simulate<S: Scalar>(model: &ModelSpec<S>, x0: &Configuration<S>, horizon: f64, checkpoints: &[f64], seed: u64) -> Result<TrajectoryLog<S>, EngineError> {
    let opts = SimOptions {
        checkpoints: checkpoints.to_vec(),
        ..SimOptions::default()
    };
    simulate_with(model, x0, horizon, &opts, seed, 0)
}

pub(crate) fn check_run<S: Scalar>(model: &ModelSpec<S>, x0: &Configuration<S>, horizon: f64, checkpoints: &[f64]) -> Result<(), EngineError> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(EngineError::InvalidRun(format!("horizon must be positive and finite, got {horizon}")));
    }
    x0.check_in(&model.domain)?;
    if checkpoints.iter().any(|&c| !(0.0..=horizon).contains(&c)) || checkpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(EngineError::InvalidRun("checkpoints must be sorted and inside [0, horizon]".into()));
    }
    Ok(())
}

/// Simulates trajectory `index` of `seed` on `[0, horizon]`.
///
/// Candidate times form a Poisson stream of rate `α*`; at each candidate the
/// move is advanced to that time and a jump happens with probability
/// `α(Y)/α*`.
pub fn simulate_with<S: Scalar>(
    model: &ModelSpec<S>,
    x0: &Configuration<S>,
    horizon: f64,
    opts: &SimOptions,
    seed: u64,
    index: u64,
) -> Result<TrajectoryLog<S>, EngineError> {
    check_run(model, x0, horizon, &opts.checkpoints)?;
    let mut rng = Streams::new(seed, index);
    let astar = model.alpha_star();
    let keep = |x: &Configuration<S>| (x.count() <= opts.state_cap).then(|| x.clone());
    let mut log = TrajectoryLog {
        seed,
        index,
        horizon,
        model_hash: model.model_hash(),
        initial: x0.clone(),
        events: Vec::new(),
        checkpoints: Vec::with_capacity(opts.checkpoints.len()),
        jumps: 0,
        final_state: x0.clone(),
    };
    let mut x = x0.clone();
    let mut t = 0.0;
    let mut next_ck = 0;
    loop {
        let cand = t + exp_sample(&mut rng.waiting, astar);
        let stop = cand.min(horizon);
        while next_ck < opts.checkpoints.len() && opts.checkpoints[next_ck] <= stop {
            let c = opts.checkpoints[next_ck];
            x = model.mover.advance(&model.domain, &x, c - t, &mut rng.noise)?;
            t = c;
            log.checkpoints.push(Checkpoint { t, n: x.count(), state: keep(&x) });
            next_ck += 1;
        }
        if cand > horizon {
            x = model.mover.advance(&model.domain, &x, horizon - t, &mut rng.noise)?;
            log.final_state = x;
            return Ok(log);
        }
        x = model.mover.advance(&model.domain, &x, cand - t, &mut rng.noise)?;
        t = cand;
        let u = rng.kernel.random::<f64>() * astar;
        if let Some((y, kind)) = model.thin(&x, u, t, &mut rng.kernel)? {
            x = y;
            log.jumps += 1;
            if opts.record_events {
                log.events.push(Event { t, kind, n: x.count(), state: keep(&x) });
            }
        }
    }
}

/// One row of [`poisson_domination_report`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DominationRow {
    pub n: usize,
    /// Empirical `P(N_t > n)`.
    pub empirical: f64,
    /// `P(N*_t > n)` for `N*_t ~ Poisson(α* t)`.
    pub bound: f64,
    /// Binomial standard error at the bound.
    pub sigma: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DominationReport {
    pub t: f64,
    pub trials: usize,
    pub rows: Vec<DominationRow>,
    pub any_violation: bool,
}

/// Compares the empirical jump-count exceedance at time `t` with the
/// Poisson(`α* t`) tail.
pub fn poisson_domination_report<S: Scalar>(model: &ModelSpec<S>, x0: &Configuration<S>, t: f64, trials: usize, seed: u64) -> Result<DominationReport, EngineError> {
    if trials < 1000 {
        return Err(EngineError::InvalidRun(format!("need at least 1000 trials, got {trials}")));
    }
    let opts = SimOptions {
        checkpoints: Vec::new(),
        state_cap: 0,
        record_events: false,
    };
    let lambda = model.alpha_star() * t;
    let n_max = (3.0 * lambda).ceil() as usize;
    let mut exceed = vec![0usize; n_max + 1];
    for i in 0..trials {
        let log = simulate_with(model, x0, t, &opts, seed, i as u64)?;
        for e in exceed.iter_mut().take(log.jumps) {
            *e += 1;
        }
    }
    let pois = Poisson::new(lambda.max(f64::MIN_POSITIVE)).expect("positive rate");
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut any = false;
    for (n, &e) in exceed.iter().enumerate() {
        let empirical = e as f64 / trials as f64;
        let bound = pois.sf(n as u64);
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        let violated = empirical > bound + 4.0 * sigma.max(1.0 / trials as f64);
        any |= violated;
        rows.push(DominationRow { n, empirical, bound, sigma, violated });
    }
    Ok(DominationReport { t, trials, rows, any_violation: any })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PairPotential;

    fn constant_model(rate: f64) -> ModelSpec<f64> {
        let w = Domain::unit_cube(2).unwrap();
        let intens = IntensitySpec::new(BirthRate::Constant { rate }, DeathRate::Constant { rate }, 2.0 * rate.max(0.5));
        ModelSpec::new(w, intens, BirthKernel::uniform(), DeathKernel::Uniform, MoverSpec::constant()).unwrap()
    }

    #[test]
    fn zero_intensity_never_jumps() {
        let w = Domain::<f64>::unit_cube(2).unwrap();
        let intens = IntensitySpec::new(BirthRate::Zero, DeathRate::Zero, 1.0);
        let m = ModelSpec::new(w, intens, BirthKernel::uniform(), DeathKernel::Uniform, MoverSpec::constant()).unwrap();
        let x0 = Configuration::from_points(2, &[[0.1, 0.2]]).unwrap();
        let log = simulate(&m, &x0, 10.0, &[1.0, 5.0, 10.0], 3).unwrap();
        assert!(log.events.is_empty());
        assert!(log.checkpoints.iter().all(|c| c.state.as_ref() == Some(&x0)));
    }

    #[test]
    fn same_seed_same_log() {
        let m = ModelSpec::gibbs_invariant(
            Domain::unit_cube(2).unwrap(),
            GibbsPotential::new(0.0, PairPotential::SoftCore { c: 5.0 }),
            QuadratureSpec { cells_per_axis: 32 },
        )
        .unwrap();
        let x0 = Configuration::empty(2);
        let a = simulate(&m, &x0, 3.0, &[1.0, 2.0], 42).unwrap();
        let b = simulate(&m, &x0, 3.0, &[1.0, 2.0], 42).unwrap();
        assert_eq!(a, b);
        a.check_structure().unwrap();
    }

    #[test]
    fn constant_alpha_accepts_every_candidate() {
        let m = constant_model(1.0);
        let x0 = Configuration::from_points(2, &[[0.5, 0.5]]).unwrap();
        let log = simulate(&m, &x0, 50.0, &[], 1).unwrap();
        // with alpha = alpha_star for n >= 1 every candidate jumps until n hits 0
        assert!(log.jumps > 0);
        log.check_structure().unwrap();
    }

    #[test]
    fn bound_violation_is_reported() {
        let w = Domain::<f64>::unit_cube(1).unwrap();
        let custom = crate::jump_kernels::CustomRate::new("grows", |x: &Configuration<f64>| x.count() as f64 + 1.0);
        // probes stop at eight points, so alpha_star = 10 passes validation
        let intens = IntensitySpec::new(BirthRate::Custom(custom), DeathRate::Zero, 10.0);
        let m = ModelSpec::new(w, intens, BirthKernel::uniform(), DeathKernel::Uniform, MoverSpec::constant()).unwrap();
        let r = simulate(&m, &Configuration::empty(1), 100.0, &[], 0);
        assert!(matches!(r, Err(EngineError::ThinningBoundViolated { .. })));
    }
}
