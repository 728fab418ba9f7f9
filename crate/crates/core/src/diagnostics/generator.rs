use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Discrete, Poisson};

use super::stats::{mean, stderr};
use crate::config_space::{Configuration, Domain};
use crate::engine::{EngineError, ModelSpec};
use crate::rng::{keyed, par_map};
use crate::scalar::Scalar;

/// Bounded test functions on configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `1_{n(x) = k}`.
    CountIndicator { k: usize },
    /// `e^{−θ n(x)}`.
    CountExponential { theta: f64 },
    /// `e^{−θ n(x)} Πᵢ h(xᵢ)` with the Gaussian bump
    /// `h(ξ) = exp(−‖ξ − c‖² / (2 width²))` around the centre `c` of `W`.
    SmoothCylinder { theta: f64, width: f64 },
}

impl TestFunction {
    pub fn eval<S: Scalar>(&self, domain: &Domain<S>, x: &Configuration<S>) -> f64 {
        let n = x.count();
        match *self {
            TestFunction::CountIndicator { k } => f64::from(u8::from(n == k)),
            TestFunction::CountExponential { theta } => (-theta * n as f64).exp(),
            TestFunction::SmoothCylinder { theta, width } => {
                let c = domain.center();
                let mut log_prod = -theta * n as f64;
                for p in x.points() {
                    let r2: f64 = p.iter().zip(&c).map(|(&a, &b)| (a - b).as_f64().powi(2)).sum();
                    log_prod -= r2 / (2.0 * width * width);
                }
                log_prod.exp()
            }
        }
    }
}

/// Highest number of thinning candidates in `[0, h]` that is simulated; the
/// remaining Poisson mass is below `(α* h)^5 / 120`.
const MAX_CANDIDATES: usize = 4;

/// Estimate of the generator identity at one step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorEstimate {
    pub h: f64,
    /// `(E_x f(X_h) − f(x)) / h`.
    pub lhs: f64,
    /// Move quotient plus jump term.
    pub rhs: f64,
    /// `(E_x f(Y_h) − f(x)) / h`.
    pub move_quotient: f64,
    /// `α(x) (K f(x) − f(x))`.
    pub jump_term: f64,
    /// `lhs − rhs`, estimated directly.
    pub residual: f64,
    pub mc_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorReport {
    pub at_h: GeneratorEstimate,
    pub at_half: GeneratorEstimate,
    /// `C = 3 |r(h) − r(h/2)| / h`: the first-order coefficient `2|Δr|/h`
    /// widened so that halving ratios down to 1.5 still pass.
    pub slack_c: f64,
    /// `r(h) / r(h/2)`; about 2 when the residual is first order in `h`.
    pub halving_ratio: f64,
    /// `|r| ≤ 3σ + C h` at both step sizes.
    pub pass: bool,
}

/// Checks `(E_x f(X_h) − f(x))/h ≈ (E_x f(Y_h) − f(x))/h + α(x)(Kf(x) − f(x))`
/// at `h` and `h/2` with the same seeds.
///
/// The residual is estimated per trial by conditioning on the number `k` of
/// thinning candidates in `[0, h]`: `k = 0` contributes nothing, `k ≤ 2` is
/// averaged exactly over the jump outcomes at each candidate, and `k = 3, 4`
/// are thinned as in the simulator. Every jumping path is paired with the
/// jump-free path on the same noise, and the jump term reuses the birth and
/// death draws of the first candidate.
pub fn generator_check<S: Scalar>(
    model: &ModelSpec<S>,
    x: &Configuration<S>,
    f: TestFunction,
    h: f64,
    trials: usize,
    seed: u64,
) -> Result<GeneratorReport, EngineError> {
    if !(h > 0.0 && h.is_finite()) || trials < 2 {
        return Err(EngineError::InvalidRun("generator check needs h > 0 and at least two trials".into()));
    }
    x.check_in(&model.domain)?;
    let at_h = estimate(model, x, f, h, trials, seed)?;
    let at_half = estimate(model, x, f, h / 2.0, trials, seed)?;
    let slack_c = 3.0 * (at_h.residual - at_half.residual).abs() / h;
    let gate = |e: &GeneratorEstimate| e.residual.abs() <= 3.0 * e.mc_stderr + slack_c * e.h;
    Ok(GeneratorReport {
        at_h,
        at_half,
        slack_c,
        halving_ratio: at_h.residual / at_half.residual,
        pass: gate(&at_h) && gate(&at_half),
    })
}

const WAIT: u64 = 0;
const KERNEL: u64 = 1;
const NOISE: u64 = 2;
const BIRTH: u64 = 3;
const DEATH: u64 = 4;

/// Candidate counts up to this are expanded over all jump outcomes.
const ENUMERATED: usize = 2;

struct Ctx<'a, S: Scalar> {
    model: &'a ModelSpec<S>,
    f: TestFunction,
    h: f64,
    seed: u64,
    i: u64,
}

impl<S: Scalar> Ctx<'_, S> {
    /// `E[f(X_h)]` given the state `x` at time `t` and the remaining candidate
    /// times, averaging over the jump outcome at each candidate. Jumps at depth
    /// `d` draw from their own birth and death streams.
    fn expand(&self, x: &Configuration<S>, t: f64, times: &[f64], mut noise: ChaCha8Rng, depth: u64) -> Result<f64, EngineError> {
        let m = self.model;
        let w = &m.domain;
        let Some((&c, rest)) = times.split_first() else {
            return Ok(self.f.eval(w, &m.mover.advance(w, x, self.h - t, &mut noise)?));
        };
        let astar = m.alpha_star();
        let y = m.mover.advance(w, x, c - t, &mut noise)?;
        let b = m.intensities.beta(w, &y)?;
        let d = m.intensities.delta(&y);
        if b + d > astar * (1.0 + 1e-12) {
            return Err(EngineError::ThinningBoundViolated { alpha: b + d, alpha_star: astar, t: c });
        }
        let mut total = (1.0 - (b + d) / astar) * self.expand(&y, c, rest, noise.clone(), depth + 1)?;
        if b > 0.0 {
            let xb = m.birth.sample(w, &y, &mut keyed(self.seed, self.i, BIRTH + 2 * depth))?;
            total += b / astar * self.expand(&xb, c, rest, noise.clone(), depth + 1)?;
        }
        if d > 0.0 {
            let xd = m.death.sample(&y, &mut keyed(self.seed, self.i, DEATH + 2 * depth))?;
            total += d / astar * self.expand(&xd, c, rest, noise, depth + 1)?;
        }
        Ok(total)
    }
}

struct Trial {
    residual: f64,
    move_quotient: f64,
    jump_term: f64,
}

fn estimate<S: Scalar>(model: &ModelSpec<S>, x: &Configuration<S>, f: TestFunction, h: f64, trials: usize, seed: u64) -> Result<GeneratorEstimate, EngineError> {
    let astar = model.alpha_star();
    let pois = Poisson::new((astar * h).max(f64::MIN_POSITIVE)).expect("positive rate");
    let weights: Vec<f64> = (0..=MAX_CANDIDATES).map(|k| pois.pmf(k as u64) / h).collect();
    let rows = par_map(trials, |i| trial(model, x, f, h, &weights, seed, i as u64));
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let res: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let mq = mean(&rows.iter().map(|r| r.move_quotient).collect::<Vec<_>>());
    let jt = mean(&rows.iter().map(|r| r.jump_term).collect::<Vec<_>>());
    let residual = mean(&res);
    Ok(GeneratorEstimate {
        h,
        lhs: mq + jt + residual,
        rhs: mq + jt,
        move_quotient: mq,
        jump_term: jt,
        residual,
        mc_stderr: stderr(&res),
    })
}

fn trial<S: Scalar>(model: &ModelSpec<S>, x: &Configuration<S>, f: TestFunction, h: f64, weights: &[f64], seed: u64, i: u64) -> Result<Trial, EngineError> {
    let w = &model.domain;
    let astar = model.alpha_star();
    let fx = f.eval(w, x);
    let noise = keyed(seed, i, NOISE);
    let mut wait = keyed(seed, i, WAIT);
    let mut kernel = keyed(seed, i, KERNEL);

    let y = model.mover.advance(w, x, h, &mut noise.clone())?;
    let move_quotient = (f.eval(w, &y) - fx) / h;

    let b0 = model.intensities.beta(w, x)?;
    let d0 = model.intensities.delta(x);
    let mut jump_term = 0.0;
    if b0 > 0.0 {
        let xb = model.birth.sample(w, x, &mut keyed(seed, i, BIRTH))?;
        jump_term += b0 * (f.eval(w, &xb) - fx);
    }
    if d0 > 0.0 {
        let xd = model.death.sample(x, &mut keyed(seed, i, DEATH))?;
        jump_term += d0 * (f.eval(w, &xd) - fx);
    }

    // up to ENUMERATED candidates: every accept/reject outcome, weighted exactly
    let mut lhs_minus_move = 0.0;
    for (k, &wk) in weights.iter().enumerate().skip(1) {
        let mut times: Vec<f64> = (0..k).map(|_| wait.random::<f64>() * h).collect();
        times.sort_by(f64::total_cmp);
        let mut ny = noise.clone();
        let mut ys = x.clone();
        let mut t = 0.0;
        for &c in &times {
            ys = model.mover.advance(w, &ys, c - t, &mut ny)?;
            t = c;
        }
        ys = model.mover.advance(w, &ys, h - t, &mut ny)?;
        let fy = f.eval(w, &ys);
        let fx_h = if k <= ENUMERATED {
            let ctx = Ctx { model, f, h, seed, i };
            ctx.expand(x, 0.0, &times, noise.clone(), 0)?
        } else {
            // thinning as in the simulator
            let mut nx = noise.clone();
            let mut xs = x.clone();
            let mut t = 0.0;
            for &c in &times {
                xs = model.mover.advance(w, &xs, c - t, &mut nx)?;
                t = c;
                let u = kernel.random::<f64>() * astar;
                if let Some((next, _)) = model.thin(&xs, u, t, &mut kernel)? {
                    xs = next;
                }
            }
            f.eval(w, &model.mover.advance(w, &xs, h - t, &mut nx)?)
        };
        lhs_minus_move += wk * (fx_h - fy);
    }

    Ok(Trial {
        residual: lhs_minus_move - jump_term,
        move_quotient,
        jump_term,
    })
}
