//! Construction of core objects from the configuration.

use anyhow::{anyhow, bail, Context, Result};
use bdmove::bd_chain::{RateSeq, SimpleChainSpec};
use bdmove::config_space::{Configuration, Domain};
use bdmove::engine::ModelSpec;
use bdmove::jump_kernels::{BirthKernel, BirthRate, DeathKernel, DeathRate, DeathWeight, DistanceTerm, IntensitySpec, MixtureBirth, SiteTerm};
use bdmove::movers::{GrowthFamily, MoverKind, MoverSpec};
use bdmove::potentials::{GibbsPotential, PairPotential};
use bdmove::Scalar;

use crate::config::*;

pub fn cast_pair<S: Scalar>(p: &PairPotential<f64>) -> PairPotential<S> {
    match *p {
        PairPotential::LennardJones { c } => PairPotential::LennardJones { c: S::of(c) },
        PairPotential::Riesz { c, alpha } => PairPotential::Riesz { c: S::of(c), alpha: S::of(alpha) },
        PairPotential::SoftCore { c } => PairPotential::SoftCore { c: S::of(c) },
        PairPotential::Strauss { gamma, r, eps } => PairPotential::Strauss {
            gamma: S::of(gamma),
            r: S::of(r),
            eps: S::of(eps),
        },
        PairPotential::Zero => PairPotential::Zero,
    }
}

pub fn domain<S: Scalar>(cfg: &RunConfig) -> Result<Domain<S>> {
    let d = cfg.domain.as_ref().ok_or_else(|| anyhow!("missing [domain]"))?;
    match (&d.bounds, d.dim) {
        (Some(b), dim) => {
            if dim.is_some_and(|k| k != b.len()) {
                bail!("[domain] dim disagrees with the number of bounds");
            }
            let pairs: Vec<(S, S)> = b.iter().map(|&[lo, hi]| (S::of(lo), S::of(hi))).collect();
            Ok(Domain::boxed(&pairs)?)
        }
        (None, Some(dim)) => Ok(Domain::unbounded(dim)?),
        (None, None) => bail!("[domain] needs bounds or dim"),
    }
}

pub fn potential<S: Scalar>(cfg: &RunConfig) -> Result<GibbsPotential<S>> {
    let p = cfg.potential.as_ref().ok_or_else(|| anyhow!("a Gibbs component needs [potential]"))?;
    Ok(GibbsPotential::new(S::of(p.activity), cast_pair(&p.pair)))
}

/// Fills defaults that depend on other sections: the Langevin pair, `α*`
/// and the initial chain state.
pub fn resolve(cfg: &mut RunConfig) -> Result<()> {
    if let MoverCfg::Langevin { pair: pair @ None, .. } = &mut cfg.mover {
        let p = cfg.potential.as_ref().ok_or_else(|| anyhow!("langevin mover needs a pair potential or [potential]"))?;
        *pair = Some(p.pair.clone());
    }
    if cfg.couple.n0.is_none() {
        cfg.couple.n0 = Some(cfg.run.initial.len());
    }
    if cfg.intensities.as_ref().is_some_and(|i| i.alpha_star.is_none()) {
        let dom = domain::<f64>(cfg)?;
        let spec = intensities::<f64>(cfg, f64::INFINITY)?;
        let sup = spec.alpha_sup(&dom).context("alpha_star is required: no closed-form bound")?;
        if let Some(i) = cfg.intensities.as_mut() {
            i.alpha_star = Some(sup);
        }
    }
    Ok(())
}

fn intensities<S: Scalar>(cfg: &RunConfig, alpha_star: f64) -> Result<IntensitySpec<S>> {
    let i = cfg.intensities.as_ref().ok_or_else(|| anyhow!("missing [intensities]"))?;
    let birth = match i.birth {
        BirthRateCfg::Zero => BirthRate::Zero,
        BirthRateCfg::Constant { rate } => BirthRate::Constant { rate },
        BirthRateCfg::PerCapitaCutoff { b0, cutoff } => BirthRate::PerCapitaCutoff { b0, cutoff },
        BirthRateCfg::Gibbs { norm } => BirthRate::Gibbs {
            potential: potential(cfg)?,
            quadrature: cfg.potential.as_ref().map(|p| p.quadrature).unwrap_or_default(),
            norm,
        },
    };
    let death = match i.death {
        DeathRateCfg::Zero => DeathRate::Zero,
        DeathRateCfg::Unit => DeathRate::Unit,
        DeathRateCfg::Constant { rate } => DeathRate::Constant { rate },
        DeathRateCfg::Linear { d0, cap } => DeathRate::Linear { d0, cap },
    };
    Ok(IntensitySpec::new(birth, death, alpha_star))
}

/// Builds the model of a resolved configuration.
pub fn model<S: Scalar>(cfg: &RunConfig) -> Result<ModelSpec<S>> {
    let dom = domain::<S>(cfg)?;
    let i = cfg.intensities.as_ref().ok_or_else(|| anyhow!("missing [intensities]"))?;
    let alpha_star = i.alpha_star.ok_or_else(|| anyhow!("alpha_star unresolved"))?;
    let intens = intensities::<S>(cfg, alpha_star)?;
    let birth = match &cfg.birth {
        BirthCfg::Uniform => BirthKernel::uniform(),
        BirthCfg::Gibbs => BirthKernel::gibbs(potential(cfg)?),
        BirthCfg::Mixture { sigma, site, interaction } => BirthKernel::mixture(MixtureBirth {
            sigma: *sigma,
            site: match *site {
                SiteCfg::Constant { c } => SiteTerm::Constant { c },
            },
            interaction: match *interaction {
                InteractionCfg::Constant { c } => DistanceTerm::Constant { c },
                InteractionCfg::ExpDecay { amp, scale } => DistanceTerm::ExpDecay { amp, scale },
            },
        }),
    };
    let death = match cfg.death {
        DeathCfg::Uniform => DeathKernel::Uniform,
        DeathCfg::Weighted { weight } => DeathKernel::Weighted(match weight {
            WeightCfg::Constant { c } => DeathWeight::Constant { c },
            WeightCfg::Linear { intercept, slope } => DeathWeight::Linear { intercept, slope },
            WeightCfg::ExpDecay { scale } => DeathWeight::ExpDecay { scale },
        }),
    };
    let mover = match &cfg.mover {
        MoverCfg::Constant => MoverSpec::constant(),
        MoverCfg::Langevin { inv_temp, pair, step, taming } => {
            let pair = pair.as_ref().ok_or_else(|| anyhow!("langevin pair unresolved"))?;
            let mut m = MoverSpec::new(MoverKind::Langevin {
                pair: cast_pair(pair),
                inv_temp: *inv_temp,
            })
            .with_step(*step);
            m.taming = *taming;
            m
        }
        MoverCfg::Growth { family, step } => MoverSpec::new(MoverKind::Growth(match *family {
            GrowthCfg::Constant { kappa } => GrowthFamily::Constant { kappa },
            GrowthCfg::Logistic { kappa, cap } => GrowthFamily::Logistic { kappa, cap },
            GrowthCfg::Competition { kappa, cap } => GrowthFamily::Competition { kappa, cap },
        }))
        .with_step(*step),
        MoverCfg::ReflectedBrownian { inv_temp, step } => MoverSpec::new(MoverKind::ReflectedBrownian { inv_temp: *inv_temp }).with_step(*step),
    };
    let m = if i.skip_bound_check {
        ModelSpec::new_unverified(dom, intens, birth, death, mover)?
    } else {
        ModelSpec::new(dom, intens, birth, death, mover)?
    };
    Ok(m)
}

pub fn configuration<S: Scalar>(dom: &Domain<S>, points: &[Vec<f64>]) -> Result<Configuration<S>> {
    let pts: Vec<Vec<S>> = points.iter().map(|p| p.iter().map(|&v| S::of(v)).collect()).collect();
    if pts.is_empty() {
        return Ok(Configuration::empty(dom.dim()));
    }
    Ok(Configuration::in_domain(dom, &pts)?)
}

fn seq(s: &SeqCfg) -> RateSeq {
    match s {
        SeqCfg::Closed { form, cutoff } => RateSeq::Closed { form: *form, cutoff: *cutoff },
        SeqCfg::Explicit { values, tail } => RateSeq::Explicit {
            values: values.clone(),
            tail: *tail,
        },
    }
}

/// The explicit `[chain]`, or the dominating chain of the model.
pub fn chain(cfg: &RunConfig) -> Result<SimpleChainSpec> {
    match &cfg.chain {
        Some(c) => Ok(SimpleChainSpec::new(seq(&c.beta), seq(&c.delta))?),
        None => {
            let m = model::<f64>(cfg)?;
            Ok(SimpleChainSpec::dominating(&m.intensities, &m.domain)?)
        }
    }
}
