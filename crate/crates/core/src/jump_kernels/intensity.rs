use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::KernelError;
use crate::config_space::{Configuration, Domain};
use crate::potentials::{GibbsPotential, QuadratureSpec};
use crate::scalar::Scalar;

/// Opaque user-supplied intensity. No closed-form bounds are known for it.
#[derive(Clone)]
pub struct CustomRate<S: Scalar = f64> {
    name: String,
    f: Arc<dyn Fn(&Configuration<S>) -> f64 + Send + Sync>,
}

impl<S: Scalar> CustomRate<S> {
    pub fn new(name: impl Into<String>, f: impl Fn(&Configuration<S>) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: &Configuration<S>) -> f64 {
        (self.f)(x)
    }
}

impl<S: Scalar> fmt::Debug for CustomRate<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Custom({})", self.name)
    }
}

/// Birth intensity `β`.
#[derive(Debug, Clone)]
pub enum BirthRate<S: Scalar = f64> {
    Zero,
    Constant { rate: f64 },
    /// `b0 · (n ∨ 1)` while `n < cutoff`, zero afterwards.
    PerCapitaCutoff { b0: f64, cutoff: usize },
    /// `z(x) / c(n)` with the count normaliser `c` of `norm`.
    Gibbs {
        potential: GibbsPotential<S>,
        quadrature: QuadratureSpec,
        norm: CountNorm,
    },
    Custom(CustomRate<S>),
}

/// Count normaliser of the Gibbs birth rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountNorm {
    /// `n + 1`; with unit death rate and uniform deaths this balances `e^{−V}`.
    #[default]
    PlusOne,
    /// `n ∨ 1`.
    MaxOne,
}

impl CountNorm {
    pub fn eval(self, n: usize) -> f64 {
        match self {
            CountNorm::PlusOne => (n + 1) as f64,
            CountNorm::MaxOne => n.max(1) as f64,
        }
    }
}

/// Death intensity `δ`; always zero on the empty configuration.
#[derive(Debug, Clone)]
pub enum DeathRate<S: Scalar = f64> {
    Zero,
    /// `1_{n ≥ 1}`.
    Unit,
    /// `rate · 1_{n ≥ 1}`.
    Constant { rate: f64 },
    /// `d0 · min(n, cap)`.
    Linear { d0: f64, cap: usize },
    Custom(CustomRate<S>),
}

/// Default cap for [`DeathRate::Linear`].
pub const DEFAULT_LINEAR_DEATH_CAP: usize = 10_000;

/// `(βₙ, δₙ, αₙ)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSequences {
    pub beta: Vec<f64>,
    pub delta: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct IntensitySpec<S: Scalar = f64> {
    pub birth: BirthRate<S>,
    pub death: DeathRate<S>,
    pub alpha_star: f64,
}

impl<S: Scalar> IntensitySpec<S> {
    pub fn new(birth: BirthRate<S>, death: DeathRate<S>, alpha_star: f64) -> Self {
        Self {
            birth,
            death,
            alpha_star,
        }
    }

    pub fn beta(&self, domain: &Domain<S>, x: &Configuration<S>) -> Result<f64, KernelError> {
        let n = x.count();
        Ok(match &self.birth {
            BirthRate::Zero => 0.0,
            BirthRate::Constant { rate } => *rate,
            BirthRate::PerCapitaCutoff { b0, cutoff } => {
                if n < *cutoff {
                    b0 * n.max(1) as f64
                } else {
                    0.0
                }
            }
            BirthRate::Gibbs { potential, quadrature, norm } => {
                potential.partition(x, domain, *quadrature)? / norm.eval(n)
            }
            BirthRate::Custom(c) => c.eval(x),
        })
    }

    pub fn delta(&self, x: &Configuration<S>) -> f64 {
        let n = x.count();
        if n == 0 {
            return 0.0;
        }
        match &self.death {
            DeathRate::Zero => 0.0,
            DeathRate::Unit => 1.0,
            DeathRate::Constant { rate } => *rate,
            DeathRate::Linear { d0, cap } => d0 * n.min(*cap) as f64,
            DeathRate::Custom(c) => c.eval(x),
        }
    }

    pub fn alpha(&self, domain: &Domain<S>, x: &Configuration<S>) -> Result<f64, KernelError> {
        Ok(self.beta(domain, x)? + self.delta(x))
    }

    /// `βₙ = sup_{Eₙ} β`, from the closed form of the family. For the Gibbs
    /// family this is the local-stability bound `e^{−a}|W| / c(n)`.
    pub fn birth_sup(&self, domain: &Domain<S>, n: usize) -> Result<f64, KernelError> {
        Ok(match &self.birth {
            BirthRate::Zero => 0.0,
            BirthRate::Constant { rate } => *rate,
            BirthRate::PerCapitaCutoff { b0, cutoff } => {
                if n < *cutoff {
                    b0 * n.max(1) as f64
                } else {
                    0.0
                }
            }
            BirthRate::Gibbs { potential, norm, .. } => {
                let mass = potential
                    .envelope_mass(domain)
                    .ok_or(KernelError::UnboundedDomain)?;
                (-potential.activity.as_f64()).exp() * mass / norm.eval(n)
            }
            BirthRate::Custom(c) => return Err(KernelError::UnsupportedFamily(format!("{c:?}"))),
        })
    }

    /// `δₙ = inf_{Eₙ} δ`. Every shipped death family depends on `n` only, so
    /// this is also the supremum.
    pub fn death_inf(&self, n: usize) -> Result<f64, KernelError> {
        if n == 0 {
            return Ok(0.0);
        }
        Ok(match &self.death {
            DeathRate::Zero => 0.0,
            DeathRate::Unit => 1.0,
            DeathRate::Constant { rate } => *rate,
            DeathRate::Linear { d0, cap } => d0 * n.min(*cap) as f64,
            DeathRate::Custom(c) => return Err(KernelError::UnsupportedFamily(format!("{c:?}"))),
        })
    }

    pub fn sup_inf_sequences(&self, domain: &Domain<S>, n_max: usize) -> Result<RateSequences, KernelError> {
        let mut beta = Vec::with_capacity(n_max + 1);
        let mut delta = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            beta.push(self.birth_sup(domain, n)?);
            delta.push(self.death_inf(n)?);
        }
        let alpha = beta.iter().zip(&delta).map(|(b, d)| b + d).collect();
        Ok(RateSequences { beta, delta, alpha })
    }

    /// Largest `n` past which the closed-form sequences are non-increasing in
    /// `βₙ + δₙ`, so checking `0..=horizon` bounds `sup α`.
    fn monotone_horizon(&self) -> usize {
        let b = match &self.birth {
            BirthRate::PerCapitaCutoff { cutoff, .. } => *cutoff,
            _ => 1,
        };
        let d = match &self.death {
            DeathRate::Linear { cap, .. } => *cap,
            _ => 1,
        };
        b.max(d) + 1
    }

    /// `sup_x α(x)` from the closed forms, when available.
    pub fn alpha_sup(&self, domain: &Domain<S>) -> Result<f64, KernelError> {
        let mut sup = 0.0f64;
        for n in 0..=self.monotone_horizon() {
            sup = sup.max(self.birth_sup(domain, n)? + self.death_inf(n)?);
        }
        Ok(sup)
    }

    /// True when the closed-form bound proves `α ≤ α*` everywhere.
    pub fn bound_certified(&self, domain: &Domain<S>) -> bool {
        matches!(self.alpha_sup(domain), Ok(s) if s <= self.alpha_star)
    }

    /// Checks parameters, the closed-form bound when one exists, and `α ≤ α*`
    /// on a fixed set of random probe configurations.
    pub fn validate(&self, domain: &Domain<S>) -> Result<(), KernelError> {
        self.validate_parameters(domain)?;
        self.validate_bound(domain)
    }

    /// Parameter checks only; `α ≤ α*` is not examined.
    pub fn validate_parameters(&self, domain: &Domain<S>) -> Result<(), KernelError> {
        if !(self.alpha_star > 0.0 && self.alpha_star.is_finite()) {
            return Err(KernelError::InvalidParameters(format!(
                "alpha_star must be positive and finite, got {}",
                self.alpha_star
            )));
        }
        match &self.birth {
            BirthRate::Constant { rate } if !(*rate >= 0.0 && rate.is_finite()) => {
                return Err(KernelError::InvalidParameters(format!("birth rate must be non-negative, got {rate}")));
            }
            BirthRate::PerCapitaCutoff { b0, .. } if !(*b0 >= 0.0 && b0.is_finite()) => {
                return Err(KernelError::InvalidParameters(format!("b0 must be non-negative, got {b0}")));
            }
            BirthRate::Gibbs { potential, quadrature, .. } => {
                potential.pair.validate(domain.dim())?;
                if !domain.is_bounded() {
                    return Err(KernelError::UnboundedDomain);
                }
                if quadrature.cells_per_axis == 0 {
                    return Err(KernelError::InvalidParameters("quadrature needs at least one cell".into()));
                }
            }
            _ => {}
        }
        match &self.death {
            DeathRate::Constant { rate } if !(*rate >= 0.0 && rate.is_finite()) => {
                return Err(KernelError::InvalidParameters(format!("death rate must be non-negative, got {rate}")));
            }
            DeathRate::Linear { d0, .. } if !(*d0 >= 0.0 && d0.is_finite()) => {
                return Err(KernelError::InvalidParameters(format!("d0 must be non-negative, got {d0}")));
            }
            _ => {}
        }
        Ok(())
    }

    fn validate_bound(&self, domain: &Domain<S>) -> Result<(), KernelError> {
        match self.alpha_sup(domain) {
            Ok(sup) if sup > self.alpha_star => {
                return Err(KernelError::AlphaStarTooSmall {
                    observed: sup,
                    alpha_star: self.alpha_star,
                })
            }
            Ok(_) | Err(KernelError::UnsupportedFamily(_)) => {}
            Err(e) => return Err(e),
        }
        // spot checks on random configurations
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a1fa);
        for n in 0..=8usize {
            let pts: Vec<Vec<S>> = (0..n)
                .map(|_| {
                    domain.sample_uniform(&mut rng).unwrap_or_else(|| {
                        (0..domain.dim()).map(|_| S::standard_normal(&mut rng)).collect()
                    })
                })
                .collect();
            let x = Configuration::from_points(domain.dim(), &pts)?;
            let a = self.alpha(domain, &x)?;
            if !(a >= 0.0) {
                return Err(KernelError::InvalidParameters(format!("negative intensity {a} at n = {n}")));
            }
            if a > self.alpha_star {
                return Err(KernelError::AlphaStarTooSmall {
                    observed: a,
                    alpha_star: self.alpha_star,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PairPotential;

    fn unit_square() -> Domain<f64> {
        Domain::unit_cube(2).unwrap()
    }

    #[test]
    fn unit_death_sequence() {
        let spec = IntensitySpec::new(BirthRate::Zero, DeathRate::<f64>::Unit, 1.0);
        let seq = spec.sup_inf_sequences(&unit_square(), 4).unwrap();
        assert_eq!(seq.delta, vec![0.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn gibbs_envelope_sequence() {
        let g = GibbsPotential::new(0.0, PairPotential::Zero);
        let spec = IntensitySpec::new(
            BirthRate::Gibbs {
                potential: g,
                quadrature: QuadratureSpec::default(),
                norm: CountNorm::MaxOne,
            },
            DeathRate::Unit,
            2.0,
        );
        let seq = spec.sup_inf_sequences(&unit_square(), 3).unwrap();
        assert_eq!(seq.beta, vec![1.0, 1.0, 0.5, 1.0 / 3.0]);
        assert!(spec.validate(&unit_square()).is_ok());
        assert!(spec.bound_certified(&unit_square()));
    }

    #[test]
    fn per_capita_cutoff_shape() {
        let spec = IntensitySpec::<f64>::new(BirthRate::PerCapitaCutoff { b0: 0.5, cutoff: 3 }, DeathRate::Unit, 2.0);
        let seq = spec.sup_inf_sequences(&unit_square(), 4).unwrap();
        assert_eq!(seq.beta, vec![0.5, 0.5, 1.0, 0.0, 0.0]);
        assert!(seq.beta[3..].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn custom_family_is_unsupported() {
        let spec = IntensitySpec::new(
            BirthRate::Custom(CustomRate::new("half", |_x: &Configuration<f64>| 0.5)),
            DeathRate::Unit,
            2.0,
        );
        assert!(matches!(
            spec.sup_inf_sequences(&unit_square(), 3),
            Err(KernelError::UnsupportedFamily(_))
        ));
        assert!(spec.validate(&unit_square()).is_ok());
        assert!(!spec.bound_certified(&unit_square()));
    }

    #[test]
    fn alpha_star_too_small_is_named() {
        let spec = IntensitySpec::<f64>::new(BirthRate::Constant { rate: 1.0 }, DeathRate::Linear { d0: 1.0, cap: 5 }, 3.0);
        match spec.validate(&unit_square()) {
            Err(KernelError::AlphaStarTooSmall { observed, alpha_star }) => {
                assert_eq!(observed, 6.0);
                assert_eq!(alpha_star, 3.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_configuration_has_no_death() {
        let spec = IntensitySpec::<f64>::new(BirthRate::Zero, DeathRate::Constant { rate: 3.0 }, 3.0);
        assert_eq!(spec.delta(&Configuration::empty(2)), 0.0);
    }
}
