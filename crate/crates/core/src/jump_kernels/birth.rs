use rand::Rng;

use super::KernelError;
use crate::config_space::{euclid, Configuration, Domain};
use crate::potentials::GibbsPotential;
use crate::scalar::Scalar;

/// Default cap on rejection proposals per birth.
pub const DEFAULT_MAX_PROPOSALS: usize = 1_000_000;

/// Site term `φ₁` of the mixture dispersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiteTerm {
    Constant { c: f64 },
}

impl SiteTerm {
    pub fn eval<S: Scalar>(&self, _site: &[S]) -> f64 {
        match *self {
            SiteTerm::Constant { c } => c,
        }
    }
}

/// Interaction term `φ₂` of the mixture dispersion, a function of distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceTerm {
    Constant { c: f64 },
    /// `amp · e^{−r/scale}`.
    ExpDecay { amp: f64, scale: f64 },
}

impl DistanceTerm {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            DistanceTerm::Constant { c } => c,
            DistanceTerm::ExpDecay { amp, scale } => amp * (-r / scale).exp(),
        }
    }
}

/// Mixture of isotropic Gaussians of standard deviation `sigma` centred on
/// the existing points, each rescaled by `v(xᵢ, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureBirth {
    pub sigma: f64,
    pub site: SiteTerm,
    pub interaction: DistanceTerm,
}

impl MixtureBirth {
    /// `v(xᵢ, x) = exp(φ₁(xᵢ) + Σ_{k≠i} φ₂(‖x_k − xᵢ‖))`.
    pub fn dispersion<S: Scalar>(&self, x: &Configuration<S>, i: usize) -> f64 {
        let xi = x.point(i);
        let mut e = self.site.eval(xi);
        for (k, p) in x.points().enumerate() {
            if k != i {
                e += self.interaction.eval(euclid(p, xi));
            }
        }
        e.exp()
    }
}

#[derive(Debug, Clone)]
pub enum BirthKind<S: Scalar = f64> {
    Uniform,
    Mixture(MixtureBirth),
    Gibbs(GibbsPotential<S>),
}

#[derive(Debug, Clone)]
pub struct BirthKernel<S: Scalar = f64> {
    pub kind: BirthKind<S>,
    pub max_proposals: usize,
}

impl<S: Scalar> BirthKernel<S> {
    pub fn new(kind: BirthKind<S>) -> Self {
        Self {
            kind,
            max_proposals: DEFAULT_MAX_PROPOSALS,
        }
    }

    pub fn uniform() -> Self {
        Self::new(BirthKind::Uniform)
    }

    pub fn gibbs(potential: GibbsPotential<S>) -> Self {
        Self::new(BirthKind::Gibbs(potential))
    }

    pub fn mixture(m: MixtureBirth) -> Self {
        Self::new(BirthKind::Mixture(m))
    }

    pub fn validate(&self, domain: &Domain<S>) -> Result<(), KernelError> {
        if self.max_proposals == 0 {
            return Err(KernelError::InvalidParameters("max_proposals must be positive".into()));
        }
        match &self.kind {
            BirthKind::Uniform if !domain.is_bounded() => Err(KernelError::UnboundedDomain),
            BirthKind::Gibbs(_) if !domain.is_bounded() => Err(KernelError::UnboundedDomain),
            BirthKind::Gibbs(g) => Ok(g.pair.validate(domain.dim())?),
            BirthKind::Mixture(m) => {
                if !(m.sigma > 0.0 && m.sigma.is_finite()) {
                    return Err(KernelError::InvalidParameters(format!("sigma must be positive, got {}", m.sigma)));
                }
                if let DistanceTerm::ExpDecay { scale, .. } = m.interaction {
                    if !(scale > 0.0) {
                        return Err(KernelError::InvalidParameters(format!("scale must be positive, got {scale}")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Draws only the new point `ξ`.
    pub fn sample_point<R: Rng + ?Sized>(&self, domain: &Domain<S>, x: &Configuration<S>, rng: &mut R) -> Result<Vec<S>, KernelError> {
        match &self.kind {
            BirthKind::Uniform => domain.sample_uniform(rng).ok_or(KernelError::UnboundedDomain),
            BirthKind::Gibbs(g) => {
                for _ in 0..self.max_proposals {
                    let xi = domain.sample_uniform(rng).ok_or(KernelError::UnboundedDomain)?;
                    // envelope e^{−a}; acceptance is the pair factor alone
                    let acc = g.interaction_factor(x, &xi);
                    if acc >= 1.0 || rng.random::<f64>() < acc {
                        return Ok(xi);
                    }
                }
                Err(KernelError::RejectionBudgetExceeded(self.max_proposals))
            }
            BirthKind::Mixture(m) => {
                let n = x.count();
                let (center, scale) = if n == 0 {
                    (domain.center(), m.sigma)
                } else {
                    let i = rng.random_range(0..n);
                    (x.point(i).to_vec(), m.sigma * m.dispersion(x, i))
                };
                let scale = S::of(scale);
                for _ in 0..self.max_proposals {
                    let xi: Vec<S> = center.iter().map(|&c| c + scale * S::standard_normal(rng)).collect();
                    if domain.contains(&xi) {
                        return Ok(xi);
                    }
                }
                Err(KernelError::RejectionBudgetExceeded(self.max_proposals))
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, domain: &Domain<S>, x: &Configuration<S>, rng: &mut R) -> Result<Configuration<S>, KernelError> {
        let xi = self.sample_point(domain, x, rng)?;
        Ok(x.with_point(&xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PairPotential;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gibbs_birth_keeps_existing_points() {
        let w = Domain::<f64>::unit_cube(2).unwrap();
        let k = BirthKernel::gibbs(GibbsPotential::new(0.0, PairPotential::SoftCore { c: 5.0 }));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Configuration::from_points(2, &[[0.5, 0.5], [0.2, 0.7]]).unwrap();
        for _ in 0..200 {
            let y = k.sample(&w, &x, &mut rng).unwrap();
            assert_eq!(y.count(), 3);
            assert!(x.is_submultiset_of(&y));
            assert!(y.check_in(&w).is_ok());
        }
    }

    #[test]
    fn mixture_dispersion_example() {
        let m = MixtureBirth {
            sigma: 0.1,
            site: SiteTerm::Constant { c: 0.5 },
            interaction: DistanceTerm::ExpDecay { amp: 1.0, scale: 1.0 },
        };
        let x = Configuration::from_points(1, &[[0.0], [1.0]]).unwrap();
        let v = m.dispersion(&x, 0);
        assert!((v - (0.5 + (-1.0f64).exp()).exp()).abs() < 1e-14);
    }

    #[test]
    fn hard_rejection_exhausts_budget() {
        // a huge Strauss penalty covering the whole box rejects every proposal
        let w = Domain::<f64>::unit_cube(1).unwrap();
        let g = GibbsPotential::new(0.0, PairPotential::Strauss { gamma: 1e6, r: 5.0, eps: 0.1 });
        let mut k = BirthKernel::gibbs(g);
        k.max_proposals = 50;
        let x = Configuration::from_points(1, &[[0.5]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            k.sample(&w, &x, &mut rng),
            Err(KernelError::RejectionBudgetExceeded(50))
        ));
    }
}
