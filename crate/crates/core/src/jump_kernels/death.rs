use rand::Rng;

use super::KernelError;
use crate::config_space::{euclid, Configuration};
use crate::scalar::Scalar;

/// Positive continuous weight `g : ℝ₊ → ℝ₊*` of a distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeathWeight {
    Constant { c: f64 },
    /// `intercept + slope · r`.
    Linear { intercept: f64, slope: f64 },
    /// `e^{−r/scale}`.
    ExpDecay { scale: f64 },
}

impl DeathWeight {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            DeathWeight::Constant { c } => c,
            DeathWeight::Linear { intercept, slope } => intercept + slope * r,
            DeathWeight::ExpDecay { scale } => (-r / scale).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeathKernel {
    Uniform,
    Weighted(DeathWeight),
}

impl DeathKernel {
    pub fn validate(&self) -> Result<(), KernelError> {
        let bad = |m: String| Err(KernelError::InvalidParameters(m));
        match *self {
            DeathKernel::Weighted(DeathWeight::Constant { c }) if !(c > 0.0 && c.is_finite()) => {
                bad(format!("death weight must be positive, got {c}"))
            }
            DeathKernel::Weighted(DeathWeight::Linear { intercept, slope })
                if !(intercept >= 0.0 && slope >= 0.0 && intercept + slope > 0.0) =>
            {
                bad(format!("linear death weight needs non-negative coefficients, got {intercept} + {slope} r"))
            }
            DeathKernel::Weighted(DeathWeight::ExpDecay { scale }) if !(scale > 0.0) => {
                bad(format!("scale must be positive, got {scale}"))
            }
            _ => Ok(()),
        }
    }

    /// Removal probabilities `w(xᵢ, x)`, in the canonical point order.
    pub fn weights<S: Scalar>(&self, x: &Configuration<S>) -> Result<Vec<f64>, KernelError> {
        let n = x.count();
        if n == 0 {
            return Err(KernelError::EmptyConfiguration);
        }
        let g = match self {
            DeathKernel::Uniform => return Ok(vec![1.0 / n as f64; n]),
            DeathKernel::Weighted(g) => g,
        };
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            for k in (i + 1)..n {
                let v = g.eval(euclid(x.point(i), x.point(k)));
                w[i] += v;
                w[k] += v;
            }
        }
        let z: f64 = w.iter().sum();
        if !(z > 0.0 && z.is_finite()) {
            // only reachable when g vanishes at every pairwise distance
            return Ok(vec![1.0 / n as f64; n]);
        }
        w.iter_mut().for_each(|v| *v /= z);
        Ok(w)
    }

    /// Index of the point to remove.
    pub fn sample_index<S: Scalar, R: Rng + ?Sized>(&self, x: &Configuration<S>, rng: &mut R) -> Result<usize, KernelError> {
        let n = x.count();
        if n == 0 {
            return Err(KernelError::EmptyConfiguration);
        }
        if let DeathKernel::Uniform = self {
            return Ok(rng.random_range(0..n));
        }
        let w = self.weights(x)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, wi) in w.iter().enumerate() {
            acc += wi;
            if u < acc {
                return Ok(i);
            }
        }
        Ok(n - 1)
    }

    pub fn sample<S: Scalar, R: Rng + ?Sized>(&self, x: &Configuration<S>, rng: &mut R) -> Result<Configuration<S>, KernelError> {
        let i = self.sample_index(x, rng)?;
        Ok(x.remove(i)?)
    }
}
