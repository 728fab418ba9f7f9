use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::scalar::Scalar;

/// Closed coordinate interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Interval<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn length(&self) -> S {
        self.hi - self.lo
    }
}

/// The set `W` where points live: either a box `I_1 × … × I_d` of finite
/// intervals or the whole of `ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Domain<S: Scalar = f64> {
    dim: usize,
    bounds: Option<Vec<Interval<S>>>,
}

impl<S: Scalar> Domain<S> {
    pub fn unbounded(dim: usize) -> Result<Self, ConfigError> {
        if dim == 0 {
            return Err(ConfigError::InvalidDomain("dimension must be positive".into()));
        }
        Ok(Self { dim, bounds: None })
    }

    pub fn boxed(bounds: &[(S, S)]) -> Result<Self, ConfigError> {
        if bounds.is_empty() {
            return Err(ConfigError::InvalidDomain("dimension must be positive".into()));
        }
        let mut out = Vec::with_capacity(bounds.len());
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ConfigError::InvalidDomain(format!(
                    "coordinate {i}: need finite lo < hi, got [{lo}, {hi}]"
                )));
            }
            out.push(Interval { lo, hi });
        }
        Ok(Self {
            dim: out.len(),
            bounds: Some(out),
        })
    }

    /// `[0, 1]^dim`.
    pub fn unit_cube(dim: usize) -> Result<Self, ConfigError> {
        Self::boxed(&vec![(S::zero(), S::one()); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_bounded(&self) -> bool {
        self.bounds.is_some()
    }

    pub fn bounds(&self) -> Option<&[Interval<S>]> {
        self.bounds.as_deref()
    }

    pub fn contains(&self, point: &[S]) -> bool {
        if point.len() != self.dim || point.iter().any(|c| !c.is_finite()) {
            return false;
        }
        match &self.bounds {
            None => true,
            Some(b) => point
                .iter()
                .zip(b)
                .all(|(&c, iv)| c >= iv.lo && c <= iv.hi),
        }
    }

    /// Lebesgue measure `|W|`, `None` when unbounded.
    pub fn volume(&self) -> Option<f64> {
        self.bounds
            .as_ref()
            .map(|b| b.iter().map(|iv| iv.length().as_f64()).product())
    }

    /// Centre of the box, or the origin when unbounded.
    pub fn center(&self) -> Vec<S> {
        match &self.bounds {
            None => vec![S::zero(); self.dim],
            Some(b) => b.iter().map(|iv| (iv.lo + iv.hi) / S::of(2.0)).collect(),
        }
    }

    /// Folds each coordinate back into its interval by repeated reflection
    /// about the violated faces. Identity when unbounded.
    pub fn reflect_into(&self, point: &mut [S]) {
        let Some(b) = &self.bounds else { return };
        for (c, iv) in point.iter_mut().zip(b) {
            *c = fold(*c, iv.lo, iv.hi);
        }
    }

    /// Projects each coordinate onto its interval.
    pub fn clamp_into(&self, point: &mut [S]) {
        let Some(b) = &self.bounds else { return };
        for (c, iv) in point.iter_mut().zip(b) {
            *c = c.max(iv.lo).min(iv.hi);
        }
    }

    /// Uniform point on `W`; `None` when unbounded.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<S>> {
        let b = self.bounds.as_ref()?;
        Some(
            b.iter()
                .map(|iv| {
                    let u = S::unit_uniform(rng);
                    // guard against rounding up to `hi` in low precision
                    (iv.lo + u * iv.length()).min(iv.hi)
                })
                .collect(),
        )
    }
}

fn fold<S: Scalar>(u: S, lo: S, hi: S) -> S {
    if u >= lo && u <= hi {
        return u;
    }
    if !u.is_finite() {
        return u;
    }
    let len = hi - lo;
    let period = len + len;
    let mut v = (u - lo) % period;
    if v < S::zero() {
        v = v + period;
    }
    if v > len {
        v = period - v;
    }
    (lo + v).max(lo).min(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_intervals() {
        assert!(Domain::<f64>::boxed(&[(0.0, 0.0)]).is_err());
        assert!(Domain::<f64>::boxed(&[(1.0, 0.0)]).is_err());
        assert!(Domain::<f64>::boxed(&[]).is_err());
        assert!(Domain::<f64>::unbounded(0).is_err());
    }

    #[test]
    fn fold_reflects_about_faces() {
        assert_eq!(fold(1.25, 0.0, 1.0), 0.75);
        assert_eq!(fold(-0.25, 0.0, 1.0), 0.25);
        assert_eq!(fold(2.25, 0.0, 1.0), 0.25);
        assert_eq!(fold(-1.75, 0.0, 1.0), 0.25);
        assert_eq!(fold(0.5, 0.0, 1.0), 0.5);
    }

    #[test]
    fn volume_and_center() {
        let w = Domain::<f64>::boxed(&[(0.0, 2.0), (1.0, 4.0)]).unwrap();
        assert_eq!(w.volume(), Some(6.0));
        assert_eq!(w.center(), vec![1.0, 2.5]);
        assert!(Domain::<f64>::unbounded(2).unwrap().volume().is_none());
    }
}
