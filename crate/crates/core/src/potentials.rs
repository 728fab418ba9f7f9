//! Pairwise interaction potentials and the Gibbs energy
//! `V(x) = a·n(x) + Σ_{i≠j} φ(xᵢ − xⱼ)`.
//!
//! All shipped pair potentials are radial and non-negative, so the local
//! stability envelope is `ψ ≡ 1` and `exp(−(V(x ∪ ξ) − V(x))) ≤ e^{−a}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config_space::{Configuration, Domain};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("gradient is singular at the origin")]
    SingularGradient,
    #[error("invalid potential parameters: {0}")]
    InvalidParameters(String),
    #[error("the partition integral needs a bounded domain")]
    UnboundedDomain,
}

/// A radial pair potential `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields, bound = "")]
pub enum PairPotential<S: Scalar = f64> {
    /// Repulsive Lennard-Jones `c‖ξ‖⁻¹²`.
    LennardJones { c: S },
    /// Riesz `c‖ξ‖^{α−d}`, `0 < α < d`.
    Riesz { c: S, alpha: S },
    /// Soft core `−ln(1 − e^{−c‖ξ‖²})`.
    SoftCore { c: S },
    /// Strauss step of height `gamma` and range `r`, smoothed over `[r − eps, r + eps]`.
    Strauss { gamma: S, r: S, eps: S },
    Zero,
}

impl<S: Scalar> PairPotential<S> {
    pub fn validate(&self, dim: usize) -> Result<(), PotentialError> {
        let bad = |m: String| Err(PotentialError::InvalidParameters(m));
        match *self {
            Self::LennardJones { c } | Self::SoftCore { c } if !(c > S::zero() && c.is_finite()) => {
                bad(format!("c must be positive, got {c}"))
            }
            Self::Riesz { c, alpha } => {
                if !(c > S::zero() && c.is_finite()) {
                    bad(format!("c must be positive, got {c}"))
                } else if !(alpha > S::zero() && alpha.as_f64() < dim as f64) {
                    bad(format!("Riesz needs 0 < alpha < d = {dim}, got {alpha}"))
                } else {
                    Ok(())
                }
            }
            Self::Strauss { gamma, r, eps } => {
                if !(gamma >= S::zero() && gamma.is_finite()) {
                    bad(format!("gamma must be non-negative, got {gamma}"))
                } else if !(eps > S::zero() && eps < r && r.is_finite()) {
                    bad(format!("Strauss needs 0 < eps < r, got eps = {eps}, r = {r}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// True for the kinds with `φ(0) = +∞`.
    pub fn is_singular(&self) -> bool {
        matches!(self, Self::LennardJones { .. } | Self::Riesz { .. } | Self::SoftCore { .. })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// `φ` as a function of the distance `r` in dimension `dim`.
    pub fn radial(&self, r: S, dim: usize) -> S {
        match *self {
            Self::LennardJones { c } => {
                let r2 = r * r;
                let r6 = r2 * r2 * r2;
                c / (r6 * r6)
            }
            Self::Riesz { c, alpha } => c * r.powf(alpha - S::of(dim as f64)),
            Self::SoftCore { c } => -(-(-c * r * r).exp()).ln_1p(),
            Self::Strauss { gamma, r: range, eps } => {
                let lo = range - eps;
                if r <= lo {
                    gamma
                } else if r >= range + eps {
                    S::zero()
                } else {
                    let s = (r - lo) / (eps + eps);
                    gamma * (S::one() - S::of(3.0) * s * s + S::of(2.0) * s * s * s)
                }
            }
            Self::Zero => S::zero(),
        }
    }

    /// `dφ/dr`.
    pub fn radial_derivative(&self, r: S, dim: usize) -> S {
        match *self {
            Self::LennardJones { c } => {
                let r2 = r * r;
                let r6 = r2 * r2 * r2;
                -S::of(12.0) * c / (r6 * r6 * r)
            }
            Self::Riesz { c, alpha } => {
                let e = alpha - S::of(dim as f64);
                c * e * r.powf(e - S::one())
            }
            Self::SoftCore { c } => {
                let q = (-c * r * r).exp();
                let one_minus_q = -(-c * r * r).exp_m1();
                -S::of(2.0) * c * r * q / one_minus_q
            }
            Self::Strauss { gamma, r: range, eps } => {
                let lo = range - eps;
                if r <= lo || r >= range + eps {
                    S::zero()
                } else {
                    let s = (r - lo) / (eps + eps);
                    gamma * S::of(6.0) * (s * s - s) / (eps + eps)
                }
            }
            Self::Zero => S::zero(),
        }
    }

    /// `e^{−φ}` as a function of distance; avoids the log/exp round trip for soft core.
    pub fn radial_boltzmann(&self, r: S, dim: usize) -> S {
        match *self {
            Self::SoftCore { c } => -(-c * r * r).exp_m1(),
            Self::Zero => S::one(),
            _ => (-self.radial(r, dim)).exp(),
        }
    }

    /// `φ(ξ)`; `+∞` at the origin for singular kinds.
    pub fn phi(&self, xi: &[S]) -> S {
        self.radial(norm(xi), xi.len())
    }

    /// `∇φ(ξ)`.
    pub fn grad(&self, xi: &[S]) -> Result<Vec<S>, PotentialError> {
        let mut out = vec![S::zero(); xi.len()];
        if self.add_grad(xi, S::one(), &mut out) {
            Ok(out)
        } else {
            Err(PotentialError::SingularGradient)
        }
    }

    /// `out += scale · ∇φ(ξ)`. Returns false (leaving `out` untouched) at a
    /// singular origin.
    pub(crate) fn add_grad(&self, xi: &[S], scale: S, out: &mut [S]) -> bool {
        if self.is_zero() {
            return true;
        }
        let r = norm(xi);
        if r == S::zero() {
            return !self.is_singular();
        }
        let f = scale * self.radial_derivative(r, xi.len()) / r;
        for (o, &c) in out.iter_mut().zip(xi) {
            *o = *o + f * c;
        }
        true
    }
}

pub(crate) fn norm<S: Scalar>(xi: &[S]) -> S {
    xi.iter().map(|&c| c * c).sum::<S>().sqrt()
}

fn dist<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .map(|(&p, &q)| (p - q) * (p - q))
        .sum::<S>()
        .sqrt()
}

/// Grid resolution for the partition integral `z(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub cells_per_axis: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { cells_per_axis: 128 }
    }
}

/// Activity `a` plus pair potential `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "")]
pub struct GibbsPotential<S: Scalar = f64> {
    pub activity: S,
    pub pair: PairPotential<S>,
}

impl<S: Scalar> GibbsPotential<S> {
    pub fn new(activity: S, pair: PairPotential<S>) -> Self {
        Self { activity, pair }
    }

    /// Local stability envelope `ψ`; identically one for every shipped pair potential.
    pub fn envelope(&self, _xi: &[S]) -> f64 {
        1.0
    }

    /// `∫_W ψ`.
    pub fn envelope_mass(&self, domain: &Domain<S>) -> Option<f64> {
        domain.volume()
    }

    /// `V(x)`, counting each unordered pair twice.
    pub fn energy(&self, x: &Configuration<S>) -> S {
        let n = x.count();
        let mut pair = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                pair = pair + self.pair.radial(dist(x.point(i), x.point(j)), x.dim());
            }
        }
        self.activity * S::of(n as f64) + pair + pair
    }

    /// `V(x ∪ ξ) − V(x) = a + 2 Σᵢ φ(xᵢ − ξ)` in `O(n)`.
    pub fn energy_delta(&self, x: &Configuration<S>, xi: &[S]) -> S {
        let s: S = x
            .points()
            .map(|p| self.pair.radial(dist(p, xi), xi.len()))
            .sum();
        self.activity + s + s
    }

    /// `exp(−(V(x ∪ ξ) − V(x)))` as `e^{−a} Πᵢ e^{−2φ(xᵢ − ξ)}`.
    pub fn boltzmann_delta(&self, x: &Configuration<S>, xi: &[S]) -> f64 {
        (-self.activity.as_f64()).exp() * self.interaction_factor(x, xi)
    }

    /// `Πᵢ e^{−2φ(xᵢ − ξ)} ∈ [0, 1]`.
    pub fn interaction_factor(&self, x: &Configuration<S>, xi: &[S]) -> f64 {
        if self.pair.is_zero() {
            return 1.0;
        }
        let mut prod = 1.0f64;
        for p in x.points() {
            let b = self.pair.radial_boltzmann(dist(p, xi), xi.len()).as_f64();
            prod *= b * b;
            if prod == 0.0 {
                break;
            }
        }
        prod
    }

    /// `z(x) = ∫_W exp(−(V(x ∪ ξ) − V(x))) dξ` by the midpoint rule on a
    /// regular grid.
    pub fn partition(&self, x: &Configuration<S>, domain: &Domain<S>, quad: QuadratureSpec) -> Result<f64, PotentialError> {
        let bounds = domain.bounds().ok_or(PotentialError::UnboundedDomain)?;
        let vol = domain.volume().unwrap_or(0.0);
        if self.pair.is_zero() {
            // constant integrand; the grid sum is exact
            return Ok((-self.activity.as_f64()).exp() * vol);
        }
        let m = quad.cells_per_axis.max(1);
        let d = bounds.len();
        let widths: Vec<f64> = bounds.iter().map(|iv| iv.length().as_f64() / m as f64).collect();
        let cell_vol: f64 = widths.iter().product();
        let mut idx = vec![0usize; d];
        let mut xi = vec![S::zero(); d];
        let mut total = 0.0f64;
        loop {
            for k in 0..d {
                xi[k] = S::of(bounds[k].lo.as_f64() + (idx[k] as f64 + 0.5) * widths[k]);
            }
            total += self.boltzmann_delta(x, &xi);
            // odometer increment
            let mut k = 0;
            loop {
                if k == d {
                    return Ok(total * cell_vol);
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}
