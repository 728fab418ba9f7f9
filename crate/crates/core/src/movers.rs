//! Continuous motion between jumps. A mover never changes the point count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config_space::{Configuration, Domain};
use crate::potentials::{norm, PairPotential, PotentialError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoverError {
    #[error("non-finite coordinate after a move step; reduce the step or raise taming")]
    NonFiniteState,
    #[error("invalid mover parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Growth rate `F_{i,n}` of the mark (last coordinate) of point `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthFamily {
    /// `κ`.
    Constant { kappa: f64 },
    /// `κ m (1 − m/M)`.
    Logistic { kappa: f64, cap: f64 },
    /// `κ (1 − Σ_{j≠i} e^{−‖Uᵢ − Uⱼ‖} mⱼ / M)₊` with `U` the unmarked location.
    Competition { kappa: f64, cap: f64 },
}

impl GrowthFamily {
    fn validate(&self) -> Result<(), MoverError> {
        let (kappa, cap) = match *self {
            GrowthFamily::Constant { kappa } => (kappa, 1.0),
            GrowthFamily::Logistic { kappa, cap } | GrowthFamily::Competition { kappa, cap } => (kappa, cap),
        };
        if !kappa.is_finite() || !(cap > 0.0 && cap.is_finite()) {
            return Err(MoverError::InvalidParameters(format!("growth needs finite kappa and positive cap, got {kappa}, {cap}")));
        }
        Ok(())
    }

    /// Mark velocities for all points; `loc_dist[i*n + j]` holds `‖Uᵢ − Uⱼ‖`.
    fn rates(&self, marks: &[f64], loc_dist: &[f64], out: &mut [f64]) {
        let n = marks.len();
        match *self {
            GrowthFamily::Constant { kappa } => out.iter_mut().for_each(|o| *o = kappa),
            GrowthFamily::Logistic { kappa, cap } => {
                for (o, &m) in out.iter_mut().zip(marks) {
                    *o = kappa * m * (1.0 - m / cap);
                }
            }
            GrowthFamily::Competition { kappa, cap } => {
                for i in 0..n {
                    let mut s = 0.0;
                    for j in 0..n {
                        if j != i {
                            s += (-loc_dist[i * n + j]).exp() * marks[j];
                        }
                    }
                    out[i] = kappa * (1.0 - s / cap).max(0.0);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum MoverKind<S: Scalar = f64> {
    /// No motion.
    Constant,
    /// Overdamped Langevin `dZᵢ = −Σ_{j≠i} ∇φ(Zᵢ − Zⱼ) dt + √(2/β) dBᵢ`, reflected at the faces of `W`.
    Langevin { pair: PairPotential<S>, inv_temp: f64 },
    /// Deterministic growth of the last coordinate, locations fixed.
    Growth(GrowthFamily),
    /// Independent reflected Brownian motions with variance `2t/β`.
    ReflectedBrownian { inv_temp: f64 },
}

#[derive(Debug, Clone)]
pub struct MoverSpec<S: Scalar = f64> {
    pub kind: MoverKind<S>,
    /// Integration step `Δt`.
    pub step: f64,
    /// Drift taming multiplier.
    pub taming: f64,
}

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_TAMING: f64 = 1.0;

impl<S: Scalar> MoverSpec<S> {
    pub fn new(kind: MoverKind<S>) -> Self {
        Self {
            kind,
            step: DEFAULT_STEP,
            taming: DEFAULT_TAMING,
        }
    }

    pub fn constant() -> Self {
        Self::new(MoverKind::Constant)
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, MoverKind::Constant)
    }

    pub fn validate(&self, domain: &Domain<S>) -> Result<(), MoverError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(MoverError::InvalidParameters(format!("step must be positive, got {}", self.step)));
        }
        if !(self.taming >= 0.0 && self.taming.is_finite()) {
            return Err(MoverError::InvalidParameters(format!("taming must be non-negative, got {}", self.taming)));
        }
        match &self.kind {
            MoverKind::Langevin { pair, inv_temp } => {
                pair.validate(domain.dim())?;
                check_inv_temp(*inv_temp)
            }
            MoverKind::ReflectedBrownian { inv_temp } => check_inv_temp(*inv_temp),
            MoverKind::Growth(f) => f.validate(),
            MoverKind::Constant => Ok(()),
        }
    }

    /// Advances `x` by `dt` using `⌈dt/Δt⌉` substeps. Noise is consumed in the
    /// canonical point order.
    pub fn advance<R: Rng + ?Sized>(&self, domain: &Domain<S>, x: &Configuration<S>, dt: f64, rng: &mut R) -> Result<Configuration<S>, MoverError> {
        if x.is_empty() || !(dt > 0.0) {
            return Ok(x.clone());
        }
        let mut y = x.clone();
        match &self.kind {
            MoverKind::Constant => return Ok(y),
            MoverKind::ReflectedBrownian { inv_temp } => brownian_step(domain, &mut y, dt, *inv_temp, rng),
            MoverKind::Langevin { pair, inv_temp } if pair.is_zero() => brownian_step(domain, &mut y, dt, *inv_temp, rng),
            MoverKind::Langevin { pair, inv_temp } => {
                let (k, h) = self.substeps(dt);
                let mut drift = vec![S::zero(); y.coords().len()];
                for _ in 0..k {
                    self.langevin_step(domain, pair, *inv_temp, &mut y, h, &mut drift, rng);
                }
            }
            MoverKind::Growth(f) => {
                let (k, h) = self.substeps(dt);
                growth(domain, f, &mut y, k, h);
            }
        }
        if y.coords().iter().any(|c| !c.is_finite()) {
            return Err(MoverError::NonFiniteState);
        }
        y.canonicalize();
        Ok(y)
    }

    fn substeps(&self, dt: f64) -> (usize, f64) {
        let k = (dt / self.step).ceil().max(1.0) as usize;
        (k, dt / k as f64)
    }

    #[allow(clippy::too_many_arguments)]
    fn langevin_step<R: Rng + ?Sized>(
        &self,
        domain: &Domain<S>,
        pair: &PairPotential<S>,
        inv_temp: f64,
        y: &mut Configuration<S>,
        h: f64,
        drift: &mut [S],
        rng: &mut R,
    ) {
        let d = y.dim();
        let n = y.count();
        drift.iter_mut().for_each(|v| *v = S::zero());
        let mut xi = vec![S::zero(); d];
        let mut g = vec![S::zero(); d];
        let coords = y.coords_mut();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..d {
                    xi[k] = coords[i * d + k] - coords[j * d + k];
                }
                // ∇φ is odd: particle j receives the opposite force.
                // Coincident points under a singular potential have no
                // defined direction and contribute nothing.
                g.iter_mut().for_each(|v| *v = S::zero());
                if pair.add_grad(&xi, S::one(), &mut g) {
                    for k in 0..d {
                        drift[i * d + k] = drift[i * d + k] - g[k];
                        drift[j * d + k] = drift[j * d + k] + g[k];
                    }
                }
            }
        }
        let hs = S::of(h);
        let tame = S::of(self.taming * h);
        let sd = S::of((2.0 * h / inv_temp).sqrt());
        for i in 0..n {
            let b = &mut drift[i * d..(i + 1) * d];
            let scale = S::one() / (S::one() + tame * norm(b));
            let p = &mut coords[i * d..(i + 1) * d];
            for k in 0..d {
                p[k] = p[k] + b[k] * scale * hs + sd * S::standard_normal(rng);
            }
            domain.reflect_into(p);
        }
    }

    /// Runs the mover from two listings of the same points with identical
    /// noise and reports whether the results agree bitwise.
    pub fn permutation_equivariance_check(&self, domain: &Domain<S>, x: &Configuration<S>, dt: f64, seed: u64) -> Result<bool, MoverError> {
        let pts = x.to_points();
        let mut rev = pts.clone();
        rev.reverse();
        let a = Configuration::from_points(x.dim(), &pts).map_err(|e| MoverError::InvalidParameters(e.to_string()))?;
        let b = Configuration::from_points(x.dim(), &rev).map_err(|e| MoverError::InvalidParameters(e.to_string()))?;
        let ya = self.advance(domain, &a, dt, &mut ChaCha8Rng::seed_from_u64(seed))?;
        let yb = self.advance(domain, &b, dt, &mut ChaCha8Rng::seed_from_u64(seed))?;
        Ok(ya == yb)
    }
}

fn check_inv_temp(b: f64) -> Result<(), MoverError> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(MoverError::InvalidParameters(format!("inv_temp must be positive, got {b}")))
    }
}

/// Free Brownian increment followed by the fold map. Folding a free Brownian
/// path into a box gives reflected Brownian motion exactly, so one step
/// suffices for any `dt`.
fn brownian_step<S: Scalar, R: Rng + ?Sized>(domain: &Domain<S>, y: &mut Configuration<S>, dt: f64, inv_temp: f64, rng: &mut R) {
    let d = y.dim();
    let sd = S::of((2.0 * dt / inv_temp).sqrt());
    for p in y.coords_mut().chunks_exact_mut(d) {
        for c in p.iter_mut() {
            *c = *c + sd * S::standard_normal(rng);
        }
        domain.reflect_into(p);
    }
}

/// Classical RK4 on the marks; marks are clamped into the last interval of
/// `W` after every substep.
fn growth<S: Scalar>(domain: &Domain<S>, f: &GrowthFamily, y: &mut Configuration<S>, steps: usize, h: f64) {
    let d = y.dim();
    let n = y.count();
    let mut loc_dist = vec![0.0f64; n * n];
    if let GrowthFamily::Competition { .. } = f {
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&y.point(i)[..d - 1], &y.point(j)[..d - 1]);
                loc_dist[i * n + j] = a
                    .iter()
                    .zip(b)
                    .map(|(&p, &q)| (p.as_f64() - q.as_f64()).powi(2))
                    .sum::<f64>()
                    .sqrt();
            }
        }
    }
    let (lo, hi) = match domain.bounds() {
        Some(b) => (b[d - 1].lo.as_f64(), b[d - 1].hi.as_f64()),
        None => (f64::NEG_INFINITY, f64::INFINITY),
    };
    let mut m: Vec<f64> = y.points().map(|p| p[d - 1].as_f64()).collect();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for _ in 0..steps {
        f.rates(&m, &loc_dist, &mut k1);
        for i in 0..n {
            tmp[i] = m[i] + 0.5 * h * k1[i];
        }
        f.rates(&tmp, &loc_dist, &mut k2);
        for i in 0..n {
            tmp[i] = m[i] + 0.5 * h * k2[i];
        }
        f.rates(&tmp, &loc_dist, &mut k3);
        for i in 0..n {
            tmp[i] = m[i] + h * k3[i];
        }
        f.rates(&tmp, &loc_dist, &mut k4);
        for i in 0..n {
            m[i] = (m[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).clamp(lo, hi);
        }
    }
    let coords = y.coords_mut();
    for i in 0..n {
        coords[i * d + d - 1] = S::of(m[i]);
    }
}
