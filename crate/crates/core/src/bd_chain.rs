//! Simple birth-death chains on `ℕ`: simulation, stationary law, ergodicity
//! and rate certificates, and the mean return time to zero.
//!
//! Series verdicts are drawn from the asymptotic shape `rₙ ~ c·n^p` (or
//! "eventually zero") of each rate sequence, never from partial sums.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config_space::Domain;
use crate::jump_kernels::{BirthRate, CountNorm, DeathRate, IntensitySpec, KernelError};
use crate::rng::{substream, Substream};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain is not certified ergodic ({0:?})")]
    NotErgodic(Verdict),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("stationary law did not converge within {0} states")]
    TruncationLimit(usize),
}

/// Closed-form sequence shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosedForm {
    /// `c · (n + shift)^p`, with `0^0 = 1`.
    Power {
        c: f64,
        #[serde(default)]
        shift: f64,
        #[serde(default)]
        p: f64,
    },
    /// `c / (n ∨ 1)`.
    Envelope { c: f64 },
    /// `c · (n ∨ 1)`.
    PerCapita { c: f64 },
}

impl ClosedForm {
    pub fn constant(c: f64) -> Self {
        ClosedForm::Power { c, shift: 0.0, p: 0.0 }
    }

    pub fn eval(&self, n: usize) -> f64 {
        let m = n as f64;
        match *self {
            ClosedForm::Power { c, shift, p } => {
                if p == 0.0 {
                    c
                } else {
                    c * (m + shift).powf(p)
                }
            }
            ClosedForm::Envelope { c } => c / m.max(1.0),
            ClosedForm::PerCapita { c } => c * m.max(1.0),
        }
    }

    fn asymptote(&self) -> Asymptote {
        let (c, p) = match *self {
            ClosedForm::Power { c, p, .. } => (c, p),
            ClosedForm::Envelope { c } => (c, -1.0),
            ClosedForm::PerCapita { c } => (c, 1.0),
        };
        if c == 0.0 {
            Asymptote::Zero
        } else {
            Asymptote::Power { c, p }
        }
    }

    fn validate(&self) -> Result<(), String> {
        let (c, shift) = match *self {
            ClosedForm::Power { c, shift, p } => {
                if !p.is_finite() {
                    return Err(format!("exponent must be finite, got {p}"));
                }
                if p < 0.0 && shift <= 0.0 {
                    return Err("negative exponent needs a positive shift".into());
                }
                (c, shift)
            }
            ClosedForm::Envelope { c } | ClosedForm::PerCapita { c } => (c, 0.0),
        };
        if !(c >= 0.0 && c.is_finite() && shift >= 0.0 && shift.is_finite()) {
            return Err(format!("need finite non-negative coefficients, got c = {c}, shift = {shift}"));
        }
        Ok(())
    }
}

/// What an explicit array continues as.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailRule {
    /// No certified tail; past the array the last value repeats.
    Unknown,
    Zero,
    /// The closed form evaluated at the absolute index.
    Closed { form: ClosedForm },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateSeq {
    /// A closed form, set to zero from `cutoff` on.
    Closed { form: ClosedForm, cutoff: Option<usize> },
    Explicit { values: Vec<f64>, tail: TailRule },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Asymptote {
    Zero,
    Power { c: f64, p: f64 },
}

impl RateSeq {
    pub fn closed(form: ClosedForm) -> Self {
        RateSeq::Closed { form, cutoff: None }
    }

    pub fn eval(&self, n: usize) -> f64 {
        match self {
            RateSeq::Closed { form, cutoff } => match cutoff {
                Some(c) if n >= *c => 0.0,
                _ => form.eval(n),
            },
            RateSeq::Explicit { values, tail } => {
                if n < values.len() {
                    return values[n];
                }
                match tail {
                    TailRule::Unknown => values.last().copied().unwrap_or(0.0),
                    TailRule::Zero => 0.0,
                    TailRule::Closed { form } => form.eval(n),
                }
            }
        }
    }

    /// `None` when no certified tail exists.
    fn asymptote(&self) -> Option<Asymptote> {
        match self {
            RateSeq::Closed { cutoff: Some(_), .. } => Some(Asymptote::Zero),
            RateSeq::Closed { form, cutoff: None } => Some(form.asymptote()),
            RateSeq::Explicit { tail, .. } => match tail {
                TailRule::Unknown => None,
                TailRule::Zero => Some(Asymptote::Zero),
                TailRule::Closed { form } => Some(form.asymptote()),
            },
        }
    }

    /// Length of the prefix that must be inspected term by term.
    fn prefix_len(&self) -> usize {
        match self {
            RateSeq::Closed { cutoff, .. } => cutoff.unwrap_or(0) + 1,
            RateSeq::Explicit { values, .. } => values.len(),
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self {
            RateSeq::Closed { form, .. } => form.validate(),
            RateSeq::Explicit { values, tail } => {
                if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                    return Err(format!("rates must be finite and non-negative, got {v}"));
                }
                if values.is_empty() && *tail == TailRule::Unknown {
                    return Err("explicit sequence is empty".into());
                }
                match tail {
                    TailRule::Closed { form } => form.validate(),
                    _ => Ok(()),
                }
            }
        }
    }
}

/// Simple birth-death chain with rates `βₙ` up and `δₙ` down; `δ₀` is
/// always treated as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleChainSpec {
    pub beta: RateSeq,
    pub delta: RateSeq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Eq30,
    Eq31,
    Inconclusive,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateVerdict {
    Eq32,
    Eq33,
    Corollary,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub verdict: Verdict,
    /// `βₙ = 0` for every `n ≥ n0`, when that holds.
    pub n0: Option<usize>,
    /// `lim βₙ / δₙ₊₁`, when certified.
    pub ratio_limit: Option<f64>,
    pub rationale: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub verdict: RateVerdict,
    pub rationale: Vec<String>,
}

/// Law of the initial count.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialLaw {
    PointMass(usize),
    /// Finite support `0..len`.
    Weights(Vec<f64>),
}

impl InitialLaw {
    fn max_support(&self) -> usize {
        match self {
            InitialLaw::PointMass(n) => *n,
            InitialLaw::Weights(w) => w.iter().rposition(|&p| p > 0.0).unwrap_or(0),
        }
    }
}

/// One simulated chain path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainLog {
    pub n0: usize,
    /// `(time, state after)`.
    pub events: Vec<(f64, usize)>,
    /// Set when the chain reached a state with no outgoing rate.
    pub absorbed_at: Option<f64>,
    pub horizon: f64,
}

impl ChainLog {
    pub fn state_at(&self, t: f64) -> usize {
        let k = self.events.partition_point(|&(s, _)| s <= t);
        if k == 0 {
            self.n0
        } else {
            self.events[k - 1].1
        }
    }
}

impl SimpleChainSpec {
    pub fn new(beta: RateSeq, delta: RateSeq) -> Result<Self, ChainError> {
        beta.validate().map_err(ChainError::InvalidChain)?;
        delta.validate().map_err(ChainError::InvalidChain)?;
        Ok(Self { beta, delta })
    }

    pub fn beta(&self, n: usize) -> f64 {
        self.beta.eval(n)
    }

    pub fn delta(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.delta.eval(n)
        }
    }

    /// The dominating chain `(βₙ, δₙ)` of a model's intensities, built from
    /// the families' closed forms.
    pub fn dominating<S: Scalar>(intens: &IntensitySpec<S>, domain: &Domain<S>) -> Result<Self, KernelError> {
        let beta = match &intens.birth {
            BirthRate::Zero => RateSeq::closed(ClosedForm::constant(0.0)),
            BirthRate::Constant { rate } => RateSeq::closed(ClosedForm::constant(*rate)),
            BirthRate::PerCapitaCutoff { b0, cutoff } => RateSeq::Closed {
                form: ClosedForm::PerCapita { c: *b0 },
                cutoff: Some(*cutoff),
            },
            BirthRate::Gibbs { norm, .. } => {
                let c = intens.birth_sup(domain, 0)? * norm.eval(0);
                RateSeq::closed(match norm {
                    CountNorm::MaxOne => ClosedForm::Envelope { c },
                    CountNorm::PlusOne => ClosedForm::Power { c, shift: 1.0, p: -1.0 },
                })
            }
            BirthRate::Custom(c) => return Err(KernelError::UnsupportedFamily(format!("{c:?}"))),
        };
        let delta = match &intens.death {
            DeathRate::Zero => RateSeq::closed(ClosedForm::constant(0.0)),
            DeathRate::Unit => RateSeq::closed(ClosedForm::constant(1.0)),
            DeathRate::Constant { rate } => RateSeq::closed(ClosedForm::constant(*rate)),
            DeathRate::Linear { d0, cap } => RateSeq::Explicit {
                values: (0..=*cap).map(|n| d0 * n as f64).collect(),
                tail: TailRule::Closed {
                    form: ClosedForm::constant(d0 * *cap as f64),
                },
            },
            DeathRate::Custom(c) => return Err(KernelError::UnsupportedFamily(format!("{c:?}"))),
        };
        Self::new(beta, delta).map_err(|e| KernelError::InvalidParameters(e.to_string()))
    }

    /// Eq30 / Eq31 / Fails / Inconclusive, with the reasoning. `n_probe`
    /// bounds the term-by-term scan of explicit prefixes.
    pub fn ergodicity_check(&self, n_probe: usize) -> ErgodicityReport {
        let mut why = Vec::new();
        let report = |verdict, n0, ratio_limit, rationale| ErgodicityReport {
            verdict,
            n0,
            ratio_limit,
            rationale,
        };
        let scan = self.beta.prefix_len().max(self.delta.prefix_len()).max(2).min(n_probe.max(2));
        if let Some(n) = (1..=scan).find(|&n| self.delta(n) <= 0.0) {
            why.push(format!("delta_{n} = 0, so the chain cannot return to 0 from above {}", n - 1));
            return report(Verdict::Fails, None, None, why);
        }
        let (Some(ba), Some(da)) = (self.beta.asymptote(), self.delta.asymptote()) else {
            why.push("no tail rule: only finitely many terms are known".into());
            return report(Verdict::Inconclusive, None, None, why);
        };
        let (dc, dp) = match da {
            Asymptote::Zero => {
                why.push("delta_n is eventually zero".into());
                return report(Verdict::Fails, None, None, why);
            }
            Asymptote::Power { c, p } => (c, p),
        };
        let (bc, bp) = match ba {
            Asymptote::Zero => {
                // smallest n0 ≥ 1 past which β vanishes
                let last = (1..self.beta.prefix_len().max(1)).rev().find(|&n| self.beta(n) > 0.0);
                let n0 = last.map_or(1, |n| n + 1);
                why.push(format!("beta_n = 0 for all n >= {n0}"));
                return report(Verdict::Eq30, Some(n0), Some(0.0), why);
            }
            Asymptote::Power { c, p } => (c, p),
        };
        if let Some(n) = (1..=scan).find(|&n| self.beta(n) <= 0.0) {
            why.push(format!("beta_{n} = 0 but beta is not eventually zero"));
            return report(Verdict::Inconclusive, None, None, why);
        }
        let limit = if bp < dp {
            0.0
        } else if bp > dp {
            f64::INFINITY
        } else {
            bc / dc
        };
        why.push(format!(
            "beta_n ~ {bc} n^{bp}, delta_n ~ {dc} n^{dp}: term ratio beta_n/delta_(n+1) -> {limit}"
        ));
        if limit < 1.0 {
            why.push("first series converges by the ratio test; the second has ratio -> 1/limit > 1 and diverges".into());
            report(Verdict::Eq31, None, Some(limit), why)
        } else if limit > 1.0 {
            why.push("first series diverges by the ratio test".into());
            report(Verdict::Fails, None, Some(limit), why)
        } else {
            why.push("ratio test is inconclusive at limit 1".into());
            report(Verdict::Inconclusive, None, Some(limit), why)
        }
    }

    /// Rate-of-convergence certificate for initial law `gamma` against the
    /// stationary law.
    pub fn rate_condition_check(&self, gamma: &InitialLaw, n_probe: usize) -> RateReport {
        let erg = self.ergodicity_check(n_probe);
        let mut why = erg.rationale.clone();
        let verdict = match erg.verdict {
            Verdict::Eq30 => {
                let n0 = erg.n0.unwrap_or(1);
                if gamma.max_support() <= n0 {
                    why.push(format!("initial law is supported on 0..={n0}"));
                    RateVerdict::Eq32
                } else if matches!(gamma, InitialLaw::PointMass(_)) {
                    why.push("finite sums; beta_n = 0 <= delta_(n+1) eventually".into());
                    RateVerdict::Corollary
                } else {
                    why.push(format!("initial law charges states above {n0}"));
                    RateVerdict::Inconclusive
                }
            }
            Verdict::Eq31 => {
                // limit < 1 gives both the root series and β_n ≤ δ_(n+1) eventually
                if matches!(gamma, InitialLaw::PointMass(_)) {
                    why.push("sqrt series has ratio -> sqrt(limit) < 1; beta_n <= delta_(n+1) eventually".into());
                    RateVerdict::Corollary
                } else {
                    why.push("initial law has finite support, so its weighted series is finite".into());
                    RateVerdict::Eq33
                }
            }
            Verdict::Inconclusive | Verdict::Fails => RateVerdict::Inconclusive,
        };
        RateReport { verdict, rationale: why }
    }

    /// `πₙ ∝ Π_{k=1}^{n} β_{k−1}/δ_k`, truncated once the remaining mass is
    /// below `tol`.
    pub fn stationary_distribution(&self, tol: f64) -> Result<Vec<f64>, ChainError> {
        let erg = self.ergodicity_check(10_000);
        if !matches!(erg.verdict, Verdict::Eq30 | Verdict::Eq31) {
            return Err(ChainError::NotErgodic(erg.verdict));
        }
        const MAX_STATES: usize = 10_000_000;
        let mut w = vec![1.0f64];
        let mut sum = 1.0;
        let mut term = 1.0;
        let mut n = 0usize;
        loop {
            let b = self.beta(n);
            if b == 0.0 {
                break;
            }
            let r = b / self.delta(n + 1);
            term *= r;
            n += 1;
            w.push(term);
            sum += term;
            // geometric tail bound once the ratio has dropped below one
            let next = self.beta(n) / self.delta(n + 1);
            if next < 1.0 && term * next / (1.0 - next) < tol * sum {
                break;
            }
            if n >= MAX_STATES {
                return Err(ChainError::TruncationLimit(MAX_STATES));
            }
        }
        Ok(w.into_iter().map(|v| v / sum).collect())
    }

    /// `E₀(s₀) = 1/(π₀ β₀)`.
    pub fn expected_return_time(&self, tol: f64) -> Result<f64, ChainError> {
        let pi = self.stationary_distribution(tol)?;
        let b0 = self.beta(0);
        if b0 == 0.0 {
            return Err(ChainError::InvalidChain("beta_0 = 0: zero is absorbing".into()));
        }
        Ok(1.0 / (pi[0] * b0))
    }

    /// Gillespie simulation from `n0` up to `horizon`.
    pub fn simulate(&self, n0: usize, horizon: f64, seed: u64, index: u64) -> ChainLog {
        let mut wait = substream(seed, index, Substream::Waiting);
        let mut kern = substream(seed, index, Substream::Kernel);
        let mut log = ChainLog {
            n0,
            horizon,
            ..Default::default()
        };
        let mut n = n0;
        let mut t = 0.0;
        loop {
            let b = self.beta(n);
            let d = self.delta(n);
            let a = b + d;
            if a <= 0.0 {
                log.absorbed_at = Some(t);
                return log;
            }
            t += exp_sample(&mut wait, a);
            if t > horizon {
                return log;
            }
            n = if kern.random::<f64>() * a < b { n + 1 } else { n - 1 };
            log.events.push((t, n));
        }
    }

    /// Durations of `cycles` consecutive returns to 0 (holding time at 0
    /// included), from one long path.
    pub fn return_cycles(&self, cycles: usize, seed: u64) -> Vec<f64> {
        let mut wait = substream(seed, 0, Substream::Waiting);
        let mut kern = substream(seed, 0, Substream::Kernel);
        let mut out = Vec::with_capacity(cycles);
        let mut n = 0usize;
        let mut start = 0.0;
        let mut t = 0.0;
        while out.len() < cycles {
            let b = self.beta(n);
            let d = self.delta(n);
            let a = b + d;
            if a <= 0.0 {
                break;
            }
            t += exp_sample(&mut wait, a);
            n = if kern.random::<f64>() * a < b { n + 1 } else { n - 1 };
            if n == 0 {
                out.push(t - start);
                start = t;
            }
        }
        out
    }
}

/// Exponential variate of the given rate by inversion.
pub(crate) fn exp_sample<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(c: f64, shift: f64, p: f64) -> RateSeq {
        RateSeq::closed(ClosedForm::Power { c, shift, p })
    }

    #[test]
    fn ergodicity_examples() {
        let eq30 = SimpleChainSpec::new(
            RateSeq::Closed { form: ClosedForm::constant(1.0), cutoff: Some(3) },
            power(1.0, 0.0, 0.0),
        )
        .unwrap();
        let r = eq30.ergodicity_check(100);
        assert_eq!(r.verdict, Verdict::Eq30);
        assert_eq!(r.n0, Some(3));
        let eq31 = SimpleChainSpec::new(power(1.0, 0.0, 0.0), power(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(eq31.ergodicity_check(100).verdict, Verdict::Eq31);
        let fails = SimpleChainSpec::new(power(2.0, 0.0, 0.0), power(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(fails.ergodicity_check(100).verdict, Verdict::Fails);
        let critical = SimpleChainSpec::new(power(1.0, 0.0, 0.0), power(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(critical.ergodicity_check(100).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn explicit_without_tail_is_inconclusive() {
        let c = SimpleChainSpec::new(
            RateSeq::Explicit { values: vec![1.0; 20], tail: TailRule::Unknown },
            RateSeq::Explicit { values: (0..20).map(|n| n as f64).collect(), tail: TailRule::Unknown },
        )
        .unwrap();
        assert_eq!(c.ergodicity_check(100).verdict, Verdict::Inconclusive);
        assert_eq!(c.rate_condition_check(&InitialLaw::PointMass(0), 100).verdict, RateVerdict::Inconclusive);
    }

    #[test]
    fn rate_condition_examples() {
        let eq30 = SimpleChainSpec::new(
            RateSeq::Closed { form: ClosedForm::constant(1.0), cutoff: Some(3) },
            power(1.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(eq30.rate_condition_check(&InitialLaw::PointMass(2), 100).verdict, RateVerdict::Eq32);
        let eq31 = SimpleChainSpec::new(power(1.0, 0.0, 0.0), power(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(eq31.rate_condition_check(&InitialLaw::PointMass(0), 100).verdict, RateVerdict::Corollary);
        assert_eq!(
            eq31.rate_condition_check(&InitialLaw::Weights(vec![0.5, 0.5]), 100).verdict,
            RateVerdict::Eq33
        );
    }

    #[test]
    fn stationary_examples() {
        let mm = SimpleChainSpec::new(power(2.0, 0.0, 0.0), power(1.0, 0.0, 1.0)).unwrap();
        let pi = mm.stationary_distribution(1e-14).unwrap();
        assert!((pi[0] - (-2.0f64).exp()).abs() < 1e-12);
        let two = SimpleChainSpec::new(
            RateSeq::Closed { form: ClosedForm::constant(1.0), cutoff: Some(1) },
            power(1.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(two.stationary_distribution(1e-12).unwrap(), vec![0.5, 0.5]);
        assert_eq!(two.expected_return_time(1e-12).unwrap(), 2.0);
        let recip = SimpleChainSpec::new(power(1.0, 1.0, -1.0), power(1.0, 0.0, 0.0)).unwrap();
        let e = recip.expected_return_time(1e-15).unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-12);
        let e2 = mm.expected_return_time(1e-15).unwrap();
        assert!((e2 - 3.6945280494653).abs() < 1e-9);
    }

    #[test]
    fn not_ergodic_is_an_error() {
        let fails = SimpleChainSpec::new(power(2.0, 0.0, 0.0), power(1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(fails.stationary_distribution(1e-9), Err(ChainError::NotErgodic(Verdict::Fails))));
    }

    #[test]
    fn pure_death_has_exactly_n_events() {
        let c = SimpleChainSpec::new(power(0.0, 0.0, 0.0), power(1.0, 0.0, 1.0)).unwrap();
        let log = c.simulate(5, 1e9, 1, 0);
        assert_eq!(log.events.len(), 5);
        assert!(log.events.windows(2).all(|w| w[1].1 + 1 == w[0].1));
        assert_eq!(log.events.last().unwrap().1, 0);
        assert!(log.absorbed_at.is_some());
    }

    #[test]
    fn first_event_from_zero_is_birth() {
        let c = SimpleChainSpec::new(power(1.0, 0.0, 0.0), power(1.0, 0.0, 1.0)).unwrap();
        for s in 0..50 {
            let log = c.simulate(0, 100.0, s, 0);
            assert_eq!(log.events[0].1, 1);
        }
    }
}
