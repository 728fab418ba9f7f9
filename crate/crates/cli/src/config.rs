//! TOML run configuration. Every field has an explicit default so that the
//! resolved echo is a complete, re-runnable document.

use bdmove::bd_chain::{ClosedForm, TailRule};
use bdmove::diagnostics::TestFunction;
use bdmove::jump_kernels::{CountNorm, DEFAULT_LINEAR_DEATH_CAP};
use bdmove::movers::{DEFAULT_STEP, DEFAULT_TAMING};
use bdmove::potentials::{PairPotential, QuadratureSpec};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensities: Option<IntensitiesCfg>,
    #[serde(default)]
    pub birth: BirthCfg,
    #[serde(default)]
    pub death: DeathCfg,
    #[serde(default)]
    pub mover: MoverCfg,
    #[serde(default)]
    pub run: RunCfg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainCfg>,
    #[serde(default)]
    pub couple: CoupleCfg,
    #[serde(default)]
    pub gibbs: GibbsCfg,
    #[serde(default)]
    pub diagnose: DiagnoseCfg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

/// A box `Π [lo, hi]`, or the unbounded space of dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainCfg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialCfg {
    #[serde(default)]
    pub activity: f64,
    pub pair: PairPotential<f64>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensitiesCfg {
    pub birth: BirthRateCfg,
    pub death: DeathRateCfg,
    /// Filled with the closed-form supremum of `α` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_star: Option<f64>,
    /// Build the model without checking `α ≤ α*`; violations then abort the run.
    #[serde(default)]
    pub skip_bound_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BirthRateCfg {
    Zero,
    Constant { rate: f64 },
    PerCapitaCutoff { b0: f64, cutoff: usize },
    /// Uses `[potential]`.
    Gibbs {
        #[serde(default)]
        norm: CountNorm,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeathRateCfg {
    Zero,
    Unit,
    Constant {
        rate: f64,
    },
    Linear {
        d0: f64,
        #[serde(default = "default_cap")]
        cap: usize,
    },
}

fn default_cap() -> usize {
    DEFAULT_LINEAR_DEATH_CAP
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BirthCfg {
    #[default]
    Uniform,
    /// Uses `[potential]`.
    Gibbs,
    Mixture {
        sigma: f64,
        site: SiteCfg,
        interaction: InteractionCfg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SiteCfg {
    Constant { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InteractionCfg {
    Constant { c: f64 },
    ExpDecay { amp: f64, scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeathCfg {
    #[default]
    Uniform,
    Weighted { weight: WeightCfg },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightCfg {
    Constant { c: f64 },
    Linear { intercept: f64, slope: f64 },
    ExpDecay { scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MoverCfg {
    #[default]
    Constant,
    Langevin {
        #[serde(default = "default_inv_temp")]
        inv_temp: f64,
        /// Defaults to the pair potential of `[potential]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair: Option<PairPotential<f64>>,
        #[serde(default = "default_step")]
        step: f64,
        #[serde(default = "default_taming")]
        taming: f64,
    },
    Growth {
        family: GrowthCfg,
        #[serde(default = "default_step")]
        step: f64,
    },
    ReflectedBrownian {
        #[serde(default = "default_inv_temp")]
        inv_temp: f64,
        #[serde(default = "default_step")]
        step: f64,
    },
}

fn default_inv_temp() -> f64 {
    2.0
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

fn default_taming() -> f64 {
    DEFAULT_TAMING
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthCfg {
    Constant { kappa: f64 },
    Logistic { kappa: f64, cap: f64 },
    Competition { kappa: f64, cap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunCfg {
    pub horizon: f64,
    pub checkpoints: Vec<f64>,
    pub trials: usize,
    /// Points of the initial configuration.
    pub initial: Vec<Vec<f64>>,
    pub state_cap: usize,
    pub record_events: bool,
}

impl Default for RunCfg {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            checkpoints: Vec::new(),
            trials: 1,
            initial: Vec::new(),
            state_cap: 1024,
            record_events: true,
        }
    }
}

/// An explicit simple birth-death chain. Without it the dominating chain of
/// the model is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainCfg {
    pub beta: SeqCfg,
    pub delta: SeqCfg,
    #[serde(default = "default_probe")]
    pub n_probe: usize,
}

fn default_probe() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeqCfg {
    Closed {
        form: ClosedForm,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Explicit {
        values: Vec<f64>,
        #[serde(default = "default_tail")]
        tail: TailRule,
    },
}

fn default_tail() -> TailRule {
    TailRule::Unknown
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoupleCfg {
    /// Initial chain state; defaults to the initial point count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    pub times: Vec<f64>,
    pub trials: usize,
    /// Two-sample tests pass when `p > alpha`.
    pub alpha: f64,
}

impl Default for CoupleCfg {
    fn default() -> Self {
        Self {
            n0: None,
            times: vec![1.0, 5.0],
            trials: 10_000,
            alpha: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GibbsMode {
    /// Process checkpoints against the oracle.
    #[default]
    Process,
    /// Oracle against an independent oracle run.
    Calibration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GibbsCfg {
    pub mode: GibbsMode,
    pub burn_in: f64,
    pub spacing: f64,
    pub samples: usize,
    pub trajectories: usize,
    pub oracle_chains: usize,
    pub sweep_len: usize,
    pub burn_in_sweeps: usize,
    pub count_tv_max: f64,
    pub ks_max: f64,
}

impl Default for GibbsCfg {
    fn default() -> Self {
        Self {
            mode: GibbsMode::Process,
            burn_in: 20.0,
            spacing: 1.0,
            samples: 20_000,
            trajectories: 40,
            oracle_chains: 16,
            sweep_len: 20,
            burn_in_sweeps: 200,
            count_tv_max: 0.03,
            ks_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnoseCfg {
    /// Configurations at which the generator identity is checked.
    pub points: Vec<Vec<Vec<f64>>>,
    pub functions: Vec<TestFunction>,
    pub h: f64,
    pub trials: usize,
    /// Times of the jump-count domination reports, started from `[run] initial`.
    pub domination_times: Vec<f64>,
    pub domination_trials: usize,
}

impl Default for DiagnoseCfg {
    fn default() -> Self {
        Self {
            points: Vec::new(),
            functions: Vec::new(),
            h: 0.01,
            trials: 20_000,
            domination_times: Vec::new(),
            domination_trials: 10_000,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            anyhow::bail!("unsupported schema_version {} (expected {SCHEMA_VERSION})", cfg.schema_version);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }
}
