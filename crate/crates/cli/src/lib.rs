//! Command-line front end for `bdmove`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime model error,
//! 4 a check failed (or the chain verdict is `Fails`), 5 inconclusive verdict.

pub mod config;
pub mod model;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use bdmove::bd_chain::{InitialLaw, RateVerdict, Verdict};
use bdmove::diagnostics::{coupling_check, generator_check, gibbs_invariance_check, gibbs_oracle_calibration, GibbsCheckOptions, OracleOptions};
use bdmove::engine::{poisson_domination_report, simulate_with, SimOptions};
use bdmove::rng::par_map;
use bdmove::Scalar;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{GibbsMode, Precision, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Couple,
    CheckErgodicity,
    GibbsValidate,
    Diagnose,
}

#[derive(Debug, Parser)]
#[command(name = "bdmove", version, about = "Birth-death-move process simulation and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Simulate trajectories and write their logs.
    Simulate(Args),
    /// Run the coupled process against its dominating chain.
    Couple(Args),
    /// Print ergodicity and rate verdicts of the count chain.
    CheckErgodicity(Args),
    /// Compare long-run states with the Gibbs oracle.
    GibbsValidate(Args),
    /// Generator-identity and jump-count domination batches.
    Diagnose(Args),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// JSONL record file; the resolved configuration goes to `<out>.resolved.toml`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the trial or sample count of the command.
    #[arg(long)]
    pub trials: Option<usize>,
}

impl Sub {
    pub fn split(self) -> (Command, Args) {
        match self {
            Sub::Simulate(a) => (Command::Simulate, a),
            Sub::Couple(a) => (Command::Couple, a),
            Sub::CheckErgodicity(a) => (Command::CheckErgodicity, a),
            Sub::GibbsValidate(a) => (Command::GibbsValidate, a),
            Sub::Diagnose(a) => (Command::Diagnose, a),
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    Inconclusive,
}

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Runtime(e) => e,
        }
    }
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 4,
            Status::Inconclusive => 5,
        }
    }
}

trait Classify<T> {
    fn config(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }
    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

/// Reads the configuration, applies overrides and fills every default.
pub fn load(args: &Args, cmd: Command) -> anyhow::Result<RunConfig> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg = RunConfig::parse(&text).with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.trials {
        match cmd {
            Command::Simulate => cfg.run.trials = n,
            Command::Couple => cfg.couple.trials = n,
            Command::GibbsValidate => cfg.gibbs.samples = n,
            Command::Diagnose => cfg.diagnose.trials = n,
            Command::CheckErgodicity => {}
        }
    }
    model::resolve(&mut cfg)?;
    Ok(cfg)
}

/// Path of the resolved-config echo next to `out`.
pub fn resolved_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".resolved.toml");
    PathBuf::from(s)
}

/// Runs one command; the resolved configuration goes to `echo` first.
pub fn execute<W: Write>(cmd: Command, args: &Args, echo: &mut W) -> Result<Status, Failure> {
    let cfg = load(args, cmd).config()?;
    let resolved = cfg.to_toml().config()?;
    writeln!(echo, "# resolved configuration\n{resolved}").runtime()?;
    if let Some(out) = &args.out {
        fs::write(resolved_path(out), &resolved).runtime()?;
    }
    let mut sink = Sink::open(args.out.as_deref()).runtime()?;
    let status = match cfg.precision {
        Precision::F64 => dispatch::<f64, W>(cmd, &cfg, &mut sink, echo),
        Precision::F32 => dispatch::<f32, W>(cmd, &cfg, &mut sink, echo),
    }?;
    sink.finish().runtime()?;
    Ok(status)
}

/// JSONL output; discarded when no path is given.
struct Sink {
    w: Option<BufWriter<fs::File>>,
}

impl Sink {
    fn open(path: Option<&Path>) -> anyhow::Result<Self> {
        let w = match path {
            Some(p) => Some(BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => None,
        };
        Ok(Self { w })
    }

    fn record<T: Serialize>(&mut self, kind: &str, value: &T) -> anyhow::Result<()> {
        if let Some(w) = &mut self.w {
            let mut v = serde_json::to_value(value)?;
            if let serde_json::Value::Object(m) = &mut v {
                m.insert("record".into(), kind.into());
            }
            serde_json::to_writer(&mut *w, &v)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    fn raw(&mut self) -> Option<&mut BufWriter<fs::File>> {
        self.w.as_mut()
    }

    fn finish(self) -> anyhow::Result<()> {
        if let Some(mut w) = self.w {
            w.flush()?;
        }
        Ok(())
    }
}

fn dispatch<S: Scalar, W: Write>(cmd: Command, cfg: &RunConfig, sink: &mut Sink, echo: &mut W) -> Result<Status, Failure> {
    match cmd {
        Command::Simulate => simulate::<S, W>(cfg, sink, echo),
        Command::Couple => couple::<S, W>(cfg, sink, echo),
        Command::CheckErgodicity => check_ergodicity(cfg, sink, echo),
        Command::GibbsValidate => gibbs_validate::<S, W>(cfg, sink, echo),
        Command::Diagnose => diagnose::<S, W>(cfg, sink, echo),
    }
}

fn summary<W: Write, T: Serialize>(echo: &mut W, value: &T) -> Result<(), Failure> {
    let line = serde_json::to_string(value).runtime()?;
    writeln!(echo, "{line}").runtime()
}

fn simulate<S: Scalar, W: Write>(cfg: &RunConfig, sink: &mut Sink, echo: &mut W) -> Result<Status, Failure> {
    let m = model::model::<S>(cfg).config()?;
    let x0 = model::configuration(&m.domain, &cfg.run.initial).config()?;
    let opts = SimOptions {
        checkpoints: cfg.run.checkpoints.clone(),
        state_cap: cfg.run.state_cap,
        record_events: cfg.run.record_events,
    };
    let logs = par_map(cfg.run.trials, |i| simulate_with(&m, &x0, cfg.run.horizon, &opts, cfg.seed, i as u64));
    let mut jumps = 0usize;
    let mut final_count = 0usize;
    for log in logs {
        let log = log.runtime()?;
        jumps += log.jumps;
        final_count += log.final_state.count();
        if let Some(w) = sink.raw() {
            log.write_jsonl(&mut *w).runtime()?;
        }
    }
    let n = cfg.run.trials.max(1) as f64;
    summary(
        echo,
        &serde_json::json!({
            "command": "simulate",
            "trials": cfg.run.trials,
            "mean_jumps": jumps as f64 / n,
            "mean_final_count": final_count as f64 / n,
        }),
    )?;
    Ok(Status::Ok)
}

fn couple<S: Scalar, W: Write>(cfg: &RunConfig, sink: &mut Sink, echo: &mut W) -> Result<Status, Failure> {
    let m = model::model::<S>(cfg).config()?;
    let chain = model::chain(cfg).config()?;
    let x0 = model::configuration(&m.domain, &cfg.run.initial).config()?;
    let n0 = cfg.couple.n0.ok_or_else(|| anyhow!("n0 unresolved")).config()?;
    let report = coupling_check(&m, &chain, &x0, n0, &cfg.couple.times, cfg.couple.trials, cfg.seed).runtime()?;
    let pass = report.pass(cfg.couple.alpha);
    sink.record("coupling", &report).runtime()?;
    summary(
        echo,
        &serde_json::json!({
            "command": "couple",
            "trials": report.trials,
            "violations": report.violations,
            "min_p_chain": report.chain_marginal.iter().map(|t| t.p_value).fold(1.0, f64::min),
            "min_p_count": report.count_marginal.iter().map(|t| t.p_value).fold(1.0, f64::min),
            "pass": pass,
        }),
    )?;
    Ok(if pass { Status::Ok } else { Status::Failed })
}

fn check_ergodicity<W: Write>(cfg: &RunConfig, sink: &mut Sink, echo: &mut W) -> Result<Status, Failure> {
    let chain = model::chain(cfg).config()?;
    let n_probe = cfg.chain.as_ref().map(|c| c.n_probe).unwrap_or(10_000);
    let erg = chain.ergodicity_check(n_probe);
    let rate = chain.rate_condition_check(&InitialLaw::PointMass(cfg.run.initial.len()), n_probe);
    sink.record("ergodicity", &erg).runtime()?;
    sink.record("rate", &rate).runtime()?;
    summary(
        echo,
        &serde_json::json!({
            "command": "check-ergodicity",
            "verdict": erg.verdict,
            "rate_verdict": rate.verdict,
            "rationale": erg.rationale,
        }),
    )?;
    Ok(match (erg.verdict, rate.verdict) {
        (Verdict::Eq30 | Verdict::Eq31, _) | (_, RateVerdict::Corollary) => Status::Ok,
        (Verdict::Fails, _) => Status::Failed,
        (Verdict::Inconclusive, _) => Status::Inconclusive,
    })
}

fn gibbs_options(cfg: &RunConfig) -> GibbsCheckOptions {
    let g = &cfg.gibbs;
    GibbsCheckOptions {
        burn_in: g.burn_in,
        spacing: g.spacing,
        samples: g.samples,
        trajectories: g.trajectories,
        oracle: OracleOptions {
            chains: g.oracle_chains,
            sweep_len: g.sweep_len,
            burn_in_sweeps: g.burn_in_sweeps,
        },
        count_tv_max: g.count_tv_max,
        ks_max: g.ks_max,
    }
}

fn gibbs_validate<S: Scalar, W: Write>(cfg: &RunConfig, sink: &mut Sink, echo: &mut W) -> Result<Status, Failure> {
    let opts = gibbs_options(cfg);
    let report = match cfg.gibbs.mode {
        GibbsMode::Process => {
            let m = model::model::<S>(cfg).config()?;
            gibbs_invariance_check(&m, &opts, cfg.seed).map_err(|e| match e {
                bdmove::diagnostics::DiagnosticsError::NotGibbs(_) | bdmove::diagnostics::DiagnosticsError::UnboundedDomain => Failure::Config(e.into()),
                other => Failure::Runtime(other.into()),
            })?
        }
        GibbsMode::Calibration => {
            let dom = model::domain::<S>(cfg).config()?;
            let g = model::potential::<S>(cfg).config()?;
            gibbs_oracle_calibration(&g, &dom, &opts, cfg.seed).config()?
        }
    };
    sink.record("gibbs", &report).runtime()?;
    summary(
        echo,
        &serde_json::json!({
            "command": "gibbs-validate",
            "count_law_distance": report.count_law_distance,
            "pairdist_ks": report.pairdist_ks,
            "pass": report.pass,
        }),
    )?;
    Ok(if report.pass { Status::Ok } else { Status::Failed })
}

fn diagnose<S: Scalar, W: Write>(cfg: &RunConfig, sink: &mut Sink, echo: &mut W) -> Result<Status, Failure> {
    let d = &cfg.diagnose;
    let cells = d.points.len() * d.functions.len();
    if cells == 0 && d.domination_times.is_empty() {
        return Err(Failure::Config(anyhow!("empty test matrix: [diagnose] needs points and functions, or domination_times")));
    }
    let m = model::model::<S>(cfg).config()?;
    let mut passed = 0usize;
    let mut failed = 0usize;
    for (pi, pts) in d.points.iter().enumerate() {
        let x = model::configuration(&m.domain, pts).config()?;
        for f in &d.functions {
            let r = generator_check(&m, &x, *f, d.h, d.trials, cfg.seed).runtime()?;
            if r.pass {
                passed += 1;
            } else {
                failed += 1;
            }
            sink.record(
                "generator",
                &serde_json::json!({ "point_set": pi, "function": f, "report": r }),
            )
            .runtime()?;
        }
    }
    let x0 = model::configuration(&m.domain, &cfg.run.initial).config()?;
    for &t in &d.domination_times {
        let r = poisson_domination_report(&m, &x0, t, d.domination_trials, cfg.seed).runtime()?;
        if r.any_violation {
            failed += 1;
        } else {
            passed += 1;
        }
        sink.record("domination", &r).runtime()?;
    }
    summary(
        echo,
        &serde_json::json!({ "command": "diagnose", "passed": passed, "failed": failed }),
    )?;
    Ok(if failed == 0 { Status::Ok } else { Status::Failed })
}
