use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config_space::Configuration;
use crate::jump_kernels::JumpType;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("malformed log: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event<S: Scalar = f64> {
    pub t: f64,
    pub kind: JumpType,
    /// Count after the jump.
    pub n: usize,
    /// State after the jump, absent above the size cap.
    pub state: Option<Configuration<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<S: Scalar = f64> {
    pub t: f64,
    pub n: usize,
    pub state: Option<Configuration<S>>,
}

/// One simulated path.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog<S: Scalar = f64> {
    pub seed: u64,
    pub index: u64,
    pub horizon: f64,
    pub model_hash: String,
    pub initial: Configuration<S>,
    pub events: Vec<Event<S>>,
    pub checkpoints: Vec<Checkpoint<S>>,
    /// Number of jumps, also when events were not recorded.
    pub jumps: usize,
    /// State at the horizon.
    pub final_state: Configuration<S>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct Header<S: Scalar> {
    model_hash: String,
    seed: u64,
    index: u64,
    horizon: f64,
    dim: usize,
    jumps: usize,
    initial: Vec<Vec<S>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum LineKind {
    Birth,
    Death,
    Checkpoint,
    Final,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "")]
struct Line<S: Scalar> {
    t: f64,
    kind: LineKind,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<S>>>,
}

impl<S: Scalar> TrajectoryLog<S> {
    /// Count at time `t`, from the recorded events.
    pub fn count_at(&self, t: f64) -> usize {
        let k = self.events.partition_point(|e| e.t <= t);
        if k == 0 {
            self.initial.count()
        } else {
            self.events[k - 1].n
        }
    }

    /// Waiting times between consecutive jumps (the first measured from 0).
    pub fn waiting_times(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.events
            .iter()
            .map(|e| {
                let w = e.t - prev;
                prev = e.t;
                w
            })
            .collect()
    }

    /// Strictly increasing event times, ±1 count steps, and checkpoint counts
    /// consistent with the events.
    pub fn check_structure(&self) -> Result<(), String> {
        let mut prev_t = 0.0;
        let mut prev_n = self.initial.count();
        for (i, e) in self.events.iter().enumerate() {
            if !(e.t > prev_t) && !(i == 0 && e.t >= 0.0) {
                return Err(format!("event {i}: time {} not after {prev_t}", e.t));
            }
            let step = e.n as i64 - prev_n as i64;
            let expect = if e.kind == JumpType::Birth { 1 } else { -1 };
            if step != expect {
                return Err(format!("event {i}: count step {step} for a {:?}", e.kind));
            }
            if let Some(s) = &e.state {
                if s.count() != e.n {
                    return Err(format!("event {i}: stored state has {} points, expected {}", s.count(), e.n));
                }
            }
            prev_t = e.t;
            prev_n = e.n;
        }
        if self.jumps == self.events.len() {
            for c in &self.checkpoints {
                if c.n != self.count_at(c.t) {
                    return Err(format!("checkpoint at {}: count {} disagrees with events", c.t, c.n));
                }
            }
            if self.final_state.count() != prev_n {
                return Err("final state count disagrees with events".into());
            }
        }
        Ok(())
    }

    /// Writes the header line, then events and checkpoints in time order,
    /// then the final state.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), LogError> {
        let header = Header::<S> {
            model_hash: self.model_hash.clone(),
            seed: self.seed,
            index: self.index,
            horizon: self.horizon,
            dim: self.initial.dim(),
            jumps: self.jumps,
            initial: self.initial.to_points(),
        };
        let put = |w: &mut W, s: String| -> Result<(), LogError> {
            w.write_all(s.as_bytes())?;
            w.write_all(b"\n")?;
            Ok(())
        };
        put(&mut w, json(&header))?;
        let (mut i, mut j) = (0, 0);
        while i < self.events.len() || j < self.checkpoints.len() {
            let take_event = j >= self.checkpoints.len() || (i < self.events.len() && self.events[i].t <= self.checkpoints[j].t);
            let line = if take_event {
                let e = &self.events[i];
                i += 1;
                Line::<S> {
                    t: e.t,
                    kind: match e.kind {
                        JumpType::Birth => LineKind::Birth,
                        JumpType::Death => LineKind::Death,
                    },
                    n: e.n,
                    points: e.state.as_ref().map(|s| s.to_points()),
                }
            } else {
                let c = &self.checkpoints[j];
                j += 1;
                Line::<S> {
                    t: c.t,
                    kind: LineKind::Checkpoint,
                    n: c.n,
                    points: c.state.as_ref().map(|s| s.to_points()),
                }
            };
            put(&mut w, json(&line))?;
        }
        let fin = Line::<S> {
            t: self.horizon,
            kind: LineKind::Final,
            n: self.final_state.count(),
            points: Some(self.final_state.to_points()),
        };
        put(&mut w, json(&fin))?;
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, LogError> {
        let mut lines = r.lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| LogError::Malformed("empty log".into()))?;
        let header: Header<S> = serde_json::from_str(&first?).map_err(|source| LogError::Json { line: 1, source })?;
        let dim = header.dim;
        let cfg = |pts: &[Vec<S>]| Configuration::from_points(dim, pts).map_err(|e| LogError::Malformed(e.to_string()));
        let mut log = TrajectoryLog {
            seed: header.seed,
            index: header.index,
            horizon: header.horizon,
            model_hash: header.model_hash,
            initial: cfg(&header.initial)?,
            events: Vec::new(),
            checkpoints: Vec::new(),
            jumps: header.jumps,
            final_state: Configuration::empty(dim),
        };
        let mut saw_final = false;
        for (k, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let l: Line<S> = serde_json::from_str(&line).map_err(|source| LogError::Json { line: k + 1, source })?;
            let state = l.points.as_deref().map(cfg).transpose()?;
            match l.kind {
                LineKind::Birth | LineKind::Death => log.events.push(Event {
                    t: l.t,
                    kind: if l.kind == LineKind::Birth { JumpType::Birth } else { JumpType::Death },
                    n: l.n,
                    state,
                }),
                LineKind::Checkpoint => log.checkpoints.push(Checkpoint { t: l.t, n: l.n, state }),
                LineKind::Final => {
                    log.final_state = state.ok_or_else(|| LogError::Malformed("final line without points".into()))?;
                    saw_final = true;
                }
            }
        }
        if !saw_final {
            return Err(LogError::Malformed("missing final line".into()));
        }
        Ok(log)
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("log records serialise")
}
