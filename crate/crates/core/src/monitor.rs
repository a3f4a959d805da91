//! Compilation of a requirements table into parallel three-phase monitor
//! machines, and their step-by-step execution over a trace.
//!
//! Each requirement becomes one machine with phases
//!
//! * `PRC`: waiting for the precondition,
//! * `WT`: precondition holds, waiting for the duration to elapse
//!   (only when the requirement declares a positive duration),
//! * `POA`: postcondition active; its satisfaction degree is emitted and the
//!   requirement's actions run.
//!
//! At most one transition fires per machine per step. Outside `POA` a machine
//! emits `+inf`. The fitness of a run is the minimum of everything emitted.

use std::collections::{BTreeMap, HashMap};
use std::io;

use serde::Serialize;
use thiserror::Error;

use crate::aggregate::RunningMin;
use crate::expr::{BoolExpr, Degree, Env, EvalError};
use crate::sim::{SimError, Trace};
use crate::table::{validate, Assignment, Diagnostic, RequirementsTable};

#[derive(Debug, Error)]
pub enum MonitorError {
    #[error("table failed validation ({} diagnostics)", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error("req {requirement} at t = {t}: {source}")]
    Eval {
        requirement: u32,
        t: f64,
        source: EvalError,
    },
    #[error("no action assigned output `{output}` at t = {t}")]
    MissingAction { output: String, t: f64 },
    #[error("conflicting actions on `{output}` at t = {t}: {first} vs {second}")]
    ConflictingAction {
        output: String,
        t: f64,
        first: f64,
        second: f64,
    },
    #[error("input signal `{0}` is not available")]
    MissingSignal(String),
    #[error("time must strictly increase (got {t} after {last})")]
    NonIncreasingTime { t: f64, last: f64 },
    #[error(transparent)]
    Trace(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    #[serde(rename = "PRC")]
    Prc,
    #[serde(rename = "WT")]
    Wt,
    #[serde(rename = "POA")]
    Poa,
}

/// One requirement's machine.
#[derive(Debug, Clone, PartialEq)]
pub struct Machine {
    pub index: u32,
    /// `None` is the constant-true guard.
    pub guard: Option<BoolExpr>,
    /// Present only for positive durations; a zero duration arms `POA` directly.
    pub duration: Option<f64>,
    pub postcondition: Option<BoolExpr>,
    pub actions: Vec<Assignment>,
}

impl Machine {
    pub fn has_wait_phase(&self) -> bool {
        self.duration.is_some()
    }

    fn guard_holds(&self, env: &Env) -> Result<bool, EvalError> {
        match &self.guard {
            Some(g) => g.eval(env),
            None => Ok(true),
        }
    }
}

/// The compiled, immutable monitor for a whole table.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorAutomaton {
    pub machines: Vec<Machine>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Signals read through `prev(...)`; each gets a one-step delay buffer.
    pub prev_signals: Vec<String>,
    pub initial_values: BTreeMap<String, f64>,
}

impl MonitorAutomaton {
    pub fn compile(table: &RequirementsTable) -> Result<Self, MonitorError> {
        let diags = validate(table);
        if !diags.is_empty() {
            return Err(MonitorError::Invalid(diags));
        }
        let machines = table
            .requirements
            .iter()
            .map(|r| Machine {
                index: r.index,
                guard: r.precondition.clone(),
                duration: r.duration.filter(|d| *d > 0.0),
                postcondition: r.postcondition.clone(),
                actions: r.actions.clone(),
            })
            .collect();
        Ok(MonitorAutomaton {
            machines,
            inputs: table.inputs.clone(),
            outputs: table.outputs.clone(),
            prev_signals: table.prev_signals(),
            initial_values: table.initial_values.clone(),
        })
    }

    /// Enters every machine through its initial junction at time `t0`.
    pub fn init(
        &self,
        signals: &HashMap<String, f64>,
        t0: f64,
    ) -> Result<MonitorState, MonitorError> {
        let mut state = MonitorState::fresh(self);
        state.advance(self, t0, |n| signals.get(n).copied(), true)?;
        Ok(state)
    }

    /// Runs the monitor over a whole trace sampled at `k * dt`.
    pub fn run(&self, trace: &Trace) -> Result<MonitorRun, MonitorError> {
        let columns: Vec<(&str, &[f64])> = self
            .inputs
            .iter()
            .map(|n| {
                trace
                    .get(n)
                    .map(|c| (n.as_str(), c))
                    .ok_or_else(|| MonitorError::MissingSignal(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        let lookup = |k: usize| {
            let columns = &columns;
            move |name: &str| columns.iter().find(|(n, _)| *n == name).map(|(_, c)| c[k])
        };

        let n = trace.len();
        let mut run = MonitorRun {
            requirement_indexes: self.machines.iter().map(|m| m.index).collect(),
            times: Vec::with_capacity(n),
            degrees: Vec::with_capacity(n),
            running: Vec::with_capacity(n),
            phases: Vec::with_capacity(n),
            outputs: Trace::with_len(trace.dt(), n),
            fitness: Degree::INFINITY,
        };
        let mut out_cols: Vec<Vec<f64>> = vec![Vec::with_capacity(n); self.outputs.len()];
        let mut state = MonitorState::fresh(self);
        for k in 0..n {
            let t = trace.time(k);
            state.advance(self, t, lookup(k), k == 0)?;
            run.times.push(t);
            run.degrees.push(state.step_degrees.clone());
            run.running.push(state.running.current());
            run.phases.push(state.phases.clone());
            for (col, name) in out_cols.iter_mut().zip(&self.outputs) {
                col.push(state.action_outputs[name]);
            }
        }
        for (name, col) in self.outputs.iter().zip(out_cols) {
            run.outputs.insert(name.clone(), col)?;
        }
        run.fitness = state.running.finalize();
        Ok(run)
    }
}

/// Free function form of [`MonitorAutomaton::compile`].
pub fn compile(table: &RequirementsTable) -> Result<MonitorAutomaton, MonitorError> {
    MonitorAutomaton::compile(table)
}

pub fn monitor_init(
    a: &MonitorAutomaton,
    signals: &HashMap<String, f64>,
    t0: f64,
) -> Result<MonitorState, MonitorError> {
    a.init(signals, t0)
}

pub fn monitor_step(
    state: &mut MonitorState,
    a: &MonitorAutomaton,
    signals: &HashMap<String, f64>,
    t: f64,
) -> Result<(), MonitorError> {
    state.step(a, signals, t)
}

pub fn run_monitor(a: &MonitorAutomaton, trace: &Trace) -> Result<MonitorRun, MonitorError> {
    a.run(trace)
}

/// Runtime state of all machines. Accessors report the most recent step.
#[derive(Debug, Clone)]
pub struct MonitorState {
    phases: Vec<Phase>,
    entry_times: Vec<f64>,
    prev_buffer: HashMap<String, f64>,
    action_outputs: BTreeMap<String, f64>,
    step_degrees: Vec<Degree>,
    running: RunningMin,
    last_t: Option<f64>,
    env: Env,
}

impl MonitorState {
    fn fresh(a: &MonitorAutomaton) -> Self {
        let prev_buffer = a
            .prev_signals
            .iter()
            .map(|s| (s.clone(), a.initial_values[s]))
            .collect();
        let n = a.machines.len();
        MonitorState {
            phases: vec![Phase::Prc; n],
            entry_times: vec![0.0; n],
            prev_buffer,
            action_outputs: BTreeMap::new(),
            step_degrees: vec![Degree::INFINITY; n],
            running: RunningMin::new(),
            last_t: None,
            env: Env::default(),
        }
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    /// Elapsed time in the current phase for machine `i` (meaningful in `WT`).
    pub fn elapsed(&self, i: usize) -> f64 {
        self.last_t.unwrap_or(0.0) - self.entry_times[i]
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.step_degrees
    }

    pub fn outputs(&self) -> &BTreeMap<String, f64> {
        &self.action_outputs
    }

    pub fn prev_buffer(&self) -> &HashMap<String, f64> {
        &self.prev_buffer
    }

    /// Running fitness over all steps so far.
    pub fn fitness(&self) -> Degree {
        self.running.current()
    }

    pub fn step(
        &mut self,
        a: &MonitorAutomaton,
        signals: &HashMap<String, f64>,
        t: f64,
    ) -> Result<(), MonitorError> {
        self.advance(a, t, |n| signals.get(n).copied(), false)
    }

    fn advance<F>(
        &mut self,
        a: &MonitorAutomaton,
        t: f64,
        lookup: F,
        initial: bool,
    ) -> Result<(), MonitorError>
    where
        F: Fn(&str) -> Option<f64>,
    {
        let step_tol = match (initial, self.last_t) {
            (true, _) => 0.0,
            (false, Some(last)) if t > last => 1e-9 * (t - last),
            (false, Some(last)) => return Err(MonitorError::NonIncreasingTime { t, last }),
            (false, None) => {
                return Err(MonitorError::NonIncreasingTime {
                    t,
                    last: f64::NEG_INFINITY,
                })
            }
        };

        self.env.t = t;
        for name in &a.inputs {
            let v = lookup(name).ok_or_else(|| MonitorError::MissingSignal(name.clone()))?;
            set(&mut self.env.signals, name, v);
        }
        for (name, &v) in &self.prev_buffer {
            set(&mut self.env.prev, name, v);
        }

        for (i, m) in a.machines.iter().enumerate() {
            let err = |source| MonitorError::Eval {
                requirement: m.index,
                t,
                source,
            };
            let guard = m.guard_holds(&self.env).map_err(err)?;
            let phase = self.phases[i];
            let next = if initial {
                match (guard, m.has_wait_phase()) {
                    (false, _) => Phase::Prc,
                    (true, true) => Phase::Wt,
                    (true, false) => Phase::Poa,
                }
            } else {
                match phase {
                    Phase::Prc if guard && m.has_wait_phase() => Phase::Wt,
                    Phase::Prc if guard => Phase::Poa,
                    Phase::Prc => Phase::Prc,
                    Phase::Wt if !guard => Phase::Prc,
                    Phase::Wt => {
                        let et = t - self.entry_times[i];
                        let d = m.duration.unwrap_or(0.0);
                        if et >= d - step_tol {
                            Phase::Poa
                        } else {
                            Phase::Wt
                        }
                    }
                    Phase::Poa if !guard => Phase::Prc,
                    Phase::Poa => Phase::Poa,
                }
            };
            if initial || next != phase {
                self.entry_times[i] = t;
            }
            self.phases[i] = next;
        }

        self.action_outputs.clear();
        for (i, m) in a.machines.iter().enumerate() {
            if self.phases[i] != Phase::Poa {
                continue;
            }
            for act in &m.actions {
                let v = act
                    .value
                    .eval(&self.env)
                    .map_err(|source| MonitorError::Eval {
                        requirement: m.index,
                        t,
                        source,
                    })?;
                if let Some(&first) = self.action_outputs.get(&act.target) {
                    if first != v {
                        return Err(MonitorError::ConflictingAction {
                            output: act.target.clone(),
                            t,
                            first,
                            second: v,
                        });
                    }
                }
                self.action_outputs.insert(act.target.clone(), v);
            }
        }
        for out in &a.outputs {
            match self.action_outputs.get(out) {
                Some(&v) => set(&mut self.env.signals, out, v),
                None => {
                    return Err(MonitorError::MissingAction {
                        output: out.clone(),
                        t,
                    })
                }
            }
        }

        for (i, m) in a.machines.iter().enumerate() {
            self.step_degrees[i] = match (self.phases[i], &m.postcondition) {
                (Phase::Poa, Some(post)) => {
                    post.degree(&self.env)
                        .map_err(|source| MonitorError::Eval {
                            requirement: m.index,
                            t,
                            source,
                        })?
                }
                _ => Degree::INFINITY,
            };
        }
        self.running.update(&self.step_degrees);

        for name in &a.prev_signals {
            if let Some(&v) = self.env.signals.get(name) {
                set(&mut self.prev_buffer, name, v);
            }
        }
        self.last_t = Some(t);
        Ok(())
    }
}

fn set(map: &mut HashMap<String, f64>, name: &str, v: f64) {
    match map.get_mut(name) {
        Some(slot) => *slot = v,
        None => {
            map.insert(name.to_string(), v);
        }
    }
}

/// Everything recorded while monitoring one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRun {
    pub requirement_indexes: Vec<u32>,
    pub times: Vec<f64>,
    /// `degrees[k][i]`: degree of machine `i` at step `k`.
    pub degrees: Vec<Vec<Degree>>,
    /// Running minimum after each step.
    pub running: Vec<Degree>,
    pub phases: Vec<Vec<Phase>>,
    /// Action outputs per step.
    pub outputs: Trace,
    pub fitness: Degree,
}

impl MonitorRun {
    /// Requirements whose degree reached the (negative) fitness at some step.
    pub fn violated_requirements(&self) -> Vec<u32> {
        if !self.fitness.is_violation() {
            return Vec::new();
        }
        self.requirement_indexes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.degrees.iter().any(|row| row[*i] == self.fitness))
            .map(|(_, idx)| *idx)
            .collect()
    }

    /// Columns `t, ff_1..ff_n, ff_total_running`.
    pub fn write_degree_csv<W: io::Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend(self.requirement_indexes.iter().map(|i| format!("ff_{i}")));
        header.push("ff_total_running".into());
        out.write_record(&header)?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.degrees[k].iter().map(|d| d.to_string()));
            row.push(self.running[k].to_string());
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| SimError::Csv(e.to_string()))?;
        Ok(())
    }
}
