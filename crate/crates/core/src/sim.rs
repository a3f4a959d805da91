//! Fixed-step simulation harness: traces, the model interface and the
//! built-in benchmark models.

use std::io;

use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("signal mismatch: {0}")]
    SignalMismatch(String),
    #[error("model produced a non-finite value for `{signal}` at t = {t}")]
    NonFiniteOutput { signal: String, t: f64 },
    #[error("signal `{name}` has {got} samples, expected {expected}")]
    LengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for SimError {
    fn from(e: csv::Error) -> Self {
        SimError::Csv(e.to_string())
    }
}

/// Uniformly sampled multi-signal time series. Sample `k` is at `k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    dt: f64,
    len: usize,
    signals: IndexMap<String, Vec<f64>>,
}

/// Number of samples on `[0, horizon]` with step `dt`.
pub fn sample_count(horizon: f64, dt: f64) -> usize {
    (horizon / dt + 1e-9).floor() as usize + 1
}

impl Trace {
    /// Empty trace on `[0, horizon]`.
    pub fn new(dt: f64, horizon: f64) -> Result<Self, SimError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::InvalidGrid(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(SimError::InvalidGrid(format!(
                "horizon must be >= 0, got {horizon}"
            )));
        }
        Ok(Self::with_len(dt, sample_count(horizon, dt)))
    }

    /// Empty trace with exactly `len` samples.
    pub fn with_len(dt: f64, len: usize) -> Self {
        assert!(dt > 0.0 && len >= 1);
        Trace {
            dt,
            len,
            signals: IndexMap::new(),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn horizon(&self) -> f64 {
        (self.len - 1) as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn insert(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), SimError> {
        let name = name.into();
        if values.len() != self.len {
            return Err(SimError::LengthMismatch {
                name,
                got: values.len(),
                expected: self.len,
            });
        }
        self.signals.insert(name, values);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.signals.get(name).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.signals.keys().map(String::as_str)
    }

    pub fn signals(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.signals.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Writes `t` followed by every signal in insertion order.
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend(self.signals.keys().cloned());
        out.write_record(&header)?;
        for k in 0..self.len {
            let mut row = vec![self.time(k).to_string()];
            row.extend(self.signals.values().map(|v| v[k].to_string()));
            out.write_record(&row)?;
        }
        out.flush().map_err(|e| SimError::Csv(e.to_string()))?;
        Ok(())
    }

    /// Reads a trace with a leading `t` column starting at 0 and uniform
    /// spacing. `dt` is inferred from the first two rows unless given; a
    /// single-row file needs it.
    pub fn read_csv<R: io::Read>(r: R, dt: Option<f64>) -> Result<Self, SimError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.first().map(String::as_str) != Some("t") {
            return Err(SimError::Csv("first column must be `t`".into()));
        }
        let mut times = Vec::new();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len() - 1];
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            for (i, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    SimError::Csv(format!("row {}: `{field}` is not a number", row + 2))
                })?;
                if v.is_nan() {
                    return Err(SimError::Csv(format!("row {}: NaN value", row + 2)));
                }
                if i == 0 {
                    times.push(v);
                } else {
                    cols[i - 1].push(v);
                }
            }
        }
        if times.is_empty() {
            return Err(SimError::Csv("no samples".into()));
        }
        let dt = match (dt, times.len()) {
            (Some(dt), _) => dt,
            (None, 1) => {
                return Err(SimError::InvalidGrid(
                    "dt cannot be inferred from one sample".into(),
                ))
            }
            (None, _) => times[1] - times[0],
        };
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::InvalidGrid(format!("non-positive step {dt}")));
        }
        for (k, &t) in times.iter().enumerate() {
            if (t - k as f64 * dt).abs() > 1e-6 * dt.max(1.0) {
                return Err(SimError::InvalidGrid(format!(
                    "sample {k} at t = {t} is off the uniform grid with dt = {dt}"
                )));
            }
        }
        let mut trace = Trace::with_len(dt, times.len());
        for (name, values) in header.into_iter().skip(1).zip(cols) {
            trace.insert(name, values)?;
        }
        Ok(trace)
    }
}

/// A deterministic discrete-time system.
///
/// `step` reads the inputs at sample `k`, writes the outputs at sample `k`
/// and advances `state` to sample `k + 1`. Inputs and outputs are ordered as
/// in [`SystemModel::inputs`] and [`SystemModel::outputs`].
pub trait SystemModel: Send + Sync {
    fn name(&self) -> &str;
    fn inputs(&self) -> &[String];
    fn outputs(&self) -> &[String];
    /// Fresh initial state. Must be identical on every call.
    fn reset(&self) -> Vec<f64>;
    fn step(&self, state: &mut [f64], inputs: &[f64], dt: f64, outputs: &mut [f64]);
}

/// Runs `model` over `inputs` and returns the input trace with the model
/// outputs appended.
pub fn simulate(model: &dyn SystemModel, inputs: &Trace) -> Result<Trace, SimError> {
    let columns: Vec<&[f64]> = model
        .inputs()
        .iter()
        .map(|n| {
            inputs.get(n).ok_or_else(|| {
                SimError::SignalMismatch(format!("model input `{n}` missing from trace"))
            })
        })
        .collect::<Result<_, _>>()?;
    for n in model.outputs() {
        if inputs.get(n).is_some() {
            return Err(SimError::SignalMismatch(format!(
                "model output `{n}` collides with an input column"
            )));
        }
    }

    let n_out = model.outputs().len();
    let mut state = model.reset();
    let mut u = vec![0.0; columns.len()];
    let mut y = vec![0.0; n_out];
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(inputs.len()); n_out];
    for k in 0..inputs.len() {
        for (slot, col) in u.iter_mut().zip(&columns) {
            *slot = col[k];
        }
        model.step(&mut state, &u, inputs.dt(), &mut y);
        for (j, &v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(SimError::NonFiniteOutput {
                    signal: model.outputs()[j].clone(),
                    t: inputs.time(k),
                });
            }
            out[j].push(v);
        }
    }

    let mut trace = inputs.clone();
    for (name, values) in model.outputs().iter().zip(out) {
        trace.insert(name.clone(), values)?;
    }
    Ok(trace)
}

/// Memoryless two-input, two-output gain model with cross contamination:
/// `y1 = clamp(g11*u1 + g21*u2)`, `y2 = clamp(g22*u2 + g12*u1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainCrossModel {
    pub name: String,
    pub g11: f64,
    pub g22: f64,
    /// Gain from input 1 to output 2.
    pub g12: f64,
    /// Gain from input 2 to output 1.
    pub g21: f64,
    pub lo: f64,
    pub hi: f64,
    io: [Vec<String>; 2],
}

impl GainCrossModel {
    pub const LOWER_CLAMP: f64 = -0.49;
    pub const UPPER_CLAMP: f64 = 10.2;

    pub fn new(name: impl Into<String>, g12: f64, g21: f64) -> Self {
        GainCrossModel {
            name: name.into(),
            g11: 1.0,
            g22: 1.0,
            g12,
            g21,
            lo: Self::LOWER_CLAMP,
            hi: Self::UPPER_CLAMP,
            io: [
                vec!["u1".into(), "u2".into()],
                vec!["y1".into(), "y2".into()],
            ],
        }
    }

    pub fn omm_v0() -> Self {
        Self::new("omm-v0", 0.0, 0.0)
    }

    pub fn omm_v1() -> Self {
        Self::new("omm-v1", 0.01, 0.0)
    }

    pub fn omm_v2() -> Self {
        Self::new("omm-v2", 0.01, 0.01)
    }

    pub fn omm_v3() -> Self {
        Self::new("omm-v3", 0.01, 0.1)
    }

    pub fn outputs_for(&self, u1: f64, u2: f64) -> (f64, f64) {
        let y1 = (self.g11 * u1 + self.g21 * u2).clamp(self.lo, self.hi);
        let y2 = (self.g22 * u2 + self.g12 * u1).clamp(self.lo, self.hi);
        (y1, y2)
    }
}

impl SystemModel for GainCrossModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn inputs(&self) -> &[String] {
        &self.io[0]
    }

    fn outputs(&self) -> &[String] {
        &self.io[1]
    }

    fn reset(&self) -> Vec<f64> {
        Vec::new()
    }

    fn step(&self, _state: &mut [f64], inputs: &[f64], _dt: f64, outputs: &mut [f64]) {
        let (y1, y2) = self.outputs_for(inputs[0], inputs[1]);
        outputs[0] = y1;
        outputs[1] = y2;
    }
}

/// First-order pressure plant under saturated PI control, driven by a steam
/// flow input `F_s`. Outputs the pressure `P_s` and a temperature `T_s` that
/// tracks it. Integrated with forward Euler at the trace step.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantDemoModel {
    pub time_constant: f64,
    pub ambient: f64,
    pub flow_gain: f64,
    pub setpoint: f64,
    pub kp: f64,
    pub ki: f64,
    pub max_effort: f64,
    pub temp_base: f64,
    pub temp_gain: f64,
    io: [Vec<String>; 2],
}

impl Default for PlantDemoModel {
    fn default() -> Self {
        PlantDemoModel {
            time_constant: 2.0,
            ambient: 85.0,
            flow_gain: 0.5,
            setpoint: 87.25,
            kp: 1.5,
            ki: 0.8,
            max_effort: 5.0,
            temp_base: 79.0,
            temp_gain: 0.2,
            io: [vec!["F_s".into()], vec!["T_s".into(), "P_s".into()]],
        }
    }
}

impl SystemModel for PlantDemoModel {
    fn name(&self) -> &str {
        "plant-demo"
    }

    fn inputs(&self) -> &[String] {
        &self.io[0]
    }

    fn outputs(&self) -> &[String] {
        &self.io[1]
    }

    /// `[pressure, integral of error]`.
    fn reset(&self) -> Vec<f64> {
        vec![self.setpoint, 0.0]
    }

    fn step(&self, state: &mut [f64], inputs: &[f64], dt: f64, outputs: &mut [f64]) {
        let (p, integral) = (state[0], state[1]);
        let err = self.setpoint - p;
        let raw = self.kp * err + self.ki * integral;
        let effort = raw.clamp(-self.max_effort, self.max_effort);
        // conditional integration as anti-windup
        if raw == effort || raw.signum() != err.signum() {
            state[1] = integral + dt * err;
        }
        outputs[0] = self.temp_base + self.temp_gain * (p - self.ambient);
        outputs[1] = p;
        let dp = (-(p - self.ambient) + self.flow_gain * inputs[0] + effort) / self.time_constant;
        state[0] = p + dt * dp;
    }
}

/// A named model with the default input box and time grid used when the
/// caller does not override them.
pub struct Builtin {
    pub model: Box<dyn SystemModel>,
    pub horizon: f64,
    pub dt: f64,
    pub input_ranges: Vec<(String, f64, f64)>,
}

pub const BUILTIN_MODELS: [&str; 5] = ["omm-v0", "omm-v1", "omm-v2", "omm-v3", "plant-demo"];

pub fn builtin(name: &str) -> Option<Builtin> {
    let omm = |m: GainCrossModel| Builtin {
        model: Box::new(m),
        horizon: 10.0,
        dt: 0.1,
        input_ranges: vec![("u1".into(), -100.0, 100.0), ("u2".into(), -100.0, 100.0)],
    };
    Some(match name {
        "omm-v0" => omm(GainCrossModel::omm_v0()),
        "omm-v1" => omm(GainCrossModel::omm_v1()),
        "omm-v2" => omm(GainCrossModel::omm_v2()),
        "omm-v3" => omm(GainCrossModel::omm_v3()),
        "plant-demo" => Builtin {
            model: Box::new(PlantDemoModel::default()),
            horizon: 35.0,
            dt: 0.01,
            input_ranges: vec![("F_s".into(), 0.0, 10.0)],
        },
        _ => return None,
    })
}
