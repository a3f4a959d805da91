//! Parameterized inputs and the falsification loop.
//!
//! A [`ParameterizedInput`] maps a box-constrained parameter vector to a
//! piecewise-constant input trace. [`falsify`] searches that box for a
//! vector whose simulated run has negative fitness, using either uniform
//! random sampling or simulated annealing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Degree;
use crate::monitor::{MonitorAutomaton, MonitorError, MonitorRun};
use crate::sim::{sample_count, simulate, SimError, SystemModel, Trace};

/// Stand-in for infinite fitness in Metropolis arithmetic.
pub const INFINITE_FITNESS_PENALTY: f64 = 1e15;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("expected {expected} parameters, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("parameter `{name}` = {value} outside [{lo}, {hi}]")]
    OutOfBounds {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("signal mismatch: {0}")]
    SignalMismatch(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
}

/// Piecewise-constant shape of one input signal: `discontinuities + 1`
/// levels in `[lo, hi]` separated by switch times in `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalShape {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub discontinuities: usize,
}

impl SignalShape {
    pub fn new(name: impl Into<String>, lo: f64, hi: f64, discontinuities: usize) -> Self {
        SignalShape {
            name: name.into(),
            lo,
            hi,
            discontinuities,
        }
    }
}

/// One search dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterizedInput {
    pub horizon: f64,
    pub dt: f64,
    pub signals: Vec<SignalShape>,
}

impl ParameterizedInput {
    pub fn new(horizon: f64, dt: f64, signals: Vec<SignalShape>) -> Result<Self, SearchError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SearchError::InvalidConfig(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(SearchError::InvalidConfig(format!(
                "horizon must be >= 0, got {horizon}"
            )));
        }
        for s in &signals {
            if !(s.lo <= s.hi && s.lo.is_finite() && s.hi.is_finite()) {
                return Err(SearchError::InvalidConfig(format!(
                    "signal `{}` has an empty range [{}, {}]",
                    s.name, s.lo, s.hi
                )));
            }
        }
        Ok(ParameterizedInput {
            horizon,
            dt,
            signals,
        })
    }

    /// Per signal: levels first, then switch times.
    pub fn parameters(&self) -> Vec<ParamSpec> {
        let mut out = Vec::new();
        for s in &self.signals {
            for j in 0..=s.discontinuities {
                out.push(ParamSpec {
                    name: format!("{}.level{j}", s.name),
                    lo: s.lo,
                    hi: s.hi,
                });
            }
            for j in 1..=s.discontinuities {
                out.push(ParamSpec {
                    name: format!("{}.switch{j}", s.name),
                    lo: 0.0,
                    hi: self.horizon,
                });
            }
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.signals.iter().map(|s| 2 * s.discontinuities + 1).sum()
    }

    pub fn check(&self, params: &[f64]) -> Result<(), SearchError> {
        if params.len() != self.arity() {
            return Err(SearchError::ArityMismatch {
                expected: self.arity(),
                got: params.len(),
            });
        }
        for (spec, &v) in self.parameters().iter().zip(params) {
            if !(v >= spec.lo && v <= spec.hi) {
                return Err(SearchError::OutOfBounds {
                    name: spec.name.clone(),
                    value: v,
                    lo: spec.lo,
                    hi: spec.hi,
                });
            }
        }
        Ok(())
    }

    /// Builds the input trace. Level `j` holds on `[switch_j, switch_{j+1})`
    /// after sorting the switch times.
    pub fn instantiate(&self, params: &[f64]) -> Result<Trace, SearchError> {
        self.check(params)?;
        let n = sample_count(self.horizon, self.dt);
        let mut trace = Trace::with_len(self.dt, n);
        let mut offset = 0;
        for s in &self.signals {
            let k = s.discontinuities;
            let levels = &params[offset..offset + k + 1];
            let mut switches = params[offset + k + 1..offset + 2 * k + 1].to_vec();
            switches.sort_by(f64::total_cmp);
            offset += 2 * k + 1;
            let values = (0..n)
                .map(|i| {
                    let t = trace.time(i);
                    levels[switches.iter().take_while(|&&sw| sw <= t).count()]
                })
                .collect();
            trace.insert(s.name.clone(), values)?;
        }
        Ok(trace)
    }
}

/// Free function form of [`ParameterizedInput::instantiate`].
pub fn instantiate(pi: &ParameterizedInput, params: &[f64]) -> Result<Trace, SearchError> {
    pi.instantiate(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    UniformRandom,
    SimulatedAnnealing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub initial_temperature: f64,
    /// Geometric cooling factor applied after every iteration.
    pub cooling: f64,
    /// Proposal standard deviation as a fraction of each parameter range.
    pub proposal_scale: f64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            initial_temperature: 1.0,
            cooling: 0.97,
            proposal_scale: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub budget: usize,
    pub seed: u64,
    pub sa: SaConfig,
}

impl SearchConfig {
    pub fn new(algorithm: Algorithm, budget: usize, seed: u64) -> Self {
        SearchConfig {
            algorithm,
            budget,
            seed,
            sa: SaConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidConfig(m));
        if self.budget < 1 {
            return bad("budget must be at least 1".into());
        }
        if !(self.sa.cooling > 0.0 && self.sa.cooling < 1.0) {
            return bad(format!("cooling factor {} not in (0, 1)", self.sa.cooling));
        }
        if !(self.sa.proposal_scale > 0.0 && self.sa.proposal_scale <= 1.0) {
            return bad(format!(
                "proposal scale {} not in (0, 1]",
                self.sa.proposal_scale
            ));
        }
        if !(self.sa.initial_temperature > 0.0 && self.sa.initial_temperature.is_finite()) {
            return bad(format!(
                "initial temperature {} must be positive",
                self.sa.initial_temperature
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// A failure-revealing test case was found.
    #[serde(rename = "TC")]
    TestCase,
    /// No failure found within the budget.
    #[serde(rename = "NFF")]
    NoFailureFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalsificationResult {
    pub verdict: Verdict,
    pub best_params: Vec<f64>,
    pub best_fitness: Degree,
    pub iterations: usize,
    pub violated_requirements: Vec<u32>,
    pub history: Vec<Degree>,
}

/// Outcome of one falsification iteration.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub fitness: Degree,
    /// Inputs and model outputs.
    pub trace: Trace,
    pub run: MonitorRun,
}

/// A model, a compiled table and an input parameterization that fit together.
pub struct Problem<'a> {
    model: &'a dyn SystemModel,
    automaton: &'a MonitorAutomaton,
    input: &'a ParameterizedInput,
}

impl<'a> Problem<'a> {
    pub fn new(
        model: &'a dyn SystemModel,
        automaton: &'a MonitorAutomaton,
        input: &'a ParameterizedInput,
    ) -> Result<Self, SearchError> {
        for name in model.inputs() {
            if !input.signals.iter().any(|s| &s.name == name) {
                return Err(SearchError::SignalMismatch(format!(
                    "model input `{name}` has no parameterized shape"
                )));
            }
        }
        for s in &input.signals {
            if !model.inputs().contains(&s.name) {
                return Err(SearchError::SignalMismatch(format!(
                    "`{}` is not an input of model `{}`",
                    s.name,
                    model.name()
                )));
            }
        }
        for name in &automaton.inputs {
            if !model.inputs().contains(name) && !model.outputs().contains(name) {
                return Err(SearchError::SignalMismatch(format!(
                    "table input `{name}` is neither an input nor an output of model `{}`",
                    model.name()
                )));
            }
        }
        Ok(Problem {
            model,
            automaton,
            input,
        })
    }

    pub fn input(&self) -> &ParameterizedInput {
        self.input
    }

    /// instantiate, simulate, monitor.
    pub fn evaluate(&self, params: &[f64]) -> Result<Evaluation, SearchError> {
        let inputs = self.input.instantiate(params)?;
        let trace = simulate(self.model, &inputs)?;
        let run = self.automaton.run(&trace)?;
        Ok(Evaluation {
            fitness: run.fitness,
            trace,
            run,
        })
    }
}

/// Free function form of [`Problem::evaluate`].
pub fn evaluate(
    model: &dyn SystemModel,
    automaton: &MonitorAutomaton,
    pi: &ParameterizedInput,
    params: &[f64],
) -> Result<Evaluation, SearchError> {
    Problem::new(model, automaton, pi)?.evaluate(params)
}

fn penalized(d: Degree) -> f64 {
    d.value()
        .clamp(-INFINITE_FITNESS_PENALTY, INFINITE_FITNESS_PENALTY)
}

/// Metropolis acceptance probability for moving from `current` to `proposal`.
pub fn acceptance_probability(current: Degree, proposal: Degree, temperature: f64) -> f64 {
    let delta = penalized(proposal) - penalized(current);
    if delta <= 0.0 {
        1.0
    } else {
        (-delta / temperature).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaStep {
    pub proposal: Vec<f64>,
    pub proposal_fitness: Degree,
    pub accepted: bool,
}

/// One annealing move: Gaussian proposal clamped to the box, then a
/// Metropolis accept/reject.
#[allow(clippy::too_many_arguments)]
pub fn sa_step<R, E>(
    bounds: &[ParamSpec],
    current: &[f64],
    current_fitness: Degree,
    temperature: f64,
    proposal_scale: f64,
    rng: &mut R,
    mut objective: impl FnMut(&[f64]) -> Result<Degree, E>,
) -> Result<SaStep, E>
where
    R: Rng + ?Sized,
{
    debug_assert!(temperature > 0.0);
    let proposal: Vec<f64> = bounds
        .iter()
        .zip(current)
        .map(|(spec, &x)| {
            let std = proposal_scale * (spec.hi - spec.lo);
            if std > 0.0 {
                let noise = Normal::new(0.0, std).expect("finite std").sample(rng);
                (x + noise).clamp(spec.lo, spec.hi)
            } else {
                x
            }
        })
        .collect();
    let proposal_fitness = objective(&proposal)?;
    let p = acceptance_probability(current_fitness, proposal_fitness, temperature);
    let u: f64 = rng.random();
    Ok(SaStep {
        proposal,
        proposal_fitness,
        accepted: p >= 1.0 || u < p,
    })
}

fn uniform_sample<R: Rng + ?Sized>(bounds: &[ParamSpec], rng: &mut R) -> Vec<f64> {
    bounds
        .iter()
        .map(|s| {
            if s.hi > s.lo {
                rng.random_range(s.lo..=s.hi)
            } else {
                s.lo
            }
        })
        .collect()
}

/// Searches for a parameter vector with negative fitness.
///
/// Every evaluated vector counts as one iteration. The run stops at the first
/// negative fitness or when the budget is spent, and is fully determined by
/// `cfg.seed`.
pub fn falsify(
    problem: &Problem<'_>,
    cfg: &SearchConfig,
) -> Result<FalsificationResult, SearchError> {
    cfg.validate()?;
    let bounds = problem.input().parameters();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut history = Vec::with_capacity(cfg.budget);
    let mut best: Option<(Vec<f64>, Degree)> = None;
    let mut note = |params: &[f64], f: Degree, history: &mut Vec<Degree>| {
        history.push(f);
        if best.as_ref().is_none_or(|(_, b)| f < *b) {
            best = Some((params.to_vec(), f));
        }
    };
    let fitness_of = |p: &[f64]| problem.evaluate(p).map(|e| e.fitness);

    match cfg.algorithm {
        Algorithm::UniformRandom => {
            for _ in 0..cfg.budget {
                let x = uniform_sample(&bounds, &mut rng);
                let f = fitness_of(&x)?;
                note(&x, f, &mut history);
                if f.is_violation() {
                    break;
                }
            }
        }
        Algorithm::SimulatedAnnealing => {
            let mut x = uniform_sample(&bounds, &mut rng);
            let mut fx = fitness_of(&x)?;
            note(&x, fx, &mut history);
            let mut temperature = cfg.sa.initial_temperature;
            while !fx.is_violation() && history.len() < cfg.budget {
                let step = sa_step(
                    &bounds,
                    &x,
                    fx,
                    temperature,
                    cfg.sa.proposal_scale,
                    &mut rng,
                    fitness_of,
                )?;
                note(&step.proposal, step.proposal_fitness, &mut history);
                if step.proposal_fitness.is_violation() {
                    break;
                }
                if step.accepted {
                    x = step.proposal;
                    fx = step.proposal_fitness;
                }
                temperature = (temperature * cfg.sa.cooling).max(f64::MIN_POSITIVE);
            }
        }
    }

    let (best_params, best_fitness) = best.expect("budget >= 1");
    let verdict = if best_fitness.is_violation() {
        Verdict::TestCase
    } else {
        Verdict::NoFailureFound
    };
    let violated_requirements = if verdict == Verdict::TestCase {
        problem.evaluate(&best_params)?.run.violated_requirements()
    } else {
        Vec::new()
    };
    Ok(FalsificationResult {
        verdict,
        best_params,
        best_fitness,
        iterations: history.len(),
        violated_requirements,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::sim::GainCrossModel;
    use crate::table::parse_table;
    use proptest::prelude::*;

    fn omm_input(k: usize) -> ParameterizedInput {
        ParameterizedInput::new(
            10.0,
            0.1,
            vec![
                SignalShape::new("u1", -100.0, 100.0, k),
                SignalShape::new("u2", -100.0, 100.0, k),
            ],
        )
        .unwrap()
    }

    fn automaton(text: &str) -> MonitorAutomaton {
        MonitorAutomaton::compile(&parse_table(text).unwrap()).unwrap()
    }

    #[test]
    fn instantiate_examples() {
        let pi =
            ParameterizedInput::new(30.0, 1.0, vec![SignalShape::new("x", 0.0, 10.0, 1)]).unwrap();
        let tr = pi.instantiate(&[2.0, 5.0, 10.0]).unwrap();
        let x = tr.get("x").unwrap();
        assert_eq!(x.len(), 31);
        assert!(x[..10].iter().all(|&v| v == 2.0));
        assert!(x[10..].iter().all(|&v| v == 5.0));

        let tr = pi.instantiate(&[3.0, 3.0, 17.3]).unwrap();
        assert!(tr.get("x").unwrap().iter().all(|&v| v == 3.0));

        let tr = pi.instantiate(&[1.0, 4.0, 0.0]).unwrap();
        assert!(tr.get("x").unwrap().iter().all(|&v| v == 4.0));
    }

    #[test]
    fn switch_times_are_sorted() {
        let pi =
            ParameterizedInput::new(4.0, 1.0, vec![SignalShape::new("x", 0.0, 10.0, 2)]).unwrap();
        let tr = pi.instantiate(&[1.0, 2.0, 3.0, 3.0, 1.0]).unwrap();
        assert_eq!(tr.get("x").unwrap(), [1.0, 2.0, 2.0, 3.0, 3.0]);
    }

    #[test]
    fn instantiate_errors() {
        let pi = omm_input(1);
        assert_eq!(pi.arity(), 6);
        assert!(matches!(
            pi.instantiate(&[0.0; 5]),
            Err(SearchError::ArityMismatch {
                expected: 6,
                got: 5
            })
        ));
        assert!(matches!(
            pi.instantiate(&[0.0, 0.0, 11.0, 0.0, 0.0, 1.0]),
            Err(SearchError::OutOfBounds { .. })
        ));
        assert!(matches!(
            pi.instantiate(&[0.0, f64::NAN, 1.0, 0.0, 0.0, 1.0]),
            Err(SearchError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let rt0 = automaton(presets::OMM_RT0);
        let pi = omm_input(1);
        let v1 = GainCrossModel::omm_v1();
        let e = evaluate(&v1, &rt0, &pi, &[-100.0, -100.0, 5.0, 0.5, 0.5, 5.0]).unwrap();
        assert_eq!(e.fitness, Degree::new(-0.49));
        assert_eq!(e.run.violated_requirements(), [2]);

        let v0 = GainCrossModel::omm_v0();
        let e = evaluate(&v0, &rt0, &pi, &[0.3, 50.0, 2.0, 0.1, -4.0, 7.0]).unwrap();
        assert!(e.fitness.value() >= 0.0);

        let empty = automaton("table E\ninputs u1\n");
        let e = evaluate(&v0, &empty, &pi, &[0.3, 50.0, 2.0, 0.1, -4.0, 7.0]).unwrap();
        assert_eq!(e.fitness, Degree::INFINITY);
    }

    #[test]
    fn problem_checks_signals() {
        let sc = automaton(presets::SC_TABLE);
        let pi = omm_input(1);
        let m = GainCrossModel::omm_v0();
        assert!(matches!(
            Problem::new(&m, &sc, &pi),
            Err(SearchError::SignalMismatch(_))
        ));
    }

    #[test]
    fn acceptance_rules() {
        let d = Degree::new;
        assert_eq!(acceptance_probability(d(1.0), d(0.0), 1e-12), 1.0);
        assert_eq!(acceptance_probability(d(2.0), Degree::INFINITY, 1.0), 0.0);
        assert_eq!(
            acceptance_probability(Degree::INFINITY, Degree::INFINITY, 1.0),
            1.0
        );
        let mut last = 1.0;
        for t in [1.0, 0.1, 0.01, 1e-3, 1e-6] {
            let p = acceptance_probability(d(0.0), d(0.5), t);
            assert!(p < last);
            last = p;
        }
        assert!(last < 1e-100);
    }

    #[test]
    fn sa_step_accepts_improvements_and_respects_bounds() {
        let bounds = vec![
            ParamSpec {
                name: "a".into(),
                lo: 0.0,
                hi: 1.0,
            },
            ParamSpec {
                name: "b".into(),
                lo: -5.0,
                hi: -5.0,
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = sa_step(
                &bounds,
                &[0.99, -5.0],
                Degree::new(3.0),
                0.5,
                1.0,
                &mut rng,
                |_| Ok::<_, ()>(Degree::new(2.0)),
            )
            .unwrap();
            assert!(s.accepted);
            assert!((0.0..=1.0).contains(&s.proposal[0]));
            assert_eq!(s.proposal[1], -5.0);
        }
        let s = sa_step(
            &bounds,
            &[0.5, -5.0],
            Degree::new(3.0),
            0.5,
            0.1,
            &mut rng,
            |_| Ok::<_, ()>(Degree::INFINITY),
        )
        .unwrap();
        assert!(!s.accepted);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SearchConfig::new(Algorithm::SimulatedAnnealing, 0, 1);
        assert!(cfg.validate().is_err());
        cfg.budget = 5;
        cfg.sa.cooling = 1.0;
        assert!(cfg.validate().is_err());
        cfg.sa.cooling = 0.5;
        cfg.sa.proposal_scale = 0.0;
        assert!(cfg.validate().is_err());
        cfg.sa.proposal_scale = 1.0;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn falsify_finds_cross_contamination() {
        let rt0 = automaton(presets::OMM_RT0);
        let pi = omm_input(1);
        let m = GainCrossModel::omm_v3();
        let problem = Problem::new(&m, &rt0, &pi).unwrap();
        for algo in [Algorithm::UniformRandom, Algorithm::SimulatedAnnealing] {
            let res = falsify(&problem, &SearchConfig::new(algo, 1500, 3)).unwrap();
            assert_eq!(res.verdict, Verdict::TestCase, "{algo:?}");
            assert!(res.best_fitness.is_violation());
            assert_eq!(res.iterations, res.history.len());
            assert!(res.history[..res.iterations - 1]
                .iter()
                .all(|f| !f.is_violation()));
            assert!(!res.violated_requirements.is_empty());
        }
    }

    #[test]
    fn falsify_unsatisfiable_exhausts_budget() {
        let rt1 = automaton(presets::OMM_RT1);
        let pi = omm_input(1);
        let m = GainCrossModel::omm_v3();
        let problem = Problem::new(&m, &rt1, &pi).unwrap();
        for algo in [Algorithm::UniformRandom, Algorithm::SimulatedAnnealing] {
            let res = falsify(&problem, &SearchConfig::new(algo, 300, 11)).unwrap();
            assert_eq!(res.verdict, Verdict::NoFailureFound);
            assert_eq!(res.iterations, 300);
            assert!(res.history.iter().all(|f| f.value() >= 0.0));
            assert!(res.violated_requirements.is_empty());
        }
    }

    #[test]
    fn budget_one_early_stop() {
        // a table every sample violates: y1 can never exceed the clamp
        let always = automaton("table A\ninputs y1\nreq 1\n  post y1 > 100\n");
        let pi = omm_input(1);
        let m = GainCrossModel::omm_v0();
        let problem = Problem::new(&m, &always, &pi).unwrap();
        let res = falsify(
            &problem,
            &SearchConfig::new(Algorithm::UniformRandom, 1, 42),
        )
        .unwrap();
        assert_eq!(res.verdict, Verdict::TestCase);
        assert_eq!(res.iterations, 1);
        assert_eq!(res.violated_requirements, [1]);
    }

    #[test]
    fn falsify_is_deterministic() {
        let rt2 = automaton(presets::OMM_RT2);
        let pi = omm_input(1);
        let m = GainCrossModel::omm_v2();
        let problem = Problem::new(&m, &rt2, &pi).unwrap();
        for algo in [Algorithm::UniformRandom, Algorithm::SimulatedAnnealing] {
            let cfg = SearchConfig::new(algo, 200, 99);
            assert_eq!(
                falsify(&problem, &cfg).unwrap(),
                falsify(&problem, &cfg).unwrap()
            );
        }
    }

    #[test]
    fn uniform_sampling_covers_the_box() {
        let bounds = omm_input(1).parameters();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 10_000;
        let mut sums = vec![0.0; bounds.len()];
        for _ in 0..n {
            for (s, v) in sums.iter_mut().zip(uniform_sample(&bounds, &mut rng)) {
                *s += v;
            }
        }
        for (spec, s) in bounds.iter().zip(sums) {
            let mean = s / n as f64;
            let mid = 0.5 * (spec.lo + spec.hi);
            assert!(
                (mean - mid).abs() <= 0.05 * (spec.hi - spec.lo),
                "{}: mean {mean} vs midpoint {mid}",
                spec.name
            );
        }
    }

    proptest! {
        #[test]
        fn in_bounds_params_yield_full_traces(
            k in 0..3usize,
            seed in any::<u64>(),
            horizon in 0.0..20.0f64,
        ) {
            let pi = ParameterizedInput::new(horizon, 0.25, vec![
                SignalShape::new("a", -1.0, 1.0, k),
                SignalShape::new("b", 5.0, 6.0, k + 1),
            ]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let params = uniform_sample(&pi.parameters(), &mut rng);
            let tr = pi.instantiate(&params).unwrap();
            prop_assert_eq!(tr.len(), sample_count(horizon, 0.25));
            for (name, lo, hi) in [("a", -1.0, 1.0), ("b", 5.0, 6.0)] {
                prop_assert!(tr.get(name).unwrap().iter().all(|v| (lo..=hi).contains(v)));
            }
        }
    }
}
