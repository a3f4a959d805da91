//! Requirements-table driven falsification of closed-loop models.
//!
//! A requirements table is parsed and validated ([`table`]), compiled into
//! per-requirement monitors ([`monitor`]) whose degrees are min-aggregated
//! into a fitness ([`aggregate`]). [`search`] drives a [`sim::SystemModel`]
//! with parameterized inputs looking for a negative fitness.

pub mod aggregate;
pub mod expr;
pub mod monitor;
pub mod presets;
pub mod search;
pub mod sim;
pub mod table;

pub use aggregate::RunningMin;
pub use expr::{ArithExpr, ArithOp, BoolExpr, Degree, Env, EvalError, RelOp};
pub use monitor::{MonitorAutomaton, MonitorError, MonitorRun, MonitorState, Phase};
pub use search::{
    falsify, Algorithm, Evaluation, FalsificationResult, ParameterizedInput, Problem, SaConfig,
    SearchConfig, SearchError, SignalShape, Verdict,
};
pub use sim::{builtin, Builtin, SimError, SystemModel, Trace};
pub use table::{
    parse_table, Diagnostic, DiagnosticKind, Requirement, RequirementsTable, TableError,
};
