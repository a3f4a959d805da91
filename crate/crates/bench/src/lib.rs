//! Fixtures shared by the benchmarks.

use rtsbst_core::search::{ParameterizedInput, SignalShape};
use rtsbst_core::{parse_table, presets, MonitorAutomaton, Trace};

pub fn automaton(text: &str) -> MonitorAutomaton {
    MonitorAutomaton::compile(&parse_table(text).expect("bundled table")).expect("valid table")
}

/// A deterministic SC trace with `n` samples at 10 ms.
pub fn sc_trace(n: usize) -> Trace {
    let mut tr = Trace::with_len(0.01, n);
    let f = (0..n)
        .map(|k| 5.0 + 5.0 * (k as f64 * 0.003).sin())
        .collect();
    let t = (0..n).map(|k| 80.0 + (k as f64 * 0.001).cos()).collect();
    let p = (0..n)
        .map(|k| 87.25 + 0.5 * (k as f64 * 0.002).sin())
        .collect();
    tr.insert("F_s", f).unwrap();
    tr.insert("T_s", t).unwrap();
    tr.insert("P_s", p).unwrap();
    tr
}

pub fn sc_automaton() -> MonitorAutomaton {
    automaton(presets::SC_TABLE)
}

/// The default OMM input box: two signals on `[-100, 100]`, one switch each.
pub fn omm_input() -> ParameterizedInput {
    ParameterizedInput::new(
        10.0,
        0.1,
        vec![
            SignalShape::new("u1", -100.0, 100.0, 1),
            SignalShape::new("u2", -100.0, 100.0, 1),
        ],
    )
    .expect("valid box")
}
