//! Test support: random tables and traces, and a brute-force oracle that
//! decides violation from boolean semantics alone.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rtsbst_core::table::parse_table;
use rtsbst_core::{ArithExpr, ArithOp, BoolExpr, RelOp, RequirementsTable, Trace};

pub type TestRng = ChaCha8Rng;

fn arith(e: &ArithExpr, now: &HashMap<&str, f64>, prev: &HashMap<&str, f64>, t: f64) -> f64 {
    match e {
        ArithExpr::Const(c) => *c,
        ArithExpr::Signal(s) => now[s.as_str()],
        ArithExpr::Time => t,
        ArithExpr::Prev(s) => prev[s.as_str()],
        ArithExpr::Binary { op, lhs, rhs } => {
            let (a, b) = (arith(lhs, now, prev, t), arith(rhs, now, prev, t));
            match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
                ArithOp::Div => a / b,
            }
        }
    }
}

fn holds(e: &BoolExpr, now: &HashMap<&str, f64>, prev: &HashMap<&str, f64>, t: f64) -> bool {
    match e {
        BoolExpr::Rel { op, lhs, rhs } => {
            let (a, b) = (arith(lhs, now, prev, t), arith(rhs, now, prev, t));
            match op {
                RelOp::Gt => a > b,
                RelOp::Ge => a >= b,
                RelOp::Lt => a < b,
                RelOp::Le => a <= b,
                RelOp::Eq => a == b,
                RelOp::Ne => a != b,
            }
        }
        BoolExpr::And(a, b) => holds(a, now, prev, t) && holds(b, now, prev, t),
        BoolExpr::Or(a, b) => holds(a, now, prev, t) || holds(b, now, prev, t),
        BoolExpr::Not(a) => !holds(a, now, prev, t),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    /// Requirement indexes whose postcondition was false on some armed step.
    pub violated: Vec<u32>,
    /// Armed flags per step and requirement.
    pub armed: Vec<Vec<bool>>,
    /// Output values per step, in declared order.
    pub outputs: Vec<Vec<f64>>,
}

/// A requirement is armed at step `k` when its precondition has held on
/// every step of `[k - m, k]`, where `m` is the duration in whole steps
/// (`m = 0` without a duration) and the run of true preconditions started no
/// later than `k - m`.
pub fn oracle(table: &RequirementsTable, trace: &Trace) -> OracleOutcome {
    let dt = trace.dt();
    let steps: Vec<usize> = table
        .requirements
        .iter()
        .map(|r| match r.duration {
            Some(d) if d > 0.0 => (d / dt - 1e-6).ceil() as usize,
            _ => 0,
        })
        .collect();
    let mut streak = vec![0usize; table.requirements.len()];
    let mut prev: HashMap<&str, f64> = table
        .initial_values
        .iter()
        .map(|(k, v)| (k.as_str(), *v))
        .collect();
    let mut out = OracleOutcome {
        violated: Vec::new(),
        armed: Vec::new(),
        outputs: Vec::new(),
    };
    for k in 0..trace.len() {
        let t = trace.time(k);
        let mut now: HashMap<&str, f64> = table
            .inputs
            .iter()
            .map(|s| (s.as_str(), trace.get(s).expect("input column")[k]))
            .collect();
        let armed: Vec<bool> = table
            .requirements
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let g = r
                    .precondition
                    .as_ref()
                    .is_none_or(|p| holds(p, &now, &prev, t));
                streak[i] = if g { streak[i] + 1 } else { 0 };
                g && streak[i] > steps[i]
            })
            .collect();
        for (r, &on) in table.requirements.iter().zip(&armed) {
            if on {
                for a in &r.actions {
                    let v = arith(&a.value, &now, &prev, t);
                    now.insert(a.target.as_str(), v);
                }
            }
        }
        for (r, &on) in table.requirements.iter().zip(&armed) {
            if on
                && r.postcondition
                    .as_ref()
                    .is_some_and(|p| !holds(p, &now, &prev, t))
                && !out.violated.contains(&r.index)
            {
                out.violated.push(r.index);
            }
        }
        out.outputs
            .push(table.outputs.iter().map(|o| now[o.as_str()]).collect());
        out.armed.push(armed);
        for (name, v) in now {
            prev.insert(name, v);
        }
    }
    out.violated.sort_unstable();
    out
}

fn constant<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> String {
    format!("{:.2}", rng.random_range(lo..hi))
}

fn arith_expr<R: Rng>(rng: &mut R, atoms: &[String], depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.6) {
        if rng.random_bool(0.3) {
            return constant(rng, -3.0, 3.0);
        }
        return atoms[rng.random_range(0..atoms.len())].clone();
    }
    let op = ["+", "-", "*"][rng.random_range(0..3)];
    format!(
        "({} {op} {})",
        arith_expr(rng, atoms, depth - 1),
        arith_expr(rng, atoms, depth - 1)
    )
}

fn bool_expr<R: Rng>(rng: &mut R, atoms: &[String], depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.5) {
        let ops = if rng.random_bool(0.05) { 6 } else { 5 };
        let op = ["<", "<=", ">", ">=", "!=", "=="][rng.random_range(0..ops)];
        let lhs = arith_expr(rng, atoms, 1);
        let rhs = if rng.random_bool(0.6) {
            constant(rng, -3.0, 3.0)
        } else {
            arith_expr(rng, atoms, 1)
        };
        return format!("{lhs} {op} {rhs}");
    }
    match rng.random_range(0..3) {
        0 => format!("~({})", bool_expr(rng, atoms, depth - 1)),
        1 => format!(
            "({}) & ({})",
            bool_expr(rng, atoms, depth - 1),
            bool_expr(rng, atoms, depth - 1)
        ),
        _ => format!(
            "({}) | ({})",
            bool_expr(rng, atoms, depth - 1),
            bool_expr(rng, atoms, depth - 1)
        ),
    }
}

/// Random bounded walk, occasionally jumping.
pub fn random_signal<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let mut v = rng.random_range(lo..hi);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.05) {
                v = rng.random_range(lo..hi);
            } else {
                v = (v + rng.random_range(-0.08..0.08) * span).clamp(lo, hi);
            }
            v
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Case {
    pub text: String,
    pub table: RequirementsTable,
    pub trace: Trace,
}

/// A random valid table over inputs `x, y, z` (1 to 5 requirements,
/// durations of 0 to 3 steps, optional `prev` and an optional output `dx`)
/// and a random trace of 50 to 200 steps.
pub fn random_case<R: Rng>(rng: &mut R) -> Case {
    let dt = [0.1, 0.05, 0.2][rng.random_range(0..3)];
    let n = rng.random_range(50..=200);
    let use_prev = rng.random_bool(0.5);
    let use_output = rng.random_bool(0.4);

    let mut guard_atoms: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    if use_prev {
        guard_atoms.extend(["prev(x)", "prev(y)"].iter().map(|s| s.to_string()));
    }
    let mut post_atoms = guard_atoms.clone();
    if use_output {
        post_atoms.push("dx".into());
    }
    guard_atoms.push("t".into());

    let mut text = String::from("table RANDOM\ninputs x, y, z\n");
    if use_output {
        text.push_str("outputs dx\ninit dx = 0\n");
    }
    if use_prev || use_output {
        text.push_str(&format!("init x = {}\n", constant(rng, -3.0, 3.0)));
        text.push_str(&format!("init y = {}\n", constant(rng, -3.0, 3.0)));
    }
    let count = rng.random_range(1..=5);
    for i in 1..=count {
        text.push_str(&format!("req {i}\n"));
        if i == 1 && use_output {
            text.push_str("  pre -\n  dur -\n");
            if rng.random_bool(0.5) {
                text.push_str(&format!("  post {}\n", bool_expr(rng, &post_atoms, 2)));
            } else {
                text.push_str("  post -\n");
            }
            text.push_str("  action dx = x - prev(x)\n");
            continue;
        }
        if rng.random_bool(0.15) {
            text.push_str("  pre -\n  dur -\n");
        } else {
            text.push_str(&format!("  pre {}\n", bool_expr(rng, &guard_atoms, 2)));
            match rng.random_range(0..5) {
                0 => text.push_str("  dur -\n"),
                m => text.push_str(&format!("  dur {:.2}\n", (m - 1) as f64 * dt)),
            }
        }
        text.push_str(&format!("  post {}\n", bool_expr(rng, &post_atoms, 2)));
    }
    let table =
        parse_table(&text).unwrap_or_else(|e| panic!("generated table rejected: {e}\n{text}"));

    let mut trace = Trace::with_len(dt, n);
    for s in ["x", "y", "z"] {
        trace.insert(s, random_signal(rng, n, -4.0, 4.0)).unwrap();
    }
    Case { text, table, trace }
}
