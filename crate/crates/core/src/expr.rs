//! Expression trees shared by the table parser, the monitors and the search.
//!
//! Boolean expressions have two readings: the classical two-valued one
//! ([`BoolExpr::eval`]) and a quantitative one ([`BoolExpr::degree`]) whose
//! sign tells whether the expression holds and whose magnitude tells how far
//! the valuation is from flipping it.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors raised while evaluating an expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic produced a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Gt,
    Lt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Gt => ">",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        }
    }

    pub const ALL: [RelOp; 6] = [
        RelOp::Gt,
        RelOp::Lt,
        RelOp::Le,
        RelOp::Ge,
        RelOp::Eq,
        RelOp::Ne,
    ];
}

/// Arithmetic expression over signals, the simulation time and previous values.
#[derive(Debug, Clone, PartialEq)]
pub enum ArithExpr {
    Const(f64),
    Signal(String),
    /// Simulation time `t` in seconds.
    Time,
    /// Value of a signal at the previous time step.
    Prev(String),
    Binary {
        op: ArithOp,
        lhs: Box<ArithExpr>,
        rhs: Box<ArithExpr>,
    },
}

/// Boolean expression whose leaves are relational atoms.
#[derive(Debug, Clone, PartialEq)]
pub enum BoolExpr {
    Rel {
        op: RelOp,
        lhs: ArithExpr,
        rhs: ArithExpr,
    },
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
}

/// Variable bindings for one evaluation step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Env {
    pub signals: HashMap<String, f64>,
    pub prev: HashMap<String, f64>,
    pub t: f64,
}

impl Env {
    pub fn new(t: f64) -> Self {
        Env {
            t,
            ..Default::default()
        }
    }

    pub fn with_signal(mut self, name: impl Into<String>, value: f64) -> Self {
        self.signals.insert(name.into(), value);
        self
    }

    pub fn with_prev(mut self, name: impl Into<String>, value: f64) -> Self {
        self.prev.insert(name.into(), value);
        self
    }
}

impl ArithExpr {
    pub fn constant(v: f64) -> Self {
        ArithExpr::Const(v)
    }

    pub fn signal(name: impl Into<String>) -> Self {
        ArithExpr::Signal(name.into())
    }

    pub fn prev(name: impl Into<String>) -> Self {
        ArithExpr::Prev(name.into())
    }

    pub fn binary(op: ArithOp, lhs: ArithExpr, rhs: ArithExpr) -> Self {
        ArithExpr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        let v = match self {
            ArithExpr::Const(v) => *v,
            ArithExpr::Time => env.t,
            ArithExpr::Signal(name) => *env
                .signals
                .get(name)
                .ok_or_else(|| EvalError::UnboundName(name.clone()))?,
            ArithExpr::Prev(name) => *env
                .prev
                .get(name)
                .ok_or_else(|| EvalError::UnboundName(format!("prev({name})")))?,
            ArithExpr::Binary { op, lhs, rhs } => {
                let a = lhs.eval(env)?;
                let b = rhs.eval(env)?;
                match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mul => a * b,
                    ArithOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Calls `f(name, is_prev)` for every signal reference in the tree.
    pub fn visit_refs<'a>(&'a self, f: &mut impl FnMut(&'a str, bool)) {
        match self {
            ArithExpr::Const(_) | ArithExpr::Time => {}
            ArithExpr::Signal(n) => f(n, false),
            ArithExpr::Prev(n) => f(n, true),
            ArithExpr::Binary { lhs, rhs, .. } => {
                lhs.visit_refs(f);
                rhs.visit_refs(f);
            }
        }
    }
}

/// Free function form of [`ArithExpr::eval`].
pub fn eval_arith(e: &ArithExpr, env: &Env) -> Result<f64, EvalError> {
    e.eval(env)
}

/// Free function form of [`BoolExpr::eval`].
pub fn eval_bool(e: &BoolExpr, env: &Env) -> Result<bool, EvalError> {
    e.eval(env)
}

/// Free function form of [`BoolExpr::degree`].
pub fn degree(e: &BoolExpr, env: &Env) -> Result<Degree, EvalError> {
    e.degree(env)
}

impl BoolExpr {
    pub fn rel(op: RelOp, lhs: ArithExpr, rhs: ArithExpr) -> Self {
        BoolExpr::Rel { op, lhs, rhs }
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(a))
    }

    /// Classical truth value.
    pub fn eval(&self, env: &Env) -> Result<bool, EvalError> {
        Ok(match self {
            BoolExpr::Rel { op, lhs, rhs } => {
                let a = lhs.eval(env)?;
                let b = rhs.eval(env)?;
                match op {
                    RelOp::Gt => a > b,
                    RelOp::Lt => a < b,
                    RelOp::Le => a <= b,
                    RelOp::Ge => a >= b,
                    RelOp::Eq => a == b,
                    RelOp::Ne => a != b,
                }
            }
            BoolExpr::And(a, b) => a.eval(env)? && b.eval(env)?,
            BoolExpr::Or(a, b) => a.eval(env)? || b.eval(env)?,
            BoolExpr::Not(a) => !a.eval(env)?,
        })
    }

    /// Satisfaction degree: `>`/`>=` map to `lhs - rhs`, `<`/`<=` to
    /// `rhs - lhs`, `==` to `-|lhs - rhs|`, `!=` to `|lhs - rhs|`; `&`, `|`
    /// and `~` map to min, max and negation.
    pub fn degree(&self, env: &Env) -> Result<Degree, EvalError> {
        Ok(match self {
            BoolExpr::Rel { op, lhs, rhs } => {
                let a = lhs.eval(env)?;
                let b = rhs.eval(env)?;
                Degree(match op {
                    RelOp::Gt | RelOp::Ge => a - b,
                    RelOp::Lt | RelOp::Le => b - a,
                    RelOp::Eq => -(a - b).abs(),
                    RelOp::Ne => (a - b).abs(),
                })
            }
            BoolExpr::And(a, b) => a.degree(env)?.min(b.degree(env)?),
            BoolExpr::Or(a, b) => a.degree(env)?.max(b.degree(env)?),
            BoolExpr::Not(a) => -a.degree(env)?,
        })
    }

    pub fn visit_refs<'a>(&'a self, f: &mut impl FnMut(&'a str, bool)) {
        match self {
            BoolExpr::Rel { lhs, rhs, .. } => {
                lhs.visit_refs(f);
                rhs.visit_refs(f);
            }
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.visit_refs(f);
                b.visit_refs(f);
            }
            BoolExpr::Not(a) => a.visit_refs(f),
        }
    }

    /// Names that appear under `prev(...)`.
    pub fn prev_refs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_refs(&mut |n, is_prev| {
            if is_prev {
                out.insert(n.to_string());
            }
        });
        out
    }
}

/// Satisfaction degree on the extended real line.
///
/// Never NaN. `+inf` is emitted while a requirement is not being assessed and
/// is the identity of min-aggregation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Degree(f64);

impl Degree {
    pub const INFINITY: Degree = Degree(f64::INFINITY);
    pub const NEG_INFINITY: Degree = Degree(f64::NEG_INFINITY);
    pub const ZERO: Degree = Degree(0.0);

    /// Panics on NaN.
    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan(), "satisfaction degree cannot be NaN");
        Degree(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_violation(self) -> bool {
        self.0 < 0.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn min(self, other: Degree) -> Degree {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Degree) -> Degree {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &Degree) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl std::ops::Neg for Degree {
    type Output = Degree;

    fn neg(self) -> Degree {
        Degree(-self.0)
    }
}

impl From<f64> for Degree {
    fn from(v: f64) -> Self {
        Degree::new(v)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// JSON has no infinities, so those are written as the strings "inf"/"-inf".
impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Degree(v)),
            Repr::Text(s) => match s.as_str() {
                "inf" | "+inf" => Ok(Degree::INFINITY),
                "-inf" => Ok(Degree::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!(
                    "invalid degree `{other}`"
                ))),
            },
        }
    }
}

fn fmt_arith(e: &ArithExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        ArithExpr::Const(v) => write!(f, "{v}"),
        ArithExpr::Signal(n) => f.write_str(n),
        ArithExpr::Time => f.write_str("t"),
        ArithExpr::Prev(n) => write!(f, "prev({n})"),
        ArithExpr::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            let wrap_l = matches!(&**lhs, ArithExpr::Binary { op: o, .. } if o.precedence() < p);
            let wrap_r = matches!(&**rhs, ArithExpr::Binary { op: o, .. } if o.precedence() <= p);
            fmt_wrapped(lhs, wrap_l, f)?;
            write!(f, " {} ", op.symbol())?;
            fmt_wrapped(rhs, wrap_r, f)
        }
    }
}

fn fmt_wrapped(e: &ArithExpr, wrap: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if wrap {
        f.write_str("(")?;
        fmt_arith(e, f)?;
        f.write_str(")")
    } else {
        fmt_arith(e, f)
    }
}

impl fmt::Display for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_arith(self, f)
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Rel { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            BoolExpr::And(a, b) => {
                let wrap_l = matches!(**a, BoolExpr::Or(..));
                let wrap_r = matches!(**b, BoolExpr::Or(..) | BoolExpr::And(..));
                fmt_bool_wrapped(a, wrap_l, f)?;
                f.write_str(" & ")?;
                fmt_bool_wrapped(b, wrap_r, f)
            }
            BoolExpr::Or(a, b) => {
                let wrap_r = matches!(**b, BoolExpr::Or(..));
                fmt_bool_wrapped(a, false, f)?;
                f.write_str(" | ")?;
                fmt_bool_wrapped(b, wrap_r, f)
            }
            BoolExpr::Not(a) => write!(f, "~({a})"),
        }
    }
}

fn fmt_bool_wrapped(e: &BoolExpr, wrap: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}
