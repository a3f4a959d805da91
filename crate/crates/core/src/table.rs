//! Requirements tables: data model, the line-oriented `.rt` format and static
//! validation.
//!
//! ```text
//! table SC
//! inputs  F_s, T_s, P_s
//! outputs F_diff
//! init    F_s = 0
//! init    F_diff = 0
//! req 1
//!   pre    -
//!   post   T_s > 79 & P_s <= 90.5
//!   action F_diff = F_s - prev(F_s)
//! ```
//!
//! Lines starting with `#` are comments. A `-` in the `pre`, `dur` or `post`
//! column means the cell is empty.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{ArithExpr, ArithOp, BoolExpr, RelOp};

/// `target = value`, executed while the owning requirement is active.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub target: String,
    pub value: ArithExpr,
}

/// One row of a requirements table.
#[derive(Debug, Clone, PartialEq)]
pub struct Requirement {
    pub index: u32,
    /// `None` means the requirement is always armed.
    pub precondition: Option<BoolExpr>,
    /// Seconds the precondition must hold before the postcondition is assessed.
    pub duration: Option<f64>,
    pub postcondition: Option<BoolExpr>,
    pub actions: Vec<Assignment>,
}

impl Requirement {
    pub fn new(index: u32) -> Self {
        Requirement {
            index,
            precondition: None,
            duration: None,
            postcondition: None,
            actions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequirementsTable {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub initial_values: BTreeMap<String, f64>,
    pub requirements: Vec<Requirement>,
}

impl RequirementsTable {
    pub fn new(name: impl Into<String>) -> Self {
        RequirementsTable {
            name: name.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            initial_values: BTreeMap::new(),
            requirements: Vec::new(),
        }
    }

    pub fn is_input(&self, name: &str) -> bool {
        self.inputs.iter().any(|s| s == name)
    }

    pub fn is_output(&self, name: &str) -> bool {
        self.outputs.iter().any(|s| s == name)
    }

    /// Every signal that appears under `prev(...)`, in first-seen order.
    pub fn prev_signals(&self) -> Vec<String> {
        let mut seen = Vec::new();
        let mut push = |n: &str, is_prev: bool| {
            if is_prev && !seen.iter().any(|s: &String| s == n) {
                seen.push(n.to_string());
            }
        };
        for req in &self.requirements {
            if let Some(p) = &req.precondition {
                p.visit_refs(&mut push);
            }
            if let Some(p) = &req.postcondition {
                p.visit_refs(&mut push);
            }
            for a in &req.actions {
                a.value.visit_refs(&mut push);
            }
        }
        seen
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    DuplicateIndex,
    NonContiguousIndex,
    UnknownSignal,
    DuplicateSignal,
    ReservedName,
    MissingInitialValue,
    NegativeDuration,
    DurationWithoutPrecondition,
    EmptyRequirement,
    UndeclaredOutput,
}

/// A validation finding; `requirement` is `None` for table-level issues.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub requirement: Option<u32>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.requirement {
            Some(i) => write!(f, "req {i}: {:?}: {}", self.kind, self.message),
            None => write!(f, "table: {:?}: {}", self.kind, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid table: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

impl TableError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            TableError::Invalid(d) => d,
            TableError::Syntax { .. } => &[],
        }
    }
}

/// Checks every static rule of a table. An empty result means the table is
/// well formed.
pub fn validate(table: &RequirementsTable) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |req: Option<u32>, kind: DiagnosticKind, message: String| {
        out.push(Diagnostic {
            requirement: req,
            kind,
            message,
        })
    };

    let mut declared = BTreeSet::new();
    for name in table.inputs.iter().chain(&table.outputs) {
        if name == "t" || name == "prev" {
            diag(
                None,
                DiagnosticKind::ReservedName,
                format!("`{name}` is reserved"),
            );
        }
        if !declared.insert(name.as_str()) {
            diag(
                None,
                DiagnosticKind::DuplicateSignal,
                format!("`{name}` declared twice"),
            );
        }
    }
    for name in table.initial_values.keys() {
        if !declared.contains(name.as_str()) {
            diag(
                None,
                DiagnosticKind::UnknownSignal,
                format!("initial value for undeclared signal `{name}`"),
            );
        }
    }

    let mut seen = BTreeSet::new();
    for req in &table.requirements {
        if !seen.insert(req.index) {
            diag(
                Some(req.index),
                DiagnosticKind::DuplicateIndex,
                format!("index {} used more than once", req.index),
            );
        }
    }
    let expected: BTreeSet<u32> = (1..=seen.len() as u32).collect();
    if seen != expected {
        diag(
            None,
            DiagnosticKind::NonContiguousIndex,
            "requirement indexes must run 1..n without gaps".into(),
        );
    }

    for req in &table.requirements {
        let idx = Some(req.index);
        if req.postcondition.is_none() && req.actions.is_empty() {
            diag(
                idx,
                DiagnosticKind::EmptyRequirement,
                "needs a postcondition or at least one action".into(),
            );
        }
        if let Some(d) = req.duration {
            if req.precondition.is_none() {
                diag(
                    idx,
                    DiagnosticKind::DurationWithoutPrecondition,
                    "a duration requires a precondition".into(),
                );
            }
            if !(d >= 0.0 && d.is_finite()) {
                diag(
                    idx,
                    DiagnosticKind::NegativeDuration,
                    format!("duration {d} must be a finite value >= 0"),
                );
            }
        }

        let mut check_refs = |what: &str, allow_outputs: bool, refs: Vec<(&str, bool)>| {
            for (name, is_prev) in refs {
                let known = table.is_input(name) || table.is_output(name);
                if is_prev {
                    if !known {
                        diag(
                            idx,
                            DiagnosticKind::UnknownSignal,
                            format!("{what} uses prev({name}) of an undeclared signal"),
                        );
                    } else if !table.initial_values.contains_key(name) {
                        diag(
                            idx,
                            DiagnosticKind::MissingInitialValue,
                            format!("prev({name}) needs `init {name} = ...`"),
                        );
                    }
                } else if !(table.is_input(name) || (allow_outputs && table.is_output(name))) {
                    let allowed = if allow_outputs {
                        "inputs and outputs"
                    } else {
                        "inputs"
                    };
                    diag(
                        idx,
                        DiagnosticKind::UnknownSignal,
                        format!("{what} references `{name}`; only {allowed} are allowed"),
                    );
                }
            }
        };

        if let Some(p) = &req.precondition {
            check_refs("precondition", false, collect_refs_bool(p));
        }
        if let Some(p) = &req.postcondition {
            check_refs("postcondition", true, collect_refs_bool(p));
        }
        for a in &req.actions {
            let mut refs = Vec::new();
            a.value.visit_refs(&mut |n, p| refs.push((n, p)));
            check_refs("action", false, refs);
        }
        for a in &req.actions {
            if !table.is_output(&a.target) {
                diag(
                    idx,
                    DiagnosticKind::UndeclaredOutput,
                    format!(
                        "action assigns `{}`, which is not a declared output",
                        a.target
                    ),
                );
            } else if !table.initial_values.contains_key(&a.target) {
                diag(
                    idx,
                    DiagnosticKind::MissingInitialValue,
                    format!("action target `{}` needs an initial value", a.target),
                );
            }
        }
    }
    out
}

fn collect_refs_bool(e: &BoolExpr) -> Vec<(&str, bool)> {
    let mut refs = Vec::new();
    e.visit_refs(&mut |n, p| refs.push((n, p)));
    refs
}

/// Parses and validates a table.
pub fn parse_table(text: &str) -> Result<RequirementsTable, TableError> {
    let table = parse_table_unchecked(text)?;
    let diags = validate(&table);
    if diags.is_empty() {
        Ok(table)
    } else {
        Err(TableError::Invalid(diags))
    }
}

/// Parses the structure of a table without running [`validate`].
pub fn parse_table_unchecked(text: &str) -> Result<RequirementsTable, TableError> {
    let mut table: Option<RequirementsTable> = None;
    let mut current: Option<(Requirement, BTreeSet<&'static str>)> = None;
    let mut saw_inputs = false;
    let mut saw_outputs = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim_start();
        let indent = raw.chars().count() - trimmed.chars().count();
        let content = trimmed.trim_end();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (keyword, rest) = match content.find(char::is_whitespace) {
            Some(pos) => (&content[..pos], content[pos..].trim_start()),
            None => (content, ""),
        };
        let rest_col = indent + content[..content.len() - rest.len()].chars().count() + 1;
        let err = |column: usize, message: String| TableError::Syntax {
            line,
            column,
            message,
        };

        if keyword == "table" {
            if table.is_some() {
                return Err(err(indent + 1, "duplicate `table` header".into()));
            }
            let name =
                single_ident(rest).ok_or_else(|| err(rest_col, "expected table name".into()))?;
            table = Some(RequirementsTable::new(name));
            continue;
        }
        let tbl = table
            .as_mut()
            .ok_or_else(|| err(indent + 1, "file must start with `table <name>`".into()))?;

        match keyword {
            "inputs" | "outputs" => {
                if current.is_some() {
                    return Err(err(
                        indent + 1,
                        format!("`{keyword}` must precede requirements"),
                    ));
                }
                let flag = if keyword == "inputs" {
                    &mut saw_inputs
                } else {
                    &mut saw_outputs
                };
                if *flag {
                    return Err(err(indent + 1, format!("duplicate `{keyword}` line")));
                }
                *flag = true;
                let names = ident_list(rest).map_err(|m| err(rest_col, m))?;
                if keyword == "inputs" {
                    tbl.inputs = names;
                } else {
                    tbl.outputs = names;
                }
            }
            "init" => {
                if current.is_some() {
                    return Err(err(indent + 1, "`init` must precede requirements".into()));
                }
                let (name, value) = split_assignment(rest)
                    .ok_or_else(|| err(rest_col, "expected `<name> = <number>`".into()))?;
                let name = single_ident(name)
                    .ok_or_else(|| err(rest_col, "expected signal name".into()))?;
                let value_col = rest_col
                    + rest
                        .find('=')
                        .map(|p| rest[..=p].chars().count())
                        .unwrap_or(0);
                let v = parse_number(value.trim())
                    .ok_or_else(|| err(value_col, "expected a number".into()))?;
                if tbl.initial_values.insert(name.clone(), v).is_some() {
                    return Err(err(
                        indent + 1,
                        format!("duplicate initial value for `{name}`"),
                    ));
                }
            }
            "req" => {
                if let Some((r, _)) = current.take() {
                    tbl.requirements.push(r);
                }
                let index: u32 =
                    rest.parse().ok().filter(|i| *i > 0).ok_or_else(|| {
                        err(rest_col, "expected a positive requirement index".into())
                    })?;
                current = Some((Requirement::new(index), BTreeSet::new()));
            }
            "pre" | "dur" | "post" | "action" => {
                let (req, cells) = current.as_mut().ok_or_else(|| {
                    err(indent + 1, format!("`{keyword}` outside of a `req` block"))
                })?;
                let cell: &'static str = match keyword {
                    "pre" => "pre",
                    "dur" => "dur",
                    "post" => "post",
                    _ => "action",
                };
                if cell != "action" && !cells.insert(cell) {
                    return Err(err(
                        indent + 1,
                        format!("duplicate `{keyword}` in req {}", req.index),
                    ));
                }
                match cell {
                    "pre" | "post" => {
                        let value = if rest == "-" {
                            None
                        } else {
                            Some(parse_bool_expr(rest).map_err(|(c, m)| err(rest_col + c, m))?)
                        };
                        if cell == "pre" {
                            req.precondition = value;
                        } else {
                            req.postcondition = value;
                        }
                    }
                    "dur" => {
                        req.duration = if rest == "-" {
                            None
                        } else {
                            Some(parse_number(rest).ok_or_else(|| {
                                err(rest_col, "expected a duration in seconds or `-`".into())
                            })?)
                        };
                    }
                    _ => {
                        let (target, value) = split_assignment(rest).ok_or_else(|| {
                            err(rest_col, "expected `<output> = <expression>`".into())
                        })?;
                        let target = single_ident(target)
                            .ok_or_else(|| err(rest_col, "expected output name".into()))?;
                        let offset = rest
                            .find('=')
                            .map(|p| rest[..=p].chars().count())
                            .unwrap_or(0);
                        let value = parse_arith_expr(value)
                            .map_err(|(c, m)| err(rest_col + offset + c, m))?;
                        req.actions.push(Assignment { target, value });
                    }
                }
            }
            other => return Err(err(indent + 1, format!("unknown keyword `{other}`"))),
        }
    }

    let mut tbl = table.ok_or(TableError::Syntax {
        line: 1,
        column: 1,
        message: "empty file; expected `table <name>`".into(),
    })?;
    if let Some((r, _)) = current.take() {
        tbl.requirements.push(r);
    }
    Ok(tbl)
}

/// Splits `a = b` on the first `=` that is not part of `==`, `<=`, `>=` or `!=`.
fn split_assignment(s: &str) -> Option<(&str, &str)> {
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'=' {
            let prev = if i > 0 { bytes[i - 1] } else { 0 };
            let next = bytes.get(i + 1).copied().unwrap_or(0);
            if !matches!(prev, b'<' | b'>' | b'!' | b'=') && next != b'=' {
                return Some((&s[..i], &s[i + 1..]));
            }
        }
    }
    None
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn single_ident(s: &str) -> Option<String> {
    let s = s.trim();
    is_ident(s).then(|| s.to_string())
}

fn ident_list(s: &str) -> Result<Vec<String>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| single_ident(p).ok_or_else(|| format!("`{}` is not a valid identifier", p.trim())))
        .collect()
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

// ---------------------------------------------------------------------------
// Expression lexer and recursive-descent parser.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Op(s) => f.write_str(s),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, (usize, String)> {
    const OPS: [&str; 14] = [
        ">=", "<=", "==", "!=", ">", "<", "&", "|", "~", "+", "-", "*", "/", ",",
    ];
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or((start, format!("invalid number `{text}`")))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if c == '(' {
            out.push((Tok::LParen, start));
            i += 1;
        } else if c == ')' {
            out.push((Tok::RParen, start));
            i += 1;
        } else {
            let op = OPS.iter().find(|op| {
                op.chars()
                    .enumerate()
                    .all(|(k, oc)| chars.get(i + k) == Some(&oc))
            });
            match op {
                Some(op) if *op != "," => {
                    out.push((Tok::Op(op), start));
                    i += op.len();
                }
                _ => return Err((start, format!("unexpected character `{c}`"))),
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

type PResult<T> = Result<T, (usize, String)>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            end: src.chars().count(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err((self.col(), msg.into()))
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Op(o)) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.fail(format!("unexpected trailing token {t:?}")),
        }
    }

    fn bool_or(&mut self) -> PResult<BoolExpr> {
        let mut lhs = self.bool_and()?;
        while self.eat_op("|") {
            let rhs = self.bool_and()?;
            lhs = BoolExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn bool_and(&mut self) -> PResult<BoolExpr> {
        let mut lhs = self.bool_unary()?;
        while self.eat_op("&") {
            let rhs = self.bool_unary()?;
            lhs = BoolExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn bool_unary(&mut self) -> PResult<BoolExpr> {
        if self.eat_op("~") {
            return Ok(BoolExpr::not(self.bool_unary()?));
        }
        if self.peek() == Some(&Tok::LParen) {
            // `(` may open a grouped boolean or an arithmetic operand; try the
            // boolean reading first and fall back.
            let save = self.pos;
            self.pos += 1;
            if let Ok(inner) = self.bool_or() {
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    let continues_arith = matches!(
                        self.peek(),
                        Some(Tok::Op(o)) if !matches!(*o, "&" | "|")
                    );
                    if !continues_arith {
                        return Ok(inner);
                    }
                }
            }
            self.pos = save;
        }
        self.relation()
    }

    fn relation(&mut self) -> PResult<BoolExpr> {
        let lhs = self.arith()?;
        let op = match self.peek() {
            Some(Tok::Op(o)) => match *o {
                ">" => RelOp::Gt,
                "<" => RelOp::Lt,
                ">=" => RelOp::Ge,
                "<=" => RelOp::Le,
                "==" => RelOp::Eq,
                "!=" => RelOp::Ne,
                _ => return self.fail("expected a relational operator"),
            },
            _ => return self.fail("expected a relational operator"),
        };
        self.pos += 1;
        let rhs = self.arith()?;
        Ok(BoolExpr::rel(op, lhs, rhs))
    }

    fn arith(&mut self) -> PResult<ArithExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_op("+") {
                ArithOp::Add
            } else if self.eat_op("-") {
                ArithOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = ArithExpr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> PResult<ArithExpr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat_op("*") {
                ArithOp::Mul
            } else if self.eat_op("/") {
                ArithOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = ArithExpr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> PResult<ArithExpr> {
        match self.peek().cloned() {
            Some(Tok::Op("-")) => {
                self.pos += 1;
                if let Some(Tok::Num(v)) = self.peek() {
                    let v = -*v;
                    self.pos += 1;
                    return Ok(ArithExpr::Const(v));
                }
                let operand = self.factor()?;
                Ok(ArithExpr::binary(
                    ArithOp::Sub,
                    ArithExpr::Const(0.0),
                    operand,
                ))
            }
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(ArithExpr::Const(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "t" {
                    return Ok(ArithExpr::Time);
                }
                if name == "prev" {
                    if self.peek() != Some(&Tok::LParen) {
                        return self.fail("expected `(` after prev");
                    }
                    self.pos += 1;
                    let arg = match self.peek() {
                        Some(Tok::Ident(n)) if n != "t" && n != "prev" => n.clone(),
                        _ => return self.fail("prev expects a signal name"),
                    };
                    self.pos += 1;
                    if self.peek() != Some(&Tok::RParen) {
                        return self.fail("expected `)`");
                    }
                    self.pos += 1;
                    return Ok(ArithExpr::Prev(arg));
                }
                Ok(ArithExpr::Signal(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.arith()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => self.fail(format!("unexpected `{t}`")),
            None => self.fail("unexpected end of expression"),
        }
    }
}

/// Parses a boolean expression. Errors carry a 0-based character offset.
pub fn parse_bool_expr(src: &str) -> Result<BoolExpr, (usize, String)> {
    let mut p = Parser::new(src)?;
    let e = p.bool_or()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses an arithmetic expression. Errors carry a 0-based character offset.
pub fn parse_arith_expr(src: &str) -> Result<ArithExpr, (usize, String)> {
    let mut p = Parser::new(src)?;
    let e = p.arith()?;
    p.expect_end()?;
    Ok(e)
}

impl fmt::Display for RequirementsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "table {}", self.name)?;
        writeln!(f, "inputs  {}", self.inputs.join(", "))?;
        writeln!(f, "outputs {}", self.outputs.join(", "))?;
        for (name, v) in &self.initial_values {
            writeln!(f, "init    {name} = {v}")?;
        }
        for req in &self.requirements {
            writeln!(f, "req {}", req.index)?;
            match &req.precondition {
                Some(p) => writeln!(f, "  pre    {p}")?,
                None => writeln!(f, "  pre    -")?,
            }
            match req.duration {
                Some(d) => writeln!(f, "  dur    {d}")?,
                None => writeln!(f, "  dur    -")?,
            }
            match &req.postcondition {
                Some(p) => writeln!(f, "  post   {p}")?,
                None => writeln!(f, "  post   -")?,
            }
            for a in &req.actions {
                writeln!(f, "  action {} = {}", a.target, a.value)?;
            }
        }
        Ok(())
    }
}
