//! CPLEX-LP text exports of the QUBO (quadratic objective) and its lifted
//! linearisation, plus a reader for the subset of the format written here.
//!
//! Variable names are fixed: `x_i` for site `i` and `y_i_j` (`i < j`) for
//! the product `x_i x_j`, so exports are byte-deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::error::{IsingError, Result};
use crate::qubo::QuboModel;

fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-6..1e15).contains(&a) {
        format!("{a:e}")
    } else {
        format!("{a}")
    }
}

fn term(out: &mut String, coef: f64, body: &str) {
    let sign = if coef.is_sign_negative() { '-' } else { '+' };
    let _ = writeln!(out, " {sign} {} {body}", fmt_num(coef));
}

fn constant(out: &mut String, c: f64) {
    let sign = if c.is_sign_negative() { '-' } else { '+' };
    let _ = writeln!(out, " {sign} {}", fmt_num(c));
}

fn binaries(out: &mut String, names: impl Iterator<Item = String>) {
    out.push_str("Binaries\n");
    for name in names {
        let _ = writeln!(out, " {name}");
    }
}

/// `minimize Σ c_ij x_i x_j + Σ c_i x_i + c`, `x` binary.
pub fn iqp_string(model: &QuboModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ QUBO: {} binary variables, {} products",
        model.n(),
        model.quad().len()
    );
    out.push_str("Minimize\n obj:\n");
    for &(i, c) in model.lin() {
        term(&mut out, c, &format!("x_{i}"));
    }
    if !model.quad().is_empty() {
        out.push_str(" + [\n");
        for &(i, j, c) in model.quad() {
            // LP quadratic blocks are halved: [ 2c x_i * x_j ] / 2.
            term(&mut out, 2.0 * c, &format!("x_{i} * x_{j}"));
        }
        out.push_str(" ] / 2\n");
    }
    constant(&mut out, model.offset());
    out.push_str("Subject To\n");
    binaries(&mut out, (0..model.n()).map(|i| format!("x_{i}")));
    out.push_str("End\n");
    out
}

/// Lifted form: `y_i_j` replaces `x_i x_j` with
/// `x_i + x_j - 1 <= y_i_j`, `y_i_j <= x_i`, `y_i_j <= x_j`.
pub fn ilp_string(model: &QuboModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ Linearised QUBO: {} binary variables, {} lifted products",
        model.n(),
        model.quad().len()
    );
    out.push_str("Minimize\n obj:\n");
    for &(i, c) in model.lin() {
        term(&mut out, c, &format!("x_{i}"));
    }
    for &(i, j, c) in model.quad() {
        term(&mut out, c, &format!("y_{i}_{j}"));
    }
    constant(&mut out, model.offset());
    out.push_str("Subject To\n");
    for &(i, j, _) in model.quad() {
        let _ = writeln!(out, " lo_{i}_{j}: x_{i} + x_{j} - y_{i}_{j} <= 1");
        let _ = writeln!(out, " ui_{i}_{j}: y_{i}_{j} - x_{i} <= 0");
        let _ = writeln!(out, " uj_{i}_{j}: y_{i}_{j} - x_{j} <= 0");
    }
    binaries(
        &mut out,
        (0..model.n())
            .map(|i| format!("x_{i}"))
            .chain(model.quad().iter().map(|&(i, j, _)| format!("y_{i}_{j}"))),
    );
    out.push_str("End\n");
    out
}

fn write_file(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|source| IsingError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn export_iqp(model: &QuboModel, path: &Path) -> Result<()> {
    write_file(path, iqp_string(model))
}

pub fn export_ilp(model: &QuboModel, path: &Path) -> Result<()> {
    write_file(path, ilp_string(model))
}

#[derive(Debug, Error, PartialEq)]
#[error("LP parse error: {0}")]
pub struct LpParseError(String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpConstraint {
    pub name: Option<String>,
    pub terms: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A parsed LP file: objective, linear constraints and binary declarations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpProblem {
    pub maximize: bool,
    pub constant: f64,
    pub linear: BTreeMap<String, f64>,
    pub quadratic: BTreeMap<(String, String), f64>,
    pub constraints: Vec<LpConstraint>,
    pub binaries: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Sym(char),
    Le,
    Ge,
}

fn tokenize(text: &str) -> std::result::Result<Vec<Tok>, LpParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() {
                let d = chars[i];
                let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse()
                .map_err(|_| LpParseError(format!("bad number '{s}'")))?;
            toks.push(Tok::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || "_.#".contains(chars[i])) {
                i += 1;
            }
            toks.push(Tok::Name(chars[start..i].iter().collect()));
        } else if c == '<' || c == '>' || c == '=' {
            let next_eq = chars.get(i + 1) == Some(&'=');
            toks.push(match c {
                '<' => Tok::Le,
                '>' => Tok::Ge,
                _ => Tok::Sym('='),
            });
            i += if next_eq { 2 } else { 1 };
        } else if "+-*/[]:^".contains(c) {
            toks.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(LpParseError(format!("unexpected character '{c}'")));
        }
    }
    Ok(toks)
}

#[derive(Default)]
struct Expr {
    constant: f64,
    linear: Vec<(String, f64)>,
    quadratic: Vec<(String, String, f64)>,
}

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> std::result::Result<(), LpParseError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(LpParseError(format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn label(&mut self) -> Option<String> {
        if let (Some(Tok::Name(n)), Some(Tok::Sym(':'))) = (self.peek(), self.peek_at(1)) {
            let n = n.clone();
            self.pos += 2;
            Some(n)
        } else {
            None
        }
    }

    fn sign(&mut self) -> Option<f64> {
        let mut sign = None;
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek() {
            let s = if *c == '-' { -1.0 } else { 1.0 };
            sign = Some(sign.unwrap_or(1.0) * s);
            self.pos += 1;
        }
        sign
    }

    /// Parses terms until a token that cannot continue an expression.
    fn expr(&mut self, allow_quadratic: bool) -> std::result::Result<Expr, LpParseError> {
        let mut e = Expr::default();
        loop {
            let save = self.pos;
            let sign = self.sign();
            match self.peek() {
                Some(Tok::Sym('[')) if allow_quadratic => {
                    self.pos += 1;
                    let s = sign.unwrap_or(1.0);
                    let mut block = Vec::new();
                    while self.peek() != Some(&Tok::Sym(']')) {
                        let inner = self.sign().unwrap_or(1.0);
                        let coef = match self.peek() {
                            Some(Tok::Num(v)) => {
                                let v = *v;
                                self.pos += 1;
                                v
                            }
                            _ => 1.0,
                        };
                        let a = match self.next() {
                            Some(Tok::Name(a)) => a,
                            other => {
                                return Err(LpParseError(format!(
                                    "expected variable in quadratic block, found {other:?}"
                                )))
                            }
                        };
                        let b = match self.next() {
                            Some(Tok::Sym('*')) => match self.next() {
                                Some(Tok::Name(b)) => b,
                                other => {
                                    return Err(LpParseError(format!(
                                        "expected variable after '*', found {other:?}"
                                    )))
                                }
                            },
                            Some(Tok::Sym('^')) => {
                                self.expect(Tok::Num(2.0))?;
                                a.clone()
                            }
                            other => {
                                return Err(LpParseError(format!(
                                    "expected '*' or '^' in quadratic term, found {other:?}"
                                )))
                            }
                        };
                        block.push((a, b, inner * coef));
                    }
                    self.pos += 1;
                    self.expect(Tok::Sym('/'))?;
                    self.expect(Tok::Num(2.0))?;
                    e.quadratic
                        .extend(block.into_iter().map(|(a, b, c)| (a, b, s * c / 2.0)));
                }
                Some(Tok::Num(v)) => {
                    let v = *v * sign.unwrap_or(1.0);
                    self.pos += 1;
                    if let Some(Tok::Name(name)) = self.peek() {
                        e.linear.push((name.clone(), v));
                        self.pos += 1;
                    } else {
                        e.constant += v;
                    }
                }
                Some(Tok::Name(name)) if self.peek_at(1) != Some(&Tok::Sym(':')) => {
                    e.linear.push((name.clone(), sign.unwrap_or(1.0)));
                    self.pos += 1;
                }
                _ => {
                    self.pos = save;
                    return Ok(e);
                }
            }
        }
    }
}

fn section_of(line: &str) -> Option<&'static str> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some("min"),
        "maximize" | "maximise" | "max" => Some("max"),
        "subject to" | "such that" | "st" | "s.t." => Some("st"),
        "binaries" | "binary" | "bin" => Some("bin"),
        "bounds" => Some("bounds"),
        "end" => Some("end"),
        _ => None,
    }
}

impl LpProblem {
    pub fn parse(text: &str) -> std::result::Result<Self, LpParseError> {
        let mut sections: Vec<(&'static str, String)> = Vec::new();
        for line in text.lines() {
            let line = line.split('\\').next().unwrap_or("");
            if let Some(s) = section_of(line) {
                sections.push((s, String::new()));
            } else if let Some((_, body)) = sections.last_mut() {
                body.push_str(line);
                body.push('\n');
            } else if !line.trim().is_empty() {
                return Err(LpParseError(format!("text before objective section: '{line}'")));
            }
        }

        let mut lp = LpProblem::default();
        for (kind, body) in sections {
            let mut cur = Cursor {
                toks: tokenize(&body)?,
                pos: 0,
            };
            match kind {
                "min" | "max" => {
                    lp.maximize = kind == "max";
                    cur.label();
                    let e = cur.expr(true)?;
                    lp.constant += e.constant;
                    for (name, c) in e.linear {
                        *lp.linear.entry(name).or_default() += c;
                    }
                    for (a, b, c) in e.quadratic {
                        let key = if a <= b { (a, b) } else { (b, a) };
                        *lp.quadratic.entry(key).or_default() += c;
                    }
                }
                "st" => {
                    while cur.peek().is_some() {
                        let name = cur.label();
                        let lhs = cur.expr(false)?;
                        let sense = match cur.next() {
                            Some(Tok::Le) => Sense::Le,
                            Some(Tok::Ge) => Sense::Ge,
                            Some(Tok::Sym('=')) => Sense::Eq,
                            other => {
                                return Err(LpParseError(format!(
                                    "expected comparison in constraint {name:?}, found {other:?}"
                                )))
                            }
                        };
                        let s = cur.sign().unwrap_or(1.0);
                        let rhs = match cur.next() {
                            Some(Tok::Num(v)) => s * v,
                            other => {
                                return Err(LpParseError(format!(
                                    "expected right-hand side, found {other:?}"
                                )))
                            }
                        };
                        lp.constraints.push(LpConstraint {
                            name,
                            terms: lhs.linear,
                            sense,
                            rhs: rhs - lhs.constant,
                        });
                    }
                }
                "bin" => {
                    while let Some(t) = cur.next() {
                        match t {
                            Tok::Name(n) => {
                                lp.binaries.insert(n);
                            }
                            other => {
                                return Err(LpParseError(format!(
                                    "unexpected token {other:?} in binaries"
                                )))
                            }
                        }
                    }
                }
                "end" | "bounds" => {}
                _ => unreachable!(),
            }
        }
        Ok(lp)
    }

    /// Objective value; variables missing from `values` are taken as 0.
    pub fn objective(&self, values: &HashMap<String, f64>) -> f64 {
        let v = |name: &str| values.get(name).copied().unwrap_or(0.0);
        let mut e = self.constant;
        for (name, c) in &self.linear {
            e += c * v(name);
        }
        for ((a, b), c) in &self.quadratic {
            e += c * v(a) * v(b);
        }
        e
    }

    pub fn is_feasible(&self, values: &HashMap<String, f64>) -> bool {
        let v = |name: &str| values.get(name).copied().unwrap_or(0.0);
        self.constraints.iter().all(|con| {
            let lhs: f64 = con.terms.iter().map(|(n, c)| c * v(n)).sum();
            match con.sense {
                Sense::Le => lhs <= con.rhs + 1e-12,
                Sense::Ge => lhs >= con.rhs - 1e-12,
                Sense::Eq => (lhs - con.rhs).abs() <= 1e-12,
            }
        })
    }
}
