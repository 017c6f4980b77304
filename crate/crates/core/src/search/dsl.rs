//! A small, side-effect-free expression language for instance generators.
//!
//! Programs are a sequence of `let` bindings followed by one expression.
//! Evaluation is pure and bounded: every node visit costs one step and the
//! total number of scalars alive in any value is capped. The grammar lives in
//! `docs/dsl.md`.

use std::collections::HashMap;
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Grammar version. Bump when the accepted language changes.
pub const DSL_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("step budget of {0} exceeded")]
    StepBudget(u64),
    #[error("value larger than {0} scalars")]
    SizeLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Num(Rational),
    Inf,
    Tuple(Vec<Value>),
    List(Vec<Value>),
}

impl Value {
    /// Number of scalar leaves.
    pub fn size(&self) -> usize {
        match self {
            Value::Num(_) | Value::Inf => 1,
            Value::Tuple(v) | Value::List(v) => v.iter().map(Value::size).sum::<usize>().max(1),
        }
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Value::Num(r) => Some(r),
            _ => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Inf => "inf",
            Value::Tuple(_) => "tuple",
            Value::List(_) => "list",
        }
    }

    /// Truncates a top-level list, or every list inside a top-level tuple.
    pub fn clipped(self, len: usize) -> Value {
        match self {
            Value::List(mut v) => {
                v.truncate(len);
                Value::List(v)
            }
            Value::Tuple(parts) => Value::Tuple(
                parts
                    .into_iter()
                    .map(|p| match p {
                        Value::List(mut v) => {
                            v.truncate(len);
                            Value::List(v)
                        }
                        other => other,
                    })
                    .collect(),
            ),
            other => other,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, items: &[Value]) -> fmt::Result {
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
        match self {
            Value::Num(r) => write!(f, "{r}"),
            Value::Inf => write!(f, "inf"),
            Value::Tuple(v) => {
                write!(f, "(")?;
                join(f, v)?;
                if v.len() == 1 {
                    write!(f, ",")?;
                }
                write!(f, ")")
            }
            Value::List(v) => {
                write!(f, "[")?;
                join(f, v)?;
                write!(f, "]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Inf,
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Tuple(Vec<Expr>),
    List(Vec<Expr>),
    Call(String, Vec<Expr>),
    /// `map(i, lo, hi, body)`: `body` for each integer `lo <= i < hi`.
    Map { var: String, lo: Box<Expr>, hi: Box<Expr>, body: Box<Expr> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Program {
    source: String,
    lets: Vec<(String, Expr)>,
    body: Expr,
}

impl TryFrom<String> for Program {
    type Error = DslError;

    fn try_from(s: String) -> Result<Program, DslError> {
        Program::parse(&s)
    }
}

impl From<Program> for String {
    fn from(p: Program) -> String {
        p.source
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Program {
    pub fn parse(source: &str) -> Result<Program, DslError> {
        let tokens = lex(source)?;
        let mut p = Parser { tokens, pos: 0, end: source.len() };
        let mut lets = Vec::new();
        while p.peek() == Some(&Tok::Let) {
            p.bump();
            let name = p.ident()?;
            p.expect(&Tok::Eq)?;
            let e = p.expr()?;
            p.expect(&Tok::Semi)?;
            lets.push((name, e));
        }
        let body = p.expr()?;
        if p.pos < p.tokens.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Program { source: source.trim().to_string(), lets, body })
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Extracts a program from free-form model output: the first fenced code
/// block if there is one, otherwise the whole reply.
pub fn parse_reply(reply: &str) -> Result<Program, DslError> {
    let text = match reply.find("```") {
        Some(start) => {
            let rest = &reply[start + 3..];
            let rest = match rest.find('\n') {
                Some(nl) if !rest[..nl].contains(|c: char| !c.is_alphanumeric() && !c.is_whitespace()) => &rest[nl + 1..],
                _ => rest,
            };
            match rest.find("```") {
                Some(end) => &rest[..end],
                None => rest,
            }
        }
        None => reply,
    };
    Program::parse(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: u64,
    pub max_size: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_steps: 1_000_000, max_size: 100_000 }
    }
}

pub fn dsl_eval(program: &Program, clip_length: usize) -> Result<Value, DslError> {
    dsl_eval_with(program, clip_length, Limits::default())
}

pub fn dsl_eval_with(program: &Program, clip_length: usize, limits: Limits) -> Result<Value, DslError> {
    let mut ev = Evaluator { limits, steps: 0, env: HashMap::new() };
    for (name, e) in &program.lets {
        let v = ev.eval(e)?;
        ev.env.insert(name.clone(), v);
    }
    Ok(ev.eval(&program.body)?.clipped(clip_length))
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Let,
    Inf,
    Op(char),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eq,
}

const MAX_EXPONENT: i64 = 4096;

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, DslError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: &str| DslError::Parse { offset, message: message.into() };
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let mantissa: Rational = src[start..i].parse().map_err(|_| err(start, "malformed number"))?;
            let mut value = mantissa;
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                let digits = j;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == digits {
                    return Err(err(i, "malformed exponent"));
                }
                let e: i64 = src[i + 1..j].parse().map_err(|_| err(i, "malformed exponent"))?;
                if e.abs() > MAX_EXPONENT {
                    return Err(err(i, "exponent out of range"));
                }
                value = &value * &Rational::from_int(10).pow(e as i32);
                i = j;
            }
            out.push((Tok::Num(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match word {
                "let" => Tok::Let,
                "inf" => Tok::Inf,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            _ => return Err(err(start, &format!("unexpected character `{c}`"))),
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, message: &str) -> DslError {
        let offset = self.tokens.get(self.pos).map_or(self.end, |(_, o)| *o);
        DslError::Parse { offset, message: message.into() }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), DslError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {tok:?}")))
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    /// `^` binds tighter than unary minus on its left and is right-associative.
    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        match self.bump() {
            Some(Tok::Num(r)) => Ok(Expr::Num(r)),
            Some(Tok::Inf) => Ok(Expr::Inf),
            Some(Tok::Ident(name)) => {
                if self.peek() != Some(&Tok::LParen) {
                    return Ok(Expr::Var(name));
                }
                self.pos += 1;
                if name == "map" {
                    let var = self.ident()?;
                    self.expect(&Tok::Comma)?;
                    let lo = self.expr()?;
                    self.expect(&Tok::Comma)?;
                    let hi = self.expr()?;
                    self.expect(&Tok::Comma)?;
                    let body = self.expr()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(Expr::Map { var, lo: Box::new(lo), hi: Box::new(hi), body: Box::new(body) });
                }
                let args = self.sequence(&Tok::RParen)?.0;
                Ok(Expr::Call(name, args))
            }
            Some(Tok::LParen) => {
                let (items, trailing) = self.sequence(&Tok::RParen)?;
                if items.len() == 1 && !trailing {
                    Ok(items.into_iter().next().expect("one item"))
                } else {
                    Ok(Expr::Tuple(items))
                }
            }
            Some(Tok::LBracket) => Ok(Expr::List(self.sequence(&Tok::RBracket)?.0)),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected an expression"))
            }
        }
    }

    /// Comma-separated expressions up to `close`; reports a trailing comma.
    fn sequence(&mut self, close: &Tok) -> Result<(Vec<Expr>, bool), DslError> {
        let mut items = Vec::new();
        let mut trailing = false;
        loop {
            if self.peek() == Some(close) {
                self.pos += 1;
                return Ok((items, trailing));
            }
            items.push(self.expr()?);
            trailing = false;
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    trailing = true;
                }
                Some(t) if t == close => {}
                _ => return Err(self.error("expected `,` or a closing bracket")),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluator

struct Evaluator {
    limits: Limits,
    steps: u64,
    env: HashMap<String, Value>,
}

fn int_arg(v: &Value, what: &str) -> Result<i64, DslError> {
    let r = v.as_num().ok_or_else(|| DslError::Type(format!("{what} must be a number, got {}", v.kind())))?;
    if !r.is_integer() {
        return Err(DslError::Type(format!("{what} must be an integer, got {r}")));
    }
    r.floor().to_i64().ok_or_else(|| DslError::Type(format!("{what} is out of range")))
}

impl Evaluator {
    fn tick(&mut self, n: u64) -> Result<(), DslError> {
        self.steps += n;
        if self.steps > self.limits.max_steps {
            return Err(DslError::StepBudget(self.limits.max_steps));
        }
        Ok(())
    }

    fn sized(&mut self, v: Value) -> Result<Value, DslError> {
        let n = v.size();
        if n > self.limits.max_size {
            return Err(DslError::SizeLimit(self.limits.max_size));
        }
        self.tick(n as u64)?;
        Ok(v)
    }

    fn count(&self, v: &Value, what: &str) -> Result<usize, DslError> {
        let n = int_arg(v, what)?;
        if n < 0 {
            return Err(DslError::Type(format!("{what} must be non-negative, got {n}")));
        }
        if n as u64 > self.limits.max_size as u64 {
            return Err(DslError::SizeLimit(self.limits.max_size));
        }
        Ok(n as usize)
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, DslError> {
        self.tick(1)?;
        match e {
            Expr::Num(r) => Ok(Value::Num(r.clone())),
            Expr::Inf => Ok(Value::Inf),
            Expr::Var(name) => self.env.get(name).cloned().ok_or_else(|| DslError::UnknownName(name.clone())),
            Expr::Neg(inner) => {
                let v = self.eval(inner)?;
                self.scale(&Rational::from_int(-1), v)
            }
            Expr::Bin(op, a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                self.binary(*op, a, b)
            }
            Expr::Tuple(items) => {
                let v = items.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?;
                self.sized(Value::Tuple(v))
            }
            Expr::List(items) => {
                let v = items.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?;
                self.sized(Value::List(v))
            }
            Expr::Map { var, lo, hi, body } => {
                let lo = int_arg(&self.eval(lo)?, "map start")?;
                let hi = int_arg(&self.eval(hi)?, "map end")?;
                if hi.saturating_sub(lo) > self.limits.max_size as i64 {
                    return Err(DslError::SizeLimit(self.limits.max_size));
                }
                let saved = self.env.get(var).cloned();
                let mut out = Vec::new();
                let mut result = Ok(());
                for i in lo..hi {
                    self.env.insert(var.clone(), Value::Num(Rational::from_int(i)));
                    match self.eval(body) {
                        Ok(v) => out.push(v),
                        Err(e) => {
                            result = Err(e);
                            break;
                        }
                    }
                }
                match saved {
                    Some(v) => self.env.insert(var.clone(), v),
                    None => self.env.remove(var),
                };
                result?;
                self.sized(Value::List(out))
            }
            Expr::Call(name, args) => {
                let args: Vec<Value> = args.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?;
                self.call(name, args)
            }
        }
    }

    fn call(&mut self, name: &str, args: Vec<Value>) -> Result<Value, DslError> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(DslError::Type(format!("`{name}` takes {n} argument(s), got {}", args.len())))
            }
        };
        match name {
            "repeat" => {
                arity(2)?;
                let n = self.count(&args[0], "repeat count")?;
                if n.saturating_mul(args[1].size()) > self.limits.max_size {
                    return Err(DslError::SizeLimit(self.limits.max_size));
                }
                self.sized(Value::List(vec![args[1].clone(); n]))
            }
            "concat" => {
                let mut out = Vec::new();
                for a in args {
                    match a {
                        Value::List(v) => out.extend(v),
                        other => return Err(DslError::Type(format!("`concat` expects lists, got {}", other.kind()))),
                    }
                }
                self.sized(Value::List(out))
            }
            "flatten" => {
                arity(1)?;
                let Value::List(outer) = &args[0] else {
                    return Err(DslError::Type("`flatten` expects a list of lists".into()));
                };
                let mut out = Vec::new();
                for v in outer {
                    match v {
                        Value::List(inner) => out.extend(inner.iter().cloned()),
                        other => return Err(DslError::Type(format!("`flatten` found a {}", other.kind()))),
                    }
                }
                self.sized(Value::List(out))
            }
            "len" => {
                arity(1)?;
                match &args[0] {
                    Value::List(v) | Value::Tuple(v) => Ok(Value::Num(Rational::from_int(v.len() as i64))),
                    other => Err(DslError::Type(format!("`len` of a {}", other.kind()))),
                }
            }
            "tuple" => {
                arity(1)?;
                match args.into_iter().next() {
                    Some(Value::List(v)) => Ok(Value::Tuple(v)),
                    Some(other) => Err(DslError::Type(format!("`tuple` expects a list, got {}", other.kind()))),
                    None => unreachable!("arity checked"),
                }
            }
            "unit" | "zeros" | "ones" => {
                let d = self.count(&args.first().cloned().unwrap_or(Value::Inf), "dimension")?;
                let fill = if name == "ones" { 1 } else { 0 };
                let mut v = vec![Value::Num(Rational::from_int(fill)); d];
                if name == "unit" {
                    arity(2)?;
                    let i = self.count(&args[1], "unit index")?;
                    if i >= d {
                        return Err(DslError::Type(format!("unit index {i} outside dimension {d}")));
                    }
                    v[i] = Value::Num(Rational::one());
                } else {
                    arity(1)?;
                }
                self.sized(Value::Tuple(v))
            }
            "floor" | "ceil" => {
                arity(1)?;
                let r = args[0].as_num().ok_or_else(|| DslError::Type(format!("`{name}` of a {}", args[0].kind())))?;
                let z = if name == "floor" { r.floor() } else { r.ceil() };
                Ok(Value::Num(Rational::from_bigints(z, 1.into())))
            }
            "min" | "max" => {
                if args.is_empty() {
                    return Err(DslError::Type(format!("`{name}` needs arguments")));
                }
                let mut best: Option<Rational> = None;
                for a in &args {
                    let r = a.as_num().ok_or_else(|| DslError::Type(format!("`{name}` of a {}", a.kind())))?;
                    best = Some(match best {
                        None => r.clone(),
                        Some(b) if (name == "min") == (r < &b) => r.clone(),
                        Some(b) => b,
                    });
                }
                Ok(Value::Num(best.expect("non-empty")))
            }
            _ => Err(DslError::UnknownName(name.to_string())),
        }
    }

    fn scale(&mut self, k: &Rational, v: Value) -> Result<Value, DslError> {
        match v {
            Value::Num(r) => Ok(Value::Num(k * &r)),
            Value::Tuple(items) => {
                self.tick(items.len() as u64)?;
                Ok(Value::Tuple(items.into_iter().map(|x| self.scale(k, x)).collect::<Result<_, _>>()?))
            }
            other => Err(DslError::Type(format!("cannot scale a {}", other.kind()))),
        }
    }

    fn binary(&mut self, op: BinOp, a: Value, b: Value) -> Result<Value, DslError> {
        use Value::*;
        match (op, a, b) {
            (BinOp::Pow, Num(x), Num(y)) => {
                if !y.is_integer() {
                    return Err(DslError::Type(format!("non-integer exponent {y}")));
                }
                let e = y.floor().to_i64().filter(|e| e.abs() <= MAX_EXPONENT);
                let e = e.ok_or_else(|| DslError::Type(format!("exponent {y} out of range")))?;
                if x.is_zero() && e < 0 {
                    return Err(DslError::DivisionByZero);
                }
                self.tick(e.unsigned_abs().max(1).ilog2() as u64 + 1)?;
                Ok(Num(x.pow(e as i32)))
            }
            (BinOp::Add, Num(x), Num(y)) => Ok(Num(&x + &y)),
            (BinOp::Sub, Num(x), Num(y)) => Ok(Num(&x - &y)),
            (BinOp::Mul, Num(x), Num(y)) => Ok(Num(&x * &y)),
            (BinOp::Div, Num(x), Num(y)) => {
                if y.is_zero() {
                    return Err(DslError::DivisionByZero);
                }
                Ok(Num(&x / &y))
            }
            (BinOp::Add | BinOp::Sub, Tuple(x), Tuple(y)) => {
                if x.len() != y.len() {
                    return Err(DslError::Type(format!("tuple lengths {} and {} differ", x.len(), y.len())));
                }
                self.tick(x.len() as u64)?;
                let v = x.into_iter().zip(y).map(|(p, q)| self.binary(op, p, q)).collect::<Result<_, _>>()?;
                Ok(Tuple(v))
            }
            (BinOp::Mul, Num(k), t @ Tuple(_)) | (BinOp::Mul, t @ Tuple(_), Num(k)) => self.scale(&k, t),
            (BinOp::Div, t @ Tuple(_), Num(k)) => {
                if k.is_zero() {
                    return Err(DslError::DivisionByZero);
                }
                self.scale(&k.recip(), t)
            }
            (BinOp::Add, List(mut x), List(y)) => {
                x.extend(y);
                self.sized(List(x))
            }
            (BinOp::Mul, List(x), n @ Num(_)) | (BinOp::Mul, n @ Num(_), List(x)) => {
                let n = self.count(&n, "list repetition")?;
                let unit = List(x.clone()).size();
                if n.saturating_mul(unit) > self.limits.max_size {
                    return Err(DslError::SizeLimit(self.limits.max_size));
                }
                let mut out = Vec::with_capacity(x.len() * n);
                for _ in 0..n {
                    out.extend(x.iter().cloned());
                }
                self.sized(List(out))
            }
            (op, a, b) => Err(DslError::Type(format!("unsupported {op:?} on {} and {}", a.kind(), b.kind()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str) -> Result<Value, DslError> {
        dsl_eval(&Program::parse(src)?, usize::MAX)
    }

    fn num(n: i64, d: i64) -> Value {
        Value::Num(Rational::new(n, d))
    }

    #[test]
    fn bin_packing_construction() {
        let v = eval("concat(repeat(6, 1/6), repeat(7, 1/7))").unwrap();
        let Value::List(items) = v else { panic!("list expected") };
        assert_eq!(items.len(), 13);
        assert!(items[..6].iter().all(|x| *x == num(1, 6)));
        assert!(items[6..].iter().all(|x| *x == num(1, 7)));
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(eval("repeat(0, x)").unwrap_err(), DslError::UnknownName("x".into()));
        assert_eq!(eval("let x = 5; repeat(0, x)").unwrap(), Value::List(vec![]));
        assert_eq!(eval("1/0").unwrap_err(), DslError::DivisionByZero);
        assert_eq!(eval("0^-1").unwrap_err(), DslError::DivisionByZero);
    }

    #[test]
    fn python_style_lists() {
        let v = eval("[(1, 2)] * 2 + [(4, 4), (2, 2), (1, 3)]").unwrap();
        assert_eq!(v.to_string(), "[(1, 2), (1, 2), (4, 4), (2, 2), (1, 3)]");
    }

    #[test]
    fn precedence_and_literals() {
        assert_eq!(eval("-2^2").unwrap(), num(-4, 1));
        assert_eq!(eval("2^3^2").unwrap(), num(512, 1));
        assert_eq!(eval("1 - 2 - 3").unwrap(), num(-4, 1));
        assert_eq!(eval("0.114").unwrap(), num(114, 1000));
        assert_eq!(eval("1e8").unwrap(), num(100_000_000, 1));
        assert_eq!(eval("2.5e-1").unwrap(), num(1, 4));
        assert_eq!(eval("(3)").unwrap(), num(3, 1));
        assert_eq!(eval("(3,)").unwrap(), Value::Tuple(vec![num(3, 1)]));
    }

    #[test]
    fn vectors_and_maps() {
        assert_eq!(eval("unit(3, 1) * 2 - ones(3)").unwrap().to_string(), "(-1, 1, -1)");
        assert_eq!(eval("map(i, 0, 4, 2^i)").unwrap().to_string(), "[1, 2, 4, 8]");
        assert_eq!(eval("flatten(map(i, 1, 3, repeat(i, i)))").unwrap().to_string(), "[1, 2, 2]");
        assert_eq!(eval("let i = 9; concat(map(i, 0, 1, i), [i])").unwrap().to_string(), "[0, 9]");
        assert_eq!(eval("[(1, inf), (2, 3)]").unwrap().to_string(), "[(1, inf), (2, 3)]");
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(eval("repeat(10^9, 1)"), Err(DslError::SizeLimit(_))));
        assert!(matches!(eval("[1] * 10^9"), Err(DslError::SizeLimit(_))));
        let deep = "map(i, 0, 1000, map(j, 0, 1000, 0))";
        assert!(matches!(eval(deep), Err(DslError::StepBudget(_) | DslError::SizeLimit(_))));
        assert!(matches!(eval("2^100000"), Err(DslError::Type(_))));
    }

    #[test]
    fn clipping() {
        let p = Program::parse("map(i, 0, 10, i)").unwrap();
        assert_eq!(dsl_eval(&p, 3).unwrap().to_string(), "[0, 1, 2]");
        let p = Program::parse("([1, 2, 3], [4, 5, 6])").unwrap();
        assert_eq!(dsl_eval(&p, 2).unwrap().to_string(), "([1, 2], [4, 5])");
    }

    #[test]
    fn replies_and_errors() {
        let p = parse_reply("Sure, here it is:\n```text\n[0.5, 0.5]\n```\nThanks").unwrap();
        assert_eq!(p.source(), "[0.5, 0.5]");
        assert!(parse_reply("I cannot help with that.").is_err());
        assert!(matches!(Program::parse("[1, 2"), Err(DslError::Parse { .. })));
        assert!(matches!(Program::parse("1 $ 2"), Err(DslError::Parse { offset: 2, .. })));
        assert!(matches!(eval("(1, 2) + (1, 2, 3)"), Err(DslError::Type(_))));
        assert!(matches!(eval("foo(1)"), Err(DslError::UnknownName(_))));
    }

    #[test]
    fn serde_round_trip() {
        let p = Program::parse("repeat(2, 1/2)").unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"repeat(2, 1/2)\"");
        let back: Program = serde_json::from_str(&json).unwrap();
        assert_eq!(dsl_eval(&back, 10).unwrap(), dsl_eval(&p, 10).unwrap());
    }
}
