//! Arithmetic expressions over the coordinates `x1`, `x2`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?       right associative
//! exponent:= ('-' | '+') exponent | power
//! primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! So `-x^2` is `-(x^2)`, `2^3^2` is `2^(3^2)` and `2^-1` is `2^(-1)`.
//! Names are `x1`, `x2`, `pi`, the constants `gamma` and `s` (plus any
//! declared through [`parse_with_constants`]), and the functions `sin`,
//! `cos`, `exp`, `log`, `sqrt`, `abs` and `pow(a, b)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::function::{ScalarFn, VectorFn};

/// Named constant values available at evaluation time.
pub type Constants = BTreeMap<String, f64>;

/// Constants every expression may reference without declaring them.
pub const DEFAULT_CONSTANTS: [&str; 2] = ["gamma", "s"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function '{name}' at byte {offset} takes {expected} argument(s), got {found}")]
    Arity { name: String, offset: usize, expected: usize, found: usize },
    #[error("constant '{name}' has no value")]
    UnboundConstant { name: String },
    #[error("expression '{expr}' evaluates to {value} at ({x1}, {x2})")]
    NonFinite { expr: String, value: f64, x1: f64, x2: f64 },
}

impl ExprError {
    /// Byte offset into the source, for parse errors.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { offset, .. }
            | ExprError::UnknownIdentifier { offset, .. }
            | ExprError::Arity { offset, .. } => Some(*offset),
            _ => None,
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X1,
    X2,
    /// A named constant; `pi` is built in, others come from [`Constants`].
    Const(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    /// Evaluates at `(x1, x2)`; a non-finite result is an error.
    pub fn eval(&self, x1: f64, x2: f64, constants: &Constants) -> Result<f64, ExprError> {
        let v = self.eval_raw(x1, x2, constants)?;
        if !v.is_finite() {
            return Err(ExprError::NonFinite { expr: self.to_string(), value: v, x1, x2 });
        }
        Ok(v)
    }

    fn eval_raw(&self, x1: f64, x2: f64, c: &Constants) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::X1 => x1,
            Expr::X2 => x2,
            Expr::Const(name) => lookup(name, c)?,
            Expr::Neg(e) => -e.eval_raw(x1, x2, c)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval_raw(x1, x2, c)?, b.eval_raw(x1, x2, c)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval_raw(x1, x2, c)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                    Func::Pow => a.powf(args[1].eval_raw(x1, x2, c)?),
                }
            }
        })
    }

    /// Replaces every constant by its value.
    pub fn substitute(&self, c: &Constants) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Const(name) => Expr::Num(lookup(name, c)?),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(c)?)),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.substitute(c)?), Box::new(b.substitute(c)?)),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| a.substitute(c)).collect::<Result<_, _>>()?),
            other => other.clone(),
        })
    }

    /// Names of the constants referenced, excluding `pi`.
    pub fn constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_constants(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_constants(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(n) if n != "pi" => out.push(n.clone()),
            Expr::Neg(e) => e.collect_constants(out),
            Expr::Bin(_, a, b) => {
                a.collect_constants(out);
                b.collect_constants(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_constants(out)),
            _ => {}
        }
    }
}

fn lookup(name: &str, c: &Constants) -> Result<f64, ExprError> {
    if name == "pi" {
        return Ok(c.get("pi").copied().unwrap_or(std::f64::consts::PI));
    }
    c.get(name).copied().ok_or_else(|| ExprError::UnboundConstant { name: name.to_string() })
}

/// Fully parenthesised form; parsing it gives back any tree produced by [`parse`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X1 => write!(f, "x1"),
            Expr::X2 => write!(f, "x2"),
            Expr::Const(n) => write!(f, "{n}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let o = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {o} {b})")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    parse_with_constants(text, &[])
}

/// Parses `text`, additionally accepting the constant names in `extra`.
pub fn parse_with_constants(text: &str, extra: &[String]) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text, pos: 0, extra };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error(format!("unexpected '{}'", p.peek_char().unwrap())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    extra: &'a [String],
}

impl Parser<'_> {
    fn error(&self, message: String) -> ExprError {
        ExprError::Syntax { offset: self.pos, message }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.exponent()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        if self.eat('+') {
            return self.exponent();
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input".into())),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'".into()));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.name(),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.src[start..i];
        let v: f64 = text.parse().map_err(|_| ExprError::Syntax { offset: start, message: format!("bad number '{text}'") })?;
        if !v.is_finite() {
            return Err(ExprError::Syntax { offset: start, message: format!("number '{text}' out of range") });
        }
        self.pos = i;
        Ok(Expr::Num(v))
    }

    fn name(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
            i += 1;
        }
        let name = &self.src[start..i];
        self.pos = i;
        if let Some(func) = Func::from_name(name) {
            if !self.eat('(') {
                return Err(self.error(format!("expected '(' after function '{name}'")));
            }
            let mut args = vec![self.expr()?];
            while self.eat(',') {
                args.push(self.expr()?);
            }
            if !self.eat(')') {
                return Err(self.error("expected ')' or ','".into()));
            }
            if args.len() != func.arity() {
                return Err(ExprError::Arity { name: name.into(), offset: start, expected: func.arity(), found: args.len() });
            }
            return Ok(Expr::Call(func, args));
        }
        match name {
            "x1" => Ok(Expr::X1),
            "x2" => Ok(Expr::X2),
            _ if name == "pi" || DEFAULT_CONSTANTS.contains(&name) || self.extra.iter().any(|e| e == name) => {
                Ok(Expr::Const(name.into()))
            }
            _ => Err(ExprError::UnknownIdentifier { name: name.into(), offset: start }),
        }
    }
}

/// An expression with its constants substituted, usable as a field.
#[derive(Debug, Clone)]
pub struct BoundExpr {
    expr: Arc<Expr>,
    source: Arc<Expr>,
}

impl BoundExpr {
    pub fn new(expr: &Expr, constants: &Constants) -> Result<Self, ExprError> {
        Ok(BoundExpr { expr: Arc::new(expr.substitute(constants)?), source: Arc::new(expr.clone()) })
    }

    /// Parses and binds in one step.
    pub fn parse(text: &str, constants: &Constants) -> Result<Self, ExprError> {
        let names: Vec<String> = constants.keys().cloned().collect();
        BoundExpr::new(&parse_with_constants(text, &names)?, constants)
    }

    pub fn source(&self) -> &Expr {
        &self.source
    }

    pub fn value(&self, x: [f64; 2]) -> Result<f64, ExprError> {
        let v = self.expr.eval_raw(x[0], x[1], &Constants::new())?;
        if !v.is_finite() {
            return Err(ExprError::NonFinite { expr: self.source.to_string(), value: v, x1: x[0], x2: x[1] });
        }
        Ok(v)
    }
}

impl ScalarFn for BoundExpr {
    fn eval(&self, x: [f64; 2]) -> crate::Result<f64> {
        Ok(self.value(x)?)
    }
}

/// Two bound expressions forming a gradient.
#[derive(Debug, Clone)]
pub struct BoundGradient(pub BoundExpr, pub BoundExpr);

impl VectorFn for BoundGradient {
    fn eval(&self, x: [f64; 2]) -> crate::Result<[f64; 2]> {
        Ok([self.0.value(x)?, self.1.value(x)?])
    }
}
