//! Density expressions: a small arithmetic language in one variable `x`.
//!
//! Grammar (precedence low to high): `+ -`, `* /`, unary `-`, `^`
//! (right-associative, binding tighter than unary minus), atoms. Atoms are
//! decimal literals, `x`, parenthesised expressions, and the calls
//! `exp`, `ln`, `sin`, `cos`, `sqrt`.

use std::fmt;
use thiserror::Error;

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
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(f64),
    Var,
    Neg(Box<ExprAst>),
    Bin(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Func, Box<ExprAst>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {what}")]
    Syntax { offset: usize, what: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdent { offset: usize, name: String },
    #[error("mismatched parenthesis at offset {offset}")]
    Paren { offset: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error at x = {x}: {what}")]
    Domain { x: f64, what: &'static str },
}

/// Parse an expression source into an AST.
pub fn parse(source: &str) -> Result<ExprAst, ParseError> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(ParseError::Syntax {
            offset: 0,
            what: "empty expression".into(),
        });
    }
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ParseError::Syntax {
            offset: p.pos,
            what: format!("unexpected `{}`", p.src[p.pos] as char),
        });
    }
    Ok(ast)
}

/// Evaluate an AST at the point `x`.
pub fn eval(ast: &ExprAst, x: f64) -> Result<f64, EvalError> {
    Ok(match ast {
        ExprAst::Const(c) => *c,
        ExprAst::Var => x,
        ExprAst::Neg(e) => -eval(e, x)?,
        ExprAst::Bin(op, l, r) => {
            let a = eval(l, x)?;
            let b = eval(r, x)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(EvalError::Domain {
                            x,
                            what: "division by zero",
                        });
                    }
                    a / b
                }
                BinOp::Pow => {
                    let v = a.powf(b);
                    if v.is_nan() {
                        return Err(EvalError::Domain {
                            x,
                            what: "fractional power of a negative base",
                        });
                    }
                    v
                }
            }
        }
        ExprAst::Call(f, e) => {
            let v = eval(e, x)?;
            match f {
                Func::Exp => v.exp(),
                Func::Ln => {
                    if v <= 0.0 {
                        return Err(EvalError::Domain {
                            x,
                            what: "ln of a non-positive argument",
                        });
                    }
                    v.ln()
                }
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(EvalError::Domain {
                            x,
                            what: "sqrt of a negative argument",
                        });
                    }
                    v.sqrt()
                }
            }
        }
    })
}

// Fully parenthesised printer; `parse(print(ast))` evaluates identically.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "({:?})", c)
                } else {
                    write!(f, "{:?}", c)
                }
            }
            ExprAst::Var => write!(f, "x"),
            ExprAst::Neg(e) => write!(f, "(-{})", e),
            ExprAst::Bin(op, l, r) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({}{}{})", l, s, r)
            }
            ExprAst::Call(func, e) => write!(f, "{}({})", func.name(), e),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'+' => BinOp::Add,
                b'-' => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ExprAst::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'*' => BinOp::Mul,
                b'/' => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = ExprAst::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary minus sits between `* /` and `^`, so `-2^2` reads as `-(2^2)`
    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(ExprAst::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            // right-associative; the exponent may carry its own unary minus
            let exp = self.factor()?;
            return Ok(ExprAst::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let c = self.peek().ok_or(ParseError::Syntax {
            offset: self.pos,
            what: "unexpected end of input".into(),
        })?;
        match c {
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(ParseError::Paren { offset: self.pos });
                }
                self.pos += 1;
                Ok(inner)
            }
            b'0'..=b'9' | b'.' => self.number(),
            b'a'..=b'z' | b'A'..=b'Z' => self.ident(),
            other => Err(ParseError::Syntax {
                offset: self.pos,
                what: format!("unexpected `{}`", other as char),
            }),
        }
    }

    fn number(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && matches!(self.src[self.pos], b'0'..=b'9' | b'.') {
            self.pos += 1;
        }
        // optional exponent part, e.g. 1e-5
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && matches!(self.src[probe], b'+' | b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(ExprAst::Const)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                what: format!("malformed number `{}`", text),
            })
    }

    fn ident(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if name == "x" {
            return Ok(ExprAst::Var);
        }
        let func = match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => {
                return Err(ParseError::UnknownIdent {
                    offset: start,
                    name: name.into(),
                })
            }
        };
        if self.peek() != Some(b'(') {
            return Err(ParseError::Syntax {
                offset: self.pos,
                what: format!("expected `(` after `{}`", name),
            });
        }
        self.pos += 1;
        let arg = self.expr()?;
        if self.peek() != Some(b')') {
            return Err(ParseError::Paren { offset: self.pos });
        }
        self.pos += 1;
        Ok(ExprAst::Call(func, Box::new(arg)))
    }
}

#[derive(Debug, Error)]
pub enum DensityError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("density is not strictly positive: rho({x}) = {value}")]
    NonPositive { x: f64, value: f64 },
    #[error("density is not finite: rho({x}) = {value}")]
    NonFinite { x: f64, value: f64 },
    #[error("invalid interval [{a}, {b}]")]
    Interval { a: f64, b: f64 },
    #[error("unknown preset `{0}` (known: euler, unit)")]
    UnknownPreset(String),
}

/// A validated density `rho(x)` on `[a, b]`: finite and strictly positive
/// on a dense screening grid. Immutable; evaluation is pure.
#[derive(Debug, Clone)]
pub struct DensitySpec {
    ast: ExprAst,
    source: String,
    a: f64,
    b: f64,
}

/// Number of equispaced screening points used by the convenience
/// constructors.
pub const DEFAULT_VALIDATION_GRID: usize = 1001;

/// Check that the expression is finite and strictly positive at `grid_n`
/// equispaced points of `[a, b]` (both endpoints included).
pub fn validate_density(
    ast: ExprAst,
    source: &str,
    a: f64,
    b: f64,
    grid_n: usize,
) -> Result<DensitySpec, DensityError> {
    if b <= a || !a.is_finite() || !b.is_finite() {
        return Err(DensityError::Interval { a, b });
    }
    assert!(grid_n >= 2, "validation grid needs at least two points");
    for i in 0..grid_n {
        let x = a + (b - a) * i as f64 / (grid_n - 1) as f64;
        let value = eval(&ast, x)?;
        if !value.is_finite() {
            return Err(DensityError::NonFinite { x, value });
        }
        if value <= 0.0 {
            return Err(DensityError::NonPositive { x, value });
        }
    }
    Ok(DensitySpec {
        ast,
        source: source.to_string(),
        a,
        b,
    })
}

impl DensitySpec {
    /// Parse and validate a density from source text.
    pub fn from_source(source: &str, a: f64, b: f64) -> Result<Self, DensityError> {
        let ast = parse(source)?;
        validate_density(ast, source, a, b, DEFAULT_VALIDATION_GRID)
    }

    /// Named presets bypassing the parser: `euler` is `1/x^2` on `[1, e]`,
    /// `unit` is `1` on `[0, pi]`.
    pub fn preset(name: &str) -> Result<Self, DensityError> {
        match name {
            "euler" => Ok(DensitySpec {
                ast: ExprAst::Bin(
                    BinOp::Div,
                    Box::new(ExprAst::Const(1.0)),
                    Box::new(ExprAst::Bin(
                        BinOp::Pow,
                        Box::new(ExprAst::Var),
                        Box::new(ExprAst::Const(2.0)),
                    )),
                ),
                source: "1/x^2".into(),
                a: 1.0,
                b: std::f64::consts::E,
            }),
            "unit" => Ok(DensitySpec {
                ast: ExprAst::Const(1.0),
                source: "1".into(),
                a: 0.0,
                b: std::f64::consts::PI,
            }),
            other => Err(DensityError::UnknownPreset(other.into())),
        }
    }

    /// Resolve a CLI `--rho` argument: preset name or expression source.
    /// Explicit `a`/`b` override the preset interval; expressions require both.
    pub fn from_cli(rho: &str, a: Option<f64>, b: Option<f64>) -> Result<Self, DensityError> {
        if let Ok(preset) = Self::preset(rho) {
            let (pa, pb) = (preset.a, preset.b);
            let (a, b) = (a.unwrap_or(pa), b.unwrap_or(pb));
            if (a, b) == (pa, pb) {
                return Ok(preset);
            }
            return validate_density(preset.ast, &preset.source, a, b, DEFAULT_VALIDATION_GRID);
        }
        let a = a.ok_or(DensityError::Interval {
            a: f64::NAN,
            b: f64::NAN,
        })?;
        let b = b.ok_or(DensityError::Interval { a, b: f64::NAN })?;
        Self::from_source(rho, a, b)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &ExprAst {
        &self.ast
    }

    /// Fallible evaluation, reporting the offending point on domain errors.
    pub fn try_eval(&self, x: f64) -> Result<f64, EvalError> {
        eval(&self.ast, x)
    }

    /// Evaluation for validated densities. Panics on a domain error, which
    /// cannot occur on `[a, b]` for a density that passed screening unless
    /// the expression is singular between grid points.
    pub fn eval(&self, x: f64) -> f64 {
        match eval(&self.ast, x) {
            Ok(v) => v,
            Err(e) => panic!("validated density failed to evaluate: {}", e),
        }
    }

    /// True for the `1/x^2` on `[1, e]` reference problem, for which exact
    /// eigenpairs are available.
    pub fn is_euler(&self) -> bool {
        self.source == "1/x^2" && self.a == 1.0 && (self.b - std::f64::consts::E).abs() < 1e-15
    }
}
