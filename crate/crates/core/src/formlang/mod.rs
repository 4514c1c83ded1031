//! A small expression language for scalar fields and 1-forms.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | variable | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | tan | exp | ln | sqrt | abs
//! ```
//!
//! Variables are `x, y, z` on the spatial chart and `t, x, y` on the
//! space-time chart. `^` is right-associative and binds tighter than unary
//! minus, so `-x^2` is `-(x^2)` and `2^-1` is `0.5`. Angles are radians.

mod parser;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::calculus::{CalcError, Chart, ChartPoint, Jet2, OneForm, Scalar, ScalarEval, ScalarField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Syntax tree. Variables are chart axes `0..3`.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Pi,
    E,
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// An argument outside a function's domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainError {
    pub function: &'static str,
    pub argument: f64,
}

impl Node {
    /// True when no variable occurs in the tree.
    pub fn is_constant(&self) -> bool {
        match self {
            Node::Num(_) | Node::Pi | Node::E => true,
            Node::Var(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
            Node::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn eval<S: Scalar>(&self, x: &[S; 3]) -> Result<S, DomainError> {
        Ok(match self {
            Node::Num(v) => S::cst(*v),
            Node::Pi => S::cst(std::f64::consts::PI),
            Node::E => S::cst(std::f64::consts::E),
            Node::Var(i) => x[*i],
            Node::Neg(a) => -a.eval(x)?,
            Node::Bin(op, a, b) => {
                let l = a.eval(x)?;
                match op {
                    BinOp::Add => l + b.eval(x)?,
                    BinOp::Sub => l - b.eval(x)?,
                    BinOp::Mul => l * b.eval(x)?,
                    BinOp::Div => l / b.eval(x)?,
                    BinOp::Pow => pow(l, b, x)?,
                }
            }
            Node::Call(f, a) => {
                let v = a.eval(x)?;
                let bad = |lo_ok: bool| DomainError {
                    function: f.name(),
                    argument: if lo_ok { v.value() } else { f64::NAN },
                };
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.tan(),
                    Func::Exp => v.exp(),
                    Func::Ln if v.value() <= 0.0 => return Err(bad(true)),
                    Func::Ln => v.ln(),
                    Func::Sqrt if v.value() < 0.0 => return Err(bad(true)),
                    Func::Sqrt => v.sqrt(),
                    Func::Abs => v.abs(),
                }
            }
        })
    }
}

fn pow<S: Scalar>(base: S, exp: &Node, x: &[S; 3]) -> Result<S, DomainError> {
    let negative_base = || DomainError {
        function: "^",
        argument: base.value(),
    };
    if exp.is_constant() {
        let e: f64 = exp.eval(&[0.0; 3])?;
        if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
            return Ok(base.powi(e as i32));
        }
        if base.value() < 0.0 {
            return Err(negative_base());
        }
        return Ok(base.powf(e));
    }
    if base.value() <= 0.0 {
        return Err(negative_base());
    }
    Ok(base.pow(exp.eval(x)?))
}

/// A parsed expression together with the chart it was parsed on.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    pub root: Node,
    pub chart: Chart,
}

impl Expression {
    pub fn eval<S: Scalar>(&self, x: &[S; 3]) -> Result<S, DomainError> {
        self.root.eval(x)
    }
}

struct Show<'a>(&'a Node, Chart);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chart = self.1;
        match self.0 {
            // Debug formatting of f64 is the shortest exact round-trip form
            Node::Num(v) => write!(f, "{v:?}"),
            Node::Pi => f.write_str("pi"),
            Node::E => f.write_str("e"),
            Node::Var(i) => f.write_str(chart.variable_names()[*i]),
            Node::Neg(a) => write!(f, "(-{})", Show(a, chart)),
            Node::Bin(op, a, b) => {
                write!(f, "({} {} {})", Show(a, chart), op.symbol(), Show(b, chart))
            }
            Node::Call(func, a) => write!(f, "{}({})", func.name(), Show(a, chart)),
        }
    }
}

/// Fully parenthesized; parses back to the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Show(&self.root, self.chart).fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("malformed number '{0}'")]
    BadNumber(String),
    #[error("literal '{0}' is not a finite number")]
    NonFiniteLiteral(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: &'static str },
    #[error("unclosed '('")]
    UnclosedParen,
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("variable '{name}' does not belong to the {chart} chart (variables: {})", chart.variable_names().join(", "))]
    WrongChartVariable { name: String, chart: Chart },
    #[error("expression nested deeper than {} levels", parser::MAX_DEPTH)]
    TooDeep,
}

/// A syntax error at a 1-based character column.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("column {column}: {kind}")]
pub struct ParseError {
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("component {component}: {error}")]
pub struct OneFormParseError {
    /// 1-based component index.
    pub component: usize,
    pub error: ParseError,
}

pub fn parse_expression(text: &str, chart: Chart) -> Result<Expression, ParseError> {
    Ok(Expression {
        root: parser::parse(text, chart)?,
        chart,
    })
}

#[derive(Debug)]
struct ExprField(Arc<Expression>);

impl ScalarEval for ExprField {
    fn jet(&self, p: &ChartPoint) -> Result<Jet2, CalcError> {
        self.0.eval(&Jet2::seed(&p.0)).map_err(|e| domain(e, p))
    }

    fn value(&self, p: &ChartPoint) -> Result<f64, CalcError> {
        self.0.eval(&p.0).map_err(|e| domain(e, p))
    }
}

fn domain(e: DomainError, p: &ChartPoint) -> CalcError {
    CalcError::Domain {
        function: e.function,
        argument: e.argument,
        point: *p,
    }
}

impl From<Expression> for ScalarField {
    fn from(e: Expression) -> Self {
        ScalarField::new(ExprField(Arc::new(e)))
    }
}

pub fn parse_scalar(text: &str, chart: Chart) -> Result<ScalarField, ParseError> {
    parse_expression(text, chart).map(ScalarField::from)
}

/// Parses `θ_1, θ_2, θ_3` in chart order.
pub fn parse_oneform<S: AsRef<str>>(texts: &[S; 3], chart: Chart) -> Result<OneForm, OneFormParseError> {
    let mut fields = Vec::with_capacity(3);
    for (k, t) in texts.iter().enumerate() {
        let f = parse_scalar(t.as_ref(), chart).map_err(|error| OneFormParseError {
            component: k + 1,
            error,
        })?;
        fields.push(f);
    }
    let [a, b, c]: [ScalarField; 3] = fields.try_into().expect("three components");
    Ok(OneForm::from_components([a, b, c]))
}
