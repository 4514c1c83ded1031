use super::{BinOp, Func, Node, ParseError, ParseErrorKind};
use crate::calculus::Chart;

pub(super) const MAX_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

/// Tokens paired with their 1-based character column.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when digits follow, so "2e" lexes as 2 then `e`
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let v: f64 = lit.parse().map_err(|_| ParseError {
                column: col,
                kind: ParseErrorKind::BadNumber(lit.clone()),
            })?;
            if !v.is_finite() {
                return Err(ParseError {
                    column: col,
                    kind: ParseErrorKind::NonFiniteLiteral(lit),
                });
            }
            out.push((Tok::Num(v), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        return Err(ParseError {
            column: col,
            kind: ParseErrorKind::UnexpectedChar(c),
        });
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    chart: Chart,
    /// Columns of the currently unclosed parentheses.
    open: Vec<usize>,
}

pub(super) fn parse(text: &str, chart: Chart) -> Result<Node, ParseError> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(ParseError {
            column: 1,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        chart,
        open: Vec::new(),
    };
    let node = p.expr()?;
    let (tok, col) = p.peek();
    if *tok != Tok::End {
        let found = tok.describe();
        return Err(ParseError {
            column: col,
            kind: ParseErrorKind::Unexpected {
                found,
                expected: "operator or end of input",
            },
        });
    }
    Ok(node)
}

impl Parser {
    fn peek(&self) -> (&Tok, usize) {
        let (t, c) = &self.toks[self.pos];
        (t, *c)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn enter(&mut self, col: usize) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError {
                column: col,
                kind: ParseErrorKind::TooDeep,
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().0 {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().0 {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        let col = self.peek().1;
        self.enter(col)?;
        let node = if *self.peek().0 == Tok::Minus {
            self.bump();
            Node::Neg(Box::new(self.unary()?))
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(node)
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek().0 == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let (tok, col) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                self.open.push(col);
                let inner = self.expr()?;
                self.close(col)?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, col),
            Tok::End => Err(match self.open.last() {
                Some(&open) => ParseError {
                    column: open,
                    kind: ParseErrorKind::UnclosedParen,
                },
                None => ParseError {
                    column: col,
                    kind: ParseErrorKind::UnexpectedEnd,
                },
            }),
            other => Err(ParseError {
                column: col,
                kind: ParseErrorKind::Unexpected {
                    found: other.describe(),
                    expected: "number, variable, constant, function or '('",
                },
            }),
        }
    }

    /// Consumes the `)` matching the `(` at `open`.
    fn close(&mut self, open: usize) -> Result<(), ParseError> {
        let (tok, col) = self.peek();
        match tok {
            Tok::RParen => {
                self.bump();
                self.open.pop();
                Ok(())
            }
            Tok::End => Err(ParseError {
                column: open,
                kind: ParseErrorKind::UnclosedParen,
            }),
            other => {
                let found = other.describe();
                Err(ParseError {
                    column: col,
                    kind: ParseErrorKind::Unexpected { found, expected: "')'" },
                })
            }
        }
    }

    fn identifier(&mut self, name: String, col: usize) -> Result<Node, ParseError> {
        if let Some(f) = Func::from_name(&name) {
            let (tok, pcol) = self.bump();
            if tok != Tok::LParen {
                return Err(ParseError {
                    column: pcol,
                    kind: ParseErrorKind::Unexpected {
                        found: tok.describe(),
                        expected: "'(' after function name",
                    },
                });
            }
            self.open.push(pcol);
            let arg = self.expr()?;
            self.close(pcol)?;
            return Ok(Node::Call(f, Box::new(arg)));
        }
        match name.as_str() {
            "pi" => return Ok(Node::Pi),
            "e" => return Ok(Node::E),
            _ => {}
        }
        if let Some(axis) = self.chart.variable_names().iter().position(|v| *v == name) {
            return Ok(Node::Var(axis));
        }
        let other = match self.chart {
            Chart::Spatial => Chart::Spacetime,
            Chart::Spacetime => Chart::Spatial,
        };
        let kind = if other.variable_names().contains(&name.as_str()) {
            ParseErrorKind::WrongChartVariable {
                name,
                chart: self.chart,
            }
        } else {
            ParseErrorKind::UnknownIdentifier(name)
        };
        Err(ParseError { column: col, kind })
    }
}
