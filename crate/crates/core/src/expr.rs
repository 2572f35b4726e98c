//! Arithmetic expressions over the plate coordinates `x1`, `x2`.
//!
//! Grammar (standard precedence, `^` binds tighter than unary minus and is
//! right-associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x1' | 'x2' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := 'cos' | 'sin' | 'exp'
//! ```
//!
//! Angles are in radians.

use std::fmt;

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
#[error("expression error at column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Cos,
    Sin,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X1,
    X2,
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression; keeps its source text for echoing.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(ExprError {
                column: t.column,
                message: format!("unexpected {}", t.kind),
            });
        }
        Ok(Expr {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        eval(&self.root, x1, x2)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

fn eval(node: &Node, x1: f64, x2: f64) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::X1 => x1,
        Node::X2 => x2,
        Node::Neg(a) => -eval(a, x1, x2),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, x1, x2), eval(b, x1, x2));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
        Node::Call(func, a) => {
            let a = eval(a, x1, x2);
            match func {
                Func::Cos => a.cos(),
                Func::Sin => a.sin(),
                Func::Exp => a.exp(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Num(v) => write!(f, "number {v}"),
            TokenKind::Ident(s) => write!(f, "'{s}'"),
            TokenKind::Op(c) => write!(f, "'{c}'"),
            TokenKind::LParen => f.write_str("'('"),
            TokenKind::RParen => f.write_str("')'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    column: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
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
            let v = text.parse().map_err(|_| ExprError {
                column,
                message: format!("invalid number '{text}'"),
            })?;
            out.push(Token {
                kind: TokenKind::Num(v),
                column,
            });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else {
            let kind = match c {
                '+' | '-' | '*' | '/' | '^' => TokenKind::Op(c),
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                _ => {
                    return Err(ExprError {
                        column,
                        message: format!("unexpected character '{c}'"),
                    })
                }
            };
            out.push(Token { kind, column });
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn end_column(&self) -> usize {
        self.tokens.last().map(|t| t.column + 1).unwrap_or(1)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c), ..
            }) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.eat_op(&['+', '-']) {
            Some('-') => Ok(Node::Neg(Box::new(self.unary()?))),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        let tok = self.peek().cloned().ok_or_else(|| ExprError {
            column: self.end_column(),
            message: "unexpected end of expression".into(),
        })?;
        self.pos += 1;
        match tok.kind {
            TokenKind::Num(v) => Ok(Node::Num(v)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Ident(name) => match name.as_str() {
                "x1" => Ok(Node::X1),
                "x2" => Ok(Node::X2),
                "pi" => Ok(Node::Num(std::f64::consts::PI)),
                "cos" | "sin" | "exp" => {
                    let func = match name.as_str() {
                        "cos" => Func::Cos,
                        "sin" => Func::Sin,
                        _ => Func::Exp,
                    };
                    match self.peek() {
                        Some(Token {
                            kind: TokenKind::LParen,
                            ..
                        }) => self.pos += 1,
                        _ => {
                            return Err(ExprError {
                                column: tok.column,
                                message: format!("expected '(' after {name}"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Node::Call(func, Box::new(arg)))
                }
                _ => Err(ExprError {
                    column: tok.column,
                    message: format!("unknown identifier '{name}'"),
                }),
            },
            other => Err(ExprError {
                column: tok.column,
                message: format!("unexpected {other}"),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(ExprError {
                column: t.column,
                message: format!("expected ')', found {}", t.kind),
            }),
            None => Err(ExprError {
                column: self.end_column(),
                message: "expected ')'".into(),
            }),
        }
    }
}
