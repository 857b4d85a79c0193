//! Plain-text expression language.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" exponent)?
//! exponent:= INT | "(" "-"? INT ")"
//! atom    := INT | IDENT | "(" sum ")"
//! ```
//!
//! Multiplication is always explicit. Identifiers are ASCII
//! `[A-Za-z_][A-Za-z0-9_]*`; integer literals are unbounded.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use crate::expr::RationalExpr;
use crate::symbol::Symbol;
use crate::AlgebraError;

const MAX_DEPTH: usize = 64;
const MAX_TREE_DEPTH: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ast {
    Int(BigInt),
    Ident(String),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
    Paren(Box<Ast>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" or "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
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
            Tok::Int(n) => format!("integer {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    peeked: Option<(usize, Tok)>,
    depth: usize,
}

const ATOM: &[&str] = &["integer", "identifier", "`(`", "`-`"];
const OPERATOR: &[&str] = &["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"];

impl<'a> Parser<'a> {
    fn new(src: &'a [u8]) -> Self {
        Parser {
            src,
            pos: 0,
            peeked: None,
            depth: 0,
        }
    }

    fn lex(&mut self, expected: &[&'static str]) -> Result<(usize, Tok), SyntaxError> {
        while self.pos < self.src.len() && matches!(self.src[self.pos], b' ' | b'\t' | b'\n' | b'\r') {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(start) else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let mut end = start;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..end]).expect("ascii digits");
                self.pos = end;
                return Ok((start, Tok::Int(digits.parse().expect("decimal digits"))));
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let mut end = start;
                while end < self.src.len() && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_') {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[start..end]).expect("ascii identifier");
                self.pos = end;
                return Ok((start, Tok::Ident(name.to_string())));
            }
            other => {
                return Err(SyntaxError {
                    offset: start,
                    expected: expected.to_vec(),
                    found: if other.is_ascii_graphic() {
                        format!("`{}`", other as char)
                    } else {
                        format!("byte 0x{other:02x}")
                    },
                })
            }
        };
        self.pos = start + 1;
        Ok((start, tok))
    }

    fn peek(&mut self, expected: &[&'static str]) -> Result<&(usize, Tok), SyntaxError> {
        if self.peeked.is_none() {
            let t = self.lex(expected)?;
            self.peeked = Some(t);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn next(&mut self, expected: &[&'static str]) -> Result<(usize, Tok), SyntaxError> {
        self.peek(expected)?;
        Ok(self.peeked.take().unwrap())
    }

    fn fail<T>(&self, at: usize, tok: &Tok, expected: &[&'static str]) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            offset: at,
            expected: expected.to_vec(),
            found: tok.describe(),
        })
    }

    fn enter(&mut self, at: usize) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(SyntaxError {
                offset: at,
                expected: vec!["shallower nesting"],
                found: format!("nesting deeper than {MAX_DEPTH}"),
            });
        }
        Ok(())
    }

    fn grow(&self, at: usize, depth: usize) -> Result<usize, SyntaxError> {
        if depth > MAX_TREE_DEPTH {
            return Err(SyntaxError {
                offset: at,
                expected: vec!["a shorter expression"],
                found: format!("expression tree deeper than {MAX_TREE_DEPTH}"),
            });
        }
        Ok(depth)
    }

    fn sum(&mut self) -> Result<(Ast, usize), SyntaxError> {
        let (mut lhs, mut depth) = self.product()?;
        loop {
            let (at, tok) = self.peek(OPERATOR)?.clone();
            let make: fn(Box<Ast>, Box<Ast>) -> Ast = match tok {
                Tok::Plus => Ast::Add,
                Tok::Minus => Ast::Sub,
                _ => return Ok((lhs, depth)),
            };
            self.next(OPERATOR)?;
            let (rhs, d) = self.product()?;
            depth = self.grow(at, depth.max(d) + 1)?;
            lhs = make(Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<(Ast, usize), SyntaxError> {
        let (mut lhs, mut depth) = self.unary()?;
        loop {
            let (at, tok) = self.peek(OPERATOR)?.clone();
            let make: fn(Box<Ast>, Box<Ast>) -> Ast = match tok {
                Tok::Star => Ast::Mul,
                Tok::Slash => Ast::Div,
                _ => return Ok((lhs, depth)),
            };
            self.next(OPERATOR)?;
            let (rhs, d) = self.unary()?;
            depth = self.grow(at, depth.max(d) + 1)?;
            lhs = make(Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<(Ast, usize), SyntaxError> {
        let mut negations = 0usize;
        loop {
            let (at, tok) = self.peek(ATOM)?.clone();
            if tok != Tok::Minus {
                break;
            }
            self.next(ATOM)?;
            negations += 1;
            self.grow(at, negations)?;
        }
        let (mut node, depth) = self.power()?;
        for _ in 0..negations {
            node = Ast::Neg(Box::new(node));
        }
        Ok((node, depth + negations))
    }

    fn power(&mut self) -> Result<(Ast, usize), SyntaxError> {
        let (base, depth) = self.atom()?;
        if self.peek(OPERATOR)?.1 != Tok::Caret {
            return Ok((base, depth));
        }
        self.next(OPERATOR)?;
        const EXP: &[&str] = &["integer", "`(`"];
        let (at, tok) = self.next(EXP)?;
        let (at, digits, negative) = match tok {
            Tok::Int(n) => (at, n, false),
            Tok::LParen => {
                const INNER: &[&str] = &["integer", "`-`"];
                let (at2, t2) = self.next(INNER)?;
                let (at3, n, neg) = match t2 {
                    Tok::Minus => {
                        let (at3, t3) = self.next(&["integer"])?;
                        match t3 {
                            Tok::Int(n) => (at3, n, true),
                            other => return self.fail(at3, &other, &["integer"]),
                        }
                    }
                    Tok::Int(n) => (at2, n, false),
                    other => return self.fail(at2, &other, INNER),
                };
                let (at4, t4) = self.next(&["`)`"])?;
                if t4 != Tok::RParen {
                    return self.fail(at4, &t4, &["`)`"]);
                }
                (at3, n, neg)
            }
            other => return self.fail(at, &other, EXP),
        };
        let Ok(mut e) = i64::try_from(&digits) else {
            return Err(SyntaxError {
                offset: at,
                expected: vec!["exponent below 2^63"],
                found: format!("integer {digits}"),
            });
        };
        if negative {
            e = -e;
        }
        Ok((Ast::Pow(Box::new(base), e), depth + 1))
    }

    fn atom(&mut self) -> Result<(Ast, usize), SyntaxError> {
        let (at, tok) = self.next(ATOM)?;
        match tok {
            Tok::Int(n) => Ok((Ast::Int(n), 1)),
            Tok::Ident(s) => Ok((Ast::Ident(s), 1)),
            Tok::LParen => {
                self.enter(at)?;
                let (inner, depth) = self.sum()?;
                let (at2, close) = self.next(&["`)`"])?;
                if close != Tok::RParen {
                    let mut exp = OPERATOR.to_vec();
                    exp.retain(|e| *e != "end of input");
                    exp.push("`)`");
                    return self.fail(at2, &close, &exp);
                }
                self.depth -= 1;
                Ok((Ast::Paren(Box::new(inner)), depth + 1))
            }
            other => self.fail(at, &other, ATOM),
        }
    }
}

/// Parses text (arbitrary bytes are accepted; anything outside the grammar is a
/// [`SyntaxError`]).
pub fn parse(text: impl AsRef<[u8]>) -> Result<Ast, SyntaxError> {
    let mut p = Parser::new(text.as_ref());
    let (ast, _) = p.sum()?;
    let (at, tok) = p.next(OPERATOR)?;
    if tok != Tok::End {
        return p.fail(at, &tok, OPERATOR);
    }
    Ok(ast)
}

/// Names visible to lowering: free symbols plus named sub-expressions.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    symbols: HashMap<String, Symbol>,
    bindings: HashMap<String, RationalExpr>,
}

impl Scope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_symbols<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut s = Self::new();
        for n in names {
            s.declare(n);
        }
        s
    }

    pub fn declare(&mut self, name: &str) -> Symbol {
        self.symbols
            .entry(name.to_string())
            .or_insert_with(|| Symbol::new(name))
            .clone()
    }

    pub fn insert_symbol(&mut self, sym: Symbol) {
        self.symbols.insert(sym.name().to_string(), sym);
    }

    pub fn bind(&mut self, name: &str, value: RationalExpr) {
        self.bindings.insert(name.to_string(), value);
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn binding(&self, name: &str) -> Option<&RationalExpr> {
        self.bindings.get(name)
    }

    pub fn lookup(&self, name: &str) -> Option<RationalExpr> {
        self.bindings
            .get(name)
            .cloned()
            .or_else(|| self.symbols.get(name).map(RationalExpr::var))
    }

    pub fn merge(&mut self, other: &Scope) {
        for (k, v) in &other.symbols {
            self.symbols.entry(k.clone()).or_insert_with(|| v.clone());
        }
        for (k, v) in &other.bindings {
            self.bindings.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }
}

pub fn lower(ast: &Ast, scope: &Scope) -> Result<RationalExpr, ExprError> {
    Ok(match ast {
        Ast::Int(n) => RationalExpr::constant(crate::rational::Q::from_integer(n.clone())),
        Ast::Ident(name) => scope
            .lookup(name)
            .ok_or_else(|| ExprError::Undeclared(name.clone()))?,
        Ast::Neg(a) => -lower(a, scope)?,
        Ast::Add(a, b) => lower(a, scope)? + lower(b, scope)?,
        Ast::Sub(a, b) => lower(a, scope)? - lower(b, scope)?,
        Ast::Mul(a, b) => lower(a, scope)? * lower(b, scope)?,
        Ast::Div(a, b) => lower(a, scope)?.checked_div(&lower(b, scope)?)?,
        Ast::Pow(a, e) => lower(a, scope)?.pow(*e)?,
        Ast::Paren(a) => lower(a, scope)?,
    })
}

pub fn parse_expr(text: &str, scope: &Scope) -> Result<RationalExpr, ExprError> {
    lower(&parse(text)?, scope)
}

/// Canonical text: `num` or `num/den`, parenthesized only where the grammar
/// requires it.
pub fn render(f: &RationalExpr) -> String {
    let num = f.num().render();
    if f.den().is_one() {
        return num;
    }
    let num = if f.num().len() > 1 { format!("({num})") } else { num };
    let den = f.den().render();
    let simple_den = f.den().len() == 1 && f.den().vars().len() == 1;
    if simple_den {
        format!("{num}/{den}")
    } else {
        format!("{num}/({den})")
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Int(n) => write!(f, "{n}"),
            Ast::Ident(s) => f.write_str(s),
            Ast::Neg(a) => write!(f, "-{a}"),
            Ast::Add(a, b) => write!(f, "{a} + {b}"),
            Ast::Sub(a, b) => write!(f, "{a} - {b}"),
            Ast::Mul(a, b) => write!(f, "{a}*{b}"),
            Ast::Div(a, b) => write!(f, "{a}/{b}"),
            Ast::Pow(a, e) if *e < 0 => write!(f, "{a}^({e})"),
            Ast::Pow(a, e) => write!(f, "{a}^{e}"),
            Ast::Paren(a) => write!(f, "({a})"),
        }
    }
}
