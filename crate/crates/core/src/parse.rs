//! Recursive-descent parser for the expression DSL.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := integer | name jet? | func '(' expr ')' | '(' expr ')'
//! jet     := '_' '{' int (',' int)* '}' | '_' digit+
//! ```
//!
//! Names are the context's declared base and field names plus the parameter
//! `t`. Exponents must evaluate to integer constants.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::expr::{Expr, ExprError, Func};
use crate::forms::{Basis, DiffForm};
use crate::jet::{Coord, JetContext, MultiIndex};

/// Half-open byte range into the source string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    OrderExceeded,
    IndexOutOfRange,
    Arithmetic(ExprError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, span: Span, message: impl Into<String>) -> Self {
        ParseError { kind, span, message: message.into() }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax => "SyntaxError",
            ParseErrorKind::UnknownIdentifier => "UnknownIdentifier",
            ParseErrorKind::OrderExceeded => "OrderExceeded",
            ParseErrorKind::IndexOutOfRange => "IndexOutOfRange",
            ParseErrorKind::Arithmetic(_) => "ArithmeticError",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedExpr {
    pub expr: Expr,
    pub span: Span,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name { name: String, jet: Option<Vec<u8>> },
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn peek_byte(&self) -> Option<u8> {
        self.bytes().get(self.pos).copied()
    }

    fn syntax(&self, start: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(ParseErrorKind::Syntax, Span { start, end: self.pos.max(start + 1) }, msg)
    }

    fn next(&mut self) -> Result<(Tok, Span), ParseError> {
        while self.peek_byte().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek_byte() else {
            return Ok((Tok::End, Span { start, end: start }));
        };
        let single = |t| (t, Span { start, end: start + 1 });
        let tok = match b {
            b'+' => single(Tok::Plus),
            b'-' => single(Tok::Minus),
            b'*' => single(Tok::Star),
            b'/' => single(Tok::Slash),
            b'^' => single(Tok::Caret),
            b'(' => single(Tok::LParen),
            b')' => single(Tok::RParen),
            b'0'..=b'9' => {
                while self.peek_byte().is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
                let v: BigInt = self.src[start..self.pos].parse().unwrap();
                return Ok((Tok::Int(v), Span { start, end: self.pos }));
            }
            b if b.is_ascii_alphabetic() => {
                while self.peek_byte().is_some_and(|b| b.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let name = self.src[start..self.pos].to_string();
                let jet = if self.peek_byte() == Some(b'_') {
                    self.pos += 1;
                    Some(self.jet_suffix(start)?)
                } else {
                    None
                };
                return Ok((Tok::Name { name, jet }, Span { start, end: self.pos }));
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap();
                self.pos += ch.len_utf8();
                return Err(self.syntax(start, format!("unexpected character {ch:?}")));
            }
        };
        self.pos += 1;
        Ok(tok)
    }

    fn jet_suffix(&mut self, start: usize) -> Result<Vec<u8>, ParseError> {
        let mut out = Vec::new();
        if self.peek_byte() == Some(b'{') {
            self.pos += 1;
            loop {
                while self.peek_byte() == Some(b' ') {
                    self.pos += 1;
                }
                let digits_start = self.pos;
                while self.peek_byte().is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
                if digits_start == self.pos {
                    return Err(self.syntax(start, "expected an index inside braces"));
                }
                let v: u32 =
                    self.src[digits_start..self.pos].parse().map_err(|_| self.syntax(start, "index too large"))?;
                out.push(v.min(255) as u8);
                while self.peek_byte() == Some(b' ') {
                    self.pos += 1;
                }
                match self.peek_byte() {
                    Some(b',') => self.pos += 1,
                    Some(b'}') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.syntax(start, "unterminated jet index")),
                }
            }
        } else {
            while let Some(b) = self.peek_byte().filter(u8::is_ascii_digit) {
                out.push(b - b'0');
                self.pos += 1;
            }
            if out.is_empty() {
                return Err(self.syntax(start, "expected jet indices after '_'"));
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    span: Span,
    ctx: &'a JetContext,
    warnings: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ctx: &'a JetContext) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, span) = lexer.next()?;
        Ok(Parser { lexer, tok, span, ctx, warnings: Vec::new() })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, span) = self.lexer.next()?;
        self.tok = tok;
        self.span = span;
        Ok(())
    }

    fn arith(&self, span: Span, e: ExprError) -> ParseError {
        ParseError::new(ParseErrorKind::Arithmetic(e.clone()), span, e.to_string())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump()?;
                    let start = self.span.start;
                    let rhs = self.unary()?;
                    let span = Span { start, end: self.span.start.max(start + 1) };
                    acc = acc.checked_div(&rhs).map_err(|e| self.arith(span, e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        self.bump()?;
        let start = self.span.start;
        let exponent = self.unary()?;
        let span = Span { start, end: self.span.start.max(start + 1) };
        let k = exponent
            .as_constant()
            .filter(|q| q.is_integer())
            .and_then(|q| q.to_integer().to_i32())
            .ok_or_else(|| ParseError::new(ParseErrorKind::Syntax, span, "exponent must be an integer constant"))?;
        base.pow(k).map_err(|e| self.arith(span, e))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let span = self.span;
        match self.tok.clone() {
            Tok::Int(v) => {
                self.bump()?;
                Ok(Expr::constant(crate::expr::Rational::from_integer(v)))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect_rparen(span)?;
                Ok(e)
            }
            Tok::Name { name, jet } => {
                self.bump()?;
                if let Some(f) = Func::from_name(&name) {
                    if jet.is_some() || self.tok != Tok::LParen {
                        return Err(ParseError::new(
                            ParseErrorKind::Syntax,
                            span,
                            format!("{name} must be applied as {name}(...)"),
                        ));
                    }
                    self.bump()?;
                    let arg = self.expr()?;
                    self.expect_rparen(span)?;
                    return Ok(Expr::apply(f, arg));
                }
                self.resolve(&name, jet, span).map(Expr::sym)
            }
            Tok::End => Err(ParseError::new(ParseErrorKind::Syntax, span, "unexpected end of input")),
            other => Err(ParseError::new(ParseErrorKind::Syntax, span, format!("unexpected token {other:?}"))),
        }
    }

    fn expect_rparen(&mut self, open: Span) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                Span { start: open.start, end: self.span.end.max(open.end) },
                "missing ')'",
            ));
        }
        self.bump()
    }

    fn resolve(&mut self, name: &str, jet: Option<Vec<u8>>, span: Span) -> Result<Coord, ParseError> {
        resolve_name(self.ctx, name, jet, span, &mut self.warnings)
    }
}

fn resolve_name(
    ctx: &JetContext,
    name: &str,
    jet: Option<Vec<u8>>,
    span: Span,
    warnings: &mut Vec<String>,
) -> Result<Coord, ParseError> {
    if let Some(i) = ctx.base_names().iter().position(|b| b == name) {
        if jet.is_some() {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("base coordinate {name} takes no jet indices"),
            ));
        }
        return Ok(Coord::Base(i + 1));
    }
    if let Some(s) = ctx.field_names().iter().position(|f| f == name) {
        let raw = jet.unwrap_or_default();
        if let Some(bad) = raw.iter().find(|&&i| i == 0 || i as usize > ctx.n()) {
            return Err(ParseError::new(
                ParseErrorKind::IndexOutOfRange,
                span,
                format!("jet index {bad} outside 1..={}", ctx.n()),
            ));
        }
        if raw.len() > ctx.order() {
            return Err(ParseError::new(
                ParseErrorKind::OrderExceeded,
                span,
                format!("jet order {} exceeds the declared order {}", raw.len(), ctx.order()),
            ));
        }
        if raw.windows(2).any(|w| w[0] > w[1]) {
            warnings.push(format!("indices of {name} at {span} were not sorted; normalized"));
        }
        return Ok(Coord::jet(s + 1, MultiIndex::new(raw)));
    }
    if name == "t" && jet.is_none() {
        return Ok(Coord::Param);
    }
    Err(ParseError::new(ParseErrorKind::UnknownIdentifier, span, format!("unknown identifier {name:?}")))
}

/// Parses an expression in the given context.
pub fn parse_expr(src: &str, ctx: &JetContext) -> Result<ParsedExpr, ParseError> {
    let mut p = Parser::new(src, ctx)?;
    let expr = p.expr()?;
    if p.tok != Tok::End {
        return Err(ParseError::new(ParseErrorKind::Syntax, p.span, "unexpected trailing input"));
    }
    Ok(ParsedExpr { expr, span: Span { start: 0, end: src.len() }, warnings: p.warnings })
}

/// Parses one term of a form literal: `coefficient | dB1 dB2 ...`, where each
/// basis one-form is `d` followed by a coordinate name (`dx1`, `du`,
/// `du_{1,2}`), separated by whitespace, `^` or `∧`. A term with no `|` is a
/// 0-form.
pub fn parse_form_term(src: &str, ctx: &JetContext) -> Result<(DiffForm, Vec<String>), ParseError> {
    let (coef_src, basis_src) = match src.split_once('|') {
        Some((a, b)) => (a, Some((b, a.len() + 1))),
        None => (src, None),
    };
    let parsed = parse_expr(coef_src, ctx)?;
    let mut warnings = parsed.warnings;
    let mut word = Vec::new();
    let mut order = parsed.expr.jet_order().unwrap_or(0);
    if let Some((basis, offset)) = basis_src {
        let mut pos = offset;
        for piece in basis.split(|c: char| c.is_whitespace() || c == '^' || c == '∧') {
            let start = pos;
            pos += piece.len() + 1;
            if piece.is_empty() {
                continue;
            }
            let span = Span { start, end: start + piece.len() };
            let Some(rest) = piece.strip_prefix('d') else {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    span,
                    format!("basis one-form {piece:?} must start with 'd'"),
                ));
            };
            let mut lexer = Lexer { src: rest, pos: 0 };
            let (tok, _) = lexer.next()?;
            let (Tok::Name { name, jet }, (Tok::End, _)) = (tok, lexer.next()?) else {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    span,
                    format!("malformed basis one-form {piece:?}"),
                ));
            };
            let b = match resolve_name(ctx, &name, jet, span, &mut warnings)? {
                Coord::Base(i) => Basis::Dx(i),
                Coord::Jet { field, index } => {
                    order = order.max(index.len());
                    Basis::Dy { field, index }
                }
                Coord::Param => {
                    return Err(ParseError::new(ParseErrorKind::Syntax, span, "dt is not a basis one-form"));
                }
            };
            word.push(b);
        }
    }
    Ok((DiffForm::term(parsed.expr, word, order), warnings))
}

/// Parses a rational literal such as `3`, `-1/2`.
pub fn parse_rational(src: &str) -> Option<crate::expr::Rational> {
    let ctx = JetContext::new(1, 1, 0).ok()?;
    parse_expr(src, &ctx).ok()?.expr.as_constant()
}
