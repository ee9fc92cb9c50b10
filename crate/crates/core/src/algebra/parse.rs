//! Text format for polynomial systems.
//!
//! ```text
//! vars: x, y;
//! dim: 1;
//! 0.25*x^2 + y^2 - 1;
//! ```
//!
//! Literals are decimal reals (optionally with an exponent), `i` for the
//! imaginary unit, or a real immediately followed by `i` (`2.5i`).
//! Operators are `+ - * ^` and parentheses; exponents are non-negative
//! integer literals. `#` starts a comment that runs to the end of the line.

use thiserror::Error;

use super::poly::Poly;
use super::system::PolySystem;
use crate::Complex;

/// Intermediate results above this total degree are rejected.
pub const MAX_DEGREE: u32 = 256;

/// Intermediate results with more terms than this are rejected.
pub const MAX_TERMS: usize = 50_000;

/// Largest term-count product allowed for one multiplication.
const MAX_PRODUCT_WORK: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("non-finite literal `{0}`")]
    NonFinite(String),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("degree exceeds {MAX_DEGREE}")]
    DegreeLimit,
    #[error("expansion exceeds {MAX_TERMS} terms")]
    SizeLimit,
    #[error("invalid system: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Imag(f64),
    Int(u32),
    Sym(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(x) | Tok::Imag(x) => format!("number {x}"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek_char() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn err(&self, line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, col, kind }
    }

    /// Returns the next token with its starting line and column.
    fn next(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek_char() else {
            return Ok((Tok::Eof, line, col));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(line, col);
        }
        if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while let Some(c) = self.peek_char() {
                if c.is_alphanumeric() || c == '_' {
                    self.bump();
                } else {
                    break;
                }
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), line, col));
        }
        self.bump();
        match c {
            '+' | '-' | '*' | '^' | '(' | ')' | ';' | ':' | ',' => Ok((Tok::Sym(c), line, col)),
            other => Err(self.err(
                line,
                col,
                ParseErrorKind::Unexpected {
                    found: format!("character `{other}`"),
                    expected: "a token".into(),
                },
            )),
        }
    }

    fn number(&mut self, line: usize, col: usize) -> Result<(Tok, usize, usize), ParseError> {
        let start = self.pos;
        let mut is_int = true;
        while matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek_char() == Some('.') {
            is_int = false;
            self.bump();
            while matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        if matches!(self.peek_char(), Some('e') | Some('E')) {
            // Only an exponent if digits follow; otherwise leave `e` for the lexer.
            let rest = &self.src[self.pos + 1..];
            let mut chars = rest.chars();
            let first = chars.next();
            let has_exp = match first {
                Some(d) if d.is_ascii_digit() => true,
                Some('+') | Some('-') => matches!(chars.next(), Some(d) if d.is_ascii_digit()),
                _ => false,
            };
            if has_exp {
                is_int = false;
                self.bump();
                if matches!(self.peek_char(), Some('+') | Some('-')) {
                    self.bump();
                }
                while matches!(self.peek_char(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text
            .parse()
            .map_err(|_| self.err(line, col, ParseErrorKind::BadNumber(text.to_string())))?;
        if !value.is_finite() {
            return Err(self.err(line, col, ParseErrorKind::NonFinite(text.to_string())));
        }
        // `2i` is an imaginary literal; `2in` would be a malformed identifier.
        if self.peek_char() == Some('i') {
            let after = self.src[self.pos + 1..].chars().next();
            if !matches!(after, Some(c) if c.is_alphanumeric() || c == '_') {
                self.bump();
                return Ok((Tok::Imag(value), line, col));
            }
        }
        if is_int {
            if let Ok(n) = text.parse::<u32>() {
                return Ok((Tok::Int(n), line, col));
            }
        }
        Ok((Tok::Num(value), line, col))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    line: usize,
    col: usize,
    vars: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lex = Lexer::new(src);
        let (tok, line, col) = lex.next()?;
        Ok(Parser {
            lex,
            tok,
            line,
            col,
            vars: Vec::new(),
        })
    }

    fn advance(&mut self) -> Result<Tok, ParseError> {
        let (tok, line, col) = self.lex.next()?;
        self.line = line;
        self.col = col;
        Ok(std::mem::replace(&mut self.tok, tok))
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.err(ParseErrorKind::Unexpected {
            found: self.tok.describe(),
            expected: expected.into(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.tok == Tok::Sym(c) {
            self.advance()?;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match &self.tok {
            Tok::Ident(s) if s == kw => {
                self.advance()?;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn header(&mut self) -> Result<usize, ParseError> {
        self.expect_keyword("vars")?;
        self.expect_sym(':')?;
        loop {
            let Tok::Ident(name) = self.tok.clone() else {
                return Err(self.unexpected("a variable name"));
            };
            if name == "i" || name == "vars" || name == "dim" {
                return Err(self.err(ParseErrorKind::InvalidVariable(name)));
            }
            if self.vars.contains(&name) {
                return Err(self.err(ParseErrorKind::DuplicateVariable(name)));
            }
            self.vars.push(name);
            self.advance()?;
            if self.tok == Tok::Sym(',') {
                self.advance()?;
            } else {
                break;
            }
        }
        self.expect_sym(';')?;
        self.expect_keyword("dim")?;
        self.expect_sym(':')?;
        let Tok::Int(dim) = self.tok else {
            return Err(self.unexpected("a non-negative integer"));
        };
        self.advance()?;
        self.expect_sym(';')?;
        Ok(dim as usize)
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Sym('+') => {
                    self.advance()?;
                    acc = &acc + &self.term()?;
                }
                Tok::Sym('-') => {
                    self.advance()?;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        while self.tok == Tok::Sym('*') {
            self.advance()?;
            let rhs = self.unary()?;
            acc = self.mul_checked(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn mul_checked(&self, a: &Poly, b: &Poly) -> Result<Poly, ParseError> {
        if a.degree() + b.degree() > MAX_DEGREE {
            return Err(self.err(ParseErrorKind::DegreeLimit));
        }
        if a.terms().len().saturating_mul(b.terms().len()) > MAX_PRODUCT_WORK {
            return Err(self.err(ParseErrorKind::SizeLimit));
        }
        let p = a * b;
        if p.terms().len() > MAX_TERMS {
            return Err(self.err(ParseErrorKind::SizeLimit));
        }
        Ok(p)
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        match self.tok {
            Tok::Sym('-') => {
                self.advance()?;
                Ok(-&self.unary()?)
            }
            Tok::Sym('+') => {
                self.advance()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.tok != Tok::Sym('^') {
            return Ok(base);
        }
        self.advance()?;
        let Tok::Int(e) = self.tok else {
            return Err(self.unexpected("a non-negative integer exponent"));
        };
        if (base.degree() as u64) * (e as u64) > MAX_DEGREE as u64 {
            return Err(self.err(ParseErrorKind::DegreeLimit));
        }
        self.advance()?;
        // Square and multiply, with the size checks at every product.
        let mut result = Poly::constant(self.n(), Complex::new(1.0, 0.0));
        let (mut sq, mut k) = (base, e);
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul_checked(&result, &sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = self.mul_checked(&sq, &sq)?;
            }
        }
        Ok(result)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let n = self.n();
        match self.tok.clone() {
            Tok::Num(x) => {
                self.advance()?;
                Ok(Poly::constant(n, Complex::new(x, 0.0)))
            }
            Tok::Int(k) => {
                self.advance()?;
                Ok(Poly::constant(n, Complex::new(k as f64, 0.0)))
            }
            Tok::Imag(x) => {
                self.advance()?;
                Ok(Poly::constant(n, Complex::new(0.0, x)))
            }
            Tok::Ident(name) if name == "i" => {
                self.advance()?;
                Ok(Poly::constant(n, Complex::new(0.0, 1.0)))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(k) => {
                    self.advance()?;
                    Ok(Poly::var(n, k))
                }
                None => Err(self.err(ParseErrorKind::UnknownVariable(name))),
            },
            Tok::Sym('(') => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            _ => Err(self.unexpected("a number, variable or `(`")),
        }
    }
}

/// Parses a full system file (header plus `;`-terminated polynomials).
pub fn parse_system(text: &str) -> Result<PolySystem, ParseError> {
    let mut p = Parser::new(text)?;
    let dim = p.header()?;
    let mut polys = Vec::new();
    while p.tok != Tok::Eof {
        let poly = p.expr()?;
        p.expect_sym(';')?;
        polys.push(poly);
    }
    let (line, col) = (p.line, p.col);
    PolySystem::new(p.vars, polys, dim).map_err(|e| ParseError {
        line,
        col,
        kind: ParseErrorKind::Invalid(e.to_string()),
    })
}

/// Parses a single polynomial expression over the given variable names.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<Poly, ParseError> {
    let mut p = Parser::new(text)?;
    p.vars = vars.to_vec();
    let poly = p.expr()?;
    if p.tok == Tok::Sym(';') {
        p.advance()?;
    }
    if p.tok != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(poly)
}
