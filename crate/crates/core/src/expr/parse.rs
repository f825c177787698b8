//! Recursive-descent parser, one token of lookahead.
//!
//! ```text
//! vector   := expr (',' expr)*
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := base ('^' signed-integer)?
//! base     := number | 'i' | variable | '(' expr ')' | '-' base
//! variable := PREFIX digits            (bare PREFIX when n = 1)
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::ast::{BinOp, Node};
use crate::rational::ComplexRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("at offset {offset}: expected {expected}, found {found}")]
    Syntax { offset: usize, expected: String, found: String },
    #[error("at offset {offset}: unknown variable '{name}' (dimension {n})")]
    UnknownVariable { offset: usize, name: String, n: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownVariable { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: BigRational, imag: bool, integer: bool },
    ImagUnit,
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
    Bad(Box<ParseError>),
}

impl Tok {
    fn describe(&self, src: &str) -> String {
        match self {
            Tok::End => "end of input".to_string(),
            _ => format!("'{src}'"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
    text: String,
}

/// Tokenizes up to the first lexical error, which becomes a `Bad` token so the
/// parser reports whichever problem comes first in the input.
fn lex(text: &str, n: usize, prefix: char) -> Vec<Token> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let single = |t: Tok| Some(t);
        let punct = match c {
            b'+' => single(Tok::Plus),
            b'-' => single(Tok::Minus),
            b'*' => single(Tok::Star),
            b'/' => single(Tok::Slash),
            b'^' => single(Tok::Caret),
            b'(' => single(Tok::LParen),
            b')' => single(Tok::RParen),
            b',' => single(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = punct {
            pos += 1;
            out.push(Token { tok, offset: start, text: text[start..pos].to_string() });
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(pos + 1).is_some_and(u8::is_ascii_digit)) {
            let (value, integer, end) = lex_number(text, pos);
            pos = end;
            let imag = bytes.get(pos) == Some(&b'i') && !bytes.get(pos + 1).is_some_and(|b| b.is_ascii_alphanumeric());
            if imag {
                pos += 1;
            }
            out.push(Token { tok: Tok::Num { value, imag, integer }, offset: start, text: text[start..pos].to_string() });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            let word = &text[start..pos];
            let tok = if word == "i" {
                Tok::ImagUnit
            } else if let Some(rest) = word.strip_prefix(prefix) {
                let index = if rest.is_empty() && n == 1 {
                    Some(1)
                } else if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                    rest.parse::<usize>().ok()
                } else {
                    None
                };
                match index {
                    Some(j) if j >= 1 && j <= n => Tok::Var(j - 1),
                    _ => Tok::Bad(Box::new(ParseError::UnknownVariable { offset: start, name: word.to_string(), n })),
                }
            } else {
                Tok::Bad(Box::new(ParseError::Syntax {
                    offset: start,
                    expected: "operand".to_string(),
                    found: format!("'{word}'"),
                }))
            };
            let bad = matches!(tok, Tok::Bad(_));
            out.push(Token { tok, offset: start, text: word.to_string() });
            if bad {
                return out;
            }
            continue;
        }
        let ch = text[pos..].chars().next().unwrap_or('?');
        let err = ParseError::Syntax { offset: start, expected: "token".to_string(), found: format!("'{ch}'") };
        out.push(Token { tok: Tok::Bad(Box::new(err)), offset: start, text: ch.to_string() });
        return out;
    }
    out.push(Token { tok: Tok::End, offset: text.len(), text: String::new() });
    out
}

/// Scans `digits[.digits][e[+-]digits]` into an exact rational.
fn lex_number(text: &str, start: usize) -> (BigRational, bool, usize) {
    let bytes = text.as_bytes();
    let mut pos = start;
    let mut mantissa = String::new();
    let mut frac_digits = 0i64;
    let mut integer = true;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        mantissa.push(bytes[pos] as char);
        pos += 1;
    }
    if pos < bytes.len() && bytes[pos] == b'.' && bytes.get(pos + 1).is_some_and(u8::is_ascii_digit) {
        integer = false;
        pos += 1;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            mantissa.push(bytes[pos] as char);
            frac_digits += 1;
            pos += 1;
        }
    }
    let mut exp = 0i64;
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        let mut p = pos + 1;
        let neg = match bytes.get(p) {
            Some(b'-') => {
                p += 1;
                true
            }
            Some(b'+') => {
                p += 1;
                false
            }
            _ => false,
        };
        if bytes.get(p).is_some_and(u8::is_ascii_digit) {
            let s = p;
            while p < bytes.len() && bytes[p].is_ascii_digit() {
                p += 1;
            }
            exp = text[s..p].parse::<i64>().unwrap_or(0);
            if neg {
                exp = -exp;
            }
            integer = false;
            pos = p;
        }
    }
    let m: BigInt = mantissa.parse().unwrap_or_else(|_| BigInt::zero());
    let scale = exp - frac_digits;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(m * ten.pow(scale as u32))
    } else {
        BigRational::new(m, ten.pow((-scale) as u32))
    };
    (value, integer, pos)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        if let Tok::Bad(e) = &t.tok {
            return (**e).clone();
        }
        ParseError::Syntax {
            offset: t.offset,
            expected: expected.to_string(),
            found: t.tok.describe(&self.src[t.offset..t.offset + t.text.len()]),
        }
    }

    fn vector(&mut self) -> Result<Vec<Node>, ParseError> {
        let mut comps = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            comps.push(self.expr()?);
        }
        if self.peek().tok != Tok::End {
            return Err(self.error("operator or end of input"));
        }
        Ok(comps)
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Node::bin(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        let base = self.base()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = match self.peek().tok {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num { value, imag: false, integer: true } => {
                let e = value.to_integer().to_i32().filter(|e| e.unsigned_abs() <= 1 << 16);
                let Some(e) = e else {
                    return Err(self.error("integer exponent of modest size"));
                };
                self.bump();
                Ok(Node::pow(base, if negative { -e } else { e }))
            }
            _ => Err(self.error("integer exponent")),
        }
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num { value, imag, .. } => {
                self.bump();
                let c = if imag {
                    ComplexRational::new(Zero::zero(), value)
                } else {
                    ComplexRational::real(value)
                };
                Ok(Node::Lit(c))
            }
            Tok::ImagUnit => {
                self.bump();
                Ok(Node::Lit(ComplexRational::i()))
            }
            Tok::Var(j) => {
                self.bump();
                Ok(Node::Var(j))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.error("')'"));
                }
                self.bump();
                Ok(e)
            }
            Tok::Minus => {
                self.bump();
                Ok(Node::negate(self.base()?))
            }
            _ => Err(self.error("operand")),
        }
    }
}

/// Parses a comma-separated vector of expressions in `PREFIX1..PREFIXn`.
pub fn parse_components(text: &str, n: usize, prefix: char) -> Result<Vec<Node>, ParseError> {
    let tokens = lex(text, n, prefix);
    let mut p = Parser { tokens, pos: 0, src: text };
    p.vector()
}
