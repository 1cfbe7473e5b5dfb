//! A minimal expression grammar for operator specifications.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom
//! atom   := scalar | generator | '(' expr ')'
//! scalar := float ['i'] | 'i'
//! generator := 'a' digits | 'ad' digits
//! ```
//!
//! `a3` is the annihilation operator of the mode labeled 3, `ad3` the
//! creation operator. Scalars act as multiples of the identity, so
//! `0.5*(a1 + ad1)` and `a1*a2 - i*ad2` are valid.

use crate::algebra::AlgebraRef;
use crate::error::{Error, Result};
use crate::linalg::{c, cr, CMat};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Imag(f64),
    Gen { creation: bool, label: u32 },
    Plus,
    Minus,
    Star,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let ch = bytes[pos] as char;
        match ch {
            ' ' | '\t' | '\n' => pos += 1,
            '+' => {
                out.push(Token::Plus);
                pos += 1;
            }
            '-' => {
                out.push(Token::Minus);
                pos += 1;
            }
            '*' => {
                out.push(Token::Star);
                pos += 1;
            }
            '(' => {
                out.push(Token::Open);
                pos += 1;
            }
            ')' => {
                out.push(Token::Close);
                pos += 1;
            }
            'i' => {
                out.push(Token::Imag(1.0));
                pos += 1;
            }
            'a' => {
                pos += 1;
                let creation = pos < bytes.len() && bytes[pos] as char == 'd';
                if creation {
                    pos += 1;
                }
                let start = pos;
                while pos < bytes.len() && (bytes[pos] as char).is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(Error::ExprParse(format!(
                        "expected mode label after '{}' at byte {start}",
                        if creation { "ad" } else { "a" }
                    )));
                }
                let label: u32 = src[start..pos]
                    .parse()
                    .map_err(|_| Error::ExprParse("bad mode label".into()))?;
                out.push(Token::Gen { creation, label });
            }
            d if d.is_ascii_digit() || d == '.' => {
                let start = pos;
                while pos < bytes.len() {
                    let c = bytes[pos] as char;
                    if c.is_ascii_digit() || c == '.' {
                        pos += 1;
                    } else if c == 'e' || c == 'E' {
                        pos += 1;
                        if pos < bytes.len() && matches!(bytes[pos] as char, '+' | '-') {
                            pos += 1;
                        }
                    } else {
                        break;
                    }
                }
                let value: f64 = src[start..pos]
                    .parse()
                    .map_err(|_| Error::ExprParse(format!("bad number '{}'", &src[start..pos])))?;
                if pos < bytes.len() && bytes[pos] as char == 'i' {
                    pos += 1;
                    out.push(Token::Imag(value));
                } else {
                    out.push(Token::Num(value));
                }
            }
            other => {
                return Err(Error::ExprParse(format!(
                    "unexpected character '{other}' at byte {pos}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    cursor: usize,
    algebra: &'a AlgebraRef,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).cloned();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<CMat> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    acc += self.term()?;
                }
                Token::Minus => {
                    self.bump();
                    acc -= self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CMat> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Token::Star)) {
            self.bump();
            acc = acc * self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<CMat> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(-self.factor()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<CMat> {
        let dim = self.algebra.dim();
        match self.bump() {
            Some(Token::Num(x)) => Ok(CMat::identity(dim, dim) * cr(x)),
            Some(Token::Imag(x)) => Ok(CMat::identity(dim, dim) * c(0.0, x)),
            Some(Token::Gen { creation, label }) => {
                let m = if creation {
                    self.algebra.creation(label)?
                } else {
                    self.algebra.annihilation(label)?
                };
                Ok(m.clone())
            }
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(Error::ExprParse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::ExprParse(format!(
                "unexpected token {other:?} where a value was expected"
            ))),
        }
    }
}

/// Evaluates an operator expression in the given algebra.
pub fn parse_operator(src: &str, algebra: &AlgebraRef) -> Result<CMat> {
    let tokens = lex(src)?;
    if tokens.is_empty() {
        return Err(Error::ExprParse("empty expression".into()));
    }
    let mut parser = Parser {
        tokens,
        cursor: 0,
        algebra,
    };
    let m = parser.expr()?;
    if parser.cursor != parser.tokens.len() {
        return Err(Error::ExprParse("trailing input after expression".into()));
    }
    Ok(m)
}
