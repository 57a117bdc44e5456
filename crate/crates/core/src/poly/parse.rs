//! Recursive-descent parser for `(φ, π)` polynomials.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("+" | "-") unary | power
//! power  := atom ("^" unary)?
//! atom   := NUMBER | IDENT | "(" expr ")"
//! IDENT  := phi<k> | pi<k> (k ≥ 1, a variable) | any other name (a binding)
//! ```
//!
//! Exponents must evaluate to non-negative integer constants, divisors to
//! nonzero constants. Two atoms may not be juxtaposed. Positions in errors
//! are 1-based character columns.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Chart, PolyExpr, Var};
use crate::error::{Error, Result};
use crate::Poly;

/// Symbolic constants substituted at parse time.
pub type Bindings = BTreeMap<String, f64>;

const MAX_EXPONENT: f64 = 64.0;

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

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
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
            let lexeme: String = chars[start..i].iter().collect();
            let value = lexeme.parse::<f64>().map_err(|_| Error::Syntax {
                position: pos,
                message: format!("malformed number `{lexeme}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                pos,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        return Err(Error::Syntax {
            position: pos,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len() + 1,
    });
    Ok(out)
}

/// `phi<k>` / `pi<k>` with `k ≥ 1` written without leading zeros.
fn variable(name: &str) -> Option<Var> {
    let (ctor, digits): (fn(usize) -> Var, &str) = if let Some(d) = name.strip_prefix("phi") {
        (Var::Phi, d)
    } else if let Some(d) = name.strip_prefix("pi") {
        (Var::Pi, d)
    } else {
        return None;
    };
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok().map(|k| ctor(k - 1))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    at: usize,
    bindings: &'a Bindings,
    modes: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn constant(&self, v: f64) -> Poly {
        PolyExpr::constant(Chart::PhiPi, self.modes, Complex64::new(v, 0.0))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    let pos = self.bump().pos;
                    let divisor = self.unary()?;
                    match divisor.as_constant() {
                        Some(d) if d.norm() > 0.0 => acc = acc.scale(&(1.0 / d)),
                        Some(_) => {
                            return Err(Error::Syntax {
                                position: pos,
                                message: "division by zero".into(),
                            })
                        }
                        None => {
                            return Err(Error::Syntax {
                                position: pos,
                                message: "division by a non-constant expression".into(),
                            })
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.peek().pos;
        let exponent = self.unary()?;
        let e = exponent
            .as_constant()
            .filter(|c| c.im == 0.0)
            .map(|c| c.re)
            .ok_or(Error::NonIntegerExponent { position: pos })?;
        if e.fract() != 0.0 {
            return Err(Error::NonIntegerExponent { position: pos });
        }
        if !(0.0..=MAX_EXPONENT).contains(&e) {
            return Err(Error::Syntax {
                position: pos,
                message: format!("exponent {e} outside 0..={MAX_EXPONENT}"),
            });
        }
        Ok(base.pow(e as u32))
    }

    fn atom(&mut self) -> Result<Poly> {
        let t = self.bump();
        let value = match t.tok {
            Tok::Num(v) => self.constant(v),
            Tok::Ident(ref name) => {
                if let Some(v) = variable(name) {
                    PolyExpr::var(self.modes, v)?
                } else if let Some(&v) = self.bindings.get(name) {
                    self.constant(v)
                } else {
                    return Err(Error::UnboundSymbol {
                        name: name.clone(),
                        position: t.pos,
                    });
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(Error::Syntax {
                        position: close.pos,
                        message: "expected `)`".into(),
                    });
                }
                inner
            }
            Tok::End => {
                return Err(Error::Syntax {
                    position: t.pos,
                    message: "unexpected end of input".into(),
                })
            }
            ref other => {
                return Err(Error::Syntax {
                    position: t.pos,
                    message: format!("unexpected token {other:?}"),
                })
            }
        };
        let next = self.peek();
        if matches!(next.tok, Tok::Num(_) | Tok::Ident(_) | Tok::LParen) {
            return Err(Error::Syntax {
                position: next.pos,
                message: "implicit multiplication is not allowed; use `*`".into(),
            });
        }
        Ok(value)
    }
}

/// Parses a polynomial; the mode count is the largest variable index used
/// (at least one).
pub fn parse_poly(text: &str, bindings: &Bindings) -> Result<Poly> {
    parse_poly_with_modes(text, bindings, 1)
}

/// Parses a polynomial over at least `min_modes` modes.
pub fn parse_poly_with_modes(text: &str, bindings: &Bindings, min_modes: usize) -> Result<Poly> {
    let tokens = lex(text)?;
    let modes = tokens
        .iter()
        .filter_map(|t| match &t.tok {
            Tok::Ident(name) => variable(name).map(|v| v.mode() + 1),
            _ => None,
        })
        .fold(min_modes.max(1), usize::max);
    let mut parser = Parser {
        tokens,
        at: 0,
        bindings,
        modes,
    };
    let p = parser.expr()?;
    let end = parser.peek();
    if end.tok != Tok::End {
        return Err(Error::Syntax {
            position: end.pos,
            message: format!("unexpected token {:?}", end.tok),
        });
    }
    Ok(p)
}
