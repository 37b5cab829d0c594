//! Pratt parser for the expression grammar.

use super::{lookup_function, Expr, ExprError, Expression};
use crate::scalar::{decimal_to_ratio, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (t, at) = lx.next()?;
            let end = t == Tok::End;
            out.push((t, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += self.peek().map_or(0, char::len_utf8);
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == '.' {
            return Ok((Tok::Num(self.number()?), start));
        }
        if c.is_alphabetic() || c == '_' {
            while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                self.pos += self.peek().map_or(0, char::len_utf8);
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        self.pos += c.len_utf8();
        let t = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        Ok((t, start))
    }

    fn number(&mut self) -> Result<String, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - s
        };
        let mut n = digits(&mut self.pos);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(ExprError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                p += 1;
            }
            // only an exponent if digits follow; otherwise `e` starts an identifier
            if digits(&mut p) > 0 {
                self.pos = p;
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a [String],
}

// binding powers
const ADD: (u8, u8) = (1, 2);
const MUL: (u8, u8) = (3, 4);
const NEG: u8 = 5;
const POW: (u8, u8) = (7, 6);

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ExprError::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ExprError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::Op(c) => *c,
                Tok::End | Tok::RParen | Tok::Comma => break,
                _ => {
                    return Err(ExprError::Syntax {
                        offset: self.offset(),
                        message: "expected an operator".into(),
                    })
                }
            };
            let (l, r) = match op {
                '+' | '-' => ADD,
                '*' | '/' => MUL,
                '^' => POW,
                _ => unreachable!("lexer only emits arithmetic operators"),
            };
            if l < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(r)?;
            lhs = match op {
                '+' => Expr::Add(Box::new(lhs), Box::new(rhs)),
                '-' => Expr::Sub(Box::new(lhs), Box::new(rhs)),
                '*' => Expr::Mul(Box::new(lhs), Box::new(rhs)),
                '/' => Expr::Div(Box::new(lhs), Box::new(rhs)),
                _ => Expr::Pow(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ExprError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(text) => {
                let v = decimal_to_ratio(&text).ok_or(ExprError::Syntax {
                    offset: at,
                    message: format!("malformed number `{text}`"),
                })?;
                Ok(Expr::Num(Scalar::from_rational(v)))
            }
            Tok::Op('-') => {
                let inner = self.expr(NEG)?;
                Ok(Expr::Neg(Box::new(inner)))
            }
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, at),
            Tok::End => Err(ExprError::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
            _ => Err(ExprError::Syntax {
                offset: at,
                message: "expected a value".into(),
            }),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr, ExprError> {
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Expr::Var(i));
        }
        match name.as_str() {
            "i" => return Ok(Expr::Num(Scalar::i())),
            "pi" => return Ok(Expr::Num(Scalar::from_f64(std::f64::consts::PI))),
            _ => {}
        }
        let Some(f) = lookup_function(&name) else {
            return Err(ExprError::UnknownIdentifier { name, offset: at });
        };
        if *self.peek() != Tok::LParen {
            return Err(ExprError::Arity {
                name,
                expected: 1,
                got: 0,
                offset: at,
            });
        }
        self.bump();
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr(0)?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)` closing the argument list")?;
        if args.len() != 1 {
            return Err(ExprError::Arity {
                name,
                expected: 1,
                got: args.len(),
                offset: at,
            });
        }
        Ok(Expr::Call(f, Box::new(args.pop().expect("one argument"))))
    }
}

/// Parses `text` over the ordered variable names.
pub fn parse(text: &str, vars: &[String]) -> Result<Expression, ExprError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0, vars };
    let e = p.expr(0)?;
    match p.peek() {
        Tok::End => Ok(Expression::new(e, vars.to_vec())),
        _ => Err(ExprError::Syntax {
            offset: p.offset(),
            message: "unexpected trailing input".into(),
        }),
    }
}
