//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := base ('^' exponent)?
//! exponent := '-'? integer | '(' '-'? integer ')'
//! base   := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are integers or decimals (read exactly). Identifiers resolve
//! through a [`JetSpec`]; `f'`, `f''` denote derivatives in single-variable
//! contexts.

use num_bigint::BigInt;

use super::Expr;
use crate::jet::JetSpec;
use crate::{Error, Rational, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.1.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((pos, Tok::Num(parse_decimal(&lit).ok_or(Error::Syntax {
                pos,
                msg: format!("malformed number `{lit}`"),
            })?)));
        } else if ch.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            while i < chars.len() && chars[i].1 == '\'' {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|c| c.1).collect())));
        } else if "+-*/^()".contains(ch) {
            out.push((pos, Tok::Op(ch)));
            i += 1;
        } else {
            return Err(Error::Syntax {
                pos,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

fn parse_decimal(lit: &str) -> Option<Rational> {
    let (int, frac) = match lit.split_once('.') {
        Some((a, b)) => (a, b),
        None => (lit, ""),
    };
    if frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(n, d))
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    ctx: &'a JetSpec,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc += self.term()?;
            } else if self.eat('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let at = self.here();
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(Error::Syntax {
                        pos: at,
                        msg: "division by zero".into(),
                    });
                }
                acc = &acc * &d.recip()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let k = match self.peek() {
            Some(Tok::Num(q)) if q.is_integer() => {
                let k: i32 = q
                    .to_integer()
                    .try_into()
                    .or_else(|_| self.err("exponent too large"))?;
                self.pos += 1;
                k
            }
            _ => return self.err("expected integer exponent"),
        };
        if paren {
            self.expect(')')?;
        }
        let k = if neg { -k } else { k };
        if k < 0 && base.is_zero() {
            return self.err("zero to a negative power");
        }
        base.pow(k)
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Expr::from_rational(q))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = matches!(name.as_str(), "sin" | "cos" | "tan" | "exp" | "sqrt");
                if func && self.peek() == Some(&Tok::Op('(')) {
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return match name.as_str() {
                        "sin" => Expr::sin(arg),
                        "cos" => Expr::cos(arg),
                        "tan" => Expr::tan(arg),
                        "exp" => Expr::exp(arg),
                        _ => Expr::sqrt(arg),
                    };
                }
                Ok(Expr::atom(self.ctx.resolve(&name)?))
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` into a canonical expression, resolving identifiers in `ctx`.
pub fn parse_expr(text: &str, ctx: &JetSpec) -> Result<Expr> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        ctx,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
