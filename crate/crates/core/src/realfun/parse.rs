//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := ('-'|'+') unary | factor
//! factor := base ('^' ['-'] integer)?
//! base   := number | 'x' | 'pi' | 'e' | 'inf' | 'del'
//!         | '(+-)' factor | '(-+)' factor
//!         | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Integer literals are exact; literals with a decimal point or exponent are
//! approximate. A quotient of two literals is folded into one constant, as is
//! a negated literal, so printed constants such as `-3/2` parse back to the
//! same tree. `∞ ∂ π ± ∓` are accepted for `inf del pi (+-) (-+)`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Expr, Func};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Scalar),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    AltPlus,
    AltMinus,
    End,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().expect("in bounds");
        let start = i;
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let mut approximate = false;
            if j < bytes.len() && bytes[j] == b'.' {
                approximate = true;
                j += 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
            }
            if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                let mut k = j + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    approximate = true;
                    j = k;
                }
            }
            let text = &src[i..j];
            let value = if approximate {
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, format!("bad number `{text}`")))?;
                Scalar::approx(v)
            } else {
                let n: BigInt = text
                    .parse()
                    .map_err(|_| syntax(start, format!("bad number `{text}`")))?;
                Scalar::Exact(BigRational::from_integer(n))
            };
            out.push((Tok::Num(value), start));
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            out.push((Tok::Ident(src[i..j].to_string()), start));
            i = j;
            continue;
        }
        if src[i..].starts_with("(+-)") {
            out.push((Tok::AltPlus, start));
            i += 4;
            continue;
        }
        if src[i..].starts_with("(-+)") {
            out.push((Tok::AltMinus, start));
            i += 4;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '±' => Tok::AltPlus,
            '∓' => Tok::AltMinus,
            '∞' => Tok::Ident("inf".into()),
            '∂' => Tok::Ident("del".into()),
            'π' => Tok::Ident("pi".into()),
            _ => return Err(syntax(start, format!("unexpected character `{c}`"))),
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = match (&lhs, &rhs) {
                        (Expr::Const(a), Expr::Const(b)) if !b.is_zero() => Expr::Const(a / b),
                        _ => Expr::Div(Box::new(lhs), Box::new(rhs)),
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(match self.unary()? {
                    Expr::Const(c) => Expr::Const(-c),
                    u => Expr::Neg(Box::new(u)),
                })
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let neg = match self.peek() {
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
        match self.bump() {
            Tok::Num(Scalar::Exact(r)) if r.is_integer() => {
                let n: i32 = r
                    .to_integer()
                    .try_into()
                    .map_err(|_| syntax(pos, "exponent out of range"))?;
                Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
            }
            _ => Err(syntax(pos, "exponent must be an integer literal")),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(c) => Ok(Expr::Const(c)),
            Tok::AltPlus => Ok(Expr::Alt(Box::new(self.factor()?))),
            Tok::AltMinus => Ok(Expr::AltNeg(Box::new(self.factor()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::Var),
                "pi" => Ok(Expr::Pi),
                "e" => Ok(Expr::E),
                "inf" => Ok(Expr::Inf),
                "del" => Ok(Expr::Del),
                _ => match Func::from_name(&name) {
                    Some(f) => {
                        self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    None => Err(Error::UnknownIdentifier { name, pos }),
                },
            },
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            t => Err(syntax(pos, format!("unexpected {}", describe(&t)))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::RParen => "`)`",
        Tok::LParen => "`(`",
        _ => "token",
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_tiers() {
        assert_eq!(parse_expr("3/4").unwrap(), Expr::Const(Scalar::ratio(3, 4)));
        assert!(matches!(parse_expr("0.5").unwrap(), Expr::Const(Scalar::Approx(_))));
        assert!(matches!(parse_expr("2e-3").unwrap(), Expr::Const(Scalar::Approx(_))));
        // `2e` is two tokens: the literal 2 and Neper's constant, which is a syntax error
        assert!(parse_expr("2e").is_err());
    }

    #[test]
    fn structure() {
        assert_eq!(parse_expr("1/x").unwrap(), Expr::Div(Box::new(Expr::int(1)), Box::new(Expr::Var)));
        assert_eq!(
            parse_expr("-x^2").unwrap(),
            Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var), 2)))
        );
        assert_eq!(
            parse_expr("(+-)x^2").unwrap(),
            Expr::Alt(Box::new(Expr::Pow(Box::new(Expr::Var), 2)))
        );
        assert_eq!(parse_expr("± ∞").unwrap(), parse_expr("(+-)inf").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expr("1 + foo(x)") {
            Err(Error::UnknownIdentifier { name, pos }) => {
                assert_eq!(name, "foo");
                assert_eq!(pos, 4);
            }
            other => panic!("{other:?}"),
        }
        match parse_expr("(1 + 2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("x^1.5"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("x $ 2"), Err(Error::Syntax { pos: 2, .. })));
        assert!(parse_expr("").is_err());
        assert!(parse_expr("sin x").is_err());
    }
}
